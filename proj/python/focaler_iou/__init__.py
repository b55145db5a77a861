"""IoU-family bounding-box regression losses with Focaler interval remapping."""

from ._core import (
    Box,
    FocalerInterval,
    FocusMode,
    LossKind,
    SiouParams,
    analyze,
    compare,
    fd_grad,
    focaler_iou_loss,
    focaler_loss,
    focaler_map,
    generate_scenarios,
    grad_check,
    iou,
    loss,
    loss_grad,
    mapping_slope,
    metric,
    paper_fixture,
    run,
)

__all__ = [
    "Box",
    "FocalerInterval",
    "FocusMode",
    "LossKind",
    "SiouParams",
    "analyze",
    "compare",
    "fd_grad",
    "focaler_iou_loss",
    "focaler_loss",
    "focaler_map",
    "generate_scenarios",
    "grad_check",
    "iou",
    "loss",
    "loss_grad",
    "mapping_slope",
    "metric",
    "paper_fixture",
    "run",
]

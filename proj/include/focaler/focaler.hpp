#pragma once

#include "focaler/geometry.hpp"
#include "focaler/variants.hpp"

namespace focaler {

/// Bounds (d, u) of the linear IoU remapping, 0 <= d < u <= 1.
class FocalerInterval {
 public:
  // Identity mapping (0, 1).
  FocalerInterval() = default;
  FocalerInterval(double d, double u);

  double d() const { return d_; }
  double u() const { return u_; }
  double slope() const { return 1.0 / (u_ - d_); }
  bool is_identity() const { return d_ == 0.0 && u_ == 1.0; }

  friend bool operator==(const FocalerInterval&, const FocalerInterval&) = default;

 private:
  double d_ = 0.0;
  double u_ = 1.0;
};

struct FocalerEval {
  LossKind kind = LossKind::IoU;
  double iou = 0.0;
  double iou_focaler = 0.0;
  double base_loss = 0.0;
  double focaler_loss = 0.0;
  bool degenerate = false;
};

// Piecewise-linear remap: 0 below d, (iou - d) / (u - d) on [d, u], 1 above u.
// Throws InvalidInput when iou is non-finite or outside [0, 1].
double focaler_map(double iou, const FocalerInterval& iv);

// 1 - focaler_map(iou, iv).
double focaler_iou_loss(double iou, const FocalerInterval& iv);

// L_X + IoU - IoU^focaler, where L_X is the plain loss of `kind`. For
// kind == IoU this is exactly focaler_iou_loss.
FocalerEval focaler_loss(LossKind kind, const Box& a, const Box& g, const FocalerInterval& iv,
                         const SiouParams& p = {});

// d focaler_map / d iou. At iou == d or iou == u the interior value 1/(u-d)
// is returned.
double mapping_slope(double iou, const FocalerInterval& iv);

// True when iou sits exactly on a kink of the mapping. The bounds d = 0 and
// u = 1 are not kinks since the flat branch beyond them is empty.
bool on_mapping_kink(double iou, const FocalerInterval& iv);

}  // namespace focaler

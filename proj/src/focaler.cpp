#include "focaler/focaler.hpp"

#include <cmath>
#include <string>

namespace focaler {

namespace {

void check_iou(double iou) {
  if (!std::isfinite(iou) || iou < 0.0 || iou > 1.0) {
    throw InvalidInput("iou must be a finite value in [0, 1], got " + std::to_string(iou));
  }
}

}  // namespace

FocalerInterval::FocalerInterval(double d, double u) : d_(d), u_(u) {
  if (!std::isfinite(d) || !std::isfinite(u) || d < 0.0 || u > 1.0 || !(d < u)) {
    throw InvalidInput("focaler interval requires 0 <= d < u <= 1, got d=" + std::to_string(d) +
                       " u=" + std::to_string(u));
  }
}

double focaler_map(double iou, const FocalerInterval& iv) {
  check_iou(iou);
  if (iou < iv.d()) return 0.0;
  if (iou > iv.u()) return 1.0;
  return (iou - iv.d()) / (iv.u() - iv.d());
}

double focaler_iou_loss(double iou, const FocalerInterval& iv) {
  return 1.0 - focaler_map(iou, iv);
}

FocalerEval focaler_loss(LossKind kind, const Box& a, const Box& g, const FocalerInterval& iv,
                         const SiouParams& p) {
  const MetricBreakdown m = metric(kind, a, g, p);
  FocalerEval out;
  out.kind = kind;
  out.iou = m.iou;
  out.iou_focaler = focaler_map(m.iou, iv);
  out.base_loss = 1.0 - m.metric;
  out.focaler_loss = out.base_loss + out.iou - out.iou_focaler;
  out.degenerate = m.degenerate;
  return out;
}

double mapping_slope(double iou, const FocalerInterval& iv) {
  check_iou(iou);
  if (iou < iv.d() || iou > iv.u()) return 0.0;
  return iv.slope();
}

bool on_mapping_kink(double iou, const FocalerInterval& iv) {
  return (iv.d() > 0.0 && iou == iv.d()) || (iv.u() < 1.0 && iou == iv.u());
}

}  // namespace focaler

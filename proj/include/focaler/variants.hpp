#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "focaler/geometry.hpp"

namespace focaler {

enum class LossKind { IoU, GIoU, DIoU, CIoU, EIoU, SIoU };

inline constexpr std::array<LossKind, 6> kAllLossKinds = {
    LossKind::IoU, LossKind::GIoU, LossKind::DIoU, LossKind::CIoU, LossKind::EIoU, LossKind::SIoU};

// Lowercase token: "iou", "giou", "diou", "ciou", "eiou", "siou".
std::string_view to_string(LossKind kind);
std::optional<LossKind> try_parse_loss_kind(std::string_view token);
// Throws InvalidInput listing the valid tokens.
LossKind parse_loss_kind(std::string_view token);
std::string valid_loss_tokens();

/// Shape exponent and angle-term guard for SIoU.
struct SiouParams {
  double theta = 4.0;
  double eps = 1e-7;

  void validate() const;
};

/// A metric value with the pieces it was assembled from.
///
/// Term names per kind:
///   giou: giou_term
///   diou: dist
///   ciou: dist, v, alpha, aspect (= alpha * v)
///   eiou: dist, width, height
///   siou: angle (Lambda), gamma, rho_x, rho_y, delta, omega_w, omega_h, omega
/// `degenerate` is set whenever a zero denominator forced a term to 0.
struct MetricBreakdown {
  LossKind kind = LossKind::IoU;
  double metric = 0.0;
  double iou = 0.0;
  std::map<std::string, double> terms;
  bool degenerate = false;

  double term(const std::string& name) const;
};

// Recomputes the metric from `iou` and `terms` using the variant's formula.
double reconstruct_metric(const MetricBreakdown& m);

MetricBreakdown iou_breakdown(const Box& a, const Box& g);
MetricBreakdown giou(const Box& a, const Box& g);
MetricBreakdown diou(const Box& a, const Box& g);
MetricBreakdown ciou(const Box& a, const Box& g);
MetricBreakdown eiou(const Box& a, const Box& g);
MetricBreakdown siou(const Box& a, const Box& g, const SiouParams& p = {});

MetricBreakdown metric(LossKind kind, const Box& a, const Box& g, const SiouParams& p = {});

// 1 - metric.
double loss(LossKind kind, const Box& a, const Box& g, const SiouParams& p = {});

}  // namespace focaler

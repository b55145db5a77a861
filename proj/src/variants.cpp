#include "focaler/variants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace focaler {

namespace {

constexpr std::array<std::string_view, 6> kTokens = {"iou", "giou", "diou", "ciou", "eiou", "siou"};

// rho^2(b, b_gt) / c^2, or 0 when the hull has zero diagonal.
double distance_term(const Box& a, const Box& g, const EncloseInfo& e, bool& degenerate) {
  if (e.diag2 <= 0.0) {
    degenerate = true;
    return 0.0;
  }
  return center_dist2(a, g) / e.diag2;
}

}  // namespace

std::string_view to_string(LossKind kind) { return kTokens[static_cast<std::size_t>(kind)]; }

std::optional<LossKind> try_parse_loss_kind(std::string_view token) {
  for (std::size_t i = 0; i < kTokens.size(); ++i) {
    if (kTokens[i] == token) return static_cast<LossKind>(i);
  }
  return std::nullopt;
}

std::string valid_loss_tokens() {
  std::string out;
  for (auto t : kTokens) {
    if (!out.empty()) out += ", ";
    out += t;
  }
  return out;
}

LossKind parse_loss_kind(std::string_view token) {
  if (auto k = try_parse_loss_kind(token)) return *k;
  throw InvalidInput("unknown loss '" + std::string(token) + "'; valid: " + valid_loss_tokens());
}

void SiouParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvalidInput("siou theta must be > 0");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidInput("siou eps must be > 0");
}

double MetricBreakdown::term(const std::string& name) const {
  auto it = terms.find(name);
  return it == terms.end() ? 0.0 : it->second;
}

double reconstruct_metric(const MetricBreakdown& m) {
  switch (m.kind) {
    case LossKind::IoU:
      return m.iou;
    case LossKind::GIoU:
      return m.iou - m.term("giou_term");
    case LossKind::DIoU:
      return m.iou - m.term("dist");
    case LossKind::CIoU:
      return m.iou - m.term("dist") - m.term("aspect");
    case LossKind::EIoU:
      return m.iou - m.term("dist") - m.term("width") - m.term("height");
    case LossKind::SIoU:
      return m.iou - 0.5 * (m.term("delta") + m.term("omega"));
  }
  return m.iou;
}

MetricBreakdown iou_breakdown(const Box& a, const Box& g) {
  MetricBreakdown m;
  m.kind = LossKind::IoU;
  m.degenerate = union_area(a, g) <= 0.0;
  m.iou = iou(a, g);
  m.metric = m.iou;
  return m;
}

MetricBreakdown giou(const Box& a, const Box& g) {
  MetricBreakdown m = iou_breakdown(a, g);
  m.kind = LossKind::GIoU;
  const EncloseInfo e = enclose_info(a, g);
  double term = 0.0;
  if (e.enclose_area <= 0.0) {
    m.degenerate = true;
  } else {
    term = (e.enclose_area - union_area(a, g)) / e.enclose_area;
  }
  m.terms["giou_term"] = term;
  m.metric = m.iou - term;
  return m;
}

MetricBreakdown diou(const Box& a, const Box& g) {
  MetricBreakdown m = iou_breakdown(a, g);
  m.kind = LossKind::DIoU;
  const EncloseInfo e = enclose_info(a, g);
  const double dist = distance_term(a, g, e, m.degenerate);
  m.terms["dist"] = dist;
  m.metric = m.iou - dist;
  return m;
}

MetricBreakdown ciou(const Box& a, const Box& g) {
  MetricBreakdown m = iou_breakdown(a, g);
  m.kind = LossKind::CIoU;
  const EncloseInfo e = enclose_info(a, g);
  const double dist = distance_term(a, g, e, m.degenerate);

  double v = 0.0;
  double alpha = 0.0;
  if (a.w() <= 0.0 || a.h() <= 0.0 || g.w() <= 0.0 || g.h() <= 0.0) {
    m.degenerate = true;
  } else {
    const double diff = std::atan(g.w() / g.h()) - std::atan(a.w() / a.h());
    v = 4.0 / (std::numbers::pi * std::numbers::pi) * diff * diff;
    // alpha is 0/0 at v = 0, IoU = 1; the product alpha * v vanishes there.
    if (v > 0.0) alpha = v / ((1.0 - m.iou) + v);
  }
  const double aspect = alpha * v;
  m.terms["dist"] = dist;
  m.terms["v"] = v;
  m.terms["alpha"] = alpha;
  m.terms["aspect"] = aspect;
  m.metric = m.iou - dist - aspect;
  return m;
}

MetricBreakdown eiou(const Box& a, const Box& g) {
  MetricBreakdown m = iou_breakdown(a, g);
  m.kind = LossKind::EIoU;
  const EncloseInfo e = enclose_info(a, g);
  const double dist = distance_term(a, g, e, m.degenerate);

  double width = 0.0;
  if (e.wc <= 0.0) {
    m.degenerate = true;
  } else {
    const double dw = a.w() - g.w();
    width = dw * dw / (e.wc * e.wc);
  }
  double height = 0.0;
  if (e.hc <= 0.0) {
    m.degenerate = true;
  } else {
    const double dh = a.h() - g.h();
    height = dh * dh / (e.hc * e.hc);
  }
  m.terms["dist"] = dist;
  m.terms["width"] = width;
  m.terms["height"] = height;
  m.metric = m.iou - dist - width - height;
  return m;
}

MetricBreakdown siou(const Box& a, const Box& g, const SiouParams& p) {
  p.validate();
  MetricBreakdown m = iou_breakdown(a, g);
  m.kind = LossKind::SIoU;
  const EncloseInfo e = enclose_info(a, g);

  const double dx = g.cx() - a.cx();
  const double dy = g.cy() - a.cy();
  const double sigma = std::sqrt(dx * dx + dy * dy);
  const double sin_alpha = std::min(std::abs(dx), std::abs(dy)) / (sigma + p.eps);
  const double angle = std::sin(2.0 * std::asin(sin_alpha));
  const double gamma = 2.0 - angle;

  double rho_x = 0.0;
  if (e.wc <= 0.0) {
    m.degenerate = true;
  } else {
    rho_x = (dx / e.wc) * (dx / e.wc);
  }
  double rho_y = 0.0;
  if (e.hc <= 0.0) {
    m.degenerate = true;
  } else {
    rho_y = (dy / e.hc) * (dy / e.hc);
  }
  const double delta = (1.0 - std::exp(-gamma * rho_x)) + (1.0 - std::exp(-gamma * rho_y));

  auto shape_ratio = [&m](double w, double wg) {
    const double denom = std::max(w, wg);
    if (denom <= 0.0) {
      m.degenerate = true;
      return 0.0;
    }
    return std::abs(w - wg) / denom;
  };
  const double omega_w = shape_ratio(a.w(), g.w());
  const double omega_h = shape_ratio(a.h(), g.h());
  const double omega = std::pow(1.0 - std::exp(-omega_w), p.theta) +
                       std::pow(1.0 - std::exp(-omega_h), p.theta);

  m.terms["angle"] = angle;
  m.terms["gamma"] = gamma;
  m.terms["rho_x"] = rho_x;
  m.terms["rho_y"] = rho_y;
  m.terms["delta"] = delta;
  m.terms["omega_w"] = omega_w;
  m.terms["omega_h"] = omega_h;
  m.terms["omega"] = omega;
  m.metric = m.iou - 0.5 * (delta + omega);
  return m;
}

MetricBreakdown metric(LossKind kind, const Box& a, const Box& g, const SiouParams& p) {
  switch (kind) {
    case LossKind::IoU:
      return iou_breakdown(a, g);
    case LossKind::GIoU:
      return giou(a, g);
    case LossKind::DIoU:
      return diou(a, g);
    case LossKind::CIoU:
      return ciou(a, g);
    case LossKind::EIoU:
      return eiou(a, g);
    case LossKind::SIoU:
      return siou(a, g, p);
  }
  throw InvalidInput("unknown loss kind");
}

double loss(LossKind kind, const Box& a, const Box& g, const SiouParams& p) {
  return 1.0 - metric(kind, a, g, p).metric;
}

}  // namespace focaler

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "focaler/focaler.hpp"
#include "focaler/geometry.hpp"
#include "focaler/variants.hpp"

namespace focaler {

/// Partial derivatives of a scalar loss with respect to the anchor's
/// (cx, cy, w, h).
struct Grad4 {
  double d_cx = 0.0;
  double d_cy = 0.0;
  double d_w = 0.0;
  double d_h = 0.0;

  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;

  Grad4& operator+=(const Grad4& o);
  Grad4& operator-=(const Grad4& o);
  Grad4& operator*=(double s);
  friend Grad4 operator+(Grad4 a, const Grad4& b) { return a += b; }
  friend Grad4 operator-(Grad4 a, const Grad4& b) { return a -= b; }
  friend Grad4 operator*(Grad4 a, double s) { return a *= s; }
  friend Grad4 operator*(double s, Grad4 a) { return a *= s; }
  friend bool operator==(const Grad4&, const Grad4&) = default;

  double max_abs() const;
  double norm() const;
  bool finite() const;
};

struct LossGrad {
  double loss = 0.0;
  Grad4 grad;
  double iou = 0.0;
  Grad4 iou_grad;
  // The evaluation point lies on a non-differentiable locus; `grad` holds the
  // averaged one-sided derivatives there.
  bool nonsmooth = false;
};

// Loss and its analytic gradient with the GT box held fixed. With an
// interval the Focaler-composed loss L_X + IoU - IoU^focaler is used, whose
// gradient is grad L_X + (1 - slope) * grad IoU.
LossGrad loss_grad(LossKind kind, const Box& a, const Box& g,
                   const std::optional<FocalerInterval>& iv = std::nullopt,
                   const SiouParams& p = {});

// Loss value along the same path loss_grad uses (plain or Focaler-composed).
double composed_loss(LossKind kind, const Box& a, const Box& g,
                     const std::optional<FocalerInterval>& iv, const SiouParams& p);

// Central differences with a relative step h = step * max(1, |x|) per
// coordinate. A perturbation that would make w or h negative shrinks the
// step tenfold once; throws InvalidInput if that is still not enough.
Grad4 fd_grad(LossKind kind, const Box& a, const Box& g, const std::optional<FocalerInterval>& iv,
              const SiouParams& p = {}, double step = 1e-6);

// True when some non-smooth locus of the selected loss lies within
// `coord_margin` (in coordinates) or `iou_margin` (for the Focaler kinks) of
// the evaluation point. Zero margins test the exact locus.
bool near_nonsmooth(LossKind kind, const Box& a, const Box& g,
                    const std::optional<FocalerInterval>& iv, const SiouParams& p,
                    double coord_margin, double iou_margin);

struct PointCheck {
  bool skipped = false;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

// Relative error is max_i |analytic_i - fd_i| / max(|analytic|_inf, |fd|_inf, 1e-3).
PointCheck check_point(LossKind kind, const Box& a, const Box& g,
                       const std::optional<FocalerInterval>& iv, const SiouParams& p,
                       double step = 1e-6);

struct GradCheckOptions {
  std::vector<LossKind> kinds{kAllLossKinds.begin(), kAllLossKinds.end()};
  std::size_t n = 1000;  // points per kind
  std::uint64_t seed = 7;
  double tol_rel = 1e-5;
  double step = 1e-6;
  // Draw a random valid interval for every point.
  bool with_focaler = false;
  SiouParams siou;
  unsigned threads = 1;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::size_t n_points = 0;
  std::size_t n_skipped = 0;
  double tol_rel = 0.0;
  struct WorstCase {
    Box anchor;
    Box gt;
    LossKind kind = LossKind::IoU;
    std::optional<FocalerInterval> interval;
  } worst_case;

  bool passed() const { return n_points > 0 && max_rel_err <= tol_rel; }
};

// Sample pairs: GT centers uniform in [0,10]^2 with log-uniform sizes in
// [0.1, 10]. Even-indexed anchors are drawn independently from the same law;
// odd-indexed anchors jitter the GT so that overlapping pairs are covered.
// Deterministic in the seed regardless of thread count.
GradCheckReport grad_check(const GradCheckOptions& opts);

std::string to_json(const GradCheckReport& r);
std::string to_text(const GradCheckReport& r);

}  // namespace focaler

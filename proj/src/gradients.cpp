#include "focaler/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <numbers>

#include "focaler/parallel.hpp"
#include "focaler/random.hpp"
#include "json.hpp"

namespace focaler {

double& Grad4::operator[](std::size_t i) {
  switch (i) {
    case 0:
      return d_cx;
    case 1:
      return d_cy;
    case 2:
      return d_w;
    default:
      return d_h;
  }
}

double Grad4::operator[](std::size_t i) const { return const_cast<Grad4&>(*this)[i]; }

Grad4& Grad4::operator+=(const Grad4& o) {
  d_cx += o.d_cx;
  d_cy += o.d_cy;
  d_w += o.d_w;
  d_h += o.d_h;
  return *this;
}

Grad4& Grad4::operator-=(const Grad4& o) {
  d_cx -= o.d_cx;
  d_cy -= o.d_cy;
  d_w -= o.d_w;
  d_h -= o.d_h;
  return *this;
}

Grad4& Grad4::operator*=(double s) {
  d_cx *= s;
  d_cy *= s;
  d_w *= s;
  d_h *= s;
  return *this;
}

double Grad4::max_abs() const {
  return std::max({std::abs(d_cx), std::abs(d_cy), std::abs(d_w), std::abs(d_h)});
}

double Grad4::norm() const { return std::sqrt(d_cx * d_cx + d_cy * d_cy + d_w * d_w + d_h * d_h); }

bool Grad4::finite() const {
  return std::isfinite(d_cx) && std::isfinite(d_cy) && std::isfinite(d_w) && std::isfinite(d_h);
}

namespace {

// A quantity together with its derivative with respect to the anchor's
// (cx, cy, w, h). Every rule below is the textbook derivative of the
// corresponding scalar operation.
struct Tracked {
  double v = 0.0;
  Grad4 d;
};

Tracked constant(double v) { return {v, {}}; }

Tracked operator+(const Tracked& a, const Tracked& b) { return {a.v + b.v, a.d + b.d}; }
Tracked operator-(const Tracked& a, const Tracked& b) { return {a.v - b.v, a.d - b.d}; }
Tracked operator*(const Tracked& a, const Tracked& b) {
  return {a.v * b.v, a.d * b.v + b.d * a.v};
}
Tracked operator*(double s, const Tracked& a) { return {s * a.v, a.d * s}; }
Tracked operator/(const Tracked& a, const Tracked& b) {
  return {a.v / b.v, (a.d * b.v - b.d * a.v) * (1.0 / (b.v * b.v))};
}
Tracked square(const Tracked& a) { return {a.v * a.v, a.d * (2.0 * a.v)}; }
Tracked exp(const Tracked& a) {
  const double e = std::exp(a.v);
  return {e, a.d * e};
}

// min(a, b); ties split evenly between the two branches.
Tracked min(const Tracked& a, const Tracked& b) {
  const double w = a.v < b.v ? 1.0 : (a.v == b.v ? 0.5 : 0.0);
  return {std::min(a.v, b.v), a.d * w + b.d * (1.0 - w)};
}

// Extremum of three; tied branches contribute their average derivative.
template <typename Pick>
Tracked extremum3(const Tracked& a, const Tracked& b, const Tracked& c, Pick pick) {
  const double v = pick({a.v, b.v, c.v});
  Grad4 d;
  int ties = 0;
  for (const Tracked* t : {&a, &b, &c}) {
    if (t->v == v) {
      d += t->d;
      ++ties;
    }
  }
  return {v, d * (1.0 / ties)};
}

Tracked min3(const Tracked& a, const Tracked& b, const Tracked& c) {
  return extremum3(a, b, c, [](std::initializer_list<double> l) { return std::min(l); });
}

Tracked max3(const Tracked& a, const Tracked& b, const Tracked& c) {
  return extremum3(a, b, c, [](std::initializer_list<double> l) { return std::max(l); });
}

Tracked relu(const Tracked& x) {
  if (x.v > 0.0) return x;
  if (x.v == 0.0) return {0.0, x.d * 0.5};
  return {};
}

Tracked abs(const Tracked& x) {
  if (x.v > 0.0) return x;
  if (x.v < 0.0) return {-x.v, x.d * -1.0};
  return {};
}

struct AnchorVars {
  Tracked cx, cy, w, h;
};

AnchorVars track(const Box& a) {
  AnchorVars t;
  t.cx = {a.cx(), {1, 0, 0, 0}};
  t.cy = {a.cy(), {0, 1, 0, 0}};
  t.w = {a.w(), {0, 0, 1, 0}};
  t.h = {a.h(), {0, 0, 0, 1}};
  return t;
}

struct Shared {
  AnchorVars a;
  Tracked iou;
  Tracked uni;
  Tracked wc, hc;
};

Shared shared_terms(const Box& anchor, const Box& g) {
  Shared s;
  s.a = track(anchor);
  const auto& a = s.a;
  const Tracked gw = constant(g.w()), gh = constant(g.h());
  // Same center/size overlap and hull lengths as the geometry module.
  const Tracked half_w = 0.5 * (a.w + gw), half_h = 0.5 * (a.h + gh);
  const Tracked dx = abs(a.cx - constant(g.cx())), dy = abs(a.cy - constant(g.cy()));

  const Tracked iw = relu(min3(a.w, gw, half_w - dx));
  const Tracked ih = relu(min3(a.h, gh, half_h - dy));
  const Tracked inter = iw * ih;
  s.uni = a.w * a.h + constant(area(g)) - inter;
  if (s.uni.v > 0.0) s.iou = inter / s.uni;

  s.wc = max3(a.w, gw, half_w + dx);
  s.hc = max3(a.h, gh, half_h + dy);
  return s;
}

Tracked distance_term(const Shared& s, const Box& g) {
  const Tracked c2 = square(s.wc) + square(s.hc);
  if (c2.v <= 0.0) return {};
  const Tracked rho2 = square(s.a.cx - constant(g.cx())) + square(s.a.cy - constant(g.cy()));
  return rho2 / c2;
}

// Plain loss 1 - metric as a tracked quantity.
Tracked tracked_loss(LossKind kind, const Shared& s, const Box& anchor, const Box& g,
                     const SiouParams& p) {
  const Tracked one = constant(1.0);
  const Tracked base = one - s.iou;
  switch (kind) {
    case LossKind::IoU:
      return base;
    case LossKind::GIoU: {
      const Tracked c = s.wc * s.hc;
      if (c.v <= 0.0) return base;
      return base + (c - s.uni) / c;
    }
    case LossKind::DIoU:
      return base + distance_term(s, g);
    case LossKind::CIoU: {
      Tracked out = base + distance_term(s, g);
      if (anchor.w() <= 0.0 || anchor.h() <= 0.0 || g.w() <= 0.0 || g.h() <= 0.0) return out;
      const double w = anchor.w(), h = anchor.h();
      const double r2 = w * w + h * h;
      const Tracked phi{std::atan(w / h), {0, 0, h / r2, -w / r2}};
      const Tracked diff = constant(std::atan(g.w() / g.h())) - phi;
      const Tracked v = (4.0 / (std::numbers::pi * std::numbers::pi)) * square(diff);
      if (v.v > 0.0) out = out + square(v) / ((one - s.iou) + v);
      return out;
    }
    case LossKind::EIoU: {
      Tracked out = base + distance_term(s, g);
      if (s.wc.v > 0.0) out = out + square(s.a.w - constant(g.w())) / square(s.wc);
      if (s.hc.v > 0.0) out = out + square(s.a.h - constant(g.h())) / square(s.hc);
      return out;
    }
    case LossKind::SIoU: {
      const Tracked dx = constant(g.cx()) - s.a.cx;
      const Tracked dy = constant(g.cy()) - s.a.cy;
      const Tracked sigma2 = square(dx) + square(dy);
      Tracked sigma;
      if (sigma2.v > 0.0) {
        const double r = std::sqrt(sigma2.v);
        sigma = {r, sigma2.d * (0.5 / r)};
      }
      const Tracked sin_alpha = min(abs(dx), abs(dy)) / (sigma + constant(p.eps));
      // d/ds sin(2 asin s) = 2 cos(2 asin s) / sqrt(1 - s^2); s <= 1/sqrt(2) here.
      const double t = std::asin(sin_alpha.v);
      const Tracked angle{std::sin(2.0 * t),
                          sin_alpha.d * (2.0 * std::cos(2.0 * t) /
                                         std::sqrt(1.0 - sin_alpha.v * sin_alpha.v))};
      const Tracked gamma = constant(2.0) - angle;

      Tracked delta;
      if (s.wc.v > 0.0) delta = delta + (one - exp(-1.0 * gamma * square(dx / s.wc)));
      if (s.hc.v > 0.0) delta = delta + (one - exp(-1.0 * gamma * square(dy / s.hc)));

      auto shape_cost = [&](const Tracked& w, double wg) -> Tracked {
        const double denom = std::max(w.v, wg);
        if (denom <= 0.0) return {};
        Tracked omega;
        if (w.v > wg) {
          omega = (w - constant(wg)) / w;
        } else if (w.v < wg) {
          omega = (constant(wg) - w) * constant(1.0 / wg);
        } else {
          // Both one-sided slopes, 1/w and -1/wg, cancel at w == wg.
          omega = {0.0, {}};
        }
        const double e = std::exp(-omega.v);
        const double base_v = 1.0 - e;
        double slope = 0.0;
        if (base_v > 0.0) {
          slope = p.theta * std::pow(base_v, p.theta - 1.0) * e;
        } else if (p.theta == 1.0) {
          slope = e;
        }
        return {std::pow(base_v, p.theta), omega.d * slope};
      };
      const Tracked omega = shape_cost(s.a.w, g.w()) + shape_cost(s.a.h, g.h());
      return base + 0.5 * (delta + omega);
    }
  }
  return base;
}

}  // namespace

double composed_loss(LossKind kind, const Box& a, const Box& g,
                     const std::optional<FocalerInterval>& iv, const SiouParams& p) {
  if (iv) return focaler_loss(kind, a, g, *iv, p).focaler_loss;
  return loss(kind, a, g, p);
}

LossGrad loss_grad(LossKind kind, const Box& a, const Box& g,
                   const std::optional<FocalerInterval>& iv, const SiouParams& p) {
  p.validate();
  const Shared s = shared_terms(a, g);
  const Tracked plain = tracked_loss(kind, s, a, g, p);

  LossGrad out;
  out.iou_grad = s.iou.d;
  out.grad = plain.d;
  if (iv) {
    const FocalerEval fe = focaler_loss(kind, a, g, *iv, p);
    out.loss = fe.focaler_loss;
    out.iou = fe.iou;
    out.grad += s.iou.d * (1.0 - mapping_slope(fe.iou, *iv));
  } else {
    const MetricBreakdown m = metric(kind, a, g, p);
    out.loss = 1.0 - m.metric;
    out.iou = m.iou;
  }
  out.nonsmooth = a.w() <= 0.0 || a.h() <= 0.0 || near_nonsmooth(kind, a, g, iv, p, 0.0, 0.0);
  return out;
}

Grad4 fd_grad(LossKind kind, const Box& a, const Box& g, const std::optional<FocalerInterval>& iv,
              const SiouParams& p, double step) {
  if (!(step > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double x[4] = {a.cx(), a.cy(), a.w(), a.h()};
  Grad4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    double h = step * std::max(1.0, std::abs(x[i]));
    if (i >= 2 && x[i] - h < 0.0) {
      h /= 10.0;
      if (x[i] - h < 0.0) {
        throw InvalidInput("finite-difference perturbation leaves the valid box domain at " +
                           to_string(a));
      }
    }
    double plus[4] = {x[0], x[1], x[2], x[3]};
    double minus[4] = {x[0], x[1], x[2], x[3]};
    plus[i] += h;
    minus[i] -= h;
    const double span = plus[i] - minus[i];
    const double fp = composed_loss(kind, Box(plus[0], plus[1], plus[2], plus[3]), g, iv, p);
    const double fm = composed_loss(kind, Box(minus[0], minus[1], minus[2], minus[3]), g, iv, p);
    out[i] = (fp - fm) / span;
  }
  return out;
}

bool near_nonsmooth(LossKind kind, const Box& a, const Box& g,
                    const std::optional<FocalerInterval>& iv, const SiouParams& p,
                    double coord_margin, double iou_margin) {
  auto close = [](double x, double y, double m) { return std::abs(x - y) <= m; };
  if (a.w() <= coord_margin || a.h() <= coord_margin) return true;

  // Edge coincidences switch the min/max branches of intersection and hull.
  const double ax[2] = {a.x1(), a.x2()}, gx[2] = {g.x1(), g.x2()};
  const double ay[2] = {a.y1(), a.y2()}, gy[2] = {g.y1(), g.y2()};
  for (double p1 : ax) {
    for (double p2 : gx) {
      if (close(p1, p2, coord_margin)) return true;
    }
  }
  for (double p1 : ay) {
    for (double p2 : gy) {
      if (close(p1, p2, coord_margin)) return true;
    }
  }

  if (iv) {
    const double v = iou(a, g);
    if (iv->d() > 0.0 && close(v, iv->d(), iou_margin)) return true;
    if (iv->u() < 1.0 && close(v, iv->u(), iou_margin)) return true;
  }

  if (kind == LossKind::SIoU) {
    const double dx = std::abs(g.cx() - a.cx());
    const double dy = std::abs(g.cy() - a.cy());
    if (dx <= coord_margin || dy <= coord_margin || close(dx, dy, coord_margin)) return true;
    if (p.theta <= 1.0 && (close(a.w(), g.w(), coord_margin) || close(a.h(), g.h(), coord_margin)))
      return true;
  }
  return false;
}

PointCheck check_point(LossKind kind, const Box& a, const Box& g,
                       const std::optional<FocalerInterval>& iv, const SiouParams& p,
                       double step) {
  PointCheck pc;
  const LossGrad analytic = loss_grad(kind, a, g, iv, p);
  const double scale = std::max({1.0, std::abs(a.cx()), std::abs(a.cy()), a.w(), a.h()});
  const double h = step * scale;
  const double coord_margin = 10.0 * h;
  const Grad4& ig = analytic.iou_grad;
  const double iou_margin =
      std::max(1e-4, coord_margin * (std::abs(ig.d_cx) + std::abs(ig.d_cy) + std::abs(ig.d_w) +
                                     std::abs(ig.d_h)));
  if (analytic.nonsmooth || near_nonsmooth(kind, a, g, iv, p, coord_margin, iou_margin)) {
    pc.skipped = true;
    return pc;
  }
  const Grad4 numeric = fd_grad(kind, a, g, iv, p, step);
  pc.abs_err = (analytic.grad - numeric).max_abs();
  const double denom = std::max({analytic.grad.max_abs(), numeric.max_abs(), 1e-3});
  pc.rel_err = pc.abs_err / denom;
  return pc;
}

GradCheckReport grad_check(const GradCheckOptions& opts) {
  if (opts.n == 0) throw InvalidInput("grad_check needs n > 0");
  if (opts.kinds.empty()) throw InvalidInput("grad_check needs at least one loss kind");
  opts.siou.validate();

  struct Sample {
    LossKind kind;
    Box anchor, gt;
    std::optional<FocalerInterval> interval;
  };
  std::vector<Sample> samples;
  samples.reserve(opts.kinds.size() * opts.n);
  Rng rng(opts.seed);
  auto random_box = [&rng] {
    const double cx = rng.uniform(0.0, 10.0);
    const double cy = rng.uniform(0.0, 10.0);
    const double w = rng.log_uniform(0.1, 10.0);
    const double h = rng.log_uniform(0.1, 10.0);
    return Box(cx, cy, w, h);
  };
  for (LossKind kind : opts.kinds) {
    for (std::size_t i = 0; i < opts.n; ++i) {
      const Box gt = random_box();
      Box anchor;
      if (i % 2 == 0) {
        anchor = random_box();
      } else {
        anchor = Box(gt.cx() + rng.uniform(-0.75, 0.75) * gt.w(),
                     gt.cy() + rng.uniform(-0.75, 0.75) * gt.h(),
                     gt.w() * std::exp(rng.uniform(-0.7, 0.7)),
                     gt.h() * std::exp(rng.uniform(-0.7, 0.7)));
      }
      std::optional<FocalerInterval> iv;
      if (opts.with_focaler) {
        const double d = rng.uniform(0.0, 0.6);
        const double u = d + (1.0 - d) * rng.uniform(0.1, 1.0);
        iv = FocalerInterval(d, std::min(u, 1.0));
      }
      samples.push_back({kind, anchor, gt, iv});
    }
  }

  std::vector<PointCheck> results(samples.size());
  parallel_for(samples.size(), opts.threads, [&](std::size_t i) {
    const Sample& s = samples[i];
    results[i] = check_point(s.kind, s.anchor, s.gt, s.interval, opts.siou, opts.step);
  });

  GradCheckReport report;
  report.tol_rel = opts.tol_rel;
  report.n_points = samples.size();
  bool have_worst = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PointCheck& r = results[i];
    if (r.skipped) {
      ++report.n_skipped;
      continue;
    }
    report.max_abs_err = std::max(report.max_abs_err, r.abs_err);
    if (!have_worst || r.rel_err > report.max_rel_err) {
      have_worst = true;
      report.max_rel_err = r.rel_err;
      report.worst_case = {samples[i].anchor, samples[i].gt, samples[i].kind, samples[i].interval};
    }
  }
  return report;
}

namespace {

nlohmann::ordered_json box_json(const Box& b) { return {b.cx(), b.cy(), b.w(), b.h()}; }

}  // namespace

std::string to_json(const GradCheckReport& r) {
  nlohmann::ordered_json j;
  j["max_rel_err"] = r.max_rel_err;
  j["max_abs_err"] = r.max_abs_err;
  j["n_points"] = r.n_points;
  j["n_skipped"] = r.n_skipped;
  j["tol_rel"] = r.tol_rel;
  j["passed"] = r.passed();
  nlohmann::ordered_json worst;
  worst["anchor"] = box_json(r.worst_case.anchor);
  worst["gt"] = box_json(r.worst_case.gt);
  worst["kind"] = std::string(to_string(r.worst_case.kind));
  if (r.worst_case.interval) {
    worst["interval"] = {r.worst_case.interval->d(), r.worst_case.interval->u()};
  } else {
    worst["interval"] = nullptr;
  }
  j["worst_case"] = worst;
  return j.dump(2);
}

std::string to_text(const GradCheckReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "max_rel_err=%.9g\nmax_abs_err=%.9g\nn_points=%zu\nn_skipped=%zu\ntol_rel=%.9g\n"
                "passed=%s\nworst_kind=%s\nworst_anchor=%s\nworst_gt=%s\n",
                r.max_rel_err, r.max_abs_err, r.n_points, r.n_skipped, r.tol_rel,
                r.passed() ? "true" : "false", std::string(to_string(r.worst_case.kind)).c_str(),
                to_string(r.worst_case.anchor).c_str(), to_string(r.worst_case.gt).c_str());
  return buf;
}

}  // namespace focaler

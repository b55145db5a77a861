#include "focaler/simulator.hpp"

#include <cmath>
#include <cstdio>

#include "focaler/parallel.hpp"
#include "focaler/random.hpp"

namespace focaler {

namespace {

std::string range_str(const Range& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.9g, %.9g)", r.first, r.second);
  return buf;
}

void check_iou_range(const Range& r, const char* name) {
  if (!(r.first >= 0.0 && r.first < r.second && r.second < 1.0)) {
    throw InvalidInput(std::string(name) + " must satisfy 0 <= lo < hi < 1, got " + range_str(r));
  }
}

BoxPair sample_pair(Rng& rng, const Range& iou_range, const Range& size_range, bool hard) {
  for (std::size_t attempt = 0; attempt < kMaxScenarioAttempts; ++attempt) {
    const Box gt(rng.uniform(0.0, 50.0), rng.uniform(0.0, 50.0),
                 rng.log_uniform(size_range.first, size_range.second),
                 rng.log_uniform(size_range.first, size_range.second));
    // Spread controls how far the anchor strays; small spreads give high IoU.
    const double spread = rng.uniform();
    const Box anchor(gt.cx() + rng.uniform(-1.5, 1.5) * spread * gt.w(),
                     gt.cy() + rng.uniform(-1.5, 1.5) * spread * gt.h(),
                     gt.w() * std::exp(rng.uniform(-0.9, 0.9) * spread),
                     gt.h() * std::exp(rng.uniform(-0.9, 0.9) * spread));
    const double v = iou(anchor, gt);
    if (v > iou_range.first && v < iou_range.second) return {anchor, gt, hard};
  }
  throw InvalidInput("could not sample a pair with initial IoU in " + range_str(iou_range) +
                     " within " + std::to_string(kMaxScenarioAttempts) + " attempts");
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_easy > 0) check_iou_range(easy_iou_range, "easy_iou_range");
  if (n_hard > 0) check_iou_range(hard_iou_range, "hard_iou_range");
  if (!(gt_size_range.first > 0.0 && gt_size_range.first <= gt_size_range.second &&
        std::isfinite(gt_size_range.second))) {
    throw InvalidInput("gt_size_range must satisfy 0 < lo <= hi, got " + range_str(gt_size_range));
  }
}

std::vector<BoxPair> generate_scenarios(const ScenarioSpec& spec) {
  spec.validate();
  std::vector<BoxPair> pairs;
  pairs.reserve(spec.n_easy + spec.n_hard);
  Rng rng(spec.seed);
  const auto [lo, hi] = spec.gt_size_range;
  const Range hard_sizes{lo, lo + 0.1 * (hi - lo)};
  for (std::size_t i = 0; i < spec.n_easy; ++i) {
    pairs.push_back(sample_pair(rng, spec.easy_iou_range, spec.gt_size_range, false));
  }
  for (std::size_t i = 0; i < spec.n_hard; ++i) {
    pairs.push_back(sample_pair(rng, spec.hard_iou_range, hard_sizes, true));
  }
  return pairs;
}

void ScenarioSet::validate() const {
  if (pairs.empty()) throw InvalidInput("scenario set has no pairs");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidInput("lr must be a finite value >= 0");
  if (steps == 0) throw InvalidInput("steps must be > 0");
  siou.validate();
}

double l1_distance(const Box& a, const Box& b) {
  return std::abs(a.cx() - b.cx()) + std::abs(a.cy() - b.cy()) + std::abs(a.w() - b.w()) +
         std::abs(a.h() - b.h());
}

PairResult run_pair(const BoxPair& pair, const ScenarioSet& s) {
  PairResult out;
  out.trace.reserve(s.steps);
  Box a = pair.anchor;
  for (std::size_t step = 0; step < s.steps; ++step) {
    const LossGrad lg = loss_grad(s.kind, a, pair.gt, s.interval, s.siou);
    out.trace.push_back({a, lg.iou, lg.loss, lg.grad});
    if (!lg.grad.finite() || !std::isfinite(lg.loss)) {
      out.diverged = true;
      break;
    }
    double w = a.w() - s.lr * lg.grad.d_w;
    double h = a.h() - s.lr * lg.grad.d_h;
    const double cx = a.cx() - s.lr * lg.grad.d_cx;
    const double cy = a.cy() - s.lr * lg.grad.d_cy;
    if (!std::isfinite(w) || !std::isfinite(h) || !std::isfinite(cx) || !std::isfinite(cy)) {
      out.diverged = true;
      break;
    }
    if (w < kMinExtent) {
      w = kMinExtent;
      ++out.clamp_events;
    }
    if (h < kMinExtent) {
      h = kMinExtent;
      ++out.clamp_events;
    }
    a = Box(cx, cy, w, h);
  }
  out.final_anchor = a;
  out.final_iou = iou(a, pair.gt);
  out.final_l1 = l1_distance(a, pair.gt);
  return out;
}

RunResult run(const ScenarioSet& s) {
  s.validate();
  RunResult r;
  r.per_pair.resize(s.pairs.size());
  parallel_for(s.pairs.size(), s.threads,
               [&](std::size_t i) { r.per_pair[i] = run_pair(s.pairs[i], s); });

  double sum_iou = 0.0;
  double sum_l1 = 0.0;
  std::size_t kept = 0;
  for (const PairResult& p : r.per_pair) {
    r.clamp_events += p.clamp_events;
    if (p.diverged) {
      ++r.diverged;
      continue;
    }
    sum_iou += p.final_iou;
    sum_l1 += p.final_l1;
    ++kept;
  }
  if (kept > 0) {
    r.mean_final_iou = sum_iou / static_cast<double>(kept);
    r.mean_final_l1 = sum_l1 / static_cast<double>(kept);
  }
  return r;
}

std::vector<double> mean_iou_curve(const RunResult& r) {
  std::size_t steps = 0;
  for (const PairResult& p : r.per_pair) steps = std::max(steps, p.trace.size());
  std::vector<double> curve(steps + 1, 0.0);
  std::size_t kept = 0;
  for (const PairResult& p : r.per_pair) {
    if (p.diverged) continue;
    ++kept;
    for (std::size_t k = 0; k < p.trace.size(); ++k) curve[k] += p.trace[k].iou;
    curve[steps] += p.final_iou;
  }
  if (kept > 0) {
    for (double& c : curve) c /= static_cast<double>(kept);
  }
  return curve;
}

std::vector<ConfigSummary> compare(const std::vector<RunConfig>& configs,
                                   const std::vector<BoxPair>& pairs, double lr, std::size_t steps,
                                   const SiouParams& siou, unsigned threads) {
  if (configs.empty()) throw InvalidInput("compare needs at least one configuration");
  std::vector<ConfigSummary> rows;
  rows.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ScenarioSet set;
    set.pairs = pairs;
    set.lr = lr;
    set.steps = steps;
    set.kind = configs[i].kind;
    set.interval = configs[i].interval;
    set.siou = siou;
    set.threads = threads;
    ConfigSummary row;
    row.config_id = i;
    row.config = configs[i];
    row.result = run(set);
    row.mean_final_iou = row.result.mean_final_iou;
    row.mean_final_l1 = row.result.mean_final_l1;
    row.diverged = row.result.diverged;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ConfigSummary> compare(const std::vector<RunConfig>& configs, const ScenarioSpec& spec,
                                   double lr, std::size_t steps, const SiouParams& siou,
                                   unsigned threads) {
  return compare(configs, generate_scenarios(spec), lr, steps, siou, threads);
}

}  // namespace focaler

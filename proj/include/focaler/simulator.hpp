#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "focaler/focaler.hpp"
#include "focaler/geometry.hpp"
#include "focaler/gradients.hpp"
#include "focaler/variants.hpp"

namespace focaler {

struct BoxPair {
  Box anchor;
  Box gt;
  bool hard = false;
};

using Range = std::pair<double, double>;

/// Recipe for a synthetic easy/hard regression set.
///
/// Easy pairs take GT sizes log-uniformly from gt_size_range and an initial
/// IoU strictly inside easy_iou_range. Hard pairs take GT sizes from the
/// lowest decile of gt_size_range and an initial IoU inside hard_iou_range.
struct ScenarioSpec {
  std::size_t n_easy = 0;
  std::size_t n_hard = 0;
  Range easy_iou_range{0.5, 0.9};
  Range hard_iou_range{0.1, 0.5};
  Range gt_size_range{1.0, 4.0};
  std::uint64_t seed = 0;

  void validate() const;
};

// Rejection cap per pair.
inline constexpr std::size_t kMaxScenarioAttempts = 10000;

// Easy pairs first, then hard pairs; one RNG stream per seed.
std::vector<BoxPair> generate_scenarios(const ScenarioSpec& spec);

struct ScenarioSet {
  std::vector<BoxPair> pairs;
  double lr = 0.0;
  std::size_t steps = 0;
  LossKind kind = LossKind::IoU;
  std::optional<FocalerInterval> interval;
  SiouParams siou;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

// Minimum width/height kept after every descent step.
inline constexpr double kMinExtent = 1e-6;

// State and gradient at the start of one descent step.
struct StepRecord {
  Box anchor;
  double iou = 0.0;
  double loss = 0.0;
  Grad4 grad;
};

struct PairResult {
  double final_iou = 0.0;
  double final_l1 = 0.0;
  Box final_anchor;
  std::vector<StepRecord> trace;
  bool diverged = false;
  std::size_t clamp_events = 0;
};

struct RunResult {
  std::vector<PairResult> per_pair;
  // Means over pairs that did not diverge.
  double mean_final_iou = 0.0;
  double mean_final_l1 = 0.0;
  std::size_t diverged = 0;
  std::size_t clamp_events = 0;
};

// Plain gradient descent a <- a - lr * grad(loss), w and h clamped to
// kMinExtent. Pairs are independent; a non-finite gradient or state marks the
// pair diverged and stops it.
RunResult run(const ScenarioSet& s);

PairResult run_pair(const BoxPair& pair, const ScenarioSet& s);

double l1_distance(const Box& a, const Box& b);

// Mean IoU over non-diverged pairs at the start of each step, followed by the
// mean final IoU (steps + 1 entries).
std::vector<double> mean_iou_curve(const RunResult& r);

struct RunConfig {
  LossKind kind = LossKind::IoU;
  std::optional<FocalerInterval> interval;
};

struct ConfigSummary {
  std::size_t config_id = 0;
  RunConfig config;
  double mean_final_iou = 0.0;
  double mean_final_l1 = 0.0;
  std::size_t diverged = 0;
  RunResult result;
};

// Runs every configuration over the same generated pairs.
std::vector<ConfigSummary> compare(const std::vector<RunConfig>& configs, const ScenarioSpec& spec,
                                   double lr, std::size_t steps, const SiouParams& siou = {},
                                   unsigned threads = 1);

std::vector<ConfigSummary> compare(const std::vector<RunConfig>& configs,
                                   const std::vector<BoxPair>& pairs, double lr, std::size_t steps,
                                   const SiouParams& siou = {}, unsigned threads = 1);

}  // namespace focaler

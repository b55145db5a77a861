#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "focaler/focaler.hpp"
#include "focaler/simulator.hpp"

namespace focaler {

inline constexpr std::array<double, 5> kHistogramQuantiles = {0.05, 0.25, 0.50, 0.75, 0.95};

struct IoUHistogram {
  std::vector<double> edges;  // bins + 1 uniform edges over [0, 1]
  std::vector<std::size_t> counts;
  std::size_t n = 0;
  double mean = 0.0;
  // Values at kHistogramQuantiles, linear interpolation on sorted IoUs.
  std::array<double, 5> quantiles{};

  double q05() const { return quantiles[0]; }
  double q25() const { return quantiles[1]; }
  double q50() const { return quantiles[2]; }
  double q75() const { return quantiles[3]; }
  double q95() const { return quantiles[4]; }
};

enum class FocusMode { FocusHard, FocusEasy };

std::string_view to_string(FocusMode m);
// Accepts "focus_hard" and "focus_easy"; throws InvalidInput otherwise.
FocusMode parse_focus_mode(std::string_view token);

struct IntervalRecommendation {
  FocalerInterval interval;
  FocusMode mode = FocusMode::FocusHard;
  // Quantile the bound was taken from ("q75" or "q25").
  std::string quantile_used;
  double quantile_value = 0.0;
  bool fallback = false;
};

// Linear-interpolation quantile of already sorted values, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

IoUHistogram iou_histogram_from_values(std::span<const double> ious, std::size_t bins);
IoUHistogram iou_histogram(std::span<const BoxPair> pairs, std::size_t bins);

// focus_hard: (0, q75); focus_easy: (q25, 1). A collapsed quantile falls
// back to (0, 0.5) or (0.5, 1) with the fallback flag set.
IntervalRecommendation recommend_interval(const IoUHistogram& h, FocusMode mode);

// JSON document with n, mean, quantiles, histogram and recommendation.
std::string analysis_json(const IoUHistogram& h, const IntervalRecommendation& rec);

}  // namespace focaler

#include "focaler/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace focaler {

std::string_view to_string(FocusMode m) {
  return m == FocusMode::FocusHard ? "focus_hard" : "focus_easy";
}

FocusMode parse_focus_mode(std::string_view token) {
  if (token == "focus_hard") return FocusMode::FocusHard;
  if (token == "focus_easy") return FocusMode::FocusEasy;
  throw InvalidInput("unknown mode '" + std::string(token) + "'; valid: focus_hard, focus_easy");
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

IoUHistogram iou_histogram_from_values(std::span<const double> ious, std::size_t bins) {
  if (bins < 2) throw InvalidInput("histogram needs at least 2 bins");
  if (ious.empty()) throw InvalidInput("no pairs to analyze");

  IoUHistogram h;
  h.n = ious.size();
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  }
  h.counts.assign(bins, 0);

  std::vector<double> sorted(ious.begin(), ious.end());
  double sum = 0.0;
  for (double v : sorted) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InvalidInput("IoU value outside [0, 1]");
    sum += v;
    // Right-open bins; 1.0 lands in the top bin.
    auto bin = static_cast<std::size_t>(v * static_cast<double>(bins));
    ++h.counts[std::min(bin, bins - 1)];
  }
  h.mean = sum / static_cast<double>(h.n);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < kHistogramQuantiles.size(); ++i) {
    h.quantiles[i] = sorted_quantile(sorted, kHistogramQuantiles[i]);
  }
  return h;
}

IoUHistogram iou_histogram(std::span<const BoxPair> pairs, std::size_t bins) {
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const BoxPair& p : pairs) values.push_back(iou(p.anchor, p.gt));
  return iou_histogram_from_values(values, bins);
}

IntervalRecommendation recommend_interval(const IoUHistogram& h, FocusMode mode) {
  IntervalRecommendation rec;
  rec.mode = mode;
  if (mode == FocusMode::FocusHard) {
    rec.quantile_used = "q75";
    rec.quantile_value = h.q75();
    if (h.q75() <= 0.0) {
      rec.interval = FocalerInterval(0.0, 0.5);
      rec.fallback = true;
    } else {
      rec.interval = FocalerInterval(0.0, std::min(h.q75(), 1.0));
    }
  } else {
    rec.quantile_used = "q25";
    rec.quantile_value = h.q25();
    if (h.q25() >= 1.0) {
      rec.interval = FocalerInterval(0.5, 1.0);
      rec.fallback = true;
    } else {
      rec.interval = FocalerInterval(std::max(h.q25(), 0.0), 1.0);
    }
  }
  return rec;
}

std::string analysis_json(const IoUHistogram& h, const IntervalRecommendation& rec) {
  nlohmann::ordered_json j;
  j["n"] = h.n;
  j["mean"] = h.mean;
  nlohmann::ordered_json q;
  q["q05"] = h.q05();
  q["q25"] = h.q25();
  q["q50"] = h.q50();
  q["q75"] = h.q75();
  q["q95"] = h.q95();
  j["quantiles"] = q;
  j["histogram"] = {{"edges", h.edges}, {"counts", h.counts}};
  nlohmann::ordered_json r;
  r["d"] = rec.interval.d();
  r["u"] = rec.interval.u();
  r["mode"] = std::string(to_string(rec.mode));
  r["fallback"] = rec.fallback;
  r["quantile_used"] = rec.quantile_used;
  j["recommendation"] = r;
  return j.dump(2);
}

}  // namespace focaler

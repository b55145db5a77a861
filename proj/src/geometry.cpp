#include "focaler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace focaler {

Box::Box(double cx, double cy, double w, double h) : cx_(cx), cy_(cy), w_(w), h_(h) {
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw InvalidInput("box fields must be finite");
  }
  if (w < 0.0 || h < 0.0) {
    throw InvalidInput("box extents must be non-negative, got w=" + std::to_string(w) +
                       " h=" + std::to_string(h));
  }
}

Box Box::from_corners(double x1, double y1, double x2, double y2) {
  if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2)) {
    throw InvalidInput("corner coordinates must be finite");
  }
  if (x1 > x2 || y1 > y2) {
    throw InvalidInput("corner box requires x1 <= x2 and y1 <= y2");
  }
  return Box(0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1);
}

Box Box::from_corners(const CornerBox& c) { return from_corners(c.x1, c.y1, c.x2, c.y2); }

CornerBox Box::to_corners() const { return CornerBox{x1(), y1(), x2(), y2()}; }

Box Box::translated(double dx, double dy) const { return Box(cx_ + dx, cy_ + dy, w_, h_); }

Box Box::scaled(double s) const {
  if (!(s > 0.0)) throw InvalidInput("scale factor must be positive");
  return Box(cx_ * s, cy_ * s, w_ * s, h_ * s);
}

double area(const Box& b) { return b.w() * b.h(); }

namespace {

// 1-D overlap and hull lengths straight from center/size, so identical
// extents give exactly w (no corner round-off).
double overlap_len(double ca, double wa, double cb, double wb) {
  return std::min({wa, wb, 0.5 * (wa + wb) - std::abs(ca - cb)});
}

double hull_len(double ca, double wa, double cb, double wb) {
  return std::max({wa, wb, 0.5 * (wa + wb) + std::abs(ca - cb)});
}

}  // namespace

double intersect_area(const Box& a, const Box& b) {
  const double iw = overlap_len(a.cx(), a.w(), b.cx(), b.w());
  const double ih = overlap_len(a.cy(), a.h(), b.cy(), b.h());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double union_area(const Box& a, const Box& b) {
  return area(a) + area(b) - intersect_area(a, b);
}

double iou(const Box& a, const Box& b) {
  const double inter = intersect_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

EncloseInfo enclose_info(const Box& a, const Box& b) {
  EncloseInfo info;
  info.wc = hull_len(a.cx(), a.w(), b.cx(), b.w());
  info.hc = hull_len(a.cy(), a.h(), b.cy(), b.h());
  // Reuse a box's own center when it spans the hull along that axis.
  auto center = [](double ca, double wa, double cb, double wb, double len, double lo, double hi) {
    if (wa >= len) return ca;
    if (wb >= len) return cb;
    return 0.5 * (lo + hi);
  };
  const double cx = center(a.cx(), a.w(), b.cx(), b.w(), info.wc, std::min(a.x1(), b.x1()),
                           std::max(a.x2(), b.x2()));
  const double cy = center(a.cy(), a.h(), b.cy(), b.h(), info.hc, std::min(a.y1(), b.y1()),
                           std::max(a.y2(), b.y2()));
  info.enclose = Box(cx, cy, info.wc, info.hc);
  info.enclose_area = info.wc * info.hc;
  info.diag2 = info.wc * info.wc + info.hc * info.hc;
  return info;
}

double center_dist2(const Box& a, const Box& b) {
  const double dx = a.cx() - b.cx();
  const double dy = a.cy() - b.cy();
  return dx * dx + dy * dy;
}

bool contains(const Box& outer, const Box& inner) {
  // Corners are derived from center/size, so allow a few ulps of slack.
  auto le = [](double lo, double hi) {
    return lo <= hi + 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  };
  return le(outer.x1(), inner.x1()) && le(outer.y1(), inner.y1()) && le(inner.x2(), outer.x2()) &&
         le(inner.y2(), outer.y2());
}

std::string to_string(const Box& b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "Box(cx=%.9g, cy=%.9g, w=%.9g, h=%.9g)", b.cx(), b.cy(), b.w(),
                b.h());
  return buf;
}

}  // namespace focaler

#pragma once

#include <stdexcept>
#include <string>

namespace focaler {

// Thrown for any value that violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CornerBox;

/// Axis-aligned box in center-size form. Extents may be zero but never
/// negative; every field is finite.
class Box {
 public:
  Box() = default;
  Box(double cx, double cy, double w, double h);

  static Box from_corners(const CornerBox& c);
  static Box from_corners(double x1, double y1, double x2, double y2);

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double w() const { return w_; }
  double h() const { return h_; }

  double x1() const { return cx_ - 0.5 * w_; }
  double y1() const { return cy_ - 0.5 * h_; }
  double x2() const { return cx_ + 0.5 * w_; }
  double y2() const { return cy_ + 0.5 * h_; }

  CornerBox to_corners() const;

  Box translated(double dx, double dy) const;
  // Scales about the origin.
  Box scaled(double s) const;

  bool degenerate() const { return w_ == 0.0 || h_ == 0.0; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  double cx_ = 0.0;
  double cy_ = 0.0;
  double w_ = 0.0;
  double h_ = 0.0;
};

struct CornerBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  friend bool operator==(const CornerBox&, const CornerBox&) = default;
};

struct EncloseInfo {
  Box enclose;
  double enclose_area = 0.0;
  double diag2 = 0.0;
  double wc = 0.0;
  double hc = 0.0;
};

double area(const Box& b);
double intersect_area(const Box& a, const Box& b);
double union_area(const Box& a, const Box& b);
// Zero when the union is empty.
double iou(const Box& a, const Box& b);
EncloseInfo enclose_info(const Box& a, const Box& b);
double center_dist2(const Box& a, const Box& b);

// Corner-wise containment: inner lies inside outer (edges may touch, with
// 1e-12 relative slack for center/size round-off).
bool contains(const Box& outer, const Box& inner);

std::string to_string(const Box& b);

}  // namespace focaler

#pragma once

#include <cmath>
#include <string>

namespace thor {

// Axis-aligned box in image pixels: (x, y) is the top-left corner, 0-based.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  double area() const { return w * h; }
  bool valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(h) && w > 0.0 && h > 0.0;
  }

  static BoundingBox from_center(double cx, double cy, double w, double h) {
    return {cx - w / 2.0, cy - h / 2.0, w, h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Intersection over union in [0, 1].
double iou(const BoundingBox& a, const BoundingBox& b);

double center_distance(const BoundingBox& a, const BoundingBox& b);

// Shifts and shrinks `box` so that it lies inside a width x height image.
BoundingBox clamp_to_image(const BoundingBox& box, int width, int height, double min_side = 4.0);

std::string to_string(const BoundingBox& b);

}  // namespace thor

#include "thor/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace thor {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

BoundingBox clamp_to_image(const BoundingBox& box, int width, int height, double min_side) {
  BoundingBox out = box;
  out.w = std::clamp(out.w, std::min(min_side, static_cast<double>(width)), static_cast<double>(width));
  out.h = std::clamp(out.h, std::min(min_side, static_cast<double>(height)), static_cast<double>(height));
  out.x = std::clamp(out.x, 0.0, width - out.w);
  out.y = std::clamp(out.y, 0.0, height - out.h);
  return out;
}

std::string to_string(const BoundingBox& b) {
  std::ostringstream os;
  os << "(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
  return os.str();
}

}  // namespace thor

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace thor {

// Shape of a feature tensor: channels x height x width.
struct Shape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(width);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense real tensor in row-major channel-height-width order. Every element is
// finite; constructors reject NaN/Inf and data whose length disagrees with the shape.
class FeatureTensor {
 public:
  FeatureTensor() = default;
  FeatureTensor(int channels, int height, int width);  // zero-filled
  FeatureTensor(int channels, int height, int width, std::vector<double> data);

  // Convenience for flat vectors: a 1 x 1 x N tensor.
  static FeatureTensor from_vector(std::vector<double> values);

  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x];
  }
  double at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * shape_.height + y) * shape_.width + x];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const double* plane(int c) const { return data_.data() + static_cast<std::size_t>(c) * shape_.height * shape_.width; }

  double squared_norm() const;
  double norm() const;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace thor

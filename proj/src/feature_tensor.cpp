#include "thor/feature_tensor.hpp"

#include <cmath>
#include <string>

#include "thor/errors.hpp"

namespace thor {

namespace {

void check_dims(int channels, int height, int width) {
  if (channels < 1 || height < 1 || width < 1) {
    throw DimensionError("feature tensor dimensions must be positive, got " + std::to_string(channels) +
                         "x" + std::to_string(height) + "x" + std::to_string(width));
  }
}

}  // namespace

FeatureTensor::FeatureTensor(int channels, int height, int width)
    : shape_{channels, height, width} {
  check_dims(channels, height, width);
  data_.assign(shape_.size(), 0.0);
}

FeatureTensor::FeatureTensor(int channels, int height, int width, std::vector<double> data)
    : shape_{channels, height, width}, data_(std::move(data)) {
  check_dims(channels, height, width);
  if (data_.size() != shape_.size()) {
    throw DimensionError("feature tensor data length " + std::to_string(data_.size()) +
                         " does not match shape size " + std::to_string(shape_.size()));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw DegenerateInputError("feature tensor contains a non-finite value");
  }
}

FeatureTensor FeatureTensor::from_vector(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return FeatureTensor(1, 1, n, std::move(values));
}

double FeatureTensor::squared_norm() const {
  double acc = 0.0;
  for (double v : data_) acc += v * v;
  return acc;
}

double FeatureTensor::norm() const { return std::sqrt(squared_norm()); }

}  // namespace thor

#pragma once

// FTS1 binary feature files (little-endian):
//   "FTS1" | u8 dtype (1 = f32, 2 = f64) | u8 ndim | ndim x u32 dims | raw row-major data
// Tensors are written with ndim = 3 (channels, height, width). Readers accept
// ndim 1..3 (missing leading dimensions are 1) and higher ranks whose leading
// dimensions are all 1.

#include <cstdint>
#include <filesystem>
#include <string>

#include "thor/feature_tensor.hpp"

namespace thor {

enum class FeatureDtype : std::uint8_t { kFloat32 = 1, kFloat64 = 2 };

std::string encode_feature_bytes(const FeatureTensor& f, FeatureDtype dtype = FeatureDtype::kFloat64);
FeatureTensor decode_feature_bytes(const std::string& bytes);

void write_feature_file(const FeatureTensor& f, const std::filesystem::path& path,
                        FeatureDtype dtype = FeatureDtype::kFloat64);
FeatureTensor read_feature_file(const std::filesystem::path& path);

}  // namespace thor

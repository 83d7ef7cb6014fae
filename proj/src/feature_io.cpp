#include "thor/feature_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <vector>

#include "thor/errors.hpp"

namespace thor {

namespace {

constexpr char kMagic[4] = {'F', 'T', 'S', '1'};

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const std::string& in, std::size_t offset) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

std::string encode_feature_bytes(const FeatureTensor& f, FeatureDtype dtype) {
  if (f.empty()) throw FormatError("cannot encode an empty tensor");
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(dtype));
  out.push_back(static_cast<char>(3));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.channels()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.height()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(f.width()));
  out.reserve(out.size() + f.size() * (dtype == FeatureDtype::kFloat64 ? 8 : 4));
  for (double v : f.data()) {
    if (dtype == FeatureDtype::kFloat64) {
      put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
    } else {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

FeatureTensor decode_feature_bytes(const std::string& bytes) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("FTS1: bad magic");
  const auto dtype = static_cast<std::uint8_t>(bytes[4]);
  if (dtype != 1 && dtype != 2) throw FormatError("FTS1: unknown dtype code " + std::to_string(dtype));
  const std::size_t elem = dtype == 1 ? 4 : 8;
  const int ndim = static_cast<std::uint8_t>(bytes[5]);
  if (ndim < 1) throw FormatError("FTS1: ndim must be >= 1");
  if (bytes.size() < 6 + 4 * static_cast<std::size_t>(ndim)) throw FormatError("FTS1: truncated header");

  std::vector<std::uint64_t> dims(static_cast<std::size_t>(ndim));
  std::uint64_t count = 1;
  for (int i = 0; i < ndim; ++i) {
    dims[static_cast<std::size_t>(i)] = get_le<std::uint32_t>(bytes, 6 + 4 * static_cast<std::size_t>(i));
    const std::uint64_t d = dims[static_cast<std::size_t>(i)];
    if (d == 0) throw FormatError("FTS1: zero-length dimension");
    if (count > std::numeric_limits<std::uint64_t>::max() / d) throw FormatError("FTS1: shape overflow");
    count *= d;
  }
  // Collapse to channels x height x width.
  std::uint64_t chw[3] = {1, 1, 1};
  const int lead = ndim - 3;
  for (int i = 0; i < ndim; ++i) {
    if (i < lead) {
      if (dims[static_cast<std::size_t>(i)] != 1) throw FormatError("FTS1: ranks above 3 need unit leading dims");
    } else {
      chw[i - ndim + 3] = dims[static_cast<std::size_t>(i)];
    }
  }
  for (auto d : chw) {
    if (d > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) throw FormatError("FTS1: shape overflow");
  }
  const std::size_t header = 6 + 4 * static_cast<std::size_t>(ndim);
  if (count > (std::numeric_limits<std::size_t>::max() - header) / elem) throw FormatError("FTS1: shape overflow");
  const std::size_t expected = header + static_cast<std::size_t>(count) * elem;
  if (bytes.size() < expected) throw FormatError("FTS1: truncated data");
  if (bytes.size() > expected) throw FormatError("FTS1: trailing bytes after data");

  std::vector<double> data(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t off = header + i * elem;
    data[i] = dtype == 2 ? std::bit_cast<double>(get_le<std::uint64_t>(bytes, off))
                         : static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, off)));
  }
  try {
    return FeatureTensor(static_cast<int>(chw[0]), static_cast<int>(chw[1]), static_cast<int>(chw[2]), std::move(data));
  } catch (const DegenerateInputError& e) {
    throw FormatError(std::string("FTS1: ") + e.what());
  }
}

void write_feature_file(const FeatureTensor& f, const std::filesystem::path& path, FeatureDtype dtype) {
  const std::string bytes = encode_feature_bytes(f, dtype);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw FormatError("failed writing " + path.string());
}

FeatureTensor read_feature_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open feature file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return decode_feature_bytes(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace thor

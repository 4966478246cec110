#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "l2r/residual_model.hpp"

namespace l2r {

namespace {

constexpr std::array<char, 8> kMagic{'L', '2', 'R', 'M', 'O', 'D', 'E', 'L'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw ParseError("checkpoint " + path.string() + " is truncated");
  }
  return value;
}

template <typename Block>
void put_block(std::ostream& out, const Block& block) {
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) put<double>(out, block(r, c));
  }
}

template <typename Block>
void get_block(std::istream& in, Block& block, const std::filesystem::path& path) {
  for (Eigen::Index r = 0; r < block.rows(); ++r) {
    for (Eigen::Index c = 0; c < block.cols(); ++c) block(r, c) = get<double>(in, path);
  }
}

}  // namespace

// Layout (little-endian):
//   char[8] "L2RMODEL"
//   u32 format_version, u32 architecture, u32 combine, u32 reserved (0)
//   u64 M, u64 H, u64 query_width
//   f64 blocks w1, b1, w2, b2, ..., w5, b5, matrices row-major
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.architecture));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.combine));
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, params.shape.edges);
  put<std::uint64_t>(out, params.shape.hidden);
  put<std::uint64_t>(out, params.shape.query_width);
  params.for_each_block([&](const auto& block) { put_block(out, block); });
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError(path.string() + " is not an l2r checkpoint");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint format version " + std::to_string(version) +
                     " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto arch = get<std::uint32_t>(in, path);
  const auto combine = get<std::uint32_t>(in, path);
  (void)get<std::uint32_t>(in, path);
  if (arch > 1 || combine > 1) throw ParseError("checkpoint header has an unknown model kind");

  ModelShape shape;
  shape.architecture = static_cast<Architecture>(arch);
  shape.combine = static_cast<ResidualCombine>(combine);
  shape.edges = get<std::uint64_t>(in, path);
  shape.hidden = get<std::uint64_t>(in, path);
  shape.query_width = get<std::uint64_t>(in, path);
  constexpr std::uint64_t kSane = 1u << 20;
  if (shape.edges == 0 || shape.hidden == 0 || shape.query_width == 0 || shape.edges > kSane ||
      shape.hidden > kSane || shape.query_width > 16) {
    throw ParseError("checkpoint header has implausible dimensions");
  }

  ModelParams params = ModelParams::zeros(shape);
  params.for_each_block([&](auto& block) { get_block(in, block, path); });
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("checkpoint " + path.string() + " has trailing bytes");
  }
  return params;
}

ModelParams load_checkpoint(const std::filesystem::path& path, std::size_t expected_edges) {
  ModelParams params = load_checkpoint(path);
  if (params.shape.edges != expected_edges) {
    throw StructuralError("checkpoint was trained for " + std::to_string(params.shape.edges) +
                          " edges, network has " + std::to_string(expected_edges));
  }
  return params;
}

}  // namespace l2r

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gsml::detail {

/// Dense matrix snapshot: 4-byte magic, u32 rows, u32 cols, u64 step, then
/// rows*cols IEEE-754 doubles, everything little-endian, row-major.
struct Snapshot {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint64_t step = 0;
  std::vector<double> values;
};

void write_snapshot(const std::filesystem::path& path, const std::array<char, 4>& magic,
                    std::uint32_t rows, std::uint32_t cols, std::uint64_t step,
                    std::span<const double> values);

Snapshot read_snapshot(const std::filesystem::path& path, const std::array<char, 4>& magic);

}  // namespace gsml::detail

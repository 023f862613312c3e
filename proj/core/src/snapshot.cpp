#include "snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>

#include "gsml/error.hpp"

namespace gsml::detail {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    bytes[k] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * k)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  std::uint64_t value = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    value |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  }
  return static_cast<T>(value);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const std::array<char, 4>& magic,
                    std::uint32_t rows, std::uint32_t cols, std::uint64_t step,
                    std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(magic.data(), magic.size());
  put_le(out, rows);
  put_le(out, cols);
  put_le(out, step);
  for (double v : values) put_le(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw IoError("write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path, const std::array<char, 4>& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> got{};
  in.read(got.data(), got.size());
  if (!in || got != magic) {
    throw IoError(path.string() + ": bad magic, expected \"" + std::string(magic.data(), 4) +
                  "\"");
  }
  Snapshot snap;
  snap.rows = get_le<std::uint32_t>(in);
  snap.cols = get_le<std::uint32_t>(in);
  snap.step = get_le<std::uint64_t>(in);
  if (!in) throw IoError(path.string() + ": truncated header");
  const std::size_t count = static_cast<std::size_t>(snap.rows) * snap.cols;
  snap.values.resize(count);
  for (auto& v : snap.values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  if (!in) throw IoError(path.string() + ": truncated payload");
  in.peek();
  if (!in.eof()) throw IoError(path.string() + ": trailing bytes after payload");
  return snap;
}

}  // namespace gsml::detail

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "aoifb/dp.hpp"

namespace aoifb {

// Binary layout, little-endian:
//   u32 N | u32 M_f | f64 p | u8 convention | packed action bits
// Bits are ordered (t, m, A) row-major; bit k lives in byte k/8 at
// position k%8 (least significant first).

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  os.write(raw, sizeof(T));
}

template <typename T>
T get_le(std::istream& is) {
  char raw[sizeof(T)];
  if (!is.read(raw, sizeof(T))) throw invalid_input("truncated policy table header");
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_policy(std::ostream& os, const PolicyTable& table) {
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.horizon()));
  detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(table.opportunities()));
  detail::put_le<double>(os, table.success_prob());
  detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(table.convention()));
  const auto bits = table.packed_bits();
  os.write(reinterpret_cast<const char*>(bits.data()), static_cast<std::streamsize>(bits.size()));
  if (!os) throw std::runtime_error("failed to write policy table");
}

/// Reads a table written by write_policy. Cost values are not part of the
/// layout, so the result carries actions only.
inline PolicyTable read_policy(std::istream& is) {
  const auto n = detail::get_le<std::uint32_t>(is);
  const auto mf = detail::get_le<std::uint32_t>(is);
  const auto p = detail::get_le<double>(is);
  const auto conv = detail::get_le<std::uint8_t>(is);
  if (conv > 1) throw invalid_input("unknown stage-cost convention byte");
  if (n > static_cast<std::uint32_t>(std::numeric_limits<int>::max()) || mf > n)
    throw invalid_input("policy table header out of range");
  PolicyTable table(static_cast<int>(n), static_cast<int>(mf), p, static_cast<StageCost>(conv));
  auto bits = table.packed_bits();
  if (!is.read(reinterpret_cast<char*>(bits.data()), static_cast<std::streamsize>(bits.size())))
    throw invalid_input("truncated policy table body");
  return table;
}

}  // namespace aoifb

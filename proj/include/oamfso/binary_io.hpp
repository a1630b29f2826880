#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace oamfso::binio {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

/// Writes an arithmetic value in little-endian byte order.
template <class T>
void put(std::ostream& os, T value) {
  static_assert(std::is_arithmetic_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& is, std::string_view what) {
  static_assert(std::is_arithmetic_v<T>);
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T)))
    throw std::runtime_error("truncated file while reading " + std::string(what));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

inline void put_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), 4); }

inline void expect_magic(std::istream& is, std::string_view magic) {
  char got[4] = {};
  if (!is.read(got, 4) || std::string_view(got, 4) != magic)
    throw std::runtime_error("bad magic: expected \"" + std::string(magic) + "\"");
}

}  // namespace oamfso::binio

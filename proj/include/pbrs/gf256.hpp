#pragma once

#include <array>
#include <cstdint>

#include "pbrs/error.hpp"

// Arithmetic in GF(2^8) under the primitive polynomial
// x^8 + x^4 + x^3 + x^2 + 1 (0x11D), generator 0x02. Addition is XOR;
// multiplication and division go through exp/log tables built at compile
// time. All operations are pure and safe for unrestricted concurrent use.
namespace pbrs::gf256 {

inline constexpr unsigned kPrimitivePoly = 0x11D;
inline constexpr std::uint8_t kGenerator = 0x02;

namespace detail {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};  // log[0] undefined, stored as 0
};

consteval Tables build_tables() {
  Tables t{};
  unsigned x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = static_cast<std::uint8_t>(x);
    t.log[x] = static_cast<std::uint8_t>(i);
    x <<= 1;
    if (x & 0x100) x ^= kPrimitivePoly;
  }
  for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  return t;
}

inline constexpr Tables kTables = build_tables();

}  // namespace detail

inline constexpr const std::array<std::uint8_t, 512>& exp_table() {
  return detail::kTables.exp;
}
inline constexpr const std::array<std::uint8_t, 256>& log_table() {
  return detail::kTables.log;
}

constexpr std::uint8_t add(std::uint8_t x, std::uint8_t y) {
  return x ^ y;
}

constexpr std::uint8_t mul(std::uint8_t x, std::uint8_t y) {
  if (x == 0 || y == 0) return 0;
  return detail::kTables.exp[detail::kTables.log[x] + detail::kTables.log[y]];
}

constexpr std::uint8_t inv(std::uint8_t x) {
  if (x == 0) throw InversionOfZero();
  return detail::kTables.exp[255 - detail::kTables.log[x]];
}

constexpr std::uint8_t div(std::uint8_t x, std::uint8_t y) {
  if (y == 0) throw InversionOfZero();
  if (x == 0) return 0;
  return detail::kTables.exp[detail::kTables.log[x] + 255 - detail::kTables.log[y]];
}

// x^e with e reduced mod 255 (multiplicative group order)
constexpr std::uint8_t pow(std::uint8_t x, unsigned e) {
  if (e == 0) return 1;
  if (x == 0) return 0;
  return detail::kTables.exp[(detail::kTables.log[x] * static_cast<unsigned long long>(e)) % 255];
}

// 256-entry row of products c*v for every byte v; the bulk kernels index
// these rows instead of going through exp/log per element.
const std::uint8_t* mul_row(std::uint8_t c);

}  // namespace pbrs::gf256

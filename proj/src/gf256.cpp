#include "pbrs/gf256.hpp"

namespace pbrs::gf256 {

namespace {

struct MulTable {
  std::uint8_t rows[256][256];
  MulTable() {
    for (int c = 0; c < 256; ++c)
      for (int v = 0; v < 256; ++v)
        rows[c][v] = mul(static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(v));
  }
};

const MulTable& table() {
  static const MulTable t;
  return t;
}

}  // namespace

const std::uint8_t* mul_row(std::uint8_t c) {
  return table().rows[c];
}

}  // namespace pbrs::gf256

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "pbrs/matrix.hpp"

namespace pbrs::kernels {

enum class Exec { serial, parallel };

// Element i lives at data[i * stride]. stride 2 walks one substripe of an
// interleaved block; stride 1 is the contiguous fast path.
struct ConstView {
  const std::uint8_t* data = nullptr;
  std::size_t len = 0;
  std::size_t stride = 1;
};

struct MutView {
  std::uint8_t* data = nullptr;
  std::size_t len = 0;
  std::size_t stride = 1;
};

void fill_zero(MutView y);

// y[i] ^= x[i]
void xor_into(ConstView x, MutView y, Exec exec);

// y[i] ^= c * x[i] over GF(2^8)
void mul_axpy(std::uint8_t c, ConstView x, MutView y, Exec exec);

// out[j][i] = XOR over m of coeffs(j, m) * in[m][i]; overwrites outputs.
// The serial path is the reference the parallel path is tested against.
void gf_matmul(const Matrix& coeffs, std::span<const ConstView> in,
               std::span<const MutView> out, Exec exec);

}  // namespace pbrs::kernels

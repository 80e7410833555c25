#include "pbrs/kernels.hpp"

#include <cstdint>
#include <vector>

#include "pbrs/error.hpp"
#include "pbrs/gf256.hpp"

namespace pbrs::kernels {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch("kernel operands differ in length");
}

}  // namespace

void fill_zero(MutView y) {
  for (std::size_t i = 0; i < y.len; ++i) y.data[i * y.stride] = 0;
}

void xor_into(ConstView x, MutView y, Exec exec) {
  check_lengths(x.len, y.len);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < x.len; ++i)
      y.data[i * y.stride] ^= x.data[i * x.stride];
    return;
  }
  const std::int64_t n = static_cast<std::int64_t>(x.len);
#pragma omp parallel for schedule(static, 8192)
  for (std::int64_t i = 0; i < n; ++i)
    y.data[static_cast<std::size_t>(i) * y.stride] ^=
        x.data[static_cast<std::size_t>(i) * x.stride];
}

void mul_axpy(std::uint8_t c, ConstView x, MutView y, Exec exec) {
  check_lengths(x.len, y.len);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < x.len; ++i)
      y.data[i * y.stride] ^= gf256::mul(c, x.data[i * x.stride]);
    return;
  }
  if (c == 0) return;
  if (c == 1) {
    xor_into(x, y, Exec::parallel);
    return;
  }
  const std::uint8_t* row = gf256::mul_row(c);
  const std::int64_t n = static_cast<std::int64_t>(x.len);
#pragma omp parallel for schedule(static, 8192)
  for (std::int64_t i = 0; i < n; ++i)
    y.data[static_cast<std::size_t>(i) * y.stride] ^=
        row[x.data[static_cast<std::size_t>(i) * x.stride]];
}

void gf_matmul(const Matrix& coeffs, std::span<const ConstView> in,
               std::span<const MutView> out, Exec exec) {
  if (static_cast<std::size_t>(coeffs.rows()) != out.size() ||
      static_cast<std::size_t>(coeffs.cols()) != in.size())
    throw DimensionMismatch("coefficient shape does not match block counts");
  if (in.empty() || out.empty()) throw DimensionMismatch("empty block list");
  const std::size_t len = in[0].len;
  for (const auto& v : in) check_lengths(v.len, len);
  for (const auto& v : out) check_lengths(v.len, len);

  if (exec == Exec::serial) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      for (std::size_t i = 0; i < len; ++i) {
        std::uint8_t acc = 0;
        for (std::size_t m = 0; m < in.size(); ++m)
          acc ^= gf256::mul(coeffs.at(static_cast<int>(j), static_cast<int>(m)),
                            in[m].data[i * in[m].stride]);
        out[j].data[i * out[j].stride] = acc;
      }
    }
    return;
  }

  std::vector<const std::uint8_t*> rows(out.size() * in.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    for (std::size_t m = 0; m < in.size(); ++m)
      rows[j * in.size() + m] =
          gf256::mul_row(coeffs.at(static_cast<int>(j), static_cast<int>(m)));

  const std::int64_t n = static_cast<std::int64_t>(len);
#pragma omp parallel for schedule(static, 4096)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::size_t idx = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < out.size(); ++j) {
      std::uint8_t acc = 0;
      for (std::size_t m = 0; m < in.size(); ++m)
        acc ^= rows[j * in.size() + m][in[m].data[idx * in[m].stride]];
      out[j].data[idx * out[j].stride] = acc;
    }
  }
}

}  // namespace pbrs::kernels

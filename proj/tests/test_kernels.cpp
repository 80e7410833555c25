#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "pbrs/gf256.hpp"
#include "pbrs/kernels.hpp"
#include "pbrs/matrix.hpp"

namespace {

using pbrs::kernels::ConstView;
using pbrs::kernels::Exec;
using pbrs::kernels::MutView;

std::vector<std::uint8_t> random_bytes(std::size_t len, std::mt19937_64& rng) {
  std::vector<std::uint8_t> buf(len);
  for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
  return buf;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("mul_axpy matches scalar arithmetic, serial and parallel") {
  std::mt19937_64 rng(21);
  // odd length exercises the tail of any blocking scheme
  const std::size_t len = 65537;
  const auto x = random_bytes(len, rng);
  const auto y0 = random_bytes(len, rng);

  for (std::uint8_t c : {0, 1, 2, 0x1D, 0x8E, 0xFF}) {
    for (Exec exec : {Exec::serial, Exec::parallel}) {
      auto y = y0;
      pbrs::kernels::mul_axpy(c, {x.data(), len, 1}, {y.data(), len, 1}, exec);
      for (std::size_t i = 0; i < len; i += 97)
        CHECK(y[i] == (y0[i] ^ pbrs::gf256::mul(c, x[i])));
    }
    auto ys = y0, yp = y0;
    pbrs::kernels::mul_axpy(c, {x.data(), len, 1}, {ys.data(), len, 1}, Exec::serial);
    pbrs::kernels::mul_axpy(c, {x.data(), len, 1}, {yp.data(), len, 1}, Exec::parallel);
    CHECK(ys == yp);
  }
}

TEST_CASE("xor_into and fill_zero") {
  std::mt19937_64 rng(22);
  const std::size_t len = 4099;
  const auto x = random_bytes(len, rng);
  const auto y0 = random_bytes(len, rng);

  for (Exec exec : {Exec::serial, Exec::parallel}) {
    auto y = y0;
    pbrs::kernels::xor_into({x.data(), len, 1}, {y.data(), len, 1}, exec);
    for (std::size_t i = 0; i < len; ++i) REQUIRE(y[i] == (y0[i] ^ x[i]));
    pbrs::kernels::fill_zero({y.data(), len, 1});
    for (std::size_t i = 0; i < len; ++i) REQUIRE(y[i] == 0);
  }
}

TEST_CASE("strided views touch only their own substripe") {
  std::mt19937_64 rng(23);
  const std::size_t pairs = 1000;
  const auto x = random_bytes(2 * pairs, rng);
  const auto y0 = random_bytes(2 * pairs, rng);

  auto y = y0;
  // operate on the odd-offset half only
  pbrs::kernels::mul_axpy(0x37, {x.data() + 1, pairs, 2}, {y.data() + 1, pairs, 2},
                          Exec::parallel);
  for (std::size_t i = 0; i < pairs; ++i) {
    CHECK(y[2 * i] == y0[2 * i]);  // even half untouched
    CHECK(y[2 * i + 1] == (y0[2 * i + 1] ^ pbrs::gf256::mul(0x37, x[2 * i + 1])));
  }
}

TEST_CASE("gf_matmul agrees between serial reference and parallel path") {
  std::mt19937_64 rng(24);
  const pbrs::GeneratorMatrix g = pbrs::rs_generator(10, 4);
  pbrs::Matrix coeffs(4, 10);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 10; ++j) coeffs.at(i, j) = g.parity_row(i)[j];

  for (std::size_t cols : {std::size_t{1}, std::size_t{63}, std::size_t{4096},
                           std::size_t{100003}}) {
    const auto in_buf = random_bytes(10 * cols, rng);
    std::vector<std::uint8_t> out_s(4 * cols, 0xAA), out_p(4 * cols, 0x55);

    std::vector<ConstView> in;
    for (int m = 0; m < 10; ++m) in.push_back({in_buf.data() + m * cols, cols, 1});
    std::vector<MutView> outs, outp;
    for (int j = 0; j < 4; ++j) {
      outs.push_back({out_s.data() + j * cols, cols, 1});
      outp.push_back({out_p.data() + j * cols, cols, 1});
    }
    pbrs::kernels::gf_matmul(coeffs, in, outs, Exec::serial);
    pbrs::kernels::gf_matmul(coeffs, in, outp, Exec::parallel);
    CHECK(out_s == out_p);

    // spot-check the serial reference against scalar arithmetic
    for (std::size_t i = 0; i < cols; i += 617) {
      for (int j = 0; j < 4; ++j) {
        std::uint8_t want = 0;
        for (int m = 0; m < 10; ++m)
          want ^= pbrs::gf256::mul(coeffs.at(j, m), in_buf[m * cols + i]);
        REQUIRE(out_s[j * cols + i] == want);
      }
    }
  }
}

TEST_CASE("gf_matmul with interleaved strided views matches contiguous result") {
  std::mt19937_64 rng(25);
  const std::size_t cols = 8191;
  pbrs::Matrix coeffs(2, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) coeffs.at(i, j) = static_cast<std::uint8_t>(rng() | 1);

  const auto in_buf = random_bytes(3 * 2 * cols, rng);  // 3 interleaved blocks
  std::vector<std::uint8_t> flat_in(3 * cols);
  for (int m = 0; m < 3; ++m)
    for (std::size_t i = 0; i < cols; ++i)
      flat_in[m * cols + i] = in_buf[m * 2 * cols + 2 * i];  // even halves

  std::vector<std::uint8_t> out_strided(2 * 2 * cols, 0), out_flat(2 * cols, 0);
  std::vector<ConstView> in_s, in_f;
  std::vector<MutView> o_s, o_f;
  for (int m = 0; m < 3; ++m) {
    in_s.push_back({in_buf.data() + m * 2 * cols, cols, 2});
    in_f.push_back({flat_in.data() + m * cols, cols, 1});
  }
  for (int j = 0; j < 2; ++j) {
    o_s.push_back({out_strided.data() + j * 2 * cols, cols, 2});
    o_f.push_back({out_flat.data() + j * cols, cols, 1});
  }
  pbrs::kernels::gf_matmul(coeffs, in_s, o_s, Exec::parallel);
  pbrs::kernels::gf_matmul(coeffs, in_f, o_f, Exec::serial);
  for (int j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < cols; ++i)
      REQUIRE(out_strided[j * 2 * cols + 2 * i] == out_flat[j * cols + i]);
}

TEST_CASE("dimension mismatches are rejected") {
  pbrs::Matrix coeffs(2, 2);
  std::vector<std::uint8_t> buf(8, 0);
  std::vector<ConstView> in{{buf.data(), 4, 1}};  // one input, coeffs want two
  std::vector<MutView> out{{buf.data(), 4, 1}, {buf.data() + 4, 4, 1}};
  CHECK_THROWS_AS(pbrs::kernels::gf_matmul(coeffs, in, out, Exec::serial),
                  pbrs::DimensionMismatch);

  std::vector<std::uint8_t> x(4), y(5);
  CHECK_THROWS_AS(
      pbrs::kernels::xor_into({x.data(), 4, 1}, {y.data(), 5, 1}, Exec::serial),
      pbrs::DimensionMismatch);
}

}  // TEST_SUITE

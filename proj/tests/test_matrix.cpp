#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pbrs/error.hpp"
#include "pbrs/gf256.hpp"
#include "pbrs/matrix.hpp"

namespace {

pbrs::Matrix random_invertible(int n, std::mt19937_64& rng) {
  for (;;) {
    pbrs::Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m.at(i, j) = static_cast<std::uint8_t>(rng());
    if (pbrs::is_invertible(m)) return m;
  }
}

}  // namespace

TEST_SUITE("matrix") {

TEST_CASE("vandermonde layout and duplicate-point rejection") {
  const std::uint8_t points[] = {1, 2, 3};
  const pbrs::Matrix v = pbrs::vandermonde(points, 3);
  CHECK(v.at(0, 0) == 1);
  CHECK(v.at(0, 2) == 1);
  CHECK(v.at(1, 1) == 2);
  CHECK(v.at(1, 2) == 4);
  CHECK(v.at(2, 1) == 3);
  CHECK(v.at(2, 2) == pbrs::gf256::mul(3, 3));

  const std::uint8_t dup[] = {1, 2, 2};
  CHECK_THROWS_AS(pbrs::vandermonde(dup, 3), pbrs::DuplicateEvaluationPoint);
}

TEST_CASE("invert round-trips and rejects singular input") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const pbrs::Matrix m = random_invertible(n, rng);
    CHECK(pbrs::invert(pbrs::invert(m)) == m);
    CHECK(m.mul(pbrs::invert(m)) == pbrs::Matrix::identity(n));
  }

  pbrs::Matrix zero(3, 3);
  CHECK_THROWS_AS(pbrs::invert(zero), pbrs::SingularMatrix);
  CHECK(!pbrs::is_invertible(zero));

  pbrs::Matrix rank1(2, 2);
  rank1.at(0, 0) = 5;
  rank1.at(0, 1) = 7;
  rank1.at(1, 0) = 5;
  rank1.at(1, 1) = 7;
  CHECK_THROWS_AS(pbrs::invert(rank1), pbrs::SingularMatrix);
}

TEST_CASE("systematize of a tall vandermonde pins known parity rows") {
  // Evaluation points 0..3, 2 data columns: after systematization the two
  // parity rows are [3 2] and [2 3].
  const std::uint8_t points[] = {0, 1, 2, 3};
  const pbrs::GeneratorMatrix g = pbrs::systematize(pbrs::vandermonde(points, 2));
  CHECK(g.k == 2);
  CHECK(g.r == 2);
  CHECK(g.matrix.at(0, 0) == 1);
  CHECK(g.matrix.at(0, 1) == 0);
  CHECK(g.matrix.at(1, 0) == 0);
  CHECK(g.matrix.at(1, 1) == 1);
  CHECK(g.matrix.at(2, 0) == 3);
  CHECK(g.matrix.at(2, 1) == 2);
  CHECK(g.matrix.at(3, 0) == 2);
  CHECK(g.matrix.at(3, 1) == 3);
}

TEST_CASE("rs_generator (2,2) produces the sum and doubled-sum parities") {
  const pbrs::GeneratorMatrix g = pbrs::rs_generator(2, 2);
  CHECK(g.parity_row(0)[0] == 1);
  CHECK(g.parity_row(0)[1] == 1);
  CHECK(g.parity_row(1)[0] == 1);
  CHECK(g.parity_row(1)[1] == 2);
}

TEST_CASE("rs_generator matches golden fixtures") {
  auto check_fixture = [](const char* name, const pbrs::GeneratorMatrix& g) {
    std::ifstream in(std::string(PBRS_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    const pbrs::Matrix want = pbrs::matrix_from_hex(in);
    CHECK(g.matrix == want);
  };
  check_fixture("generator_2_2.txt", pbrs::rs_generator(2, 2));
  check_fixture("generator_10_4.txt", pbrs::rs_generator(10, 4));
}

TEST_CASE("every k-subset of (10,4) generator rows is invertible") {
  const pbrs::GeneratorMatrix g = pbrs::rs_generator(10, 4);
  CHECK(pbrs::is_mds(g));  // walks all 1001 subsets internally

  // independent walk, counting, with explicit inversion
  std::vector<int> pick(10);
  int count = 0;
  auto walk = [&](auto&& self, int start, int depth) -> void {
    if (depth == 10) {
      ++count;
      CHECK(pbrs::is_invertible(g.matrix.select_rows(pick)));
      return;
    }
    for (int i = start; i <= 14 - (10 - depth); ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  walk(walk, 0, 0);
  CHECK(count == 1001);
}

TEST_CASE("small generators up to (16,4) stay MDS") {
  for (int k : {2, 4, 8, 16})
    for (int r : {1, 2, 3, 4}) CHECK(pbrs::is_mds(pbrs::rs_generator(k, r)));
}

TEST_CASE("hex round-trip") {
  std::mt19937_64 rng(7);
  pbrs::Matrix m(3, 5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) m.at(i, j) = static_cast<std::uint8_t>(rng());
  std::stringstream ss(pbrs::matrix_to_hex(m));
  CHECK(pbrs::matrix_from_hex(ss) == m);
}

}  // TEST_SUITE

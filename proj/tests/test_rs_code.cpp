#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "pbrs/error.hpp"
#include "pbrs/gf256.hpp"
#include "pbrs/rs_code.hpp"

namespace {

std::vector<std::uint8_t> make_data(int k, std::mt19937_64& rng) {
  std::vector<std::uint8_t> data(k);
  for (auto& b : data) b = static_cast<std::uint8_t>(rng());
  return data;
}

}  // namespace

TEST_SUITE("rs_code") {

TEST_CASE("(2,2) encode emits sum and doubled-sum parities on 1000 random inputs") {
  const pbrs::CodeParams params(2, 2);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto data = make_data(2, rng);
    const pbrs::Stripe s = pbrs::rs_encode(params, data);
    REQUIRE(s.symbols.size() == 4);
    CHECK(s.symbols[0] == data[0]);
    CHECK(s.symbols[1] == data[1]);
    CHECK(s.symbols[2] == (data[0] ^ data[1]));
    CHECK(s.symbols[3] == (data[0] ^ pbrs::gf256::mul(2, data[1])));
  }
}

TEST_CASE("decode recovers from any k-subset of a (10,4) codeword") {
  const pbrs::CodeParams params(10, 4);
  std::mt19937_64 rng(2);
  const auto data = make_data(10, rng);
  const pbrs::Stripe s = pbrs::rs_encode(params, data);

  std::vector<int> pick(10);
  auto walk = [&](auto&& self, int start, int depth) -> void {
    if (depth == 10) {
      std::map<int, std::uint8_t> available;
      for (int p : pick) available[p] = s.symbols[p];
      CHECK(pbrs::rs_decode(params, available) == data);
      return;
    }
    for (int i = start; i <= 14 - (10 - depth); ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  walk(walk, 0, 0);
}

TEST_CASE("decode failure and consistency modes") {
  const pbrs::CodeParams params(4, 2);
  std::mt19937_64 rng(3);
  const auto data = make_data(4, rng);
  const pbrs::Stripe s = pbrs::rs_encode(params, data);

  std::map<int, std::uint8_t> too_few{{0, s.symbols[0]}, {1, s.symbols[1]},
                                      {5, s.symbols[5]}};
  CHECK_THROWS_AS(pbrs::rs_decode(params, too_few), pbrs::InsufficientSymbols);

  std::map<int, std::uint8_t> all;
  for (int i = 0; i < 6; ++i) all[i] = s.symbols[i];
  CHECK(pbrs::rs_decode(params, all, true) == data);

  all[5] ^= 0x01;
  CHECK_THROWS_AS(pbrs::rs_decode(params, all, true), pbrs::CorruptStripe);
  // without the consistency check the corrupt extra symbol is ignored
  CHECK(pbrs::rs_decode(params, all, false) == data);
}

TEST_CASE("rs_symbol_at matches the encoded stripe") {
  const pbrs::CodeParams params(10, 4);
  std::mt19937_64 rng(4);
  const auto data = make_data(10, rng);
  const pbrs::Stripe s = pbrs::rs_encode(params, data);
  for (int pos = 0; pos < 14; ++pos)
    CHECK(pbrs::rs_symbol_at(params, data, pos) == s.symbols[pos]);
}

TEST_CASE("repair plan reads the k lowest alive nodes and costs k") {
  const pbrs::CodeParams params(10, 4);
  std::set<int> alive;
  for (int i = 0; i < 14; ++i) alive.insert(i);
  alive.erase(3);

  const pbrs::RepairPlan plan = pbrs::rs_repair_plan(params, 3, alive);
  CHECK(plan.recipe == pbrs::RepairPlan::Recipe::rs_decode_reencode);
  CHECK(plan.cost == 10);
  CHECK(plan.missing == 3);
  REQUIRE(plan.reads.size() == 10);
  const int want[] = {0, 1, 2, 4, 5, 6, 7, 8, 9, 10};
  for (int i = 0; i < 10; ++i) {
    CHECK(plan.reads[i].node == want[i]);
    CHECK(plan.reads[i].units == 1);
  }

  std::set<int> thin{0, 1, 2, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(pbrs::rs_repair_plan(params, 3, thin), pbrs::Unrecoverable);
}

TEST_CASE("execute_rs_repair recovers every position with exactly k source reads") {
  const pbrs::CodeParams params(10, 4);
  std::mt19937_64 rng(5);
  const auto data = make_data(10, rng);
  const pbrs::Stripe s = pbrs::rs_encode(params, data);

  for (int missing = 0; missing < 14; ++missing) {
    std::set<int> alive;
    for (int i = 0; i < 14; ++i)
      if (i != missing) alive.insert(i);
    const pbrs::RepairPlan plan = pbrs::rs_repair_plan(params, missing, alive);
    int reads = 0;
    const std::uint8_t got = pbrs::execute_rs_repair(params, plan, [&](int node) {
      ++reads;
      REQUIRE(node != missing);
      return s.symbols[node];
    });
    CHECK(got == s.symbols[missing]);
    CHECK(reads == 10);
  }
}

TEST_CASE("stripe_consistent flags any single corruption") {
  const pbrs::CodeParams params(5, 3);
  std::mt19937_64 rng(6);
  const auto data = make_data(5, rng);
  pbrs::Stripe s = pbrs::rs_encode(params, data);
  CHECK(pbrs::stripe_consistent(s));
  for (int pos = 0; pos < 8; ++pos) {
    s.symbols[pos] ^= 0x40;
    CHECK(!pbrs::stripe_consistent(s));
    s.symbols[pos] ^= 0x40;
  }
}

}  // TEST_SUITE

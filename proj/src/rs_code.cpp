#include "pbrs/rs_code.hpp"

#include <algorithm>

#include "pbrs/gf256.hpp"

namespace pbrs {

Stripe rs_encode(const CodeParams& params, std::span<const std::uint8_t> data) {
  if (static_cast<int>(data.size()) != params.k)
    throw DimensionMismatch("rs_encode expects k data symbols");
  GeneratorMatrix g = rs_generator(params.k, params.r);
  Stripe s;
  s.params = params;
  s.symbols.assign(static_cast<std::size_t>(params.n()), 0);
  std::copy(data.begin(), data.end(), s.symbols.begin());
  for (int j = 0; j < params.r; ++j) {
    std::uint8_t acc = 0;
    auto row = g.parity_row(j);
    for (int i = 0; i < params.k; ++i) acc ^= gf256::mul(row[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(i)]);
    s.symbols[static_cast<std::size_t>(params.k + j)] = acc;
  }
  return s;
}

std::vector<std::uint8_t> rs_decode(const CodeParams& params,
                                    const std::map<int, std::uint8_t>& available,
                                    bool check_consistency) {
  if (static_cast<int>(available.size()) < params.k)
    throw InsufficientSymbols("rs_decode needs at least k symbols, got " +
                              std::to_string(available.size()));
  // lowest k positions first (std::map iterates in key order)
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(params.k));
  for (const auto& [pos, sym] : available) {
    if (pos < 0 || pos >= params.n())
      throw DimensionMismatch("symbol position out of range: " + std::to_string(pos));
    if (static_cast<int>(chosen.size()) < params.k) chosen.push_back(pos);
  }

  std::vector<std::uint8_t> data(static_cast<std::size_t>(params.k));
  const bool all_data = chosen.back() < params.k;
  if (all_data) {
    for (int i = 0; i < params.k; ++i) data[static_cast<std::size_t>(i)] = available.at(i);
  } else {
    GeneratorMatrix g = rs_generator(params.k, params.r);
    Matrix dec = invert(g.matrix.select_rows(chosen));
    std::vector<std::uint8_t> syms(static_cast<std::size_t>(params.k));
    for (int i = 0; i < params.k; ++i) syms[static_cast<std::size_t>(i)] = available.at(chosen[static_cast<std::size_t>(i)]);
    data = mat_vec_mul(dec, syms);
  }

  if (check_consistency) {
    for (const auto& [pos, sym] : available) {
      if (rs_symbol_at(params, data, pos) != sym)
        throw CorruptStripe("symbol at position " + std::to_string(pos) +
                            " inconsistent with decoded data");
    }
  }
  return data;
}

std::uint8_t rs_symbol_at(const CodeParams& params, std::span<const std::uint8_t> data,
                          int pos) {
  if (static_cast<int>(data.size()) != params.k)
    throw DimensionMismatch("rs_symbol_at expects k data symbols");
  if (pos < params.k) return data[static_cast<std::size_t>(pos)];
  GeneratorMatrix g = rs_generator(params.k, params.r);
  auto row = g.parity_row(pos - params.k);
  std::uint8_t acc = 0;
  for (int i = 0; i < params.k; ++i) acc ^= gf256::mul(row[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(i)]);
  return acc;
}

RepairPlan rs_repair_plan(const CodeParams& params, int missing,
                          const std::set<int>& alive) {
  if (alive.count(missing)) throw DimensionMismatch("missing position listed as alive");
  if (static_cast<int>(alive.size()) < params.k)
    throw Unrecoverable("only " + std::to_string(alive.size()) + " alive symbols, need " +
                        std::to_string(params.k));
  RepairPlan plan;
  plan.recipe = RepairPlan::Recipe::rs_decode_reencode;
  plan.missing = missing;
  for (int pos : alive) {
    if (static_cast<int>(plan.reads.size()) == params.k) break;
    plan.reads.push_back({pos, Sub::a, 1});
  }
  plan.cost = static_cast<std::uint64_t>(params.k);
  return plan;
}

std::uint8_t execute_rs_repair(const CodeParams& params, const RepairPlan& plan,
                               const std::function<std::uint8_t(int node)>& symbol_at) {
  std::map<int, std::uint8_t> got;
  for (const auto& rd : plan.reads) got.emplace(rd.node, symbol_at(rd.node));
  std::vector<std::uint8_t> data = rs_decode(params, got);
  return rs_symbol_at(params, data, plan.missing);
}

bool stripe_consistent(const Stripe& s) {
  if (static_cast<int>(s.symbols.size()) != s.params.n()) return false;
  std::span<const std::uint8_t> data(s.symbols.data(), static_cast<std::size_t>(s.params.k));
  for (int j = 0; j < s.params.r; ++j)
    if (rs_symbol_at(s.params, data, s.params.k + j) !=
        s.symbols[static_cast<std::size_t>(s.params.k + j)])
      return false;
  return true;
}

}  // namespace pbrs

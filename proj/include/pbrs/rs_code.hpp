#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "pbrs/matrix.hpp"

// Baseline (k,r) Reed-Solomon codec over single byte-level stripes:
// systematic encode, erasure decode from any k symbols, and single-failure
// repair planning. Repair under plain RS always downloads exactly k
// symbol-units; that cost is the point of comparison for the piggybacked
// codec.
namespace pbrs {

struct CodeParams {
  int k = 0;
  int r = 0;

  CodeParams() = default;
  CodeParams(int k_, int r_) : k(k_), r(r_) {
    if (k < 1 || r < 1 || k + r > 256)
      throw DimensionMismatch("invalid code parameters k=" + std::to_string(k) +
                              " r=" + std::to_string(r));
  }
  int n() const { return k + r; }
  bool operator==(const CodeParams&) const = default;
};

// positions 0..k-1 data, k..k+r-1 parity
struct Stripe {
  CodeParams params;
  std::vector<std::uint8_t> symbols;
};

enum class Sub : std::uint8_t { a = 0, b = 1 };

// Explicit read set plus decode recipe for one repair. Costs are in
// symbol-units; the block layer scales them by substripe-half bytes.
struct RepairPlan {
  enum class Recipe : std::uint8_t {
    rs_decode_reencode,   // decode from k reads, re-encode the missing symbol
    pb_group_extract,     // piggyback path: substripe-b decode + group sum peel
    pb_parity_reencode,   // recompute parity from all data, re-add piggyback
    pb_pair_fallback,     // full two-substripe decode + re-encode
  };
  struct Read {
    int node = 0;
    Sub sub = Sub::a;
    std::uint32_t units = 1;
    bool operator==(const Read&) const = default;
  };

  Recipe recipe = Recipe::rs_decode_reencode;
  std::vector<Read> reads;
  std::uint64_t cost = 0;  // = sum of read units
  int missing = -1;
  int group = -1;  // pb_group_extract only: index of the group of `missing`
};

Stripe rs_encode(const CodeParams& params, std::span<const std::uint8_t> data);

// Recovers the k data symbols from >= k (position, symbol) pairs, using the
// lowest k positions. With check_consistency set, any extra symbols are
// checked against the re-encoded stripe and CorruptStripe is thrown on
// mismatch.
std::vector<std::uint8_t> rs_decode(const CodeParams& params,
                                    const std::map<int, std::uint8_t>& available,
                                    bool check_consistency = false);

// symbol at `pos` of the codeword for `data`
std::uint8_t rs_symbol_at(const CodeParams& params, std::span<const std::uint8_t> data,
                          int pos);

RepairPlan rs_repair_plan(const CodeParams& params, int missing,
                          const std::set<int>& alive);

// Runs an rs_decode_reencode plan against a symbol source; returns the
// recovered symbol. The source is called once per planned read.
std::uint8_t execute_rs_repair(const CodeParams& params, const RepairPlan& plan,
                               const std::function<std::uint8_t(int node)>& symbol_at);

bool stripe_consistent(const Stripe& s);

}  // namespace pbrs

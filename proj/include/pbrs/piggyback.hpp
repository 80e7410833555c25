#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "pbrs/error.hpp"
#include "pbrs/rs_code.hpp"

namespace pbrs {

// Disjoint groups of data-node indices. Group g is carried by parity g+1;
// parity 0 is never piggybacked so the second substripe stays decodable.
// Groups need not cover every data node; uncovered nodes repair at the
// full-decode cost.
struct GroupPartition {
  std::vector<std::vector<int>> groups;

  // Group index containing `node`, or -1 when uncovered.
  int group_of(int node) const;
  int group_size(int g) const { return static_cast<int>(groups[static_cast<std::size_t>(g)].size()); }

  // Throws NoPiggybackParity when r < 2 or there are more groups than
  // piggybackable parities, DimensionMismatch on overlap or range errors.
  void validate(const CodeParams& params) const;
};

// Splits all k data nodes into r-1 near-equal groups, larger groups first.
GroupPartition default_partition(const CodeParams& params);

// Two interleaved substripes over the same n nodes. `a` is a clean RS
// stripe; `b` differs from clean RS only in parities 1..r-1, where parity
// g+1 additionally carries the XOR of a-data over group g.
struct StripePair {
  CodeParams params;
  GroupPartition partition;
  std::vector<std::uint8_t> a;
  std::vector<std::uint8_t> b;
};

StripePair pb_encode(const CodeParams& params, const GroupPartition& partition,
                     std::span<const std::uint8_t> a_data,
                     std::span<const std::uint8_t> b_data);

// Both halves stored by one node.
struct BlockHalves {
  std::uint8_t a = 0;
  std::uint8_t b = 0;
};

// What node `pos` stores given the original data halves.
BlockHalves pb_symbol_at(const CodeParams& params, const GroupPartition& partition,
                         std::span<const std::uint8_t> a_data,
                         std::span<const std::uint8_t> b_data, int pos);

// Recovers (a_data, b_data) from any >= k full blocks.
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> pb_decode(
    const CodeParams& params, const GroupPartition& partition,
    const std::map<int, BlockHalves>& available);

// Cheapest plan for rebuilding node `missing` when every node in `alive` is
// readable. Plan costs are in half-block units (one unit = one substripe
// symbol), so the full-decode baseline costs 2k. Covered data nodes with all
// other nodes alive cost k + |group|.
RepairPlan pb_repair_plan(const CodeParams& params, const GroupPartition& partition,
                          int missing, const std::set<int>& alive);

// Runs a plan, pulling exactly the planned half-reads through `half_at`.
BlockHalves execute_pb_repair(const CodeParams& params, const GroupPartition& partition,
                              const RepairPlan& plan,
                              const std::function<std::uint8_t(int node, Sub sub)>& half_at);

// Single-failure repair traffic per node, in half-block units.
struct RepairCostSummary {
  CodeParams params{1, 1};
  std::vector<std::uint64_t> per_node_halves;  // indexed by node
  std::uint64_t baseline_halves = 0;           // 2k, cost of full decode

  std::uint64_t data_total_halves() const;
  std::uint64_t all_total_halves() const;
  double data_avg_halves() const;
  double all_avg_halves() const;
  // 1 - avg/baseline; exact up to double rounding of one division.
  double data_savings() const;
  double all_savings() const;
};

RepairCostSummary average_repair_cost(const CodeParams& params,
                                      const GroupPartition& partition);

}  // namespace pbrs

#include "pbrs/piggyback.hpp"

#include <algorithm>

#include "pbrs/gf256.hpp"

namespace pbrs {

int GroupPartition::group_of(int node) const {
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int member : groups[g])
      if (member == node) return static_cast<int>(g);
  return -1;
}

void GroupPartition::validate(const CodeParams& params) const {
  if (params.r < 2)
    throw NoPiggybackParity("piggybacking needs r >= 2, got r = " +
                            std::to_string(params.r));
  if (static_cast<int>(groups.size()) > params.r - 1)
    throw NoPiggybackParity(std::to_string(groups.size()) + " groups need " +
                            std::to_string(groups.size()) +
                            " piggybackable parities, only " +
                            std::to_string(params.r - 1) + " available");
  std::vector<char> seen(static_cast<std::size_t>(params.k), 0);
  for (const auto& group : groups) {
    if (group.empty()) throw DimensionMismatch("empty piggyback group");
    for (int member : group) {
      if (member < 0 || member >= params.k)
        throw DimensionMismatch("group member " + std::to_string(member) +
                                " outside data range");
      if (seen[static_cast<std::size_t>(member)])
        throw DimensionMismatch("data node " + std::to_string(member) +
                                " in more than one group");
      seen[static_cast<std::size_t>(member)] = 1;
    }
  }
}

GroupPartition default_partition(const CodeParams& params) {
  if (params.r < 2)
    throw NoPiggybackParity("piggybacking needs r >= 2, got r = " +
                            std::to_string(params.r));
  const int ngroups = params.r - 1;
  GroupPartition p;
  p.groups.resize(static_cast<std::size_t>(ngroups));
  const int base = params.k / ngroups;
  const int extra = params.k % ngroups;
  int next = 0;
  for (int g = 0; g < ngroups; ++g) {
    const int size = base + (g < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) p.groups[static_cast<std::size_t>(g)].push_back(next++);
  }
  return p;
}

StripePair pb_encode(const CodeParams& params, const GroupPartition& partition,
                     std::span<const std::uint8_t> a_data,
                     std::span<const std::uint8_t> b_data) {
  partition.validate(params);
  StripePair sp;
  sp.params = params;
  sp.partition = partition;
  sp.a = rs_encode(params, a_data).symbols;
  sp.b = rs_encode(params, b_data).symbols;
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    std::uint8_t piggy = 0;
    for (int member : partition.groups[g]) piggy ^= a_data[static_cast<std::size_t>(member)];
    sp.b[static_cast<std::size_t>(params.k + 1 + static_cast<int>(g))] ^= piggy;
  }
  return sp;
}

BlockHalves pb_symbol_at(const CodeParams& params, const GroupPartition& partition,
                         std::span<const std::uint8_t> a_data,
                         std::span<const std::uint8_t> b_data, int pos) {
  BlockHalves h;
  h.a = rs_symbol_at(params, a_data, pos);
  h.b = rs_symbol_at(params, b_data, pos);
  if (pos > params.k) {
    const int g = pos - params.k - 1;
    if (g < static_cast<int>(partition.groups.size()))
      for (int member : partition.groups[static_cast<std::size_t>(g)])
        h.b ^= a_data[static_cast<std::size_t>(member)];
  }
  return h;
}

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> pb_decode(
    const CodeParams& params, const GroupPartition& partition,
    const std::map<int, BlockHalves>& available) {
  std::map<int, std::uint8_t> a_syms;
  for (const auto& [pos, halves] : available) a_syms.emplace(pos, halves.a);
  std::vector<std::uint8_t> a_data = rs_decode(params, a_syms);

  // With a-data known the piggybacks can be stripped, leaving clean RS.
  std::map<int, std::uint8_t> b_syms;
  for (const auto& [pos, halves] : available) {
    std::uint8_t sym = halves.b;
    if (pos > params.k) {
      const int g = pos - params.k - 1;
      if (g < static_cast<int>(partition.groups.size()))
        for (int member : partition.groups[static_cast<std::size_t>(g)])
          sym ^= a_data[static_cast<std::size_t>(member)];
    }
    b_syms.emplace(pos, sym);
  }
  std::vector<std::uint8_t> b_data = rs_decode(params, b_syms);
  return {std::move(a_data), std::move(b_data)};
}

RepairPlan pb_repair_plan(const CodeParams& params, const GroupPartition& partition,
                          int missing, const std::set<int>& alive) {
  partition.validate(params);
  if (alive.count(missing)) throw DimensionMismatch("missing position listed as alive");
  if (static_cast<int>(alive.size()) < params.k)
    throw Unrecoverable("only " + std::to_string(alive.size()) +
                        " alive nodes, need " + std::to_string(params.k));

  RepairPlan plan;
  plan.missing = missing;
  const bool single = static_cast<int>(alive.size()) == params.n() - 1;
  const int g = missing < params.k ? partition.group_of(missing) : -1;

  if (single && g >= 0) {
    // Decode the b substripe from the k-1 surviving data halves plus the
    // clean parity, then peel the piggyback of parity g+1 down to the
    // missing a half using the groupmates' a halves.
    plan.recipe = RepairPlan::Recipe::pb_group_extract;
    plan.group = g;
    for (int node = 0; node < params.k; ++node)
      if (node != missing) plan.reads.push_back({node, Sub::b, 1});
    plan.reads.push_back({params.k, Sub::b, 1});
    plan.reads.push_back({params.k + 1 + g, Sub::b, 1});
    for (int member : partition.groups[static_cast<std::size_t>(g)])
      if (member != missing) plan.reads.push_back({member, Sub::a, 1});
  } else if (single && missing >= params.k) {
    // Re-encode a parity from the full data blocks.
    plan.recipe = RepairPlan::Recipe::pb_parity_reencode;
    for (int node = 0; node < params.k; ++node) {
      plan.reads.push_back({node, Sub::a, 1});
      plan.reads.push_back({node, Sub::b, 1});
    }
  } else {
    // Uncovered data node or degraded stripe: full decode of both halves
    // from the k lowest alive nodes.
    plan.recipe = RepairPlan::Recipe::pb_pair_fallback;
    int taken = 0;
    for (int node : alive) {
      if (taken == params.k) break;
      plan.reads.push_back({node, Sub::a, 1});
      plan.reads.push_back({node, Sub::b, 1});
      ++taken;
    }
  }
  plan.cost = 0;
  for (const auto& rd : plan.reads) plan.cost += rd.units;
  return plan;
}

BlockHalves execute_pb_repair(const CodeParams& params, const GroupPartition& partition,
                              const RepairPlan& plan,
                              const std::function<std::uint8_t(int, Sub)>& half_at) {
  std::map<int, std::uint8_t> a_reads, b_reads;
  for (const auto& rd : plan.reads) {
    if (rd.sub == Sub::a)
      a_reads.emplace(rd.node, half_at(rd.node, Sub::a));
    else
      b_reads.emplace(rd.node, half_at(rd.node, Sub::b));
  }

  switch (plan.recipe) {
    case RepairPlan::Recipe::pb_group_extract: {
      std::map<int, std::uint8_t> b_clean;
      for (const auto& [node, sym] : b_reads)
        if (node <= params.k) b_clean.emplace(node, sym);
      std::vector<std::uint8_t> b_data = rs_decode(params, b_clean);

      const int pnode = params.k + 1 + plan.group;
      std::uint8_t piggy = b_reads.at(pnode) ^
                           rs_symbol_at(params, b_data, pnode);
      for (const auto& [node, sym] : a_reads) piggy ^= sym;

      BlockHalves out;
      out.a = piggy;
      out.b = b_data[static_cast<std::size_t>(plan.missing)];
      return out;
    }
    case RepairPlan::Recipe::pb_parity_reencode:
    case RepairPlan::Recipe::pb_pair_fallback: {
      std::map<int, BlockHalves> blocks;
      for (const auto& [node, sym] : a_reads)
        blocks[node].a = sym;
      for (const auto& [node, sym] : b_reads)
        blocks[node].b = sym;
      auto [a_data, b_data] = pb_decode(params, partition, blocks);
      return pb_symbol_at(params, partition, a_data, b_data, plan.missing);
    }
    case RepairPlan::Recipe::rs_decode_reencode:
      break;
  }
  throw DimensionMismatch("plan recipe does not apply to a stripe pair");
}

std::uint64_t RepairCostSummary::data_total_halves() const {
  std::uint64_t total = 0;
  for (int node = 0; node < params.k; ++node) total += per_node_halves[static_cast<std::size_t>(node)];
  return total;
}

std::uint64_t RepairCostSummary::all_total_halves() const {
  std::uint64_t total = 0;
  for (std::uint64_t c : per_node_halves) total += c;
  return total;
}

double RepairCostSummary::data_avg_halves() const {
  return static_cast<double>(data_total_halves()) / params.k;
}

double RepairCostSummary::all_avg_halves() const {
  return static_cast<double>(all_total_halves()) / params.n();
}

double RepairCostSummary::data_savings() const {
  return 1.0 - static_cast<double>(data_total_halves()) /
                   (static_cast<double>(params.k) * static_cast<double>(baseline_halves));
}

double RepairCostSummary::all_savings() const {
  return 1.0 - static_cast<double>(all_total_halves()) /
                   (static_cast<double>(params.n()) * static_cast<double>(baseline_halves));
}

RepairCostSummary average_repair_cost(const CodeParams& params,
                                      const GroupPartition& partition) {
  partition.validate(params);
  RepairCostSummary summary;
  summary.params = params;
  summary.baseline_halves = 2 * static_cast<std::uint64_t>(params.k);
  summary.per_node_halves.resize(static_cast<std::size_t>(params.n()));

  std::set<int> all_nodes;
  for (int node = 0; node < params.n(); ++node) all_nodes.insert(node);
  for (int node = 0; node < params.n(); ++node) {
    std::set<int> alive = all_nodes;
    alive.erase(node);
    summary.per_node_halves[static_cast<std::size_t>(node)] =
        pb_repair_plan(params, partition, node, alive).cost;
  }
  return summary;
}

}  // namespace pbrs

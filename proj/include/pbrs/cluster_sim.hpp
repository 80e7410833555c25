#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pbrs/error.hpp"
#include "pbrs/piggyback.hpp"
#include "pbrs/rs_code.hpp"

namespace pbrs {

struct ClusterTopology {
  int racks = 0;
  int nodes_per_rack = 0;
  std::uint64_t node_capacity_bytes = 0;  // informational only

  int nodes() const { return racks * nodes_per_rack; }
  int rack_of(int node) const { return node / nodes_per_rack; }
};

struct FailureEvent {
  enum class Kind : std::uint8_t { down, up };

  std::int64_t timestamp = 0;  // UTC seconds
  int node = 0;
  Kind kind = Kind::down;
};

// Static block placement: every block of a stripe on a distinct rack.
struct Placement {
  std::vector<std::vector<int>> stripe_nodes;                 // [stripe][index] -> node
  std::vector<std::vector<std::pair<int, int>>> node_blocks;  // node -> (stripe, index)
};

Placement place_stripes(const ClusterTopology& topology, int stripe_count,
                        const CodeParams& params, std::uint64_t seed);

// CSV with header `timestamp,node_id,event`, event down|up, timestamps
// ISO-8601 UTC. Validates per-node down/up alternation.
std::vector<FailureEvent> ingest_trace(std::istream& in);
std::vector<FailureEvent> ingest_trace_file(const std::filesystem::path& path);

// Repair accounting knobs. A machine down at least flag_delay_seconds is
// flagged and every block it hosts is repaired at flag time. Machines
// flagged at the same instant fail together: their stripes are bucketed by
// how many blocks went missing at once.
struct CostModel {
  CodeParams params{10, 4};
  GroupPartition partition;
  std::uint64_t block_bytes = 268'435'456;  // even, so substripe halves are whole bytes
  double flat_single_savings = 0.30;
  std::uint64_t scale_multiplier = 1;  // reported figures = raw counts x multiplier
  std::int64_t flag_delay_seconds = 900;

  void validate() const;
};

struct DayStats {
  std::int64_t day = 0;  // days since epoch
  std::uint64_t unavailable_machines = 0;
  std::uint64_t blocks_repaired = 0;
  std::uint64_t stripes_repaired = 0;
  std::uint64_t missing_one = 0;
  std::uint64_t missing_two = 0;
  std::uint64_t missing_three_plus = 0;
  std::uint64_t rs_bytes = 0;
  std::uint64_t pb_bytes = 0;
  std::uint64_t savings_bytes = 0;        // rs_bytes - pb_bytes
  std::uint64_t pb_flat_bytes = 0;       // flat 30%-per-single-repair model
  std::uint64_t savings_flat_bytes = 0;  // rs_bytes - pb_flat_bytes
};

struct TrafficSummary {
  std::uint64_t median_unavailable_machines = 0;
  std::uint64_t median_blocks_repaired = 0;
  std::uint64_t median_rs_bytes = 0;
  std::uint64_t median_pb_bytes = 0;
  std::uint64_t median_savings_bytes = 0;
  std::uint64_t median_savings_flat_bytes = 0;
  std::uint64_t total_blocks_repaired = 0;
  std::uint64_t total_rs_bytes = 0;
  std::uint64_t total_pb_bytes = 0;
  std::uint64_t total_savings_bytes = 0;
  std::uint64_t total_savings_flat_bytes = 0;
  std::uint64_t total_missing_one = 0;
  std::uint64_t total_missing_two = 0;
  std::uint64_t total_missing_three_plus = 0;
  double savings_pct = 0.0;        // 100 * total_savings / total_rs
  double savings_flat_pct = 0.0;  // same under the flat model
};

struct TrafficReport {
  CostModel model;
  std::vector<DayStats> days;
  TrafficSummary summary;
};

// Pure accounting, no RNG: identical inputs give identical reports.
TrafficReport simulate(const ClusterTopology& topology, const Placement& placement,
                       const std::vector<FailureEvent>& events, const CostModel& model);

struct MissingDistribution {
  double pct_one = 0.0;
  double pct_two = 0.0;
  double pct_three_plus = 0.0;
};

MissingDistribution summarize_missing_distribution(const TrafficReport& report);

}  // namespace pbrs

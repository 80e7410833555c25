#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "pbrs/cluster_sim.hpp"

namespace pbrs {

// Synthetic machine-unavailability trace, calibrated by target repair
// counts rather than raw event rates. Co-failing machines share one down
// timestamp, so their repairs batch into multi-missing stripes; machines
// rotate through a seeded cycle so repair load spreads evenly.
struct TraceGenConfig {
  int days = 30;
  std::int64_t start_day = 0;     // day index (days since epoch)
  double singles_per_day = 955.0; // target stripes repaired with 1 block missing
  double double_ratio = 0.019066; // target two-missing / one-missing stripe ratio
  double triple_events_total = 1.0;  // simultaneous 3-machine events per run
  double noise_per_day = 8.0;     // sub-threshold unavailability events per day
  int blocks_per_node = 36;
  std::uint64_t seed = 1;
  std::int64_t flag_delay_seconds = 900;
  std::int64_t flagged_downtime_min = 1800;
  std::int64_t flagged_downtime_max = 7200;
  std::int64_t noise_downtime_min = 60;
  std::int64_t noise_downtime_max = 840;
};

// Event rates solved from the repair-count targets via the placement
// overlap probabilities; exposed so tests can pin the arithmetic.
struct TraceGenPlan {
  int stripe_count = 0;
  double blocks_per_node = 0.0;  // realized expectation, (k+r) * stripes / nodes
  double shared_two = 0.0;       // expected stripes shared by a rack-distinct pair
  double shared_three = 0.0;     // expected stripes shared by a rack-distinct triple
  double solo_per_day = 0.0;
  double pair_per_day = 0.0;
  double triple_per_day = 0.0;
};

TraceGenPlan solve_rates(const TraceGenConfig& config, const ClusterTopology& topology,
                         const CodeParams& params);

std::vector<FailureEvent> generate_trace(const TraceGenConfig& config,
                                         const ClusterTopology& topology,
                                         const CodeParams& params);

void write_trace_csv(std::ostream& out, const std::vector<FailureEvent>& events);

// One simulation run bundled: topology, code, trace targets, cost model.
struct RunConfig {
  ClusterTopology topology{15, 2, 0};
  CodeParams params{10, 4};
  GroupPartition partition;
  std::uint64_t block_bytes = 268'435'456;
  std::uint64_t scale_multiplier = 1;
  double flat_single_savings = 0.30;
  std::uint64_t placement_seed = 1;
  TraceGenConfig gen;

  int stripe_count() const;
  CostModel cost_model() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace pbrs

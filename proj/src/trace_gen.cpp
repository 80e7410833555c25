#include "pbrs/trace_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "json_util.hpp"
#include "pbrs/rng.hpp"
#include "pbrs/timeutil.hpp"

namespace pbrs {

TraceGenPlan solve_rates(const TraceGenConfig& config, const ClusterTopology& topology,
                         const CodeParams& params) {
  const int n = params.n();
  const double N = topology.nodes();
  const double R = topology.racks;
  const double npr = topology.nodes_per_rack;
  if (topology.racks < n)
    throw PlacementInfeasible("trace targets need at least " + std::to_string(n) + " racks");
  if (config.days < 0) throw DimensionMismatch("days must be non-negative");

  TraceGenPlan plan;
  plan.stripe_count = static_cast<int>(
      std::llround(N * config.blocks_per_node / static_cast<double>(n)));
  const double T = plan.stripe_count;
  plan.blocks_per_node = n * T / N;

  // Probability one stripe covers a given pair (triple) of machines on
  // distinct racks, under uniform distinct-rack placement.
  const double p2 = (n * (n - 1.0)) / (R * (R - 1.0)) / (npr * npr);
  const double p3 = (n * (n - 1.0) * (n - 2.0)) / (R * (R - 1.0) * (R - 2.0)) / (npr * npr * npr);
  plan.shared_two = T * p2;
  plan.shared_three = T * p3;

  const double days = std::max(1, config.days);
  const double n1 = config.singles_per_day;
  const double n2 = n1 * config.double_ratio;
  const double t = config.triple_events_total / days;

  // Expected stripe buckets per event: a pair makes shared_two doubles, a
  // triple makes shared_three triples plus 3*(shared_two - shared_three)
  // doubles; the rest of the touched stripes are singles.
  const double doubles_from_triple = 3.0 * (plan.shared_two - plan.shared_three);
  const double p =
      plan.shared_two > 0.0
          ? std::max(0.0, n2 - doubles_from_triple * t) / plan.shared_two
          : 0.0;
  const double singles_from_pair = 2.0 * plan.blocks_per_node - 2.0 * plan.shared_two;
  const double singles_from_triple =
      3.0 * plan.blocks_per_node - 6.0 * plan.shared_two + 3.0 * plan.shared_three;
  const double s =
      plan.blocks_per_node > 0.0
          ? std::max(0.0, n1 - singles_from_pair * p - singles_from_triple * t) /
                plan.blocks_per_node
          : 0.0;

  plan.triple_per_day = t;
  plan.pair_per_day = p;
  plan.solo_per_day = s;
  return plan;
}

namespace {

// Seeded machine rotation: probes forward for an idle machine on an
// allowed rack, swapping it to the cursor so every machine is visited about
// equally often.
class Rotation {
 public:
  Rotation(int nodes, std::mt19937_64& rng) : order_(static_cast<std::size_t>(nodes)) {
    for (int i = 0; i < nodes; ++i) order_[static_cast<std::size_t>(i)] = i;
    partial_shuffle(order_, order_.size(), rng);
  }

  // -1 when no machine qualifies
  int take(const ClusterTopology& topology, std::int64_t at,
           const std::vector<std::int64_t>& busy_until, const std::set<int>& exclude_racks) {
    for (std::size_t probe = 0; probe < order_.size(); ++probe) {
      const std::size_t idx = (cursor_ + probe) % order_.size();
      const int node = order_[idx];
      if (busy_until[static_cast<std::size_t>(node)] > at) continue;
      if (exclude_racks.count(topology.rack_of(node))) continue;
      std::swap(order_[idx], order_[cursor_]);
      cursor_ = (cursor_ + 1) % order_.size();
      return node;
    }
    return -1;
  }

 private:
  std::vector<int> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

std::vector<FailureEvent> generate_trace(const TraceGenConfig& config,
                                         const ClusterTopology& topology,
                                         const CodeParams& params) {
  const TraceGenPlan plan = solve_rates(config, topology, params);
  std::mt19937_64 rng(config.seed);
  Rotation rotation(topology.nodes(), rng);

  std::vector<std::int64_t> busy_until(static_cast<std::size_t>(topology.nodes()),
                                       std::numeric_limits<std::int64_t>::min());
  std::set<std::int64_t> used_down_ts;
  std::vector<FailureEvent> events;

  const std::int64_t flagged_span =
      config.flagged_downtime_max - config.flagged_downtime_min + 1;
  const std::int64_t noise_span = config.noise_downtime_max - config.noise_downtime_min + 1;

  // Down instants stay far enough from midnight that the flag lands on the
  // same day.
  const std::int64_t latest_second = 86400 - config.flag_delay_seconds - 1;

  auto draw_down_ts = [&](std::int64_t day_start) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const std::int64_t ts =
          day_start + static_cast<std::int64_t>(
                          bounded_draw(rng, static_cast<std::uint64_t>(latest_second)));
      if (used_down_ts.insert(ts).second) return ts;
    }
    std::int64_t ts = day_start;
    while (!used_down_ts.insert(ts).second) ++ts;
    return ts;
  };

  auto emit_group = [&](std::int64_t day_start, int members, bool flagged) {
    const std::int64_t down = draw_down_ts(day_start);
    std::set<int> group_racks;
    for (int m = 0; m < members; ++m) {
      const int node = rotation.take(topology, down, busy_until,
                                     members > 1 ? group_racks : std::set<int>{});
      if (node < 0) return;  // cluster saturated; skip the remainder
      group_racks.insert(topology.rack_of(node));
      const std::int64_t duration =
          flagged ? config.flagged_downtime_min +
                        static_cast<std::int64_t>(
                            bounded_draw(rng, static_cast<std::uint64_t>(flagged_span)))
                  : config.noise_downtime_min +
                        static_cast<std::int64_t>(
                            bounded_draw(rng, static_cast<std::uint64_t>(noise_span)));
      busy_until[static_cast<std::size_t>(node)] = down + duration;
      events.push_back({down, node, FailureEvent::Kind::down});
      events.push_back({down + duration, node, FailureEvent::Kind::up});
    }
  };

  double acc_solo = 0.5, acc_pair = 0.5, acc_triple = 0.5, acc_noise = 0.5;
  for (int day = 0; day < config.days; ++day) {
    const std::int64_t day_start = (config.start_day + day) * 86400;

    acc_triple += plan.triple_per_day;
    for (; acc_triple >= 1.0; acc_triple -= 1.0) emit_group(day_start, 3, true);
    acc_pair += plan.pair_per_day;
    for (; acc_pair >= 1.0; acc_pair -= 1.0) emit_group(day_start, 2, true);
    acc_solo += plan.solo_per_day;
    for (; acc_solo >= 1.0; acc_solo -= 1.0) emit_group(day_start, 1, true);
    acc_noise += config.noise_per_day;
    for (; acc_noise >= 1.0; acc_noise -= 1.0) emit_group(day_start, 1, false);
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const FailureEvent& x, const FailureEvent& y) {
                     if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
                     return x.node < y.node;
                   });
  return events;
}

void write_trace_csv(std::ostream& out, const std::vector<FailureEvent>& events) {
  out << "timestamp,node_id,event\n";
  for (const auto& ev : events)
    out << format_iso8601(ev.timestamp) << ',' << ev.node << ','
        << (ev.kind == FailureEvent::Kind::down ? "down" : "up") << '\n';
}

int RunConfig::stripe_count() const {
  return static_cast<int>(std::llround(static_cast<double>(topology.nodes()) *
                                       gen.blocks_per_node / params.n()));
}

CostModel RunConfig::cost_model() const {
  CostModel model;
  model.params = params;
  model.partition = partition;
  model.block_bytes = block_bytes;
  model.flat_single_savings = flat_single_savings;
  model.scale_multiplier = scale_multiplier;
  model.flag_delay_seconds = gen.flag_delay_seconds;
  return model;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw Error("config parse (" + path.string() + "): " + std::string(e.what()));
  }

  RunConfig config;
  try {
    const auto& topo = doc.at("topology");
    config.topology.racks = topo.at("racks").get<int>();
    config.topology.nodes_per_rack = topo.at("nodes_per_rack").get<int>();
    config.topology.node_capacity_bytes = topo.value("node_capacity_bytes", std::uint64_t{0});

    const auto& code = doc.at("code");
    config.params = CodeParams(code.at("k").get<int>(), code.at("r").get<int>());
    if (code.contains("partition"))
      config.partition = partition_from_json(code.at("partition"));
    else
      config.partition = default_partition(config.params);

    config.block_bytes = doc.at("block_bytes").get<std::uint64_t>();
    config.scale_multiplier = doc.value("scale_multiplier", std::uint64_t{1});
    config.flat_single_savings = doc.value("flat_single_savings", 0.30);
    config.placement_seed = doc.value("placement_seed", std::uint64_t{1});

    const auto& gen = doc.at("trace");
    config.gen.days = gen.at("days").get<int>();
    config.gen.start_day = parse_iso_date(gen.value("start_date", std::string("2026-06-01")));
    config.gen.singles_per_day = gen.at("singles_per_day").get<double>();
    config.gen.double_ratio = gen.value("double_ratio", 0.019066);
    config.gen.triple_events_total = gen.value("triple_events_total", 1.0);
    config.gen.noise_per_day = gen.value("noise_per_day", 8.0);
    config.gen.blocks_per_node = doc.at("blocks_per_node").get<int>();
    config.gen.seed = gen.value("seed", std::uint64_t{1});
    config.gen.flag_delay_seconds = doc.value("flag_delay_seconds", std::int64_t{900});
    config.gen.flagged_downtime_min = gen.value("flagged_downtime_min", std::int64_t{1800});
    config.gen.flagged_downtime_max = gen.value("flagged_downtime_max", std::int64_t{7200});
    config.gen.noise_downtime_min = gen.value("noise_downtime_min", std::int64_t{60});
    config.gen.noise_downtime_max = gen.value("noise_downtime_max", std::int64_t{840});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("config schema (" + path.string() + "): " + std::string(e.what()));
  }
  return config;
}

}  // namespace pbrs

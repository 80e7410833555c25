#include "pbrs/cluster_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "pbrs/rng.hpp"
#include "pbrs/timeutil.hpp"

namespace pbrs {

namespace {

std::uint64_t median_of(std::vector<std::uint64_t> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2;
}

}  // namespace

Placement place_stripes(const ClusterTopology& topology, int stripe_count,
                        const CodeParams& params, std::uint64_t seed) {
  if (topology.racks < params.n())
    throw PlacementInfeasible("placement needs " + std::to_string(params.n()) +
                              " distinct racks, topology has " +
                              std::to_string(topology.racks));
  if (topology.nodes_per_rack < 1) throw PlacementInfeasible("empty racks");

  std::mt19937_64 rng(seed);
  Placement placement;
  placement.stripe_nodes.reserve(static_cast<std::size_t>(stripe_count));
  placement.node_blocks.resize(static_cast<std::size_t>(topology.nodes()));

  std::vector<int> racks(static_cast<std::size_t>(topology.racks));
  for (int i = 0; i < topology.racks; ++i) racks[static_cast<std::size_t>(i)] = i;

  for (int s = 0; s < stripe_count; ++s) {
    partial_shuffle(racks, static_cast<std::size_t>(params.n()), rng);
    std::vector<int> nodes(static_cast<std::size_t>(params.n()));
    for (int i = 0; i < params.n(); ++i) {
      const int rack = racks[static_cast<std::size_t>(i)];
      const int node = rack * topology.nodes_per_rack +
                       static_cast<int>(bounded_draw(
                           rng, static_cast<std::uint64_t>(topology.nodes_per_rack)));
      nodes[static_cast<std::size_t>(i)] = node;
      placement.node_blocks[static_cast<std::size_t>(node)].push_back({s, i});
    }
    placement.stripe_nodes.push_back(std::move(nodes));
  }
  return placement;
}

std::vector<FailureEvent> ingest_trace(std::istream& in) {
  std::vector<FailureEvent> events;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) return events;  // empty input: empty list
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,node_id,event")
    throw ParseError("expected header 'timestamp,node_id,event', got '" + line + "'",
                     line_no);

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw ParseError("expected 3 comma-separated fields", line_no);

    FailureEvent ev;
    try {
      ev.timestamp = parse_iso8601(line.substr(0, c1));
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }

    const std::string node_text = line.substr(c1 + 1, c2 - c1 - 1);
    try {
      std::size_t used = 0;
      const long node = std::stol(node_text, &used);
      if (used != node_text.size() || node < 0) throw std::invalid_argument("node");
      ev.node = static_cast<int>(node);
    } catch (const std::exception&) {
      throw ParseError("node_id must be a non-negative integer, got '" + node_text + "'",
                       line_no);
    }

    const std::string kind = line.substr(c2 + 1);
    if (kind == "down")
      ev.kind = FailureEvent::Kind::down;
    else if (kind == "up")
      ev.kind = FailureEvent::Kind::up;
    else
      throw ParseError("event must be down|up, got '" + kind + "'", line_no);
    events.push_back(ev);
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const FailureEvent& x, const FailureEvent& y) {
                     if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
                     return x.node < y.node;
                   });

  // down/up must alternate per node, starting with down
  std::map<int, FailureEvent::Kind> last;
  for (const auto& ev : events) {
    auto it = last.find(ev.node);
    const bool was_down = it != last.end() && it->second == FailureEvent::Kind::down;
    if (ev.kind == FailureEvent::Kind::down && was_down)
      throw TraceInconsistent("node " + std::to_string(ev.node) +
                              " goes down twice without coming up");
    if (ev.kind == FailureEvent::Kind::up && !was_down)
      throw TraceInconsistent("node " + std::to_string(ev.node) + " comes up at " +
                              format_iso8601(ev.timestamp) + " without being down");
    last[ev.node] = ev.kind;
  }
  return events;
}

std::vector<FailureEvent> ingest_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_trace(in);
}

void CostModel::validate() const {
  if (block_bytes == 0 || block_bytes % 2 != 0)
    throw DimensionMismatch("block_bytes must be positive and even");
  if (scale_multiplier == 0) throw DimensionMismatch("scale_multiplier must be >= 1");
  if (flat_single_savings < 0.0 || flat_single_savings > 1.0)
    throw DimensionMismatch("flat_single_savings must be in [0, 1]");
  if (flag_delay_seconds < 0) throw DimensionMismatch("flag delay must be non-negative");
  partition.validate(params);
}

TrafficReport simulate(const ClusterTopology& topology, const Placement& placement,
                       const std::vector<FailureEvent>& events, const CostModel& model) {
  model.validate();
  if (static_cast<int>(placement.node_blocks.size()) != topology.nodes())
    throw DimensionMismatch("placement does not cover the topology");

  // Per-index repair cost in substripe halves, from the same planner the
  // block layer executes.
  const std::uint64_t half_bytes = model.block_bytes / 2;
  const std::uint64_t rs_cost = static_cast<std::uint64_t>(model.params.k) * model.block_bytes;
  std::vector<std::uint64_t> pb_single_cost(static_cast<std::size_t>(model.params.n()));
  {
    std::set<int> all;
    for (int i = 0; i < model.params.n(); ++i) all.insert(i);
    for (int i = 0; i < model.params.n(); ++i) {
      std::set<int> alive = all;
      alive.erase(i);
      pb_single_cost[static_cast<std::size_t>(i)] =
          pb_repair_plan(model.params, model.partition, i, alive).cost * half_bytes;
    }
  }
  const auto flat_savings_per_single = static_cast<std::uint64_t>(
      std::llround(model.flat_single_savings * static_cast<double>(rs_cost)));

  // Pair down events with their recovery to find flag instants.
  std::vector<std::pair<std::int64_t, int>> flags;  // (flag time, node)
  std::map<int, std::int64_t> open_down;
  for (const auto& ev : events) {
    if (ev.node < 0 || ev.node >= topology.nodes())
      throw UnknownNode("node " + std::to_string(ev.node) + " outside the topology");
    if (ev.kind == FailureEvent::Kind::down) {
      if (open_down.count(ev.node))
        throw TraceInconsistent("node " + std::to_string(ev.node) +
                                " goes down twice without coming up");
      open_down[ev.node] = ev.timestamp;
    } else {
      auto it = open_down.find(ev.node);
      if (it == open_down.end())
        throw TraceInconsistent("node " + std::to_string(ev.node) + " was never down");
      if (ev.timestamp - it->second >= model.flag_delay_seconds)
        flags.push_back({it->second + model.flag_delay_seconds, ev.node});
      open_down.erase(it);
    }
  }
  for (const auto& [node, down_ts] : open_down)  // still down at trace end
    flags.push_back({down_ts + model.flag_delay_seconds, node});
  std::sort(flags.begin(), flags.end());

  std::map<std::int64_t, DayStats> day_stats;
  auto day_of = [](std::int64_t ts) {
    return ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
  };

  // Process one batch of simultaneously flagged machines.
  std::size_t i = 0;
  while (i < flags.size()) {
    std::size_t j = i;
    while (j < flags.size() && flags[j].first == flags[i].first) ++j;

    DayStats& day = day_stats[day_of(flags[i].first)];
    day.unavailable_machines += j - i;

    std::map<int, std::vector<int>> stripe_missing;  // stripe -> missing indices
    for (std::size_t f = i; f < j; ++f)
      for (const auto& [stripe, index] : placement.node_blocks[static_cast<std::size_t>(
               flags[f].second)])
        stripe_missing[stripe].push_back(index);

    for (const auto& [stripe, indices] : stripe_missing) {
      const std::size_t m = indices.size();
      day.stripes_repaired += 1;
      day.blocks_repaired += m;
      day.rs_bytes += rs_cost;
      if (m == 1) {
        day.missing_one += 1;
        day.pb_bytes += pb_single_cost[static_cast<std::size_t>(indices[0])];
        day.pb_flat_bytes += rs_cost - flat_savings_per_single;
      } else {
        // One decode restores every block of the stripe; both codecs pay
        // the full-decode price once.
        (m == 2 ? day.missing_two : day.missing_three_plus) += 1;
        day.pb_bytes += rs_cost;
        day.pb_flat_bytes += rs_cost;
      }
    }
    i = j;
  }

  TrafficReport report;
  report.model = model;
  if (!day_stats.empty()) {
    // Zero-fill idle days so medians cover the whole observed span.
    const std::int64_t first = day_stats.begin()->first;
    const std::int64_t last = day_stats.rbegin()->first;
    for (std::int64_t d = first; d <= last; ++d) day_stats.try_emplace(d);
  }
  for (auto& [d, stats] : day_stats) {
    stats.day = d;
    stats.unavailable_machines *= model.scale_multiplier;
    stats.blocks_repaired *= model.scale_multiplier;
    stats.stripes_repaired *= model.scale_multiplier;
    stats.missing_one *= model.scale_multiplier;
    stats.missing_two *= model.scale_multiplier;
    stats.missing_three_plus *= model.scale_multiplier;
    stats.rs_bytes *= model.scale_multiplier;
    stats.pb_bytes *= model.scale_multiplier;
    stats.pb_flat_bytes *= model.scale_multiplier;
    stats.savings_bytes = stats.rs_bytes - stats.pb_bytes;
    stats.savings_flat_bytes = stats.rs_bytes - stats.pb_flat_bytes;
    report.days.push_back(stats);
  }

  TrafficSummary& sum = report.summary;
  std::vector<std::uint64_t> col;
  auto median_col = [&](auto field) {
    col.clear();
    for (const auto& d : report.days) col.push_back(d.*field);
    return median_of(col);
  };
  sum.median_unavailable_machines = median_col(&DayStats::unavailable_machines);
  sum.median_blocks_repaired = median_col(&DayStats::blocks_repaired);
  sum.median_rs_bytes = median_col(&DayStats::rs_bytes);
  sum.median_pb_bytes = median_col(&DayStats::pb_bytes);
  sum.median_savings_bytes = median_col(&DayStats::savings_bytes);
  sum.median_savings_flat_bytes = median_col(&DayStats::savings_flat_bytes);
  for (const auto& d : report.days) {
    sum.total_blocks_repaired += d.blocks_repaired;
    sum.total_rs_bytes += d.rs_bytes;
    sum.total_pb_bytes += d.pb_bytes;
    sum.total_savings_bytes += d.savings_bytes;
    sum.total_savings_flat_bytes += d.savings_flat_bytes;
    sum.total_missing_one += d.missing_one;
    sum.total_missing_two += d.missing_two;
    sum.total_missing_three_plus += d.missing_three_plus;
  }
  if (sum.total_rs_bytes > 0) {
    sum.savings_pct = 100.0 * static_cast<double>(sum.total_savings_bytes) /
                      static_cast<double>(sum.total_rs_bytes);
    sum.savings_flat_pct = 100.0 * static_cast<double>(sum.total_savings_flat_bytes) /
                            static_cast<double>(sum.total_rs_bytes);
  }
  return report;
}

MissingDistribution summarize_missing_distribution(const TrafficReport& report) {
  const TrafficSummary& s = report.summary;
  const std::uint64_t total =
      s.total_missing_one + s.total_missing_two + s.total_missing_three_plus;
  MissingDistribution dist;
  if (total == 0) return dist;
  dist.pct_one = 100.0 * static_cast<double>(s.total_missing_one) / static_cast<double>(total);
  dist.pct_two = 100.0 * static_cast<double>(s.total_missing_two) / static_cast<double>(total);
  dist.pct_three_plus =
      100.0 * static_cast<double>(s.total_missing_three_plus) / static_cast<double>(total);
  return dist;
}

}  // namespace pbrs

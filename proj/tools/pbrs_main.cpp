#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbrs/cluster_sim.hpp"
#include "pbrs/error.hpp"
#include "pbrs/kernels.hpp"
#include "pbrs/report.hpp"
#include "pbrs/stripe_io.hpp"
#include "pbrs/timeutil.hpp"
#include "pbrs/trace_gen.hpp"

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

// 0 ok, 1 io, 2 usage/config, 3 unrecoverable, 4 trace parse, 5 verify violations
constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnrecoverable = 3;
constexpr int kExitTraceParse = 4;
constexpr int kExitViolations = 5;

pbrs::kernels::Exec exec_from(const std::string& name) {
  return name == "serial" ? pbrs::kernels::Exec::serial : pbrs::kernels::Exec::parallel;
}

pbrs::GroupPartition parse_partition(const std::string& text) {
  pbrs::GroupPartition partition;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<int> members;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ','))
      members.push_back(std::stoi(item));
    partition.groups.push_back(std::move(members));
  }
  return partition;
}

std::string format_ratio(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", ratio);
  return std::string(buf) + "x";
}

struct EncodeArgs {
  std::string input, out_dir, prefix, partition;
  std::string codec = "rs";
  int k = 10, r = 4;
  std::uint64_t block_size = 268'435'456;
  std::string exec = "parallel", format = "human";
};

int cmd_encode(const EncodeArgs& args) {
  pbrs::BlockSetLayout layout;
  layout.block_size = args.block_size;
  layout.params = pbrs::CodeParams(args.k, args.r);
  layout.codec = pbrs::codec_from_name(args.codec);
  if (layout.codec == pbrs::Codec::piggybacked_rs)
    layout.partition = args.partition.empty() ? pbrs::default_partition(layout.params)
                                              : parse_partition(args.partition);

  const std::string prefix =
      args.prefix.empty() ? fs::path(args.input).stem().string() : args.prefix;
  const pbrs::FileManifest fm =
      pbrs::encode_file(args.input, args.out_dir, layout, prefix, exec_from(args.exec));

  const double overhead =
      static_cast<double>(layout.params.n()) / static_cast<double>(layout.params.k);
  if (args.format == "json") {
    ordered_json out;
    out["stripes"] = fm.stripe_ids.size();
    out["blocks_per_stripe"] = layout.params.n();
    out["block_size"] = layout.block_size;
    out["overhead_ratio"] = overhead;
    out["file_manifest"] = (fs::path(args.out_dir) / (prefix + ".file.json")).string();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "encoded " << fm.stripe_ids.size() << " stripe(s), storage overhead "
              << format_ratio(overhead) << "\n";
  }
  return kExitOk;
}

struct RepairArgs {
  std::string manifest, out;
  int missing = -1;
  std::string exec = "parallel", format = "human";
};

int cmd_repair(const RepairArgs& args) {
  const fs::path manifest_path(args.manifest);
  const pbrs::StripeManifest manifest = pbrs::load_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  pbrs::FileBlockReader reader(manifest, dir);

  const pbrs::RepairResult result =
      pbrs::repair_block(manifest, args.missing, reader, exec_from(args.exec));

  fs::path out_path;
  for (const auto& block : manifest.blocks)
    if (block.index == args.missing) out_path = dir / block.path;
  if (!args.out.empty()) out_path = args.out;
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw pbrs::IoError("cannot write " + out_path.string());
  out.write(reinterpret_cast<const char*>(result.block.data()),
            static_cast<std::streamsize>(result.block.size()));
  if (!out) throw pbrs::IoError("short write to " + out_path.string());

  const std::uint64_t baseline =
      static_cast<std::uint64_t>(manifest.params.k) * manifest.block_size;
  ordered_json ledger;
  ledger["missing"] = args.missing;
  ledger["restored_to"] = out_path.string();
  ledger["sources"] = ordered_json::array();
  for (const auto& entry : result.ledger.entries) {
    ordered_json row;
    row["index"] = entry.index;
    row["read"] = entry.kind == pbrs::ReadKind::full
                      ? "full"
                      : (entry.kind == pbrs::ReadKind::half_a ? "substripe-a" : "substripe-b");
    row["bytes"] = entry.bytes;
    ledger["sources"].push_back(std::move(row));
  }
  ledger["total_bytes"] = result.ledger.total();
  ledger["rs_baseline_bytes"] = baseline;
  ledger["ratio_vs_rs"] =
      static_cast<double>(result.ledger.total()) / static_cast<double>(baseline);

  if (args.format == "json") {
    std::cout << ledger.dump(2) << "\n";
  } else {
    std::cout << "restored block " << args.missing << " to " << out_path.string() << "\n"
              << "downloaded " << result.ledger.total() << " bytes from "
              << ledger["sources"].size() << " reads (" << ledger["ratio_vs_rs"].dump()
              << " of the RS baseline)\n";
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string manifest;
  std::uint64_t sample = 0;
  std::uint64_t seed = 1;
  std::string exec = "parallel", format = "human";
};

int cmd_verify(const VerifyArgs& args) {
  const fs::path manifest_path(args.manifest);
  const pbrs::StripeManifest manifest = pbrs::load_manifest(manifest_path);
  pbrs::FileBlockReader reader(manifest, manifest_path.parent_path());
  const std::vector<pbrs::Violation> violations =
      pbrs::verify_stripe(manifest, reader, exec_from(args.exec), args.sample, args.seed);

  constexpr std::size_t kMaxListed = 1000;
  if (args.format == "json") {
    ordered_json out;
    out["ok"] = violations.empty();
    out["violation_count"] = violations.size();
    out["violations"] = ordered_json::array();
    for (std::size_t i = 0; i < violations.size() && i < kMaxListed; ++i) {
      ordered_json row;
      row["parity_index"] = violations[i].parity_index;
      row["substripe"] = violations[i].sub == pbrs::Sub::a ? "a" : "b";
      row["position"] = violations[i].position;
      out["violations"].push_back(std::move(row));
    }
    out["truncated"] = violations.size() > kMaxListed;
    std::cout << out.dump(2) << "\n";
  } else if (violations.empty()) {
    std::cout << "ok: all parity equations hold\n";
  } else {
    std::cout << violations.size() << " violated parity equation(s)\n";
    for (std::size_t i = 0; i < violations.size() && i < 20; ++i)
      std::cout << "  parity " << violations[i].parity_index << ", substripe "
                << (violations[i].sub == pbrs::Sub::a ? 'a' : 'b') << ", position "
                << violations[i].position << "\n";
    if (violations.size() > 20) std::cout << "  ...\n";
  }
  return violations.empty() ? kExitOk : kExitViolations;
}

struct SimulateArgs {
  std::string config, trace, out_json, out_csv;
  std::string format = "human";
  std::string start_date;
  int days = -1;
  std::int64_t seed = -1, placement_seed = -1;
  int blocks_per_node = -1;
  std::int64_t block_bytes = -1;
  int racks = -1, nodes_per_rack = -1;
  std::int64_t multiplier = -1;
  double singles_per_day = -1.0;
};

int cmd_simulate(const SimulateArgs& args) {
  pbrs::RunConfig config;
  if (!args.config.empty()) config = pbrs::load_run_config(args.config);
  if (args.days >= 0) config.gen.days = args.days;
  if (args.seed >= 0) config.gen.seed = static_cast<std::uint64_t>(args.seed);
  if (args.placement_seed >= 0)
    config.placement_seed = static_cast<std::uint64_t>(args.placement_seed);
  if (args.blocks_per_node > 0) config.gen.blocks_per_node = args.blocks_per_node;
  if (args.block_bytes > 0) config.block_bytes = static_cast<std::uint64_t>(args.block_bytes);
  if (args.racks > 0) config.topology.racks = args.racks;
  if (args.nodes_per_rack > 0) config.topology.nodes_per_rack = args.nodes_per_rack;
  if (args.multiplier > 0) config.scale_multiplier = static_cast<std::uint64_t>(args.multiplier);
  if (args.singles_per_day >= 0.0) config.gen.singles_per_day = args.singles_per_day;
  if (!args.start_date.empty())
    config.gen.start_day = pbrs::parse_iso_date(args.start_date);
  else if (args.config.empty())
    config.gen.start_day = pbrs::parse_iso_date("2026-06-01");
  if (config.partition.groups.empty() && config.params.r >= 2)
    config.partition = pbrs::default_partition(config.params);

  const std::vector<pbrs::FailureEvent> events =
      args.trace.empty() ? pbrs::generate_trace(config.gen, config.topology, config.params)
                         : pbrs::ingest_trace_file(args.trace);

  const pbrs::Placement placement = pbrs::place_stripes(
      config.topology, config.stripe_count(), config.params, config.placement_seed);
  const pbrs::TrafficReport report =
      pbrs::simulate(config.topology, placement, events, config.cost_model());

  if (!args.out_json.empty()) pbrs::save_report_json(report, args.out_json);
  if (!args.out_csv.empty()) pbrs::save_report_csv(report, args.out_csv);

  if (args.format == "json") {
    std::cout << pbrs::report_to_json_text(report);
    std::cerr << pbrs::report_summary_text(report);
  } else if (args.format == "csv") {
    std::cout << pbrs::report_to_csv_text(report);
    std::cerr << pbrs::report_summary_text(report);
  } else {
    std::cout << pbrs::report_summary_text(report);
  }
  return kExitOk;
}

struct GenTraceArgs {
  std::string out = "-";
  int days = 30;
  double median_daily_failures = 955.0;
  int blocks_per_node = 36;
  std::uint64_t seed = 1;
  int racks = 15, nodes_per_rack = 2;
  int k = 10, r = 4;
  double double_ratio = 0.019066;
  double triple_events = 1.0;
  double noise_per_day = 8.0;
  std::string start_date = "2026-06-01";
};

int cmd_gen_trace(const GenTraceArgs& args) {
  pbrs::TraceGenConfig gen;
  gen.days = args.days;
  gen.singles_per_day = args.median_daily_failures;
  gen.blocks_per_node = args.blocks_per_node;
  gen.seed = args.seed;
  gen.double_ratio = args.double_ratio;
  gen.triple_events_total = args.triple_events;
  gen.noise_per_day = args.noise_per_day;
  gen.start_day = pbrs::parse_iso_date(args.start_date);

  const pbrs::ClusterTopology topology{args.racks, args.nodes_per_rack, 0};
  const auto events =
      pbrs::generate_trace(gen, topology, pbrs::CodeParams(args.k, args.r));

  if (args.out == "-") {
    pbrs::write_trace_csv(std::cout, events);
  } else {
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw pbrs::IoError("cannot create " + args.out);
    pbrs::write_trace_csv(out, events);
    if (!out) throw pbrs::IoError("short write to " + args.out);
    std::cerr << "wrote " << events.size() << " events to " << args.out << "\n";
  }
  return kExitOk;
}

struct ReportArgs {
  std::string in, out_csv;
  std::string format = "human";
};

int cmd_report(const ReportArgs& args) {
  const pbrs::TrafficReport report = pbrs::report_from_json_file(args.in);
  if (!args.out_csv.empty()) pbrs::save_report_csv(report, args.out_csv);
  if (args.format == "json")
    std::cout << pbrs::report_to_json_text(report);
  else if (args.format == "csv")
    std::cout << pbrs::report_to_csv_text(report);
  else
    std::cout << pbrs::report_summary_text(report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byte-level (k,r) erasure-coding toolkit with piggybacked repair "
               "and a trace-driven cross-rack traffic simulator"};
  app.require_subcommand(1);

  const auto format_check = CLI::IsMember({"json", "human"});
  const auto format_check_csv = CLI::IsMember({"json", "csv", "human"});
  const auto exec_check = CLI::IsMember({"serial", "parallel"});

  EncodeArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Split a file into coded stripes on disk");
  enc_cmd->add_option("--input", enc.input, "file to encode")->required()
      ->check(CLI::ExistingFile);
  enc_cmd->add_option("--out", enc.out_dir, "output directory")->required();
  enc_cmd->add_option("--codec", enc.codec, "rs | piggybacked-rs")
      ->check(CLI::IsMember({"rs", "piggybacked-rs", "pb"}));
  enc_cmd->add_option("-k", enc.k, "data blocks per stripe");
  enc_cmd->add_option("-r", enc.r, "parity blocks per stripe");
  enc_cmd->add_option("--block-size", enc.block_size, "block size in bytes");
  enc_cmd->add_option("--partition", enc.partition,
                      "piggyback groups, e.g. '0,1,2,3;4,5,6;7,8,9'");
  enc_cmd->add_option("--prefix", enc.prefix, "stripe id prefix (default: input stem)");
  enc_cmd->add_option("--exec", enc.exec, "kernel execution")->check(exec_check);
  enc_cmd->add_option("--format", enc.format, "json | human")->check(format_check);

  RepairArgs rep;
  auto* rep_cmd = app.add_subcommand("repair", "Rebuild one missing block of a stripe");
  rep_cmd->add_option("--manifest", rep.manifest, "stripe manifest path")->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--missing", rep.missing, "block index to rebuild")->required();
  rep_cmd->add_option("--out", rep.out, "write the block here (default: manifest path)");
  rep_cmd->add_option("--exec", rep.exec, "kernel execution")->check(exec_check);
  rep_cmd->add_option("--format", rep.format, "json | human")->check(format_check);

  VerifyArgs ver;
  auto* ver_cmd = app.add_subcommand("verify", "Check every parity equation of a stripe");
  ver_cmd->add_option("--manifest", ver.manifest, "stripe manifest path")->required()
      ->check(CLI::ExistingFile);
  ver_cmd->add_option("--sample", ver.sample,
                      "check this many random positions instead of all");
  ver_cmd->add_option("--seed", ver.seed, "sampling seed");
  ver_cmd->add_option("--exec", ver.exec, "kernel execution")->check(exec_check);
  ver_cmd->add_option("--format", ver.format, "json | human")->check(format_check);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Replay or synthesize a failure trace and account repair traffic");
  sim_cmd->add_option("--config", sim.config, "run configuration JSON")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--trace", sim.trace, "failure trace CSV (otherwise synthesized)")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", sim.out_json, "write the report JSON here");
  sim_cmd->add_option("--csv", sim.out_csv, "write the per-day CSV here");
  sim_cmd->add_option("--days", sim.days, "override trace length");
  sim_cmd->add_option("--seed", sim.seed, "override trace seed");
  sim_cmd->add_option("--placement-seed", sim.placement_seed, "override placement seed");
  sim_cmd->add_option("--blocks-per-node", sim.blocks_per_node, "override blocks per node");
  sim_cmd->add_option("--block-bytes", sim.block_bytes, "override block byte size");
  sim_cmd->add_option("--racks", sim.racks, "override rack count");
  sim_cmd->add_option("--nodes-per-rack", sim.nodes_per_rack, "override nodes per rack");
  sim_cmd->add_option("--multiplier", sim.multiplier, "override scale multiplier");
  sim_cmd->add_option("--start-date", sim.start_date, "override first day, YYYY-MM-DD");
  sim_cmd->add_option("--median-daily-failures", sim.singles_per_day,
                      "override target single-block repairs per day");
  sim_cmd->add_option("--format", sim.format, "json | csv | human")->check(format_check_csv);

  GenTraceArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-trace", "Write a synthetic failure trace CSV");
  gen_cmd->add_option("--out", gen.out, "output path, '-' for stdout");
  gen_cmd->add_option("--days", gen.days, "trace length in days");
  gen_cmd->add_option("--median-daily-failures", gen.median_daily_failures,
                      "target single-block repairs per day");
  gen_cmd->add_option("--blocks-per-node", gen.blocks_per_node, "blocks hosted per machine");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--racks", gen.racks, "rack count");
  gen_cmd->add_option("--nodes-per-rack", gen.nodes_per_rack, "nodes per rack");
  gen_cmd->add_option("-k", gen.k, "data blocks per stripe");
  gen_cmd->add_option("-r", gen.r, "parity blocks per stripe");
  gen_cmd->add_option("--double-ratio", gen.double_ratio,
                      "target two-missing / one-missing stripe ratio");
  gen_cmd->add_option("--triple-events", gen.triple_events,
                      "simultaneous 3-machine events per run");
  gen_cmd->add_option("--noise-per-day", gen.noise_per_day,
                      "sub-threshold unavailability events per day");
  gen_cmd->add_option("--start-date", gen.start_date, "first day, YYYY-MM-DD");

  ReportArgs rpt;
  auto* rpt_cmd = app.add_subcommand("report", "Format or convert a saved report");
  rpt_cmd->add_option("--in", rpt.in, "report JSON path")->required()
      ->check(CLI::ExistingFile);
  rpt_cmd->add_option("--csv", rpt.out_csv, "export the per-day CSV here");
  rpt_cmd->add_option("--format", rpt.format, "json | csv | human")->check(format_check_csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (enc_cmd->parsed()) return cmd_encode(enc);
    if (rep_cmd->parsed()) return cmd_repair(rep);
    if (ver_cmd->parsed()) return cmd_verify(ver);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (gen_cmd->parsed()) return cmd_gen_trace(gen);
    if (rpt_cmd->parsed()) return cmd_report(rpt);
  } catch (const pbrs::ParseError& e) {
    std::cerr << "trace parse error: " << e.what() << "\n";
    return kExitTraceParse;
  } catch (const pbrs::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const pbrs::Unrecoverable& e) {
    std::cerr << "unrecoverable: " << e.what() << "\n";
    return kExitUnrecoverable;
  } catch (const pbrs::CorruptSource& e) {
    std::cerr << "corrupt source: " << e.what() << "\n";
    return kExitUnrecoverable;
  } catch (const pbrs::InsufficientSymbols& e) {
    std::cerr << "unrecoverable: " << e.what() << "\n";
    return kExitUnrecoverable;
  } catch (const pbrs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

#include "pbrs/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "pbrs/timeutil.hpp"

namespace pbrs {

namespace {

using nlohmann::ordered_json;

std::string tb(std::uint64_t bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(bytes) / 1e12);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out << text;
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + ": " + ec.message());
}

}  // namespace

std::string report_to_json_text(const TrafficReport& report) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["code"]["k"] = report.model.params.k;
  doc["code"]["r"] = report.model.params.r;
  doc["code"]["partition"] = partition_to_json(report.model.partition);
  doc["block_bytes"] = report.model.block_bytes;
  doc["scale_multiplier"] = report.model.scale_multiplier;
  doc["flat_single_savings"] = report.model.flat_single_savings;
  doc["flag_delay_seconds"] = report.model.flag_delay_seconds;

  doc["days"] = ordered_json::array();
  for (const auto& d : report.days) {
    ordered_json row;
    row["day"] = format_iso_date(d.day);
    row["unavailable_machines"] = d.unavailable_machines;
    row["blocks_repaired"] = d.blocks_repaired;
    row["stripes_repaired"] = d.stripes_repaired;
    row["missing_one"] = d.missing_one;
    row["missing_two"] = d.missing_two;
    row["missing_three_plus"] = d.missing_three_plus;
    row["rs_bytes"] = d.rs_bytes;
    row["pb_bytes"] = d.pb_bytes;
    row["savings_bytes"] = d.savings_bytes;
    row["pb_flat_bytes"] = d.pb_flat_bytes;
    row["savings_flat_bytes"] = d.savings_flat_bytes;
    doc["days"].push_back(std::move(row));
  }

  const TrafficSummary& s = report.summary;
  ordered_json& sum = doc["summary"];
  sum["median_unavailable_machines"] = s.median_unavailable_machines;
  sum["median_blocks_repaired"] = s.median_blocks_repaired;
  sum["median_rs_bytes"] = s.median_rs_bytes;
  sum["median_pb_bytes"] = s.median_pb_bytes;
  sum["median_savings_bytes"] = s.median_savings_bytes;
  sum["median_savings_flat_bytes"] = s.median_savings_flat_bytes;
  sum["total_blocks_repaired"] = s.total_blocks_repaired;
  sum["total_rs_bytes"] = s.total_rs_bytes;
  sum["total_pb_bytes"] = s.total_pb_bytes;
  sum["total_savings_bytes"] = s.total_savings_bytes;
  sum["total_savings_flat_bytes"] = s.total_savings_flat_bytes;
  sum["total_missing_one"] = s.total_missing_one;
  sum["total_missing_two"] = s.total_missing_two;
  sum["total_missing_three_plus"] = s.total_missing_three_plus;
  sum["savings_pct"] = s.savings_pct;
  sum["savings_flat_pct"] = s.savings_flat_pct;

  const MissingDistribution dist = summarize_missing_distribution(report);
  sum["missing_distribution_pct"]["one"] = dist.pct_one;
  sum["missing_distribution_pct"]["two"] = dist.pct_two;
  sum["missing_distribution_pct"]["three_plus"] = dist.pct_three_plus;

  return doc.dump(2) + "\n";
}

std::string report_to_csv_text(const TrafficReport& report) {
  std::ostringstream out;
  out << "day,unavailable_machines,blocks_repaired,rs_bytes,pb_bytes,savings_bytes\n";
  for (const auto& d : report.days)
    out << format_iso_date(d.day) << ',' << d.unavailable_machines << ','
        << d.blocks_repaired << ',' << d.rs_bytes << ',' << d.pb_bytes << ','
        << d.savings_bytes << '\n';
  return out.str();
}

std::string report_summary_text(const TrafficReport& report) {
  const TrafficSummary& s = report.summary;
  const MissingDistribution dist = summarize_missing_distribution(report);
  std::ostringstream out;
  out << "days simulated:            " << report.days.size() << "\n"
      << "median blocks repaired/day: " << s.median_blocks_repaired << "\n"
      << "median RS traffic/day:      " << tb(s.median_rs_bytes) << " TB\n"
      << "median PB traffic/day:      " << tb(s.median_pb_bytes) << " TB\n"
      << "median savings/day:         " << tb(s.median_savings_bytes)
      << " TB (implemented-code cost model)\n"
      << "median savings/day:         " << tb(s.median_savings_flat_bytes)
      << " TB (flat 30% single-repair model)\n";
  char pct[64];
  std::snprintf(pct, sizeof pct, "%.2f%% implemented, %.2f%% flat-model", s.savings_pct,
                s.savings_flat_pct);
  out << "run savings:                " << pct << "\n";
  char distbuf[96];
  std::snprintf(distbuf, sizeof distbuf, "%.2f%% / %.2f%% / %.2f%%", dist.pct_one,
                dist.pct_two, dist.pct_three_plus);
  out << "stripes missing 1/2/3+:     " << distbuf << "\n";
  if (report.model.scale_multiplier != 1)
    out << "figures scaled x" << report.model.scale_multiplier
        << " to full-cluster equivalents\n";
  return out.str();
}

TrafficReport report_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const std::exception& e) {
    throw Error("report parse (" + path.string() + "): " + std::string(e.what()));
  }

  TrafficReport report;
  try {
    report.model.params =
        CodeParams(doc.at("code").at("k").get<int>(), doc.at("code").at("r").get<int>());
    report.model.partition = partition_from_json(doc.at("code").at("partition"));
    report.model.block_bytes = doc.at("block_bytes").get<std::uint64_t>();
    report.model.scale_multiplier = doc.at("scale_multiplier").get<std::uint64_t>();
    report.model.flat_single_savings = doc.at("flat_single_savings").get<double>();
    report.model.flag_delay_seconds = doc.at("flag_delay_seconds").get<std::int64_t>();

    for (const auto& row : doc.at("days")) {
      DayStats d;
      d.day = parse_iso_date(row.at("day").get<std::string>());
      d.unavailable_machines = row.at("unavailable_machines").get<std::uint64_t>();
      d.blocks_repaired = row.at("blocks_repaired").get<std::uint64_t>();
      d.stripes_repaired = row.at("stripes_repaired").get<std::uint64_t>();
      d.missing_one = row.at("missing_one").get<std::uint64_t>();
      d.missing_two = row.at("missing_two").get<std::uint64_t>();
      d.missing_three_plus = row.at("missing_three_plus").get<std::uint64_t>();
      d.rs_bytes = row.at("rs_bytes").get<std::uint64_t>();
      d.pb_bytes = row.at("pb_bytes").get<std::uint64_t>();
      d.savings_bytes = row.at("savings_bytes").get<std::uint64_t>();
      d.pb_flat_bytes = row.at("pb_flat_bytes").get<std::uint64_t>();
      d.savings_flat_bytes = row.at("savings_flat_bytes").get<std::uint64_t>();
      report.days.push_back(d);
    }

    const auto& sum = doc.at("summary");
    TrafficSummary& s = report.summary;
    s.median_unavailable_machines = sum.at("median_unavailable_machines").get<std::uint64_t>();
    s.median_blocks_repaired = sum.at("median_blocks_repaired").get<std::uint64_t>();
    s.median_rs_bytes = sum.at("median_rs_bytes").get<std::uint64_t>();
    s.median_pb_bytes = sum.at("median_pb_bytes").get<std::uint64_t>();
    s.median_savings_bytes = sum.at("median_savings_bytes").get<std::uint64_t>();
    s.median_savings_flat_bytes = sum.at("median_savings_flat_bytes").get<std::uint64_t>();
    s.total_blocks_repaired = sum.at("total_blocks_repaired").get<std::uint64_t>();
    s.total_rs_bytes = sum.at("total_rs_bytes").get<std::uint64_t>();
    s.total_pb_bytes = sum.at("total_pb_bytes").get<std::uint64_t>();
    s.total_savings_bytes = sum.at("total_savings_bytes").get<std::uint64_t>();
    s.total_savings_flat_bytes = sum.at("total_savings_flat_bytes").get<std::uint64_t>();
    s.total_missing_one = sum.at("total_missing_one").get<std::uint64_t>();
    s.total_missing_two = sum.at("total_missing_two").get<std::uint64_t>();
    s.total_missing_three_plus = sum.at("total_missing_three_plus").get<std::uint64_t>();
    s.savings_pct = sum.at("savings_pct").get<double>();
    s.savings_flat_pct = sum.at("savings_flat_pct").get<double>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("report schema (" + path.string() + "): " + std::string(e.what()));
  }
  return report;
}

void save_report_json(const TrafficReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json_text(report));
}

void save_report_csv(const TrafficReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_csv_text(report));
}

}  // namespace pbrs

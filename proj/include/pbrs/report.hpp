#pragma once

#include <filesystem>
#include <string>

#include "pbrs/cluster_sim.hpp"

namespace pbrs {

// Serialization for traffic reports. The JSON document round-trips; the CSV
// export carries the per-day columns day, unavailable_machines,
// blocks_repaired, rs_bytes, pb_bytes, savings_bytes.
std::string report_to_json_text(const TrafficReport& report);
std::string report_to_csv_text(const TrafficReport& report);

// Multi-line human summary: daily medians, run totals, savings percentages,
// missing-block distribution.
std::string report_summary_text(const TrafficReport& report);

TrafficReport report_from_json_file(const std::filesystem::path& path);
void save_report_json(const TrafficReport& report, const std::filesystem::path& path);
void save_report_csv(const TrafficReport& report, const std::filesystem::path& path);

}  // namespace pbrs

#pragma once

#include "json.hpp"
#include "pbrs/piggyback.hpp"

namespace pbrs {

inline nlohmann::ordered_json partition_to_json(const GroupPartition& partition) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& group : partition.groups) arr.push_back(group);
  return arr;
}

inline GroupPartition partition_from_json(const nlohmann::json& arr) {
  GroupPartition partition;
  for (const auto& group : arr) partition.groups.push_back(group.get<std::vector<int>>());
  return partition;
}

}  // namespace pbrs

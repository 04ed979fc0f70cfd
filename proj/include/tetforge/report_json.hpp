#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "tetforge/driver.hpp"
#include "tetforge/metrics.hpp"

namespace tetforge {

inline nlohmann::json to_json(const GlobalMetrics& g) {
  nlohmann::json hist = nlohmann::json::array();
  for (int b = 0; b < kHistogramBins; ++b)
    hist.push_back({{"bin_start_deg", 10 * b}, {"bin_end_deg", 10 * (b + 1)}, {"count", g.histogram[b]}});
  return {{"total_volume", g.total_volume},
          {"total_surface_area", g.total_surface_area},
          {"q_min", g.q_min},
          {"worst_tet_id", g.worst_tet},
          {"min_dihedral", g.min_dihedral},
          {"max_dihedral", g.max_dihedral},
          {"inverted_tets", g.inverted},
          {"dihedral_histogram", hist}};
}

inline nlohmann::json to_json(const PassRecord& r) {
  return {{"stage", r.stage},
          {"pass", r.pass},
          {"b", r.b},
          {"gamma", r.gamma},
          {"q_min_start", r.q_min_start},
          {"q_min", r.q_min},
          {"min_dihedral", r.min_dihedral},
          {"max_dihedral", r.max_dihedral},
          {"volume", r.volume},
          {"volume_drift_percent", r.volume_drift_percent},
          {"seconds", r.seconds},
          {"patches", r.patches},
          {"stalled_patches", r.stalled},
          {"accepted_steps", r.accepted_steps},
          {"barrier_violations", r.barrier_violations}};
}

inline nlohmann::json to_json(const OptimizationReport& rep) {
  nlohmann::json passes = nlohmann::json::array();
  for (const auto& p : rep.passes) passes.push_back(to_json(p));
  return {{"passes", passes},
          {"initial", to_json(rep.initial)},
          {"final", to_json(rep.final)},
          {"initial_volume", rep.initial_volume},
          {"final_volume", rep.final_volume},
          {"volume_drift_percent", rep.volume_drift_percent},
          {"seconds", rep.seconds},
          {"stalled_patches", rep.stalled_patches},
          {"demoted_vertices", rep.demoted_vertices}};
}

/// `bin_start_deg,bin_end_deg,count`, one row per 10 degree bin.
inline std::string histogram_csv(const DihedralHistogram& h) {
  std::string out = "bin_start_deg,bin_end_deg,count\n";
  for (int b = 0; b < kHistogramBins; ++b)
    out += std::to_string(10 * b) + "," + std::to_string(10 * (b + 1)) + "," + std::to_string(h[b]) + "\n";
  return out;
}

}  // namespace tetforge

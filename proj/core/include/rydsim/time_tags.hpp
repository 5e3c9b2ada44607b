#pragma once

#include <filesystem>
#include <string>

#include "rydsim/detection.hpp"

// TimeTagStream serialisation: a CSV with header `detector,trial,t_us`
// (t in microseconds, six decimals) plus a JSON sidecar `<csv>.meta.json`
// holding trial_count, trial_period_us, seed, scenario_id, scenario_hash
// and per-detector click counts.
namespace rydsim::detect {

std::string stream_to_csv(const TimeTagStream& stream);
TimeTagStream stream_from_csv(std::string_view csv);

std::string stream_metadata_json(const TimeTagStream& stream, const std::string& scenario_hash);

/// Writes `path` and `path` + ".meta.json".
void write_stream(const std::filesystem::path& path, const TimeTagStream& stream,
                  const std::string& scenario_hash);

/// Reads the CSV and, when present, its sidecar (for trial_count etc.).
/// Without a sidecar trial_count is one past the last tagged trial.
TimeTagStream read_stream(const std::filesystem::path& path);

}  // namespace rydsim::detect

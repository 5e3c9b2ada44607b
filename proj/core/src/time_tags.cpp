#include "rydsim/time_tags.hpp"

#include <array>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "rydsim/text_format.hpp"

namespace rydsim::detect {

std::string stream_to_csv(const TimeTagStream& stream) {
  std::string out = "detector,trial,t_us\n";
  out.reserve(out.size() + stream.tags.size() * 24);
  char buf[64];
  for (const auto& tag : stream.tags) {
    const int n = std::snprintf(buf, sizeof buf, "%s,%llu,%.6f\n", to_string(tag.detector).data(),
                                static_cast<unsigned long long>(tag.trial), tag.t_us);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

TimeTagStream stream_from_csv(std::string_view csv) {
  TimeTagStream stream;
  std::size_t pos = 0;
  bool header = true;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "detector,trial,t_us") throw std::invalid_argument("time-tag CSV must start with 'detector,trial,t_us'");
      header = false;
      continue;
    }
    const auto cols = text::split(line, ',');
    if (cols.size() != 3) throw std::invalid_argument("time-tag CSV line " + std::to_string(line_no) + ": expected 3 columns");
    stream.tags.push_back({parse_detector(cols[0]), text::parse_u64(cols[1]), text::parse_double(cols[2])});
  }
  if (header) throw std::invalid_argument("time-tag CSV is empty");
  if (!stream.is_sorted()) throw std::invalid_argument("time-tag CSV is not sorted by (trial, t)");
  stream.trial_count = stream.tags.empty() ? 0 : stream.tags.back().trial + 1;
  return stream;
}

std::string stream_metadata_json(const TimeTagStream& stream, const std::string& scenario_hash) {
  std::array<std::uint64_t, 4> counts{};
  for (const auto& t : stream.tags) ++counts[static_cast<std::size_t>(t.detector) - 1];
  nlohmann::ordered_json j;
  j["scenario_id"] = stream.scenario_id;
  j["scenario_hash"] = scenario_hash;
  j["seed"] = stream.seed;
  j["trial_count"] = stream.trial_count;
  j["trial_period_us"] = stream.trial_period_us;
  j["counts"] = {{"D1", counts[0]}, {"D2", counts[1]}, {"D3", counts[2]}, {"D4", counts[3]}};
  return j.dump(2) + "\n";
}

void write_stream(const std::filesystem::path& path, const TimeTagStream& stream, const std::string& scenario_hash) {
  text::write_file(path, stream_to_csv(stream));
  text::write_file(path.string() + ".meta.json", stream_metadata_json(stream, scenario_hash));
}

TimeTagStream read_stream(const std::filesystem::path& path) {
  TimeTagStream stream = stream_from_csv(text::read_file(path));
  const std::filesystem::path meta = path.string() + ".meta.json";
  if (std::filesystem::exists(meta)) {
    const auto j = nlohmann::json::parse(text::read_file(meta));
    stream.trial_count = j.at("trial_count").get<std::uint64_t>();
    stream.trial_period_us = j.at("trial_period_us").get<double>();
    stream.seed = j.at("seed").get<std::uint64_t>();
    stream.scenario_id = j.at("scenario_id").get<std::string>();
    if (!stream.tags.empty() && stream.tags.back().trial >= stream.trial_count)
      throw std::invalid_argument("time-tag CSV has trials beyond the sidecar trial_count");
  }
  return stream;
}

}  // namespace rydsim::detect

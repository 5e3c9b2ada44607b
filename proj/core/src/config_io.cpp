#include "rydsim/config_io.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "rydsim/errors.hpp"
#include "rydsim/text_format.hpp"

namespace rydsim::config {
namespace {

using json = nlohmann::ordered_json;

using FieldRef = std::variant<double*, int*, std::uint64_t*, std::string*, std::optional<double>*,
                              std::vector<double>*, SiteBMode*, HbtArm*>;

struct Field {
  std::string section;  ///< empty for top-level keys
  std::string key;
  FieldRef ref;
};

// Single source of truth for the file layout.
std::vector<Field> fields(ScenarioConfig& c) {
  return {
      {"", "id", &c.id},
      {"", "n_trials", &c.n_trials},
      {"", "seed", &c.seed},
      {"", "site_b", &c.site_b},
      {"", "hbt", &c.hbt},
      {"source", "p", &c.source.p},
      {"source", "eta_w", &c.source.eta_w},
      {"source", "eta_r", &c.source.eta_r},
      {"source", "eta_a", &c.source.eta_a},
      {"source", "p_se", &c.source.p_se},
      {"source", "p_nw", &c.source.p_nw},
      {"source", "p_nr", &c.source.p_nr},
      {"source", "tau_dlcz_us", &c.source.tau_dlcz_us},
      {"source", "n_max", &c.source.n_max},
      {"medium", "od", &c.medium.od},
      {"medium", "gamma_mhz", &c.medium.gamma_mhz},
      {"medium", "omega_c_mhz", &c.medium.omega_c_mhz},
      {"medium", "gamma_gr_mhz", &c.medium.gamma_gr_mhz},
      {"medium", "k_p_per_m", &c.medium.k_p_per_m},
      {"medium", "length_m", &c.medium.length_m},
      {"storage", "eta0", &c.storage.eta0},
      {"storage", "tau_r_us", &c.storage.tau_r_us},
      {"storage", "delta_f_khz", &c.storage.delta_f_khz},
      {"storage", "p_f1", &c.storage.p_f1},
      {"storage", "t_off_us", &c.storage.t_off_us},
      {"saturation", "n_max", &c.saturation.n_max},
      {"saturation", "t_lin", &c.saturation.t_lin},
      {"timing", "write_center_us", &c.timing.write_center_us},
      {"timing", "t_a_us", &c.timing.t_a_us},
      {"timing", "t_b_us", &c.timing.t_b_us},
      {"timing", "trial_period_us", &c.timing.trial_period_us},
      {"waveforms", "write_fwhm_us", &c.waveforms.write_fwhm_us},
      {"waveforms", "read_fwhm_us", &c.waveforms.read_fwhm_us},
      {"waveforms", "bin_us", &c.waveforms.bin_us},
      {"slow_light", "transmission", &c.slow_light.transmission},
      {"slow_light", "leak_fraction", &c.slow_light.leak_fraction},
      {"slow_light", "delay_us", &c.slow_light.delay_us},
      {"read_noise", "prob", &c.read_noise.prob},
      {"read_noise", "center_offset_us", &c.read_noise.center_offset_us},
      {"read_noise", "fwhm_us", &c.read_noise.fwhm_us},
      {"detectors.d1", "efficiency", &c.detectors.d1.efficiency},
      {"detectors.d1", "dark_prob_per_gate", &c.detectors.d1.dark_prob_per_gate},
      {"detectors.d1", "gate_width_us", &c.detectors.d1.gate_width_us},
      {"detectors.d2", "efficiency", &c.detectors.d2.efficiency},
      {"detectors.d2", "dark_prob_per_gate", &c.detectors.d2.dark_prob_per_gate},
      {"detectors.d2", "gate_width_us", &c.detectors.d2.gate_width_us},
      {"detectors.d3", "efficiency", &c.detectors.d3.efficiency},
      {"detectors.d3", "dark_prob_per_gate", &c.detectors.d3.dark_prob_per_gate},
      {"detectors.d3", "gate_width_us", &c.detectors.d3.gate_width_us},
      {"detectors.d4", "efficiency", &c.detectors.d4.efficiency},
      {"detectors.d4", "dark_prob_per_gate", &c.detectors.d4.dark_prob_per_gate},
      {"detectors.d4", "gate_width_us", &c.detectors.d4.gate_width_us},
      {"windows", "write_width_us", &c.windows.write_width_us},
      {"windows", "read_width_us", &c.windows.read_width_us},
      {"windows", "n_accidental_peaks", &c.windows.n_accidental_peaks},
      {"windows", "read_center_us", &c.windows.read_center_us},
      {"sweep", "variable", &c.sweep.variable},
      {"sweep", "values", &c.sweep.values},
  };
}

std::string dotted(const Field& f) { return f.section.empty() ? f.key : f.section + "." + f.key; }

constexpr std::pair<SiteBMode, const char*> kSiteBNames[] = {
    {SiteBMode::kBypass, "bypass"}, {SiteBMode::kSlowLight, "slow_light"}, {SiteBMode::kStorage, "storage"}};
constexpr std::pair<HbtArm, const char*> kHbtNames[] = {
    {HbtArm::kNone, "none"}, {HbtArm::kRead, "read"}, {HbtArm::kWrite, "write"}};

template <typename E, std::size_t N>
std::string enum_name(E v, const std::pair<E, const char*> (&names)[N]) {
  for (const auto& [e, s] : names)
    if (e == v) return s;
  return "?";
}

template <typename E, std::size_t N>
E enum_value(const std::string& s, const std::pair<E, const char*> (&names)[N]) {
  std::string allowed;
  for (const auto& [e, n] : names) {
    if (s == n) return e;
    allowed += allowed.empty() ? n : std::string(", ") + n;
  }
  throw std::invalid_argument("expected one of {" + allowed + "}, got '" + s + "'");
}

// nlohmann writes doubles as the shortest round-trip form.
json number(double x) { return json(x); }

json to_json_value(const FieldRef& ref) {
  return std::visit(
      [](auto* p) -> json {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          return number(*p);
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          return p->has_value() ? number(**p) : json(nullptr);
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          json a = json::array();
          for (double v : *p) a.push_back(number(v));
          return a;
        } else if constexpr (std::is_same_v<T, SiteBMode>) {
          return enum_name(*p, kSiteBNames);
        } else if constexpr (std::is_same_v<T, HbtArm>) {
          return enum_name(*p, kHbtNames);
        } else {
          return *p;
        }
      },
      ref);
}

double as_double(const json& v) {
  if (!v.is_number()) throw std::invalid_argument("expected a number");
  return v.get<double>();
}

void from_json_value(const json& v, const FieldRef& ref) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          *p = as_double(v);
        } else if constexpr (std::is_same_v<T, int>) {
          if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
          *p = v.get<int>();
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          if (!v.is_number_unsigned()) throw std::invalid_argument("expected a non-negative integer");
          *p = v.get<std::uint64_t>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) throw std::invalid_argument("expected a string");
          *p = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (v.is_null()) {
            p->reset();
          } else {
            *p = as_double(v);
          }
        } else if constexpr (std::is_same_v<T, std::vector<double>>) {
          if (!v.is_array()) throw std::invalid_argument("expected an array of numbers");
          p->clear();
          for (const auto& e : v) p->push_back(as_double(e));
        } else if constexpr (std::is_same_v<T, SiteBMode>) {
          if (!v.is_string()) throw std::invalid_argument("expected a string");
          *p = enum_value(v.get<std::string>(), kSiteBNames);
        } else if constexpr (std::is_same_v<T, HbtArm>) {
          if (!v.is_string()) throw std::invalid_argument("expected a string");
          *p = enum_value(v.get<std::string>(), kHbtNames);
        }
      },
      ref);
}

// Locates the JSON object holding `section` ("detectors.d1" is nested).
const json* find_section(const json& root, const std::string& section) {
  if (section.empty()) return &root;
  const json* node = &root;
  for (auto part : text::split(section, '.')) {
    auto it = node->find(std::string(part));
    if (it == node->end()) return nullptr;
    node = &*it;
  }
  return node;
}

json* make_section(json& root, const std::string& section) {
  json* node = &root;
  if (section.empty()) return node;
  for (auto part : text::split(section, '.')) node = &(*node)[std::string(part)];
  return node;
}

// Checks for keys that do not name a field, recursing into sections.
void check_unknown(const json& node, const std::string& prefix, const std::set<std::string>& known,
                   const std::set<std::string>& sections, std::vector<std::string>& diag) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (sections.count(path)) {
      if (!it->is_object()) {
        diag.push_back(path + ": expected an object");
      } else {
        check_unknown(*it, path, known, sections, diag);
      }
    } else if (!known.count(path)) {
      diag.push_back(path + ": unknown key");
    }
  }
}

const Field* find_field(const std::vector<Field>& fs, std::string_view path) {
  for (const auto& f : fs)
    if (dotted(f) == path) return &f;
  return nullptr;
}

bool is_numeric(const FieldRef& ref) {
  return std::holds_alternative<double*>(ref) || std::holds_alternative<int*>(ref) ||
         std::holds_alternative<std::uint64_t*>(ref) || std::holds_alternative<std::optional<double>*>(ref);
}

}  // namespace

ScenarioConfig parse(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("syntax error: ") + e.what()});
  }
  if (!root.is_object()) throw ConfigError({"top level must be an object"});

  ScenarioConfig cfg;
  auto fs = fields(cfg);
  std::set<std::string> known, sections;
  for (const auto& f : fs) {
    known.insert(dotted(f));
    if (!f.section.empty()) {
      std::string acc;
      for (auto part : text::split(f.section, '.')) {
        acc = acc.empty() ? std::string(part) : acc + "." + std::string(part);
        sections.insert(acc);
      }
    }
  }

  std::vector<std::string> diag;
  check_unknown(root, "", known, sections, diag);
  for (const auto& f : fs) {
    const json* sec = find_section(root, f.section);
    if (!sec || !sec->is_object()) continue;
    auto it = sec->find(f.key);
    if (it == sec->end()) continue;
    try {
      from_json_value(*it, f.ref);
    } catch (const std::exception& e) {
      diag.push_back(dotted(f) + ": " + e.what());
    }
  }
  if (!diag.empty()) throw ConfigError(std::move(diag));

  diag = validate(cfg);
  if (!cfg.sweep.variable.empty()) {
    const Field* f = find_field(fs, cfg.sweep.variable);
    if (!f || !is_numeric(f->ref))
      diag.push_back("sweep.variable: '" + cfg.sweep.variable + "' does not name a numeric config field");
  }
  if (!diag.empty()) throw ConfigError(std::move(diag));
  return cfg;
}

std::string serialize(const ScenarioConfig& cfg) {
  ScenarioConfig copy = cfg;
  json root = json::object();
  for (const auto& f : fields(copy)) (*make_section(root, f.section))[f.key] = to_json_value(f.ref);
  return root.dump(2) + "\n";
}

std::string scenario_hash(const ScenarioConfig& cfg) { return text::hex64(text::fnv1a64(serialize(cfg))); }

std::vector<std::string> numeric_paths() {
  ScenarioConfig c;
  std::vector<std::string> out;
  for (const auto& f : fields(c))
    if (is_numeric(f.ref)) out.push_back(dotted(f));
  return out;
}

void set_path(ScenarioConfig& cfg, std::string_view path, double value) {
  const auto fs = fields(cfg);
  const Field* f = find_field(fs, path);
  if (!f || !is_numeric(f->ref)) throw std::invalid_argument("'" + std::string(path) + "' is not a numeric config field");
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double> || std::is_same_v<T, std::optional<double>>) {
          *p = value;
        } else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
          if (value != std::floor(value) || value < 0.0)
            throw std::invalid_argument("'" + std::string(path) + "' needs a non-negative integer");
          *p = static_cast<T>(value);
        }
      },
      f->ref);
}

double get_path(const ScenarioConfig& cfg, std::string_view path) {
  ScenarioConfig copy = cfg;
  const auto fs = fields(copy);
  const Field* f = find_field(fs, path);
  if (!f || !is_numeric(f->ref)) throw std::invalid_argument("'" + std::string(path) + "' is not a numeric config field");
  return std::visit(
      [&](auto* p) -> double {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::optional<double>>) {
          return p->has_value() ? **p : std::nan("");
        } else if constexpr (std::is_arithmetic_v<T>) {
          return static_cast<double>(*p);
        } else {
          return std::nan("");
        }
      },
      f->ref);
}

ScenarioConfig sweep_point(const ScenarioConfig& cfg, double value) {
  ScenarioConfig out = cfg;
  set_path(out, cfg.sweep.variable, value);
  out.sweep = {};
  return out;
}

}  // namespace rydsim::config

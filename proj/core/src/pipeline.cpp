#include "rydsim/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "rydsim/config_io.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/presets.hpp"
#include "rydsim/text_format.hpp"
#include "rydsim/time_tags.hpp"

namespace rydsim::pipeline {
namespace {

using json = nlohmann::ordered_json;
using counting::CorrelationEstimate;
using counting::EstimateRow;
using detect::Detector;

constexpr const char* kToolName = "rydsim";
constexpr const char* kToolVersion = "0.1.0";

std::string point_label(const ScenarioConfig& cfg, std::size_t k) {
  if (cfg.sweep.variable.empty()) return cfg.id;
  return cfg.id + "[" + cfg.sweep.variable + "=" + text::format_double(cfg.sweep.values[k]) + "]";
}

std::string stream_name(const ScenarioConfig& cfg, std::size_t k) {
  if (cfg.sweep.variable.empty()) return "streams/stream.csv";
  char buf[48];
  std::snprintf(buf, sizeof buf, "streams/point_%03zu.csv", k);
  return buf;
}

json param_spec_json(const fit::ParamSpec& p) {
  json j;
  j["name"] = p.name;
  j["value"] = p.value;
  j["lower"] = p.lower;
  j["upper"] = p.upper;
  j["transform"] = std::string(fit::to_string(p.transform));
  j["fixed"] = p.fixed;
  return j;
}

fit::ParamSpec param_spec_from_json(const json& j) {
  fit::ParamSpec p;
  p.name = j.at("name").get<std::string>();
  p.value = j.at("value").get<double>();
  p.lower = j.at("lower").get<double>();
  p.upper = j.at("upper").get<double>();
  p.transform = fit::parse_transform(j.at("transform").get<std::string>());
  p.fixed = j.at("fixed").get<bool>();
  return p;
}

// Sweep points -> fit data; upper limits and zero-error points are dropped.
std::vector<fit::DataPoint> sweep_data(const std::vector<PointResult>& points, const std::string& quantity) {
  std::vector<fit::DataPoint> data;
  for (const auto& pt : points) {
    for (const auto& r : pt.rows) {
      if (r.quantity != quantity || r.estimate.upper_limit || !(r.estimate.sigma > 0.0)) continue;
      data.push_back({pt.x, r.estimate.value, r.estimate.sigma});
    }
  }
  return data;
}

}  // namespace

CorrelationEstimate click_probability(std::uint64_t k, std::uint64_t n) {
  if (n == 0) throw InsufficientStatistics("no trials");
  CorrelationEstimate e;
  const double nn = static_cast<double>(n);
  e.n_coinc = k;
  e.value = static_cast<double>(k) / nn;
  if (k == 0) {
    e.sigma = counting::kZeroCountUpperLimit / nn;
    e.upper_limit = true;
  } else {
    e.sigma = std::sqrt(e.value * (1.0 - e.value) / nn);
  }
  return e;
}

std::vector<EstimateRow> analyze(const detect::TimeTagStream& stream, const counting::WindowSpec& w, HbtArm hbt,
                                 const std::string& label, std::vector<std::string>* skipped) {
  w.validate();
  std::vector<EstimateRow> rows;
  auto add = [&](const std::string& q, auto&& compute) {
    try {
      rows.push_back({q, compute(), label});
    } catch (const InsufficientStatistics&) {
      if (skipped) skipped->push_back(q);
    } catch (const std::invalid_argument&) {
      if (skipped) skipped->push_back(q);
    }
  };
  const std::uint64_t n = stream.trial_count;
  auto clicks = [&](Detector d, const counting::Gate& g) { return counting::trials_with_click(stream, d, g).size(); };

  switch (hbt) {
    case HbtArm::kNone: {
      add("p_w", [&] { return click_probability(clicks(Detector::D1, w.write), n); });
      add("p_r", [&] { return click_probability(clicks(Detector::D2, w.read), n); });
      add("p_wr", [&] {
        return click_probability(counting::start_stop_histogram(stream, w.write, Detector::D1, w.read, Detector::D2, 1)
                                     .peak_counts[0],
                                 n);
      });
      add("g2_wr", [&] { return counting::g2_from_histogram(counting::start_stop_histogram(stream, w)); });
      add("p_r_given_w", [&] { return counting::conditional_retrieval(stream, w); });
      break;
    }
    case HbtArm::kRead: {
      add("p_w", [&] { return click_probability(clicks(Detector::D1, w.write), n); });
      add("alpha", [&] { return counting::antibunching_estimator(stream, w); });
      add("g2_rr", [&] { return counting::autocorrelation_estimator(stream, Detector::D3, Detector::D4, w.read); });
      add("g2_wr_D3", [&] {
        return counting::g2_from_histogram(counting::start_stop_histogram(stream, w, Detector::D1, Detector::D3));
      });
      add("g2_wr_D4", [&] {
        return counting::g2_from_histogram(counting::start_stop_histogram(stream, w, Detector::D1, Detector::D4));
      });
      break;
    }
    case HbtArm::kWrite: {
      add("p_w_D3", [&] { return click_probability(clicks(Detector::D3, w.write), n); });
      add("p_w_D4", [&] { return click_probability(clicks(Detector::D4, w.write), n); });
      add("g2_ww", [&] { return counting::autocorrelation_estimator(stream, Detector::D3, Detector::D4, w.write); });
      add("g2_wr_D3", [&] {
        return counting::g2_from_histogram(counting::start_stop_histogram(stream, w, Detector::D3, Detector::D2));
      });
      add("g2_wr_D4", [&] {
        return counting::g2_from_histogram(counting::start_stop_histogram(stream, w, Detector::D4, Detector::D2));
      });
      break;
    }
  }
  return rows;
}

const CorrelationEstimate& find_estimate(const std::vector<EstimateRow>& rows, std::string_view quantity) {
  for (const auto& r : rows)
    if (r.quantity == quantity) return r.estimate;
  throw InsufficientStatistics("not enough counts to estimate " + std::string(quantity));
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  require_valid(cfg);
  if (options.fit && cfg.sweep.variable.empty()) throw ConfigError({"fit: a fit needs a sweep"});
  if (!cfg.sweep.variable.empty()) {
    std::vector<std::string> diag;
    for (double v : cfg.sweep.values) {
      try {
        for (auto& d : validate(config::sweep_point(cfg, v)))
          diag.push_back("sweep " + cfg.sweep.variable + "=" + text::format_double(v) + ": " + d);
      } catch (const std::invalid_argument& e) {
        diag.push_back(std::string("sweep: ") + e.what());
      }
    }
    if (!diag.empty()) throw ConfigError(std::move(diag));
  }

  RunResult result;
  const std::string hash = config::scenario_hash(cfg);
  const fs::path& out = options.out_dir;
  auto emit = [&](const fs::path& rel, std::string_view content) {
    text::write_file(out / rel, content);
    result.outputs.push_back(rel);
  };
  emit("config.json", config::serialize(cfg));

  const std::size_t n_points = cfg.sweep.variable.empty() ? 1 : cfg.sweep.values.size();
  std::vector<EstimateRow> all_rows;
  for (std::size_t k = 0; k < n_points; ++k) {
    const ScenarioConfig point = cfg.sweep.variable.empty() ? cfg : config::sweep_point(cfg, cfg.sweep.values[k]);
    // Each sweep point gets its own seed so points are independent.
    const std::uint64_t seed = cfg.seed + k;
    const auto stream = detect::run_trials(point, cfg.n_trials, seed, options.threads);
    PointResult pr;
    pr.x = cfg.sweep.variable.empty() ? 0.0 : cfg.sweep.values[k];
    pr.label = point_label(cfg, k);
    pr.rows = analyze(stream, counting::window_spec(point), point.hbt, pr.label, &pr.skipped);
    if (options.write_streams) {
      const fs::path rel = stream_name(cfg, k);
      detect::write_stream(out / rel, stream, hash);
      result.outputs.push_back(rel);
      result.outputs.push_back(rel.string() + ".meta.json");
    }
    all_rows.insert(all_rows.end(), pr.rows.begin(), pr.rows.end());
    result.points.push_back(std::move(pr));
  }
  emit("estimates.csv", counting::estimates_to_csv(all_rows));

  if (!cfg.sweep.variable.empty()) {
    std::string csv = "x,quantity,value,sigma,n_coinc\n";
    for (const auto& pt : result.points)
      for (const auto& r : pt.rows)
        csv += text::format_double(pt.x) + "," + r.quantity + "," + text::format_double(r.estimate.value) + "," +
               text::format_double(r.estimate.sigma) + "," + std::to_string(r.estimate.n_coinc) + "\n";
    emit("sweep.csv", csv);
  }

  if (options.fit) {
    fit::FitProblem problem = fit::make_problem(options.fit->model, sweep_data(result.points, options.fit->quantity));
    if (!options.fit->params.empty()) problem.params = options.fit->params;
    try {
      problem.validate();
    } catch (const std::invalid_argument& e) {
      throw InsufficientStatistics(std::string("fit of ") + options.fit->quantity + ": " + e.what());
    }
    result.fit = fit::fit(problem);
    emit("fit_result.json", fit_result_json(problem, *result.fit));
    emit("residuals.csv", residuals_csv(problem, *result.fit));
  }

  // The fit request is part of the recipe, so it goes into the manifest.
  json extra = json::object();
  if (options.fit) {
    json& f = extra["fit"];
    f["quantity"] = options.fit->quantity;
    f["model"] = std::string(fit::to_string(options.fit->model));
    f["params"] = json::array();
    for (const auto& p : options.fit->params) f["params"].push_back(param_spec_json(p));
  }
  write_manifest(out, "simulate", &cfg, result.outputs, extra.dump());
  if (all_rows.empty()) throw InsufficientStatistics("no estimator had enough counts; increase n_trials");
  return result;
}

// ---- fit records --------------------------------------------------------

std::vector<fit::DataPoint> parse_data_csv(std::string_view csv) {
  std::vector<fit::DataPoint> data;
  std::size_t pos = 0;
  bool header = true;
  bool has_sigma = false;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto cols = text::split(line, ',');
    if (header) {
      if (cols.size() == 2 && cols[0] == "x" && cols[1] == "y") {
        has_sigma = false;
      } else if (cols.size() == 3 && cols[0] == "x" && cols[1] == "y" && cols[2] == "sigma") {
        has_sigma = true;
      } else {
        throw ConfigError({"data CSV: header must be 'x,y,sigma' or 'x,y'"});
      }
      header = false;
      continue;
    }
    if (cols.size() != (has_sigma ? 3u : 2u))
      throw ConfigError({"data CSV line " + std::to_string(line_no) + ": wrong column count"});
    try {
      fit::DataPoint d;
      d.x = text::parse_double(cols[0]);
      d.y = text::parse_double(cols[1]);
      d.sigma = has_sigma ? text::parse_double(cols[2]) : std::sqrt(std::max(d.y, 1.0));
      data.push_back(d);
    } catch (const std::invalid_argument& e) {
      throw ConfigError({"data CSV line " + std::to_string(line_no) + ": " + e.what()});
    }
  }
  if (header) throw ConfigError({"data CSV is empty"});
  return data;
}

fit::FitProblem parse_problem(std::string_view text_in, std::vector<fit::DataPoint> data) {
  json root;
  try {
    root = json::parse(text_in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("problem: syntax error: ") + e.what()});
  }
  std::vector<std::string> diag;
  if (!root.is_object() || !root.contains("model") || !root["model"].is_string())
    throw ConfigError({"problem: 'model' (string) is required"});
  fit::FitProblem problem;
  try {
    problem = fit::make_problem(fit::parse_model_id(root["model"].get<std::string>()), std::move(data));
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("model: ") + e.what()});
  }
  for (auto it = root.begin(); it != root.end(); ++it)
    if (it.key() != "model" && it.key() != "params" && it.key() != "options") diag.push_back(it.key() + ": unknown key");

  if (root.contains("params")) {
    const auto& ps = root["params"];
    if (!ps.is_object()) diag.push_back("params: expected an object keyed by parameter name");
    for (auto it = ps.begin(); ps.is_object() && it != ps.end(); ++it) {
      auto spec = std::find_if(problem.params.begin(), problem.params.end(),
                               [&](const fit::ParamSpec& p) { return p.name == it.key(); });
      const std::string path = "params." + it.key();
      if (spec == problem.params.end()) {
        diag.push_back(path + ": unknown parameter for this model");
        continue;
      }
      if (!it->is_object()) {
        diag.push_back(path + ": expected an object");
        continue;
      }
      for (auto f = it->begin(); f != it->end(); ++f) {
        const std::string fpath = path + "." + f.key();
        try {
          if (f.key() == "value" || f.key() == "lower" || f.key() == "upper") {
            if (!f->is_number()) throw std::invalid_argument("expected a number");
            double& dst = f.key() == "value" ? spec->value : f.key() == "lower" ? spec->lower : spec->upper;
            dst = f->get<double>();
          } else if (f.key() == "fixed") {
            if (!f->is_boolean()) throw std::invalid_argument("expected true/false");
            spec->fixed = f->get<bool>();
          } else if (f.key() == "transform") {
            if (!f->is_string()) throw std::invalid_argument("expected a string");
            spec->transform = fit::parse_transform(f->get<std::string>());
          } else {
            throw std::invalid_argument("unknown key");
          }
        } catch (const std::invalid_argument& e) {
          diag.push_back(fpath + ": " + e.what());
        }
      }
    }
  }

  if (root.contains("options")) {
    const auto& o = root["options"];
    auto& opt = problem.options;
    for (auto f = o.begin(); o.is_object() && f != o.end(); ++f) {
      const std::string fpath = "options." + f.key();
      try {
        if (f.key() == "method") {
          const auto s = f->get<std::string>();
          if (s == "damped_least_squares") {
            opt.method = fit::Method::kDampedLeastSquares;
          } else if (s == "simplex") {
            opt.method = fit::Method::kSimplex;
          } else {
            throw std::invalid_argument("expected damped_least_squares or simplex");
          }
        } else if (f.key() == "objective") {
          const auto s = f->get<std::string>();
          if (s == "least_squares") {
            opt.objective = fit::Objective::kLeastSquares;
          } else if (s == "poisson") {
            opt.objective = fit::Objective::kPoisson;
          } else {
            throw std::invalid_argument("expected least_squares or poisson");
          }
        } else if (f.key() == "max_iterations") {
          if (!f->is_number_integer() || f->get<int>() < 1) throw std::invalid_argument("expected a positive integer");
          opt.max_iterations = f->get<int>();
        } else if (f.key() == "rel_tol" || f.key() == "step_tol") {
          if (!f->is_number() || !(f->get<double>() > 0.0)) throw std::invalid_argument("expected a positive number");
          (f.key() == "rel_tol" ? opt.rel_tol : opt.step_tol) = f->get<double>();
        } else {
          throw std::invalid_argument("unknown key");
        }
      } catch (const json::exception&) {
        diag.push_back(fpath + ": wrong type");
      } catch (const std::invalid_argument& e) {
        diag.push_back(fpath + ": " + e.what());
      }
    }
    if (!o.is_object()) diag.push_back("options: expected an object");
  }
  if (diag.empty()) {
    try {
      problem.validate();
    } catch (const std::invalid_argument& e) {
      diag.push_back(e.what());
    }
  }
  if (!diag.empty()) throw ConfigError(std::move(diag));
  return problem;
}

std::string fit_result_json(const fit::FitProblem& problem, const fit::FitResult& r) {
  json j;
  j["model"] = std::string(fit::to_string(problem.model));
  j["converged"] = r.converged;
  j["n_iterations"] = r.n_iterations;
  j["chi_square"] = r.chi_square;
  j["n_dof"] = r.n_dof;
  j["diagnostics"] = r.diagnostics;
  json ps = json::array();
  for (std::size_t i = 0; i < r.params.size(); ++i) {
    json p;
    p["name"] = r.names[i];
    p["value"] = r.params[i];
    // JSON has no infinity; an undetermined sigma is written as null.
    p["sigma"] = std::isfinite(r.sigma[i]) ? json(r.sigma[i]) : json(nullptr);
    p["fixed"] = problem.params[i].fixed;
    ps.push_back(p);
  }
  j["params"] = ps;
  return j.dump(2) + "\n";
}

std::string residuals_csv(const fit::FitProblem& problem, const fit::FitResult& r) {
  const auto model = fit::model_function(problem.model);
  std::string out = "x,y,sigma,model,residual\n";
  for (const auto& d : problem.data) {
    double f = std::nan("");
    try {
      f = model(d.x, r.params);
    } catch (const std::domain_error&) {
    }
    out += text::format_double(d.x) + "," + text::format_double(d.y) + "," + text::format_double(d.sigma) + "," +
           text::format_double(f) + "," + text::format_double((d.y - f) / d.sigma) + "\n";
  }
  return out;
}

fit::FitResult run_fit(const fit::FitProblem& problem, const fs::path& out_dir, const std::string& inputs_hash) {
  const auto result = fit::fit(problem);
  text::write_file(out_dir / "fit_result.json", fit_result_json(problem, result));
  text::write_file(out_dir / "residuals.csv", residuals_csv(problem, result));
  json extra;
  extra["inputs_hash"] = inputs_hash;
  write_manifest(out_dir, "fit", nullptr, {"fit_result.json", "residuals.csv"}, extra.dump());
  return result;
}

// ---- manifests ----------------------------------------------------------

OutputRecord hash_output(const fs::path& out_dir, const fs::path& relative) {
  const std::string bytes = text::read_file(out_dir / relative);
  return {relative.generic_string(), text::hex64(text::fnv1a64(bytes)), bytes.size()};
}

void write_manifest(const fs::path& out_dir, const std::string& command, const ScenarioConfig* cfg,
                    const std::vector<fs::path>& outputs, const std::string& extra_json) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  if (cfg) {
    j["scenario_hash"] = config::scenario_hash(*cfg);
    j["seed"] = cfg->seed;
    j["n_trials"] = cfg->n_trials;
    j["config"] = json::parse(config::serialize(*cfg));
  }
  if (!extra_json.empty()) {
    const json extra = json::parse(extra_json);
    for (const auto& [k, v] : extra.items()) j[k] = v;
  }
  json outs = json::array();
  for (const auto& rel : outputs) {
    const auto rec = hash_output(out_dir, rel);
    outs.push_back({{"file", rec.file}, {"fnv1a64", rec.fnv1a64}, {"bytes", rec.bytes}});
  }
  j["outputs"] = outs;
  text::write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

ReplayReport replay_manifest(const fs::path& manifest_path, const fs::path& scratch_dir, int threads) {
  const auto j = json::parse(text::read_file(manifest_path));
  const std::string command = j.at("command").get<std::string>();
  if (!j.contains("config")) throw std::invalid_argument("manifest has no config; only simulate/reproduce replay");
  const ScenarioConfig cfg = config::parse(j.at("config").dump());

  if (command == "simulate") {
    RunOptions opt;
    opt.out_dir = scratch_dir;
    opt.threads = threads;
    if (j.contains("fit")) {
      const auto& f = j["fit"];
      FitRequest req;
      req.quantity = f.at("quantity").get<std::string>();
      req.model = fit::parse_model_id(f.at("model").get<std::string>());
      for (const auto& p : f.at("params")) req.params.push_back(param_spec_from_json(p));
      opt.fit = req;
    }
    run_scenario(cfg, opt);
  } else if (command.rfind("reproduce ", 0) == 0) {
    presets::ReproduceOptions opt;
    opt.out_dir = scratch_dir;
    opt.n_trials = cfg.n_trials;
    opt.seed = cfg.seed;
    opt.threads = threads;
    presets::reproduce(command.substr(10), opt);
  } else {
    throw std::invalid_argument("cannot replay command '" + command + "'");
  }

  ReplayReport rep;
  for (const auto& o : j.at("outputs")) {
    const std::string file = o.at("file").get<std::string>();
    const std::string want = o.at("fnv1a64").get<std::string>();
    std::string got;
    try {
      got = hash_output(scratch_dir, file).fnv1a64;
    } catch (const std::exception&) {
      got = "missing";
    }
    if (got != want) {
      rep.ok = false;
      rep.mismatches.push_back(file + ": expected " + want + ", got " + got);
    }
  }
  return rep;
}

}  // namespace rydsim::pipeline

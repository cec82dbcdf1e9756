#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ablmc/config.hpp"
#include "ablmc/estimators.hpp"

namespace ablmc {

inline constexpr int kOutputSchemaVersion = 1;

using json = nlohmann::ordered_json;

inline json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"kappa_sigma", c.model.kappa_sigma}, {"kappa_tau", c.model.kappa_tau},
                {"u_star", c.model.u_star},           {"h", c.model.H},
                {"eps_reg", c.model.eps_reg},         {"x_ref", c.model.x_ref},
                {"noise_scale", c.model.noise_scale}};
  j["run"] = {{"method", to_string(c.method)},
              {"integrator", to_string(c.integrator)},
              {"t", c.T},
              {"m0", c.m0},
              {"eps", c.eps},
              {"n_samples", c.fixed_n},
              {"seed", c.seed},
              {"x0", c.x0},
              {"u0", c.u0},
              {"adaptive", c.adaptive},
              {"x_adapt", c.x_adapt},
              {"coupling_signs", c.coupling_signs},
              {"workers", c.workers},
              {"timings", c.timings}};
  j["qoi"] = {{"kind", to_string(c.qoi_kind)}, {"a", c.qoi_a}, {"b", c.qoi_b},
              {"r", c.qoi_r},                  {"delta", c.qoi_delta}, {"bins", c.qoi_bins}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  const auto& m = j.at("model");
  c.model.kappa_sigma = m.at("kappa_sigma");
  c.model.kappa_tau = m.at("kappa_tau");
  c.model.u_star = m.at("u_star");
  c.model.H = m.at("h");
  c.model.eps_reg = m.at("eps_reg");
  c.model.x_ref = m.at("x_ref");
  c.model.noise_scale = m.at("noise_scale");
  const auto& r = j.at("run");
  c.method = method_from_string(r.at("method").get<std::string>());
  c.integrator = integrator_from_string(r.at("integrator").get<std::string>());
  c.T = r.at("t");
  c.m0 = r.at("m0");
  c.eps = r.at("eps");
  c.fixed_n = r.at("n_samples");
  c.seed = r.at("seed");
  c.x0 = r.at("x0");
  c.u0 = r.at("u0");
  c.adaptive = r.at("adaptive");
  c.x_adapt = r.at("x_adapt");
  c.coupling_signs = r.at("coupling_signs");
  c.workers = r.at("workers");
  c.timings = r.at("timings");
  const auto& q = j.at("qoi");
  c.qoi_kind = qoi_kind_from_string(q.at("kind").get<std::string>());
  c.qoi_a = q.at("a");
  c.qoi_b = q.at("b");
  c.qoi_r = q.at("r");
  c.qoi_delta = q.at("delta");
  c.qoi_bins = q.at("bins");
  c.output_dir = j.at("output").at("dir").get<std::string>();
  return c;
}

/// Everything one run emits: schema version, the exact parsed config, the
/// estimate with its error decomposition, and the per-level table.
struct OutputRecord {
  int schema_version = kOutputSchemaVersion;
  RunConfig config;
  RunResult result;
};

inline json to_json(const OutputRecord& rec) {
  json j;
  j["schema_version"] = rec.schema_version;
  j["config"] = to_json(rec.config);
  const RunResult& r = rec.result;
  json res;
  res["estimate"] = r.estimate;
  res["stat_error"] = r.stat_error;
  res["bias_estimate"] = r.bias_estimate;
  res["alpha"] = r.alpha;
  res["c1"] = r.c1;
  res["levels_used"] = r.levels_used;
  res["total_cost_steps"] = r.total_cost_steps;
  res["pilot_cost_steps"] = r.pilot_cost_steps;
  res["failed_samples"] = r.failed_samples;
  res["warnings"] = r.warnings;
  json levels = json::array();
  for (const auto& st : r.level_stats) {
    json lv;
    lv["level"] = st.level;
    lv["h"] = st.h;
    lv["n"] = st.n;
    lv["failed"] = st.failed;
    lv["cost_steps"] = st.cost_steps;
    lv["sum_y"] = st.sum_y;
    lv["sum_y2"] = st.sum_y2;
    levels.push_back(std::move(lv));
  }
  res["levels"] = std::move(levels);
  j["result"] = std::move(res);
  j["timings"] = {{"wall_seconds", rec.config.timings ? r.wall_seconds : 0.0}};
  return j;
}

inline OutputRecord output_record_from_json(const json& j) {
  OutputRecord rec;
  rec.schema_version = j.at("schema_version");
  if (rec.schema_version != kOutputSchemaVersion)
    throw std::runtime_error("result file has schema version " +
                             std::to_string(rec.schema_version) + ", this reader expects " +
                             std::to_string(kOutputSchemaVersion));
  rec.config = config_from_json(j.at("config"));
  const auto& res = j.at("result");
  RunResult& r = rec.result;
  r.estimate = res.at("estimate").get<std::vector<double>>();
  r.stat_error = res.at("stat_error").get<std::vector<double>>();
  r.bias_estimate = res.at("bias_estimate");
  r.alpha = res.at("alpha");
  r.c1 = res.at("c1");
  r.levels_used = res.at("levels_used");
  r.total_cost_steps = res.at("total_cost_steps");
  r.pilot_cost_steps = res.at("pilot_cost_steps");
  r.failed_samples = res.at("failed_samples");
  r.warnings = res.at("warnings").get<std::vector<std::string>>();
  for (const auto& lv : res.at("levels")) {
    LevelStats st;
    st.level = lv.at("level");
    st.h = lv.at("h");
    st.n = lv.at("n");
    st.failed = lv.at("failed");
    st.cost_steps = lv.at("cost_steps");
    st.sum_y = lv.at("sum_y").get<std::vector<double>>();
    st.sum_y2 = lv.at("sum_y2").get<std::vector<double>>();
    st.dim = st.sum_y.size();
    r.level_stats.push_back(std::move(st));
  }
  r.wall_seconds = j.at("timings").at("wall_seconds");
  return rec;
}

// ---------------------------------------------------------------------------
// CSV emission. Floats carry 17 significant digits so files round-trip
// exactly; row order and formatting are deterministic for a fixed seed and
// config.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

inline std::string variance_decay_csv(std::span<const DecayRow> rows) {
  std::string s = "level,h,var_Y,mean_Y,n_samples,cost_steps\n";
  for (const auto& r : rows)
    s += std::to_string(r.level) + "," + detail::fmt(r.h) + "," + detail::fmt(r.var_y) + "," +
         detail::fmt(r.mean_y) + "," + std::to_string(r.n) + "," +
         std::to_string(r.cost_steps) + "\n";
  return s;
}

inline std::string cost_sweep_csv(std::span<const CostRow> rows, bool timings) {
  std::string s = "eps,method,integrator,cost_steps,wall_seconds,estimate,stat_error\n";
  for (const auto& r : rows)
    s += detail::fmt(r.eps) + "," + to_string(r.method) + "," + to_string(r.integrator) + "," +
         std::to_string(r.cost_steps) + "," + detail::fmt(timings ? r.wall_seconds : 0.0) + "," +
         detail::fmt(r.estimate) + "," + detail::fmt(r.stat_error) + "\n";
  return s;
}

inline std::string pdf_csv(std::span<const double> edges, std::span<const double> concentration,
                           std::span<const double> std_error) {
  std::string s = "bin_lo,bin_hi,concentration,std_error\n";
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    s += detail::fmt(edges[i]) + "," + detail::fmt(edges[i + 1]) + "," +
         detail::fmt(concentration[i]) + "," + detail::fmt(std_error[i]) + "\n";
  return s;
}

/// Writes result.json (and leaves CSV emission to the caller, which knows the
/// sweep kind). Returns the path written.
inline std::filesystem::path write_result_json(const OutputRecord& rec,
                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / "result.json";
  detail::write_file(path, to_json(rec).dump(2) + "\n");
  return path;
}

inline void write_text_file(const std::filesystem::path& dir, const std::string& name,
                            const std::string& text) {
  std::filesystem::create_directories(dir);
  detail::write_file(dir / name, text);
}

}  // namespace ablmc

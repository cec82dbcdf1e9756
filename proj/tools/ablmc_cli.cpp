// Command-line driver: configuration ingestion, experiment orchestration and
// CSV/JSON emission for the dispersion Monte Carlo library.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ablmc/ablmc.hpp"

namespace {

using namespace ablmc;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string config_path;
  std::string method, integrator, qoi, coupling_signs;
  double eps = 0.0;
  std::int64_t seed = -1;
  int workers = 0;
  std::string output_dir;
  bool adaptive = false;
  double x_adapt = -1.0;
  double release = -1.0;
  std::string timings;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (key = value with [sections])");
  cmd->add_option("--method", f.method, "stmc or mlmc");
  cmd->add_option("--integrator", f.integrator, "se, gl or baoab");
  cmd->add_option("--qoi", f.qoi,
                  "mean-position, smoothed-indicator, raw-indicator or binned-field");
  cmd->add_option("--eps", f.eps, "target root-mean-square error");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--output-dir", f.output_dir, "output directory");
  cmd->add_flag("--adaptive", f.adaptive, "adaptive timestepping");
  cmd->add_option("--x-adapt", f.x_adapt, "adaptive reference height");
  cmd->add_option("--release", f.release, "release height X0");
  cmd->add_option("--coupling-signs", f.coupling_signs,
                  "on/off: reflection factors in the level coupling");
  cmd->add_option("--timings", f.timings, "on/off: wall-clock fields in outputs");
}

RunConfig build_config(const CLI::App* cmd, const CommonFlags& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : parse_config(read_file(f.config_path));
  if (cmd->count("--method")) cfg.method = method_from_string(f.method);
  if (cmd->count("--integrator")) cfg.integrator = integrator_from_string(f.integrator);
  if (cmd->count("--qoi")) cfg.qoi_kind = qoi_kind_from_string(f.qoi);
  if (cmd->count("--eps")) cfg.eps = f.eps;
  if (cmd->count("--seed")) cfg.seed = std::uint64_t(f.seed);
  if (cmd->count("--workers")) cfg.workers = f.workers;
  if (cmd->count("--output-dir")) cfg.output_dir = f.output_dir;
  if (cmd->count("--adaptive")) cfg.adaptive = true;
  if (cmd->count("--x-adapt")) cfg.x_adapt = f.x_adapt;
  if (cmd->count("--release")) cfg.x0 = f.release;
  if (cmd->count("--coupling-signs")) cfg.coupling_signs = f.coupling_signs == "on";
  if (cmd->count("--timings")) cfg.timings = f.timings == "on";
  if (!cmd->count("--output-dir") && f.config_path.empty()) {
    if (const char* env = std::getenv("ABLMC_OUTPUT_DIR")) cfg.output_dir = env;
  }
  cfg.validate();
  return cfg;
}

RunResult dispatch_run(const RunConfig& cfg) {
  const Problem pr = cfg.problem();
  if (cfg.method == Method::stmc)
    return run_stmc(pr, cfg.m0, cfg.eps, cfg.fixed_n, cfg.workers);
  MlmcOptions o;
  o.workers = cfg.workers;
  return run_mlmc(pr, cfg.eps, o);
}

void emit_result(const RunConfig& cfg, const RunResult& res) {
  OutputRecord rec{kOutputSchemaVersion, cfg, res};
  const auto path = write_result_json(rec, cfg.output_dir);
  std::cout << "estimate:";
  for (double e : res.estimate) std::cout << " " << e;
  std::cout << "\nstat_error: " << (res.stat_error.empty() ? 0.0 : res.stat_error[0])
            << "  bias_estimate: " << res.bias_estimate
            << "  cost_steps: " << res.total_cost_steps << "\nwrote " << path.string()
            << std::endl;
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << std::endl;
}

int cmd_run(const CLI::App* cmd, const CommonFlags& f) {
  const RunConfig cfg = build_config(cmd, f);
  emit_result(cfg, dispatch_run(cfg));
  return 0;
}

int cmd_decay(const CLI::App* cmd, const CommonFlags& f, int levels, std::int64_t samples,
              bool bias_kind) {
  const RunConfig cfg = build_config(cmd, f);
  const Problem pr = cfg.problem();
  const auto rows = decay_sweep(pr, 1, levels, samples, cfg.workers);
  write_text_file(cfg.output_dir,
                  bias_kind ? "bias_decay.csv" : "variance_decay.csv",
                  variance_decay_csv(rows));

  std::vector<double> h, v, m;
  for (const auto& r : rows) {
    h.push_back(r.h);
    v.push_back(r.var_y);
    m.push_back(std::abs(r.mean_y));
  }
  const double var_slope = fit_power_law(h, v).exponent;
  std::cout << "variance decay slope: " << var_slope << std::endl;
  if (bias_kind) std::cout << "bias decay slope: " << fit_power_law(h, m).exponent << std::endl;

  RunResult res;
  res.alpha = bias_kind ? fit_power_law(h, m).exponent : var_slope;
  OutputRecord rec{kOutputSchemaVersion, cfg, res};
  write_result_json(rec, cfg.output_dir);
  return 0;
}

int cmd_cost_sweep(const CLI::App* cmd, const CommonFlags& f, const std::string& eps_list,
                   const std::string& methods, std::int64_t fit_samples) {
  const RunConfig cfg = build_config(cmd, f);
  const Problem pr = cfg.problem();

  std::vector<double> eps_values;
  std::stringstream ss(eps_list);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) eps_values.push_back(std::stod(tok));
  if (eps_values.empty()) throw std::runtime_error("cost-sweep: empty --eps-list");

  const auto pilot = decay_sweep(pr, 1, 4, fit_samples, cfg.workers);
  std::vector<BiasPoint> pts;
  for (const auto& r : pilot) pts.push_back({r.h, std::abs(r.mean_y), r.se_mean});
  const BiasFit fit = estimate_bias_constants(pts);
  std::cout << "bias fit: alpha = " << fit.alpha << ", c1 = " << fit.c1 << std::endl;

  std::vector<CostRow> rows;
  if (methods == "stmc" || methods == "both") {
    const auto r = cost_sweep(pr, Method::stmc, eps_values, fit, cfg.workers);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (methods == "mlmc" || methods == "both") {
    const auto r = cost_sweep(pr, Method::mlmc, eps_values, fit, cfg.workers);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  write_text_file(cfg.output_dir, "cost_sweep.csv", cost_sweep_csv(rows, cfg.timings));

  RunResult res;
  res.alpha = fit.alpha;
  res.c1 = fit.c1;
  OutputRecord rec{kOutputSchemaVersion, cfg, res};
  write_result_json(rec, cfg.output_dir);
  return 0;
}

int cmd_pdf(const CLI::App* cmd, const CommonFlags& f, int bins) {
  RunConfig cfg = build_config(cmd, f);
  cfg.qoi_kind = QoIKind::binned_field;
  if (bins > 0) cfg.qoi_bins = bins;
  cfg.validate();
  const RunResult res = dispatch_run(cfg);
  const auto edges = equidistant_edges(cfg.qoi_bins, cfg.model.H);
  write_text_file(cfg.output_dir, "pdf.csv", pdf_csv(edges, res.estimate, res.stat_error));
  emit_result(cfg, res);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic Lagrangian dispersion in a turbulent boundary layer:\n"
               "standard and multilevel Monte Carlo with SE/GL/BAOAB timestepping"};
  app.require_subcommand(1);

  CommonFlags run_f, var_f, bias_f, cost_f, pdf_f;

  auto* run_cmd = app.add_subcommand("run", "single estimator run, writes result.json");
  add_common_flags(run_cmd, run_f);

  int var_levels = 6;
  std::int64_t var_samples = 100000;
  auto* var_cmd =
      app.add_subcommand("variance-decay", "Var[Y_l] per level, writes variance_decay.csv");
  add_common_flags(var_cmd, var_f);
  var_cmd->add_option("--levels", var_levels, "finest level of the sweep");
  var_cmd->add_option("--samples", var_samples, "samples per level");

  int bias_levels = 5;
  std::int64_t bias_samples = 200000;
  auto* bias_cmd =
      app.add_subcommand("bias-decay", "E[Y_l] per level, writes bias_decay.csv");
  add_common_flags(bias_cmd, bias_f);
  bias_cmd->add_option("--levels", bias_levels, "finest level of the sweep");
  bias_cmd->add_option("--samples", bias_samples, "samples per level");

  std::string eps_list = "4e-3,2.8e-3,2e-3,1.4e-3,1e-3,7e-4,5e-4,4e-4";
  std::string methods = "both";
  std::int64_t fit_samples = 200000;
  auto* cost_cmd =
      app.add_subcommand("cost-sweep", "cost against tolerance, writes cost_sweep.csv");
  add_common_flags(cost_cmd, cost_f);
  cost_cmd->add_option("--eps-list", eps_list, "comma-separated tolerances");
  cost_cmd->add_option("--methods", methods, "stmc, mlmc or both");
  cost_cmd->add_option("--fit-samples", fit_samples, "samples per level for the bias fit");

  int pdf_bins = 0;
  auto* pdf_cmd =
      app.add_subcommand("pdf", "binned concentration field, writes pdf.csv");
  add_common_flags(pdf_cmd, pdf_f);
  pdf_cmd->add_option("--bins", pdf_bins, "number of equidistant bins");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_cmd, run_f);
    if (var_cmd->parsed()) return cmd_decay(var_cmd, var_f, var_levels, var_samples, false);
    if (bias_cmd->parsed()) return cmd_decay(bias_cmd, bias_f, bias_levels, bias_samples, true);
    if (cost_cmd->parsed()) return cmd_cost_sweep(cost_cmd, cost_f, eps_list, methods, fit_samples);
    if (pdf_cmd->parsed()) return cmd_pdf(pdf_cmd, pdf_f, pdf_bins);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

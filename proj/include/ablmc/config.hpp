#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ablmc/estimators.hpp"

namespace ablmc {

/// Fully validated description of one experiment, assembled from the config
/// file and command-line overrides. An empty config reproduces the headline
/// setup: release at X0 = 0.05 with U0 = 0.1, T = 1, M0 = 40, MLMC with the
/// geometric Langevin integrator and the mean-position QoI at eps = 1e-3.
struct RunConfig {
  ModelParams model;
  Method method = Method::mlmc;
  Integrator integrator = Integrator::gl;
  QoIKind qoi_kind = QoIKind::mean_position;
  double qoi_a = 0.1055;
  double qoi_b = 0.1555;
  int qoi_r = 4;
  double qoi_delta = 0.1;
  int qoi_bins = 20;
  double T = 1.0;
  std::int64_t m0 = 40;
  double eps = 1e-3;
  std::int64_t fixed_n = 0;  ///< stmc only: sample count instead of a tolerance
  std::uint64_t seed = 12345;
  double x0 = 0.05;
  double u0 = 0.1;
  bool adaptive = false;
  double x_adapt = 0.05;
  bool coupling_signs = true;
  int workers = 1;
  bool timings = true;  ///< off: zero out wall-clock fields for byte-stable output
  std::string output_dir = ".";

  QoISpec qoi_spec() const {
    QoISpec q;
    q.kind = qoi_kind;
    q.a = qoi_a;
    q.b = qoi_b;
    q.r = qoi_r;
    q.delta = qoi_delta;
    if (qoi_kind == QoIKind::binned_field) q.bin_edges = equidistant_edges(qoi_bins, model.H);
    return q;
  }

  Problem problem() const {
    SampleOptions opt{coupling_signs, adaptive, x_adapt};
    return Problem::make(model, integrator, qoi_spec(), x0, u0, T, m0, seed, opt);
  }

  void validate() const {
    model.validate();
    qoi_spec().validate(model.H);
    if (!(T > 0.0)) throw std::invalid_argument("config: t must be positive");
    if (m0 < 1) throw std::invalid_argument("config: m0 must be >= 1");
    if (fixed_n < 0) throw std::invalid_argument("config: n_samples must be >= 0");
    if (!(eps > 0.0) && fixed_n == 0)
      throw std::invalid_argument("config: eps must be positive (or set n_samples)");
    if (!(x0 >= 0.0) || !(x0 <= model.H))
      throw std::invalid_argument("config: release height x0 outside [0, H]");
    if (!(x_adapt > 0.0) || !(x_adapt <= model.H))
      throw std::invalid_argument("config: x_adapt outside (0, H]");
    if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    if (adaptive && integrator == Integrator::baoab)
      throw std::invalid_argument(
          "config: adaptive timestepping supports the se and gl integrators only");
    if (integrator == Integrator::se) {
      const double h0 = T / double(m0);
      const double lim = adaptive ? 2.0 / sde_coeffs(x_adapt, model).lambda
                                  : se_stability_limit(model);
      if (h0 >= lim)
        throw std::invalid_argument(
            "config: symplectic Euler unstable, h0 = " + std::to_string(h0) +
            " >= " + std::to_string(lim) + "; increase m0 or eps_reg");
    }
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double parse_double(std::string_view v, int line) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(std::string(v), &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw ConfigError("config line " + std::to_string(line) + ": expected a number, got '" +
                      std::string(v) + "'");
  }
}

inline std::int64_t parse_int(std::string_view v, int line) {
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config line " + std::to_string(line) + ": expected an integer, got '" +
                      std::string(v) + "'");
  return out;
}

inline bool parse_bool(std::string_view v, int line) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config line " + std::to_string(line) + ": expected on/off, got '" +
                    std::string(v) + "'");
}

}  // namespace detail

inline Integrator integrator_from_string(std::string_view v) {
  if (v == "se") return Integrator::se;
  if (v == "gl") return Integrator::gl;
  if (v == "baoab") return Integrator::baoab;
  throw std::invalid_argument("unknown integrator '" + std::string(v) +
                              "' (expected se, gl or baoab)");
}

inline Method method_from_string(std::string_view v) {
  if (v == "stmc") return Method::stmc;
  if (v == "mlmc") return Method::mlmc;
  throw std::invalid_argument("unknown method '" + std::string(v) + "' (expected stmc or mlmc)");
}

inline QoIKind qoi_kind_from_string(std::string_view v) {
  if (v == "mean-position") return QoIKind::mean_position;
  if (v == "smoothed-indicator") return QoIKind::smoothed_indicator;
  if (v == "raw-indicator") return QoIKind::raw_indicator;
  if (v == "binned-field") return QoIKind::binned_field;
  throw std::invalid_argument("unknown qoi '" + std::string(v) + "'");
}

/// Parses the key = value config format with [section] headers, # comments
/// and blank lines. Unknown sections or keys are errors; the parsed config is
/// validated against every module invariant before it is returned.
inline RunConfig parse_config(std::string_view text) {
  using detail::ConfigError;
  RunConfig cfg;
  std::string section = "run";
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (section != "model" && section != "run" && section != "qoi" && section != "output")
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown section [" +
                          section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = section + "." + std::string(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));

    try {
      if (key == "model.kappa_sigma") cfg.model.kappa_sigma = detail::parse_double(val, line_no);
      else if (key == "model.kappa_tau") cfg.model.kappa_tau = detail::parse_double(val, line_no);
      else if (key == "model.u_star") cfg.model.u_star = detail::parse_double(val, line_no);
      else if (key == "model.h") cfg.model.H = detail::parse_double(val, line_no);
      else if (key == "model.eps_reg") cfg.model.eps_reg = detail::parse_double(val, line_no);
      else if (key == "model.x_ref") cfg.model.x_ref = detail::parse_double(val, line_no);
      else if (key == "model.noise_scale") cfg.model.noise_scale = detail::parse_double(val, line_no);
      else if (key == "run.method") cfg.method = method_from_string(val);
      else if (key == "run.integrator") cfg.integrator = integrator_from_string(val);
      else if (key == "run.t") cfg.T = detail::parse_double(val, line_no);
      else if (key == "run.m0") cfg.m0 = detail::parse_int(val, line_no);
      else if (key == "run.eps") cfg.eps = detail::parse_double(val, line_no);
      else if (key == "run.n_samples") cfg.fixed_n = detail::parse_int(val, line_no);
      else if (key == "run.seed") cfg.seed = std::uint64_t(detail::parse_int(val, line_no));
      else if (key == "run.x0") cfg.x0 = detail::parse_double(val, line_no);
      else if (key == "run.u0") cfg.u0 = detail::parse_double(val, line_no);
      else if (key == "run.adaptive") cfg.adaptive = detail::parse_bool(val, line_no);
      else if (key == "run.x_adapt") cfg.x_adapt = detail::parse_double(val, line_no);
      else if (key == "run.coupling_signs") cfg.coupling_signs = detail::parse_bool(val, line_no);
      else if (key == "run.workers") cfg.workers = int(detail::parse_int(val, line_no));
      else if (key == "run.timings") cfg.timings = detail::parse_bool(val, line_no);
      else if (key == "qoi.kind") cfg.qoi_kind = qoi_kind_from_string(val);
      else if (key == "qoi.a") cfg.qoi_a = detail::parse_double(val, line_no);
      else if (key == "qoi.b") cfg.qoi_b = detail::parse_double(val, line_no);
      else if (key == "qoi.r") cfg.qoi_r = int(detail::parse_int(val, line_no));
      else if (key == "qoi.delta") cfg.qoi_delta = detail::parse_double(val, line_no);
      else if (key == "qoi.bins") cfg.qoi_bins = int(detail::parse_int(val, line_no));
      else if (key == "output.dir") cfg.output_dir = std::string(val);
      else
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                          "'");
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace ablmc

// Acceptance suite: runs every exit criterion end to end and prints one
// pass/fail line per criterion. Heavy sweeps are shared between criteria
// where the configurations coincide. Seeds are fixed so every line is
// deterministic on a given platform.
//
// Usage: acceptance [--cli PATH] [N ...]
//   --cli PATH  path to the command-line binary (for the reproducibility
//               criterion); defaults to looking next to this binary
//   N ...       criterion numbers to run (default: all)

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ablmc/ablmc.hpp"

using namespace ablmc;
namespace fs = std::filesystem;

namespace {

int g_workers = 2;
std::string g_cli_path;
int g_failures = 0;

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void report(int criterion, const std::string& what, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

Problem make_problem(Integrator ig, const QoISpec& qoi, std::uint64_t seed,
                     std::int64_t m0 = 40, const ModelParams& mp = ModelParams{},
                     const SampleOptions& opt = {}) {
  return Problem::make(mp, ig, qoi, 0.05, 0.1, 1.0, m0, seed, opt);
}

// Fits the log2 Var / log2 h slope over levels [l_lo, l_hi] of a sweep.
double slope_over(const std::vector<DecayRow>& rows, int l_lo, int l_hi,
                  bool of_mean = false) {
  std::vector<double> h, v;
  for (const auto& r : rows)
    if (r.level >= l_lo && r.level <= l_hi) {
      h.push_back(r.h);
      v.push_back(of_mean ? std::abs(r.mean_y) : r.var_y);
    }
  return fit_power_law(h, v).exponent;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Criterion 1 + 6: variance decay and the boundary-coupling regression.
// Mean position, eps_reg = 0.01, M0 = 40, levels 1..6 at 1e5 samples/level;
// slopes fitted over levels 2..6 (the coarsest level sits outside the
// asymptotic range for SE, as the source data also shows).
// ---------------------------------------------------------------------------

void criteria_1_and_6(bool run1, bool run6) {
  const int l_max = 6, l_fit = 2;
  const std::int64_t n = 100000;
  std::map<Integrator, double> slope;
  std::vector<DecayRow> gl_rows;
  if (run1) {
    for (auto ig : {Integrator::se, Integrator::gl, Integrator::baoab}) {
      const Problem pr = make_problem(ig, QoISpec{}, 101);
      const auto rows = decay_sweep(pr, 1, l_max, n, g_workers);
      if (ig == Integrator::gl) gl_rows = rows;
      slope[ig] = slope_over(rows, l_fit, l_max);
    }
    const bool pos_ok = slope[Integrator::se] >= 1.7 && slope[Integrator::se] <= 2.3 &&
                        slope[Integrator::gl] >= 1.7 && slope[Integrator::gl] <= 2.3 &&
                        slope[Integrator::baoab] >= 1.7 &&
                        slope[Integrator::baoab] <= 2.3;

    QoISpec raw;
    raw.kind = QoIKind::raw_indicator;
    const auto raw_rows = decay_sweep(make_problem(Integrator::gl, raw, 102), 1, l_max,
                                      n, g_workers);
    const double raw_slope = slope_over(raw_rows, l_fit, l_max);

    QoISpec smooth;
    smooth.kind = QoIKind::smoothed_indicator;
    const auto sm_rows = decay_sweep(make_problem(Integrator::gl, smooth, 103), 1,
                                     l_max, n, g_workers);
    const double sm_slope = slope_over(sm_rows, l_fit, l_max);

    const bool ind_ok =
        raw_slope >= 0.7 && raw_slope <= 1.3 && sm_slope >= 1.7 && sm_slope <= 2.3;
    report(1, "variance decay (mean position, raw and smoothed indicator)",
           pos_ok && ind_ok,
           fmt("slopes: se=%.2f gl=%.2f baoab=%.2f (want 1.7..2.3); raw=%.2f "
               "(0.7..1.3); smoothed r=4 d=0.1: %.2f (1.7..2.3); levels %d..%d, "
               "1e5 samples",
               slope[Integrator::se], slope[Integrator::gl], slope[Integrator::baoab],
               raw_slope, sm_slope, l_fit, l_max));
  }
  if (run6) {
    SampleOptions off;
    off.signs_on = false;
    const auto off_rows = decay_sweep(
        make_problem(Integrator::gl, QoISpec{}, 101, 40, ModelParams{}, off), 1, l_max,
        n, g_workers);
    const double off_slope = slope_over(off_rows, l_fit, l_max);
    double on_slope;
    if (!gl_rows.empty()) {
      on_slope = slope_over(gl_rows, l_fit, l_max);
    } else {
      const auto on_rows =
          decay_sweep(make_problem(Integrator::gl, QoISpec{}, 101), 1, l_max, n,
                      g_workers);
      on_slope = slope_over(on_rows, l_fit, l_max);
    }
    report(6, "boundary-coupling regression (release near the ground)",
           off_slope < 1.3 && on_slope >= 1.7,
           fmt("signs off: slope=%.2f (want < 1.3); signs on: %.2f (want >= 1.7)",
               off_slope, on_slope));
  }
}

// ---------------------------------------------------------------------------
// Criterion 2: bias order and the integrator bias ratios at matched h.
// |E[Y_l]| over levels 1..4; ratios of the fitted bias curves evaluated at
// h_1 = T/(2 M0), the coarsest difference level all integrators share.
// ---------------------------------------------------------------------------

void criterion_2() {
  struct Cfg {
    Integrator ig;
    std::int64_t n;
  };
  const std::array<Cfg, 3> cfgs{{{Integrator::se, 200000},
                                 {Integrator::gl, 400000},
                                 {Integrator::baoab, 1600000}}};
  std::map<Integrator, BiasFit> fits;
  std::map<Integrator, double> slopes;
  for (const auto& c : cfgs) {
    const Problem pr = make_problem(c.ig, QoISpec{}, 201);
    const auto rows = decay_sweep(pr, 1, 4, c.n, g_workers);
    std::vector<BiasPoint> pts;
    for (const auto& r : rows) pts.push_back({r.h, std::abs(r.mean_y), r.se_mean});
    fits[c.ig] = estimate_bias_constants(pts);
    slopes[c.ig] = fits[c.ig].alpha;
  }
  const double h_ref = 1.0 / 80.0;  // h_1
  const double se_gl =
      fits[Integrator::se].bias_at(h_ref) / fits[Integrator::gl].bias_at(h_ref);
  const double se_ba =
      fits[Integrator::se].bias_at(h_ref) / fits[Integrator::baoab].bias_at(h_ref);

  const bool slopes_ok = slopes[Integrator::se] >= 0.7 && slopes[Integrator::se] <= 1.3 &&
                         slopes[Integrator::gl] >= 0.7 && slopes[Integrator::gl] <= 1.3 &&
                         slopes[Integrator::baoab] >= 0.7 &&
                         slopes[Integrator::baoab] <= 1.3;
  const bool ratios_ok = se_gl >= 6.0 && se_gl <= 26.0 && se_ba >= 25.0 && se_ba <= 100.0;
  report(2, "bias order and integrator bias ratios", slopes_ok && ratios_ok,
         fmt("|E[Y_l]| slopes: se=%.2f gl=%.2f baoab=%.2f (want 0.7..1.3); "
             "ratios at h=%.4g: SE/GL=%.1f (want 6..26), SE/BAOAB=%.1f (want 25..100)",
             slopes[Integrator::se], slopes[Integrator::gl], slopes[Integrator::baoab],
             h_ref, se_gl, se_ba));
}

// ---------------------------------------------------------------------------
// Criterion 3: headline estimates at eps = 1e-3.
// ---------------------------------------------------------------------------

void criterion_3() {
  MlmcOptions o;
  o.workers = g_workers;
  const Problem mean_pr = make_problem(Integrator::gl, QoISpec{}, 301);
  const RunResult mean = run_mlmc(mean_pr, 1e-3, o);

  QoISpec smooth;
  smooth.kind = QoIKind::smoothed_indicator;
  const Problem conc_pr = make_problem(Integrator::gl, smooth, 302, 80);
  const RunResult conc = run_mlmc(conc_pr, 1e-3, o);

  const bool mean_ok = std::abs(mean.estimate[0] - 0.1301) <= 1.5e-3;
  const bool conc_ok = conc.estimate[0] >= 0.1655 && conc.estimate[0] <= 0.1680;
  report(3, "headline estimates at eps = 1e-3", mean_ok && conc_ok,
         fmt("E[X_T] = %.5f (want 0.1301 +- 1.5e-3); smoothed concentration on "
             "[0.1055, 0.1555] = %.5f (want 0.1655..0.1680)",
             mean.estimate[0], conc.estimate[0]));
}

// ---------------------------------------------------------------------------
// Criterion 4: smoothing error for r in {4, 6, 8} at delta = 0.1.
// E[P^{r,delta}] and E[1] estimated on the same BAOAB paths (paired), step
// fine enough that the shared discretisation bias largely cancels.
// ---------------------------------------------------------------------------

void criterion_4() {
  const double a = 0.1055, b = 0.1555, delta = 0.1;
  const std::array<SmoothingPolynomial, 3> polys{build_smoothing_polynomial(4),
                                                 build_smoothing_polynomial(6),
                                                 build_smoothing_polynomial(8)};
  const ModelParams mp{};
  const std::int64_t n = 2500000, M = 160;
  LevelStats st;
  st.init(0, 1.0 / double(M), 4);
  const SampleFn fn = [&](std::int64_t idx, std::span<double> y, std::span<double>) {
    NoiseStream ns(401, 0, std::uint64_t(idx));
    const PathResult res = simulate_path(Integrator::baoab, mp, 0.05, 0.1, 1.0, M, ns);
    const double x = res.state.x;
    y[0] = (x >= a && x <= b) ? 1.0 : 0.0;
    for (int k = 0; k < 3; ++k)
      y[std::size_t(k) + 1] = smoothed_indicator(x, a, b, polys[std::size_t(k)], delta) - y[0];
    return SampleOutcome{true, res.steps};
  };
  accumulate_samples(st, 0, n, g_workers, fn);
  const double d4 = std::abs(st.mean(1)), d6 = std::abs(st.mean(2)),
               d8 = std::abs(st.mean(3));
  report(4, "smoothing error of the indicator approximation",
         d4 <= 5e-4 && d6 <= 5e-4 && d8 <= 5e-4,
         fmt("|E[P^{r,0.1}] - E[1]|: r=4: %.2g, r=6: %.2g, r=8: %.2g (want <= 5e-4; "
             "E[1] = %.5f, %lld paired paths)",
             d4, d6, d8, st.mean(0), (long long)n));
}

// ---------------------------------------------------------------------------
// Criterion 5: cost scaling over a tolerance decade, step-count cost.
// ---------------------------------------------------------------------------

void criterion_5() {
  const Problem pr = make_problem(Integrator::gl, QoISpec{}, 501);
  const auto pilot = decay_sweep(pr, 1, 4, 200000, g_workers);
  std::vector<BiasPoint> pts;
  for (const auto& r : pilot) pts.push_back({r.h, std::abs(r.mean_y), r.se_mean});
  const BiasFit fit = estimate_bias_constants(pts);

  const std::vector<double> eps = {4e-3, 2.8e-3, 2e-3, 1.4e-3, 1e-3, 7e-4, 5e-4, 4e-4};
  std::map<Method, double> slope;
  for (auto m : {Method::stmc, Method::mlmc}) {
    const auto rows = cost_sweep(pr, m, eps, fit, g_workers);
    std::vector<double> e, c;
    for (const auto& r : rows) {
      e.push_back(r.eps);
      c.push_back(double(r.cost_steps));
    }
    slope[m] = fit_power_law(e, c).exponent;
  }
  report(5, "cost against tolerance (step-count cost)",
         slope[Method::mlmc] >= -2.4 && slope[Method::mlmc] <= -1.6 &&
             slope[Method::stmc] >= -3.5 && slope[Method::stmc] <= -2.5,
         fmt("log-log slopes: mlmc=%.2f (want -2.4..-1.6), stmc=%.2f (want "
             "-3.5..-2.5), eps in [4e-4, 4e-3]",
             slope[Method::mlmc], slope[Method::stmc]));
}

// ---------------------------------------------------------------------------
// Criterion 7: reflected paths equal the sign-mapped extended-SDE paths.
// ---------------------------------------------------------------------------

void criterion_7() {
  ModelParams p;
  p.u_star = 1.0;  // strong turbulence so both boundaries are hit
  bool ok = true;
  std::int64_t lower = 0, upper = 0;
  double worst = 0.0;
  for (auto ig : {Integrator::se, Integrator::gl, Integrator::baoab}) {
    const double h = (ig == Integrator::se) ? 0.005 : 0.02;
    for (int path = 0; path < 100; ++path) {
      NoiseStream ns(701, std::uint32_t(ig), std::uint64_t(path));
      ParticleState s{0.5, 0.0, 0.0, +1, 0};
      ExtendedState e{0.5, 0.0, 0.0};
      std::int64_t refl_seen = 0;
      for (int n = 0; n < 200; ++n) {
        const double xi = ns.next();
        const StepRecord rec = step(ig, s, h, xi, p);
        if (rec.state.n_refl > refl_seen) {
          // attribute reflections to a boundary by the pre-step side
          (s.x < 0.5 ? lower : upper) += rec.state.n_refl - refl_seen;
          refl_seen = rec.state.n_refl;
        }
        s = rec.state;
        e = extended_step_oracle(e, h, xi, p, ig);
        const double eta = fold_height(e.x, p.H);
        const int sign = eta >= 0.0 ? +1 : -1;
        const double dx = std::abs(s.x - sign * eta);
        const double du = std::abs(s.u - sign * e.u);
        const double rel = std::max(dx / std::max(1e-30, std::abs(s.x)),
                                    du / std::max(1e-30, std::abs(s.u)));
        const double abs_err = std::max(dx, du);
        worst = std::max(worst, std::min(rel, abs_err));
        if (std::min(rel, abs_err) > 1e-12 || s.parity != sign) ok = false;
      }
    }
  }
  report(7, "extended-SDE oracle equivalence (100 paths x 3 integrators)",
         ok && lower > 0 && upper > 0,
         fmt("worst per-step deviation %.2g (want <= 1e-12); reflections seen: "
             "%lld lower, %lld upper",
             worst, (long long)lower, (long long)upper));
}

// ---------------------------------------------------------------------------
// Criterion 8: regularisation sensitivity at eps_reg = 0.001.
// SE and GL degrade over their practical ranges; BAOAB keeps quadratic decay
// once lambda(eps_reg) h < 1, where the modified-equation prediction applies
// (its only O(h) term stays bounded at the ground).
// ---------------------------------------------------------------------------

void criterion_8() {
  ModelParams tight;
  tight.eps_reg = 0.001;
  const std::int64_t n = 100000;

  const auto gl_rows =
      decay_sweep(make_problem(Integrator::gl, QoISpec{}, 801, 40, tight), 1, 6, n,
                  g_workers);
  const double gl_slope = slope_over(gl_rows, 1, 6);

  const auto se_rows =
      decay_sweep(make_problem(Integrator::se, QoISpec{}, 802, 270, tight), 1, 6, n,
                  g_workers);
  const double se_slope = slope_over(se_rows, 3, 6);

  const auto ba_rows =
      decay_sweep(make_problem(Integrator::baoab, QoISpec{}, 803, 640, tight), 1, 5, n,
                  g_workers);
  const double ba_slope = slope_over(ba_rows, 1, 5);

  report(8, "regularisation sensitivity at eps_reg = 0.001",
         se_slope < 1.5 && gl_slope < 1.5 && ba_slope >= 1.7,
         fmt("variance slopes: se=%.2f (M0=270, want < 1.5), gl=%.2f (M0=40, want < "
             "1.5), baoab=%.2f (M0=640, want >= 1.7)",
             se_slope, gl_slope, ba_slope));
}

// ---------------------------------------------------------------------------
// Criterion 9: smoothing polynomial correctness.
// ---------------------------------------------------------------------------

void criterion_9() {
  const auto p2 = build_smoothing_polynomial(2);
  const bool r2_ok = std::abs(p2.coeffs[0] - 0.5) <= 1e-12 &&
                     std::abs(p2.coeffs[1] + 1.125) <= 1e-12 &&
                     std::abs(p2.coeffs[2]) <= 1e-12 &&
                     std::abs(p2.coeffs[3] - 0.625) <= 1e-12;

  double worst = 0.0;
  for (int r = 0; r <= 8; ++r) {
    const auto p = build_smoothing_polynomial(r);
    worst = std::max(worst, std::abs(p.eval(-1.0) - 1.0));
    worst = std::max(worst, std::abs(p.eval(1.0)));
    for (int j = 0; j < r; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < p.coeffs.size(); ++i)
        if ((int(i) + j) % 2 == 0) m += p.coeffs[i] * 2.0 / double(int(i) + j + 1);
      worst = std::max(worst, std::abs(m - ((j % 2 == 0) ? 1.0 : -1.0) / double(j + 1)));
    }
  }
  report(9, "smoothing polynomial coefficients and moment residuals",
         r2_ok && worst <= 1e-10,
         fmt("r=2 coefficients (1/2, -9/8, 0, 5/8) to 1e-12: %s; worst residual for "
             "r <= 8: %.2g (want <= 1e-10)",
             r2_ok ? "yes" : "NO", worst));
}

// ---------------------------------------------------------------------------
// Criterion 10: adaptive timestepping.
// ---------------------------------------------------------------------------

void criterion_10() {
  SampleOptions ad;
  ad.adaptive = true;
  ad.x_adapt = 0.05;

  // (a) adaptive SE variance decay
  const auto ad_rows = decay_sweep(
      make_problem(Integrator::se, QoISpec{}, 1001, 40, ModelParams{}, ad), 1, 5,
      100000, g_workers);
  const double ad_slope = slope_over(ad_rows, 2, 5);

  // (b) cost at fixed eps: adaptive within 1.2x of uniform (step-count cost)
  MlmcOptions o;
  o.workers = g_workers;
  const double eps = 5e-4;
  const RunResult uni =
      run_mlmc(make_problem(Integrator::se, QoISpec{}, 1002), eps, o);
  const RunResult ada =
      run_mlmc(make_problem(Integrator::se, QoISpec{}, 1002, 40, ModelParams{}, ad),
               eps, o);
  const double cost_ratio = double(ada.total_cost_steps) / double(uni.total_cost_steps);

  // (c) adaptive GL bias against uniform GL bias at the matched base step
  const auto gl_uni_rows = decay_sweep(
      make_problem(Integrator::gl, QoISpec{}, 1003), 1, 4, 400000, g_workers);
  const auto gl_ad_rows = decay_sweep(
      make_problem(Integrator::gl, QoISpec{}, 1003, 40, ModelParams{}, ad), 1, 4,
      400000, g_workers);
  const auto fit_of = [](const std::vector<DecayRow>& rows) {
    std::vector<BiasPoint> pts;
    for (const auto& r : rows) pts.push_back({r.h, std::abs(r.mean_y), r.se_mean});
    return estimate_bias_constants(pts);
  };
  const double h_ref = 1.0 / 80.0;
  const double bias_ratio =
      fit_of(gl_ad_rows).bias_at(h_ref) / fit_of(gl_uni_rows).bias_at(h_ref);

  report(10, "adaptive timestepping (SE gains, GL bias anomaly)",
         ad_slope >= 1.7 && ad_slope <= 2.3 && cost_ratio <= 1.2 &&
             bias_ratio >= 1.5 && bias_ratio <= 6.0,
         fmt("adaptive SE variance slope = %.2f (want 1.7..2.3); adaptive/uniform SE "
             "cost at eps=5e-4: %.2fx (want <= 1.2); adaptive/uniform GL bias at h=%.4g: "
             "%.1fx (want 1.5..6, the source reports ~3x and flags it as "
             "counter-intuitive)",
             ad_slope, cost_ratio, h_ref, bias_ratio));
}

// ---------------------------------------------------------------------------
// Criterion 11: sample-allocation sanity for the SE mean-position setup.
// ---------------------------------------------------------------------------

void criterion_11() {
  MlmcOptions o;
  o.workers = g_workers;
  const RunResult r = run_mlmc(make_problem(Integrator::se, QoISpec{}, 1101), 3e-4, o);
  bool monotone = true;
  for (std::size_t l = 1; l < r.level_stats.size(); ++l)
    if (r.level_stats[l].n > r.level_stats[l - 1].n) monotone = false;
  const double ratio = double(r.level_stats[0].n) / double(r.level_stats[1].n);
  std::string ns;
  for (const auto& st : r.level_stats) ns += std::to_string(st.n) + " ";
  report(11, "allocated samples decrease across levels", monotone && ratio >= 4.0 &&
             ratio <= 16.0,
         fmt("N_l = [ %s] at eps=3e-4, L=%d; N0/N1 = %.1f (want 4..16, table value ~8)",
             ns.c_str(), r.levels_used, ratio));
}

// ---------------------------------------------------------------------------
// Criterion 12: byte-identical outputs for 1 vs 4 workers through the CLI.
// ---------------------------------------------------------------------------

void criterion_12() {
  if (g_cli_path.empty() || !fs::exists(g_cli_path)) {
    report(12, "reproducibility across worker counts", false,
           "CLI binary not found; pass --cli PATH");
    return;
  }
  const fs::path base = fs::temp_directory_path() / "ablmc_accept_repro";
  std::error_code ec;
  fs::remove_all(base, ec);
  const fs::path cfg_path = base / "run.cfg";
  fs::create_directories(base);
  {
    std::ofstream cfg(cfg_path);
    cfg << "[run]\nmethod = mlmc\nintegrator = gl\neps = 5e-3\nseed = 4242\n"
           "timings = off\n";
  }
  bool ok = true;
  std::string detail;
  std::array<std::string, 2> results;
  std::array<std::string, 2> sweeps;
  const std::array<int, 2> workers{1, 4};
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / ("w" + std::to_string(workers[std::size_t(i)]));
    const std::string cmd_run = "\"" + g_cli_path + "\" run --config " +
                                cfg_path.string() + " --workers " +
                                std::to_string(workers[std::size_t(i)]) +
                                " --output-dir " + dir.string() + " >/dev/null 2>&1";
    const std::string cmd_sweep =
        "\"" + g_cli_path + "\" variance-decay --config " + cfg_path.string() +
        " --levels 3 --samples 20000 --workers " +
        std::to_string(workers[std::size_t(i)]) + " --output-dir " + dir.string() +
        " >/dev/null 2>&1";
    if (std::system(cmd_run.c_str()) != 0 || std::system(cmd_sweep.c_str()) != 0) {
      ok = false;
      detail = "CLI invocation failed";
      break;
    }
    results[std::size_t(i)] = slurp(dir / "result.json");
    sweeps[std::size_t(i)] = slurp(dir / "variance_decay.csv");
  }
  if (ok) {
    ok = !results[0].empty() && results[0] == results[1] && !sweeps[0].empty() &&
         sweeps[0] == sweeps[1];
    detail = fmt("result.json %s (%zu bytes), variance_decay.csv %s (%zu bytes)",
                 results[0] == results[1] ? "identical" : "DIFFERS", results[0].size(),
                 sweeps[0] == sweeps[1] ? "identical" : "DIFFERS", sweeps[0].size());
  }
  report(12, "byte-identical outputs for 1 vs 4 workers", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli_path = argv[++i];
    } else if (arg == "--workers" && i + 1 < argc) {
      g_workers = std::atoi(argv[++i]);
    } else {
      selected.insert(std::atoi(arg.c_str()));
    }
  }
  if (g_cli_path.empty()) {
    const fs::path guess = fs::path(argv[0]).parent_path().parent_path().parent_path() /
                           "tools" / "ablmc";
    if (fs::exists(guess)) g_cli_path = guess.string();
  }
  const auto want = [&](int c) { return selected.empty() || selected.count(c) > 0; };

  const double t0 = now_s();
  try {
    criteria_1_and_6(want(1), want(6));
    if (want(2)) criterion_2();
    if (want(3)) criterion_3();
    if (want(4)) criterion_4();
    if (want(5)) criterion_5();
    if (want(7)) criterion_7();
    if (want(8)) criterion_8();
    if (want(9)) criterion_9();
    if (want(10)) criterion_10();
    if (want(11)) criterion_11();
    if (want(12)) criterion_12();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 99;
  }
  std::printf("acceptance finished in %.0f s with %d failing criteria\n", now_s() - t0,
              g_failures);
  return g_failures;
}

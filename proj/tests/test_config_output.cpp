#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ablmc/config.hpp"
#include "ablmc/output.hpp"

using namespace ablmc;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("empty config yields the headline defaults", "[config]") {
  const RunConfig c = parse_config("");
  CHECK(c.model.kappa_sigma == 1.3);
  CHECK(c.model.kappa_tau == 0.5);
  CHECK(c.model.u_star == 0.2);
  CHECK(c.model.H == 1.0);
  CHECK(c.model.eps_reg == 0.01);
  CHECK(c.x0 == 0.05);
  CHECK(c.u0 == 0.1);
  CHECK(c.T == 1.0);
  CHECK(c.m0 == 40);
  CHECK(c.method == Method::mlmc);
  CHECK(c.integrator == Integrator::gl);
  CHECK(c.qoi_kind == QoIKind::mean_position);
  CHECK(c.coupling_signs);
}

TEST_CASE("config parsing", "[config]") {
  const char* text =
      "# headline concentration run\n"
      "[model]\n"
      "eps_reg = 0.02\n"
      "[run]\n"
      "integrator = baoab\n"
      "method = stmc\n"
      "eps = 5e-4\n"
      "seed = 99\n"
      "x0 = 0.2  # release height\n"
      "[qoi]\n"
      "kind = smoothed-indicator\n"
      "r = 6\n";
  const RunConfig c = parse_config(text);
  CHECK(c.model.eps_reg == 0.02);
  CHECK(c.integrator == Integrator::baoab);
  CHECK(c.method == Method::stmc);
  CHECK(c.eps == 5e-4);
  CHECK(c.seed == 99);
  CHECK(c.x0 == 0.2);
  CHECK(c.qoi_kind == QoIKind::smoothed_indicator);
  CHECK(c.qoi_r == 6);
}

TEST_CASE("config errors carry line numbers and name the violation", "[config]") {
  CHECK_THROWS_WITH(parse_config("[model]\nepsreg = 0.1\n"),
                    ContainsSubstring("line 2") && ContainsSubstring("unknown key"));
  CHECK_THROWS_WITH(parse_config("[nope]\n"), ContainsSubstring("unknown section"));
  CHECK_THROWS_WITH(parse_config("[model]\nkappa_sigma 1.3\n"),
                    ContainsSubstring("key = value"));
  CHECK_THROWS_WITH(parse_config("[model]\nkappa_sigma = abc\n"),
                    ContainsSubstring("expected a number"));
  // invariant violations surface from validate()
  CHECK_THROWS_WITH(parse_config("[model]\neps_reg = 0.6\n"),
                    ContainsSubstring("eps_reg"));
  // SE stability: h0 = 1/20 = 0.05 >= 2/lambda(eps_reg) ~ 0.0388
  CHECK_THROWS_WITH(parse_config("[run]\nintegrator = se\nm0 = 20\n"),
                    ContainsSubstring("unstable"));
  CHECK_NOTHROW(parse_config("[run]\nintegrator = se\nm0 = 40\n"));
  // adaptive lifts the uniform constraint
  CHECK_NOTHROW(parse_config("[run]\nintegrator = se\nm0 = 20\nadaptive = on\n"));
  CHECK_THROWS_WITH(parse_config("[run]\nintegrator = baoab\nadaptive = on\n"),
                    ContainsSubstring("adaptive"));
}

TEST_CASE("config echo round-trips through JSON", "[config][output]") {
  const RunConfig c = parse_config(
      "[run]\nintegrator = se\nseed = 7\nworkers = 3\n[qoi]\nkind = binned-field\nbins = "
      "10\n[output]\ndir = /tmp/somewhere\n");
  const json j = to_json(c);
  const RunConfig back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.qoi_bins == 10);
  CHECK(back.workers == 3);
  CHECK(back.output_dir == "/tmp/somewhere");
}

TEST_CASE("output record round-trips losslessly", "[output]") {
  OutputRecord rec;
  rec.config = parse_config("");
  rec.config.timings = true;
  RunResult& r = rec.result;
  r.estimate = {0.13010000000000001};
  r.stat_error = {7.0710678118654757e-4};
  r.bias_estimate = 3.3e-4;
  r.alpha = 1.02;
  r.c1 = 0.0421;
  r.levels_used = 2;
  r.total_cost_steps = 123456;
  r.pilot_cost_steps = 2345;
  r.failed_samples = 0;
  r.wall_seconds = 1.25;
  LevelStats st;
  st.init(0, 0.025, 1);
  st.sum_y = {17.125};
  st.sum_y2 = {3.0625e-1};
  st.n = 100;
  st.cost_steps = 4000;
  r.level_stats.push_back(st);

  const json j = to_json(rec);
  const OutputRecord back = output_record_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.result.estimate[0] == r.estimate[0]);
  CHECK(back.result.level_stats[0].sum_y[0] == 17.125);

  // readers reject other schema versions cleanly
  json wrong = j;
  wrong["schema_version"] = 2;
  CHECK_THROWS_WITH(output_record_from_json(wrong), ContainsSubstring("schema version"));
}

TEST_CASE("csv schemas", "[output]") {
  CHECK(variance_decay_csv({}) == "level,h,var_Y,mean_Y,n_samples,cost_steps\n");
  CHECK(cost_sweep_csv({}, true) ==
        "eps,method,integrator,cost_steps,wall_seconds,estimate,stat_error\n");

  DecayRow row{3, 0.003125, 1.5e-6, -2e-4, 0.0, 100000, 4200000};
  const std::string csv = variance_decay_csv({&row, 1});
  CHECK_THAT(csv, ContainsSubstring("3,0.0031250000000000002,1.5e-06,"
                                    "-0.00020000000000000001,100000,4200000\n"));

  CostRow cr{1e-3, Method::mlmc, Integrator::gl, 999, 0.5, 0.1301, 3e-4};
  CHECK_THAT(cost_sweep_csv({&cr, 1}, false), ContainsSubstring("mlmc,gl,999,0,"));
  CHECK_THAT(cost_sweep_csv({&cr, 1}, true), ContainsSubstring("mlmc,gl,999,0.5,"));

  const double edges[3] = {0.0, 0.5, 1.0};
  const double conc[2] = {0.25, 0.75};
  const double se[2] = {1e-3, 2e-3};
  const std::string pdf = pdf_csv(edges, conc, se);
  CHECK_THAT(pdf, ContainsSubstring("bin_lo,bin_hi,concentration,std_error\n"));
  CHECK_THAT(pdf, ContainsSubstring("0,0.5,0.25,0.001\n"));
  CHECK_THAT(pdf, ContainsSubstring("0.5,1,0.75,0.002\n"));
}

TEST_CASE("all emitted numbers are finite", "[output]") {
  // NaN/Inf anywhere in an output record is a defect; spot-check the JSON
  OutputRecord rec;
  rec.config = parse_config("");
  rec.result.estimate = {0.1};
  rec.result.stat_error = {1e-3};
  const std::string dumped = to_json(rec).dump();
  CHECK(dumped.find("nan") == std::string::npos);
  CHECK(dumped.find("inf") == std::string::npos);
}

// Copyright (c) dpdopt contributors. Apache-2.0 license.
//
// Command-line front end: validate instances, run the distributed solver,
// reproduce the random-instance benchmark, and re-check saved runs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpd/certify.hpp"
#include "dpd/dynamics.hpp"
#include "dpd/errors.hpp"
#include "dpd/harness.hpp"
#include "dpd/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int cmd_validate(const std::string& file) {
  const dpd::CoupledProblem problem = dpd::load_instance(file);
  const dpd::ValidationReport report = dpd::validate(problem);
  for (const auto& check : report.checks) {
    std::printf("%-38s %s%s%s\n", check.name.c_str(), check.passed ? "pass" : "FAIL",
                check.detail.empty() ? "" : "  ", check.detail.c_str());
  }
  if (!report.all_passed()) {
    std::printf("validation failed\n");
    return 1;
  }
  std::printf("all checks passed\n");
  return 0;
}

int cmd_run(const std::optional<std::string>& file, bool example1, double h, double T,
            std::optional<double> K, int record_every, const std::string& out_dir) {
  dpd::CoupledProblem problem = example1 ? dpd::build_example1() : dpd::load_instance(*file);

  dpd::SolverConfig config;
  config.step_h = h;
  config.horizon_T = T;
  config.K = K;
  config.record_every = record_every;
  config.check();

  const double gain = K ? *K : dpd::penalty_gain(problem);
  std::printf("agents=%d M=%d K=%.6g h=%g T=%g\n", problem.n_agents(), problem.m_constraints(), gain,
              h, T);
  config.K = gain;

  const dpd::RunRecord record = dpd::run(problem, config);
  dpd::write_run_dir(out_dir, problem, record, config);

  const json summary = dpd::summary_json(problem, record, config);
  std::printf("final t=%.6g\n", record.final_state.t);
  std::printf("consensus residual (final multipliers):  %.6e\n",
              summary.at("consensus_residual").get<double>());
  std::printf("consensus residual (averaged):           %.6e\n",
              summary.at("consensus_residual_avg").get<double>());
  const auto& kkt = summary.at("kkt_final");
  std::printf("kkt: stationarity=%.3e complementarity=%.3e viol=%.3e dual=%.3e\n",
              kkt.at("stationarity").get<double>(), kkt.at("complementarity").get<double>(),
              kkt.at("primal_violation").get<double>(), kkt.at("dual_feasibility").get<double>());
  std::printf("empirical theta0 = %.6g\n", summary.at("theta0").get<double>());
  std::printf("run written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_bench(int n, int m, int trials, std::uint64_t seed, double h, double T) {
  dpd::BenchConfig config;
  config.n_agents = n;
  config.m_constraints = m;
  config.trials = trials;
  config.seed = seed;
  config.step_h = h;
  config.horizon_T = T;
  const dpd::BenchResult result = dpd::bench_random(config);
  std::printf("trials=%d used=%d failed=%d (N=%d, M=%d, seed=%llu)\n", trials, result.used,
              result.failed, n, m, static_cast<unsigned long long>(seed));
  std::printf("%8s %12s %12s %12s\n", "", "t=20", "t=60", "t=100");
  std::printf("%8s %12.4f %12.4f %12.4f\n", "mean e", result.mean_e20, result.mean_e60,
              result.mean_e100);
  return result.used > 0 ? 0 : 1;
}

int cmd_certify(const std::string& dir_arg) {
  const fs::path dir(dir_arg);
  const dpd::CoupledProblem problem = dpd::load_instance(dir / "instance.json");
  const auto rows = dpd::read_trajectory_csv(dir / "trajectory.csv", problem);
  std::ifstream sin(dir / "summary.json");
  if (!sin) throw dpd::ParseError("cannot open summary.json");
  json summary;
  sin >> summary;

  int failures = 0;
  auto check = [&](const char* name, bool ok, const std::string& detail) {
    std::printf("%-28s %s  %s\n", name, ok ? "pass" : "FAIL", detail.c_str());
    if (!ok) ++failures;
  };

  // Feasibility of every recorded sample.
  bool feasible = true;
  double lam_min = 0.0;
  for (const auto& row : rows) {
    for (int i = 0; i < problem.n_agents(); ++i) {
      feasible = feasible && problem.agent(i).set.contains(row.x[i], dpd::kFeasibilityTol);
      lam_min = std::min(lam_min, row.lambda.of(i).minCoeff());
    }
  }
  check("samples_feasible", feasible && lam_min >= 0.0,
        feasible ? "" : "a recorded sample leaves its local set");

  // KKT at the final sample with the mean multiplier.
  const auto& last = rows.back();
  const dpd::KktReport kkt = dpd::kkt_residual(problem, last.x, last.lambda.mean());
  check("kkt_final", kkt.max_residual() < 1e-3,
        "max residual " + std::to_string(kkt.max_residual()));

  // Lyapunov decrease against the stored reference, with the recorded slack.
  dpd::SaddleReference ref;
  ref.x = Eigen::Map<const dpd::Vector>(summary.at("reference").at("x").get<std::vector<double>>().data(),
                                        problem.total_dim());
  {
    const auto lam = summary.at("reference").at("lambda").get<std::vector<double>>();
    ref.lambda = Eigen::Map<const dpd::Vector>(lam.data(), static_cast<int>(lam.size()));
  }
  const double h = summary.at("config").at("h").get<double>();
  const int record_every = summary.at("config").at("record_every").get<int>();
  const double fbound = summary.at("field_norm_bound").get<double>();
  const double slack = record_every * h * h * 0.5 * fbound * fbound;
  bool monotone = true;
  double prev = 0.0;
  for (std::size_t s = 0; s < rows.size(); ++s) {
    dpd::NetworkState st{rows[s].x, rows[s].lambda, rows[s].t};
    const double V = dpd::lyapunov_value(st, problem, ref);
    if (s > 0 && V > prev + slack) monotone = false;
    prev = V;
  }
  check("lyapunov_monotone", monotone, "slack " + std::to_string(slack));

  // Rate product from averages recomputed at sample resolution.
  const double saddle = summary.at("saddle_value").get<double>();
  dpd::MultiplierStack lam_int(problem.n_agents(), problem.m_constraints());
  std::vector<dpd::Vector> x_int;
  for (const auto& xi : rows.front().x) x_int.push_back(dpd::Vector::Zero(xi.size()));
  double value_at_1 = -1.0, sup = 0.0;
  for (std::size_t s = 1; s < rows.size(); ++s) {
    const double dt = rows[s].t - rows[s - 1].t;
    for (int i = 0; i < problem.n_agents(); ++i) {
      x_int[i] += 0.5 * dt * (rows[s].x[i] + rows[s - 1].x[i]);
      lam_int.of(i) += 0.5 * dt * (rows[s].lambda.of(i) + rows[s - 1].lambda.of(i));
    }
    const double t = rows[s].t;
    if (t < 1.0 - 1e-9) continue;
    std::vector<dpd::Vector> xh;
    for (int i = 0; i < problem.n_agents(); ++i) xh.push_back(x_int[i] / t);
    dpd::MultiplierStack lh(problem.n_agents(), problem.m_constraints());
    for (int i = 0; i < problem.n_agents(); ++i) lh.of(i) = lam_int.of(i) / t;
    const double gap =
        std::abs(dpd::modified_lagrangian(problem, xh, lh, summary.at("K").get<double>()) - saddle);
    const double product = t * gap;
    if (value_at_1 < 0.0) value_at_1 = product;
    sup = std::max(sup, product);
  }
  if (value_at_1 > 0.0) {
    check("rate_bounded", sup <= 10.0 * value_at_1,
          "sup " + std::to_string(sup) + " vs 10x first " + std::to_string(10.0 * value_at_1));
  } else {
    check("rate_bounded", false, "no averages at t >= 1 (horizon too short or trajectory too coarse)");
  }

  if (failures > 0) {
    std::printf("%d certification check(s) failed\n", failures);
    return 1;
  }
  std::printf("certification checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed projected primal-dual subgradient solver for convex programs with coupled inequality constraints"};
  app.set_help_flag("--help", "print help");  // frees -h / --h for the step size
  app.require_subcommand(1);

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "Check an instance file against the standing assumptions");
  validate->set_help_flag("--help", "print help");
  validate->add_option("instance", validate_file, "instance JSON file")->required();

  std::optional<std::string> run_file;
  bool run_example1 = false;
  double run_h = 1e-3, run_T = 100.0;
  std::optional<double> run_K;
  int run_record = 100;
  std::string run_out = "run_out";
  auto* run = app.add_subcommand("run", "Run the distributed dynamics and write a run directory");
  run->set_help_flag("--help", "print help");
  run->add_option("instance", run_file, "instance JSON file");
  run->add_flag("--example1", run_example1, "use the built-in four-agent example");
  run->add_option("--h", run_h, "step size")->check(CLI::PositiveNumber);
  run->add_option("--T", run_T, "horizon")->check(CLI::PositiveNumber);
  run->add_option("--K", run_K, "penalty gain (default: penalty_gain(problem))");
  run->add_option("--record-every", run_record, "sample stride in steps")->check(CLI::PositiveNumber);
  run->add_option("--out", run_out, "output directory");

  int bench_n = 10, bench_m = 5, bench_trials = 100;
  std::uint64_t bench_seed = 0;
  double bench_h = 2e-5, bench_T = 100.0;
  auto* bench = app.add_subcommand("bench-random", "Random-instance protocol: mean relative errors at t=20,60,100");
  bench->set_help_flag("--help", "print help");
  bench->add_option("--n", bench_n, "agents")->check(CLI::Range(2, 1000000));
  bench->add_option("--m", bench_m, "coupled constraints")->check(CLI::PositiveNumber);
  bench->add_option("--trials", bench_trials, "number of random instances")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "base seed");
  bench->add_option("--h", bench_h, "step size")->check(CLI::PositiveNumber);
  bench->add_option("--T", bench_T, "horizon")->check(CLI::PositiveNumber);

  std::string certify_dir;
  auto* certify = app.add_subcommand("certify", "Re-check KKT, feasibility, Lyapunov and rate from a saved run");
  certify->set_help_flag("--help", "print help");
  certify->add_option("run_dir", certify_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_file);
    if (run->parsed()) {
      if (!run_example1 && !run_file) {
        std::fprintf(stderr, "error: give an instance file or --example1\n");
        return 2;
      }
      return cmd_run(run_file, run_example1, run_h, run_T, run_K, run_record, run_out);
    }
    if (bench->parsed()) return cmd_bench(bench_n, bench_m, bench_trials, bench_seed, bench_h, bench_T);
    if (certify->parsed()) return cmd_certify(certify_dir);
  } catch (const dpd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

// Copyright (c) dpdopt contributors. Apache-2.0 license.
//
// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line (plus
// indented sub-checks) and the binary exits nonzero if any requested
// criterion fails. Runs all criteria when invoked without arguments;
// `--emit-instances <dir>` regenerates the shipped instance files.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dpd/certify.hpp"
#include "dpd/dynamics.hpp"
#include "dpd/geometry.hpp"
#include "dpd/harness.hpp"
#include "dpd/io.hpp"
#include "../support.hpp"

using namespace dpd;
namespace fs = std::filesystem;

namespace {

Vector vec1(double a) { return (Vector(1) << a).finished(); }

struct Check {
  bool ok = true;
  void expect(const char* what, bool pass, const std::string& detail) {
    std::printf("    %-44s %s  %s\n", what, pass ? "ok" : "FAIL", detail.c_str());
    ok = ok && pass;
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Instance builders shared by several criteria. desk4 doubles as the crafted
// two-agent exact-penalty instance: asymmetric g_i with an active coupled
// constraint, optimum (0.4, 0.4), multiplier 1.
// ---------------------------------------------------------------------------

CoupledProblem crafted_2agent() {
  std::vector<AgentSpec> agents;
  const auto box = ConvexSet::box(vec1(0), vec1(1));
  const double offsets[2] = {-0.2, -0.6};
  for (int i = 0; i < 2; ++i) {
    agents.push_back(AgentSpec{i, box,
                               CostOracle(FunctionFamily::quadratic_form(Matrix::Identity(1, 1),
                                                                         vec1(-1.8), 0.81)),
                               ConstraintOracle({FunctionFamily::affine(vec1(1), offsets[i])}), 1});
  }
  Vector slater(2);
  slater << 0.1, 0.1;
  return CoupledProblem(std::move(agents), CommGraph(2, {{0, 1}}), 1, slater, std::nullopt);
}

CoupledProblem desk1() {  // f=(x-2)^2 on [0,1], g = x - 0.5 -> x* = 0.5
  std::vector<AgentSpec> agents;
  agents.push_back(AgentSpec{0, ConvexSet::box(vec1(0), vec1(1)),
                             CostOracle(FunctionFamily::quadratic_form(Matrix::Identity(1, 1),
                                                                       vec1(-4.0), 4.0)),
                             ConstraintOracle({FunctionFamily::affine(vec1(1), -0.5)}), 1});
  return CoupledProblem(std::move(agents), CommGraph(1, {}), 1, vec1(0.2), std::nullopt);
}

CoupledProblem desk2() {  // kink optimum: f = |x-0.3| + 0.1x on [0,1], g == -1 -> x* = 0.3
  std::vector<AgentSpec> agents;
  agents.push_back(AgentSpec{0, ConvexSet::box(vec1(0), vec1(1)),
                             CostOracle(FunctionFamily::sum({FunctionFamily::abs_deviation(1.0, vec1(0.3)),
                                                             FunctionFamily::affine(vec1(0.1), 0.0)})),
                             ConstraintOracle({FunctionFamily::affine(vec1(0), -1.0)}), 1});
  return CoupledProblem(std::move(agents), CommGraph(1, {}), 1);
}

CoupledProblem desk3() {  // symmetric pair: f_i=(x_i-1)^2, sum x <= 1 -> (0.5, 0.5)
  std::vector<AgentSpec> agents;
  const auto box = ConvexSet::box(vec1(0), vec1(1));
  for (int i = 0; i < 2; ++i) {
    agents.push_back(AgentSpec{i, box,
                               CostOracle(FunctionFamily::quadratic_form(Matrix::Identity(1, 1),
                                                                         vec1(-2.0), 1.0)),
                               ConstraintOracle({FunctionFamily::affine(vec1(1), -0.5)}), 1});
  }
  Vector slater(2);
  slater << 0.2, 0.2;
  return CoupledProblem(std::move(agents), CommGraph(2, {{0, 1}}), 1, slater, std::nullopt);
}

CoupledProblem desk5() {  // box-active optimum: f=(x-2)^2 on [0,1], g == -1 -> x* = 1
  std::vector<AgentSpec> agents;
  agents.push_back(AgentSpec{0, ConvexSet::box(vec1(0), vec1(1)),
                             CostOracle(FunctionFamily::quadratic_form(Matrix::Identity(1, 1),
                                                                       vec1(-4.0), 4.0)),
                             ConstraintOracle({FunctionFamily::affine(vec1(0), -1.0)}), 1});
  return CoupledProblem(std::move(agents), CommGraph(1, {}), 1, vec1(0.5), std::nullopt);
}

// ---------------------------------------------------------------------------
// Criterion 1: four-agent example reproduction at the stated parameters.
// ---------------------------------------------------------------------------
bool criterion1() {
  Check c;
  const auto problem = build_example1();
  const auto reference = reference_solution(problem, {1e-4, 1000.0, 1e-10, 1e-5, true});

  SolverConfig cfg;
  cfg.step_h = 1e-3;
  cfg.horizon_T = 100.0;
  cfg.record_every = 100;

  const auto start = std::chrono::steady_clock::now();
  const auto rec = run(problem, cfg, reference);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect("completes in < 60 s", seconds < 60.0, num(seconds) + " s");

  bool feasible = true;
  bool nonneg = true;
  for (const auto& s : rec.samples) {
    for (int i = 0; i < 4; ++i) {
      feasible = feasible && problem.agent(i).set.contains(s.x[i], 1e-9);
      nonneg = nonneg && (s.lambda.of(i).array() >= 0.0).all();
    }
  }
  c.expect("x_i in Omega_i within 1e-9 at every sample", feasible, "");
  c.expect("lambda >= 0 at every sample", nonneg, "");

  // V nonincreasing up to the accumulated per-step slack c*h^2 with
  // c = (field norm bound)^2 / 2 per step between recorded samples.
  const double slack = cfg.record_every * cfg.step_h * cfg.step_h * 0.5 * rec.field_norm_bound *
                       rec.field_norm_bound;
  bool monotone = true;
  double worst = 0.0;
  for (std::size_t s = 1; s < rec.diagnostics.size(); ++s) {
    const double up = rec.diagnostics[s].V - rec.diagnostics[s - 1].V;
    worst = std::max(worst, up);
    monotone = monotone && up <= slack;
  }
  c.expect("V nonincreasing up to c*h^2 slack", monotone,
           "worst increase " + num(worst) + ", slack " + num(slack));

  const double consensus = rec.final_state.lambda.max_pairwise_l1();
  c.expect("final consensus residual < 1e-3", consensus < 1e-3, num(consensus));

  double xerr = 0.0;
  for (int i = 0; i < 4; ++i)
    xerr = std::max(xerr, (rec.final_state.x[i] - reference.x.segment(problem.offset(i), 2))
                              .lpNorm<Eigen::Infinity>());
  c.expect("x(T) matches the centralized reference (linf < 1e-3)", xerr < 1e-3, num(xerr));
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 2: KKT certification at the end of every shipped-instance run.
// ---------------------------------------------------------------------------
bool criterion2() {
  Check c;
  struct Entry {
    const char* file;
    double h, T;
  };
  // Steps are chosen per instance so the O(h*K) multiplier chatter floor
  // sits below the 1e-3 gate; the four-agent example needs the T/h guard
  // limit (1e8 rounds).
  const Entry entries[] = {
      {"example1.json", 5e-7, 50.0},
      {"crafted_2agent.json", 1e-5, 100.0},
      {"desk1.json", 1e-5, 100.0},
      {"desk3.json", 1e-5, 100.0},
      {"desk5.json", 1e-5, 100.0},
  };
  const fs::path dir = fs::path(DPDOPT_SOURCE_DIR) / "instances";
  for (const auto& entry : entries) {
    const auto problem = load_instance(dir / entry.file);
    SolverConfig cfg;
    cfg.step_h = entry.h;
    cfg.horizon_T = entry.T;
    cfg.record_every = static_cast<int>(std::llround(entry.T / entry.h / 100));
    const auto rec = run(problem, cfg);
    const auto kkt = kkt_residual(problem, rec.final_state.x, rec.final_state.lambda.mean());
    const std::string detail = "stat " + num(kkt.stationarity) + ", comp " + num(kkt.complementarity) +
                               ", viol " + num(kkt.primal_violation) + ", dual " +
                               num(kkt.dual_feasibility);
    c.expect(entry.file, kkt.max_residual() < 1e-3, detail);
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 3: exact-penalty property on the crafted two-agent instance.
// ---------------------------------------------------------------------------
bool criterion3() {
  Check c;
  const auto problem = crafted_2agent();
  const auto xg = testing::grid_minimize_scalar(problem, 1e-3);

  SolverConfig cfg;
  cfg.step_h = 1e-5;
  cfg.horizon_T = 100.0;
  cfg.record_every = 100000;
  const auto rec = run(problem, cfg);

  const double consensus = rec.final_state.lambda.max_pairwise_l1();
  c.expect("K = penalty_gain: consensus residual < 1e-3", consensus < 1e-3,
           num(consensus) + " (K = " + num(rec.K) + ")");
  double xerr = 0.0;
  for (int i = 0; i < 2; ++i)
    xerr = std::max(xerr, std::abs(rec.final_state.x[i][0] - xg[i][0]));
  c.expect("K = penalty_gain: x(T) matches the grid oracle", xerr <= 1e-3 + 1e-9, num(xerr));

  SolverConfig off = cfg;
  off.K = 0.0;
  const auto rec0 = run(problem, off);
  const double consensus0 = rec0.final_state.lambda.max_pairwise_l1();
  double xerr0 = 0.0;
  for (int i = 0; i < 2; ++i)
    xerr0 = std::max(xerr0, std::abs(rec0.final_state.x[i][0] - xg[i][0]));
  c.expect("K = 0 control: consensus > 1e-1 or x-error > 1e-1",
           consensus0 > 1e-1 || xerr0 > 1e-1,
           "consensus " + num(consensus0) + ", x-error " + num(xerr0));
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 4: rate bound on the example and three random instances.
// ---------------------------------------------------------------------------
bool criterion4() {
  Check c;
  struct Case {
    std::string name;
    CoupledProblem problem;
    ReferenceConfig ref;
  };
  std::vector<Case> cases;
  cases.push_back({"example1", build_example1(), {1e-4, 1000.0, 1e-10, 1e-5, true}});
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    cases.push_back({"random N=5 M=2 seed=" + std::to_string(seed),
                     gen_random_instance({5, 2, seed}),
                     {1e-4, 1000.0, 1e-8, 1e-5, true}});
  }

  for (auto& entry : cases) {
    const auto reference = reference_solution(entry.problem, entry.ref);
    SolverConfig cfg;
    cfg.step_h = 1e-5;
    cfg.horizon_T = 100.0;
    cfg.record_every = 10000;  // averages every 0.1 time units
    const auto rec = run(entry.problem, cfg, reference);

    auto evaluate = [&](double saddle_value, double* value_at_1) {
      const auto cert = rate_certificate(rec, saddle_value);
      double v1 = -1.0, sup = 0.0;
      for (const auto& [t, product] : cert.series) {
        if (t < 1.0 - 1e-9) continue;
        if (v1 < 0.0) v1 = product;
        sup = std::max(sup, product);
      }
      *value_at_1 = v1;
      return sup;
    };

    double v1 = 0.0;
    const double sup = evaluate(rec.saddle_value, &v1);
    c.expect((entry.name + ": sup t*gap <= 10x value at t=1").c_str(), v1 > 0.0 && sup <= 10.0 * v1,
             "sup " + num(sup) + ", value@1 " + num(v1));

    double v1c = 0.0;
    const double supc = evaluate(rec.saddle_value + 1.0, &v1c);
    c.expect((entry.name + ": +1 offset exceeds the bound").c_str(), supc > 10.0 * v1c,
             "sup " + num(supc) + ", value@1 " + num(v1c));
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 5: random-instance protocol, N=10, M=5, 100 trials.
// ---------------------------------------------------------------------------
bool criterion5() {
  Check c;
  BenchConfig cfg;  // N=10, M=5, defaults
  cfg.trials = 100;
  cfg.seed = 0;

  const auto start = std::chrono::steady_clock::now();
  const auto result = bench_random(cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::printf("    mean e(20) = %.4f, e(60) = %.4f, e(100) = %.4f (used %d/%d trials)\n",
              result.mean_e20, result.mean_e60, result.mean_e100, result.used, cfg.trials);
  c.expect("completes in < 10 min", seconds < 600.0, num(seconds) + " s");
  c.expect("all trials produced a certified reference", result.used == cfg.trials,
           num(result.used) + " of " + num(cfg.trials));
  c.expect("mean e(100) < 0.05", result.mean_e100 < 0.05, num(result.mean_e100));
  c.expect("mean e nonincreasing across t = 20, 60, 100",
           result.mean_e20 >= result.mean_e60 && result.mean_e60 >= result.mean_e100, "");
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 6: desk-scale oracle equivalence against dense-grid brute force.
// ---------------------------------------------------------------------------
bool criterion6() {
  Check c;
  struct Entry {
    const char* name;
    CoupledProblem problem;
  };
  const Entry entries[] = {
      {"desk1 (active coupled constraint)", desk1()},
      {"desk2 (kink optimum)", desk2()},
      {"desk3 (symmetric pair)", desk3()},
      {"desk4 (asymmetric pair)", crafted_2agent()},
      {"desk5 (box-active optimum)", desk5()},
  };
  for (const auto& entry : entries) {
    const auto xg = testing::grid_minimize_scalar(entry.problem, 1e-3);
    SolverConfig cfg;
    cfg.step_h = 1e-5;
    cfg.horizon_T = 100.0;
    cfg.record_every = 100000;
    const auto rec = run(entry.problem, cfg);
    double err = 0.0;
    for (int i = 0; i < entry.problem.n_agents(); ++i)
      err = std::max(err, std::abs(rec.final_state.x[i][0] - xg[i][0]));
    c.expect(entry.name, err <= 1e-3 + 1e-9, "x-error " + num(err));
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// Criterion 7: property suites at 1,000 draws, zero failures.
// ---------------------------------------------------------------------------
bool criterion7() {
  Check c;
  {
    Rng rng(2024);
    int nonexpansive = 0, idempotent = 0, variational = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int dim = 1 + static_cast<int>(rng.below(4));
      const auto set = testing::random_set(rng, dim);
      const Vector a = testing::random_point_near(rng, set);
      const Vector b = testing::random_point_near(rng, set);
      const auto pa = project(set, a);
      const auto pb = project(set, b);
      if ((pa.point - pb.point).norm() <= (a - b).norm() + 1e-10) ++nonexpansive;
      if ((project(set, pa.point).point - pa.point).norm() <= 1e-10) ++idempotent;
      const Vector y = project(set, testing::random_point_near(rng, set)).point;
      if ((a - pa.point).dot(y - pa.point) <= 1e-8) ++variational;
    }
    c.expect("projection nonexpansiveness (1000 draws)", nonexpansive == 1000, num(nonexpansive));
    c.expect("projection idempotence (1000 draws)", idempotent == 1000, num(idempotent));
    c.expect("projection variational inequality (1000 draws)", variational == 1000, num(variational));
  }
  {
    // Convexity inequality and smooth-point finite differences per family.
    struct FamilyCase {
      const char* name;
      std::function<FunctionFamily(Rng&, int)> make;
      bool concave;
    };
    const FamilyCase cases[] = {
        {"quadratic_form",
         [](Rng& rng, int dim) {
           Matrix R(dim, dim);
           for (int r = 0; r < dim; ++r)
             for (int cc = 0; cc < dim; ++cc) R(r, cc) = rng.uniform(-1.0, 1.0);
           return FunctionFamily::quadratic_form(R.transpose() * R, rng.uniform_vector(dim, -2.0, 2.0),
                                                 rng.uniform(-1.0, 1.0));
         },
         false},
        {"euclidean_norm",
         [](Rng& rng, int) { return FunctionFamily::euclidean_norm(rng.uniform(0.0, 3.0)); }, false},
        {"abs_deviation",
         [](Rng& rng, int dim) {
           return FunctionFamily::abs_deviation(rng.uniform(0.0, 2.0),
                                                rng.uniform_vector(dim, -1.0, 1.0));
         },
         false},
        {"affine",
         [](Rng& rng, int dim) {
           return FunctionFamily::affine(rng.uniform_vector(dim, -2.0, 2.0), rng.uniform(-1.0, 1.0));
         },
         false},
        {"sum", [](Rng& rng, int dim) { return testing::random_convex_family(rng, dim); }, false},
        {"log_affine (concave)",
         [](Rng& rng, int dim) { return FunctionFamily::log_affine(rng.uniform_vector(dim, 0.0, 1.0)); },
         true},
    };
    for (const auto& fam : cases) {
      Rng rng(99);
      int inequality = 0, fd_ok = 0, fd_total = 0;
      for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 1 + static_cast<int>(rng.below(3));
        const auto f = fam.make(rng, dim);
        const Vector x = fam.concave ? rng.uniform_vector(dim, 0.0, 1.0)
                                     : rng.uniform_vector(dim, -2.0, 2.0);
        const Vector y = fam.concave ? rng.uniform_vector(dim, 0.0, 1.0)
                                     : rng.uniform_vector(dim, -2.0, 2.0);
        const double margin = f.eval(y) - f.eval(x) - f.subgrad(x).dot(y - x);
        if (fam.concave ? margin <= 1e-9 : margin >= -1e-9) ++inequality;
        if (f.differentiable_at(x, 1e-4)) {
          ++fd_total;
          const Vector fd = testing::fd_gradient([&](const Vector& p) { return f.eval(p); }, x);
          if ((f.subgrad(x) - fd).lpNorm<Eigen::Infinity>() < 1e-5) ++fd_ok;
        }
      }
      c.expect((std::string("subgradient inequality: ") + fam.name).c_str(), inequality == 1000,
               num(inequality));
      c.expect((std::string("finite-difference agreement: ") + fam.name).c_str(), fd_ok == fd_total,
               num(fd_ok) + " of " + num(fd_total));
    }
  }
  {
    // sqrt(N) phi(Lambda) > d_S(Lambda) on nonconsensus stacks.
    Rng rng(404);
    int held = 0, tested = 0;
    while (tested < 1000) {
      const int n = 2 + static_cast<int>(rng.below(6));
      const int m = 1 + static_cast<int>(rng.below(4));
      std::vector<std::pair<int, int>> edges;
      for (int i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.below(i)), i);
      for (int extra = 0; extra < n; ++extra) {
        const int i = static_cast<int>(rng.below(n)), j = static_cast<int>(rng.below(n));
        if (i != j) edges.emplace_back(std::min(i, j), std::max(i, j));
      }
      const CommGraph graph(n, edges);
      std::vector<Vector> rows(n);
      for (int i = 0; i < n; ++i) rows[i] = rng.uniform_vector(m, 0.0, 3.0);
      const MultiplierStack lam(rows);
      if (lam.max_pairwise_l1() <= 1e-9) continue;
      ++tested;
      if (std::sqrt(static_cast<double>(n)) * consensus_penalty(graph, lam) >
          lam.distance_to_consensus())
        ++held;
    }
    c.expect("sqrt(N)*phi > d_S on nonconsensus stacks (1000 draws)", held == 1000, num(held));
  }
  return c.ok;
}

void emit_instances(const fs::path& dir) {
  fs::create_directories(dir);
  save_instance(dir / "example1.json", build_example1());
  save_instance(dir / "crafted_2agent.json", crafted_2agent());
  save_instance(dir / "desk1.json", desk1());
  save_instance(dir / "desk3.json", desk3());
  save_instance(dir / "desk5.json", desk5());
  std::printf("instances written to %s\n", dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 2 && std::strcmp(argv[1], "--emit-instances") == 0) {
    emit_instances(argc >= 3 ? fs::path(argv[2]) : fs::path(DPDOPT_SOURCE_DIR) / "instances");
    return 0;
  }

  struct Criterion {
    int id;
    const char* name;
    bool (*fn)();
  };
  const Criterion criteria[] = {
      {1, "four-agent example reproduction (h=1e-3, T=100, K=penalty_gain)", criterion1},
      {2, "KKT certification on every shipped instance", criterion2},
      {3, "exact-penalty property and K=0 negative control", criterion3},
      {4, "rate bound t*|Lagrangian gap| on example and random instances", criterion4},
      {5, "random-instance protocol (N=10, M=5, 100 trials)", criterion5},
      {6, "desk-scale oracle equivalence vs dense grid", criterion6},
      {7, "property suites at 1000 draws", criterion7},
  };

  std::vector<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), criterion.id) == wanted.end())
      continue;
    std::printf("criterion %d: %s\n", criterion.id, criterion.name);
    bool ok = false;
    try {
      ok = criterion.fn();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
    }
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name);
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <cstdint>
#include <vector>

#include "dpd/certify.hpp"
#include "dpd/dynamics.hpp"
#include "dpd/problem.hpp"

namespace dpd {

// Four agents on a cycle, n_i = 2, M = 2. Costs
//   f_i(x) = (x_1 + a_{i1} x_2)^2 + x_1 + a_{i2} x_2 + ||x||
// and constraint rows
//   g_{i1}(x) = ||x|| - d_{i1},  g_{i2}(x) = -x_1 - x_2 + d_{i2},
// with the published parameter table and initial points. The second
// inequality of the second and fourth local sets is read as constraining the
// second coordinate (the printed source repeats the first coordinate, an
// evident typo).
CoupledProblem build_example1();

struct RandomInstanceSpec {
  int n_agents = 10;
  int m_constraints = 5;
  std::uint64_t seed = 0;
  double coeff_lo = 0.0, coeff_hi = 1.0;  // a,b,c,d,e and P entry range
  double margin = 0.1;                    // Slater margin: q = P xbar + margin
};

// Scalar agents on [0,1] with cost a x^2 + ln(1 + b x) + c|x - d| + e x and
// affine coupled rows g = P x - q, q = P xbar + margin for a uniform interior
// xbar (Slater holds by construction; sum_i g_i(xbar_i) = -margin exactly).
// Graph: Erdos-Renyi with edge probability min(1, 2 ln N / N), resampled
// until connected. Fully deterministic per seed. x(0) = 0.5 per agent.
CoupledProblem gen_random_instance(const RandomInstanceSpec& spec);

struct ReferenceConfig {
  double step_h = 1e-4;
  double horizon_T = 1000.0;
  double stop_residual = 1e-8;  // on the step mapping norm ||z+ - z||_inf / h
  double kkt_gate = 1e-5;       // max KKT residual accepted at the output
  bool polish_kinks = true;     // snap hovering coordinates onto kink loci
};

// High-accuracy centralized solve used as the optimum oracle. Runs the
// centralized stepper until the mapping residual stalls below tolerance or
// the horizon ends, then (optionally) snaps coordinates onto nonsmooth kink
// loci when that does not increase the Lagrangian: a constant-step iterate
// can only hover near a kink optimum, never land on it. Throws LowAccuracy
// if the result fails the KKT gate.
SaddleReference reference_solution(const CoupledProblem& problem, const ReferenceConfig& config = {});

// Relative error max_i |x_i - x*_i|_1 / max_i |x*_i|_1.
// Throws DegenerateReference when the denominator is below 1e-12.
double relative_error(const std::vector<Vector>& x, const std::vector<Vector>& x_star);

struct BenchConfig {
  int n_agents = 10;
  int m_constraints = 5;
  int trials = 100;
  std::uint64_t seed = 0;
  double step_h = 2e-5;
  double horizon_T = 100.0;
  double margin = 0.1;
  ReferenceConfig reference{2e-4, 500.0, 1e-8, 1e-5, true};
};

struct BenchTrial {
  std::uint64_t seed = 0;
  double e20 = 0.0, e60 = 0.0, e100 = 0.0;
  bool ok = false;  // reference met its accuracy gate
};

struct BenchResult {
  std::vector<BenchTrial> trials;
  double mean_e20 = 0.0, mean_e60 = 0.0, mean_e100 = 0.0;
  int used = 0;    // trials entering the means
  int failed = 0;  // trials whose reference failed both attempts
};

// Random-instance protocol: for each trial, generate an instance, run the
// distributed dynamics, solve the centralized reference, and record the
// relative errors at t = 20, 60, 100. Trials are independent and merged by
// index; a reference failure is retried once at doubled accuracy and the
// trial is excluded (and counted) if it still fails.
BenchResult bench_random(const BenchConfig& config);

}  // namespace dpd

// Copyright (c) dpdopt contributors. Apache-2.0 license.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpd/dynamics.hpp"
#include "dpd/problem.hpp"

namespace dpd {

// Instance files are JSON; see docs/instance-format.md for the schema.
// parse(serialize(p)) is the identity on the canonical form.
nlohmann::json serialize_instance(const CoupledProblem& problem);
CoupledProblem parse_instance(const nlohmann::json& j);

CoupledProblem load_instance(const std::filesystem::path& file);
void save_instance(const std::filesystem::path& file, const CoupledProblem& problem);

// Trajectory CSV schema (one row per recorded sample):
//   t, x_1_1..x_N_nN, lam_1_1..lam_N_M, V, W, phi, viol, kkt
std::string trajectory_csv_header(const CoupledProblem& problem);
void write_trajectory_csv(const std::filesystem::path& file, const CoupledProblem& problem,
                          const RunRecord& record);

struct TrajectoryRow {
  double t = 0.0;
  std::vector<Vector> x;
  MultiplierStack lambda;
  double V = 0.0, W = 0.0, phi = 0.0, viol = 0.0, kkt = 0.0;
};
std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& file,
                                               const CoupledProblem& problem);

nlohmann::json summary_json(const CoupledProblem& problem, const RunRecord& record,
                            const SolverConfig& config);

// Run directory layout: instance.json, trajectory.csv, summary.json.
void write_run_dir(const std::filesystem::path& dir, const CoupledProblem& problem,
                   const RunRecord& record, const SolverConfig& config);

}  // namespace dpd

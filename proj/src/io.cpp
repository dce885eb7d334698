// Copyright (c) dpdopt contributors. Apache-2.0 license.

#include "dpd/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dpd/certify.hpp"
#include "dpd/errors.hpp"

namespace dpd {

using nlohmann::json;

namespace {

json vec_to_json(const Vector& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Vector vec_from_json(const json& a, const char* what) {
  if (!a.is_array() || a.empty()) throw ParseError(std::string(what) + ": expected a nonempty array");
  Vector v(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!a[k].is_number()) throw ParseError(std::string(what) + ": expected numbers");
    v[static_cast<int>(k)] = a[k].get<double>();
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r)));
  return rows;
}

Matrix matrix_from_json(const json& a, const char* what) {
  if (!a.is_array() || a.empty()) throw ParseError(std::string(what) + ": expected a matrix");
  const Vector first = vec_from_json(a[0], what);
  Matrix m(a.size(), first.size());
  m.row(0) = first;
  for (std::size_t r = 1; r < a.size(); ++r) {
    const Vector row = vec_from_json(a[r], what);
    if (row.size() != m.cols()) throw ParseError(std::string(what) + ": ragged matrix");
    m.row(static_cast<int>(r)) = row;
  }
  return m;
}

json set_to_json(const ConvexSet& set) {
  json j;
  if (set.is_box()) {
    j["type"] = "box";
    j["lower"] = vec_to_json(set.as_box().lower);
    j["upper"] = vec_to_json(set.as_box().upper);
  } else if (set.is_ball()) {
    j["type"] = "ball";
    j["center"] = vec_to_json(set.as_ball().center);
    j["radius"] = set.as_ball().radius;
  } else if (set.is_halfspaces()) {
    j["type"] = "halfspaces";
    json rows = json::array();
    for (const auto& r : set.as_halfspaces().rows)
      rows.push_back({{"normal", vec_to_json(r.normal)}, {"offset", r.offset}});
    j["rows"] = std::move(rows);
  } else {
    j["type"] = "product";
    json fs = json::array();
    for (const auto& f : set.as_product().factors) fs.push_back(set_to_json(f));
    j["factors"] = std::move(fs);
  }
  return j;
}

ConvexSet set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ParseError("set: missing type");
  const std::string type = j.at("type").get<std::string>();
  try {
    if (type == "box") return ConvexSet::box(vec_from_json(j.at("lower"), "box.lower"),
                                             vec_from_json(j.at("upper"), "box.upper"));
    if (type == "ball")
      return ConvexSet::ball(vec_from_json(j.at("center"), "ball.center"), j.at("radius").get<double>());
    if (type == "halfspaces") {
      std::vector<Halfspace> rows;
      for (const auto& r : j.at("rows"))
        rows.push_back(Halfspace{vec_from_json(r.at("normal"), "halfspace.normal"),
                                 r.at("offset").get<double>()});
      return ConvexSet::halfspaces(std::move(rows));
    }
    if (type == "product") {
      std::vector<ConvexSet> fs;
      for (const auto& f : j.at("factors")) fs.push_back(set_from_json(f));
      return ConvexSet::product(std::move(fs));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError("set: " + std::string(e.what()));
  } catch (const json::exception& e) {
    throw ParseError("set: " + std::string(e.what()));
  }
  throw ParseError("set: unknown type '" + type + "'");
}

json family_to_json(const FunctionFamily& f) {
  json j;
  if (f.is_quadratic_form()) {
    j["family"] = "quadratic_form";
    j["a"] = matrix_to_json(f.as_quadratic_form().A);
    j["b"] = vec_to_json(f.as_quadratic_form().b);
    j["c"] = f.as_quadratic_form().c;
  } else if (f.is_euclidean_norm()) {
    j["family"] = "euclidean_norm";
    j["weight"] = f.as_euclidean_norm().weight;
  } else if (f.is_abs_deviation()) {
    j["family"] = "abs_deviation";
    j["scale"] = f.as_abs_deviation().scale;
    j["center"] = vec_to_json(f.as_abs_deviation().center);
  } else if (f.is_log_affine()) {
    j["family"] = "log_affine";
    j["b"] = vec_to_json(f.as_log_affine().b);
  } else if (f.is_affine()) {
    j["family"] = "affine";
    j["p"] = vec_to_json(f.as_affine().p);
    j["q"] = f.as_affine().q;
  } else {
    j["family"] = "sum";
    json terms = json::array();
    for (const auto& t : f.as_sum().terms) terms.push_back(family_to_json(t));
    j["terms"] = std::move(terms);
  }
  return j;
}

FunctionFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family")) throw ParseError("function: missing family");
  const std::string family = j.at("family").get<std::string>();
  try {
    if (family == "quadratic_form")
      return FunctionFamily::quadratic_form(matrix_from_json(j.at("a"), "quadratic_form.a"),
                                            vec_from_json(j.at("b"), "quadratic_form.b"),
                                            j.at("c").get<double>());
    if (family == "euclidean_norm") return FunctionFamily::euclidean_norm(j.at("weight").get<double>());
    if (family == "abs_deviation")
      return FunctionFamily::abs_deviation(j.at("scale").get<double>(),
                                           vec_from_json(j.at("center"), "abs_deviation.center"));
    if (family == "log_affine") return FunctionFamily::log_affine(vec_from_json(j.at("b"), "log_affine.b"));
    if (family == "affine")
      return FunctionFamily::affine(vec_from_json(j.at("p"), "affine.p"), j.at("q").get<double>());
    if (family == "sum") {
      std::vector<FunctionFamily> terms;
      for (const auto& t : j.at("terms")) terms.push_back(family_from_json(t));
      return FunctionFamily::sum(std::move(terms));
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError("function: " + std::string(e.what()));
  } catch (const json::exception& e) {
    throw ParseError("function: " + std::string(e.what()));
  }
  throw ParseError("function: unknown family '" + family + "'");
}

void print_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

}  // namespace

json serialize_instance(const CoupledProblem& problem) {
  json j;
  j["n_agents"] = problem.n_agents();
  j["m_constraints"] = problem.m_constraints();
  json edges = json::array();
  for (auto [a, b] : problem.graph().edges()) edges.push_back({a + 1, b + 1});  // 1-based on disk
  j["edges"] = std::move(edges);
  json agents = json::array();
  for (const auto& a : problem.agents()) {
    json row;
    row["dim"] = a.dim;
    row["set"] = set_to_json(a.set);
    row["cost"] = family_to_json(a.cost.family());
    json rows = json::array();
    for (const auto& r : a.constraint.rows()) rows.push_back(family_to_json(r));
    row["constraint"] = {{"rows", std::move(rows)}};
    agents.push_back(std::move(row));
  }
  j["agents"] = std::move(agents);
  if (problem.slater_point()) j["slater_point"] = vec_to_json(*problem.slater_point());
  if (problem.initial_point()) j["x0"] = vec_to_json(*problem.initial_point());
  return j;
}

CoupledProblem parse_instance(const json& j) {
  try {
    const int n = j.at("n_agents").get<int>();
    const int m = j.at("m_constraints").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("edges: expected pairs");
      edges.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
    }
    const auto& agents_json = j.at("agents");
    if (static_cast<int>(agents_json.size()) != n)
      throw ParseError("agents: length differs from n_agents");
    std::vector<AgentSpec> agents;
    int id = 0;
    for (const auto& a : agents_json) {
      std::vector<FunctionFamily> rows;
      for (const auto& r : a.at("constraint").at("rows")) rows.push_back(family_from_json(r));
      if (static_cast<int>(rows.size()) != m) throw ParseError("constraint rows differ from m_constraints");
      agents.push_back(AgentSpec{id++, set_from_json(a.at("set")),
                                 CostOracle(family_from_json(a.at("cost"))),
                                 ConstraintOracle(std::move(rows)), a.at("dim").get<int>()});
    }
    std::optional<Vector> slater, x0;
    if (j.contains("slater_point")) slater = vec_from_json(j.at("slater_point"), "slater_point");
    if (j.contains("x0")) x0 = vec_from_json(j.at("x0"), "x0");
    CommGraph graph(n, edges);
    return CoupledProblem(std::move(agents), std::move(graph), m, std::move(slater), std::move(x0));
  } catch (const json::exception& e) {
    throw ParseError("instance: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw ParseError("instance: " + std::string(e.what()));
  }
}

CoupledProblem load_instance(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open instance file " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("instance: invalid JSON (" + std::string(e.what()) + ")");
  }
  return parse_instance(j);
}

void save_instance(const std::filesystem::path& file, const CoupledProblem& problem) {
  std::ofstream out(file);
  if (!out) throw ParseError("cannot write instance file " + file.string());
  out << serialize_instance(problem).dump(2) << "\n";
}

std::string trajectory_csv_header(const CoupledProblem& problem) {
  std::string h = "t";
  for (int i = 0; i < problem.n_agents(); ++i)
    for (int k = 0; k < problem.agent(i).dim; ++k)
      h += ",x_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
  for (int i = 0; i < problem.n_agents(); ++i)
    for (int k = 0; k < problem.m_constraints(); ++k)
      h += ",lam_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
  h += ",V,W,phi,viol,kkt";
  return h;
}

void write_trajectory_csv(const std::filesystem::path& file, const CoupledProblem& problem,
                          const RunRecord& record) {
  std::ofstream out(file);
  if (!out) throw ParseError("cannot write trajectory file " + file.string());
  out << trajectory_csv_header(problem) << "\n";
  std::string line;
  for (std::size_t s = 0; s < record.samples.size(); ++s) {
    const auto& state = record.samples[s];
    const auto& diag = record.diagnostics[s];
    line.clear();
    print_double(line, state.t);
    for (const auto& xi : state.x)
      for (int k = 0; k < xi.size(); ++k) {
        line += ',';
        print_double(line, xi[k]);
      }
    for (int i = 0; i < state.lambda.n_agents(); ++i)
      for (int k = 0; k < state.lambda.m(); ++k) {
        line += ',';
        print_double(line, state.lambda.of(i)[k]);
      }
    for (double v : {diag.V, diag.W, diag.phi, diag.violation, diag.kkt_max}) {
      line += ',';
      print_double(line, v);
    }
    out << line << "\n";
  }
}

std::vector<TrajectoryRow> read_trajectory_csv(const std::filesystem::path& file,
                                               const CoupledProblem& problem) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open trajectory file " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trajectory: empty file");
  if (line != trajectory_csv_header(problem))
    throw ParseError("trajectory: header does not match the instance layout");

  const int n = problem.n_agents(), m = problem.m_constraints();
  std::vector<TrajectoryRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::size_t at = 0;
    while (at <= line.size()) {
      const std::size_t comma = line.find(',', at);
      const std::string_view tok(line.data() + at,
                                 (comma == std::string::npos ? line.size() : comma) - at);
      double v = 0.0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("trajectory: bad number at line " + std::to_string(lineno));
      vals.push_back(v);
      if (comma == std::string::npos) break;
      at = comma + 1;
    }
    const std::size_t expected = 1 + problem.total_dim() + static_cast<std::size_t>(n) * m + 5;
    if (vals.size() != expected)
      throw ParseError("trajectory: wrong column count at line " + std::to_string(lineno));
    TrajectoryRow row;
    std::size_t c = 0;
    row.t = vals[c++];
    for (int i = 0; i < n; ++i) {
      Vector xi(problem.agent(i).dim);
      for (int k = 0; k < xi.size(); ++k) xi[k] = vals[c++];
      row.x.push_back(std::move(xi));
    }
    MultiplierStack lam(n, m);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < m; ++k) lam.of(i)[k] = vals[c++];
    row.lambda = std::move(lam);
    row.V = vals[c++];
    row.W = vals[c++];
    row.phi = vals[c++];
    row.viol = vals[c++];
    row.kkt = vals[c++];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("trajectory: no samples");
  return rows;
}

json summary_json(const CoupledProblem& problem, const RunRecord& record, const SolverConfig& config) {
  json j;
  j["config"] = {{"h", config.step_h},
                 {"T", config.horizon_T},
                 {"record_every", config.record_every},
                 {"seed", config.seed},
                 {"diminishing_steps", config.diminishing_steps}};
  j["K"] = record.K;
  j["final"] = {{"t", record.final_state.t},
                {"x", vec_to_json(stack(record.final_state.x))},
                {"lambda", vec_to_json(record.final_state.lambda.stacked())}};
  j["final_average"] = {{"x_hat", vec_to_json(stack(record.final_average_x))},
                        {"lambda_hat", vec_to_json(record.final_average_lambda.stacked())}};
  j["reference"] = {{"x", vec_to_json(record.reference.x)},
                    {"lambda", vec_to_json(record.reference.lambda)}};
  j["saddle_value"] = record.saddle_value;
  j["field_norm_bound"] = record.field_norm_bound;

  const KktReport kkt = kkt_residual(problem, record.final_state.x, record.final_state.lambda.mean());
  j["kkt_final"] = {{"stationarity", kkt.stationarity},
                    {"complementarity", kkt.complementarity},
                    {"primal_violation", kkt.primal_violation},
                    {"dual_feasibility", kkt.dual_feasibility}};
  j["consensus_residual"] = record.final_state.lambda.max_pairwise_l1();
  j["consensus_residual_avg"] = record.final_average_lambda.max_pairwise_l1();

  const RateCertificate rate = rate_certificate(record, record.saddle_value);
  j["theta0"] = rate.theta0;
  return j;
}

void write_run_dir(const std::filesystem::path& dir, const CoupledProblem& problem,
                   const RunRecord& record, const SolverConfig& config) {
  std::filesystem::create_directories(dir);
  save_instance(dir / "instance.json", problem);
  write_trajectory_csv(dir / "trajectory.csv", problem, record);
  std::ofstream out(dir / "summary.json");
  if (!out) throw ParseError("cannot write summary file");
  out << summary_json(problem, record, config).dump(2) << "\n";
}

}  // namespace dpd

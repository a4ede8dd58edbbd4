#include "netpass/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "netpass/errors.hpp"

namespace netpass {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(path + "." + key, "missing");
  return obj.at(key);
}

double number_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) schema_error(path + "." + key, "expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
  return number_at(obj, key, path);
}

long integer_at(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) schema_error(path + "." + key, "expected an integer");
  return v.get<long>();
}

std::vector<int> index_list(const json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) schema_error(path + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<int>());
  }
  return out;
}

AgentModel parse_agent(const json& j, const std::string& path) {
  const json& kind_j = require(j, "kind", path);
  if (!kind_j.is_string()) schema_error(path + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  try {
    if (kind == "traffic") {
      const double v1 = number_at(j, "v1", path);
      if (v1 == 0.0) schema_error(path + ".v1", "must be nonzero (k^-1 would not be a function)");
      return AgentModel::traffic(number_at(j, "kappa", path), number_at(j, "v0", path), v1);
    }
    if (kind == "integrator") return AgentModel::integrator();
    if (kind == "static_affine") {
      return AgentModel::static_affine(number_at(j, "a", path), number_at(j, "c", path),
                                       number_at(j, "tau", path), number_at(j, "rho", path));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    schema_error(path, e.what());
  }
  schema_error(path + ".kind", "unknown agent kind '" + kind + "'");
}

ControllerModel parse_controller(const json& j, const std::string& path) {
  const json& kind_j = require(j, "kind", path);
  if (!kind_j.is_string()) schema_error(path + ".kind", "expected a string");
  const auto kind = kind_j.get<std::string>();
  if (kind == "tanh_integrator") return ControllerModel::tanh_integrator();
  if (kind == "static_gain") {
    const double w = number_at(j, "w", path);
    if (!(w > 0.0)) schema_error(path + ".w", "must be positive");
    return ControllerModel::static_gain(w);
  }
  schema_error(path + ".kind", "unknown controller kind '" + kind + "'");
}

json agent_to_json(const AgentModel& a) {
  switch (a.kind()) {
    case AgentKind::kTraffic:
      return {{"kind", "traffic"}, {"kappa", a.kappa()}, {"v0", a.v0()}, {"v1", a.v1()}};
    case AgentKind::kIntegrator: return {{"kind", "integrator"}};
    case AgentKind::kStaticAffine:
      return {{"kind", "static_affine"}, {"a", a.slope()},           {"c", a.offset()},
              {"tau", a.tau()},          {"rho", a.passivity_index()}};
  }
  return {};
}

json controller_to_json(const ControllerModel& c) {
  if (c.kind() == ControllerKind::kStaticGain) return {{"kind", "static_gain"}, {"w", c.gain()}};
  return {{"kind", "tanh_integrator"}};
}

GainMode parse_gain_mode(const std::string& s, const std::string& path) {
  if (s == "none") return GainMode::kNone;
  if (s == "auto") return GainMode::kAuto;
  if (s == "network_only") return GainMode::kNetworkOnly;
  if (s == "hybrid") return GainMode::kHybrid;
  schema_error(path, "unknown gain mode '" + s + "'");
}

double json_number_or_inf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace

std::string_view to_string(GainMode mode) {
  switch (mode) {
    case GainMode::kNone: return "none";
    case GainMode::kAuto: return "auto";
    case GainMode::kNetworkOnly: return "network_only";
    case GainMode::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kInfeasible: return "infeasible";
    case Verdict::kFail: return "fail";
  }
  return "unknown";
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v(i)));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = json_number_or_inf(j[i]);
  return v;
}

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) schema_error("$", "expected an object");
  ScenarioConfig cfg;

  const json& gj = require(j, "graph", "$");
  const long n = integer_at(gj, "n", "$.graph");
  if (n < 1) schema_error("$.graph.n", "must be >= 1");
  std::vector<Edge> edges;
  if (gj.contains("edges")) {
    const json& ej = gj.at("edges");
    if (!ej.is_array()) schema_error("$.graph.edges", "expected an array");
    for (std::size_t k = 0; k < ej.size(); ++k) {
      const auto pair = index_list(ej[k], "$.graph.edges[" + std::to_string(k) + "]");
      if (pair.size() != 2) schema_error("$.graph.edges[" + std::to_string(k) + "]", "expected [head, tail]");
      edges.push_back({pair[0], pair[1]});
    }
  }
  try {
    cfg.graph = NetworkGraph(static_cast<int>(n), std::move(edges));
  } catch (const Error& e) {
    schema_error("$.graph", e.what());
  }
  const int m = cfg.graph.n_edges();

  const json& aj = require(j, "agents", "$");
  if (!aj.is_array()) schema_error("$.agents", "expected an array");
  if (static_cast<long>(aj.size()) != n) {
    schema_error("$.agents", "expected " + std::to_string(n) + " agents, got " + std::to_string(aj.size()));
  }
  for (std::size_t i = 0; i < aj.size(); ++i) {
    cfg.agents.push_back(parse_agent(aj[i], "$.agents[" + std::to_string(i) + "]"));
  }

  if (!j.contains("controllers")) {
    cfg.controllers.assign(m, ControllerModel::tanh_integrator());
    cfg.defaulted.push_back("controllers: tanh_integrator on every edge");
  } else if (j.at("controllers").is_object()) {
    cfg.controllers.assign(m, parse_controller(j.at("controllers"), "$.controllers"));
  } else if (j.at("controllers").is_array()) {
    const json& cj = j.at("controllers");
    if (static_cast<int>(cj.size()) != m) {
      schema_error("$.controllers", "expected " + std::to_string(m) + " controllers, got " + std::to_string(cj.size()));
    }
    for (std::size_t k = 0; k < cj.size(); ++k) {
      cfg.controllers.push_back(parse_controller(cj[k], "$.controllers[" + std::to_string(k) + "]"));
    }
  } else {
    schema_error("$.controllers", "expected an object or an array");
  }

  if (j.contains("gain")) {
    const json& gain = j.at("gain");
    if (!gain.is_object()) schema_error("$.gain", "expected an object");
    if (gain.contains("mode")) {
      if (!gain.at("mode").is_string()) schema_error("$.gain.mode", "expected a string");
      cfg.gain_mode = parse_gain_mode(gain.at("mode").get<std::string>(), "$.gain.mode");
    }
    if (gain.contains("vsr")) cfg.vsr = index_list(gain.at("vsr"), "$.gain.vsr");
    cfg.epsilon = optional_number(gain, "epsilon", "$.gain");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) schema_error("$.gain.epsilon", "must be positive");
  }
  for (std::size_t i = 0; i < cfg.vsr.size(); ++i) {
    if (cfg.vsr[i] < 0 || cfg.vsr[i] >= n) {
      schema_error("$.gain.vsr[" + std::to_string(i) + "]", "vertex out of range");
    }
  }
  if (cfg.gain_mode == GainMode::kHybrid && cfg.vsr.empty()) {
    schema_error("$.gain.vsr", "hybrid mode needs a nonempty self-regulating set");
  }
  if (!cfg.epsilon && cfg.gain_mode != GainMode::kNone) cfg.defaulted.push_back("epsilon = 0.1 max(1, b)");

  cfg.sim = default_sim_params(AgentBank(cfg.agents));
  const json sim = j.value("sim", json::object());
  if (!sim.is_object()) schema_error("$.sim", "expected an object");
  if (auto v = optional_number(sim, "dt", "$.sim")) cfg.sim.dt = *v;
  else cfg.defaulted.push_back("sim.dt = 1e-3 characteristic times");
  if (auto v = optional_number(sim, "t_max", "$.sim")) cfg.sim.t_max = *v;
  else cfg.defaulted.push_back("sim.t_max = 1e4 characteristic times");
  if (auto v = optional_number(sim, "steady_tol", "$.sim")) cfg.sim.steady_tol = *v;
  if (sim.contains("window")) cfg.sim.window = static_cast<int>(integer_at(sim, "window", "$.sim"));
  if (sim.contains("record_stride")) cfg.sim.record_stride = static_cast<int>(integer_at(sim, "record_stride", "$.sim"));
  if (sim.contains("max_records")) cfg.sim.max_records = static_cast<int>(integer_at(sim, "max_records", "$.sim"));
  if (!(cfg.sim.dt > 0.0)) schema_error("$.sim.dt", "must be positive");
  if (!(cfg.sim.t_max > cfg.sim.dt)) schema_error("$.sim.t_max", "must exceed dt");
  if (!(cfg.sim.steady_tol > 0.0)) schema_error("$.sim.steady_tol", "must be positive");
  if (cfg.sim.window < 1) schema_error("$.sim.window", "must be >= 1");
  if (sim.contains("seed")) {
    const long seed = integer_at(sim, "seed", "$.sim");
    if (seed < 0) schema_error("$.sim.seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (sim.contains("x0")) {
    const json& xj = sim.at("x0");
    if (!xj.is_array() || static_cast<long>(xj.size()) != n) schema_error("$.sim.x0", "expected " + std::to_string(n) + " numbers");
    Eigen::VectorXd x0(n);
    for (long i = 0; i < n; ++i) {
      if (!xj[i].is_number()) schema_error("$.sim.x0[" + std::to_string(i) + "]", "expected a number");
      x0(i) = xj[i].get<double>();
    }
    cfg.x0 = x0;
  } else {
    cfg.defaulted.push_back("x0 uniform in [min nominal - 10, max nominal + 10], seed " + std::to_string(cfg.seed));
  }

  const json solver = j.value("solver", json::object());
  if (!solver.is_object()) schema_error("$.solver", "expected an object");
  if (auto v = optional_number(solver, "step", "$.solver")) cfg.solver.step = *v;
  if (auto v = optional_number(solver, "tol", "$.solver")) cfg.solver.tol = *v;
  if (solver.contains("max_iter")) cfg.solver.max_iter = static_cast<int>(integer_at(solver, "max_iter", "$.solver"));
  if (!(cfg.solver.step > 0.0)) schema_error("$.solver.step", "must be positive");
  if (!(cfg.solver.tol > 0.0)) schema_error("$.solver.tol", "must be positive");
  if (cfg.solver.max_iter < 1) schema_error("$.solver.max_iter", "must be >= 1");

  if (auto v = optional_number(j, "tolerance", "$")) {
    if (!(*v > 0.0)) schema_error("$.tolerance", "must be positive");
    cfg.tolerance = *v;
  }

  if (j.contains("outputs")) {
    const json& oj = j.at("outputs");
    if (!oj.is_object()) schema_error("$.outputs", "expected an object");
    cfg.outputs.report = oj.value("report", "");
    cfg.outputs.trajectory = oj.value("trajectory", "");
    cfg.outputs.pairs = oj.value("pairs", "");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ScenarioConfig& cfg) {
  json edges = json::array();
  for (const auto& e : cfg.graph.edges()) edges.push_back({e.head, e.tail});
  json agents = json::array();
  for (const auto& a : cfg.agents) agents.push_back(agent_to_json(a));
  json controllers = json::array();
  for (const auto& c : cfg.controllers) controllers.push_back(controller_to_json(c));

  json gain = {{"mode", to_string(cfg.gain_mode)}, {"vsr", cfg.vsr}};
  if (cfg.epsilon) gain["epsilon"] = *cfg.epsilon;

  json sim = {{"dt", cfg.sim.dt},
              {"t_max", cfg.sim.t_max},
              {"steady_tol", cfg.sim.steady_tol},
              {"window", cfg.sim.window},
              {"record_stride", cfg.sim.record_stride},
              {"max_records", cfg.sim.max_records},
              {"seed", cfg.seed}};
  if (cfg.x0) sim["x0"] = to_json(*cfg.x0);

  return {{"graph", {{"n", cfg.graph.n_vertices()}, {"edges", edges}}},
          {"agents", agents},
          {"controllers", controllers},
          {"gain", gain},
          {"sim", sim},
          {"solver", {{"step", cfg.solver.step}, {"max_iter", cfg.solver.max_iter}, {"tol", cfg.solver.tol}}},
          {"tolerance", cfg.tolerance},
          {"outputs", {{"report", cfg.outputs.report}, {"trajectory", cfg.outputs.trajectory}, {"pairs", cfg.outputs.pairs}}}};
}

CaseStudyParameters sample_case_study_parameters(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "case study needs n >= 1");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution drowsy(1.0 / 3.0);
  std::normal_distribution<double> spread(0.0, 15.0);

  CaseStudyParameters p;
  p.kappa.resize(n);
  p.v0.resize(n);
  p.v1.resize(n);
  for (int i = 0; i < n; ++i) {
    p.kappa(i) = drowsy(rng) ? -1.0 : 1.0;
    p.v0(i) = (i < n / 2 ? 20.0 : 120.0) + spread(rng);
    p.v1(i) = 0.8 * p.kappa(i);
  }
  return p;
}

ScenarioConfig generate_case_study(int n, std::uint64_t seed, std::vector<int> vsr) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "case study needs n >= 2");
  const auto params = sample_case_study_parameters(n, seed);

  ScenarioConfig cfg;
  cfg.graph = complete_graph(n);
  for (int i = 0; i < n; ++i) {
    cfg.agents.push_back(AgentModel::traffic(params.kappa(i), params.v0(i), params.v1(i)));
  }
  cfg.controllers.assign(cfg.graph.n_edges(), ControllerModel::tanh_integrator());
  cfg.vsr = std::move(vsr);
  cfg.gain_mode = cfg.vsr.empty() ? GainMode::kNetworkOnly : GainMode::kHybrid;
  cfg.sim = default_sim_params(AgentBank(cfg.agents));
  cfg.seed = seed;
  cfg.defaulted = {"epsilon = 0.1 max(1, b)", "sim.dt = 1e-3 characteristic times",
                   "sim.t_max = 1e4 characteristic times",
                   "x0 uniform in [min nominal - 10, max nominal + 10], seed " + std::to_string(seed)};
  return cfg;
}

std::optional<GainDesign> design_gain(const ScenarioConfig& cfg, std::string* mode_used,
                                      std::string* reason) {
  const AgentBank bank(cfg.agents);
  const Eigen::VectorXd& rho = bank.rho_vector();
  auto set = [](std::string* dst, std::string v) {
    if (dst) *dst = std::move(v);
  };

  GainMode mode = cfg.gain_mode;
  const bool feasible = passivation_feasible(rho, cfg.graph);
  if (mode == GainMode::kAuto) {
    mode = feasible ? GainMode::kNetworkOnly : (cfg.vsr.empty() ? GainMode::kNetworkOnly : GainMode::kHybrid);
  }
  set(mode_used, std::string(to_string(mode)));

  if (mode == GainMode::kNone) {
    GainDesign d;
    d.alpha = Eigen::VectorXd::Zero(cfg.graph.n_vertices());
    d.beta = Eigen::VectorXd::Zero(cfg.graph.n_edges());
    const auto report = check_design(rho, d.alpha, d.beta, cfg.graph);
    d.certificate = report.min_eig;
    d.certified = report.positive_definite;
    return d;
  }
  try {
    if (mode == GainMode::kNetworkOnly) return uniform_network_gain(rho, cfg.graph, cfg.epsilon);
    return hybrid_gain(rho, cfg.graph, cfg.vsr, cfg.epsilon);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotPassivizable && e.code() != ErrorCode::kEmptySelfRegulatingSet) throw;
    set(reason, std::string("infeasible: ") + e.what() +
                    (mode == GainMode::kNetworkOnly ? " (retry seed or enable hybrid)" : ""));
    return std::nullopt;
  }
}

Eigen::VectorXd initial_state(const ScenarioConfig& cfg) {
  return cfg.x0 ? *cfg.x0 : default_initial_state(AgentBank(cfg.agents), cfg.seed);
}

ClosedLoopSystem make_system(const ScenarioConfig& cfg, const GainDesign& gain) {
  return ClosedLoopSystem(cfg.graph, AgentBank(cfg.agents), cfg.controllers, gain);
}

RegularizedProblem make_problem(const ScenarioConfig& cfg, const GainDesign& gain) {
  return build_problem(AgentBank(cfg.agents), cfg.controllers, cfg.graph, gain);
}

int count_clusters(const Eigen::VectorXd& values, double gap) {
  if (values.size() == 0) return 0;
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  int clusters = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] > gap) ++clusters;
  }
  return clusters;
}

VerifyReport verify(const ScenarioConfig& cfg) {
  VerifyReport r;
  r.tolerance = cfg.tolerance;
  r.assumed = cfg.defaulted;
  const AgentBank bank(cfg.agents);
  r.rho = bank.rho_vector();
  r.feasible = passivation_feasible(r.rho, cfg.graph);

  std::string reason;
  auto gain = design_gain(cfg, &r.gain_mode, &reason);
  if (!gain) {
    r.verdict = Verdict::kInfeasible;
    r.reason = reason;
    return r;
  }
  r.gain = *gain;

  const auto problem = make_problem(cfg, r.gain);
  r.convexity = convexity_probe(problem, 16, cfg.seed).min_curvature;

  const auto sys = make_system(cfg, r.gain);
  bool blew_up = false;
  try {
    Trajectory traj = simulate(sys, initial_state(cfg), Eigen::VectorXd::Zero(sys.m()), cfg.sim);
    r.sim_converged = traj.converged;
    r.sim_residual = traj.residual;
    r.t_end = traj.t_end;
    r.y_ss = traj.y_ss.value_or(traj.x_final);
    r.trajectory = std::move(traj);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumericalBlowup) throw;
    blew_up = true;
    reason = e.what();
  }

  r.minimizer = solve(problem, cfg.solver);
  r.optimality_residual = steady_state_residual(sys, r.minimizer.y_star);
  if (r.sim_converged) r.mismatch = (r.y_ss - r.minimizer.y_star).cwiseAbs().maxCoeff();
  r.cluster_count = count_clusters(r.sim_converged ? r.y_ss : r.minimizer.y_star);

  if (!r.gain.certified) {
    r.reason = "uncertified: min eigenvalue " + std::to_string(r.gain.certificate);
  } else if (blew_up) {
    r.reason = reason;
  } else if (!r.sim_converged) {
    r.reason = "simulation did not reach a steady state by t_max";
  } else if (r.minimizer.status != SolveStatus::kOptimal) {
    r.reason = "solver status " + std::string(to_string(r.minimizer.status));
  } else if (!(r.mismatch <= r.tolerance)) {
    r.reason = "steady state differs from the minimizer by " + std::to_string(r.mismatch);
  } else {
    r.verdict = Verdict::kPass;
    r.reason = "steady state matches the minimizer";
    return r;
  }
  r.verdict = Verdict::kFail;
  return r;
}

json report_to_json(const VerifyReport& r) {
  const auto& mz = r.minimizer;
  return {
      {"verdict", to_string(r.verdict)},
      {"reason", r.reason},
      {"feasible", r.feasible},
      {"gain_mode", r.gain_mode},
      {"rho", to_json(r.rho)},
      {"gain",
       {{"alpha", to_json(r.gain.alpha)},
        {"beta", to_json(r.gain.beta)},
        {"epsilon", r.gain.epsilon},
        {"b", r.gain.b},
        {"min_eig", finite_or_null(r.gain.certificate)},
        {"certified", r.gain.certified}}},
      {"convexity", finite_or_null(r.convexity)},
      {"simulation",
       {{"converged", r.sim_converged},
        {"y_ss", to_json(r.y_ss)},
        {"residual", finite_or_null(r.sim_residual)},
        {"t_end", r.t_end}}},
      {"minimizer",
       {{"y_star", to_json(mz.y_star)},
        {"zeta_star", to_json(mz.zeta_star)},
        {"mu_star", to_json(mz.mu_star)},
        {"objective", finite_or_null(mz.objective_value)},
        {"residuals", {{"primal", finite_or_null(mz.primal_residual)}, {"dual", finite_or_null(mz.dual_residual)}}},
        {"iterations", mz.iterations},
        {"status", to_string(mz.status)}}},
      {"optimality_residual", finite_or_null(r.optimality_residual)},
      {"mismatch", finite_or_null(r.mismatch)},
      {"tolerance", r.tolerance},
      {"cluster_count", r.cluster_count},
      {"assumed", r.assumed},
  };
}

VerifyReport report_from_json(const json& j) {
  VerifyReport r;
  const auto verdict = j.at("verdict").get<std::string>();
  r.verdict = verdict == "pass" ? Verdict::kPass : verdict == "infeasible" ? Verdict::kInfeasible : Verdict::kFail;
  r.reason = j.at("reason").get<std::string>();
  r.feasible = j.at("feasible").get<bool>();
  r.gain_mode = j.at("gain_mode").get<std::string>();
  r.rho = vector_from_json(j.at("rho"));
  const json& g = j.at("gain");
  r.gain.alpha = vector_from_json(g.at("alpha"));
  r.gain.beta = vector_from_json(g.at("beta"));
  r.gain.epsilon = g.at("epsilon").get<double>();
  r.gain.b = g.at("b").get<double>();
  r.gain.certificate = json_number_or_inf(g.at("min_eig"));
  r.gain.certified = g.at("certified").get<bool>();
  r.convexity = json_number_or_inf(j.at("convexity"));
  const json& s = j.at("simulation");
  r.sim_converged = s.at("converged").get<bool>();
  r.y_ss = vector_from_json(s.at("y_ss"));
  r.sim_residual = json_number_or_inf(s.at("residual"));
  r.t_end = s.at("t_end").get<double>();
  const json& m = j.at("minimizer");
  r.minimizer.y_star = vector_from_json(m.at("y_star"));
  r.minimizer.zeta_star = vector_from_json(m.at("zeta_star"));
  r.minimizer.mu_star = vector_from_json(m.at("mu_star"));
  r.minimizer.objective_value = json_number_or_inf(m.at("objective"));
  r.minimizer.primal_residual = json_number_or_inf(m.at("residuals").at("primal"));
  r.minimizer.dual_residual = json_number_or_inf(m.at("residuals").at("dual"));
  r.minimizer.iterations = m.at("iterations").get<int>();
  const auto status = m.at("status").get<std::string>();
  r.minimizer.status = status == "optimal"      ? SolveStatus::kOptimal
                       : status == "max_iter"   ? SolveStatus::kMaxIter
                                                : SolveStatus::kNonConvexDetected;
  r.optimality_residual = json_number_or_inf(j.at("optimality_residual"));
  r.mismatch = json_number_or_inf(j.at("mismatch"));
  r.tolerance = j.at("tolerance").get<double>();
  r.cluster_count = j.at("cluster_count").get<int>();
  r.assumed = j.at("assumed").get<std::vector<std::string>>();
  return r;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "t";
  for (Eigen::Index i = 0; i < traj.x_states.rows(); ++i) out << ",x_" << i;
  for (Eigen::Index k = 0; k < traj.eta_states.rows(); ++k) out << ",eta_" << k;
  out << '\n';
  for (Eigen::Index j = 0; j < traj.times.size(); ++j) {
    out << traj.times(j);
    for (Eigen::Index i = 0; i < traj.x_states.rows(); ++i) out << ',' << traj.x_states(i, j);
    for (Eigen::Index k = 0; k < traj.eta_states.rows(); ++k) out << ',' << traj.eta_states(k, j);
    out << '\n';
  }
  write_text(path, out.str());
}

void emit_report(const VerifyReport& r, const OutputPaths& paths) {
  if (!paths.report.empty()) write_text(paths.report, report_to_json(r).dump(2) + "\n");
  if (!paths.trajectory.empty() && r.trajectory) write_trajectory_csv(*r.trajectory, paths.trajectory);
  if (!paths.pairs.empty() && r.minimizer.y_star.size() > 0) {
    std::ostringstream out;
    out << std::setprecision(12) << "agent,y_ss,y_star\n";
    for (Eigen::Index i = 0; i < r.minimizer.y_star.size(); ++i) {
      out << i << ',';
      if (i < r.y_ss.size()) out << r.y_ss(i);
      out << ',' << r.minimizer.y_star(i) << '\n';
    }
    write_text(paths.pairs, out.str());
  }
}

}  // namespace netpass

// Command-line front end: check, synthesize, simulate, optimize, verify, casestudy.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "netpass/errors.hpp"
#include "netpass/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace netpass;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitMismatch = 2;
constexpr int kExitInputError = 3;

void write_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  out << text;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::kPass: return kExitOk;
    case Verdict::kInfeasible: return kExitInfeasible;
    case Verdict::kFail: return kExitMismatch;
  }
  return kExitMismatch;
}

int run_check(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  const AgentBank bank(cfg.agents);
  const auto& rho = bank.rho_vector();
  json components = json::array();
  for (const auto& c : cfg.graph.connected_components()) {
    double sum = 0.0;
    for (int v : c.vertices) sum += rho(v);
    components.push_back({{"vertices", c.vertices}, {"sum_rho", sum}});
  }
  const bool feasible = passivation_feasible(rho, cfg.graph);
  json out = {{"n", cfg.graph.n_vertices()},
              {"m", cfg.graph.n_edges()},
              {"connected", cfg.graph.is_connected()},
              {"rho", to_json(rho)},
              {"components", components},
              {"feasible", feasible},
              {"hybrid_available", !cfg.vsr.empty()}};
  if (cfg.graph.is_connected() && cfg.graph.n_vertices() > 1) out["lambda2"] = lambda2(cfg.graph);
  write_json(out, "");
  return feasible || !cfg.vsr.empty() ? kExitOk : kExitInfeasible;
}

int run_synthesize(const std::string& config_path, bool hybrid, const std::vector<int>& vsr,
                   std::optional<double> epsilon, const std::string& out_path) {
  auto cfg = load_config(config_path);
  if (!vsr.empty()) cfg.vsr = vsr;
  if (hybrid) {
    if (cfg.vsr.empty()) throw Error(ErrorCode::kSchemaError, "--hybrid needs --vsr");
    cfg.gain_mode = GainMode::kHybrid;
  } else if (cfg.gain_mode == GainMode::kNone || cfg.gain_mode == GainMode::kAuto) {
    cfg.gain_mode = GainMode::kAuto;
  }
  if (epsilon) cfg.epsilon = epsilon;

  std::string mode, reason;
  const auto gain = design_gain(cfg, &mode, &reason);
  json out = {{"mode", mode}, {"feasible", gain.has_value()}};
  if (gain) {
    out.update({{"b", gain->b},
                {"epsilon", gain->epsilon},
                {"beta", to_json(gain->beta)},
                {"alpha", to_json(gain->alpha)},
                {"min_eig", gain->certificate},
                {"certified", gain->certified}});
  } else {
    out["reason"] = reason;
  }
  write_json(out, out_path);
  return gain ? kExitOk : kExitInfeasible;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  const auto cfg = load_config(config_path);
  const auto gain = design_gain(cfg);
  if (!gain) {
    std::cerr << "infeasible: no gain design for the requested mode\n";
    return kExitInfeasible;
  }
  const auto sys = make_system(cfg, *gain);
  const auto traj = simulate(sys, initial_state(cfg), Eigen::VectorXd::Zero(sys.m()), cfg.sim);
  json sidecar = {{"converged", traj.converged},
                  {"y_ss", traj.y_ss ? to_json(*traj.y_ss) : json(nullptr)},
                  {"residual", traj.residual},
                  {"t_end", traj.t_end},
                  {"certified", gain->certified}};
  if (out_path.empty()) {
    write_json(sidecar, "");
  } else {
    write_trajectory_csv(traj, out_path);
    write_json(sidecar, fs::path(out_path).replace_extension(".json").string());
  }
  return traj.converged ? kExitOk : kExitMismatch;
}

int run_optimize(const std::string& config_path, const std::string& out_path) {
  const auto cfg = load_config(config_path);
  const auto gain = design_gain(cfg);
  if (!gain) {
    std::cerr << "infeasible: no gain design for the requested mode\n";
    return kExitInfeasible;
  }
  const auto m = solve(make_problem(cfg, *gain), cfg.solver);
  json out = {{"y_star", to_json(m.y_star)},
              {"zeta_star", to_json(m.zeta_star)},
              {"mu_star", to_json(m.mu_star)},
              {"objective", m.objective_value},
              {"residuals", {{"primal", m.primal_residual}, {"dual", m.dual_residual}}},
              {"iterations", m.iterations},
              {"status", to_string(m.status)}};
  write_json(out, out_path);
  return m.status == SolveStatus::kOptimal ? kExitOk : kExitMismatch;
}

int run_verify(ScenarioConfig cfg, const std::string& out_dir) {
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    cfg.outputs = {(dir / "report.json").string(), (dir / "trajectory.csv").string(),
                   (dir / "pairs.csv").string()};
  }
  const auto report = verify(cfg);
  emit_report(report, cfg.outputs);
  std::cout << report_to_json(report).dump(2) << "\n";
  return exit_code(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network passivation, simulation and optimization toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir;
  bool hybrid = false;
  std::vector<int> vsr;
  std::optional<double> epsilon;
  int n = 10;
  std::uint64_t seed = 0;

  auto* check = app.add_subcommand("check", "Report passivation feasibility of a config");
  check->add_option("--config", config_path, "Scenario JSON")->required();

  auto* synth = app.add_subcommand("synthesize", "Design network gains");
  synth->add_option("--config", config_path, "Scenario JSON")->required();
  synth->add_flag("--hybrid", hybrid, "Use the hybrid (network + self-regulating) design");
  synth->add_option("--vsr", vsr, "Self-regulating vertices")->delimiter(',');
  synth->add_option("--epsilon", epsilon, "Margin above the threshold b");
  synth->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "Integrate the closed loop");
  sim->add_option("--config", config_path, "Scenario JSON")->required();
  sim->add_option("--out", out_path, "Trajectory CSV; a .json sidecar is written next to it");

  auto* opt = app.add_subcommand("optimize", "Solve the regularized network optimization problem");
  opt->add_option("--config", config_path, "Scenario JSON")->required();
  opt->add_option("--out", out_path, "Output JSON (stdout if omitted)");

  auto* ver = app.add_subcommand("verify", "Run the full pipeline on a config");
  ver->add_option("--config", config_path, "Scenario JSON")->required();
  ver->add_option("--out-dir", out_dir, "Directory for report.json, trajectory.csv, pairs.csv");

  auto* cs = app.add_subcommand("casestudy", "Generate and verify the traffic case study");
  cs->add_option("--n", n, "Number of agents")->check(CLI::Range(2, 100000));
  cs->add_option("--seed", seed, "RNG seed");
  cs->add_option("--vsr", vsr, "Self-regulating vertices (selects the hybrid design)")->delimiter(',');
  cs->add_option("--out-dir", out_dir, "Directory for report.json, trajectory.csv, pairs.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*check) return run_check(config_path);
    if (*synth) return run_synthesize(config_path, hybrid, vsr, epsilon, out_path);
    if (*sim) return run_simulate(config_path, out_path);
    if (*opt) return run_optimize(config_path, out_path);
    if (*ver) return run_verify(load_config(config_path), out_dir);
    if (*cs) return run_verify(generate_case_study(n, seed, vsr), out_dir);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kParseError:
      case ErrorCode::kSchemaError:
      case ErrorCode::kIoError:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kIndexOutOfRange:
      case ErrorCode::kSelfLoop:
      case ErrorCode::kDuplicateEdge:
      case ErrorCode::kDimensionMismatch:
        return kExitInputError;
      case ErrorCode::kNotPassivizable:
      case ErrorCode::kEmptySelfRegulatingSet:
        return kExitInfeasible;
      default:
        return kExitMismatch;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netpass/agents.hpp"
#include "netpass/controllers.hpp"
#include "netpass/graph.hpp"
#include "netpass/netopt.hpp"
#include "netpass/passivation.hpp"
#include "netpass/sim.hpp"

namespace netpass {

enum class GainMode { kNone, kAuto, kNetworkOnly, kHybrid };

std::string_view to_string(GainMode mode);

struct OutputPaths {
  std::string report;      // JSON
  std::string trajectory;  // CSV
  std::string pairs;       // CSV of (y_ss, y*)
};

struct ScenarioConfig {
  NetworkGraph graph{1, {}};
  std::vector<AgentModel> agents;
  std::vector<ControllerModel> controllers;
  GainMode gain_mode = GainMode::kAuto;
  std::vector<int> vsr;
  std::optional<double> epsilon;
  SimParams sim;
  /// Explicit initial agent states; otherwise drawn with `seed`.
  std::optional<Eigen::VectorXd> x0;
  std::uint64_t seed = 0;
  SolverParams solver;
  /// Bound on ||y_ss - y*||_inf for a passing verification.
  double tolerance = 1e-2;
  OutputPaths outputs;
  /// Names of settings filled from defaults rather than the input.
  std::vector<std::string> defaulted;
};

/// Throws Error{kSchemaError} with the offending field path.
ScenarioConfig parse_config(const nlohmann::json& j);
/// Throws Error{kIoError | kParseError | kSchemaError}.
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

/// Per-agent draws of the traffic case study.
struct CaseStudyParameters {
  Eigen::VectorXd kappa;
  Eigen::VectorXd v0;
  Eigen::VectorXd v1;
};

/// kappa = -1 w.p. 1/3 else 1; v0 from the two-component mixture (first
/// floor(n/2) agents around 20, the rest around 120, std 15); v1 = 0.8 kappa.
CaseStudyParameters sample_case_study_parameters(int n, std::uint64_t seed);

/// Complete graph of traffic agents with tanh-integrator edges. Network-only
/// gain unless `vsr` is given, in which case the hybrid design is requested.
ScenarioConfig generate_case_study(int n, std::uint64_t seed, std::vector<int> vsr = {});

enum class Verdict { kPass, kInfeasible, kFail };

std::string_view to_string(Verdict v);

struct VerifyReport {
  Verdict verdict = Verdict::kFail;
  std::string reason;
  bool feasible = false;
  std::string gain_mode;
  Eigen::VectorXd rho;
  GainDesign gain;
  double convexity = 0.0;
  bool sim_converged = false;
  Eigen::VectorXd y_ss;
  double sim_residual = 0.0;
  double t_end = 0.0;
  Minimizer minimizer;
  double optimality_residual = 0.0;
  double mismatch = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  int cluster_count = 0;
  /// Settings not fixed by the model and filled from defaults.
  std::vector<std::string> assumed;

  /// Not serialized.
  std::optional<Trajectory> trajectory;
};

/// Feasibility check, gain synthesis, simulation, optimization, comparison.
/// Infeasible designs yield Verdict::kInfeasible rather than an exception.
VerifyReport verify(const ScenarioConfig& cfg);

/// Number of groups in sorted values separated by gaps larger than `gap`.
int count_clusters(const Eigen::VectorXd& values, double gap = 1.0);

nlohmann::json report_to_json(const VerifyReport& r);
VerifyReport report_from_json(const nlohmann::json& j);

/// Writes the JSON report and, when paths are set and data is present, the
/// trajectory and (y_ss, y*) CSVs. Throws Error{kIoError}.
void emit_report(const VerifyReport& r, const OutputPaths& paths);

/// t, x_0..x_{n-1}, eta_0..eta_{m-1}; 12 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Resolves the gain design a config asks for. Returns nullopt when the
/// requested mode is infeasible.
std::optional<GainDesign> design_gain(const ScenarioConfig& cfg, std::string* mode_used = nullptr,
                                      std::string* reason = nullptr);

Eigen::VectorXd initial_state(const ScenarioConfig& cfg);
ClosedLoopSystem make_system(const ScenarioConfig& cfg, const GainDesign& gain);
RegularizedProblem make_problem(const ScenarioConfig& cfg, const GainDesign& gain);

nlohmann::json to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

}  // namespace netpass

#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netpass/agents.hpp"
#include "netpass/controllers.hpp"
#include "netpass/graph.hpp"
#include "netpass/passivation.hpp"

namespace netpass {

/// Diffusively coupled network (G, Sigma, Pi) closed by
///   zeta = E^T y,  u = -E mu - E diag(beta) zeta - diag(alpha) y.
class ClosedLoopSystem {
 public:
  /// Throws Error{kDimensionMismatch}. The gain need not be certified.
  ClosedLoopSystem(NetworkGraph graph, AgentBank agents, std::vector<ControllerModel> controllers,
                   GainDesign gain);

  const NetworkGraph& graph() const { return graph_; }
  const AgentBank& agents() const { return agents_; }
  const std::vector<ControllerModel>& controllers() const { return controllers_; }
  const GainDesign& gain() const { return gain_; }
  int n() const { return graph_.n_vertices(); }
  int m() const { return graph_.n_edges(); }

  /// E diag(beta) E^T + diag(alpha).
  const Eigen::MatrixXd& feedback_matrix() const { return feedback_; }

 private:
  NetworkGraph graph_;
  AgentBank agents_;
  std::vector<ControllerModel> controllers_;
  GainDesign gain_;
  Eigen::MatrixXd feedback_;
};

/// All signals of the loop at one instant.
struct LoopSignals {
  Eigen::VectorXd y;
  Eigen::VectorXd zeta;
  Eigen::VectorXd mu;
  Eigen::VectorXd u;
  Eigen::VectorXd x_dot;
  Eigen::VectorXd eta_dot;
  Eigen::VectorXd mu_dot;
};

LoopSignals evaluate_loop(const ClosedLoopSystem& sys, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& eta);

std::pair<Eigen::VectorXd, Eigen::VectorXd> closed_loop_derivative(const ClosedLoopSystem& sys,
                                                                   const Eigen::VectorXd& x,
                                                                   const Eigen::VectorXd& eta);

struct SimParams {
  double dt = 1e-3;
  double t_max = 1e4;
  /// Threshold on max(|x'|, |mu'|), with |eta'| replacing |mu'| on edges
  /// whose eta moves towards 0.
  double steady_tol = 1e-8;
  /// Consecutive integration steps below steady_tol required to stop.
  int window = 100;
  /// Record every k-th step; 0 picks k so that at most max_records rows are kept.
  int record_stride = 0;
  int max_records = 4000;
};

/// dt = 1e-3 T and t_max = 1e4 T with T = max(1e-4, 1 / max rate).
SimParams default_sim_params(const AgentBank& agents);

/// Uniform in [min nominal - 10, max nominal + 10].
Eigen::VectorXd default_initial_state(const AgentBank& agents, std::uint64_t seed);

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::MatrixXd x_states;    // n x T
  Eigen::MatrixXd eta_states;  // m x T
  Eigen::MatrixXd y_outputs;   // n x T
  double dt = 0.0;
  int stride = 1;
  long steps = 0;
  double t_end = 0.0;
  bool converged = false;
  std::optional<Eigen::VectorXd> y_ss;
  /// Largest steady-state residual over the final window of integration steps.
  double residual = 0.0;
  Eigen::VectorXd x_final;
  Eigen::VectorXd eta_final;
};

/// Classical fixed-step RK4. Stops once the residual has stayed below
/// steady_tol for `window` steps (at the next recorded sample).
/// Throws Error{kNumericalBlowup} if any state leaves [-1e12, 1e12].
Trajectory simulate(const ClosedLoopSystem& sys, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& eta0, const SimParams& params);

/// Distance from 0 to k^-1(y) + diag(alpha) y + E diag(beta) E^T y + E gamma(E^T y),
/// with gamma the (set-valued) controller steady-state relation. Edges with
/// |zeta_e| <= zeta_tol count as zeta_e = 0. zeta_tol defaults to
/// 1e-6 (1 + ||y||_inf).
double steady_state_residual(const ClosedLoopSystem& sys, const Eigen::VectorXd& y_ss,
                             std::optional<double> zeta_tol = std::nullopt);

/// S' - (y - y_ss)^T (v - v_ss) for the augmented agents at state x, where
/// v = u + (E diag(beta) E^T + diag(alpha)) y and (v_ss, y_ss) is the
/// steady-state pair with u_ss = k^-1(y_ss). Non-positive for a passive loop.
double augmented_dissipation_gap(const ClosedLoopSystem& sys, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& eta, const Eigen::VectorXd& y_ss);

/// Largest dissipation gap over the recorded samples of a converged run.
double max_dissipation_gap(const ClosedLoopSystem& sys, const Trajectory& traj);

}  // namespace netpass

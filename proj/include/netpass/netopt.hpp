#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netpass/agents.hpp"
#include "netpass/controllers.hpp"
#include "netpass/graph.hpp"
#include "netpass/passivation.hpp"

namespace netpass {

/// minimize K*(y) + Gamma(zeta) + zeta^T diag(beta) zeta / 2 + y^T diag(alpha) y / 2
/// subject to E^T y = zeta.
///
/// With alpha = beta = 0 this is the unregularized potential problem; with
/// alpha = 0 it is the network-regularized one.
class RegularizedProblem {
 public:
  /// Throws Error{kDimensionMismatch}.
  RegularizedProblem(NetworkGraph graph, AgentBank agents, std::vector<ControllerModel> controllers,
                     Eigen::VectorXd alpha, Eigen::VectorXd beta);

  const NetworkGraph& graph() const { return graph_; }
  const AgentBank& agents() const { return agents_; }
  const std::vector<ControllerModel>& controllers() const { return controllers_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  int n() const { return graph_.n_vertices(); }
  int m() const { return graph_.n_edges(); }
  bool is_unregularized() const;

  double objective(const Eigen::VectorXd& y) const;

  /// Lambda*(y) = K*(y) + y^T (E diag(beta) E^T + diag(alpha)) y / 2.
  double smooth_objective(const Eigen::VectorXd& y) const;
  /// Sum of Gamma_e(zeta_e).
  double edge_objective(const Eigen::VectorXd& zeta) const;
  Eigen::MatrixXd smooth_hessian(const Eigen::VectorXd& y) const;

  /// E diag(beta) E^T + diag(alpha).
  const Eigen::MatrixXd& regularizer_matrix() const { return regularizer_; }

 private:
  NetworkGraph graph_;
  AgentBank agents_;
  std::vector<ControllerModel> controllers_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd regularizer_;
};

RegularizedProblem build_problem(const AgentBank& agents,
                                 const std::vector<ControllerModel>& controllers,
                                 const NetworkGraph& g, const GainDesign& gain);

/// k^-1(y) + E diag(beta) E^T y + diag(alpha) y.
Eigen::VectorXd smooth_gradient(const RegularizedProblem& p, const Eigen::VectorXd& y);

struct ConvexityProbe {
  double min_curvature = 0.0;
  bool nonconvex = false;
};

/// Minimum over sampled y of the smallest eigenvalue of the smooth Hessian,
/// i.e. of d^T H(y) d / |d|^2 over all directions. Flags curvature < -1e-9.
ConvexityProbe convexity_probe(const RegularizedProblem& p, int n_samples,
                               std::uint64_t seed = 0);

enum class SolveStatus { kOptimal, kMaxIter, kNonConvexDetected };

std::string_view to_string(SolveStatus s);

struct SolverParams {
  /// Initial splitting penalty.
  double step = 1.0;
  int max_iter = 100000;
  /// Threshold on both the primal and dual residual norms.
  double tol = 1e-8;
};

struct Minimizer {
  Eigen::VectorXd y_star;
  Eigen::VectorXd zeta_star;
  /// Multiplier of E^T y = zeta; an element of the subdifferential of the
  /// regularized Gamma at zeta_star.
  Eigen::VectorXd mu_star;
  double objective_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::kMaxIter;
};

/// Alternating-direction splitting between the smooth part Lambda*(y) and
/// Gamma(zeta). Non-convex problems are still iterated but reported with
/// status kNonConvexDetected.
Minimizer solve(const RegularizedProblem& p, const SolverParams& params = {});

/// Exhaustive grid search over [lo, hi] followed by local zoom passes (which
/// follow the incumbent while it sits on the window edge) down to
/// `spacing`. Throws Error{kDimensionTooLarge} for n > 4.
Minimizer brute_force(const RegularizedProblem& p, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi, double spacing);

/// K(u) + Gamma*(mu) for the unregularized problem; +inf outside dom Gamma*.
/// Throws Error{kNonConvexDual} for concave K*, Error{kInvalidArgument} when
/// the problem carries a regularizer.
double ofp_objective(const RegularizedProblem& p, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& mu);

/// Feasible flow-problem point (u, mu) = (-E mu*, mu*) built from a solve.
std::pair<Eigen::VectorXd, Eigen::VectorXd> dual_point(const RegularizedProblem& p,
                                                       const Minimizer& m);

}  // namespace netpass

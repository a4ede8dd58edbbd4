#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace netpass {

enum class AgentKind { kTraffic, kIntegrator, kStaticAffine };

std::string_view to_string(AgentKind kind);

/// SISO agent with output y = x and a single-valued inverse steady-state map.
///
/// Traffic:       x' = kappa (-x + v0 + v1 u)
/// Integrator:    x' = u
/// StaticAffine:  x' = tau (-x + a u + c)
///
/// Integral functions are anchored so that K*(v0) = 0 for traffic agents and
/// K*(0) = 0 otherwise.
class AgentModel {
 public:
  /// Requires kappa * v1 > 0.
  static AgentModel traffic(double kappa, double v0, double v1);
  static AgentModel integrator();
  /// Requires a > 0 and tau > 0. `rho` is taken as given; it is a valid
  /// output-passivity index only if rho <= 1 / a.
  static AgentModel static_affine(double a, double c, double tau, double rho);

  AgentKind kind() const { return kind_; }
  double kappa() const { return p0_; }
  double v0() const { return p1_; }
  double v1() const { return p2_; }
  double slope() const { return p0_; }
  double offset() const { return p1_; }
  double tau() const { return p2_; }

  /// Output-passivity index. Traffic agents report 1 / v1, the largest rho for
  /// which the quadratic storage satisfies the dissipation inequality.
  double passivity_index() const { return rho_; }

  double drift(double x, double u) const;
  double output(double x) const { return x; }

  /// k^-1(y).
  double inverse_steady_state(double y) const;
  /// d k^-1 / dy.
  double inverse_steady_state_slope(double y) const;
  /// K*(y), the integral of k^-1.
  double integral_fn(double y) const;
  /// Convex conjugate K(u) of K*. Throws Error{kNonConvexDual} when K* is
  /// concave (traffic agent with v1 < 0). Integrators return +inf off u = 0.
  double ofp_primal_fn(double u) const;

  /// Quadratic storage for the steady state with output y_ss.
  double storage(double x, double y_ss) const;
  /// dS/dt along x' = drift(x, u).
  double storage_rate(double x, double u, double y_ss) const;

  /// Output the agent settles to with zero input.
  double nominal_output() const;
  /// Inverse time constant used to size integration steps.
  double characteristic_rate() const;

 private:
  AgentModel(AgentKind kind, double p0, double p1, double p2, double rho)
      : kind_(kind), p0_(p0), p1_(p1), p2_(p2), rho_(rho) {}

  AgentKind kind_;
  double p0_;
  double p1_;
  double p2_;
  double rho_;
};

/// Stacked agents; entry i sits on graph vertex i.
class AgentBank {
 public:
  explicit AgentBank(std::vector<AgentModel> agents);

  int size() const { return static_cast<int>(agents_.size()); }
  const AgentModel& operator[](int i) const { return agents_.at(i); }
  const std::vector<AgentModel>& agents() const { return agents_; }

  const Eigen::VectorXd& rho_vector() const { return rho_; }

  Eigen::VectorXd inverse_steady_state(const Eigen::VectorXd& y) const;
  Eigen::VectorXd inverse_steady_state_slope(const Eigen::VectorXd& y) const;
  double integral_fn(const Eigen::VectorXd& y) const;
  double ofp_primal_fn(const Eigen::VectorXd& u) const;
  double storage(const Eigen::VectorXd& x, const Eigen::VectorXd& y_ss) const;
  double storage_rate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& y_ss) const;
  Eigen::VectorXd nominal_outputs() const;

 private:
  std::vector<AgentModel> agents_;
  Eigen::VectorXd rho_;
};

double agent_drift(const AgentModel& a, double x, double u);
double inverse_steady_state(const AgentModel& a, double y);
double integral_fn(const AgentModel& a, double y);
double ofp_primal_fn(const AgentModel& a, double u);

}  // namespace netpass

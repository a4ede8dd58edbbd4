#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "netpass/graph.hpp"

namespace netpass {

/// Vertex gains alpha (self-feedback, supported on the self-regulating set)
/// and edge gains beta for the control law u = -E mu - E diag(beta) E^T y - diag(alpha) y.
struct GainDesign {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double epsilon = 0.0;
  /// Largest per-component b threshold the design was built from.
  double b = 0.0;
  /// min eig of diag(rho + alpha) + E diag(beta) E^T.
  double certificate = 0.0;
  bool certified = false;
};

struct CertificateReport {
  Eigen::MatrixXd x;
  double min_eig = 0.0;
  double pd_tol = 0.0;
  bool positive_definite = false;
};

/// diag(rho + alpha) + E diag(beta) E^T.
Eigen::MatrixXd passivation_matrix(const Eigen::VectorXd& rho, const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& beta, const NetworkGraph& g);

/// PD verdict uses min-eig > 1e-9 (1 + ||X||_inf).
CertificateReport check_design(const Eigen::VectorXd& rho, const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& beta, const NetworkGraph& g);

/// Sum of rho is strictly positive on every connected component.
bool passivation_feasible(const Eigen::VectorXd& rho, const NetworkGraph& g);

/// b = lambda_max((n / sum rho) E^T R^2 E - E^T R E) / lambda_2^2, clamped at 0.
/// Throws Error{kGraphDisconnected} or Error{kNotPassivizable}.
double b_threshold(const Eigen::VectorXd& rho, const NetworkGraph& g);

/// 0.1 max(1, b).
double default_epsilon(double b);

/// Uniform edge gain b + epsilon on each component, alpha = 0.
/// Throws Error{kNotPassivizable} or Error{kCertificateFailure}.
GainDesign uniform_network_gain(const Eigen::VectorXd& rho, const NetworkGraph& g,
                                std::optional<double> epsilon = std::nullopt);

/// On every component with sum rho <= 0, sets alpha = 1 - sum rho at the
/// smallest self-regulating vertex of that component, then synthesizes beta
/// for rho + alpha. Throws Error{kEmptySelfRegulatingSet} if such a component
/// holds no self-regulating vertex.
GainDesign hybrid_gain(const Eigen::VectorXd& rho, const NetworkGraph& g,
                       const std::vector<int>& self_regulating,
                       std::optional<double> epsilon = std::nullopt);

}  // namespace netpass

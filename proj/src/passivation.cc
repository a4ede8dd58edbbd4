#include "netpass/passivation.hpp"

#include <algorithm>
#include <string>

#include "netpass/errors.hpp"

namespace netpass {

namespace {

void require_size(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has length " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(n));
  }
}

Eigen::VectorXd restrict(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

// Largest eigenvalue of E^T diag(w) E through the n x n matrix
// L^{1/2} diag(w) L^{1/2}; both share their nonzero spectrum and the latter
// always has a zero eigenvalue, so the result is max(lambda_max, 0).
double clamped_lambda_max_edge_form(const Eigen::VectorXd& w, const NetworkGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.laplacian());
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sqrt_l = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd s = sqrt_l * w.asDiagonal() * sqrt_l;
  return std::max(0.0, symmetric_eigenvalues(s)(s.rows() - 1));
}

GainDesign finish_design(const Eigen::VectorXd& rho, const NetworkGraph& g, Eigen::VectorXd alpha,
                         std::optional<double> epsilon) {
  const int n = g.n_vertices();
  const Eigen::VectorXd shifted = rho + alpha;
  const auto components = g.connected_components();

  std::vector<double> b_per_component;
  double b_max = 0.0;
  for (const auto& c : components) {
    const double b = b_threshold(restrict(shifted, c.vertices), g.subgraph(c));
    b_per_component.push_back(b);
    b_max = std::max(b_max, b);
  }
  const double eps = epsilon.value_or(default_epsilon(b_max));
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");

  GainDesign design;
  design.alpha = std::move(alpha);
  design.beta = Eigen::VectorXd::Zero(g.n_edges());
  design.epsilon = eps;
  design.b = b_max;
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    for (int k : components[ci].edges) design.beta(k) = b_per_component[ci] + eps;
  }

  const auto report = check_design(rho, design.alpha, design.beta, g);
  design.certificate = report.min_eig;
  design.certified = report.positive_definite;
  if (!design.certified) {
    throw Error(ErrorCode::kCertificateFailure,
                "min eigenvalue " + std::to_string(report.min_eig) + " <= tolerance " +
                    std::to_string(report.pd_tol) + " (n=" + std::to_string(n) + ")");
  }
  return design;
}

}  // namespace

Eigen::MatrixXd passivation_matrix(const Eigen::VectorXd& rho, const Eigen::VectorXd& alpha,
                                   const Eigen::VectorXd& beta, const NetworkGraph& g) {
  require_size(rho, g.n_vertices(), "rho");
  require_size(alpha, g.n_vertices(), "alpha");
  require_size(beta, g.n_edges(), "beta");
  const auto& e = g.incidence();
  Eigen::MatrixXd x = e * beta.asDiagonal() * e.transpose();
  x.diagonal() += rho + alpha;
  return x;
}

CertificateReport check_design(const Eigen::VectorXd& rho, const Eigen::VectorXd& alpha,
                               const Eigen::VectorXd& beta, const NetworkGraph& g) {
  CertificateReport r;
  r.x = passivation_matrix(rho, alpha, beta, g);
  r.min_eig = symmetric_eigenvalues(r.x)(0);
  r.pd_tol = 1e-9 * (1.0 + r.x.cwiseAbs().rowwise().sum().maxCoeff());
  r.positive_definite = r.min_eig > r.pd_tol;
  return r;
}

bool passivation_feasible(const Eigen::VectorXd& rho, const NetworkGraph& g) {
  require_size(rho, g.n_vertices(), "rho");
  for (const auto& c : g.connected_components()) {
    double sum = 0.0;
    for (int v : c.vertices) sum += rho(v);
    if (!(sum > 0.0)) return false;
  }
  return true;
}

double b_threshold(const Eigen::VectorXd& rho, const NetworkGraph& g) {
  require_size(rho, g.n_vertices(), "rho");
  if (!g.is_connected()) throw Error(ErrorCode::kGraphDisconnected, "b threshold is per component");
  const double sum = rho.sum();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::kNotPassivizable, "sum of passivity indices is " + std::to_string(sum));
  }
  if (g.n_vertices() == 1) return 0.0;

  const double n = g.n_vertices();
  // (n / sum) E^T R^2 E - E^T R E = E^T diag(w) E
  const Eigen::VectorXd w = (n / sum) * rho.cwiseAbs2() - rho;
  const double l2 = lambda2(g);
  return clamped_lambda_max_edge_form(w, g) / (l2 * l2);
}

double default_epsilon(double b) { return 0.1 * std::max(1.0, b); }

GainDesign uniform_network_gain(const Eigen::VectorXd& rho, const NetworkGraph& g,
                                std::optional<double> epsilon) {
  require_size(rho, g.n_vertices(), "rho");
  if (!passivation_feasible(rho, g)) {
    throw Error(ErrorCode::kNotPassivizable,
                "sum of passivity indices is not positive on every component");
  }
  return finish_design(rho, g, Eigen::VectorXd::Zero(g.n_vertices()), epsilon);
}

GainDesign hybrid_gain(const Eigen::VectorXd& rho, const NetworkGraph& g,
                       const std::vector<int>& self_regulating, std::optional<double> epsilon) {
  require_size(rho, g.n_vertices(), "rho");
  std::vector<int> vsr = self_regulating;
  std::sort(vsr.begin(), vsr.end());
  vsr.erase(std::unique(vsr.begin(), vsr.end()), vsr.end());
  for (int v : vsr) {
    if (v < 0 || v >= g.n_vertices()) {
      throw Error(ErrorCode::kIndexOutOfRange, "self-regulating vertex " + std::to_string(v));
    }
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(g.n_vertices());
  for (const auto& c : g.connected_components()) {
    double sum = 0.0;
    for (int v : c.vertices) sum += rho(v);
    if (sum > 0.0) continue;
    const auto it = std::find_if(vsr.begin(), vsr.end(), [&](int v) {
      return std::binary_search(c.vertices.begin(), c.vertices.end(), v);
    });
    if (it == vsr.end()) {
      throw Error(ErrorCode::kEmptySelfRegulatingSet,
                  "component containing vertex " + std::to_string(c.vertices.front()) +
                      " has sum rho = " + std::to_string(sum) + " and no self-regulating agent");
    }
    alpha(*it) = 1.0 - sum;
  }
  return finish_design(rho, g, std::move(alpha), epsilon);
}

}  // namespace netpass

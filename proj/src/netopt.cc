#include "netpass/netopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "netpass/errors.hpp"

namespace netpass {

namespace {

constexpr double kCurvatureTol = 1e-9;
constexpr int kBruteForceMaxDim = 4;
constexpr int kMaxZoomWalks = 1000;
constexpr double kCoarseGridBudget = 2e6;

Eigen::VectorXd edge_differences(const NetworkGraph& g, const Eigen::VectorXd& y) {
  Eigen::VectorXd z(g.n_edges());
  const auto& edges = g.edges();
  for (int k = 0; k < g.n_edges(); ++k) z(k) = y(edges[k].head) - y(edges[k].tail);
  return z;
}

Eigen::VectorXd apply_incidence(const NetworkGraph& g, const Eigen::VectorXd& flow) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.n_vertices());
  const auto& edges = g.edges();
  for (int k = 0; k < g.n_edges(); ++k) {
    out(edges[k].head) += flow(k);
    out(edges[k].tail) -= flow(k);
  }
  return out;
}

// Factorization of the y-subproblem Hessian H + penalty L. H is constant for
// every supported agent kind (affine k^-1), so it is refreshed only when the
// penalty changes.
class YStep {
 public:
  YStep(const RegularizedProblem& p, const Eigen::MatrixXd& laplacian)
      : hessian_(p.smooth_hessian(Eigen::VectorXd::Zero(p.n()))), laplacian_(laplacian) {}

  void refactor(double penalty) {
    const Eigen::MatrixXd a = hessian_ + penalty * laplacian_;
    ldlt_.compute(a);
    use_ldlt_ = ldlt_.info() == Eigen::Success && ldlt_.isPositive() && ldlt_.rcond() > 1e-13;
    if (!use_ldlt_) cod_.compute(a);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    return use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(rhs)) : Eigen::VectorXd(cod_.solve(rhs));
  }

 private:
  Eigen::MatrixXd hessian_;
  const Eigen::MatrixXd& laplacian_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
  bool use_ldlt_ = false;
};

}  // namespace

RegularizedProblem::RegularizedProblem(NetworkGraph graph, AgentBank agents,
                                       std::vector<ControllerModel> controllers,
                                       Eigen::VectorXd alpha, Eigen::VectorXd beta)
    : graph_(std::move(graph)),
      agents_(std::move(agents)),
      controllers_(std::move(controllers)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)) {
  if (agents_.size() != n() || static_cast<int>(controllers_.size()) != m() ||
      alpha_.size() != n() || beta_.size() != m()) {
    throw Error(ErrorCode::kDimensionMismatch, "problem data does not match the graph");
  }
  const auto& e = graph_.incidence();
  regularizer_ = e * beta_.asDiagonal() * e.transpose();
  regularizer_.diagonal() += alpha_;
}

bool RegularizedProblem::is_unregularized() const {
  return (alpha_.size() == 0 || alpha_.isZero(0.0)) && (beta_.size() == 0 || beta_.isZero(0.0));
}

double RegularizedProblem::smooth_objective(const Eigen::VectorXd& y) const {
  return agents_.integral_fn(y) + 0.5 * y.dot(regularizer_ * y);
}

double RegularizedProblem::edge_objective(const Eigen::VectorXd& zeta) const {
  double total = 0.0;
  for (int k = 0; k < m(); ++k) total += controllers_[k].gamma_integral(zeta(k));
  return total;
}

double RegularizedProblem::objective(const Eigen::VectorXd& y) const {
  return smooth_objective(y) + edge_objective(edge_differences(graph_, y));
}

Eigen::MatrixXd RegularizedProblem::smooth_hessian(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd h = regularizer_;
  h.diagonal() += agents_.inverse_steady_state_slope(y);
  return h;
}

RegularizedProblem build_problem(const AgentBank& agents,
                                 const std::vector<ControllerModel>& controllers,
                                 const NetworkGraph& g, const GainDesign& gain) {
  return RegularizedProblem(g, agents, controllers, gain.alpha, gain.beta);
}

Eigen::VectorXd smooth_gradient(const RegularizedProblem& p, const Eigen::VectorXd& y) {
  return p.agents().inverse_steady_state(y) + p.regularizer_matrix() * y;
}

ConvexityProbe convexity_probe(const RegularizedProblem& p, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorCode::kInvalidArgument, "convexity probe needs a sample");
  const Eigen::VectorXd nominal = p.agents().nominal_outputs();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(nominal.minCoeff() - 10.0, nominal.maxCoeff() + 10.0);

  ConvexityProbe probe;
  probe.min_curvature = std::numeric_limits<double>::infinity();
  Eigen::VectorXd y(p.n());
  for (int s = 0; s < n_samples; ++s) {
    for (int i = 0; i < p.n(); ++i) y(i) = dist(rng);
    probe.min_curvature = std::min(probe.min_curvature, symmetric_eigenvalues(p.smooth_hessian(y))(0));
  }
  probe.nonconvex = probe.min_curvature < -kCurvatureTol;
  return probe;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIter: return "max_iter";
    case SolveStatus::kNonConvexDetected: return "nonconvex_detected";
  }
  return "unknown";
}

Minimizer solve(const RegularizedProblem& p, const SolverParams& params) {
  if (!(params.step > 0.0) || !(params.tol > 0.0) || params.max_iter < 1) {
    throw Error(ErrorCode::kInvalidArgument, "solver needs step > 0, tol > 0, max_iter >= 1");
  }
  const auto& g = p.graph();
  const bool nonconvex = convexity_probe(p, 8).nonconvex;
  const Eigen::MatrixXd laplacian = g.laplacian();

  // Residual balancing: rescale the penalty by 2 when one residual exceeds
  // the other by a factor of 10.
  constexpr double kBalance = 10.0;
  constexpr double kScale = 2.0;
  constexpr double kMinPenalty = 1e-6;
  constexpr double kMaxPenalty = 1e6;

  double penalty = params.step;
  YStep ystep(p, laplacian);
  ystep.refactor(penalty);

  Eigen::VectorXd y = p.agents().nominal_outputs();
  Eigen::VectorXd zeta = edge_differences(g, y);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p.m());
  const Eigen::VectorXd offset = p.agents().inverse_steady_state(Eigen::VectorXd::Zero(p.n()));

  Minimizer out;
  out.status = SolveStatus::kMaxIter;
  int it = 0;
  double r_primal = std::numeric_limits<double>::infinity();
  double r_dual = std::numeric_limits<double>::infinity();
  for (it = 1; it <= params.max_iter; ++it) {
    // y-step: H y + offset + E lambda + penalty E (E^T y - zeta) = 0.
    const Eigen::VectorXd rhs = -offset - apply_incidence(g, lambda - penalty * zeta);
    y = ystep.solve(rhs);

    const Eigen::VectorXd ey = edge_differences(g, y);
    const Eigen::VectorXd zeta_prev = zeta;
    for (int k = 0; k < p.m(); ++k) {
      zeta(k) = p.controllers()[k].prox_gamma_reg(0.0, ey(k) + lambda(k) / penalty, 1.0 / penalty);
    }
    lambda += penalty * (ey - zeta);

    r_primal = (ey - zeta).norm();
    r_dual = penalty * apply_incidence(g, zeta - zeta_prev).norm();
    if (!y.allFinite() || !lambda.allFinite()) break;
    if (r_primal < params.tol && r_dual < params.tol) {
      out.status = SolveStatus::kOptimal;
      break;
    }

    if (r_primal > kBalance * r_dual && penalty * kScale <= kMaxPenalty) {
      penalty *= kScale;
      ystep.refactor(penalty);
    } else if (r_dual > kBalance * r_primal && penalty / kScale >= kMinPenalty) {
      penalty /= kScale;
      ystep.refactor(penalty);
    }
  }

  out.y_star = y;
  out.zeta_star = zeta;
  out.mu_star = lambda;
  out.objective_value = p.objective(y);
  out.primal_residual = r_primal;
  out.dual_residual = r_dual;
  out.iterations = std::min(it, params.max_iter);
  if (nonconvex) out.status = SolveStatus::kNonConvexDetected;
  return out;
}

Minimizer brute_force(const RegularizedProblem& p, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi, double spacing) {
  const int n = p.n();
  if (n > kBruteForceMaxDim) {
    throw Error(ErrorCode::kDimensionTooLarge,
                "grid search is limited to " + std::to_string(kBruteForceMaxDim) + " agents");
  }
  if (lo.size() != n || hi.size() != n) throw Error(ErrorCode::kDimensionMismatch, "box bounds");
  if (!(spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "spacing must be positive");

  Eigen::VectorXd best_y = 0.5 * (lo + hi);
  double best = std::numeric_limits<double>::infinity();
  long evaluations = 0;

  // Visits every point of the grid start + h * k, k_i in [0, count_i), that
  // lies inside the box.
  auto scan = [&](const Eigen::VectorXd& start, const std::vector<long>& count, double h) {
    std::vector<long> idx(n, 0);
    Eigen::VectorXd y(n);
    const double slack = 1e-9 * h;
    while (true) {
      bool inside = true;
      for (int i = 0; i < n; ++i) {
        y(i) = start(i) + h * static_cast<double>(idx[i]);
        inside = inside && y(i) >= lo(i) - slack && y(i) <= hi(i) + slack;
      }
      if (inside) {
        const double f = p.objective(y);
        ++evaluations;
        if (f < best) {
          best = f;
          best_y = y;
        }
      }
      int d = 0;
      while (d < n && ++idx[d] == count[d]) idx[d++] = 0;
      if (d == n) break;
    }
  };

  const double width = (hi - lo).maxCoeff();
  const long per_dim_budget =
      std::max(2L, static_cast<long>(std::floor(std::pow(kCoarseGridBudget, 1.0 / std::max(n, 1)))));
  double h = std::max(spacing, width / static_cast<double>(per_dim_budget - 1));
  {
    std::vector<long> count(n);
    for (int i = 0; i < n; ++i) count[i] = static_cast<long>(std::floor((hi(i) - lo(i)) / h)) + 1;
    scan(lo, count, h);
  }
  // Zoom in around the incumbent. While the incumbent sits on the edge of
  // the zoom window (and not on the box), the window follows it, which keeps
  // narrow valleys of ill-conditioned objectives from stalling the search.
  while (h > spacing) {
    const double h_next = std::max(spacing, h / 10.0);
    const long count_1d = static_cast<long>(std::ceil(4.0 * h / h_next)) + 1;
    const std::vector<long> count(n, count_1d);
    for (int walk = 0; walk < kMaxZoomWalks; ++walk) {
      const Eigen::VectorXd start = best_y.array() - 2.0 * h;
      scan(start, count, h_next);
      bool on_edge = false;
      for (int i = 0; i < n; ++i) {
        const double end = start(i) + h_next * static_cast<double>(count_1d - 1);
        const bool low_edge = best_y(i) < start(i) + 0.5 * h_next && best_y(i) > lo(i) + 0.5 * h_next;
        const bool high_edge = best_y(i) > end - 0.5 * h_next && best_y(i) < hi(i) - 0.5 * h_next;
        on_edge = on_edge || low_edge || high_edge;
      }
      if (!on_edge) break;
    }
    h = h_next;
  }

  Minimizer out;
  out.y_star = best_y;
  out.zeta_star = edge_differences(p.graph(), best_y);
  out.mu_star = Eigen::VectorXd::Zero(p.m());
  out.objective_value = best;
  out.iterations = static_cast<int>(std::min<long>(evaluations, std::numeric_limits<int>::max()));
  out.status = SolveStatus::kOptimal;
  return out;
}

double ofp_objective(const RegularizedProblem& p, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& mu) {
  if (!p.is_unregularized()) {
    throw Error(ErrorCode::kInvalidArgument, "flow objective is defined for alpha = beta = 0");
  }
  if (u.size() != p.n() || mu.size() != p.m()) {
    throw Error(ErrorCode::kDimensionMismatch, "flow point does not match the network");
  }
  double total = p.agents().ofp_primal_fn(u);
  for (int k = 0; k < p.m(); ++k) total += p.controllers()[k].gamma_conjugate(mu(k));
  return total;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> dual_point(const RegularizedProblem& p,
                                                       const Minimizer& m) {
  return {-apply_incidence(p.graph(), m.mu_star), m.mu_star};
}

}  // namespace netpass

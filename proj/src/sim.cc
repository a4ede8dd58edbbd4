#include "netpass/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include "netpass/errors.hpp"

namespace netpass {

namespace {

constexpr double kBlowupLimit = 1e12;

bool out_of_range(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || std::abs(v(i)) > kBlowupLimit) return true;
  }
  return false;
}

// max(|x'|, |mu'|), except that an edge whose eta is heading back towards 0
// counts with |eta'|: a saturated tanh hides that motion from mu'.
double loop_residual(const LoopSignals& s, const Eigen::VectorXd& eta) {
  double r = 0.0;
  if (s.x_dot.size() > 0) r = s.x_dot.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < s.mu_dot.size(); ++k) {
    const bool returning = s.eta_dot(k) * eta(k) < 0.0;
    r = std::max(r, std::abs(returning ? s.eta_dot(k) : s.mu_dot(k)));
  }
  return r;
}

}  // namespace

ClosedLoopSystem::ClosedLoopSystem(NetworkGraph graph, AgentBank agents,
                                   std::vector<ControllerModel> controllers, GainDesign gain)
    : graph_(std::move(graph)),
      agents_(std::move(agents)),
      controllers_(std::move(controllers)),
      gain_(std::move(gain)) {
  if (agents_.size() != graph_.n_vertices()) {
    throw Error(ErrorCode::kDimensionMismatch, std::to_string(agents_.size()) + " agents for " +
                                                   std::to_string(graph_.n_vertices()) + " vertices");
  }
  if (static_cast<int>(controllers_.size()) != graph_.n_edges()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(controllers_.size()) + " controllers for " +
                    std::to_string(graph_.n_edges()) + " edges");
  }
  if (gain_.alpha.size() != n() || gain_.beta.size() != m()) {
    throw Error(ErrorCode::kDimensionMismatch, "gain design does not match the graph");
  }
  const auto& e = graph_.incidence();
  feedback_ = e * gain_.beta.asDiagonal() * e.transpose();
  feedback_.diagonal() += gain_.alpha;
}

LoopSignals evaluate_loop(const ClosedLoopSystem& sys, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& eta) {
  const int n = sys.n();
  const int m = sys.m();
  const auto& edges = sys.graph().edges();
  const auto& beta = sys.gain().beta;
  const auto& alpha = sys.gain().alpha;

  LoopSignals s;
  s.y.resize(n);
  for (int i = 0; i < n; ++i) s.y(i) = sys.agents()[i].output(x(i));

  s.zeta.resize(m);
  s.mu.resize(m);
  s.eta_dot.resize(m);
  s.mu_dot.resize(m);
  s.u = -alpha.cwiseProduct(s.y);
  for (int k = 0; k < m; ++k) {
    const auto [h, t] = edges[k];
    const auto& c = sys.controllers()[k];
    const double z = s.y(h) - s.y(t);
    s.zeta(k) = z;
    s.mu(k) = c.output(eta(k), z);
    s.eta_dot(k) = c.drift(eta(k), z);
    s.mu_dot(k) = c.output_rate(eta(k), z);
    const double flow = s.mu(k) + beta(k) * z;
    s.u(h) -= flow;
    s.u(t) += flow;
  }

  s.x_dot.resize(n);
  for (int i = 0; i < n; ++i) s.x_dot(i) = sys.agents()[i].drift(x(i), s.u(i));
  return s;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> closed_loop_derivative(const ClosedLoopSystem& sys,
                                                                   const Eigen::VectorXd& x,
                                                                   const Eigen::VectorXd& eta) {
  auto s = evaluate_loop(sys, x, eta);
  return {std::move(s.x_dot), std::move(s.eta_dot)};
}

SimParams default_sim_params(const AgentBank& agents) {
  double rate = 0.0;
  for (const auto& a : agents.agents()) rate = std::max(rate, a.characteristic_rate());
  const double t_char = rate > 0.0 ? std::max(1e-4, 1.0 / rate) : 1.0;
  SimParams p;
  p.dt = 1e-3 * t_char;
  p.t_max = 1e4 * t_char;
  return p;
}

Eigen::VectorXd default_initial_state(const AgentBank& agents, std::uint64_t seed) {
  const Eigen::VectorXd nominal = agents.nominal_outputs();
  Eigen::VectorXd x0(agents.size());
  if (agents.size() == 0) return x0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(nominal.minCoeff() - 10.0, nominal.maxCoeff() + 10.0);
  for (int i = 0; i < agents.size(); ++i) x0(i) = dist(rng);
  return x0;
}

Trajectory simulate(const ClosedLoopSystem& sys, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& eta0, const SimParams& params) {
  if (!(params.dt > 0.0) || !(params.t_max > params.dt)) {
    throw Error(ErrorCode::kInvalidArgument, "simulation needs dt > 0 and t_max > dt");
  }
  if (params.window < 1) throw Error(ErrorCode::kInvalidArgument, "window must be >= 1");
  if (x0.size() != sys.n() || eta0.size() != sys.m()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state does not match the network");
  }

  const long max_steps = static_cast<long>(std::floor(params.t_max / params.dt + 1e-9));
  int stride = params.record_stride;
  if (stride <= 0) {
    const long cap = std::max(1, params.max_records - 1);
    stride = static_cast<int>(std::max(1L, (max_steps + cap - 1) / cap));
  }

  std::vector<Eigen::VectorXd> xs;
  std::vector<Eigen::VectorXd> etas;
  auto record = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& eta) {
    xs.push_back(x);
    etas.push_back(eta);
  };

  Eigen::VectorXd x = x0;
  Eigen::VectorXd eta = eta0;
  record(x, eta);

  const double dt = params.dt;
  std::deque<double> window;
  double window_max = std::numeric_limits<double>::infinity();
  bool steady = false;
  long step = 0;

  LoopSignals s = evaluate_loop(sys, x, eta);
  while (step < max_steps) {
    const Eigen::VectorXd& k1x = s.x_dot;
    const Eigen::VectorXd& k1e = s.eta_dot;
    const auto [k2x, k2e] = closed_loop_derivative(sys, x + 0.5 * dt * k1x, eta + 0.5 * dt * k1e);
    const auto [k3x, k3e] = closed_loop_derivative(sys, x + 0.5 * dt * k2x, eta + 0.5 * dt * k2e);
    const auto [k4x, k4e] = closed_loop_derivative(sys, x + dt * k3x, eta + dt * k3e);
    x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    eta += (dt / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
    ++step;

    if (out_of_range(x) || out_of_range(eta)) {
      throw Error(ErrorCode::kNumericalBlowup,
                  "state exceeded 1e12 at t = " + std::to_string(step * dt));
    }

    s = evaluate_loop(sys, x, eta);
    window.push_back(loop_residual(s, eta));
    if (static_cast<int>(window.size()) > params.window) window.pop_front();
    if (static_cast<int>(window.size()) == params.window) {
      window_max = *std::max_element(window.begin(), window.end());
      if (window_max < params.steady_tol) steady = true;
    }

    if (step % stride == 0) {
      record(x, eta);
      if (steady) break;
    }
  }

  Trajectory traj;
  const auto samples = static_cast<Eigen::Index>(xs.size());
  traj.dt = dt;
  traj.stride = stride;
  traj.steps = step;
  traj.t_end = step * dt;
  traj.times.resize(samples);
  traj.x_states.resize(sys.n(), samples);
  traj.eta_states.resize(sys.m(), samples);
  traj.y_outputs.resize(sys.n(), samples);
  for (Eigen::Index j = 0; j < samples; ++j) {
    traj.times(j) = static_cast<double>(j) * stride * dt;
    traj.x_states.col(j) = xs[j];
    traj.eta_states.col(j) = etas[j];
    for (int i = 0; i < sys.n(); ++i) traj.y_outputs(i, j) = sys.agents()[i].output(xs[j](i));
  }
  traj.x_final = x;
  traj.eta_final = eta;
  traj.residual = window.empty() ? loop_residual(s, eta) : *std::max_element(window.begin(), window.end());
  traj.converged = steady;
  if (steady) traj.y_ss = s.y;
  return traj;
}

double steady_state_residual(const ClosedLoopSystem& sys, const Eigen::VectorXd& y_ss,
                             std::optional<double> zeta_tol) {
  if (y_ss.size() != sys.n()) throw Error(ErrorCode::kDimensionMismatch, "y_ss length");
  const double tol = zeta_tol.value_or(1e-6 * (1.0 + (y_ss.size() ? y_ss.cwiseAbs().maxCoeff() : 0.0)));
  const auto& edges = sys.graph().edges();

  Eigen::VectorXd r = sys.agents().inverse_steady_state(y_ss) + sys.feedback_matrix() * y_ss;
  std::vector<int> free_edges;
  for (int k = 0; k < sys.m(); ++k) {
    const auto [h, t] = edges[k];
    const double z = y_ss(h) - y_ss(t);
    const auto& c = sys.controllers()[k];
    double mu = 0.0;
    if (c.kind() == ControllerKind::kStaticGain) {
      mu = c.gain() * z;
    } else if (std::abs(z) > tol) {
      mu = z > 0.0 ? 1.0 : -1.0;
    } else {
      free_edges.push_back(k);
      continue;
    }
    r(h) += mu;
    r(t) -= mu;
  }

  // Box-constrained least squares over the free selections by cyclic
  // coordinate descent; each coordinate touches two entries of r.
  std::vector<double> sel(free_edges.size(), 0.0);
  for (int sweep = 0; sweep < 20000 && !free_edges.empty(); ++sweep) {
    double biggest = 0.0;
    for (std::size_t j = 0; j < free_edges.size(); ++j) {
      const auto [h, t] = edges[free_edges[j]];
      const double target = std::clamp(sel[j] - 0.5 * (r(h) - r(t)), -1.0, 1.0);
      const double delta = target - sel[j];
      if (delta == 0.0) continue;
      sel[j] = target;
      r(h) += delta;
      r(t) -= delta;
      biggest = std::max(biggest, std::abs(delta));
    }
    if (biggest < 1e-15) break;
  }
  return r.norm();
}

double augmented_dissipation_gap(const ClosedLoopSystem& sys, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& eta, const Eigen::VectorXd& y_ss) {
  const LoopSignals s = evaluate_loop(sys, x, eta);
  const Eigen::VectorXd u_ss = sys.agents().inverse_steady_state(y_ss);
  const Eigen::MatrixXd& fb = sys.feedback_matrix();
  const Eigen::VectorXd v = s.u + fb * s.y;
  const Eigen::VectorXd v_ss = u_ss + fb * y_ss;
  const double storage_rate = sys.agents().storage_rate(x, s.u, y_ss);
  return storage_rate - (s.y - y_ss).dot(v - v_ss);
}

double max_dissipation_gap(const ClosedLoopSystem& sys, const Trajectory& traj) {
  if (!traj.y_ss) throw Error(ErrorCode::kInvalidArgument, "trajectory has no steady state");
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < traj.times.size(); ++j) {
    worst = std::max(worst, augmented_dissipation_gap(sys, traj.x_states.col(j),
                                                      traj.eta_states.col(j), *traj.y_ss));
  }
  return worst;
}

}  // namespace netpass

#include "netpass/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "netpass/errors.hpp"
#include "netpass/netopt.hpp"

namespace netpass {
namespace {

GainDesign zero_gain(int n, int m) {
  GainDesign g;
  g.alpha = Eigen::VectorXd::Zero(n);
  g.beta = Eigen::VectorXd::Zero(m);
  return g;
}

std::vector<ControllerModel> tanh_edges(const NetworkGraph& g) {
  return std::vector<ControllerModel>(g.n_edges(), ControllerModel::tanh_integrator());
}

SimParams params(double dt, double t_max) {
  SimParams p;
  p.dt = dt;
  p.t_max = t_max;
  return p;
}

// Complete graph of passive traffic agents with spread preferred velocities.
ClosedLoopSystem passive_system(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> v0(50, 15);
  std::uniform_real_distribution<double> v1(0.5, 1.5), kappa(0.5, 2);
  std::vector<AgentModel> agents;
  for (int i = 0; i < n; ++i) agents.push_back(AgentModel::traffic(kappa(rng), v0(rng), v1(rng)));
  const auto g = complete_graph(n);
  AgentBank bank(agents);
  return ClosedLoopSystem(g, bank, tanh_edges(g), uniform_network_gain(bank.rho_vector(), g));
}

TEST(Sim, ConsensusEquilibrium) {
  const auto g = complete_graph(3);
  std::vector<AgentModel> agents(3, AgentModel::traffic(1, 20, 0.8));
  const ClosedLoopSystem sys(g, AgentBank(agents), tanh_edges(g), zero_gain(3, 3));
  const auto [xd, ed] = closed_loop_derivative(sys, Eigen::Vector3d(20, 20, 20), Eigen::Vector3d::Zero());
  EXPECT_EQ(xd.norm(), 0.0);
  EXPECT_EQ(ed.norm(), 0.0);
}

TEST(Sim, SingleEdgeReducesDisagreement) {
  const auto g = path_graph(2);
  std::vector<AgentModel> agents(2, AgentModel::traffic(1, 0, 1));
  const ClosedLoopSystem sys(g, AgentBank(agents), tanh_edges(g), zero_gain(2, 1));
  // Edge (0 -> 1): zeta = x0 - x1 > 0 drives eta up, and mu > 0 pushes x0 down, x1 up.
  const auto [xd, ed] = closed_loop_derivative(sys, Eigen::Vector2d(1, -1), Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_GT(ed(0), 0.0);
  EXPECT_LT(xd(0), xd(1));
  const auto signals = evaluate_loop(sys, Eigen::Vector2d(1, -1), Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_DOUBLE_EQ(signals.zeta(0), 2.0);
  EXPECT_DOUBLE_EQ(signals.u(0), -std::tanh(0.5));
  EXPECT_DOUBLE_EQ(signals.u(1), std::tanh(0.5));
}

TEST(Sim, DerivativeVanishesAtLiftedMinimizer) {
  const auto g = path_graph(2);
  AgentBank bank({AgentModel::traffic(1, 10, 1), AgentModel::traffic(1, 11, 1)});
  const auto gain = uniform_network_gain(bank.rho_vector(), g);
  const ClosedLoopSystem sys(g, bank, tanh_edges(g), gain);
  const auto opt = solve(build_problem(bank, tanh_edges(g), g, gain));
  ASSERT_EQ(opt.status, SolveStatus::kOptimal);
  EXPECT_NEAR(opt.y_star(0), 10.5, 1e-6);
  EXPECT_NEAR(opt.y_star(1), 10.5, 1e-6);
  ASSERT_LT(std::abs(opt.mu_star(0)), 1.0);
  Eigen::VectorXd eta(1);
  eta(0) = std::atanh(opt.mu_star(0));
  const auto [xd, ed] = closed_loop_derivative(sys, opt.y_star, eta);
  EXPECT_LE(xd.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(ed.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Sim, PassiveNetworkConverges) {
  const auto sys = passive_system(5, 1);
  const auto x0 = default_initial_state(sys.agents(), 1);
  const auto traj = simulate(sys, x0, Eigen::VectorXd::Zero(sys.m()), default_sim_params(sys.agents()));
  ASSERT_TRUE(traj.converged);
  EXPECT_LT(traj.residual, 1e-8);
  ASSERT_TRUE(traj.y_ss.has_value());
  EXPECT_LE(steady_state_residual(sys, *traj.y_ss), 1e-6);
}

TEST(Sim, UnpassivizedPairDoesNotSettle) {
  // rho = (1, -1) on P2 with no gain: the second agent is unstable on its own.
  const auto g = path_graph(2);
  AgentBank bank({AgentModel::traffic(1, 0, 1), AgentModel::traffic(-1, 0, -1)});
  const ClosedLoopSystem sys(g, bank, tanh_edges(g), zero_gain(2, 1));
  bool settled = true;
  try {
    settled = simulate(sys, Eigen::Vector2d(1, 2), Eigen::VectorXd::Zero(1), params(1e-3, 100)).converged;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericalBlowup);
    settled = false;
  }
  EXPECT_FALSE(settled);
}

TEST(Sim, HybridDesignConverges) {
  const auto g = path_graph(2);
  AgentBank bank({AgentModel::traffic(1, 0, 1), AgentModel::traffic(-1, 5, -1)});
  const auto gain = hybrid_gain(bank.rho_vector(), g, {0});
  ASSERT_TRUE(gain.certified);
  const ClosedLoopSystem sys(g, bank, tanh_edges(g), gain);
  const auto traj = simulate(sys, Eigen::Vector2d(3, -4), Eigen::VectorXd::Zero(1), params(1e-3, 2000));
  EXPECT_TRUE(traj.converged);
}

TEST(Sim, ResidualAtMinimizerAndAway) {
  const auto sys = passive_system(4, 2);
  const auto opt = solve(build_problem(sys.agents(), sys.controllers(), sys.graph(), sys.gain()));
  ASSERT_EQ(opt.status, SolveStatus::kOptimal);
  EXPECT_LE(steady_state_residual(sys, opt.y_star), 1e-6);
  EXPECT_GT(steady_state_residual(sys, opt.y_star + Eigen::VectorXd::LinSpaced(4, 5, 20)), 0.1);
}

TEST(Sim, ResidualZeroAtBalancedConsensus) {
  const auto g = complete_graph(3);
  AgentBank bank({AgentModel::traffic(1, 9, 1), AgentModel::traffic(1, 10, 1), AgentModel::traffic(1, 11, 1)});
  const ClosedLoopSystem sys(g, bank, tanh_edges(g), zero_gain(3, 3));
  EXPECT_NEAR(steady_state_residual(sys, Eigen::Vector3d(10, 10, 10)), 0.0, 1e-9);
}

TEST(Sim, HalvingStepKeepsSteadyState) {
  const auto sys = passive_system(4, 3);
  const auto x0 = default_initial_state(sys.agents(), 3);
  auto p = default_sim_params(sys.agents());
  const auto a = simulate(sys, x0, Eigen::VectorXd::Zero(sys.m()), p);
  p.dt /= 2;
  const auto b = simulate(sys, x0, Eigen::VectorXd::Zero(sys.m()), p);
  ASSERT_TRUE(a.converged && b.converged);
  EXPECT_LE((*a.y_ss - *b.y_ss).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Sim, DissipationInequalityAlongRun) {
  const auto sys = passive_system(5, 4);
  auto p = default_sim_params(sys.agents());
  const auto traj = simulate(sys, default_initial_state(sys.agents(), 4), Eigen::VectorXd::Zero(sys.m()), p);
  ASSERT_TRUE(traj.converged);
  EXPECT_LE(max_dissipation_gap(sys, traj), 1e-8);
}

TEST(Sim, RecordsEveryStepWithUnitStride) {
  const auto sys = passive_system(3, 5);
  auto p = params(1e-2, 50);
  p.record_stride = 1;
  p.steady_tol = 1e-300;  // never settles, so the run covers t_max
  const auto traj = simulate(sys, default_initial_state(sys.agents(), 5), Eigen::VectorXd::Zero(sys.m()), p);
  EXPECT_FALSE(traj.converged);
  EXPECT_EQ(traj.times.size(), static_cast<Eigen::Index>(std::floor(traj.t_end / p.dt + 1e-9)) + 1);
  EXPECT_EQ(traj.x_states.cols(), traj.times.size());
  EXPECT_NEAR(traj.t_end, 50.0, 1e-9);
}

TEST(Sim, Deterministic) {
  const auto sys = passive_system(4, 6);
  const auto x0 = default_initial_state(sys.agents(), 9);
  EXPECT_EQ(x0, default_initial_state(sys.agents(), 9));
  const auto p = default_sim_params(sys.agents());
  const auto a = simulate(sys, x0, Eigen::VectorXd::Zero(sys.m()), p);
  const auto b = simulate(sys, x0, Eigen::VectorXd::Zero(sys.m()), p);
  EXPECT_EQ(a.x_states, b.x_states);
  EXPECT_EQ(a.eta_states, b.eta_states);
}

TEST(Sim, InitialStateRange) {
  AgentBank bank({AgentModel::traffic(1, 20, 0.8), AgentModel::traffic(1, 120, 0.8)});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x0 = default_initial_state(bank, seed);
    EXPECT_GE(x0.minCoeff(), 10.0);
    EXPECT_LE(x0.maxCoeff(), 130.0);
  }
}

TEST(Sim, DefaultParamsScaleWithFastestAgent) {
  AgentBank bank({AgentModel::traffic(2, 20, 0.8), AgentModel::traffic(-4, 120, -0.8)});
  const auto p = default_sim_params(bank);
  EXPECT_DOUBLE_EQ(p.dt, 0.25e-3);
  EXPECT_DOUBLE_EQ(p.t_max, 2500.0);
}

TEST(Sim, RejectsMismatchedDimensions) {
  const auto g = path_graph(2);
  AgentBank bank({AgentModel::traffic(1, 0, 1)});
  try {
    ClosedLoopSystem(g, bank, tanh_edges(g), zero_gain(2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

}  // namespace
}  // namespace netpass

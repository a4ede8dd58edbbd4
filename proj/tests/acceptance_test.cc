// Acceptance suite: one PASS/FAIL line per criterion. Exit status is
// nonzero when any criterion fails. argv[1] is the path to the netpass CLI.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "netpass/errors.hpp"
#include "netpass/harness.hpp"

namespace fs = std::filesystem;
using namespace netpass;

namespace {

// Tolerances and sizes, fixed here.
constexpr int kSufficiencyCases = 200;
constexpr double kSufficiencySeconds = 10.0;
constexpr int kNecessityCases = 200;
constexpr double kNecessityTol = 1e-12;
constexpr int kCounterexampleCases = 50;
constexpr double kDeterminantTol = 1e-12;
constexpr double kUniformThresholdTol = 1e-10;
constexpr int kCorrespondenceCases = 20;
constexpr double kCorrespondenceSeconds = 120.0;
constexpr int kHybridCases = 10;
constexpr double kMismatchTol = 1e-2;
constexpr int kOracleCases = 10;
constexpr double kOracleTol = 1e-3;
constexpr double kOracleSpacing = 1e-3;
constexpr int kGradientPoints = 100;
constexpr double kGradientTol = 1e-5;
constexpr int kDualityCases = 5;
constexpr double kDualityTol = 1e-6;
constexpr int kDissipationRuns = 5;
constexpr double kDissipationTol = 1e-8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail << std::endl;
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

NetworkGraph random_connected_graph(std::mt19937_64& rng, int n) {
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
  auto add = [&](int a, int b) {
    if (a == b || used[a][b]) return;
    used[a][b] = used[b][a] = true;
    edges.push_back(rng() % 2 ? Edge{a, b} : Edge{b, a});
  };
  for (int v = 1; v < n; ++v) add(v, static_cast<int>(rng() % v));
  const int extra = static_cast<int>(rng() % (n * (n - 1) / 2 + 1));
  for (int k = 0; k < extra; ++k) add(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
  return NetworkGraph(n, edges);
}

Eigen::VectorXd uniform_rho(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(-2, 2);
  Eigen::VectorXd rho(n);
  for (int i = 0; i < n; ++i) rho(i) = d(rng);
  return rho;
}

double kappa_sum(int n, std::uint64_t seed) { return sample_case_study_parameters(n, seed).kappa.sum(); }

void sufficiency() {
  std::mt19937_64 rng(1001);
  const auto start = Clock::now();
  int ok = 0, cases = 0;
  while (cases < kSufficiencyCases) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto rho = uniform_rho(rng, n);
    if (rho.sum() <= 0) continue;
    const auto g = random_connected_graph(rng, n);
    ++cases;
    try {
      const auto d = uniform_network_gain(rho, g);
      if (d.certified && d.certificate > 0) ++ok;
    } catch (const Error&) {
    }
  }
  const double t = seconds_since(start);
  report(1, "passivation sufficiency", ok == kSufficiencyCases && t < kSufficiencySeconds,
         std::to_string(ok) + "/" + std::to_string(kSufficiencyCases) + " certified in " + fmt(t) +
             " s (limit " + fmt(kSufficiencySeconds) + " s)");
}

void necessity() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> bd(0, 20);
  int ok = 0, cases = 0;
  double worst = -std::numeric_limits<double>::infinity();
  while (cases < kNecessityCases) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto rho = uniform_rho(rng, n);
    if (rho.sum() > 0) continue;
    const auto g = random_connected_graph(rng, n);
    Eigen::VectorXd beta(g.n_edges());
    for (int k = 0; k < g.n_edges(); ++k) beta(k) = bd(rng);
    ++cases;
    const auto r = check_design(rho, Eigen::VectorXd::Zero(n), beta, g);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const double quad = ones.dot(r.x * ones);
    worst = std::max(worst, quad);
    if (quad <= kNecessityTol && std::abs(quad - rho.sum()) <= kNecessityTol && !r.positive_definite) ++ok;
  }
  report(2, "passivation necessity", ok == kNecessityCases,
         std::to_string(ok) + "/" + std::to_string(kNecessityCases) + " with 1'X1 = sum rho <= " +
             fmt(kNecessityTol) + " and not PD (max 1'X1 = " + fmt(worst) + ")");
}

void counterexample() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> bd(0, 10);
  const auto g = path_graph(2);
  Eigen::VectorXd rho(2);
  rho << 1, -1;
  int ok = 0;
  double worst = 0.0;
  for (int i = 0; i < kCounterexampleCases; ++i) {
    const Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, bd(rng));
    const auto r = check_design(rho, Eigen::VectorXd::Zero(2), beta, g);
    const double err = std::abs(r.x.determinant() + 1.0);
    worst = std::max(worst, err);
    if (err <= kDeterminantTol && !r.positive_definite) ++ok;
  }
  report(3, "two-agent counterexample", ok == kCounterexampleCases,
         std::to_string(ok) + "/" + std::to_string(kCounterexampleCases) + " with det(X) = -1 (max error " +
             fmt(worst) + ") and not PD");
}

void uniform_threshold() {
  double worst = 0.0;
  bool ok = true;
  for (const auto& g : {complete_graph(3), complete_graph(5), star_graph(4)}) {
    for (double r : {0.5, 1.0, 3.0}) {
      const double b = b_threshold(Eigen::VectorXd::Constant(g.n_vertices(), r), g);
      worst = std::max(worst, b);
      ok = ok && b <= kUniformThresholdTol;
    }
  }
  report(4, "uniform-rho threshold", ok, "max b = " + fmt(worst) + " (limit " + fmt(kUniformThresholdTol) + ")");
}

void correspondence() {
  const auto start = Clock::now();
  int ok = 0, cases = 0;
  double worst = 0.0;
  std::string failed;
  for (std::uint64_t seed = 0; cases < kCorrespondenceCases; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    if (kappa_sum(n, seed) <= 0) continue;
    ++cases;
    const auto r = verify(generate_case_study(n, seed));
    worst = std::max(worst, r.mismatch);
    if (r.gain_mode == "network_only" && r.sim_converged && r.mismatch <= kMismatchTol) ++ok;
    else failed += " (n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ": " + r.reason + ")";
  }
  const double t = seconds_since(start);
  report(5, "steady state = network-regularized minimizer", ok == kCorrespondenceCases && t < kCorrespondenceSeconds,
         std::to_string(ok) + "/" + std::to_string(kCorrespondenceCases) + ", max mismatch " + fmt(worst) +
             ", " + fmt(t) + " s (limit " + fmt(kCorrespondenceSeconds) + " s)" + failed);
}

void hybrid() {
  int ok = 0, cases = 0;
  double worst = 0.0;
  std::string failed;
  for (std::uint64_t seed = 0; cases < kHybridCases; ++seed) {
    const int n = 4 + static_cast<int>(seed % 7);
    if (kappa_sum(n, seed) >= 0) continue;
    ++cases;
    const auto r = verify(generate_case_study(n, seed, {0}));
    worst = std::max(worst, r.mismatch);
    if (r.gain_mode == "hybrid" && r.gain.certified && r.gain.certificate > 0 && r.sim_converged &&
        r.mismatch <= kMismatchTol) {
      ++ok;
    } else {
      failed += " (n=" + std::to_string(n) + ", seed=" + std::to_string(seed) + ": " + r.reason + ")";
    }
  }
  report(6, "hybrid design", ok == kHybridCases,
         std::to_string(ok) + "/" + std::to_string(kHybridCases) + ", max mismatch " + fmt(worst) + failed);
}

void oracle() {
  int ok = 0, cases = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; cases < kOracleCases; ++seed) {
    const int n = 2 + static_cast<int>(seed % 2);
    const auto cfg = generate_case_study(n, seed, {0});
    const auto gain = design_gain(cfg);
    if (!gain) continue;
    ++cases;
    const auto p = make_problem(cfg, *gain);
    const auto m = solve(p, cfg.solver);
    // Box around the preferred velocities, widened to the strong-convexity
    // ball |y* - y0| <= |g(y0)| / c so that it contains the minimizer.
    const Eigen::VectorXd y0 = AgentBank(cfg.agents).nominal_outputs();
    const Eigen::VectorXd zeta0 = cfg.graph.incidence().transpose() * y0;
    const Eigen::VectorXd g0 = smooth_gradient(p, y0) + cfg.graph.incidence() * zeta0.cwiseSign();
    const double radius = g0.norm() / convexity_probe(p, 4).min_curvature;
    const double lo = std::min(y0.minCoeff() - 5, y0.minCoeff() - radius);
    const double hi = std::max(y0.maxCoeff() + 5, y0.maxCoeff() + radius);
    const auto bf = brute_force(p, Eigen::VectorXd::Constant(n, lo), Eigen::VectorXd::Constant(n, hi),
                                kOracleSpacing);
    const double diff = std::abs(m.objective_value - bf.objective_value);
    worst = std::max(worst, diff);
    if (m.status == SolveStatus::kOptimal && diff <= kOracleTol) ++ok;
  }
  report(7, "solver vs brute force", ok == kOracleCases,
         std::to_string(ok) + "/" + std::to_string(kOracleCases) + ", max objective gap " + fmt(worst) +
             " (limit " + fmt(kOracleTol) + ")");
}

void gradient() {
  std::vector<std::pair<std::string, RegularizedProblem>> classes;
  {
    const auto cfg = generate_case_study(6, 3);
    const auto n = cfg.graph.n_vertices(), m = cfg.graph.n_edges();
    classes.emplace_back("unregularized", RegularizedProblem(cfg.graph, AgentBank(cfg.agents), cfg.controllers,
                                                             Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m)));
    classes.emplace_back("network", make_problem(cfg, *design_gain(cfg)));
  }
  {
    std::uint64_t seed = 0;
    while (kappa_sum(6, seed) >= 0) ++seed;
    const auto cfg = generate_case_study(6, seed, {0});
    classes.emplace_back("hybrid", make_problem(cfg, *design_gain(cfg)));
  }
  {
    const auto g = complete_graph(4);
    AgentBank bank({AgentModel::traffic(2, 30, 0.5), AgentModel::integrator(),
                    AgentModel::static_affine(0.5, 3, 2, 1.5), AgentModel::traffic(-1, 90, -0.8)});
    std::vector<ControllerModel> edges(g.n_edges(), ControllerModel::static_gain(0.7));
    edges[0] = ControllerModel::tanh_integrator();
    classes.emplace_back("mixed", build_problem(bank, edges, g, hybrid_gain(bank.rho_vector(), g, {1})));
  }

  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> d(-20, 160);
  double worst = 0.0;
  for (const auto& [name, p] : classes) {
    for (int trial = 0; trial < kGradientPoints; ++trial) {
      Eigen::VectorXd y(p.n());
      for (int i = 0; i < p.n(); ++i) y(i) = d(rng);
      const Eigen::VectorXd grad = smooth_gradient(p, y);
      Eigen::VectorXd fd(p.n());
      for (int i = 0; i < p.n(); ++i) {
        const double h = 1e-4 * (1 + std::abs(y(i)));
        Eigen::VectorXd yp = y, ym = y;
        yp(i) += h;
        ym(i) -= h;
        fd(i) = (p.smooth_objective(yp) - p.smooth_objective(ym)) / (2 * h);
      }
      worst = std::max(worst, (grad - fd).norm() / std::max(1.0, grad.norm()));
    }
  }
  report(8, "gradient vs central differences", worst <= kGradientTol,
         std::to_string(classes.size()) + " classes x " + std::to_string(kGradientPoints) +
             " points, max relative error " + fmt(worst) + " (limit " + fmt(kGradientTol) + ")");
}

void duality() {
  std::mt19937_64 rng(1009);
  std::normal_distribution<double> spread(0, 15);
  std::uniform_real_distribution<double> kd(0.5, 2), v1d(0.4, 1.6);
  int ok = 0;
  double worst = 0.0;
  for (int c = 0; c < kDualityCases; ++c) {
    const int n = 3 + c;
    std::vector<AgentModel> agents;
    for (int i = 0; i < n; ++i) agents.push_back(AgentModel::traffic(kd(rng), (i < n / 2 ? 20 : 120) + spread(rng), v1d(rng)));
    const auto g = complete_graph(n);
    const RegularizedProblem p(g, AgentBank(agents), std::vector<ControllerModel>(g.n_edges(), ControllerModel::tanh_integrator()),
                               Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(g.n_edges()));
    const auto m = solve(p);
    const auto [u, mu] = dual_point(p, m);
    const double gap = std::abs(p.objective(m.y_star) + ofp_objective(p, u, mu));
    worst = std::max(worst, gap);
    if (m.status == SolveStatus::kOptimal && gap <= kDualityTol) ++ok;
  }
  report(9, "duality gap (passive agents)", ok == kDualityCases,
         std::to_string(ok) + "/" + std::to_string(kDualityCases) + ", max |potential + flow objective| " + fmt(worst) +
             " (limit " + fmt(kDualityTol) + ")");
}

void dissipation() {
  int ok = 0, runs = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; runs < kDissipationRuns; ++seed) {
    const int n = 4 + static_cast<int>(seed % 4);
    const auto cfg = generate_case_study(n, seed, {0});
    const auto gain = design_gain(cfg);
    if (!gain || !gain->certified) continue;
    ++runs;
    const auto sys = make_system(cfg, *gain);
    const auto traj = simulate(sys, initial_state(cfg), Eigen::VectorXd::Zero(sys.m()), cfg.sim);
    if (!traj.converged) continue;
    const double gap = max_dissipation_gap(sys, traj);
    worst = std::max(worst, gap);
    if (gap <= kDissipationTol) ++ok;
  }
  report(10, "augmented dissipation inequality", ok == kDissipationRuns,
         std::to_string(ok) + "/" + std::to_string(kDissipationRuns) + " runs, max gap " + fmt(worst) +
             " (limit " + fmt(kDissipationTol) + ")");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism(const std::string& cli) {
  if (cli.empty()) {
    report(11, "casestudy determinism", false, "no CLI path given");
    return;
  }
  const fs::path root = fs::temp_directory_path() / ("netpass_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  bool ok = true;
  std::string detail;
  for (const std::string extra : {"", " --vsr 0"}) {
    std::vector<std::string> outputs;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = root / ("run" + std::to_string(run) + (extra.empty() ? "" : "_vsr"));
      const std::string cmd = "\"" + cli + "\" casestudy --n 10 --seed 7" + extra + " --out-dir \"" +
                              dir.string() + "\" > \"" + (dir.string() + ".stdout") + "\"";
      const int status = std::system(cmd.c_str());
      outputs.push_back(slurp(dir.string() + ".stdout") + slurp(dir / "report.json") +
                        slurp(dir / "trajectory.csv") + slurp(dir / "pairs.csv"));
      if (status == -1 || slurp(dir / "report.json").empty()) ok = false;
    }
    const bool same = outputs[0] == outputs[1];
    ok = ok && same;
    detail += "casestudy --n 10 --seed 7" + extra + ": " + (same ? "identical" : "differs") + "; ";
  }
  fs::remove_all(root);
  report(11, "casestudy determinism", ok, detail.substr(0, detail.size() - 2));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::function<void()>> criteria{
      sufficiency, necessity, counterexample, uniform_threshold, correspondence, hybrid,
      oracle,      gradient,  duality,        dissipation,       [&] { determinism(cli); }};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "criterion", false, std::string("exception: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

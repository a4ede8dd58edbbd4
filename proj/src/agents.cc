#include "netpass/agents.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "netpass/errors.hpp"

namespace netpass {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// |u| below this counts as the integrator's only steady-state input.
constexpr double kZeroInputTol = 1e-9;
}  // namespace

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kTraffic: return "traffic";
    case AgentKind::kIntegrator: return "integrator";
    case AgentKind::kStaticAffine: return "static_affine";
  }
  return "unknown";
}

AgentModel AgentModel::traffic(double kappa, double v0, double v1) {
  if (!std::isfinite(kappa) || !std::isfinite(v0) || !std::isfinite(v1)) {
    throw Error(ErrorCode::kInvalidArgument, "traffic parameters must be finite");
  }
  if (v1 == 0.0) throw Error(ErrorCode::kInvalidArgument, "traffic agent needs v1 != 0");
  if (!(kappa * v1 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "traffic agent is EIOPS only if kappa * v1 > 0 (kappa=" + std::to_string(kappa) +
                    ", v1=" + std::to_string(v1) + ")");
  }
  return AgentModel(AgentKind::kTraffic, kappa, v0, v1, 1.0 / v1);
}

AgentModel AgentModel::integrator() { return AgentModel(AgentKind::kIntegrator, 0.0, 0.0, 0.0, 0.0); }

AgentModel AgentModel::static_affine(double a, double c, double tau, double rho) {
  if (!(a > 0.0) || !(tau > 0.0) || !std::isfinite(c) || !std::isfinite(rho)) {
    throw Error(ErrorCode::kInvalidArgument, "static_affine needs a > 0, tau > 0 and finite c, rho");
  }
  return AgentModel(AgentKind::kStaticAffine, a, c, tau, rho);
}

double AgentModel::drift(double x, double u) const {
  switch (kind_) {
    case AgentKind::kTraffic: return kappa() * (-x + v0() + v1() * u);
    case AgentKind::kIntegrator: return u;
    case AgentKind::kStaticAffine: return tau() * (-x + slope() * u + offset());
  }
  return 0.0;
}

double AgentModel::inverse_steady_state(double y) const {
  switch (kind_) {
    case AgentKind::kTraffic: return (y - v0()) / v1();
    case AgentKind::kIntegrator: return 0.0;
    case AgentKind::kStaticAffine: return (y - offset()) / slope();
  }
  return 0.0;
}

double AgentModel::inverse_steady_state_slope(double /*y*/) const {
  switch (kind_) {
    case AgentKind::kTraffic: return 1.0 / v1();
    case AgentKind::kIntegrator: return 0.0;
    case AgentKind::kStaticAffine: return 1.0 / slope();
  }
  return 0.0;
}

double AgentModel::integral_fn(double y) const {
  switch (kind_) {
    case AgentKind::kTraffic: {
      const double d = y - v0();
      return d * d / (2.0 * v1());
    }
    case AgentKind::kIntegrator: return 0.0;
    case AgentKind::kStaticAffine: return y * (y - 2.0 * offset()) / (2.0 * slope());
  }
  return 0.0;
}

double AgentModel::ofp_primal_fn(double u) const {
  switch (kind_) {
    case AgentKind::kTraffic:
      if (v1() < 0.0) {
        throw Error(ErrorCode::kNonConvexDual, "traffic agent with v1 < 0 has a concave K*");
      }
      return v0() * u + 0.5 * v1() * u * u;
    case AgentKind::kIntegrator: return std::abs(u) <= kZeroInputTol ? 0.0 : kInf;
    case AgentKind::kStaticAffine:
      return 0.5 * slope() * u * u + offset() * u + offset() * offset() / (2.0 * slope());
  }
  return 0.0;
}

double AgentModel::storage(double x, double y_ss) const {
  const double d = x - y_ss;
  switch (kind_) {
    case AgentKind::kTraffic: return d * d / (2.0 * v1() * kappa());
    case AgentKind::kIntegrator: return 0.5 * d * d;
    case AgentKind::kStaticAffine: return d * d / (2.0 * slope() * tau());
  }
  return 0.0;
}

double AgentModel::storage_rate(double x, double u, double y_ss) const {
  const double d = x - y_ss;
  double gradient = 0.0;
  switch (kind_) {
    case AgentKind::kTraffic: gradient = d / (v1() * kappa()); break;
    case AgentKind::kIntegrator: gradient = d; break;
    case AgentKind::kStaticAffine: gradient = d / (slope() * tau()); break;
  }
  return gradient * drift(x, u);
}

double AgentModel::nominal_output() const {
  switch (kind_) {
    case AgentKind::kTraffic: return v0();
    case AgentKind::kIntegrator: return 0.0;
    case AgentKind::kStaticAffine: return offset();
  }
  return 0.0;
}

double AgentModel::characteristic_rate() const {
  switch (kind_) {
    case AgentKind::kTraffic: return std::abs(kappa());
    case AgentKind::kIntegrator: return 1.0;
    case AgentKind::kStaticAffine: return tau();
  }
  return 1.0;
}

AgentBank::AgentBank(std::vector<AgentModel> agents) : agents_(std::move(agents)) {
  rho_.resize(size());
  for (int i = 0; i < size(); ++i) rho_(i) = agents_[i].passivity_index();
}

Eigen::VectorXd AgentBank::inverse_steady_state(const Eigen::VectorXd& y) const {
  Eigen::VectorXd u(size());
  for (int i = 0; i < size(); ++i) u(i) = agents_[i].inverse_steady_state(y(i));
  return u;
}

Eigen::VectorXd AgentBank::inverse_steady_state_slope(const Eigen::VectorXd& y) const {
  Eigen::VectorXd s(size());
  for (int i = 0; i < size(); ++i) s(i) = agents_[i].inverse_steady_state_slope(y(i));
  return s;
}

double AgentBank::integral_fn(const Eigen::VectorXd& y) const {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) total += agents_[i].integral_fn(y(i));
  return total;
}

double AgentBank::ofp_primal_fn(const Eigen::VectorXd& u) const {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) total += agents_[i].ofp_primal_fn(u(i));
  return total;
}

double AgentBank::storage(const Eigen::VectorXd& x, const Eigen::VectorXd& y_ss) const {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) total += agents_[i].storage(x(i), y_ss(i));
  return total;
}

double AgentBank::storage_rate(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& y_ss) const {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) total += agents_[i].storage_rate(x(i), u(i), y_ss(i));
  return total;
}

Eigen::VectorXd AgentBank::nominal_outputs() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v(i) = agents_[i].nominal_output();
  return v;
}

double agent_drift(const AgentModel& a, double x, double u) { return a.drift(x, u); }
double inverse_steady_state(const AgentModel& a, double y) { return a.inverse_steady_state(y); }
double integral_fn(const AgentModel& a, double y) { return a.integral_fn(y); }
double ofp_primal_fn(const AgentModel& a, double u) { return a.ofp_primal_fn(u); }

}  // namespace netpass

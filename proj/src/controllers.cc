#include "netpass/controllers.hpp"

#include <cmath>
#include <limits>

#include "netpass/errors.hpp"

namespace netpass {

namespace {
constexpr double kIndicatorSlack = 1e-9;
}

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kTanhIntegrator: return "tanh_integrator";
    case ControllerKind::kStaticGain: return "static_gain";
  }
  return "unknown";
}

ControllerModel ControllerModel::tanh_integrator() {
  return ControllerModel(ControllerKind::kTanhIntegrator, 0.0);
}

ControllerModel ControllerModel::static_gain(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument, "static_gain needs w > 0");
  }
  return ControllerModel(ControllerKind::kStaticGain, w);
}

double ControllerModel::drift(double /*eta*/, double zeta) const {
  return kind_ == ControllerKind::kTanhIntegrator ? zeta : 0.0;
}

double ControllerModel::output(double eta, double zeta) const {
  return kind_ == ControllerKind::kTanhIntegrator ? std::tanh(eta) : w_ * zeta;
}

double ControllerModel::output_rate(double eta, double zeta) const {
  if (kind_ == ControllerKind::kStaticGain) return 0.0;
  const double th = std::tanh(eta);
  return (1.0 - th * th) * zeta;
}

double ControllerModel::gamma_integral(double zeta) const {
  return kind_ == ControllerKind::kTanhIntegrator ? std::abs(zeta) : 0.5 * w_ * zeta * zeta;
}

double ControllerModel::gamma_conjugate(double mu) const {
  if (kind_ == ControllerKind::kStaticGain) return mu * mu / (2.0 * w_);
  return std::abs(mu) <= 1.0 + kIndicatorSlack ? 0.0 : std::numeric_limits<double>::infinity();
}

double ControllerModel::prox_gamma_reg(double beta, double v, double t) const {
  if (!(t > 0.0)) throw Error(ErrorCode::kInvalidArgument, "prox step must be positive");
  if (kind_ == ControllerKind::kTanhIntegrator) {
    if (beta < 0.0) throw Error(ErrorCode::kNonConvexProx, "|z| + beta z^2 / 2 with beta < 0");
    return soft_threshold(v, t) / (1.0 + t * beta);
  }
  if (w_ + beta < 0.0) throw Error(ErrorCode::kNonConvexProx, "(w + beta) z^2 / 2 with w + beta < 0");
  return v / (1.0 + t * (w_ + beta));
}

double controller_drift(const ControllerModel& c, double eta, double zeta) {
  return c.drift(eta, zeta);
}
double controller_output(const ControllerModel& c, double eta, double zeta) {
  return c.output(eta, zeta);
}
double gamma_integral(const ControllerModel& c, double zeta) { return c.gamma_integral(zeta); }
double prox_gamma_reg(const ControllerModel& c, double beta, double v, double t) {
  return c.prox_gamma_reg(beta, v, t);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace netpass

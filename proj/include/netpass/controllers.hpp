#pragma once

#include <string_view>

namespace netpass {

enum class ControllerKind { kTanhIntegrator, kStaticGain };

std::string_view to_string(ControllerKind kind);

/// MEIP edge controller.
///
/// TanhIntegrator: eta' = zeta, mu = tanh(eta), Gamma(zeta) = |zeta|
/// StaticGain:     stateless,   mu = w zeta,    Gamma(zeta) = w zeta^2 / 2
class ControllerModel {
 public:
  static ControllerModel tanh_integrator();
  /// Requires w > 0.
  static ControllerModel static_gain(double w);

  ControllerKind kind() const { return kind_; }
  double gain() const { return w_; }
  bool has_state() const { return kind_ == ControllerKind::kTanhIntegrator; }

  double drift(double eta, double zeta) const;
  double output(double eta, double zeta) const;
  /// d mu / dt given eta' = drift(eta, zeta), holding zeta fixed.
  double output_rate(double eta, double zeta) const;

  double gamma_integral(double zeta) const;
  /// Gamma*(mu). For the tanh integrator this is the indicator of [-1, 1],
  /// with 1e-9 slack on the boundary.
  double gamma_conjugate(double mu) const;

  /// argmin_z Gamma(z) + beta z^2 / 2 + (z - v)^2 / (2 t).
  /// Throws Error{kNonConvexProx} if the regularized Gamma is not convex, Error{kInvalidArgument} if t <= 0.
  double prox_gamma_reg(double beta, double v, double t) const;

 private:
  ControllerModel(ControllerKind kind, double w) : kind_(kind), w_(w) {}

  ControllerKind kind_;
  double w_;
};

double controller_drift(const ControllerModel& c, double eta, double zeta);
double controller_output(const ControllerModel& c, double eta, double zeta);
double gamma_integral(const ControllerModel& c, double zeta);
double prox_gamma_reg(const ControllerModel& c, double beta, double v, double t);

double soft_threshold(double v, double t);

}  // namespace netpass

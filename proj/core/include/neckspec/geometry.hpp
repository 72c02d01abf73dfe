#pragma once

namespace neckspec {

// Warped metric data on the neck (0,1] x M:
//
//   g = rho^{2a} dt^2 + rho^{2b} g_M,   rho = c1*eps + c2*t,
//
// with a <= -1 and b > 0. The arclength coordinate tau = integral rho^a dt
// turns this into dtau^2 + f(tau) g_M on [0, R].
struct MetricParams {
  double a = -1.0;
  double b = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double eps = 1.0;
  int n = 1;  // cross-section dimension

  // Throws std::invalid_argument on out-of-range or numerically
  // unrepresentable parameters. Call once after construction.
  void validate() const;
};

double rho(const MetricParams& mp, double t);

// Arclength tau(t) = integral_0^t rho(s)^a ds (closed form), its inverse,
// and the neck length R = tau(1). All require eps > 0.
double tau_of_t(const MetricParams& mp, double t);
double t_of_tau(const MetricParams& mp, double tau);
double neck_length(const MetricParams& mp);

// Warp factor f(tau) = rho(t(tau))^{2b}, strictly increasing on [0, R].
double warp_factor(const MetricParams& mp, double tau);
double warp_log(const MetricParams& mp, double tau);

}  // namespace neckspec

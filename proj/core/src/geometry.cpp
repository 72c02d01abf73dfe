#include "neckspec/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace neckspec {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// (c1*eps)^{a+1}, the additive constant in the a < -1 closed forms.
double base_pow(const MetricParams& mp) {
  return std::exp((mp.a + 1.0) * std::log(mp.c1 * mp.eps));
}

double tau_slack(double R) { return 1e-9 * std::fmax(1.0, R); }

// Domain check with roundoff slack, then clamp to [0, R] exactly so the
// closed forms never see a base that roundoff pushed past the endpoint.
double clamp_tau(const MetricParams& mp, double tau, const char* msg) {
  require(mp.eps > 0.0, msg);
  double R = neck_length(mp);
  double slack = tau_slack(R);
  require(tau >= -slack && tau <= R + slack, msg);
  return std::fmin(R, std::fmax(0.0, tau));
}

}  // namespace

void MetricParams::validate() const {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c1) &&
        std::isfinite(c2) && std::isfinite(eps)))
    fail("MetricParams: non-finite field");
  if (!(a <= -1.0)) fail("MetricParams: requires a <= -1");
  if (!(b > 0.0)) fail("MetricParams: requires b > 0");
  if (!(c1 > 0.0)) fail("MetricParams: requires c1 > 0");
  if (!(c2 > 0.0)) fail("MetricParams: requires c2 > 0");
  if (!(eps >= 0.0)) fail("MetricParams: requires eps >= 0");
  if (n < 1) fail("MetricParams: requires n >= 1");
  if (eps > 0.0) {
    // keep (c1*eps)^{a+1} and (c1*eps)^{2b} inside double range
    double lg = std::log(c1 * eps);
    if (std::fabs((a + 1.0) * lg) > 690.0 || std::fabs(2.0 * b * lg) > 690.0)
      fail("MetricParams: parameters exceed double range");
  }
}

double rho(const MetricParams& mp, double t) {
  require(t >= 0.0 && t <= 1.0, "rho: t outside [0,1]");
  require(mp.eps > 0.0 || t > 0.0, "rho: eps = 0 requires t > 0");
  return mp.c1 * mp.eps + mp.c2 * t;
}

double tau_of_t(const MetricParams& mp, double t) {
  require(t >= 0.0 && t <= 1.0, "tau_of_t: t outside [0,1]");
  require(mp.eps > 0.0, "tau_of_t: infinite length at eps = 0");
  double u = mp.c2 * t / (mp.c1 * mp.eps);
  if (mp.a == -1.0) return std::log1p(u) / mp.c2;
  double ap1 = mp.a + 1.0;
  return base_pow(mp) * std::expm1(ap1 * std::log1p(u)) / (mp.c2 * ap1);
}

double neck_length(const MetricParams& mp) { return tau_of_t(mp, 1.0); }

double t_of_tau(const MetricParams& mp, double tau) {
  tau = clamp_tau(mp, tau, "t_of_tau: tau outside [0,R]");
  double t;
  if (mp.a == -1.0) {
    t = mp.c1 * mp.eps / mp.c2 * std::expm1(mp.c2 * tau);
  } else {
    double ap1 = mp.a + 1.0;
    double w = std::log1p(mp.c2 * ap1 * tau / base_pow(mp)) / ap1;
    t = mp.c1 * mp.eps / mp.c2 * std::expm1(w);
  }
  return std::fmin(1.0, std::fmax(0.0, t));
}

double warp_log(const MetricParams& mp, double tau) {
  tau = clamp_tau(mp, tau, "warp_log: tau outside [0,R]");
  if (mp.a == -1.0)
    return 2.0 * mp.b * (std::log(mp.c1 * mp.eps) + mp.c2 * tau);
  double ap1 = mp.a + 1.0;
  double base = base_pow(mp) + mp.c2 * ap1 * tau;
  require(base > 0.0, "warp_log: nonpositive base, inconsistent inputs");
  return 2.0 * mp.b / ap1 * std::log(base);
}

double warp_factor(const MetricParams& mp, double tau) {
  return std::exp(warp_log(mp, tau));
}

}  // namespace neckspec

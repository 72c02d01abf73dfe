#include "neckspec/reduction.hpp"

#include <cmath>
#include <stdexcept>

namespace neckspec {
namespace {

void check_degree(const MetricParams& mp, int p) {
  if (p < 0 || p > mp.n) throw std::domain_error("degree p outside [0,n]");
}

}  // namespace

double weight_exponent(const MetricParams& mp, int p) {
  check_degree(mp, p);
  return 0.5 * (mp.n - 2.0 * p);
}

double essential_bottom(const MetricParams& mp, int p) {
  check_degree(mp, p);
  if (mp.a < -1.0) return 0.0;
  double w = 0.5 * (mp.n - 2.0 * p);
  double s = w * mp.c2 * mp.b;
  return s * s;
}

EssentialInterval essential_interval(const MetricParams& mp, int p) {
  return EssentialInterval{essential_bottom(mp, p), true};
}

double reduced_potential(const MetricParams& mp, int p, double tau) {
  check_degree(mp, p);
  if (mp.a == -1.0) {
    warp_log(mp, tau);  // domain check only; the potential is constant
    return essential_bottom(mp, p);
  }
  // g = f^{q} with q = (n-2p)/4 and f(tau) = (B + A tau)^{2b/(a+1)} gives
  // g''/g = coef / (B + A tau)^2.
  double ap1 = mp.a + 1.0;
  double A = mp.c2 * ap1;
  double B = std::exp(ap1 * std::log(mp.c1 * mp.eps));
  double R = neck_length(mp);
  double slack = 1e-9 * std::fmax(1.0, R);
  if (!(tau >= -slack && tau <= R + slack))
    throw std::domain_error("reduced_potential: tau outside [0,R]");
  tau = std::fmin(R, std::fmax(0.0, tau));
  double bq = mp.b * (mp.n - 2.0 * p);
  double coef = 0.25 * mp.c2 * mp.c2 * bq * (bq - 2.0 * ap1);
  double base = B + A * tau;
  return coef / (base * base);
}

double transverse_effective_potential(const MetricParams& mp, int p, double mu,
                                      double tau) {
  if (!(mu >= 0.0))
    throw std::domain_error("transverse_effective_potential: mu < 0");
  return reduced_potential(mp, p, tau) + mu * std::exp(-warp_log(mp, tau));
}

Potential reduced_potential_model(const MetricParams& mp, int p) {
  check_degree(mp, p);
  if (mp.a == -1.0) return ConstantPotential{essential_bottom(mp, p)};
  double ap1 = mp.a + 1.0;
  double B = std::exp(ap1 * std::log(mp.c1 * mp.eps));
  double bq = mp.b * (mp.n - 2.0 * p);
  double coef = 0.25 * mp.c2 * mp.c2 * bq * (bq - 2.0 * ap1);
  return InverseSquarePotential{coef, mp.c2 * ap1, B};
}

ReducedProblem make_reduced_problem(const MetricParams& mp, int p) {
  check_degree(mp, p);
  ReducedProblem rp;
  rp.params = mp;
  rp.p = p;
  rp.weight = weight_exponent(mp, p);
  rp.sigma = essential_bottom(mp, p);
  rp.potential = [mp, p](double tau) { return reduced_potential(mp, p, tau); };
  return rp;
}

}  // namespace neckspec

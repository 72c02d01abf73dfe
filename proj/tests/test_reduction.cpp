#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "neckspec/reduction.hpp"

using neckspec::MetricParams;

namespace {

MetricParams params(double a, double b, double c1, double c2, double eps,
                    int n) {
  MetricParams mp;
  mp.a = a;
  mp.b = b;
  mp.c1 = c1;
  mp.c2 = c2;
  mp.eps = eps;
  mp.n = n;
  mp.validate();
  return mp;
}

}  // namespace

TEST_CASE("weight exponent is (n - 2p)/2 and flips sign under p -> n-p") {
  const MetricParams mp = params(-1, 1, 1, 1, 1, 3);
  CHECK(neckspec::weight_exponent(mp, 0) == doctest::Approx(1.5));
  CHECK(neckspec::weight_exponent(mp, 1) == doctest::Approx(0.5));
  for (int p = 0; p <= mp.n; ++p) {
    CHECK(neckspec::weight_exponent(mp, p) ==
          doctest::Approx(-neckspec::weight_exponent(mp, mp.n - p)));
  }
  CHECK_THROWS_AS(neckspec::weight_exponent(mp, -1), std::domain_error);
  CHECK_THROWS_AS(neckspec::weight_exponent(mp, 4), std::domain_error);
}

TEST_CASE("essential bottom for the borderline decay rate") {
  CHECK(neckspec::essential_bottom(params(-1, 1, 1, 1, 1, 3), 1) ==
        doctest::Approx(0.25));
  CHECK(neckspec::essential_bottom(params(-1, 2, 1, 3, 1, 3), 1) ==
        doctest::Approx(9.0));
  // middle degree: the weight vanishes and so does the gap
  CHECK(neckspec::essential_bottom(params(-1, 2, 1, 3, 1, 2), 1) == 0.0);
}

TEST_CASE("essential bottom is zero for faster-than-borderline decay") {
  for (double a : {-1.5, -2.0, -3.0}) {
    CHECK(neckspec::essential_bottom(params(a, 2, 1, 3, 1e-2, 3), 0) == 0.0);
  }
}

TEST_CASE("essential interval is a half line from the bottom") {
  const auto iv = neckspec::essential_interval(params(-1, 1, 1, 1, 1, 1), 0);
  CHECK(iv.bottom == doctest::Approx(0.25));
  CHECK(iv.unbounded_above);
}

TEST_CASE("reduced potential is constant in the borderline case") {
  const MetricParams mp = params(-1, 1.3, 0.7, 1.9, 1e-2, 3);
  const double sigma = neckspec::essential_bottom(mp, 1);
  const double R = neckspec::neck_length(mp);
  for (double frac : {0.0, 0.3, 1.0}) {
    CHECK(neckspec::reduced_potential(mp, 1, frac * R) ==
          doctest::Approx(sigma).epsilon(1e-14));
  }
}

TEST_CASE("reduced potential frozen values for a = -2") {
  const MetricParams mp = params(-2, 1, 1, 1, 1, 1);
  CHECK(neckspec::reduced_potential(mp, 0, 0.0) == doctest::Approx(0.75));
  CHECK(neckspec::reduced_potential(mp, 0, 0.5) == doctest::Approx(3.0));
}

TEST_CASE("transverse shift adds mu over the warp factor") {
  const MetricParams mp = params(-1, 1, 1, 1, 1, 1);
  CHECK(neckspec::transverse_effective_potential(mp, 0, 1.0, 0.0) ==
        doctest::Approx(1.25));
  CHECK(neckspec::transverse_effective_potential(mp, 0, 1.0, std::log(2.0)) ==
        doctest::Approx(0.5));
  CHECK(neckspec::transverse_effective_potential(mp, 0, 0.0, 0.3) ==
        doctest::Approx(neckspec::reduced_potential(mp, 0, 0.3)));
  CHECK_THROWS_AS(neckspec::transverse_effective_potential(mp, 0, -1.0, 0.0),
                  std::domain_error);
}

TEST_CASE("potential model kind matches the decay regime") {
  const MetricParams flat = params(-1, 1, 1, 1, 1e-3, 3);
  const auto cm = neckspec::reduced_potential_model(flat, 1);
  REQUIRE(std::holds_alternative<neckspec::ConstantPotential>(cm));
  CHECK(std::get<neckspec::ConstantPotential>(cm).value ==
        doctest::Approx(neckspec::essential_bottom(flat, 1)));

  const MetricParams steep = params(-2.5, 1.2, 0.7, 1.9, 1e-2, 3);
  const auto im = neckspec::reduced_potential_model(steep, 1);
  REQUIRE(std::holds_alternative<neckspec::InverseSquarePotential>(im));
  const auto& isq = std::get<neckspec::InverseSquarePotential>(im);
  const double R = neckspec::neck_length(steep);
  for (double frac : {0.0, 1.0 / 3.0, 1.0}) {
    const double tau = frac * R;
    const double base = isq.offset + isq.slope * tau;
    CHECK(isq.coef / (base * base) ==
          doctest::Approx(neckspec::reduced_potential(steep, 1, tau))
              .epsilon(1e-12));
  }
}

TEST_CASE("make_reduced_problem bundles consistent fields") {
  const MetricParams mp = params(-2, 0.8, 1.1, 1.4, 1e-3, 4);
  const auto rp = neckspec::make_reduced_problem(mp, 1);
  CHECK(rp.p == 1);
  CHECK(rp.weight == doctest::Approx(neckspec::weight_exponent(mp, 1)));
  CHECK(rp.sigma == doctest::Approx(neckspec::essential_bottom(mp, 1)));
  const double R = neckspec::neck_length(mp);
  for (double frac : {0.0, 0.5, 1.0}) {
    CHECK(rp.potential(frac * R) ==
          doctest::Approx(neckspec::reduced_potential(mp, 1, frac * R)));
  }
  CHECK_THROWS_AS(neckspec::make_reduced_problem(mp, 5), std::domain_error);
}

TEST_CASE("integrated potential matches the closed form across eps decades") {
  // For a = -2, b = c1 = c2 = 1, n = 1, p = 0 the integral of the reduced
  // potential over [0, R] equals coef * (1/D - 1/B) with D = B - R, which
  // collapses to 0.75 independently of eps.
  for (double eps : {1e-1, 1e-3, 1e-5}) {
    const MetricParams mp = params(-2, 1, 1, 1, eps, 1);
    const double R = neckspec::neck_length(mp);
    const double B = 1.0 / eps;
    const double D = B - R;
    const int kSegments = 4096;
    const double ulo = std::log(D);
    const double uhi = std::log(B);
    double sum = 0.0;
    double prev_tau = R;
    double prev_val = neckspec::reduced_potential(mp, 0, R);
    for (int k = 1; k <= kSegments; ++k) {
      const double u = ulo + (uhi - ulo) * k / kSegments;
      const double tau = std::fmin(R, std::fmax(0.0, B - std::exp(u)));
      const double val = neckspec::reduced_potential(mp, 0, tau);
      sum += 0.5 * (val + prev_val) * (prev_tau - tau);
      prev_tau = tau;
      prev_val = val;
    }
    CHECK(sum == doctest::Approx(0.75).epsilon(1e-4));
  }
}

#pragma once

#include <functional>

#include "neckspec/geometry.hpp"
#include "neckspec/potential.hpp"

namespace neckspec {

// Spectrum of the one-dimensional comparison operator above the bottom:
// [bottom, infinity).
struct EssentialInterval {
  double bottom = 0.0;
  bool unbounded_above = true;
};

// Exponent of the unitary weight that flattens the measure in degree p.
double weight_exponent(const MetricParams& mp, int p);

// Bottom of the essential spectrum in degree p as eps -> 0.
double essential_bottom(const MetricParams& mp, int p);

EssentialInterval essential_interval(const MetricParams& mp, int p);

// Potential of the reduced half-line problem at arclength tau.
double reduced_potential(const MetricParams& mp, int p, double tau);

// Reduced potential shifted by a transverse eigenvalue mu >= 0.
double transverse_effective_potential(const MetricParams& mp, int p, double mu,
                                      double tau);

// Closed-form description of the reduced potential, for solvers that
// exploit its shape.
Potential reduced_potential_model(const MetricParams& mp, int p);

struct ReducedProblem {
  MetricParams params;
  int p = 0;
  double weight = 0.0;
  double sigma = 0.0;
  std::function<double(double)> potential;
};

ReducedProblem make_reduced_problem(const MetricParams& mp, int p);

}  // namespace neckspec

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "neckspec/potential.hpp"

// Counting of Sturm-Liouville eigenvalues for -u'' + V(tau) u on [0, L].
// The primary counter discretizes on a uniform grid, counts matrix
// eigenvalues by Sturm bisection of the tridiagonal pivots, and removes the
// grid dispersion error mode by mode, which makes it exact for constant
// potentials and grid-robust otherwise. A Pruefer phase integrator provides
// an independent cross-check.

namespace neckspec {

enum class BoundaryCondition { dirichlet, neumann };

struct SLProblem {
  double length = 1.0;
  Potential potential = ConstantPotential{0.0};
};

struct SolverOptions {
  BoundaryCondition bc_left = BoundaryCondition::neumann;
  BoundaryCondition bc_right = BoundaryCondition::dirichlet;
  std::int64_t grid_size = 0;  // intervals; 0 picks a resolution from L, lambda
  double tolerance = 1e-8;     // ODE tolerance for the phase method
  bool transverse = false;     // counting layer: also audit transverse modes
};

struct CountResult {
  std::int64_t count = 0;
  double lambda_threshold = 0.0;
  std::string method;          // "sturm" or "prufer"
  std::int64_t grid_size = 0;  // final grid (accepted steps for "prufer")
  bool converged = false;
  bool tie = false;      // an eigenvalue sits within the threshold guard band
  bool clamped = false;  // the potential hit the +-1e12 evaluation clamp
};

// max(1024, ceil(64 L (1 + sqrt(max(0, lambda))))), capped at 9e14.
std::int64_t default_grid_size(double length, double lambda);

// Number of eigenvalues strictly below lambda. Runs the grid ladder
// m, 2m, 4m until two consecutive counts agree (converged reports whether
// they did). The guard band is 1e-9 relative: tie flags an eigenvalue
// within it.
CountResult count_below(const SLProblem& pb, double lambda,
                        const SolverOptions& opts = {});

// Same count through the Pruefer phase theta' = cos^2 + (lambda - V) sin^2.
CountResult count_below_prufer(const SLProblem& pb, double lambda,
                               const SolverOptions& opts = {});

// Eigenvalues in [lo, hi), located by bisection on the corrected count to
// absolute tolerance 1e-10 max(1, |hi|).
std::vector<double> eigenvalues_in(const SLProblem& pb, double lo, double hi,
                                   const SolverOptions& opts = {});

namespace detail {

// Dispersion-corrected count on a fixed grid of m intervals: the largest j
// such that at least j grid eigenvalues lie below lambda shifted by the
// free-grid dispersion error of mode j. One ladder rung of count_below;
// exposed for tests and for eigenvalue location at a pinned grid.
std::int64_t corrected_count(const SLProblem& pb, double lambda,
                             std::int64_t m, const SolverOptions& opts,
                             bool* clamped = nullptr);

}  // namespace detail

}  // namespace neckspec

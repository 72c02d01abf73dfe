#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "neckspec/geometry.hpp"
#include "neckspec/sl_solver.hpp"

// Eigenvalue counting over the degenerating neck: combines the reduced
// one-dimensional problem with cross-section data (Betti numbers and the
// transverse spectrum) and compares window counts against the linear
// prediction d x R / pi.

namespace neckspec {

struct TransverseMode {
  double value = 0.0;            // positive transverse eigenvalue
  std::int64_t multiplicity = 1;
};

// Closed cross-section description in every form degree 0..n: Betti numbers,
// the smallest positive transverse eigenvalue nu, and an ascending table of
// positive transverse eigenvalues with multiplicities.
struct CrossSectionModel {
  std::string name;
  int n = 1;
  std::vector<std::int64_t> betti;               // size n+1, Poincare-dual
  std::vector<double> nu;                        // size n+1
  std::vector<std::vector<TransverseMode>> modes;  // size n+1

  void validate() const;
};

std::int64_t betti_of(const CrossSectionModel& model, int p);
double nu_of(const CrossSectionModel& model, int p);
const std::vector<TransverseMode>& modes_of(const CrossSectionModel& model,
                                            int p);

// nu / f_eps(tau): the smallest positive transverse eigenvalue transported
// to neck position tau.
double transverse_eigenvalue(const CrossSectionModel& model,
                             const MetricParams& mp, int p, double tau);

// Built-in cross-sections, all normalized to side (circumference) 2 pi.
// Mode tables carry the p-form multiplicities and are complete up to their
// largest tabulated value.
CrossSectionModel circle();
CrossSectionModel torus2();
CrossSectionModel torus3();
CrossSectionModel sphere2();
std::optional<CrossSectionModel> builtin_model(const std::string& name);
std::vector<CrossSectionModel> builtin_cross_sections();

// Linear law for the window count in degree p: d x R / pi.
double prediction(std::int64_t d, double x, double R);

// Smallest r0 >= 1 such that nu / f_eps(R - r0 + 1) > sigma + x^2, i.e. the
// shortest cut making every transverse mode clear the counting window on the
// kept initial segment [0, R - r0 + 1]. nullopt when no r0 <= R works.
std::optional<double> choose_r0(const CrossSectionModel& model,
                                const MetricParams& mp, int p, double x);

// Eigenvalues with nonzero transverse mode landing in [lo, hi) on the kept
// segment [0, R - r0 + 1]. Modes whose effective potential stays above hi
// are counted as zero without discretization; with r0 from choose_r0 that
// covers every mode. Throws when the mode table cannot certify the window.
std::int64_t transverse_contribution(const CrossSectionModel& model,
                                     const MetricParams& mp, int p, double lo,
                                     double hi, double r0,
                                     const SolverOptions& opts = {});

struct CountingReport {
  double eps = 0.0;
  int p = 0;
  double x = 0.0;
  double R = 0.0;
  double sigma = 0.0;
  std::int64_t count = 0;
  double prediction = 0.0;
  double remainder = 0.0;  // count - prediction
  double r0 = std::numeric_limits<double>::quiet_NaN();
  double truncated_length = std::numeric_limits<double>::quiet_NaN();
  std::string flags;  // ';'-joined: unconverged, tie, clamped,
                      // infeasible-r0, transverse-nonzero, row-error
};

// Window count in degree p over [sigma, sigma + x^2), its prediction, and
// the truncation audit. With opts.transverse the transverse contribution is
// computed (when r0 is feasible) and folded into the count.
CountingReport counting_function(const CrossSectionModel& model,
                                 const MetricParams& mp, int p, double x,
                                 const SolverOptions& opts = {});

}  // namespace neckspec

#pragma once

#include <cstdint>

// Low-level pieces of the Sturm-sequence eigenvalue counter. The pivot
// recurrence for a symmetric tridiagonal matrix with constant diagonal d and
// constant off-diagonal coupling s over a run of n nodes has a closed form
// (trigonometric, hyperbolic, or linear depending on the sign of
// (2s)^2 - (d-lambda)^2), which lets a run of identical rows be processed in
// O(1) instead of O(n). Used internally by the solver; exposed for tests.

namespace neckspec::detail {

struct SturmRunResult {
  long long negatives = 0;  // negative pivots produced by the run
  long double x_out = 0.0;  // last pivot, unclamped
};

// Keeps pivots away from 0/inf/NaN so the recurrence never divides by zero.
// Zero maps to +1e-300 (a zero pivot is a threshold tie; callers resolve
// ties with guard bands, not here).
long double clamp_pivot(long double x);

// One pivot step: (d - lambda) - e2 / x_prev, clamped.
long double sturm_step(double d, long double lambda, long double e2,
                       long double x_prev);

// n consecutive pivot steps with identical diagonal d and coupling e2 = s*s,
// starting from pivot x0 (x0 = +-inf means "no previous pivot": the first
// step yields d - lambda exactly). Counts negative pivots and returns the
// final pivot. Exact up to one ulp-level phase rounding per run.
SturmRunResult sturm_run(double d, long double lambda, double s,
                         long double x0, long long n);

}  // namespace neckspec::detail

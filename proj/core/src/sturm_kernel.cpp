#include "neckspec/detail/sturm_kernel.hpp"

#include <cmath>

namespace neckspec::detail {
namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// Sign convention: a zero is treated as positive. Exact zeros are threshold
// ties and are resolved by guard bands upstream, so the choice here only has
// to be consistent.
int sgnp(long double v) { return v >= 0.0L ? 1 : -1; }

// |d - lambda| >= 2s. Writing the pivot as x_k = s u_{k+1}/u_k turns the
// recurrence into u_{k+1} = (delta/s) u_k - u_{k-1} with real characteristic
// roots rho, 1/rho. The sequence u is a monotone mixture of exponentials and
// changes sign at most once, so the run contributes at most one negative.
SturmRunResult run_nonosc(long double delta, long double t1, long double t2,
                          double s, long double x0, long long n) {
  const long double sl = s;
  if (t1 == 0.0L) {
    // rho = 1 double root, u_k = A + B k
    if (std::isinf(x0))
      return {0, sl * (long double)(n + 1) / (long double)n};
    const long double w = x0 / sl;
    const long double u1 = w;
    const long double un = 1.0L + (w - 1.0L) * (long double)n;
    const long double un1 = 1.0L + (w - 1.0L) * (long double)(n + 1);
    return {sgnp(u1) != sgnp(un1) ? 1LL : 0LL, sl * un1 / un};
  }
  const long double root = sqrtl((-t1) * t2);  // = sqrt(delta^2 - 4 s^2)
  const long double invrho = 2.0L * sl / (delta + root);
  const long double lnrho = log1pl((-t1 + root) / (2.0L * sl));
  long double va, vb;
  int sgn_u1;
  if (std::isinf(x0)) {
    // no previous pivot: u_0 = 0, first step must produce delta exactly
    va = (x0 > 0.0L ? sl : -sl) / root;
    vb = -va;
    sgn_u1 = x0 > 0.0L ? 1 : -1;
  } else {
    // normalize u_0 = 1; rho - 1/rho = root/s exactly
    va = (x0 - sl * invrho) / root;
    vb = 1.0L - va;
    sgn_u1 = sgnp(x0);
  }
  if (va == 0.0L) return {0, sl * invrho};  // on the contracting branch
  int sgn_un1;
  if (vb == 0.0L || sgnp(va) == sgnp(vb)) {
    sgn_un1 = sgnp(va);
  } else {
    // sign of va rho^{n+1} + vb rho^{-(n+1)} via logs; the ratio vb/va can
    // overflow, its log cannot
    const long double lhs = 2.0L * (long double)(n + 1) * lnrho;
    const long double rhs = logl(fabsl(vb)) - logl(fabsl(va));
    sgn_un1 = lhs >= rhs ? sgnp(va) : sgnp(vb);
  }
  const long double decay = expl(-2.0L * (long double)n * lnrho);
  const long double x_out = 0.5L * (delta + root) *
                            (va + vb * decay * invrho * invrho) /
                            (va + vb * decay);
  return {sgn_u1 != sgn_un1 ? 1LL : 0LL, x_out};
}

// |d - lambda| < 2s. Pivots rotate: x_k = s sin(beta + k phi) /
// sin(beta + (k-1) phi) with 2 s cos(phi) = delta, and a pivot is negative
// exactly when the angle passes a multiple of pi. The whole run reduces to
// two floor() evaluations.
SturmRunResult run_elliptic(long double delta, long double t1, long double t2,
                            double s, long double x0, long long n) {
  const long double sl = s;
  const long double root = sqrtl(t1 * t2);  // = sqrt(4 s^2 - delta^2)
  const long double phi = atan2l(root, delta);
  long double beta;
  if (std::isinf(x0)) {
    beta = phi;
  } else {
    beta = atan2l(x0 * root, x0 * delta - 2.0L * sl * sl);
    if (beta <= 0.0L) beta += kPiL;
  }
  const long double total = beta + (long double)n * phi;
  const long long neg =
      (long long)(floorl(total / kPiL) - floorl(beta / kPiL));
  const long double theta = fmodl(total, kPiL);
  return {neg, sl * sinl(theta) / sinl(theta - phi)};
}

}  // namespace

long double clamp_pivot(long double x) {
  if (std::isnan(x)) return 1e-300L;
  if (x > 1e150L) return 1e150L;
  if (x < -1e150L) return -1e150L;
  if (x == 0.0L) return 1e-300L;
  if (x > 0.0L && x < 1e-300L) return 1e-300L;
  if (x < 0.0L && x > -1e-300L) return -1e-300L;
  return x;
}

long double sturm_step(double d, long double lambda, long double e2,
                       long double x_prev) {
  return clamp_pivot(((long double)d - lambda) - e2 / x_prev);
}

SturmRunResult sturm_run(double d, long double lambda, double s,
                         long double x0, long long n) {
  if (n <= 0) return {0, x0};
  const long double delta = (long double)d - lambda;
  // Split so that a lambda many orders below 2s still enters exactly.
  const long double t1 = ((long double)(2.0 * s) - (long double)d) + lambda;
  const long double t2 = ((long double)(2.0 * s) + (long double)d) - lambda;
  if (t1 > 0.0L && t2 > 0.0L) return run_elliptic(delta, t1, t2, s, x0, n);
  if (t2 <= 0.0L) {
    // delta <= -2s: negating every u_k maps it onto the delta >= 2s case
    SturmRunResult r = run_nonosc(-delta, t2, t1, s, -x0, n);
    return {n - r.negatives, -r.x_out};
  }
  return run_nonosc(delta, t1, t2, s, x0, n);
}

}  // namespace neckspec::detail

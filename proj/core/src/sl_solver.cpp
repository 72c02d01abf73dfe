#include "neckspec/sl_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>

#include <boost/numeric/odeint.hpp>

#include "neckspec/detail/sturm_kernel.hpp"

namespace neckspec {
namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr double kPi = 3.141592653589793238462643383279502884;

// Grids are capped so 4x the largest requested grid still has every node
// index exactly representable as a double.
constexpr std::int64_t kMaxLadderGrid = 3'700'000'000'000'000;
constexpr std::int64_t kMaxUserGrid = 900'000'000'000'000;

double clamp_value(double v, bool& clamped) {
  if (std::isnan(v)) throw std::domain_error("potential evaluated to NaN");
  if (v > kPotentialClamp) {
    clamped = true;
    return kPotentialClamp;
  }
  if (v < -kPotentialClamp) {
    clamped = true;
    return -kPotentialClamp;
  }
  return v;
}

void validate_problem(const SLProblem& pb) {
  if (!(pb.length > 0.0) || !std::isfinite(pb.length))
    throw std::invalid_argument("interval length must be finite and positive");
  if (const auto* tb = std::get_if<TablePotential>(&pb.potential)) {
    if (tb->values.size() < 2)
      throw std::invalid_argument("table potential needs at least 2 samples");
    for (double v : tb->values)
      if (std::isnan(v))
        throw std::domain_error("table potential contains NaN");
  } else if (const auto* cb = std::get_if<CallablePotential>(&pb.potential)) {
    if (!cb->fn)
      throw std::invalid_argument("callable potential holds no function");
  }
}

void validate_options(const SolverOptions& opts) {
  if (!(opts.tolerance > 0.0) || !std::isfinite(opts.tolerance))
    throw std::invalid_argument("tolerance must be finite and positive");
  if (opts.grid_size != 0 &&
      (opts.grid_size < 16 || opts.grid_size > kMaxUserGrid))
    throw std::invalid_argument("grid_size must be 0 or in [16, 9e14]");
}

struct GridGeom {
  double length = 0.0;
  std::int64_t m = 0;
  double h = 0.0;
  double s = 0.0;  // 1/h^2
  std::int64_t i_lo = 0;
  std::int64_t i_hi = 0;
  bool left_neumann = false;
  bool right_neumann = false;
};

GridGeom make_geom(double length, std::int64_t m, const SolverOptions& opts) {
  GridGeom g;
  g.length = length;
  g.m = m;
  g.h = length / static_cast<double>(m);
  g.s = 1.0 / (g.h * g.h);
  if (!std::isfinite(g.s) || !(g.s > 0.0))
    throw std::domain_error("grid spacing out of double range");
  g.left_neumann = opts.bc_left == BoundaryCondition::neumann;
  g.right_neumann = opts.bc_right == BoundaryCondition::neumann;
  g.i_lo = g.left_neumann ? 0 : 1;
  g.i_hi = g.right_neumann ? m : m - 1;
  return g;
}

// Neumann ends are folded in by a ghost node: the half-weight end row is
// symmetrized by a diagonal similarity, which doubles the squared coupling
// on the edge next to the end and leaves the diagonal alone.
template <class DAt, class RunEnd>
long long raw_pass(const GridGeom& g, long double lambda, DAt&& d_at,
                   RunEnd&& run_end) {
  const double s = g.s;
  const long double e2 = static_cast<long double>(s) * s;
  const long double e2n = 2.0L * e2;
  long long neg = 0;
  std::int64_t pos = g.i_lo;
  long double x =
      detail::clamp_pivot(static_cast<long double>(d_at(pos)) - lambda);
  if (x < 0.0L) ++neg;
  ++pos;
  if (g.left_neumann && pos <= g.i_hi) {
    x = detail::sturm_step(d_at(pos), lambda, e2n, x);
    if (x < 0.0L) ++neg;
    ++pos;
  }
  const std::int64_t reg_hi = g.right_neumann ? g.i_hi - 1 : g.i_hi;
  while (pos <= reg_hi) {
    const double v = d_at(pos);
    const std::int64_t j = run_end(pos, reg_hi, v);
    const std::int64_t n_run = j - pos + 1;
    if (n_run >= 32) {
      const detail::SturmRunResult r = detail::sturm_run(v, lambda, s, x, n_run);
      neg += r.negatives;
      x = detail::clamp_pivot(r.x_out);
    } else {
      x = detail::sturm_step(v, lambda, e2, x);
      if (x < 0.0L) ++neg;
      for (std::int64_t i = pos + 1; i <= j; ++i) {
        x = detail::sturm_step(d_at(i), lambda, e2, x);
        if (x < 0.0L) ++neg;
      }
    }
    pos = j + 1;
  }
  if (g.right_neumann && pos == g.i_hi) {
    x = detail::sturm_step(d_at(pos), lambda, e2n, x);
    if (x < 0.0L) ++neg;
  }
  return neg;
}

// Free-grid mode numbers: Dirichlet/Dirichlet j, one Neumann end j - 1/2,
// two Neumann ends j - 1.
long double bc_mode_shift(const GridGeom& g) {
  if (g.left_neumann && g.right_neumann) return -1.0L;
  if (g.left_neumann || g.right_neumann) return -0.5L;
  return 0.0L;
}

// Exact-minus-grid eigenvalue of free mode j; increasing in j.
long double dispersion_shift(const GridGeom& g, std::int64_t j,
                             long double cshift) {
  const long double c = static_cast<long double>(j) + cshift;
  const long double w = c * kPiL / static_cast<long double>(g.length);
  const long double half =
      c * kPiL / (2.0L * static_cast<long double>(g.m));
  const long double sn = sinl(half);
  return w * w - 4.0L * static_cast<long double>(g.s) * sn * sn;
}

// Largest j with at least j grid eigenvalues below lambda - shift(j).
// F(j) = min(N, raw(lambda - shift(j))) is nonincreasing and every solution
// satisfies j <= F(j) <= F(1), so [1, F(1) + 1) brackets the answer; iterate
// j <- F(j) with a bisection fallback. Typically 2-3 raw passes.
template <class DAt, class RunEnd>
std::int64_t fixed_point_count(const GridGeom& g, long double lambda,
                               DAt&& d_at, RunEnd&& run_end) {
  const std::int64_t nmat = g.i_hi - g.i_lo + 1;
  const long double cshift = bc_mode_shift(g);
  const auto F = [&](std::int64_t j) {
    const long double lam = lambda - dispersion_shift(g, j, cshift);
    const long long raw = raw_pass(g, lam, d_at, run_end);
    return std::min<std::int64_t>(nmat, raw);
  };
  const std::int64_t f1 = F(1);
  if (f1 < 1) return 0;
  std::int64_t lo = 1;
  std::int64_t hi = f1 >= nmat ? nmat + 1 : f1 + 1;
  std::int64_t probe = f1;
  int iter = 0;
  while (hi - lo > 1) {
    std::int64_t j = std::clamp(probe, lo + 1, hi - 1);
    if (iter >= 6) j = lo + (hi - lo) / 2;
    const std::int64_t fj = F(j);
    if (fj >= j) {
      lo = j;
      probe = fj;
    } else {
      hi = j;
      probe = fj;
    }
    ++iter;
  }
  return lo;
}

// Last index in [pos, reg_hi] whose diagonal equals v, assuming the values
// are monotone so equal entries are contiguous. Doubling probe, then
// bisection; cost is logarithmic in the run length.
template <class DAt>
std::int64_t gallop_run_end(std::int64_t pos, std::int64_t reg_hi, double v,
                            DAt&& d_at) {
  if (pos >= reg_hi || d_at(pos + 1) != v) return pos;
  std::int64_t len = 1;
  while (pos + 2 * len <= reg_hi && d_at(pos + 2 * len) == v) len *= 2;
  std::int64_t lo = pos + len;
  std::int64_t hi = std::min(pos + 2 * len, reg_hi);
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (d_at(mid) == v)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

template <class DAt>
std::int64_t scan_run_end(std::int64_t pos, std::int64_t reg_hi, double v,
                          DAt&& d_at) {
  std::int64_t j = pos;
  while (j + 1 <= reg_hi && d_at(j + 1) == v) ++j;
  return j;
}

std::int64_t corrected_count_impl(const SLProblem& pb, double lambda,
                                  std::int64_t m, const SolverOptions& opts,
                                  bool& clamped) {
  const GridGeom g = make_geom(pb.length, m, opts);
  const double s2 = 2.0 * g.s;
  const long double lam = lambda;
  return std::visit(
      [&](const auto& pot) -> std::int64_t {
        using P = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<P, ConstantPotential>) {
          const double d = s2 + clamp_value(pot.value, clamped);
          const auto d_at = [d](std::int64_t) { return d; };
          const auto run_end = [](std::int64_t, std::int64_t reg_hi, double) {
            return reg_hi;
          };
          return fixed_point_count(g, lam, d_at, run_end);
        } else if constexpr (std::is_same_v<P, InverseSquarePotential>) {
          const double coef = pot.coef;
          const double slope = pot.slope;
          const double offset = pot.offset;
          const double h = g.h;
          bool* cl = &clamped;
          const auto d_at = [=](std::int64_t i) {
            const double base = offset + slope * (h * static_cast<double>(i));
            const double v = coef == 0.0 ? 0.0 : coef / (base * base);
            return s2 + clamp_value(v, *cl);
          };
          // The diagonal is monotone only while the pole stays outside the
          // interval; otherwise fall back to a linear scan.
          const double base_end = offset + slope * g.length;
          const bool monotone = offset * base_end > 0.0;
          const auto run_end = [&, monotone](std::int64_t pos,
                                             std::int64_t reg_hi, double v) {
            return monotone ? gallop_run_end(pos, reg_hi, v, d_at)
                            : scan_run_end(pos, reg_hi, v, d_at);
          };
          return fixed_point_count(g, lam, d_at, run_end);
        } else if constexpr (std::is_same_v<P, TablePotential>) {
          const auto& vals = pot.values;
          const std::int64_t nv = static_cast<std::int64_t>(vals.size());
          bool* cl = &clamped;
          const auto d_at = [&vals, nv, s2, cl, mm = g.m](std::int64_t i) {
            double v;
            if (nv == mm + 1) {
              v = vals[static_cast<std::size_t>(i)];
            } else {
              const double f = static_cast<double>(i) *
                               static_cast<double>(nv - 1) /
                               static_cast<double>(mm);
              std::int64_t k = static_cast<std::int64_t>(f);
              k = std::clamp<std::int64_t>(k, 0, nv - 2);
              const double frac = f - static_cast<double>(k);
              const std::size_t ku = static_cast<std::size_t>(k);
              v = vals[ku] + frac * (vals[ku + 1] - vals[ku]);
            }
            return s2 + clamp_value(v, *cl);
          };
          const auto run_end = [&](std::int64_t pos, std::int64_t reg_hi,
                                   double v) {
            return scan_run_end(pos, reg_hi, v, d_at);
          };
          return fixed_point_count(g, lam, d_at, run_end);
        } else {
          const auto& fn = pot.fn;
          bool* cl = &clamped;
          const auto d_at = [&fn, s2, cl, h = g.h](std::int64_t i) {
            return s2 + clamp_value(fn(h * static_cast<double>(i)), *cl);
          };
          // No structure to exploit: every node is its own run.
          const auto run_end = [](std::int64_t pos, std::int64_t, double) {
            return pos;
          };
          return fixed_point_count(g, lam, d_at, run_end);
        }
      },
      pb.potential);
}

// Rigorous lower bound for the potential on the grid, when one is cheap.
// The grid operator is the (PSD) free part plus diag(V), so lambda at or
// below this bound certifies a zero count on every grid.
std::optional<double> potential_floor(const SLProblem& pb, bool& clamped) {
  return std::visit(
      [&](const auto& pot) -> std::optional<double> {
        using P = std::decay_t<decltype(pot)>;
        if constexpr (std::is_same_v<P, ConstantPotential>) {
          return clamp_value(pot.value, clamped);
        } else if constexpr (std::is_same_v<P, InverseSquarePotential>) {
          if (pot.coef == 0.0) return 0.0;
          const double b0 = pot.offset;
          const double b1 = pot.offset + pot.slope * pb.length;
          if (!(b0 * b1 > 0.0)) {
            // pole inside: negative coefficients dive to the clamp, positive
            // ones are still bounded below by the far endpoint
            if (pot.coef < 0.0) return -kPotentialClamp;
          }
          bool dummy = false;
          const double v0 =
              clamp_value(b0 == 0.0 ? std::numeric_limits<double>::infinity() *
                                          (pot.coef > 0 ? 1.0 : -1.0)
                                    : pot.coef / (b0 * b0),
                          dummy);
          const double v1 =
              clamp_value(b1 == 0.0 ? std::numeric_limits<double>::infinity() *
                                          (pot.coef > 0 ? 1.0 : -1.0)
                                    : pot.coef / (b1 * b1),
                          dummy);
          return std::fmin(v0, v1);
        } else if constexpr (std::is_same_v<P, TablePotential>) {
          bool dummy = false;
          double lo = clamp_value(pot.values.front(), dummy);
          for (double v : pot.values) lo = std::fmin(lo, clamp_value(v, dummy));
          return lo;
        } else {
          return std::nullopt;
        }
      },
      pb.potential);
}

double eval_potential(const SLProblem& pb, double t, bool& clamped) {
  return std::visit(
      [&](const auto& pot) -> double {
        using P = std::decay_t<decltype(pot)>;
        if (t < 0.0) t = 0.0;
        if (t > pb.length) t = pb.length;
        if constexpr (std::is_same_v<P, ConstantPotential>) {
          return clamp_value(pot.value, clamped);
        } else if constexpr (std::is_same_v<P, InverseSquarePotential>) {
          const double base = pot.offset + pot.slope * t;
          const double v =
              pot.coef == 0.0 ? 0.0 : pot.coef / (base * base);
          return clamp_value(v, clamped);
        } else if constexpr (std::is_same_v<P, TablePotential>) {
          const auto& vals = pot.values;
          const std::int64_t nv = static_cast<std::int64_t>(vals.size());
          const double f = t / pb.length * static_cast<double>(nv - 1);
          std::int64_t k = static_cast<std::int64_t>(f);
          k = std::clamp<std::int64_t>(k, 0, nv - 2);
          const double frac = f - static_cast<double>(k);
          const std::size_t ku = static_cast<std::size_t>(k);
          return clamp_value(vals[ku] + frac * (vals[ku + 1] - vals[ku]),
                             clamped);
        } else {
          return clamp_value(pot.fn(t), clamped);
        }
      },
      pb.potential);
}

}  // namespace

std::int64_t default_grid_size(double length, double lambda) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("interval length must be finite and positive");
  if (std::isnan(lambda))
    throw std::invalid_argument("lambda must not be NaN");
  const double nodes =
      64.0 * length * (1.0 + std::sqrt(std::fmax(0.0, lambda)));
  const double m = std::fmax(1024.0, std::ceil(nodes));
  if (!(m <= static_cast<double>(kMaxUserGrid)))
    throw std::domain_error("interval needs more than 9e14 grid intervals");
  return static_cast<std::int64_t>(m);
}

CountResult count_below(const SLProblem& pb, double lambda,
                        const SolverOptions& opts) {
  validate_problem(pb);
  validate_options(opts);
  if (!std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite");
  CountResult res;
  res.lambda_threshold = lambda;
  res.method = "sturm";
  const double guard = 1e-9 * std::fmax(1.0, std::fabs(lambda));
  const std::int64_t m0 = opts.grid_size > 0
                              ? opts.grid_size
                              : default_grid_size(pb.length, lambda);
  bool clamped = false;
  const std::optional<double> floor_v = potential_floor(pb, clamped);
  if (floor_v && lambda - guard <= *floor_v) {
    res.count = 0;
    res.converged = true;
    res.grid_size = m0;
    res.tie = lambda + guard > *floor_v &&
              corrected_count_impl(pb, lambda + guard, m0, opts, clamped) != 0;
    res.clamped = clamped;
    return res;
  }
  const std::int64_t c1 = corrected_count_impl(pb, lambda, m0, opts, clamped);
  const std::int64_t c2 =
      corrected_count_impl(pb, lambda, 2 * m0, opts, clamped);
  std::int64_t mf = 2 * m0;
  if (c1 == c2) {
    res.count = c2;
    res.converged = true;
  } else {
    mf = 4 * m0;
    const std::int64_t c3 = corrected_count_impl(pb, lambda, mf, opts, clamped);
    res.count = c3;
    res.converged = c2 == c3;
  }
  res.grid_size = mf;
  res.tie =
      corrected_count_impl(pb, lambda + guard, mf, opts, clamped) != res.count ||
      corrected_count_impl(pb, lambda - guard, mf, opts, clamped) != res.count;
  res.clamped = clamped;
  return res;
}

CountResult count_below_prufer(const SLProblem& pb, double lambda,
                               const SolverOptions& opts) {
  validate_problem(pb);
  validate_options(opts);
  if (!std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite");
  CountResult res;
  res.lambda_threshold = lambda;
  res.method = "prufer";
  bool clamped = false;
  using state_t = std::array<double, 1>;
  const auto rhs = [&](const state_t& y, state_t& dy, double t) {
    const double c = std::cos(y[0]);
    const double sn = std::sin(y[0]);
    const double v = eval_potential(pb, t, clamped);
    dy[0] = c * c + (lambda - v) * sn * sn;
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(opts.tolerance, opts.tolerance,
                                      ode::runge_kutta_cash_karp54<state_t>());
  state_t y{opts.bc_left == BoundaryCondition::neumann ? 0.5 * kPi : 0.0};
  double t = 0.0;
  double dt = pb.length / 64.0;
  std::int64_t steps = 0;
  while (t < pb.length) {
    dt = std::min(dt, pb.length - t);
    if (stepper.try_step(rhs, y, t, dt) == ode::fail) {
      if (dt < pb.length * 1e-15)
        throw std::runtime_error("phase integration step size underflow");
      continue;
    }
    if (++steps > 50'000'000)
      throw std::runtime_error("phase integration exceeded step budget");
  }
  const double theta = y[0];
  const double guard = 1e-9 * std::fmax(1.0, std::fabs(theta));
  double count_f;
  double nearest;
  if (opts.bc_right == BoundaryCondition::dirichlet) {
    // eigenvalue exactly when theta(L) is a multiple of pi
    count_f = std::floor((theta - guard) / kPi);
    nearest = kPi * std::round(theta / kPi);
  } else {
    // eigenvalue exactly when theta(L) is pi/2 plus a multiple of pi
    count_f = std::floor((theta + 0.5 * kPi - guard) / kPi);
    nearest = kPi * std::round((theta - 0.5 * kPi) / kPi) + 0.5 * kPi;
  }
  res.count = std::max<std::int64_t>(0, static_cast<std::int64_t>(count_f));
  res.tie = std::fabs(theta - nearest) <= guard;
  res.converged = true;
  res.grid_size = steps;
  res.clamped = clamped;
  return res;
}

std::vector<double> eigenvalues_in(const SLProblem& pb, double lo, double hi,
                                   const SolverOptions& opts) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
    throw std::invalid_argument("need finite lo <= hi");
  const CountResult a = count_below(pb, lo, opts);
  const CountResult b = count_below(pb, hi, opts);
  const std::int64_t mf = std::max(a.grid_size, b.grid_size);
  const double tol = 1e-10 * std::fmax(1.0, std::fabs(hi));
  bool clamped = false;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(
      0, b.count - a.count)));
  for (std::int64_t j = a.count + 1; j <= b.count; ++j) {
    double x0 = lo;
    double x1 = hi;
    while (x1 - x0 > tol) {
      const double mid = 0.5 * (x0 + x1);
      if (corrected_count_impl(pb, mid, mf, opts, clamped) >= j)
        x1 = mid;
      else
        x0 = mid;
    }
    out.push_back(0.5 * (x0 + x1));
  }
  return out;
}

namespace detail {

std::int64_t corrected_count(const SLProblem& pb, double lambda,
                             std::int64_t m, const SolverOptions& opts,
                             bool* clamped) {
  validate_problem(pb);
  validate_options(opts);
  if (!std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite");
  if (m < 2 || m > kMaxLadderGrid)
    throw std::invalid_argument("grid must have between 2 and 3.7e15 intervals");
  bool cl = false;
  const std::int64_t out = corrected_count_impl(pb, lambda, m, opts, cl);
  if (clamped) *clamped = *clamped || cl;
  return out;
}

}  // namespace detail

}  // namespace neckspec

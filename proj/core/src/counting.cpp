#include "neckspec/counting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "neckspec/reduction.hpp"

namespace neckspec {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_degree(const CrossSectionModel& model, int p) {
  if (p < 0 || p > model.n)
    throw std::domain_error("degree p outside [0, n]");
}

void check_match(const CrossSectionModel& model, const MetricParams& mp) {
  if (model.n != mp.n)
    throw std::invalid_argument(
        "cross-section dimension differs from metric n");
}

void check_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::invalid_argument("x must be positive and finite");
}

std::int64_t binom(int n, int k) {
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Flat torus of dimension dim with side 2 pi: the scalar spectrum is the set
// of integer lattice norms, and the p-form Laplacian is binom(dim, p) copies
// of the scalar one. Coordinates up to coord_max give complete
// multiplicities for every norm <= cutoff.
CrossSectionModel flat_torus(const char* name, int dim, int coord_max,
                             long long cutoff) {
  std::map<long long, std::int64_t> norms;
  const int c = coord_max;
  const int jc = dim >= 2 ? c : 0;
  const int kc = dim >= 3 ? c : 0;
  for (int i = -c; i <= c; ++i)
    for (int j = -jc; j <= jc; ++j)
      for (int k = -kc; k <= kc; ++k) {
        const long long v = static_cast<long long>(i) * i +
                            static_cast<long long>(j) * j +
                            static_cast<long long>(k) * k;
        if (v == 0 || v > cutoff) continue;
        ++norms[v];
      }
  CrossSectionModel m;
  m.name = name;
  m.n = dim;
  for (int p = 0; p <= dim; ++p) {
    const std::int64_t forms = binom(dim, p);
    m.betti.push_back(forms);
    m.nu.push_back(1.0);
    std::vector<TransverseMode> table;
    table.reserve(norms.size());
    for (const auto& [v, mult] : norms)
      table.push_back({static_cast<double>(v), forms * mult});
    m.modes.push_back(std::move(table));
  }
  return m;
}

}  // namespace

void CrossSectionModel::validate() const {
  if (n < 1)
    throw std::invalid_argument("cross-section dimension must be at least 1");
  const std::size_t want = static_cast<std::size_t>(n) + 1;
  if (betti.size() != want || nu.size() != want || modes.size() != want)
    throw std::invalid_argument("per-degree tables must have n + 1 entries");
  for (int p = 0; p <= n; ++p) {
    if (betti[p] < 0)
      throw std::invalid_argument("Betti numbers must be nonnegative");
    if (betti[p] != betti[n - p])
      throw std::invalid_argument("Betti numbers must be Poincare-dual");
    if (!(nu[p] > 0.0) || !std::isfinite(nu[p]))
      throw std::invalid_argument("nu must be positive and finite");
    double prev = 0.0;
    for (const TransverseMode& md : modes[p]) {
      if (!(md.value > prev) || !std::isfinite(md.value))
        throw std::invalid_argument(
            "transverse modes must be positive, finite, strictly ascending");
      if (md.multiplicity < 1)
        throw std::invalid_argument(
            "transverse multiplicities must be at least 1");
      prev = md.value;
    }
  }
}

std::int64_t betti_of(const CrossSectionModel& model, int p) {
  check_degree(model, p);
  return model.betti.at(static_cast<std::size_t>(p));
}

double nu_of(const CrossSectionModel& model, int p) {
  check_degree(model, p);
  return model.nu.at(static_cast<std::size_t>(p));
}

const std::vector<TransverseMode>& modes_of(const CrossSectionModel& model,
                                            int p) {
  check_degree(model, p);
  return model.modes.at(static_cast<std::size_t>(p));
}

double transverse_eigenvalue(const CrossSectionModel& model,
                             const MetricParams& mp, int p, double tau) {
  return nu_of(model, p) / warp_factor(mp, tau);
}

CrossSectionModel circle() { return flat_torus("circle", 1, 8, 64); }
CrossSectionModel torus2() { return flat_torus("torus2", 2, 8, 72); }
CrossSectionModel torus3() { return flat_torus("torus3", 3, 6, 48); }

CrossSectionModel sphere2() {
  CrossSectionModel m;
  m.name = "sphere2";
  m.n = 2;
  m.betti = {1, 0, 1};
  m.nu = {2.0, 2.0, 2.0};
  std::vector<TransverseMode> scalar;
  std::vector<TransverseMode> oneforms;
  for (int l = 1; l <= 8; ++l) {
    const double v = static_cast<double>(l) * (l + 1);
    scalar.push_back({v, 2 * l + 1});
    // 1-forms: an exact and a coexact copy of each nonconstant function
    oneforms.push_back({v, 2 * (2 * l + 1)});
  }
  m.modes = {scalar, oneforms, scalar};
  return m;
}

std::optional<CrossSectionModel> builtin_model(const std::string& name) {
  if (name == "circle") return circle();
  if (name == "torus2") return torus2();
  if (name == "torus3") return torus3();
  if (name == "sphere2") return sphere2();
  return std::nullopt;
}

std::vector<CrossSectionModel> builtin_cross_sections() {
  return {circle(), torus2(), torus3(), sphere2()};
}

double prediction(std::int64_t d, double x, double R) {
  return static_cast<double>(d) * x * R / kPi;
}

std::optional<double> choose_r0(const CrossSectionModel& model,
                                const MetricParams& mp, int p, double x) {
  mp.validate();
  model.validate();
  check_match(model, mp);
  check_x(x);
  const double R = neck_length(mp);
  const double sigma = essential_bottom(mp, p);
  const double nu = nu_of(model, p);
  const double top = sigma + x * x;
  // Solve nu / f(tau*) = top on the log scale, then cut so the kept segment
  // ends at tau*.
  const double logf = std::log(nu) - std::log(top);
  double tau_star;
  if (mp.a == -1.0) {
    tau_star = (logf / (2.0 * mp.b) - std::log(mp.c1 * mp.eps)) / mp.c2;
  } else {
    const double dstar = std::exp((mp.a + 1.0) * logf / (2.0 * mp.b));
    const double base0 = std::exp((mp.a + 1.0) * std::log(mp.c1 * mp.eps));
    tau_star = (base0 - dstar) / (-mp.c2 * (mp.a + 1.0));
  }
  double r0 = R + 1.0 - tau_star;
  r0 += 1e-9 * std::fmax(1.0, std::fabs(r0));  // keep the inequality strict
  r0 = std::fmax(1.0, r0);
  if (!(r0 <= R)) return std::nullopt;
  return r0;
}

std::int64_t transverse_contribution(const CrossSectionModel& model,
                                     const MetricParams& mp, int p, double lo,
                                     double hi, double r0,
                                     const SolverOptions& opts) {
  mp.validate();
  model.validate();
  check_match(model, mp);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi))
    throw std::invalid_argument("need finite lo <= hi");
  const double R = neck_length(mp);
  if (!(r0 >= 1.0) || !(r0 <= R))
    throw std::invalid_argument("r0 must lie in [1, R]");
  const double len = R - r0 + 1.0;
  const double f_end = warp_factor(mp, len);
  // The reduced potential is monotone in tau, so the endpoint minimum is a
  // rigorous floor; each mode's effective potential then sits above
  // rmin + mu / f(len).
  const double rmin =
      std::fmin(reduced_potential(mp, p, 0.0), reduced_potential(mp, p, len));
  const std::vector<TransverseMode>& modes = modes_of(model, p);
  if (modes.empty())
    throw std::domain_error("transverse mode table is empty");
  if (rmin + modes.back().value / f_end <= hi)
    throw std::domain_error(
        "transverse mode table too short to certify the window");
  std::int64_t total = 0;
  for (const TransverseMode& md : modes) {
    const double floor_v = rmin + md.value / f_end;
    if (!(floor_v < hi)) break;  // this and all higher modes clear the window
    const double mu = md.value;
    const SLProblem pb{len, CallablePotential{[mp, p, mu](double u) {
                         return transverse_effective_potential(mp, p, mu, u);
                       }}};
    const CountResult below_hi = count_below(pb, hi, opts);
    const CountResult below_lo = count_below(pb, lo, opts);
    total += md.multiplicity * (below_hi.count - below_lo.count);
  }
  return total;
}

CountingReport counting_function(const CrossSectionModel& model,
                                 const MetricParams& mp, int p, double x,
                                 const SolverOptions& opts) {
  mp.validate();
  model.validate();
  check_match(model, mp);
  check_x(x);
  const std::int64_t d = betti_of(model, p);
  CountingReport rep;
  rep.eps = mp.eps;
  rep.p = p;
  rep.x = x;
  rep.R = neck_length(mp);
  rep.sigma = essential_bottom(mp, p);
  rep.prediction = prediction(d, x, rep.R);
  const double lo = rep.sigma;
  const double hi = rep.sigma + x * x;
  bool unconverged = false;
  bool tie = false;
  bool clamped = false;
  if (d != 0) {
    const SLProblem pb{rep.R, reduced_potential_model(mp, p)};
    const CountResult below_hi = count_below(pb, hi, opts);
    const CountResult below_lo = count_below(pb, lo, opts);
    rep.count = d * (below_hi.count - below_lo.count);
    unconverged = !below_hi.converged || !below_lo.converged;
    tie = below_hi.tie || below_lo.tie;
    clamped = below_hi.clamped || below_lo.clamped;
  }
  const std::optional<double> r0 = choose_r0(model, mp, p, x);
  bool transverse_nonzero = false;
  if (r0) {
    rep.r0 = *r0;
    rep.truncated_length = rep.R - *r0 + 1.0;
    if (opts.transverse) {
      const std::int64_t tc =
          transverse_contribution(model, mp, p, lo, hi, *r0, opts);
      if (tc != 0) {
        rep.count += tc;
        transverse_nonzero = true;
      }
    }
  }
  rep.remainder = static_cast<double>(rep.count) - rep.prediction;
  std::string flags;
  const auto add = [&flags](const char* f) {
    if (!flags.empty()) flags += ';';
    flags += f;
  };
  if (unconverged) add("unconverged");
  if (tie) add("tie");
  if (clamped) add("clamped");
  if (!r0) add("infeasible-r0");
  if (transverse_nonzero) add("transverse-nonzero");
  rep.flags = std::move(flags);
  return rep;
}

}  // namespace neckspec

#include <clocale>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "neckspec/counting.hpp"
#include "neckspec/experiment.hpp"
#include "neckspec/geometry.hpp"
#include "neckspec/reduction.hpp"

namespace {

struct MetricArgs {
  double a = -1.0;
  double b = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double eps = 1.0;
  int n = 1;

  neckspec::MetricParams params() const {
    neckspec::MetricParams mp;
    mp.a = a;
    mp.b = b;
    mp.c1 = c1;
    mp.c2 = c2;
    mp.eps = eps;
    mp.n = n;
    return mp;
  }
};

void add_metric_options(CLI::App* cmd, MetricArgs& ma, bool eps_required) {
  cmd->add_option("--a", ma.a, "radial exponent, a <= -1")
      ->capture_default_str();
  cmd->add_option("--b", ma.b, "cross-section exponent, b > 0")
      ->capture_default_str();
  cmd->add_option("--c1", ma.c1, "profile offset coefficient, c1 > 0")
      ->capture_default_str();
  cmd->add_option("--c2", ma.c2, "profile slope coefficient, c2 > 0")
      ->capture_default_str();
  cmd->add_option("--n", ma.n, "cross-section dimension")
      ->capture_default_str();
  CLI::Option* eps = cmd->add_option("--eps", ma.eps, "degeneration parameter");
  if (eps_required)
    eps->required();
  else
    eps->capture_default_str();
}

neckspec::BoundaryCondition parse_bc(const std::string& v) {
  if (v == "dirichlet") return neckspec::BoundaryCondition::dirichlet;
  if (v == "neumann") return neckspec::BoundaryCondition::neumann;
  throw std::invalid_argument("boundary condition must be dirichlet or neumann");
}

bool has_flag(const std::string& flags, const std::string& name) {
  std::size_t pos = 0;
  while (pos <= flags.size()) {
    const std::size_t end = flags.find(';', pos);
    const std::string tok =
        flags.substr(pos, end == std::string::npos ? std::string::npos
                                                   : end - pos);
    if (tok == name) return true;
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return false;
}

int run_essential(const MetricArgs& ma, int p) {
  neckspec::MetricParams mp = ma.params();
  if (mp.eps == 0.0) mp.eps = 1.0;  // bottom does not depend on eps
  mp.validate();
  const neckspec::EssentialInterval ei = neckspec::essential_interval(mp, p);
  const std::string bottom = neckspec::format_sig12(ei.bottom);
  std::printf("sigma=%s interval=[%s,inf)\n", bottom.c_str(), bottom.c_str());
  return 0;
}

int run_count(const MetricArgs& ma, int p, double x, const std::string& model,
              const neckspec::SolverOptions& opts) {
  const std::optional<neckspec::CrossSectionModel> cs =
      neckspec::builtin_model(model);
  if (!cs) {
    std::fprintf(stderr, "error: unknown cross-section model '%s'\n",
                 model.c_str());
    return 2;
  }
  const neckspec::CountingReport rep =
      neckspec::counting_function(*cs, ma.params(), p, x, opts);
  std::printf("%s\n", neckspec::to_csv_row(rep).c_str());
  if (has_flag(rep.flags, "unconverged") || has_flag(rep.flags, "tie") ||
      has_flag(rep.flags, "infeasible-r0"))
    return 3;
  return 0;
}

int run_sweep(const std::string& config_path) {
  const neckspec::SweepSpec spec = neckspec::parse_config_file(config_path);
  const std::vector<neckspec::CountingReport> rows = neckspec::sweep(spec);
  neckspec::write_csv(spec.output_path, rows);
  for (const neckspec::CountingReport& row : rows)
    if (has_flag(row.flags, "unconverged") || has_flag(row.flags, "tie") ||
        has_flag(row.flags, "row-error"))
      return 3;
  return 0;
}

int run_potential_dump(const MetricArgs& ma, int p, int nodes,
                       const std::optional<double>& mu) {
  if (nodes < 1) throw std::invalid_argument("--nodes must be at least 1");
  const neckspec::MetricParams mp = ma.params();
  const double R = neckspec::neck_length(mp);
  std::printf("tau,r\n");
  for (int i = 0; i <= nodes; ++i) {
    const double tau = R * static_cast<double>(i) / nodes;
    const double v = mu ? neckspec::transverse_effective_potential(mp, p, *mu,
                                                                   tau)
                        : neckspec::reduced_potential(mp, p, tau);
    std::printf("%s,%s\n", neckspec::format_sig12(tau).c_str(),
                neckspec::format_sig12(v).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"eigenvalue counting laboratory for warped-product necks"};
  app.require_subcommand(1);

  MetricArgs ess_m;
  ess_m.eps = 0.0;  // the essential interval is an eps -> 0 statement
  int ess_p = 0;
  CLI::App* ess = app.add_subcommand(
      "essential", "print the degree-p essential spectrum interval");
  add_metric_options(ess, ess_m, false);
  ess->add_option("--p", ess_p, "form degree")->capture_default_str();

  MetricArgs cnt_m;
  int cnt_p = 0;
  double cnt_x = 0.0;
  std::string cnt_model = "circle";
  std::string cnt_bcl = "neumann";
  std::string cnt_bcr = "dirichlet";
  neckspec::SolverOptions cnt_opts;
  CLI::App* cnt = app.add_subcommand(
      "count", "count window eigenvalues; prints one CSV row, no header");
  add_metric_options(cnt, cnt_m, true);
  cnt->add_option("--p", cnt_p, "form degree")->capture_default_str();
  cnt->add_option("--x", cnt_x, "window half-width parameter, x > 0")
      ->required();
  cnt->add_option("--model", cnt_model,
                  "built-in cross-section: circle, torus2, torus3, sphere2")
      ->capture_default_str();
  cnt->add_option("--grid", cnt_opts.grid_size,
                  "grid intervals, 0 = automatic")
      ->capture_default_str();
  cnt->add_option("--tolerance", cnt_opts.tolerance,
                  "phase-method ODE tolerance")
      ->capture_default_str();
  cnt->add_option("--bc-left", cnt_bcl, "dirichlet or neumann")
      ->capture_default_str();
  cnt->add_option("--bc-right", cnt_bcr, "dirichlet or neumann")
      ->capture_default_str();
  cnt->add_flag("--transverse", cnt_opts.transverse,
                "audit the transverse contribution on the kept segment");

  std::string sweep_config;
  CLI::App* swp = app.add_subcommand(
      "sweep", "run the sweep described by a config file and write CSV");
  swp->add_option("--config", sweep_config, "config file path")->required();

  MetricArgs dmp_m;
  int dmp_p = 0;
  int dmp_nodes = 200;
  double dmp_mu = 0.0;
  CLI::App* dmp = app.add_subcommand(
      "potential-dump", "sample the reduced potential over [0, R] as CSV");
  add_metric_options(dmp, dmp_m, true);
  dmp->add_option("--p", dmp_p, "form degree")->capture_default_str();
  dmp->add_option("--nodes", dmp_nodes, "number of sample intervals")
      ->capture_default_str();
  CLI::Option* mu_opt = dmp->add_option(
      "--mu", dmp_mu, "shift by transverse eigenvalue mu / f(tau)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (ess->parsed()) return run_essential(ess_m, ess_p);
    if (cnt->parsed()) {
      cnt_opts.bc_left = parse_bc(cnt_bcl);
      cnt_opts.bc_right = parse_bc(cnt_bcr);
      return run_count(cnt_m, cnt_p, cnt_x, cnt_model, cnt_opts);
    }
    if (swp->parsed()) return run_sweep(sweep_config);
    if (dmp->parsed()) {
      std::optional<double> mu;
      if (mu_opt->count() > 0) mu = dmp_mu;
      return run_potential_dump(dmp_m, dmp_p, dmp_nodes, mu);
    }
  } catch (const neckspec::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

#include "neckspec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

namespace neckspec {
namespace {

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream iss(s);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double_tok(const std::string& tok, int line,
                        const std::string& what) {
  const char* c = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(c, &end);
  if (end != c + tok.size() || tok.empty())
    throw ConfigError(line, "bad number for " + what + ": '" + tok + "'");
  return v;
}

long long parse_int_tok(const std::string& tok, int line,
                        const std::string& what) {
  const char* c = tok.c_str();
  char* end = nullptr;
  const long long v = std::strtoll(c, &end, 10);
  if (end != c + tok.size() || tok.empty())
    throw ConfigError(line, "bad integer for " + what + ": '" + tok + "'");
  return v;
}

struct RawItem {
  std::string value;
  int line = 0;
};

using RawConfig = std::map<std::string, std::map<std::string, RawItem>>;

const RawItem* find_item(const RawConfig& got, const std::string& sec,
                         const std::string& key) {
  const auto si = got.find(sec);
  if (si == got.end()) return nullptr;
  const auto ki = si->second.find(key);
  if (ki == si->second.end()) return nullptr;
  return &ki->second;
}

}  // namespace

std::vector<CountingReport> sweep(const SweepSpec& spec) {
  if (spec.degrees.empty() || spec.x_values.empty() ||
      spec.eps_values.empty())
    throw std::invalid_argument(
        "sweep needs nonempty degrees, x_values, eps_values");
  std::vector<int> degrees = spec.degrees;
  std::vector<double> xs = spec.x_values;
  std::vector<double> epss = spec.eps_values;
  std::sort(degrees.begin(), degrees.end());
  std::sort(xs.begin(), xs.end());
  std::sort(epss.begin(), epss.end(), std::greater<>());
  struct Job {
    int p;
    double x;
    double eps;
  };
  std::vector<Job> jobs;
  jobs.reserve(degrees.size() * xs.size() * epss.size());
  for (int p : degrees)
    for (double x : xs)
      for (double eps : epss) jobs.push_back({p, x, eps});
  std::vector<CountingReport> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& jb = jobs[i];
      MetricParams mp = spec.metric;
      mp.eps = jb.eps;
      try {
        rows[i] = counting_function(spec.model, mp, jb.p, jb.x, spec.solver);
      } catch (const std::exception&) {
        CountingReport bad;
        bad.eps = jb.eps;
        bad.p = jb.p;
        bad.x = jb.x;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        bad.R = nan;
        bad.sigma = nan;
        bad.prediction = nan;
        bad.remainder = nan;
        bad.flags = "row-error";
        rows[i] = bad;
      }
    }
  };
  unsigned tn = std::thread::hardware_concurrency();
  if (tn == 0) tn = 1;
  tn = std::min(tn, 8u);
  tn = static_cast<unsigned>(
      std::min<std::size_t>(tn, jobs.size() == 0 ? 1 : jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(tn - 1);
  for (unsigned t = 1; t < tn; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return rows;
}

std::string format_sig12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  for (int prec = 1; prec <= 12; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

// like format_sig12 but never gives up on the round trip; 17 significant
// digits always suffice for a double
std::string format_exact(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::string to_csv_row(const CountingReport& row) {
  std::string s;
  s += format_sig12(row.eps);
  s += ',';
  s += std::to_string(row.p);
  s += ',';
  s += format_sig12(row.x);
  s += ',';
  s += format_sig12(row.R);
  s += ',';
  s += format_sig12(row.sigma);
  s += ',';
  s += std::to_string(row.count);
  s += ',';
  const std::string pred = format_sig12(row.prediction);
  s += pred;
  s += ',';
  // quantize against the printed prediction, not the full-precision one,
  // and print exactly: parsing count, prediction and remainder back must
  // satisfy count - prediction == remainder in doubles
  const double pred_q = std::strtod(pred.c_str(), nullptr);
  s += format_exact(static_cast<double>(row.count) - pred_q);
  s += ',';
  s += format_sig12(row.r0);
  s += ',';
  s += row.flags;
  return s;
}

std::string to_csv(const std::vector<CountingReport>& rows) {
  std::string out = "eps,p,x,R,sigma,count,prediction,remainder,r0,flags\n";
  for (const CountingReport& row : rows) {
    out += to_csv_row(row);
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path,
               const std::vector<CountingReport>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << to_csv(rows);
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

ConfigError::ConfigError(int line_, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
      line(line_) {}

SweepSpec parse_config(std::istream& in) {
  static const std::map<std::string, std::vector<std::string>> kSchema = {
      {"metric", {"a", "b", "c1", "c2", "n"}},
      {"cross_section", {"builtin", "n", "betti", "nu", "modes"}},
      {"sweep", {"degrees", "x_values", "eps_values"}},
      {"solver",
       {"grid_size", "bc_left", "bc_right", "tolerance", "transverse"}},
      {"output", {"path"}},
  };
  RawConfig got;
  std::set<std::string> seen;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(line_no, "malformed section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (kSchema.find(name) == kSchema.end())
        throw ConfigError(line_no, "unknown section [" + name + "]");
      if (!seen.insert(name).second)
        throw ConfigError(line_no, "duplicate section [" + name + "]");
      section = name;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected key = value");
    if (section.empty())
      throw ConfigError(line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = kSchema.at(section);
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(line_no,
                        "unknown key '" + key + "' in [" + section + "]");
    if (value.empty())
      throw ConfigError(line_no, "empty value for '" + key + "'");
    if (!got[section].emplace(key, RawItem{value, line_no}).second)
      throw ConfigError(line_no, "duplicate key '" + key + "'");
  }

  SweepSpec spec;

  if (const RawItem* it = find_item(got, "metric", "a"))
    spec.metric.a = parse_double_tok(it->value, it->line, "a");
  if (const RawItem* it = find_item(got, "metric", "b"))
    spec.metric.b = parse_double_tok(it->value, it->line, "b");
  if (const RawItem* it = find_item(got, "metric", "c1"))
    spec.metric.c1 = parse_double_tok(it->value, it->line, "c1");
  if (const RawItem* it = find_item(got, "metric", "c2"))
    spec.metric.c2 = parse_double_tok(it->value, it->line, "c2");
  if (const RawItem* it = find_item(got, "metric", "n")) {
    const long long n = parse_int_tok(it->value, it->line, "n");
    if (n < 1 || n > 64) throw ConfigError(it->line, "n must be in [1, 64]");
    spec.metric.n = static_cast<int>(n);
  }

  const RawItem* builtin = find_item(got, "cross_section", "builtin");
  const bool has_inline = find_item(got, "cross_section", "n") ||
                          find_item(got, "cross_section", "betti") ||
                          find_item(got, "cross_section", "nu") ||
                          find_item(got, "cross_section", "modes");
  if (builtin && has_inline)
    throw ConfigError(builtin->line,
                      "builtin excludes inline cross-section keys");
  if (builtin) {
    const auto m = builtin_model(builtin->value);
    if (!m)
      throw ConfigError(builtin->line, "unknown builtin cross-section '" +
                                           builtin->value + "'");
    spec.model = *m;
    if (spec.model.n != spec.metric.n)
      throw ConfigError(builtin->line,
                        "cross-section dimension differs from metric n");
  } else if (has_inline) {
    int cn = spec.metric.n;
    if (const RawItem* it = find_item(got, "cross_section", "n")) {
      const long long v = parse_int_tok(it->value, it->line, "n");
      if (v != spec.metric.n)
        throw ConfigError(it->line, "cross-section n must match metric n");
      cn = static_cast<int>(v);
    }
    const RawItem* bt = find_item(got, "cross_section", "betti");
    const RawItem* nu = find_item(got, "cross_section", "nu");
    const RawItem* mo = find_item(got, "cross_section", "modes");
    if (!bt || !nu || !mo)
      throw ConfigError(0, "inline cross-section needs betti, nu, modes");
    spec.model.name = "inline";
    spec.model.n = cn;
    const std::size_t full = static_cast<std::size_t>(cn) + 1;
    const std::size_t half = static_cast<std::size_t>(cn) / 2 + 1;
    std::vector<std::int64_t> bvals;
    for (const std::string& tok : split_ws(bt->value))
      bvals.push_back(parse_int_tok(tok, bt->line, "betti"));
    if (bvals.size() == full) {
      spec.model.betti = bvals;
    } else if (bvals.size() == half) {
      // mirror-fill the Poincare-dual upper half
      spec.model.betti.resize(full);
      for (int p = 0; p <= cn; ++p)
        spec.model.betti[p] = bvals[static_cast<std::size_t>(
            std::min(p, cn - p))];
    } else {
      throw ConfigError(bt->line,
                        "betti needs n+1 entries or the lower half");
    }
    const double nu_v = parse_double_tok(nu->value, nu->line, "nu");
    spec.model.nu.assign(full, nu_v);
    std::vector<TransverseMode> table;
    for (const std::string& tok : split_ws(mo->value)) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ConfigError(mo->line,
                          "modes entries are value:multiplicity pairs");
      TransverseMode md;
      md.value = parse_double_tok(tok.substr(0, colon), mo->line, "modes");
      md.multiplicity = parse_int_tok(tok.substr(colon + 1), mo->line,
                                      "modes multiplicity");
      table.push_back(md);
    }
    spec.model.modes.assign(full, table);
  } else {
    throw ConfigError(0, "cross_section needs builtin or inline tables");
  }

  const RawItem* dg = find_item(got, "sweep", "degrees");
  const RawItem* xv = find_item(got, "sweep", "x_values");
  const RawItem* ev = find_item(got, "sweep", "eps_values");
  if (!dg || !xv || !ev)
    throw ConfigError(0, "sweep needs degrees, x_values, eps_values");
  for (const std::string& tok : split_ws(dg->value)) {
    const long long p = parse_int_tok(tok, dg->line, "degrees");
    if (p < 0 || p > spec.model.n)
      throw ConfigError(dg->line, "degree outside [0, n]");
    spec.degrees.push_back(static_cast<int>(p));
  }
  for (const std::string& tok : split_ws(xv->value)) {
    const double x = parse_double_tok(tok, xv->line, "x_values");
    if (!(x > 0.0) || !std::isfinite(x))
      throw ConfigError(xv->line, "x values must be positive and finite");
    spec.x_values.push_back(x);
  }
  for (const std::string& tok : split_ws(ev->value)) {
    const double e = parse_double_tok(tok, ev->line, "eps_values");
    if (!(e > 0.0) || !std::isfinite(e))
      throw ConfigError(ev->line, "eps values must be positive and finite");
    spec.eps_values.push_back(e);
  }

  if (const RawItem* it = find_item(got, "solver", "grid_size")) {
    const long long m = parse_int_tok(it->value, it->line, "grid_size");
    if (m != 0 && (m < 16 || m > 900'000'000'000'000LL))
      throw ConfigError(it->line, "grid_size must be 0 or in [16, 9e14]");
    spec.solver.grid_size = m;
  }
  const auto parse_bc = [](const RawItem& it) {
    if (it.value == "dirichlet") return BoundaryCondition::dirichlet;
    if (it.value == "neumann") return BoundaryCondition::neumann;
    throw ConfigError(it.line, "boundary condition must be dirichlet or neumann");
  };
  if (const RawItem* it = find_item(got, "solver", "bc_left"))
    spec.solver.bc_left = parse_bc(*it);
  if (const RawItem* it = find_item(got, "solver", "bc_right"))
    spec.solver.bc_right = parse_bc(*it);
  if (const RawItem* it = find_item(got, "solver", "tolerance")) {
    const double tol = parse_double_tok(it->value, it->line, "tolerance");
    if (!(tol > 0.0) || !std::isfinite(tol))
      throw ConfigError(it->line, "tolerance must be positive and finite");
    spec.solver.tolerance = tol;
  }
  if (const RawItem* it = find_item(got, "solver", "transverse")) {
    if (it->value == "true")
      spec.solver.transverse = true;
    else if (it->value == "false")
      spec.solver.transverse = false;
    else
      throw ConfigError(it->line, "transverse must be true or false");
  }

  const RawItem* path = find_item(got, "output", "path");
  if (!path) throw ConfigError(0, "output path is required");
  spec.output_path = path->value;

  try {
    spec.model.validate();
    MetricParams probe = spec.metric;
    probe.eps = 1.0;
    probe.validate();
  } catch (const std::exception& e) {
    throw ConfigError(0, e.what());
  }
  return spec;
}

SweepSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

}  // namespace neckspec

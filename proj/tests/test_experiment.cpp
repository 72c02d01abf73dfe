#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "neckspec/experiment.hpp"

using neckspec::ConfigError;
using neckspec::CountingReport;
using neckspec::CrossSectionModel;
using neckspec::SweepSpec;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

SweepSpec circle_spec() {
  SweepSpec spec;
  spec.metric.a = -1.0;
  spec.model = neckspec::circle();
  spec.degrees = {0, 1};
  spec.x_values = {2.0, 5.0};
  spec.eps_values = {1e-1, 1e-2};
  spec.output_path = "unused.csv";
  return spec;
}

int config_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    neckspec::parse_config(in);
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.rfind("line " + std::to_string(e.line) + ":", 0) == 0);
    return e.line;
  }
  return -1;  // no ConfigError raised
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_sig12 specials and frozen samples") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(neckspec::format_sig12(nan) == "nan");
  CHECK(neckspec::format_sig12(inf) == "inf");
  CHECK(neckspec::format_sig12(-inf) == "-inf");
  CHECK(neckspec::format_sig12(0.0) == "0");
  CHECK(neckspec::format_sig12(2.0) == "2");
  CHECK(neckspec::format_sig12(0.25) == "0.25");
  CHECK(neckspec::format_sig12(1e-3) == "0.001");
  CHECK(neckspec::format_sig12(1e20) == "1e+20");
  CHECK(neckspec::format_sig12(-1.5) == "-1.5");
}

TEST_CASE("format_sig12 parses back within half a 12-digit ulp") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> um(-1.0, 1.0);
  std::uniform_int_distribution<int> ue(-30, 30);
  for (int it = 0; it < 2000; ++it) {
    const double v = um(rng) * std::pow(10.0, ue(rng));
    const std::string s = neckspec::format_sig12(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(std::fabs(back - v) <= 1e-11 * std::fabs(v));
    // doubles born from a <= 12 digit decimal round-trip exactly
    const std::string s2 = neckspec::format_sig12(back);
    CHECK(std::strtod(s2.c_str(), nullptr) == back);
  }
}

TEST_CASE("csv header and field count are stable") {
  std::vector<CountingReport> rows(1);
  const std::string csv = neckspec::to_csv(rows);
  CHECK(csv.rfind("eps,p,x,R,sigma,count,prediction,remainder,r0,flags\n", 0) ==
        0);
  CountingReport rep;
  rep.eps = 1e-3;
  rep.x = 5.0;
  rep.count = 11;
  rep.prediction = 10.9956247374;
  rep.flags = "tie;clamped";
  CHECK(split_commas(neckspec::to_csv_row(rep)).size() == 10);
  CHECK(split_commas(neckspec::to_csv_row(CountingReport{})).size() == 10);
}

TEST_CASE("printed remainder is consistent with the printed prediction") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> upred(0.0, 1e6);
  for (int it = 0; it < 500; ++it) {
    CountingReport rep;
    rep.prediction = upred(rng);
    rep.count = static_cast<std::int64_t>(rep.prediction + 0.7);
    const auto fields = split_commas(neckspec::to_csv_row(rep));
    REQUIRE(fields.size() == 10);
    const double c = std::strtod(fields[5].c_str(), nullptr);
    const double p = std::strtod(fields[6].c_str(), nullptr);
    const double r = std::strtod(fields[7].c_str(), nullptr);
    CHECK(c - p == r);
  }

  CountingReport rep;
  rep.eps = 1e-3;
  rep.p = 0;
  rep.x = 5.0;
  rep.R = 6.90875477932;
  rep.sigma = 0.25;
  rep.count = 11;
  rep.prediction = 10.995624737412345;
  rep.remainder = 11.0 - rep.prediction;
  const auto fields = split_commas(neckspec::to_csv_row(rep));
  REQUIRE(fields.size() == 10);
  const double c = std::strtod(fields[5].c_str(), nullptr);
  const double p = std::strtod(fields[6].c_str(), nullptr);
  const double r = std::strtod(fields[7].c_str(), nullptr);
  CHECK(c - p == r);
  CHECK(fields[5] == "11");
}

TEST_CASE("missing truncation radius prints as nan") {
  CountingReport rep;
  rep.flags = "infeasible-r0";
  const auto fields = split_commas(neckspec::to_csv_row(rep));
  CHECK(fields[8] == "nan");
  CHECK(fields[9] == "infeasible-r0");
}

TEST_CASE("sweep runs every combination in canonical order") {
  SweepSpec spec = circle_spec();
  const auto rows = neckspec::sweep(spec);
  REQUIRE(rows.size() == 8);
  std::size_t i = 0;
  for (int p : {0, 1})
    for (double x : {2.0, 5.0})
      for (double eps : {1e-1, 1e-2}) {
        CHECK(rows[i].p == p);
        CHECK(rows[i].x == x);
        CHECK(rows[i].eps == eps);
        ++i;
      }
  // each row matches a direct single evaluation
  for (const CountingReport& row : rows) {
    neckspec::MetricParams mp = spec.metric;
    mp.eps = row.eps;
    const auto direct =
        neckspec::counting_function(spec.model, mp, row.p, row.x, spec.solver);
    CHECK(neckspec::to_csv_row(row) == neckspec::to_csv_row(direct));
  }
}

TEST_CASE("sweep output is insensitive to input list order") {
  SweepSpec spec = circle_spec();
  SweepSpec shuffled = spec;
  shuffled.degrees = {1, 0};
  shuffled.x_values = {5.0, 2.0};
  shuffled.eps_values = {1e-2, 1e-1};
  CHECK(neckspec::to_csv(neckspec::sweep(spec)) ==
        neckspec::to_csv(neckspec::sweep(shuffled)));
}

TEST_CASE("a failing row is isolated, not fatal") {
  SweepSpec spec = circle_spec();
  spec.metric.b = -1.0;  // invalid; every row must fail cleanly
  const auto rows = neckspec::sweep(spec);
  REQUIRE(rows.size() == 8);
  for (const CountingReport& row : rows) {
    CHECK(row.flags == "row-error");
    CHECK(std::isnan(row.R));
    CHECK(std::isnan(row.prediction));
    CHECK(row.count == 0);
    CHECK(row.eps > 0.0);  // identifying columns survive
  }
}

TEST_CASE("sweep rejects empty axes") {
  SweepSpec spec = circle_spec();
  spec.degrees.clear();
  CHECK_THROWS_AS(neckspec::sweep(spec), std::invalid_argument);
}

TEST_CASE("csv files are byte-identical across runs") {
  SweepSpec spec = circle_spec();
  const auto rows = neckspec::sweep(spec);
  neckspec::write_csv("exp_test_a.csv", rows);
  neckspec::write_csv("exp_test_b.csv", neckspec::sweep(spec));
  CHECK(slurp("exp_test_a.csv") == slurp("exp_test_b.csv"));
  std::remove("exp_test_a.csv");
  std::remove("exp_test_b.csv");
  CHECK_THROWS_AS(
      neckspec::write_csv("no_such_dir_zz/x.csv", rows), std::runtime_error);
}

TEST_CASE("full inline config parses into a complete spec") {
  const std::string text =
      "# sweep description\n"
      "[metric]\n"
      "a = -1\n"
      "b = 2\n"
      "c1 = 0.5\n"
      "c2 = 1.5\n"
      "n = 3\n"
      "\n"
      "[cross_section]\n"
      "betti = 1 3\n"
      "nu = 1\n"
      "modes = 1:6 2:12 3:8\n"
      "\n"
      "[sweep]\n"
      "degrees = 0 1\n"
      "x_values = 2 5\n"
      "eps_values = 0.1 0.01\n"
      "\n"
      "[solver]\n"
      "grid_size = 2048\n"
      "bc_left = dirichlet\n"
      "bc_right = neumann\n"
      "tolerance = 1e-9\n"
      "transverse = true\n"
      "\n"
      "[output]\n"
      "path = out.csv\n";
  std::istringstream in(text);
  const SweepSpec spec = neckspec::parse_config(in);
  CHECK(spec.metric.a == -1.0);
  CHECK(spec.metric.b == 2.0);
  CHECK(spec.metric.c1 == 0.5);
  CHECK(spec.metric.c2 == 1.5);
  CHECK(spec.metric.n == 3);
  CHECK(spec.model.name == "inline");
  CHECK(spec.model.n == 3);
  CHECK(spec.model.betti == std::vector<std::int64_t>{1, 3, 3, 1});
  REQUIRE(spec.model.nu.size() == 4);
  for (double v : spec.model.nu) CHECK(v == 1.0);
  REQUIRE(spec.model.modes.size() == 4);
  for (const auto& table : spec.model.modes) {
    REQUIRE(table.size() == 3);
    CHECK(table[0].value == 1.0);
    CHECK(table[0].multiplicity == 6);
    CHECK(table[2].value == 3.0);
    CHECK(table[2].multiplicity == 8);
  }
  CHECK(spec.degrees == std::vector<int>{0, 1});
  CHECK(spec.x_values == std::vector<double>{2.0, 5.0});
  CHECK(spec.eps_values == std::vector<double>{0.1, 0.01});
  CHECK(spec.solver.grid_size == 2048);
  CHECK(spec.solver.bc_left == neckspec::BoundaryCondition::dirichlet);
  CHECK(spec.solver.bc_right == neckspec::BoundaryCondition::neumann);
  CHECK(spec.solver.tolerance == 1e-9);
  CHECK(spec.solver.transverse);
  CHECK(spec.output_path == "out.csv");
  CHECK_NOTHROW(spec.model.validate());
}

TEST_CASE("builtin config picks up the named cross-section") {
  const std::string text =
      "[metric]\n"
      "a = -1\n"
      "[cross_section]\n"
      "builtin = circle\n"
      "[sweep]\n"
      "degrees = 0\n"
      "x_values = 1\n"
      "eps_values = 0.5\n"
      "[output]\n"
      "path = o.csv\n";
  std::istringstream in(text);
  const SweepSpec spec = neckspec::parse_config(in);
  CHECK(spec.model.name == "circle");
  CHECK(spec.solver.grid_size == 0);  // defaults survive an absent [solver]
  CHECK_FALSE(spec.solver.transverse);
}

TEST_CASE("config errors carry the offending line") {
  CHECK(config_error_line("[nope]\n") == 1);
  CHECK(config_error_line("[metric\n") == 1);
  CHECK(config_error_line("a = 1\n") == 1);
  CHECK(config_error_line("[metric]\nq = 1\n") == 2);
  CHECK(config_error_line("[metric]\nfoo\n") == 2);
  CHECK(config_error_line("[metric]\na =\n") == 2);
  CHECK(config_error_line("[metric]\na = -1\na = -2\n") == 3);
  CHECK(config_error_line("[metric]\n[metric]\n") == 2);
  CHECK(config_error_line("[metric]\na = abc\n") == 2);
  // comments are whole-line only; trailing text is part of the value
  CHECK(config_error_line("[metric]\na = -1 # comment\n") == 2);
  CHECK(config_error_line("[metric]\nn = 0\n") == 2);
  CHECK(config_error_line("[metric]\nn = 65\n") == 2);
}

TEST_CASE("cross-section config errors") {
  CHECK(config_error_line("[cross_section]\nbuiltin = circle\nnu = 1\n") == 2);
  CHECK(config_error_line("[cross_section]\nbuiltin = mobius\n") == 2);
  CHECK(config_error_line("[metric]\nn = 2\n[cross_section]\nbuiltin = circle\n") ==
        4);
  CHECK(config_error_line("[cross_section]\nn = 2\nbetti = 1\nnu = 1\nmodes = 1:1\n") ==
        2);
  CHECK(config_error_line(
            "[metric]\nn = 3\n[cross_section]\nbetti = 1 2 3\nnu = 1\nmodes = 1:1\n") ==
        4);
  CHECK(config_error_line("[cross_section]\nbetti = 1\nnu = 1\nmodes = 1\n") ==
        4);
  CHECK(config_error_line("[cross_section]\nbetti = 1\nnu = 1\nmodes = 1:x\n") ==
        4);
}

TEST_CASE("sweep and solver config errors") {
  const std::string pre =
      "[metric]\na = -1\n[cross_section]\nbuiltin = circle\n";
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 7\nx_values = 1\n"
                                "eps_values = 0.5\n[output]\npath = o\n") == 6);
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 0\nx_values = 0\n"
                                "eps_values = 0.5\n[output]\npath = o\n") == 7);
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 0\nx_values = 1\n"
                                "eps_values = -1\n[output]\npath = o\n") == 8);
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 0\nx_values = 1\n"
                                "eps_values = 0.5\n[solver]\ngrid_size = 8\n"
                                "[output]\npath = o\n") == 10);
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 0\nx_values = 1\n"
                                "eps_values = 0.5\n[solver]\nbc_left = mixed\n"
                                "[output]\npath = o\n") == 10);
  CHECK(config_error_line(pre + "[sweep]\ndegrees = 0\nx_values = 1\n"
                                "eps_values = 0.5\n[solver]\ntransverse = yes\n"
                                "[output]\npath = o\n") == 10);
}

TEST_CASE("whole-file config checks report line zero") {
  const std::string metric = "[metric]\na = -1\n";
  const std::string cs = "[cross_section]\nbuiltin = circle\n";
  const std::string sweep =
      "[sweep]\ndegrees = 0\nx_values = 1\neps_values = 0.5\n";
  const std::string out = "[output]\npath = o.csv\n";
  CHECK(config_error_line(metric + cs + sweep) == 0);        // no output
  CHECK(config_error_line(metric + cs + out) == 0);          // no sweep
  CHECK(config_error_line(metric + sweep + out) == 0);       // no cross-section
  CHECK(config_error_line(metric + "[cross_section]\nbetti = 1\nnu = 1\n" +
                          sweep + out) == 0);  // inline without modes
  // inline tables that fail model validation surface as line 0 too
  CHECK(config_error_line(metric +
                          "[cross_section]\nbetti = 1 2\nnu = 1\nmodes = 1:1\n" +
                          sweep + out) == 0);
}

TEST_CASE("parse_config_file reports unreadable paths") {
  CHECK_THROWS_AS(neckspec::parse_config_file("no_such_file_zz.ini"),
                  std::runtime_error);
}

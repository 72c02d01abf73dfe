#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "neckspec/counting.hpp"

// Batch driver: run counting_function over a grid of (degree, x, eps) and
// serialize the reports as CSV with stable, shortest round-trip formatting,
// so repeated runs produce byte-identical files.

namespace neckspec {

struct SweepSpec {
  MetricParams metric;  // eps field is replaced by each eps_values entry
  CrossSectionModel model;
  std::vector<int> degrees;
  std::vector<double> x_values;
  std::vector<double> eps_values;
  SolverOptions solver;
  std::string output_path;  // from [output]; unused by sweep() itself
};

// Every (p, x, eps) combination, ordered by ascending degree, ascending x,
// descending eps. Rows that throw come back with NaN numerics and the
// row-error flag instead of aborting the batch.
std::vector<CountingReport> sweep(const SweepSpec& spec);

// Shortest decimal that round-trips, at most 12 significant digits.
// NaN -> "nan", infinities -> "inf"/"-inf", zero -> "0".
std::string format_sig12(double v);

// One CSV row, no newline. The remainder column is recomputed against the
// rounded prediction and printed with full round-trip precision, so parsing
// the row back gives count - prediction == remainder exactly.
std::string to_csv_row(const CountingReport& row);

// Header line eps,p,x,R,sigma,count,prediction,remainder,r0,flags plus one
// line per row, each '\n'-terminated.
std::string to_csv(const std::vector<CountingReport>& rows);

void write_csv(const std::string& path,
               const std::vector<CountingReport>& rows);

// Config syntax errors carry the 1-based line; checks that only make sense
// once the whole file is read report line 0.
struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg);
};

// INI-style sweep description: sections [metric], [cross_section], [sweep],
// [solver], [output]. Full-line '#' comments only. [cross_section] names a
// builtin or gives inline tables (betti full or mirror-filled half, one nu
// and one mode table shared by all degrees).
SweepSpec parse_config(std::istream& in);
SweepSpec parse_config_file(const std::string& path);

}  // namespace neckspec

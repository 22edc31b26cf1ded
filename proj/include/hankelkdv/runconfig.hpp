#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hankelkdv/profiles.hpp"

namespace hankelkdv {

// Total configuration capture for reproducible runs. Unknown keys are
// rejected with the offending key named; all numerics are validated.
struct RunConfig {
  std::string profile_kind = "zero";
  std::map<std::string, double> profile_params;

  std::vector<double> t_values{0.1};
  double x_min = -4.0, x_max = 4.0;
  int x_count = 81;

  double h = 0.0;  // 0: automatic choice per grid
  int contour_nodes = 0;
  int nystrom_nodes = 0;
  int galerkin_size = 48;

  double m_tol = 1e-10;
  double q_tol = 1e-8;
  double reflection_tol = 1e-10;

  std::string out_path;        // empty: stdout
  std::string format = "csv";  // csv | json
  bool gnuplot = false;

  double reflection_h = 1.0;
  double reflection_lambda_max = 8.0;
  int reflection_nodes = 64;

  double delta = 1.0;   // pole-free certificate domain parameter
  int pole_samples = 50;

  std::vector<int> mollify_ns{4, 8, 16};
  double window_lo = -3.0, window_hi = 3.0;
  int window_points = 25;

  int workers = 0;

  MiuraProfile make_profile() const;
  std::vector<double> x_grid() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// 17 significant digits, the full-precision decimal contract.
std::string fmt17(double v);

struct OutputTable {
  std::string comment;  // column documentation, written as a leading remark
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add_row(const std::vector<std::string>& row);
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
  void write(const std::string& path, const std::string& format) const;
};

}  // namespace hankelkdv

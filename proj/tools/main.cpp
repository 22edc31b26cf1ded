// Command line front end: reflection | solve | certify | validate.
// Exit codes: 0 success, 1 computational failure, 2 configuration error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "hankelkdv/certify.hpp"
#include "hankelkdv/dyson.hpp"
#include "hankelkdv/refsolver.hpp"
#include "hankelkdv/runconfig.hpp"

using namespace hankelkdv;

namespace {

int cmd_reflection(const RunConfig& cfg) {
  MiuraProfile profile = cfg.make_profile();
  OutputTable table;
  table.comment =
      "reflection coefficient on the contour R + ih; columns: lambda (node), "
      "h (contour height), re_R, im_R, abs_R (dimensionless)";
  table.columns = {"lambda", "h", "re_R", "im_R", "abs_R"};
  const int n = cfg.reflection_nodes;
  const double h = cfg.reflection_h;
  for (int j = 0; j < n; ++j) {
    double lam = n == 1 ? 0.0
                        : -cfg.reflection_lambda_max +
                              2.0 * cfg.reflection_lambda_max * j / (n - 1);
    cxd R = profile.is_zero()
                ? cxd(0.0, 0.0)
                : reflection(profile, cxd(lam, h), cfg.reflection_tol);
    table.add_row({fmt17(lam), fmt17(h), fmt17(R.real()), fmt17(R.imag()),
                   fmt17(std::abs(R))});
  }
  table.write(cfg.out_path, cfg.format);
  return 0;
}

int cmd_solve(const RunConfig& cfg) {
  MiuraProfile profile = cfg.make_profile();
  OutputTable table;
  table.comment =
      "determinant solution; columns: x, t, q (KdV solution), logdet "
      "(log det(I+H)), norm_bound (closed-form operator bound), "
      "fd_crosscheck_error, nodes_used (kernel discretization), error";
  table.columns = {"x",          "t",         "q",
                   "logdet",     "norm_bound", "fd_crosscheck_error",
                   "nodes_used", "error"};
  SolveOptions opts;
  opts.h = cfg.h;
  opts.contour_nodes = cfg.contour_nodes;
  opts.nystrom_nodes = cfg.nystrom_nodes;
  opts.q_tol = cfg.q_tol;
  opts.m_tol = cfg.m_tol;
  opts.workers = cfg.workers;

  bool any_failed = false;
  std::vector<double> xs = cfg.x_grid();
  int t_index = 0;
  for (double t : cfg.t_values) {
    std::vector<SolutionSample> samples = q_grid(profile, xs, t, opts);
    OutputTable companion;
    companion.comment = "gnuplot companion: x, q at t=" + fmt17(t);
    companion.columns = {"x", "q"};
    for (const SolutionSample& s : samples) {
      if (!s.ok) {
        any_failed = true;
        table.add_row({fmt17(s.x), fmt17(s.t), "", "", "", "", "", s.error});
        continue;
      }
      for (double v : {s.q, s.logdet, s.norm_bound, s.fd_error})
        if (!std::isfinite(v))
          throw numerical_error("non-finite value escaped q_grid");
      table.add_row({fmt17(s.x), fmt17(s.t), fmt17(s.q), fmt17(s.logdet),
                     fmt17(s.norm_bound), fmt17(s.fd_error),
                     std::to_string(s.n_nystrom), ""});
      companion.add_row({fmt17(s.x), fmt17(s.q)});
    }
    if (cfg.gnuplot && !cfg.out_path.empty()) {
      std::string path = cfg.out_path + ".t" + std::to_string(t_index) + ".dat";
      std::ofstream os(path);
      for (const auto& row : companion.rows) os << row[0] << " " << row[1] << "\n";
    }
    ++t_index;
  }
  table.write(cfg.out_path, cfg.format);
  return any_failed ? 1 : 0;
}

int cmd_certify(const RunConfig& cfg) {
  MiuraProfile profile = cfg.make_profile();
  CertifyOptions opts;
  opts.t = cfg.t_values.front();
  opts.h = cfg.h;
  opts.contour_nodes = cfg.contour_nodes;
  opts.workers = cfg.workers;
  opts.pole_delta = cfg.delta;
  opts.pole_samples = cfg.pole_samples;
  CertifyReport rep = run_certify(profile, opts);
  OutputTable table;
  table.comment = "invariant suite for profile " + profile.id() +
                  "; margin is the distance to the failure threshold";
  table.columns = {"check", "status", "margin", "detail"};
  for (const CheckResult& c : rep.items) {
    std::fprintf(stdout, "%-26s %s  margin=%.3e  %s\n", c.name.c_str(),
                 c.pass ? "PASS" : "FAIL", c.margin, c.detail.c_str());
    table.add_row({c.name, c.pass ? "PASS" : "FAIL", fmt17(c.margin), c.detail});
  }
  if (!cfg.out_path.empty()) table.write(cfg.out_path, cfg.format);
  return rep.all_pass() ? 0 : 1;
}

int cmd_validate(const RunConfig& cfg) {
  MiuraProfile profile = cfg.make_profile();
  double t = cfg.t_values.front();
  OutputTable table;

  if (profile.is_zero()) {
    table.comment = "zero profile: all discrepancies vanish identically";
    table.columns = {"n", "discrepancy"};
    table.add_row({"0", fmt17(0.0)});
    table.write(cfg.out_path, cfg.format);
    return 0;
  }

  bool smooth = true;
  for (const RPiece& p : profile.r_pieces())
    if (p.kind != RPiece::Kind::smooth &&
        !(p.kind == RPiece::Kind::constant && p.value == 0.0))
      smooth = false;

  if (smooth) {
    // cross-solver comparison at two reference resolutions
    table.comment =
        "cross validation against the pseudo-spectral classical solution; "
        "columns: level, sup_discrepancy over the window";
    table.columns = {"level", "sup_discrepancy"};
    CompareResult res = compare_with_classical(profile, t, cfg.window_lo,
                                               cfg.window_hi,
                                               cfg.window_points, cfg.workers);
    table.add_row({"0", fmt17(res.discrepancy)});
    std::fprintf(stdout, "sup discrepancy = %.6e (det cert %.1e, ref cert %.1e)\n",
                 res.discrepancy, res.det_certificate, res.ref_certificate);
    table.write(cfg.out_path, cfg.format);
    return res.discrepancy < 1e-4 ? 0 : 1;
  }

  // mollified-sequence convergence
  table.comment =
      "natural-solution convergence: sup over the window of |q_n - q| at t, "
      "for the mollified approximating sequence";
  table.columns = {"n", "sup_discrepancy"};
  SolveOptions opts;
  opts.workers = cfg.workers;
  opts.q_tol = cfg.q_tol;
  std::vector<double> xs;
  for (int i = 0; i < cfg.window_points; ++i)
    xs.push_back(cfg.window_lo +
                 (cfg.window_hi - cfg.window_lo) * i / (cfg.window_points - 1));
  std::vector<SolutionSample> base = q_grid(profile, xs, t, opts);
  std::vector<double> sups;
  for (int n : cfg.mollify_ns) {
    MiuraProfile mol = profile.mollify(n);
    std::vector<SolutionSample> approx = q_grid(mol, xs, t, opts);
    double sup = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (!base[i].ok || !approx[i].ok)
        throw numerical_error("validate: grid point failed");
      sup = std::max(sup, std::abs(base[i].q - approx[i].q));
    }
    sups.push_back(sup);
    table.add_row({std::to_string(n), fmt17(sup)});
    std::fprintf(stdout, "n=%-4d sup|q_n - q| = %.6e\n", n, sup);
  }
  table.write(cfg.out_path, cfg.format);
  for (size_t i = 1; i < sups.size(); ++i)
    if (!(sups[i] < sups[i - 1])) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KdV solver for step-like singular Miura initial data via "
               "Hankel-operator determinants"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override, format_override;
  int workers = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--workers", workers, "worker threads (0 = hardware)");
    sub->add_option("--out", out_override, "output path override");
    sub->add_option("--format", format_override, "csv | json");
  };

  CLI::App* reflection = app.add_subcommand(
      "reflection", "tabulate R on the contour R + ih");
  CLI::App* solve =
      app.add_subcommand("solve", "evaluate q(x, t) on a grid");
  CLI::App* certify = app.add_subcommand(
      "certify", "run the operator-theoretic invariant suite");
  CLI::App* validate = app.add_subcommand(
      "validate", "cross-solver or mollified-sequence validation");
  for (CLI::App* sub : {reflection, solve, certify, validate}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_path = out_override;
    if (!format_override.empty()) {
      if (format_override != "csv" && format_override != "json")
        throw config_error("--format must be csv or json");
      cfg.format = format_override;
    }
    if (workers >= 0) cfg.workers = workers;
    set_default_workers(cfg.workers);

    if (reflection->parsed()) return cmd_reflection(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (certify->parsed()) return cmd_certify(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
    return 2;
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

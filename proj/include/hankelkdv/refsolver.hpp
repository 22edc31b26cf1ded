#pragma once

#include <functional>
#include <vector>

#include "hankelkdv/profiles.hpp"

namespace hankelkdv {

// Classical reference solution of u_t - 6 u u_x + u_xxx = 0 on a large
// periodic box, pseudo-spectral in space with 2/3-rule dealiasing and
// ETDRK4 time stepping on the dispersive integrating factor.
struct GridSolution {
  double X = 0.0;                  // box is [-X, X)
  int N = 0;                       // grid size, power of two
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // u(., t) per requested time
  double mass_drift = 0.0;         // relative drift of int u dx
  double spectral_tail = 0.0;      // top-sixth spectrum over peak mode
  double boundary_amplitude = 0.0; // max |u| near the box edge at t_final

  double x_of(int i) const { return -X + 2.0 * X * i / N; }
  const std::vector<double>& at(double t) const;
};

struct ClassicalOptions {
  double X = 32.0;
  int N = 2048;
  double dt = 2e-4;
  double boundary_tol = 1e-10;
  double tail_tol = 1e-10;
  bool check_certificates = true;
};

GridSolution solve_classical(const std::function<double(double)>& q0,
                             const std::vector<double>& t_out,
                             const ClassicalOptions& opts = {});

// Pointwise classical initial datum q = r' + r^2 of a smooth profile,
// with r' from a high-order central difference.
std::function<double(double)> classical_datum(const MiuraProfile& profile);

struct CompareResult {
  double discrepancy = 0.0;        // sup over the window
  std::vector<double> xs, q_det, q_ref;
  double det_certificate = 0.0;    // solver self-convergence estimates
  double ref_certificate = 0.0;
};

// Sup-norm discrepancy between the determinant solution and the classical
// reference on a compact window, both at certified accuracy.
CompareResult compare_with_classical(const MiuraProfile& profile, double t,
                                     double x_lo, double x_hi, int n_points,
                                     int workers = 0);

}  // namespace hankelkdv

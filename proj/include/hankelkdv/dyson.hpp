#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hankelkdv/hankel.hpp"

namespace hankelkdv {

struct SolveOptions {
  double h = 0.0;           // contour height; 0 picks the bound minimizer
  int contour_nodes = 0;    // lambda rule size; 0 sizes from the phase budget
  int nystrom_nodes = 0;    // kernel discretization size; 0 automatic
  double q_tol = 1e-8;      // doubling convergence target for q
  double m_tol = 1e-10;     // m-function tolerance behind the table
  double t_min = 1e-4;      // refuse smaller t (cost grows like t^{-1/2})
  bool fd_check = true;     // 5-point second difference of logdet
  double fd_step = 1e-3;
  int max_doublings = 4;
  int workers = 0;
  bool point_parallel = false;  // grid mode: parallelism lives across points
  LambdaRule::Kind rule_kind = LambdaRule::Kind::hermite;
};

struct SolutionSample {
  double x = 0.0;
  double t = 0.0;
  double q = 0.0;
  double logdet = 0.0;
  double norm_bound = 0.0;
  double fd_error = 0.0;       // |trace-formula q - finite-difference q|
  double im_residual = 0.0;    // discarded imaginary kernel residue
  int n_nystrom = 0;
  int n_contour = 0;
  double h = 0.0;
  bool ok = true;
  std::string error;
};

// log det(I + M) for symmetric M with spectral radius < 1, as the sum of
// log(1 + mu_i) over eigenvalues.
double logdet_iplus(const Eigen::MatrixXd& M);

// q(x, t) = -2 d^2/dx^2 log det(I + H(x,t)) assembled from the Nystrom
// kernel and its analytic x-derivative matrices:
//   d^2/dx^2 log det(I + K) = tr(A K'') - tr((A K')^2),  A = (I + K)^{-1}.
// The finite-difference cross-check replays log det on a 5-point stencil.
SolutionSample q_value(const MiuraProfile& profile, double x, double t,
                       const SolveOptions& opts = {});

// Batch evaluation sharing one reflection table per (t, h); per-point
// failures are collected, not fail-fast. Deterministic across worker counts.
std::vector<SolutionSample> q_grid(const MiuraProfile& profile,
                                   const std::vector<double>& xs, double t,
                                   const SolveOptions& opts = {});

struct ParabolicDomain {
  double delta = 1.0;
  double t = 1.0;
  // Im^2 z / 12 < delta Re z - delta^2 + (sqrt(delta t)/4) log(t / delta^3)
  bool contains(cxd z) const;
};

struct PoleFreeSample {
  cxd z;
  double bound;
  double margin;  // 1 - bound
  bool pass;
};

struct PoleFreeReport {
  double t, delta, h;
  std::vector<PoleFreeSample> samples;
  bool all_pass() const;
};

// For each sample z in D(delta, t), evaluates the closed-form norm bound at
// h = sqrt(delta / (4 t)) (the delta = 4 h^2 t matching) and reports the
// contraction margin; bound < 1 rules out a pole at z.
PoleFreeReport pole_free_certificate(const MiuraProfile& profile, double t,
                                     double delta,
                                     const std::vector<cxd>& samples);

struct ResidualInfo {
  double dx = 0.0, dt = 0.0;
  double residual = 0.0;
  int refinements = 0;
  std::vector<double> history;  // residual per refinement level
};

// |q_t - 6 q q_x + q_xxx| from central differences of q_value on a local
// stencil; steps are refined until the residual stops decreasing.
double kdv_residual(const MiuraProfile& profile, double x, double t,
                    const SolveOptions& opts = {}, ResidualInfo* info = nullptr);

}  // namespace hankelkdv

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "hankelkdv/scattering.hpp"

namespace hankelkdv {

// Oscillatory symbol data xi_{z,t}(k) R(k) sampled on the contour R + ih.
// z is the spatial parameter (real on the physical line, complex for the
// analyticity diagnostics); the Gaussian decay of |xi| on the contour
// requires t > 0 and h > 0.
struct OscillatorySymbol {
  cxd z{0.0, 0.0};
  double t = 1.0;
  double h = 1.0;
  std::shared_ptr<const ReflectionTable> table;
};

// xi_{z,t}(k) = exp{i (8 k^3 t + 2 k z)}. Overflow is reported, never
// silently saturated; underflow returns 0.
cxd xi(cxd k, cxd z, double t);

// Closed form of |xi_{z,t}(lambda + ih)|:
//   exp{8 h^3 t - 2 h Re z + Im^2 z/(24 h t)
//       - (sqrt(24 h t) lambda + Im z / sqrt(24 h t))^2}.
double xi_abs(double lambda, double h, cxd z, double t);

// Analytic continuation of the negative Riesz part of the symbol,
//   Phi(k) = -(1/2 pi i) int xi(l + ih) R(l + ih) / (l - k + ih) dl,
// evaluated by the table quadrature. Valid for Im k > -h, away from the
// contour R + ih.
cxd symbol_phi(const OscillatorySymbol& sym, cxd k);

// Kernel of the integral realization on L^2(R_+):
//   F(sigma) = (1/2 pi) int xi(l + ih) R(l + ih) e^{i (l + ih) sigma} dl,
// real for real z (the imaginary residue is checked, then discarded).
// The constant is pinned by the Nystrom/Galerkin determinant agreement.
double marchenko_kernel(const OscillatorySymbol& sym, double sigma);

struct HankelDiscretization {
  enum class Kind { nystrom, galerkin };
  Kind kind = Kind::nystrom;
  int size = 0;
  bool is_real = true;
  Eigen::MatrixXd matrix;        // real symmetric (real z)
  Eigen::MatrixXcd cmatrix;      // complex variant (galerkin / complex z)
  Quad1D s_rule;                 // nystrom nodes and weights
  int basis_size = 0;            // galerkin
  double im_residual = 0.0;      // discarded imaginary contribution
  double tail_ratio = 0.0;       // galerkin truncation diagnostic
  bool truncation_ok = true;
  OscillatorySymbol symbol;
};

// Nystrom discretization of the kernel realization with Gauss-Legendre
// nodes mapped to the half line by s = tau u/(1-u); tau <= 0 picks the
// default 3/h matched to the e^{-h sigma} kernel envelope.
// M_ij = sqrt(w_i w_j) F(s_i + s_j), symmetric by construction.
HankelDiscretization build_nystrom(const OscillatorySymbol& sym, int n_nodes,
                                   double tau = 0.0, int workers = 0);

// Kernel matrix together with its first and second x-derivative variants
// (integrand multiplied by 2i(l+ih) and its square) for the trace-formula
// second derivative of the log-determinant.
struct NystromKernelSet {
  Quad1D s;
  Eigen::MatrixXd K, K1, K2;
  double im_residual = 0.0;
};
NystromKernelSet build_nystrom_derivatives(const OscillatorySymbol& sym, int n,
                                           double tau = 0.0, int workers = 0,
                                           double x_shift = 0.0);

// Complex-z Nystrom matrix (entire-dependence diagnostics, pole domain).
Eigen::MatrixXcd build_nystrom_complex(const OscillatorySymbol& sym, int n,
                                       double tau = 0.0);

// Galerkin matrix in the rational orthonormal basis of the Hardy space,
//   e_n(k) = pi^{-1/2} (k - i)^n / (k + i)^{n+1},
// via <H(Phi) e_n, e_m> = - int Phi e_n e_m dk. The Cayley substitution
// k = tan(theta/2) turns the entries into Fourier coefficients of
// Phi(tan(theta/2)), evaluated with the periodic trapezoid rule. This
// route never touches the Fourier kernel convention.
HankelDiscretization build_galerkin(const OscillatorySymbol& sym,
                                    int basis_size, int theta_nodes = 4096);

// Decreasing singular values of the assembled matrix.
std::vector<double> singular_values(const HankelDiscretization& disc);

// Closed-form operator norm bound sqrt(1/(24 pi h^3 t)) *
// exp{8 h^3 t - 2 h Re z + Im^2 z/(24 h t)} for any h > 0.
double norm_bound(cxd z, double t, double h);

// Tighter table-based bound (1/(2 pi h)) int |xi R| d lambda.
double norm_bound_table(const OscillatorySymbol& sym);

// Contour height minimizing the closed-form bound on h in (1e-3, 1e3).
double optimize_h(cxd z, double t);

// Test hook: Nystrom matrix of an arbitrary real kernel F(sigma).
Eigen::MatrixXd nystrom_from_kernel(const std::function<double(double)>& F,
                                    int n, double tau);

// det(I + M) helpers for the discretization consistency gate.
cxd det_iplus(const Eigen::MatrixXcd& M);
double det_iplus_sym(const Eigen::MatrixXd& M);

}  // namespace hankelkdv

#include "hankelkdv/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hankelkdv {

namespace {

void require_symbol(const OscillatorySymbol& sym) {
  if (!(sym.t > 0.0) || !(sym.h > 0.0))
    throw config_error("oscillatory symbol requires t > 0 and h > 0");
  if (!sym.table) throw config_error("oscillatory symbol has no reflection table");
}

// Per-symbol contour data: k_j = lambda_j + ih and the weighted integrand
// prefactor W_j xi(k_j) R_j. Everything downstream is a dot product against
// exponentials in sigma.
struct ContourEval {
  std::vector<cxd> k;
  std::vector<cxd> base;
  double abs_sum = 0.0;  // sum |W xi R|, cancellation scale
};

ContourEval make_eval(const OscillatorySymbol& sym, double x_shift = 0.0) {
  require_symbol(sym);
  const ReflectionTable& tab = *sym.table;
  ContourEval ev;
  size_t n = tab.rule.lambda.size();
  ev.k.resize(n);
  ev.base.resize(n);
  cxd zeff = sym.z + x_shift;
  for (size_t j = 0; j < n; ++j) {
    cxd kj(tab.rule.lambda[j], sym.h);
    ev.k[j] = kj;
    cxd v = xi(kj, zeff, sym.t) * tab.values[j] * tab.rule.weight[j];
    ev.base[j] = v;
    ev.abs_sum += std::abs(v);
  }
  return ev;
}

}  // namespace

cxd xi(cxd k, cxd z, double t) {
  // exponent expanded in long double: the modulus is exp of the real part,
  // whose terms reach O(10^3) while the identity checks ask for 1e-13
  long double a = k.real(), b = k.imag();
  long double zr = z.real(), zi = z.imag(), tl = t;
  long double im_cubic = 3.0L * a * a * b - b * b * b;   // Im k^3
  long double re_cubic = a * a * a - 3.0L * a * b * b;   // Re k^3
  long double re_expo = -(8.0L * tl * im_cubic + 2.0L * (a * zi + b * zr));
  long double im_expo = 8.0L * tl * re_cubic + 2.0L * (a * zr - b * zi);
  if (re_expo > 700.0L)
    throw numerical_error("xi: exponent overflow (Re exponent = " +
                          std::to_string(static_cast<double>(re_expo)) + ")");
  if (re_expo < -745.0L) return cxd(0.0, 0.0);
  long double mag = std::exp(re_expo);
  double phase = static_cast<double>(
      im_expo - 2.0L * pi * std::floor(im_expo / (2.0L * pi)));
  return cxd(static_cast<double>(mag * std::cos(static_cast<long double>(phase))),
             static_cast<double>(mag * std::sin(static_cast<long double>(phase))));
}

double xi_abs(double lambda, double h, cxd z, double t) {
  if (!(h > 0.0) || !(t > 0.0)) throw config_error("xi_abs requires h, t > 0");
  long double hl = h, tl = t, lam = lambda, zr = z.real(), zi = z.imag();
  long double scale = std::sqrt(24.0L * hl * tl);
  long double mu = scale * lam + zi / scale;
  long double expo = 8.0L * hl * hl * hl * tl - 2.0L * hl * zr +
                     zi * zi / (24.0L * hl * tl) - mu * mu;
  return static_cast<double>(std::exp(expo));
}

cxd symbol_phi(const OscillatorySymbol& sym, cxd k) {
  require_symbol(sym);
  if (!(k.imag() > -sym.h))
    throw config_error("symbol_phi requires Im k > -h");
  if (std::abs(k.imag() - sym.h) < 1e-8)
    throw numerical_error("symbol_phi: k within 1e-8 of the contour R + ih");
  ContourEval ev = make_eval(sym);
  cxd s(0.0, 0.0);
  for (size_t j = 0; j < ev.k.size(); ++j) s += ev.base[j] / (ev.k[j] - k);
  return -s / (2.0 * pi * cxd(0.0, 1.0));
}

double marchenko_kernel(const OscillatorySymbol& sym, double sigma) {
  require_symbol(sym);
  if (!(sigma >= 0.0)) throw config_error("marchenko_kernel requires sigma >= 0");
  if (sym.z.imag() != 0.0)
    throw config_error("marchenko_kernel is the real-x kernel; use the complex builder");
  ContourEval ev = make_eval(sym);
  cxd s(0.0, 0.0);
  for (size_t j = 0; j < ev.k.size(); ++j)
    s += ev.base[j] * std::exp(cxd(0.0, 1.0) * ev.k[j] * sigma);
  s /= 2.0 * pi;
  if (std::abs(s.imag()) > 1e-11 * std::max(1.0, std::abs(s.real())))
    throw numerical_error("marchenko_kernel: imaginary residue " +
                          std::to_string(s.imag()) + " above tolerance");
  return s.real();
}

namespace {

// Shared assembly core. For every sigma = s_i + s_j the three kernels
// F, F', F'' differ only by powers of 2 i k under the integral.
struct KernelTriple {
  Eigen::MatrixXd K, K1, K2;
  double im_residual = 0.0;
};

KernelTriple assemble_real(const ContourEval& ev, const Quad1D& s, bool derivs,
                           int workers) {
  const int n = static_cast<int>(s.nodes.size());
  KernelTriple out;
  out.K.resize(n, n);
  if (derivs) {
    out.K1.resize(n, n);
    out.K2.resize(n, n);
  }
  const size_t m = ev.k.size();
  std::vector<double> im_row(n, 0.0), re_row(n, 0.0);
  parallel_for(
      n,
      [&](int i) {
        double im_max = 0.0, re_max = 0.0;
        for (int j = i; j < n; ++j) {
          double sigma = s.nodes[i] + s.nodes[j];
          cxd f0(0.0, 0.0), f1(0.0, 0.0), f2(0.0, 0.0);
          if (derivs) {
            for (size_t l = 0; l < m; ++l) {
              cxd e = ev.base[l] * std::exp(cxd(-sigma * ev.k[l].imag(),
                                                sigma * ev.k[l].real()));
              cxd d = 2.0 * cxd(0.0, 1.0) * ev.k[l];
              f0 += e;
              f1 += d * e;
              f2 += d * d * e;
            }
          } else {
            for (size_t l = 0; l < m; ++l)
              f0 += ev.base[l] * std::exp(cxd(-sigma * ev.k[l].imag(),
                                              sigma * ev.k[l].real()));
          }
          double wij = std::sqrt(s.weights[i] * s.weights[j]) / (2.0 * pi);
          out.K(i, j) = out.K(j, i) = wij * f0.real();
          im_max = std::max(im_max, std::abs(f0.imag()));
          re_max = std::max(re_max, std::abs(f0.real()));
          if (derivs) {
            out.K1(i, j) = out.K1(j, i) = wij * f1.real();
            out.K2(i, j) = out.K2(j, i) = wij * f2.real();
          }
        }
        im_row[i] = im_max;
        re_row[i] = re_max;
      },
      workers);
  double im = *std::max_element(im_row.begin(), im_row.end());
  double re = *std::max_element(re_row.begin(), re_row.end());
  out.im_residual = im / std::max(1.0, re);
  return out;
}

double default_tau(const OscillatorySymbol& sym, double tau) {
  return tau > 0.0 ? tau : 3.0 / sym.h;
}

}  // namespace

HankelDiscretization build_nystrom(const OscillatorySymbol& sym, int n_nodes,
                                   double tau, int workers) {
  require_symbol(sym);
  if (n_nodes < 2) throw config_error("build_nystrom requires n >= 2");
  if (sym.z.imag() != 0.0)
    throw config_error("build_nystrom assembles the real-x matrix");
  ContourEval ev = make_eval(sym);
  Quad1D s = halfline_rule(n_nodes, default_tau(sym, tau));
  KernelTriple kt = assemble_real(ev, s, false, workers);
  if (kt.im_residual > 1e-10)
    throw numerical_error("build_nystrom: kernel imaginary residue above 1e-10");
  HankelDiscretization disc;
  disc.kind = HankelDiscretization::Kind::nystrom;
  disc.size = n_nodes;
  disc.is_real = true;
  disc.matrix = std::move(kt.K);
  disc.s_rule = std::move(s);
  disc.im_residual = kt.im_residual;
  disc.symbol = sym;
  return disc;
}

NystromKernelSet build_nystrom_derivatives(const OscillatorySymbol& sym, int n,
                                           double tau, int workers,
                                           double x_shift) {
  require_symbol(sym);
  if (n < 2) throw config_error("build_nystrom_derivatives requires n >= 2");
  ContourEval ev = make_eval(sym, x_shift);
  Quad1D s = halfline_rule(n, default_tau(sym, tau));
  KernelTriple kt = assemble_real(ev, s, true, workers);
  NystromKernelSet out;
  out.s = std::move(s);
  out.K = std::move(kt.K);
  out.K1 = std::move(kt.K1);
  out.K2 = std::move(kt.K2);
  out.im_residual = kt.im_residual;
  return out;
}

Eigen::MatrixXcd build_nystrom_complex(const OscillatorySymbol& sym, int n,
                                       double tau) {
  require_symbol(sym);
  ContourEval ev = make_eval(sym);
  Quad1D s = halfline_rule(n, default_tau(sym, tau));
  Eigen::MatrixXcd K(n, n);
  const size_t m = ev.k.size();
  parallel_for(n, [&](int i) {
    for (int j = i; j < n; ++j) {
      double sigma = s.nodes[i] + s.nodes[j];
      cxd f0(0.0, 0.0);
      for (size_t l = 0; l < m; ++l)
        f0 += ev.base[l] *
              std::exp(cxd(-sigma * ev.k[l].imag(), sigma * ev.k[l].real()));
      double wij = std::sqrt(s.weights[i] * s.weights[j]) / (2.0 * pi);
      K(i, j) = K(j, i) = wij * f0;
    }
  });
  return K;
}

HankelDiscretization build_galerkin(const OscillatorySymbol& sym,
                                    int basis_size, int theta_nodes) {
  require_symbol(sym);
  if (basis_size < 1) throw config_error("build_galerkin requires basis_size >= 1");
  if (theta_nodes < 8) throw config_error("build_galerkin: theta_nodes too small");
  ContourEval ev = make_eval(sym);
  const int M = theta_nodes;
  const int P = 2 * basis_size - 1;  // need c_p for p = 0 .. 2N-2

  // Phi on the real axis through the Cayley angle, Phi -> 0 at theta = +-pi.
  std::vector<cxd> phi(M);
  parallel_for(M, [&](int j) {
    double theta = -pi + 2.0 * pi * j / M;
    double k = std::tan(0.5 * theta);
    cxd s(0.0, 0.0);
    for (size_t l = 0; l < ev.k.size(); ++l) s += ev.base[l] / (ev.k[l] - k);
    phi[j] = -s / (2.0 * pi * cxd(0.0, 1.0));
  });

  std::vector<cxd> c(P);
  parallel_for(P, [&](int p) {
    cxd acc(0.0, 0.0);
    for (int j = 0; j < M; ++j) {
      double theta = -pi + 2.0 * pi * j / M;
      acc += phi[j] * std::exp(cxd(0.0, (p + 1) * theta));
    }
    c[p] = acc / static_cast<double>(M);
  });

  HankelDiscretization disc;
  disc.kind = HankelDiscretization::Kind::galerkin;
  disc.size = basis_size;
  disc.basis_size = basis_size;
  disc.symbol = sym;
  disc.cmatrix.resize(basis_size, basis_size);
  for (int mrow = 0; mrow < basis_size; ++mrow)
    for (int ncol = 0; ncol < basis_size; ++ncol) {
      int p = mrow + ncol;
      disc.cmatrix(mrow, ncol) = ((p % 2) ? -1.0 : 1.0) * c[p];
    }
  double cmax = 0.0;
  for (const cxd& v : c) cmax = std::max(cmax, std::abs(v));
  disc.tail_ratio = cmax > 0.0 ? std::abs(c[P - 1]) / cmax : 0.0;
  disc.truncation_ok = disc.tail_ratio < 1e-8;
  disc.is_real = sym.z.imag() == 0.0;
  if (disc.is_real) {
    disc.im_residual = disc.cmatrix.imag().cwiseAbs().maxCoeff();
    disc.matrix = disc.cmatrix.real();
  }
  return disc;
}

std::vector<double> singular_values(const HankelDiscretization& disc) {
  std::vector<double> sv;
  if (disc.kind == HankelDiscretization::Kind::nystrom && disc.is_real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(disc.matrix,
                                                      Eigen::EigenvaluesOnly);
    sv.resize(disc.matrix.rows());
    for (int i = 0; i < disc.matrix.rows(); ++i)
      sv[i] = std::abs(es.eigenvalues()[i]);
  } else {
    const Eigen::MatrixXcd& m =
        disc.cmatrix.size() ? disc.cmatrix : disc.matrix.cast<cxd>().eval();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    sv.assign(svd.singularValues().data(),
              svd.singularValues().data() + svd.singularValues().size());
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

double norm_bound(cxd z, double t, double h) {
  if (!(t > 0.0) || !(h > 0.0)) throw config_error("norm_bound requires t, h > 0");
  double lg = -0.5 * std::log(24.0 * pi * h * h * h * t) + 8.0 * h * h * h * t -
              2.0 * h * z.real() + z.imag() * z.imag() / (24.0 * h * t);
  if (lg > 700.0) return std::numeric_limits<double>::infinity();
  return std::exp(lg);
}

double norm_bound_table(const OscillatorySymbol& sym) {
  require_symbol(sym);
  const ReflectionTable& tab = *sym.table;
  double s = 0.0;
  for (size_t j = 0; j < tab.rule.lambda.size(); ++j)
    s += tab.rule.weight[j] * xi_abs(tab.rule.lambda[j], sym.h, sym.z, sym.t) *
         std::abs(tab.values[j]);
  return s / (2.0 * pi * sym.h);
}

double optimize_h(cxd z, double t) {
  if (!(t > 0.0)) throw config_error("optimize_h requires t > 0");
  auto log_bound = [&](double u) {
    double h = std::exp(u);
    return -0.5 * std::log(24.0 * pi * h * h * h * t) + 8.0 * h * h * h * t -
           2.0 * h * z.real() + z.imag() * z.imag() / (24.0 * h * t);
  };
  // golden-section on log h in [-3, 3] * ln 10; the objective is convex in h
  double lo = -3.0 * std::log(10.0), hi = 3.0 * std::log(10.0);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
  double fa = log_bound(a), fb = log_bound(b);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - gr * (hi - lo);
      fa = log_bound(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + gr * (hi - lo);
      fb = log_bound(b);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

Eigen::MatrixXd nystrom_from_kernel(const std::function<double(double)>& F,
                                    int n, double tau) {
  Quad1D s = halfline_rule(n, tau);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = std::sqrt(s.weights[i] * s.weights[j]) * F(s.nodes[i] + s.nodes[j]);
      K(i, j) = K(j, i) = v;
    }
  return K;
}

cxd det_iplus(const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(M.rows(), M.cols()) + M;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).determinant();
}

double det_iplus_sym(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M.rows(), M.cols()) + M;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(A).determinant();
}

}  // namespace hankelkdv

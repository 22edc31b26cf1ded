#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hankelkdv/common.hpp"

namespace hankelkdv {

// Plain 1D rule: integral ~ sum w_i f(x_i).
struct Quad1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on (-1, 1). Newton iteration on the Legendre recurrence.
Quad1D gauss_legendre(int n);

// Gauss-Hermite for the weight e^{-x^2} (integral of f(x) e^{-x^2} dx).
// Nodes from the Jacobi matrix, weights from the Christoffel function so
// that large rules stay representable. Results are cached per n.
Quad1D gauss_hermite(int n);

// Quadrature in lambda for contour integrals along R + ih carrying the
// Gaussian factor of the cubic-exponential symbol. The natural variable is
//   mu = sqrt(24 h t) lambda + Im z / sqrt(24 h t),
// in which the modulus of the symbol is exp(const - mu^2). The Hermite rule
// is mapped back to lambda and truncated at |mu| <= 8 (the discarded tail
// is below e^{-64}); the trapezoid variant covers the same window uniformly
// and serves as an independent cross-check.
struct LambdaRule {
  enum class Kind { hermite, trapezoid };
  Kind kind = Kind::hermite;
  double t = 1.0;
  double h = 1.0;
  double im_z = 0.0;       // imaginary part of the spatial parameter
  int n_requested = 0;
  std::vector<double> lambda;   // contour nodes (real parts)
  std::vector<double> weight;   // plain d-lambda weights
  uint64_t hash() const;
};

LambdaRule lambda_rule(double t, double h, int n, double im_z = 0.0,
                       LambdaRule::Kind kind = LambdaRule::Kind::hermite);

// Gauss-Legendre mapped to (0, inf) by s = tau u / (1 - u), u in (0, 1).
Quad1D halfline_rule(int n, double tau);

// Composite-panel antiderivative of a smooth integrand on [a, 0]:
// eval(x) = integral_x^0 f(s) ds. Panel endpoint sums are precomputed;
// the partial panel is integrated on the fly.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> f, double a, int panels);
  double eval(double x) const;
  double total() const { return cum_.empty() ? 0.0 : cum_.front(); }

 private:
  double segment(double lo, double hi) const;

  std::function<double(double)> f_;
  double a_ = 0.0;
  double dx_ = 1.0;
  std::vector<double> cum_;   // cum_[j] = integral_{x_j}^{0} f
  std::vector<double> gl_x_, gl_w_;
};

}  // namespace hankelkdv

#include "hankelkdv/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

namespace hankelkdv {

namespace {
std::atomic<int> g_workers{0};
}

int default_workers() { return g_workers.load(); }
void set_default_workers(int n) { g_workers.store(n); }

Quad1D gauss_legendre(int n) {
  if (n < 1) throw config_error("gauss_legendre: n must be >= 1");
  Quad1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(pi * (i - 0.25) / (n + 0.5));
    double pp = 0.0, z1;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > 1e-15);
    q.nodes[i - 1] = -z;
    q.nodes[n - i] = z;
    q.weights[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    q.weights[n - i] = q.weights[i - 1];
  }
  return q;
}

namespace {

// Orthonormal Hermite recurrence for the weight e^{-x^2}:
//   b_{k+1} p_{k+1}(x) = x p_k(x) - b_k p_{k-1}(x),  b_k = sqrt(k/2),
// p_0 = pi^{-1/4}. The Golub-Welsch weight is 1 / sum_k p_k(x_i)^2.
double christoffel_weight(double x, int n) {
  double pm = 0.0;
  double p = std::pow(pi, -0.25);
  double s = p * p;
  for (int k = 0; k + 1 < n; ++k) {
    double bk = std::sqrt(0.5 * k);
    double bk1 = std::sqrt(0.5 * (k + 1));
    double pn = (x * p - bk * pm) / bk1;
    pm = p;
    p = pn;
    s += p * p;
  }
  return 1.0 / s;
}

Quad1D gauss_hermite_uncached(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 1);
  for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(std::max(n - 1, 0)),
                            Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numerical_error("gauss_hermite: tridiagonal eigensolver failed");
  Quad1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()[i];
    q.nodes[i] = x;
    // Weights only matter inside the |mu| <= 8 truncation window; beyond
    // ~|x| = 26 the Christoffel sum overflows and the weight is irrelevant.
    q.weights[i] = std::abs(x) < 25.0 ? christoffel_weight(x, n) : 0.0;
  }
  return q;
}

}  // namespace

Quad1D gauss_hermite(int n) {
  if (n < 1) throw config_error("gauss_hermite: n must be >= 1");
  static std::mutex mu;
  static std::map<int, Quad1D> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Quad1D q = gauss_hermite_uncached(n);
  cache.emplace(n, q);
  return q;
}

uint64_t LambdaRule::hash() const {
  auto mix = [](uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  };
  auto bits = [](double x) {
    uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    std::memcpy(&u, &x, sizeof(u));
    return u;
  };
  uint64_t h = static_cast<uint64_t>(kind) + 0x51ull;
  h = mix(h, bits(t));
  h = mix(h, bits(this->h));
  h = mix(h, bits(im_z));
  h = mix(h, static_cast<uint64_t>(n_requested));
  h = mix(h, static_cast<uint64_t>(lambda.size()));
  return h;
}

LambdaRule lambda_rule(double t, double h, int n, double im_z,
                       LambdaRule::Kind kind) {
  if (!(t > 0.0) || !(h > 0.0))
    throw config_error("lambda_rule: t and h must be positive");
  if (n < 1) throw config_error("lambda_rule: n must be >= 1");
  const double scale = std::sqrt(24.0 * h * t);
  const double shift = im_z / scale;  // mu = scale*lambda + shift
  LambdaRule rule;
  rule.kind = kind;
  rule.t = t;
  rule.h = h;
  rule.im_z = im_z;
  rule.n_requested = n;
  if (kind == LambdaRule::Kind::hermite) {
    Quad1D gh = gauss_hermite(n);
    for (int i = 0; i < n; ++i) {
      double mu = gh.nodes[i];
      if (std::abs(mu) > 8.0) continue;
      rule.lambda.push_back((mu - shift) / scale);
      rule.weight.push_back(gh.weights[i] * std::exp(mu * mu) / scale);
    }
  } else {
    // Uniform rule on mu in [-8, 8]; endpoint values carry weight e^{-64},
    // so the trapezoid half-weights are moot but kept for form.
    int m = std::max(2, n);
    double dmu = 16.0 / (m - 1);
    for (int i = 0; i < m; ++i) {
      double mu = -8.0 + i * dmu;
      double w = (i == 0 || i == m - 1) ? 0.5 * dmu : dmu;
      rule.lambda.push_back((mu - shift) / scale);
      rule.weight.push_back(w / scale);
    }
  }
  if (rule.lambda.empty())
    throw numerical_error("lambda_rule: all nodes truncated away");
  return rule;
}

Quad1D halfline_rule(int n, double tau) {
  if (n < 2) throw config_error("halfline_rule: n must be >= 2");
  if (!(tau > 0.0)) throw config_error("halfline_rule: tau must be positive");
  Quad1D gl = gauss_legendre(n);
  Quad1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double u = 0.5 * (gl.nodes[i] + 1.0);
    double du = 0.5 * gl.weights[i];
    double denom = 1.0 - u;
    q.nodes[i] = tau * u / denom;
    q.weights[i] = du * tau / (denom * denom);
  }
  return q;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f,
                                       double a, int panels)
    : f_(std::move(f)), a_(a) {
  if (!(a < 0.0)) throw config_error("CumulativeIntegral: a must be < 0");
  if (panels < 1) panels = 1;
  dx_ = -a / panels;
  Quad1D gl = gauss_legendre(12);
  gl_x_ = gl.nodes;
  gl_w_ = gl.weights;
  std::vector<double> panel(panels);
  for (int j = 0; j < panels; ++j)
    panel[j] = segment(a_ + j * dx_, a_ + (j + 1) * dx_);
  cum_.assign(panels + 1, 0.0);
  for (int j = panels - 1; j >= 0; --j) cum_[j] = cum_[j + 1] + panel[j];
}

double CumulativeIntegral::segment(double lo, double hi) const {
  double hw = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), s = 0.0;
  for (size_t i = 0; i < gl_x_.size(); ++i) s += gl_w_[i] * f_(mid + hw * gl_x_[i]);
  return s * hw;
}

double CumulativeIntegral::eval(double x) const {
  if (x >= 0.0) return 0.0;
  if (x <= a_) return total();
  int j = static_cast<int>((x - a_) / dx_);
  int last = static_cast<int>(cum_.size()) - 2;
  if (j > last) j = last;
  double xj1 = a_ + (j + 1) * dx_;
  return cum_[j + 1] + segment(x, xj1);
}

}  // namespace hankelkdv

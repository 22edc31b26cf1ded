#include "hankelkdv/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace hankelkdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// C-infinity bump on (-1, 1), normalized to unit mass.
double bump_raw(double u) {
  double d = 1.0 - u * u;
  if (d <= 0.0) return 0.0;
  return std::exp(-1.0 / d);
}

double bump_mass() {
  static const double mass = [] {
    Quad1D gl = gauss_legendre(512);
    double s = 0.0;
    for (size_t i = 0; i < gl.nodes.size(); ++i)
      s += gl.weights[i] * bump_raw(gl.nodes[i]);
    return s;
  }();
  return mass;
}

}  // namespace

NormalizedQ::NormalizedQ(std::vector<QPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) {
    tail_value_ = 0.0;
    support_left_ = 0.0;
    return;
  }
  const QPiece& tail = pieces_.front();
  if (tail.kind == QPiece::Kind::constant && tail.x_left == -kInf) {
    tail_value_ = tail.value;
    support_left_ = tail.x_right;
  } else {
    tail_value_ = std::nullopt;
    support_left_ = -kInf;
  }
}

double NormalizedQ::eval(double x) const {
  if (x >= 0.0) return 0.0;
  for (const QPiece& p : pieces_) {
    if (x < p.x_right || (&p == &pieces_.back() && x <= 0.0)) {
      if (x < p.x_left) continue;
      switch (p.kind) {
        case QPiece::Kind::constant: return p.value;
        case QPiece::Kind::linear: return p.q0 + p.slope * (x - p.x_ref);
        case QPiece::Kind::smooth: return p.fn(x);
      }
    }
  }
  return 0.0;
}

double MiuraProfile::r(double x) const {
  if (x >= 0.0) return 0.0;
  for (const RPiece& p : r_pieces_) {
    if (x >= p.x_left && x < p.x_right) {
      switch (p.kind) {
        case RPiece::Kind::constant: return p.value;
        case RPiece::Kind::delta_rational: return -p.c / (1.0 - p.c * x);
        case RPiece::Kind::smooth: return p.fn(x);
      }
    }
  }
  return 0.0;
}

bool MiuraProfile::is_zero() const {
  for (const RPiece& p : r_pieces_)
    if (p.kind != RPiece::Kind::constant || p.value != 0.0) return false;
  return true;
}

MiuraProfile MiuraProfile::zero() {
  MiuraProfile p;
  p.id_ = "zero";
  p.Q_ = NormalizedQ({QPiece{QPiece::Kind::constant, -kInf, 0.0, 0.0, 0, 0, 0, {}}});
  ClosedForms cf;
  cf.m = [](cxd z) {
    cxd s = std::sqrt(z);
    if (s.imag() < 0.0) s = -s;
    return cxd(0.0, 1.0) * s;
  };
  cf.R = [](cxd) { return cxd(0.0, 0.0); };
  p.closed_ = cf;
  return p;
}

MiuraProfile MiuraProfile::delta(double c) {
  if (!(c > 0.0)) throw config_error("delta profile requires c > 0");
  MiuraProfile p;
  p.id_ = "delta(c=" + num(c) + ")";
  RPiece rp;
  rp.kind = RPiece::Kind::delta_rational;
  rp.x_left = -kInf;
  rp.x_right = 0.0;
  rp.c = c;
  p.r_pieces_ = {rp};
  // Q telescopes to the constant -c: r - int_x^0 r^2 = -c/(1-cx) - c + c/(1-cx).
  p.Q_ = NormalizedQ({QPiece{QPiece::Kind::constant, -kInf, 0.0, -c, 0, 0, 0, {}}});
  ClosedForms cf;
  cf.m = [c](cxd z) {
    cxd s = std::sqrt(z);
    if (s.imag() < 0.0) s = -s;
    return cxd(0.0, 1.0) * s - c;
  };
  cf.R = [c](cxd k) { return c / (cxd(0.0, 2.0) * k - c); };
  p.closed_ = cf;
  return p;
}

MiuraProfile MiuraProfile::smooth_bump(double a, double amplitude) {
  if (amplitude == 0.0) {
    MiuraProfile z = zero();
    z.id_ = "smooth_bump(a=" + num(a) + ",amplitude=0)";
    return z;
  }
  if (!(a > 0.0)) throw config_error("smooth_bump requires a > 0");
  MiuraProfile p;
  p.id_ = "smooth_bump(a=" + num(a) + ",amplitude=" + num(amplitude) + ")";
  auto fn = [a, amplitude](double x) {
    double u = x / a + 1.0;  // support (-2a, 0), peak at -a
    double d = 1.0 - u * u;
    if (d <= 0.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / d);
  };
  RPiece tail{RPiece::Kind::constant, -kInf, -2.0 * a, 0.0, 0, {}};
  RPiece body{RPiece::Kind::smooth, -2.0 * a, 0.0, 0.0, 0, fn};
  p.r_pieces_ = {tail, body};
  p.finalize_Q(std::max(64, static_cast<int>(32.0 * a)));
  return p;
}

MiuraProfile MiuraProfile::positive_box(double b, double a) {
  if (!(a > 0.0)) throw config_error("positive_box requires width a > 0");
  MiuraProfile p;
  p.id_ = "positive_box(b=" + num(b) + ",a=" + num(a) + ")";
  RPiece tail{RPiece::Kind::constant, -kInf, -a, 0.0, 0, {}};
  RPiece body{RPiece::Kind::constant, -a, 0.0, b, 0, {}};
  p.r_pieces_ = {tail, body};
  std::vector<QPiece> q;
  q.push_back(QPiece{QPiece::Kind::constant, -kInf, -a, -b * b * a, 0, 0, 0, {}});
  // Q = b + b^2 x on [-a, 0)
  q.push_back(QPiece{QPiece::Kind::linear, -a, 0.0, 0, b, b * b, 0.0, {}});
  p.Q_ = NormalizedQ(std::move(q));
  return p;
}

MiuraProfile MiuraProfile::constant_r(double kappa) {
  MiuraProfile p;
  p.id_ = "constant_r(kappa=" + num(kappa) + ")";
  RPiece body{RPiece::Kind::constant, -kInf, 0.0, kappa, 0, {}};
  p.r_pieces_ = {body};
  // Q = kappa + kappa^2 x, unbounded tail: disk mode only.
  std::vector<QPiece> q;
  q.push_back(QPiece{QPiece::Kind::linear, -kInf, 0.0, 0, kappa,
                     kappa * kappa, 0.0, {}});
  p.Q_ = NormalizedQ(std::move(q));
  return p;
}

MiuraProfile MiuraProfile::rough_random(uint64_t seed, double L, double amplitude) {
  int cells = static_cast<int>(std::lround(L));
  if (cells < 1 || std::abs(L - cells) > 1e-12)
    throw config_error("rough_random requires integer L >= 1");
  if (!(amplitude >= 0.0)) throw config_error("rough_random requires amplitude >= 0");
  MiuraProfile p;
  p.id_ = "rough_random(seed=" + std::to_string(seed) + ",L=" + num(L) +
          ",amplitude=" + num(amplitude) + ")";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  std::vector<double> rho(cells);
  for (double& v : rho) v = dist(rng);

  std::vector<RPiece> rp;
  rp.push_back(RPiece{RPiece::Kind::constant, -kInf, -L, 0.0, 0, {}});
  for (int j = 0; j < cells; ++j)
    rp.push_back(RPiece{RPiece::Kind::constant, -L + j, -L + j + 1.0, rho[j], 0, {}});
  p.r_pieces_ = std::move(rp);

  // I_j = int_{x_j}^0 r^2 accumulated from the right.
  std::vector<double> I(cells + 1, 0.0);
  for (int j = cells - 1; j >= 0; --j) I[j] = I[j + 1] + rho[j] * rho[j];
  std::vector<QPiece> q;
  q.push_back(QPiece{QPiece::Kind::constant, -kInf, -L, -I[0], 0, 0, 0, {}});
  for (int j = 0; j < cells; ++j) {
    double xr = -L + j + 1.0;
    q.push_back(QPiece{QPiece::Kind::linear, -L + j, xr, 0,
                       rho[j] - I[j + 1], rho[j] * rho[j], xr, {}});
  }
  p.Q_ = NormalizedQ(std::move(q));
  return p;
}

void MiuraProfile::finalize_Q(int panels_hint) {
  // Generic path for profiles whose rightmost piece is smooth: constant
  // tail value -||r||^2 plus Q = r - int r^2 on the support.
  double a = r_pieces_.back().x_left;
  auto r_fn = r_pieces_.back().fn;
  auto cum = std::make_shared<CumulativeIntegral>(
      [r_fn](double x) { double v = r_fn(x); return v * v; }, a,
      std::max(16, panels_hint));
  r2_integral_ = cum;
  std::vector<QPiece> q;
  q.push_back(QPiece{QPiece::Kind::constant, -kInf, a, -cum->total(), 0, 0, 0, {}});
  QPiece body;
  body.kind = QPiece::Kind::smooth;
  body.x_left = a;
  body.x_right = 0.0;
  body.fn = [r_fn, cum](double x) { return r_fn(x) - cum->eval(x); };
  q.push_back(std::move(body));
  Q_ = NormalizedQ(std::move(q));
}

MiuraProfile MiuraProfile::mollify(int n) const {
  if (n < 1) throw config_error("mollify requires n >= 1");
  if (is_zero()) return zero();

  const double w = 1.0 / n;  // mollifier width and support shift
  const double cut = -static_cast<double>(n);

  // Discontinuities of the truncated base r: the convolution integrand in u
  // must be split there, a fixed rule across a jump would make the smooth
  // r_n evaluation non-smooth in x.
  std::vector<double> breaks{cut};
  for (const RPiece& p : r_pieces_) {
    if (p.x_left > cut && p.x_left < 0.0) breaks.push_back(p.x_left);
    if (p.x_right > cut && p.x_right < 0.0) breaks.push_back(p.x_right);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  static const Quad1D gl32 = gauss_legendre(32);
  const double mass = bump_mass();

  // Copy an evaluator of the base r so the lambda owns its data.
  MiuraProfile base = *this;
  auto rn = [base, breaks, cut, mass, w](double x) {
    // v(u) = x + w (1 - u); the support [cut, 0) restricts u to [a, b]
    double a = std::max(-1.0, 1.0 + x / w);
    double b = std::min(1.0, 1.0 + (x - cut) / w);
    if (!(a < b)) return 0.0;
    std::vector<double> us{a, b};
    for (double vb : breaks) {
      double ub = 1.0 + (x - vb) / w;
      if (ub > a && ub < b) us.push_back(ub);
    }
    std::sort(us.begin(), us.end());
    double s = 0.0;
    for (size_t seg = 0; seg + 1 < us.size(); ++seg) {
      double mid = 0.5 * (us[seg] + us[seg + 1]);
      double half = 0.5 * (us[seg + 1] - us[seg]);
      if (half <= 0.0) continue;
      for (size_t i = 0; i < gl32.nodes.size(); ++i) {
        double u = mid + half * gl32.nodes[i];
        double v = x + w * (1.0 - u);
        s += half * gl32.weights[i] * bump_raw(u) * base.r(v);
      }
    }
    return s / mass;
  };

  MiuraProfile out;
  out.id_ = id_ + "|mollify(n=" + std::to_string(n) + ")";
  double support = cut - 2.0 * w;
  RPiece tail{RPiece::Kind::constant, -kInf, support, 0.0, 0, {}};
  RPiece body{RPiece::Kind::smooth, support, 0.0, 0.0, 0, rn};
  out.r_pieces_ = {tail, body};
  out.finalize_Q(std::max(128, static_cast<int>(8.0 * n * -support)));
  return out;
}

MiuraProfile MiuraProfile::catalog(const std::string& name,
                                   const std::map<std::string, double>& params) {
  auto get = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end())
      throw config_error("profile '" + name + "' missing parameter '" + key + "'");
    return it->second;
  };
  if (name == "zero") return zero();
  if (name == "delta") return delta(get("c"));
  if (name == "smooth_bump") return smooth_bump(get("a"), get("amplitude"));
  if (name == "positive_box") return positive_box(get("b"), get("a"));
  if (name == "constant_r") return constant_r(get("kappa"));
  if (name == "rough_random")
    return rough_random(static_cast<uint64_t>(get("seed")), get("L"),
                        get("amplitude"));
  throw config_error("unknown profile kind '" + name + "'");
}

}  // namespace hankelkdv

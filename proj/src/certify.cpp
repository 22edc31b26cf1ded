#include "hankelkdv/certify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace hankelkdv {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

double certify_h(const CertifyOptions& opts) {
  return opts.h > 0.0 ? opts.h : std::max(0.75, 1.0 / (24.0 * opts.t));
}

}  // namespace

CheckResult check_reflection_bound(const ReflectionTable& table) {
  CheckResult res;
  res.name = "reflection_bound";
  double worst = 0.0;
  double worst_lambda = 0.0;
  for (size_t j = 0; j < table.values.size(); ++j) {
    double a = std::abs(table.values[j]);
    if (a > worst) {
      worst = a;
      worst_lambda = table.rule.lambda[j];
    }
  }
  res.pass = worst <= 1.0 + 1e-9;
  res.margin = 1.0 + 1e-9 - worst;
  res.detail = "max |R| = " + fmt(worst) + " at lambda = " + fmt(worst_lambda);
  return res;
}

CheckResult check_reflection_symmetry(const MiuraProfile& profile, double h,
                                      int n_nodes, double tol) {
  CheckResult res;
  res.name = "reflection_symmetry";
  double worst = 0.0;
  for (int j = 1; j <= n_nodes; ++j) {
    double lam = 0.15 * j;
    cxd rp = reflection(profile, cxd(lam, h));
    cxd rm = reflection(profile, cxd(-lam, h));
    worst = std::max(worst, std::abs(rm - std::conj(rp)));
  }
  res.pass = worst <= tol;
  res.margin = tol - worst;
  res.detail = "max |R(-conj k) - conj R(k)| = " + fmt(worst);
  return res;
}

CheckResult check_transfer_unimodularity(const MiuraProfile& profile,
                                         uint64_t seed) {
  CheckResult res;
  res.name = "transfer_unimodularity";
  // windows where |det - 1| <= 1e-12 is meaningful: the determinant of a
  // product with entries e^{|w| L} cannot beat eps |entries|^2
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-4.0, 4.0), im(0.05, 2.0),
      xl(0.2, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    cxd z(re(rng), im(rng));
    double left = -xl(rng);
    MeshControl mesh;
    mesh.tol = 1e-11;
    WeylPropagator T = propagate(profile.Q(), z, left, 0.0, mesh);
    worst = std::max(worst, std::abs(T.det() - 1.0));
  }
  res.pass = worst <= 1e-12;
  res.margin = 1e-12 - worst;
  res.detail = "max |det T - 1| = " + fmt(worst);
  return res;
}

CheckResult check_herglotz(const MiuraProfile& profile, int n_samples,
                           uint64_t seed) {
  CheckResult res;
  res.name = "herglotz";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-6.0, 6.0), im(0.05, 3.0);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    cxd z(re(rng), im(rng));
    MValue mv = m_function(profile, z, 1e-8);
    worst = std::min(worst, mv.m.imag());
  }
  res.pass = worst > 0.0;
  res.margin = worst;
  res.detail = "min Im m over " + std::to_string(n_samples) +
               " samples = " + fmt(worst);
  return res;
}

CheckResult check_spectral_radius(const MiuraProfile& profile,
                                  const std::vector<double>& xs,
                                  const std::vector<double>& ts, int workers) {
  CheckResult res;
  res.name = "spectral_radius";
  if (profile.is_zero()) {
    res.pass = true;
    res.margin = 1.0;
    res.detail = "zero operator";
    return res;
  }
  double worst = 0.0;
  double wx = 0, wt = 0;
  for (double t : ts)
    for (double x : xs) {
      SolveOptions opts;
      opts.workers = workers;
      opts.fd_check = false;
      SolutionSample s = q_value(profile, x, t, opts);
      // recover the radius from logdet path: assemble once more
      double h = s.h;
      LambdaRule rule = lambda_rule(t, h, s.n_contour, 0.0);
      OscillatorySymbol sym{cxd(x, 0.0), t, h,
                            TableCache::instance().get_or_build(profile, h, rule)};
      HankelDiscretization disc = build_nystrom(sym, s.n_nystrom, 0.0, workers);
      std::vector<double> sv = singular_values(disc);
      if (!sv.empty() && sv.front() > worst) {
        worst = sv.front();
        wx = x;
        wt = t;
      }
    }
  res.pass = worst < 1.0;
  res.margin = 1.0 - worst;
  res.detail = "max spectral radius = " + fmt(worst) + " at (x,t)=(" + fmt(wx) +
               "," + fmt(wt) + ")";
  return res;
}

CheckResult check_singular_decay(const MiuraProfile& profile, double x,
                                 double t, double h, int workers) {
  CheckResult res;
  res.name = "singular_value_decay";
  LambdaRule rule = lambda_rule(t, h, 512, 0.0);
  OscillatorySymbol sym{cxd(x, 0.0), t, h,
                        TableCache::instance().get_or_build(profile, h, rule)};
  HankelDiscretization disc = build_nystrom(sym, 160, 0.0, workers);
  std::vector<double> sv = singular_values(disc);
  if (sv.empty() || sv.front() <= 0.0) {
    res.pass = true;
    res.margin = 0.0;
    res.detail = "zero operator";
    return res;
  }
  // least squares slope of log s_n vs n above the noise floor
  double floor_abs = std::max(sv.front() * 1e-11, 1e-15);
  std::vector<double> logs;
  for (double s : sv) {
    if (s <= floor_abs) break;
    logs.push_back(std::log(s));
  }
  if (logs.size() < 4) {
    res.pass = false;
    res.detail = "too few singular values above the noise floor";
    return res;
  }
  double n = static_cast<double>(logs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < logs.size(); ++i) {
    sx += i;
    sy += logs[i];
    sxx += static_cast<double>(i) * i;
    sxy += i * logs[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double threshold = -h / 2.0 + 0.1;
  res.pass = slope <= threshold;
  res.margin = threshold - slope;
  res.detail = "slope = " + fmt(slope) + " (threshold " + fmt(threshold) +
               ", " + std::to_string(logs.size()) + " values)";
  return res;
}

CheckResult check_det_consistency(const MiuraProfile& profile,
                                  const std::vector<std::pair<double, double>>& pts,
                                  int workers) {
  CheckResult res;
  res.name = "det_consistency";
  double worst = 0.0;
  for (auto [x, t] : pts) {
    double h = 1.0;
    LambdaRule rule = lambda_rule(t, h, 1024, 0.0);
    auto table = TableCache::instance().get_or_build(profile, h, rule, 1e-11);
    OscillatorySymbol sym{cxd(x, 0.0), t, h, table};

    // grow both discretizations until self-converged
    double det_n = 0.0, prev = 0.0;
    for (int n = 96; n <= 768; n *= 2) {
      HankelDiscretization disc = build_nystrom(sym, n, 0.0, workers);
      det_n = det_iplus_sym(disc.matrix);
      if (n > 96 && std::abs(det_n - prev) < 1e-8 * std::abs(det_n)) break;
      prev = det_n;
    }
    double det_g = 0.0, prev_g = 0.0;
    for (int nb = 24; nb <= 96; nb *= 2) {
      HankelDiscretization disc = build_galerkin(sym, nb, 4096);
      det_g = det_iplus(disc.cmatrix).real();
      if (nb > 24 && std::abs(det_g - prev_g) < 1e-8 * std::abs(det_g)) break;
      prev_g = det_g;
    }
    worst = std::max(worst, std::abs(det_n - det_g) / std::abs(det_n));
  }
  res.pass = worst < 1e-6;
  res.margin = 1e-6 - worst;
  res.detail = "max relative |det_nystrom - det_galerkin| = " + fmt(worst);
  return res;
}

CheckResult check_pole_free(const MiuraProfile& profile, double t, double delta,
                            int n_samples) {
  CheckResult res;
  res.name = "pole_free_domain";
  ParabolicDomain dom{delta, t};
  double off = delta * delta -
               0.25 * std::sqrt(delta * t) * std::log(t / (delta * delta * delta));
  std::vector<cxd> samples;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  while (static_cast<int>(samples.size()) < n_samples) {
    double re = off / delta + 0.05 + 6.0 * ux(rng);
    double im_max = std::sqrt(std::max(0.0, 12.0 * (delta * re - off))) * 0.98;
    cxd z(re, (2.0 * ux(rng) - 1.0) * im_max);
    if (dom.contains(z)) samples.push_back(z);
  }
  PoleFreeReport rep = pole_free_certificate(profile, t, delta, samples);
  double worst = 0.0;
  for (const auto& s : rep.samples) worst = std::max(worst, s.bound);
  res.pass = rep.all_pass();
  res.margin = 1.0 - worst;
  res.detail = "max bound over " + std::to_string(n_samples) +
               " samples = " + fmt(worst) + " at h = " + fmt(rep.h);
  return res;
}

CheckResult check_rule_fallback(const MiuraProfile& profile, double t, double h,
                                int workers) {
  CheckResult res;
  res.name = "hermite_vs_trapezoid";
  LambdaRule rh = lambda_rule(t, h, 768, 0.0, LambdaRule::Kind::hermite);
  LambdaRule rt = lambda_rule(t, h, 1024, 0.0, LambdaRule::Kind::trapezoid);
  auto th = TableCache::instance().get_or_build(profile, h, rh, 1e-11, workers);
  auto tt = TableCache::instance().get_or_build(profile, h, rt, 1e-11, workers);
  OscillatorySymbol sh{cxd(0.0, 0.0), t, h, th};
  OscillatorySymbol st{cxd(0.0, 0.0), t, h, tt};
  double worst = 0.0;
  for (double sigma : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    double a = marchenko_kernel(sh, sigma);
    double b = marchenko_kernel(st, sigma);
    worst = std::max(worst, std::abs(a - b));
  }
  res.pass = worst <= 1e-9;
  res.margin = 1e-9 - worst;
  res.detail = "max kernel difference = " + fmt(worst);
  return res;
}

CertifyReport run_certify(const MiuraProfile& profile, const CertifyOptions& opts) {
  CertifyReport rep;
  double h = certify_h(opts);
  int n_lam = opts.contour_nodes > 0 ? opts.contour_nodes : 512;
  LambdaRule rule = lambda_rule(opts.t, h, n_lam, 0.0);
  auto table =
      TableCache::instance().get_or_build(profile, h, rule, 1e-10, opts.workers);

  rep.items.push_back(check_reflection_bound(*table));
  rep.items.push_back(check_reflection_symmetry(profile, h, 12, 1e-10));
  rep.items.push_back(check_transfer_unimodularity(profile, opts.seed));
  rep.items.push_back(check_herglotz(profile, opts.herglotz_samples, opts.seed));
  rep.items.push_back(check_spectral_radius(
      profile, {-2.0, 0.0, 2.0}, {std::max(0.05, opts.t / 2.0), opts.t},
      opts.workers));
  rep.items.push_back(
      check_singular_decay(profile, 0.0, std::max(opts.t, 0.5), 1.0, opts.workers));
  rep.items.push_back(check_det_consistency(
      profile, {{0.0, 1.0}, {1.0, 0.5}, {-1.0, 1.0}}, opts.workers));
  rep.items.push_back(
      check_pole_free(profile, opts.t, opts.pole_delta, opts.pole_samples));
  if (opts.rule_cross_check)
    rep.items.push_back(check_rule_fallback(profile, opts.t, h, opts.workers));
  return rep;
}

}  // namespace hankelkdv

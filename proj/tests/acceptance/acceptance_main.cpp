// Acceptance suite: every operator-theoretic and cross-solver gate of the
// pipeline, one pass/fail line per criterion, exit 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "hankelkdv/certify.hpp"
#include "hankelkdv/dyson.hpp"
#include "hankelkdv/refsolver.hpp"

using namespace hankelkdv;

namespace {

int failures = 0;
double fd_worst_8_to_10 = 0.0;  // collected for criterion 12

void report(int index, const char* title, bool pass, const std::string& detail,
            double seconds) {
  std::printf("criterion %2d  %s  %-34s %s  (%.1f s)\n", index,
              pass ? "PASS" : "FAIL", title, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

cxd sqrt_upper(cxd z) {
  cxd s = std::sqrt(z);
  if (s.imag() < 0.0) s = -s;
  return s;
}

std::vector<MiuraProfile> catalog_profiles() {
  return {MiuraProfile::delta(1.0), MiuraProfile::smooth_bump(2.0, 0.5),
          MiuraProfile::positive_box(1.0, 1.0), MiuraProfile::constant_r(1.0),
          MiuraProfile::rough_random(7, 8.0, 1.0)};
}

// 1. delta m-function against m(lambda^2) = i lambda - c, rel 1e-8
void criterion_1() {
  Timer timer;
  double worst = 0.0;
  // 50-point grid covering both half planes and the negative reals
  std::vector<cxd> grid;
  for (int i = 0; i < 10; ++i) {
    grid.emplace_back(-5.0 + i, 1.5);
    grid.emplace_back(-4.5 + i, -0.8);
    grid.emplace_back(-0.2 - 0.45 * i, 0.0);
    grid.emplace_back(0.3 + i, 0.05 * (i + 1));
    grid.emplace_back(-2.0 + 0.4 * i, 3.0);
  }
  for (double c : {0.5, 1.0, 2.0}) {
    MiuraProfile p = MiuraProfile::delta(c);
    for (cxd z : grid) {
      cxd expect = cxd(0.0, 1.0) * sqrt_upper(z) - c;
      cxd got = m_function(p, z, 1e-10).m;
      worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e, tol 1e-8", worst);
  report(1, "delta m-function closed form", worst < 1e-8, buf, timer.elapsed());
}

// 2. delta reflection against c/(2ik - c), 1e-8 on a 100-point C+ grid
void criterion_2() {
  Timer timer;
  double worst = 0.0;
  for (double c : {0.5, 1.0, 2.0}) {
    MiuraProfile p = MiuraProfile::delta(c);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        cxd k(-4.5 + i, 0.1 + 0.45 * j);
        cxd expect = c / (cxd(0.0, 2.0) * k - c);
        worst = std::max(worst, std::abs(reflection(p, k, 1e-10) - expect));
      }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max err %.2e, tol 1e-8", worst);
  report(2, "delta reflection closed form", worst < 1e-8, buf, timer.elapsed());
}

// 3. R = 0 gives det(I+H) = 1 and q = 0 exactly
void criterion_3() {
  Timer timer;
  MiuraProfile zero = MiuraProfile::zero();
  SolutionSample s = q_value(zero, 0.4, 0.3);
  LambdaRule rule = lambda_rule(0.3, 1.0, 64);
  OscillatorySymbol sym{cxd(0.4, 0.0), 0.3, 1.0,
                        std::make_shared<ReflectionTable>(
                            build_table(zero, 1.0, rule))};
  double det = det_iplus_sym(build_nystrom(sym, 48).matrix);
  bool pass = s.q == 0.0 && s.logdet == 0.0 && det == 1.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "q = %g, logdet = %g, det = %g", s.q,
                s.logdet, det);
  report(3, "zero-reflection identity", pass, buf, timer.elapsed());
}

// 4. unimodular-bound suite over all catalog profiles
void criterion_4() {
  Timer timer;
  double worst_R = 0.0, worst_sym = 0.0, worst_det = 0.0, min_im_m = 1e18;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> re_z(-4.0, 4.0), im_z(0.05, 2.0),
      xl(0.2, 2.0), re_m(-6.0, 6.0), im_m(0.05, 3.0);
  for (const MiuraProfile& p : catalog_profiles()) {
    // interior reflection bound and conjugate symmetry on a symmetric table
    LambdaRule rule = lambda_rule(0.5, 1.0, 64);
    ReflectionTable table = build_table(p, 1.0, rule, 1e-10);
    size_t n = table.values.size();
    for (size_t j = 0; j < n; ++j) {
      worst_R = std::max(worst_R, std::abs(table.values[j]) - 1.0);
      if (j < n / 2)
        worst_sym = std::max(
            worst_sym,
            std::abs(table.values[j] - std::conj(table.values[n - 1 - j])));
    }
    // transfer matrix unimodularity on moderate windows
    for (int i = 0; i < 20; ++i) {
      cxd z(re_z(rng), im_z(rng));
      WeylPropagator T = propagate(p.Q(), z, -xl(rng), 0.0);
      worst_det = std::max(worst_det, std::abs(T.det() - 1.0));
    }
    // Herglotz property on 100 random z in C+
    for (int i = 0; i < 100; ++i) {
      cxd z(re_m(rng), im_m(rng));
      min_im_m = std::min(min_im_m, m_function(p, z, 1e-8).m.imag());
    }
  }
  bool pass = worst_R <= 1e-9 && worst_sym <= 1e-10 && worst_det <= 1e-12 &&
              min_im_m > 0.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "|R|-1 <= %.1e, sym %.1e, |detT-1| %.1e, min Im m %.1e",
                worst_R, worst_sym, worst_det, min_im_m);
  report(4, "unimodular-bound suite", pass, buf, timer.elapsed());
}

// 5. spectral radius < 1 over [-4,4] x {0.05, 0.1, 0.5, 1}
void criterion_5() {
  Timer timer;
  double worst = 0.0;
  for (const MiuraProfile& p : catalog_profiles()) {
    for (double t : {0.05, 0.1, 0.5, 1.0}) {
      SolveOptions opts;
      opts.fd_check = false;
      std::vector<double> xs = {-4.0, -2.0, 0.0, 2.0, 4.0};
      std::vector<SolutionSample> samples = q_grid(p, xs, t, opts);
      for (size_t i = 0; i < xs.size(); ++i) {
        if (!samples[i].ok)
          throw numerical_error("criterion 5 grid point failed: " +
                                samples[i].error);
        // radius from the converged kernel
        LambdaRule rule = lambda_rule(t, samples[i].h, samples[i].n_contour);
        OscillatorySymbol sym{cxd(xs[i], 0.0), t, samples[i].h,
                              TableCache::instance().get_or_build(p, samples[i].h,
                                                                  rule, 1e-10)};
        HankelDiscretization disc =
            build_nystrom(sym, samples[i].n_nystrom);
        std::vector<double> sv = singular_values(disc);
        worst = std::max(worst, sv.empty() ? 0.0 : sv.front());
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max spectral radius %.6f", worst);
  report(5, "strict contraction", worst < 1.0, buf, timer.elapsed());
}

// 6. singular value slope <= -h/2 + 0.1 at h = 1, delta, x = 0, t = 1
void criterion_6() {
  Timer timer;
  CheckResult res =
      check_singular_decay(MiuraProfile::delta(1.0), 0.0, 1.0, 1.0, 0);
  report(6, "singular-value decay", res.pass, res.detail, timer.elapsed());
}

// 7. Nystrom vs Galerkin determinants, 1e-6 relative at three (x, t)
void criterion_7() {
  Timer timer;
  CheckResult res = check_det_consistency(
      MiuraProfile::delta(1.0), {{0.0, 1.0}, {1.0, 0.5}, {-1.0, 1.0}}, 0);
  report(7, "discretization consistency", res.pass, res.detail,
         timer.elapsed());
}

// 8. determinant solution vs pseudo-spectral reference, sup < 1e-4
void criterion_8() {
  Timer timer;
  MiuraProfile p = MiuraProfile::smooth_bump(2.0, 0.5);
  CompareResult res = compare_with_classical(p, 0.05, -5.0, 5.0, 41, 0);
  // reuse the determinant side's cross-check for criterion 12
  SolveOptions opts;
  opts.q_tol = 1e-8;
  std::vector<SolutionSample> det = q_grid(p, res.xs, 0.05, opts);
  for (const SolutionSample& s : det)
    if (s.ok) fd_worst_8_to_10 = std::max(fd_worst_8_to_10, s.fd_error);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sup discrepancy %.2e, tol 1e-4",
                res.discrepancy);
  report(8, "cross-solver validation", res.discrepancy < 1e-4, buf,
         timer.elapsed());
}

// 9. KdV residual < 1e-4 at 10 sampled (x, t) for the smooth bump
void criterion_9() {
  Timer timer;
  MiuraProfile p = MiuraProfile::smooth_bump(2.0, 0.5);
  double worst = 0.0;
  std::vector<std::pair<double, double>> pts = {
      {-3.0, 0.1}, {-2.0, 0.1}, {-1.0, 0.1}, {0.0, 0.1}, {1.0, 0.1},
      {-2.5, 0.2}, {-1.5, 0.2}, {0.5, 0.2},  {-0.5, 0.15}, {2.0, 0.15}};
  SolveOptions opts;
  for (auto [x, t] : pts) {
    double r = kdv_residual(p, x, t, opts);
    worst = std::max(worst, r);
    // trace-formula vs finite differences at the stencil center
    SolveOptions fd_opts;
    fd_opts.q_tol = 1e-9;
    SolutionSample s = q_value(p, x, t, fd_opts);
    fd_worst_8_to_10 = std::max(fd_worst_8_to_10, s.fd_error);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max residual %.2e, tol 1e-4", worst);
  report(9, "kdv residual", worst < 1e-4, buf, timer.elapsed());
}

// 10. natural-solution convergence of the mollified delta sequence
void criterion_10() {
  Timer timer;
  MiuraProfile p = MiuraProfile::delta(1.0);
  double t = 0.2;
  std::vector<double> xs;
  for (int i = 0; i < 25; ++i) xs.push_back(-3.0 + 0.25 * i);
  SolveOptions opts;
  opts.q_tol = 1e-8;
  std::vector<SolutionSample> base = q_grid(p, xs, t, opts);
  std::vector<double> sups;
  for (int n : {4, 8, 16}) {
    MiuraProfile mol = p.mollify(n);
    std::vector<SolutionSample> approx = q_grid(mol, xs, t, opts);
    double sup = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (!base[i].ok || !approx[i].ok)
        throw numerical_error("criterion 10 grid point failed");
      sup = std::max(sup, std::abs(base[i].q - approx[i].q));
      fd_worst_8_to_10 =
          std::max({fd_worst_8_to_10, base[i].fd_error, approx[i].fd_error});
    }
    sups.push_back(sup);
  }
  bool pass = sups[0] > sups[1] && sups[1] > sups[2];
  char buf[128];
  std::snprintf(buf, sizeof(buf), "sup|q_n - q| = %.3e > %.3e > %.3e", sups[0],
                sups[1], sups[2]);
  report(10, "natural-solution convergence", pass, buf, timer.elapsed());
}

// 11. pole-free certificate in the parabolic domain
void criterion_11() {
  Timer timer;
  double t = 0.5, delta = 1.0;
  ParabolicDomain dom{delta, t};
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  double off = delta * delta -
               0.25 * std::sqrt(delta * t) * std::log(t / (delta * delta * delta));
  std::vector<cxd> samples;
  while (samples.size() < 50) {
    double re = off / delta + 0.05 + 6.0 * ux(rng);
    double im_max = std::sqrt(std::max(0.0, 12.0 * (delta * re - off))) * 0.98;
    cxd z(re, (2.0 * ux(rng) - 1.0) * im_max);
    if (dom.contains(z)) samples.push_back(z);
  }
  PoleFreeReport rep =
      pole_free_certificate(MiuraProfile::delta(1.0), t, delta, samples);
  double worst = 0.0;
  for (const auto& s : rep.samples) worst = std::max(worst, s.bound);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max bound %.4f at h = %.4f over 50 samples",
                worst, rep.h);
  report(11, "pole-free certificate", rep.all_pass(), buf, timer.elapsed());
}

// 12. analytic trace-formula derivative vs logdet finite differences
void criterion_12() {
  Timer timer;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max fd cross-check %.2e, tol 1e-6",
                fd_worst_8_to_10);
  report(12, "derivative cross-check", fd_worst_8_to_10 < 1e-6, buf,
         timer.elapsed());
}

// 13. |xi| identity against the closed Gaussian form
void criterion_13() {
  Timer timer;
  double anchor = xi_abs(0.0, 1.0, cxd(0.0, 0.0), 1.0);
  double anchor_err = std::abs(anchor - std::exp(8.0)) / std::exp(8.0);
  double direct_err =
      std::abs(std::abs(xi(cxd(0.0, 1.0), cxd(0.0, 0.0), 1.0)) - std::exp(8.0)) /
      std::exp(8.0);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lam(-3.0, 3.0), hh(0.2, 2.0),
      zz(-3.0, 3.0), tt(0.05, 2.0);
  double worst = std::max(anchor_err, direct_err);
  for (int i = 0; i < 1000; ++i) {
    double l = lam(rng), h = hh(rng), t = tt(rng);
    cxd z(zz(rng), zz(rng));
    double direct = std::abs(xi(cxd(l, h), z, t));
    double closed = xi_abs(l, h, z, t);
    if (direct > 0.0)
      worst = std::max(worst, std::abs(direct - closed) / closed);
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max rel err %.2e, tol 1e-13", worst);
  report(13, "xi modulus identity", worst < 1e-13, buf, timer.elapsed());
}

}  // namespace

int main() {
  std::printf("acceptance suite (13 criteria)\n");
  std::vector<std::pair<int, void (*)()>> criteria = {
      {1, criterion_1},  {2, criterion_2},   {3, criterion_3},
      {4, criterion_4},  {5, criterion_5},   {6, criterion_6},
      {7, criterion_7},  {8, criterion_8},   {9, criterion_9},
      {10, criterion_10}, {11, criterion_11}, {12, criterion_12},
      {13, criterion_13}};
  for (auto [index, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(index, "(aborted)", false, e.what(), 0.0);
    }
  }
  std::printf("SUMMARY: %d/13 passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}

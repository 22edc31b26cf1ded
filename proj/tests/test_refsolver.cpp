#include <doctest.h>

#include <cmath>

#include "hankelkdv/refsolver.hpp"

using namespace hankelkdv;

TEST_CASE("zero data stays zero") {
  ClassicalOptions opts;
  opts.X = 16.0;
  opts.N = 256;
  opts.dt = 1e-3;
  GridSolution sol = solve_classical([](double) { return 0.0; }, {0.1}, opts);
  double mx = 0.0;
  for (double v : sol.at(0.1)) mx = std::max(mx, std::abs(v));
  CHECK(mx == 0.0);
}

TEST_CASE("one-soliton propagation: u = -2 sech^2(x - 4t)") {
  // substitution into u_t - 6 u u_x + u_xxx shows this is an exact solution;
  // used purely as a solver test
  auto sech2 = [](double v) {
    double c = std::cosh(v);
    return 1.0 / (c * c);
  };
  ClassicalOptions opts;
  opts.X = 20.0;
  opts.N = 1024;
  opts.dt = 2e-4;
  double tf = 0.5;
  GridSolution sol =
      solve_classical([&](double x) { return -2.0 * sech2(x); }, {tf}, opts);
  const std::vector<double>& u = sol.at(tf);
  double err = 0.0;
  for (int i = 0; i < sol.N; ++i) {
    double x = sol.x_of(i);
    err = std::max(err, std::abs(u[i] - (-2.0 * sech2(x - 4.0 * tf))));
  }
  CHECK(err < 1e-6);
  CHECK(sol.mass_drift < 1e-8);
  CHECK(sol.spectral_tail < 1e-10);
  CHECK(sol.boundary_amplitude < 1e-9);
}

TEST_CASE("momentum drift stays at solver accuracy on the soliton run") {
  auto sech2 = [](double v) {
    double c = std::cosh(v);
    return 1.0 / (c * c);
  };
  ClassicalOptions opts;
  opts.X = 20.0;
  opts.N = 1024;
  opts.dt = 2e-4;
  GridSolution sol = solve_classical(
      [&](double x) { return -2.0 * sech2(x); }, {0.0, 0.5}, opts);
  auto momentum = [&](const std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return s * (2.0 * opts.X / opts.N);
  };
  double p0 = momentum(sol.at(0.0)), p1 = momentum(sol.at(0.5));
  CHECK(std::abs(p1 - p0) / p0 < 1e-8);
}

TEST_CASE("temporal convergence order of the time stepper") {
  auto sech2 = [](double v) {
    double c = std::cosh(v);
    return 1.0 / (c * c);
  };
  auto datum = [&](double x) { return -2.0 * sech2(x); };
  double tf = 0.25;
  auto run = [&](double dt) {
    ClassicalOptions opts;
    opts.X = 16.0;
    opts.N = 256;
    opts.dt = dt;
    opts.check_certificates = false;
    return solve_classical(datum, {tf}, opts).at(tf);
  };
  std::vector<double> ua = run(0.02), ub = run(0.01), uc = run(0.005);
  double d1 = 0.0, d2 = 0.0;
  for (size_t i = 0; i < ua.size(); ++i) {
    d1 = std::max(d1, std::abs(ua[i] - ub[i]));
    d2 = std::max(d2, std::abs(ub[i] - uc[i]));
  }
  double order = std::log2(d1 / d2);
  CHECK(order >= 3.5);
}

TEST_CASE("classical datum of the zero profile vanishes") {
  auto q0 = classical_datum(MiuraProfile::zero());
  for (double x : {-2.0, 0.0, 1.0}) CHECK(q0(x) == 0.0);
}

TEST_CASE("classical datum matches r' + r^2 for the bump") {
  MiuraProfile p = MiuraProfile::smooth_bump(2.0, 0.5);
  auto q0 = classical_datum(p);
  // oracle at a point: tight central difference of r plus r^2
  double x = -1.7, d = 1e-6;
  double rp = (p.r(x + d) - p.r(x - d)) / (2.0 * d);
  CHECK(q0(x) == doctest::Approx(rp + p.r(x) * p.r(x)).epsilon(1e-7));
}

TEST_CASE("boundary contamination is reported") {
  // datum too wide for the box trips the a posteriori certificate
  ClassicalOptions opts;
  opts.X = 8.0;
  opts.N = 256;
  opts.dt = 1e-3;
  auto wide = [](double x) { return -0.5 * std::exp(-0.05 * x * x); };
  CHECK_THROWS_AS(solve_classical(wide, {0.2}, opts), numerical_error);
}

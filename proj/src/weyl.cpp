#include "hankelkdv/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hankelkdv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cell {
  cxd cs, sn;  // cos(w l), sin(w l)/w with w^2 = z
  double qbar;
};

Cell make_cell(double len, double qbar, cxd z) {
  cxd w = std::sqrt(z);
  cxd wl = w * len;
  Cell cell;
  cell.qbar = qbar;
  if (std::abs(wl) < 1e-4) {
    // even series in wl: cos and l sinc, branch-free by construction
    cxd wl2 = wl * wl;
    cell.cs = 1.0 - wl2 / 2.0 + wl2 * wl2 / 24.0;
    cell.sn = len * (1.0 - wl2 / 6.0 + wl2 * wl2 / 120.0);
  } else {
    cell.cs = std::cos(wl);
    cell.sn = std::sin(wl) / w;
  }
  // project the cell back onto SL(2): det = cs^2 + z sn^2 = 1 analytically,
  // and the rounding residue would otherwise accumulate over long products.
  // Skip once hyperbolic growth makes the computed det cancellation noise.
  double scale = std::max(std::abs(cell.cs), std::abs(cell.sn) * (1.0 + std::abs(w)));
  if (scale < 1e5) {
    cxd det = cell.cs * cell.cs + z * cell.sn * cell.sn;
    cxd corr = std::sqrt(det);
    cell.cs /= corr;
    cell.sn /= corr;
  }
  return cell;
}

// Enumerate frozen-Q cells over [xl, xr] left to right. Constant pieces
// contribute one exact cell; linear and smooth pieces are split into
// subcells of width ~cell_w with midpoint values.
template <class Emit>
void walk_cells(const NormalizedQ& Q, cxd z, double xl, double xr,
                double cell_w, Emit&& emit) {
  for (const QPiece& p : Q.pieces()) {
    double lo = std::max(xl, p.x_left);
    double hi = std::min(xr, p.x_right);
    if (!(hi > lo)) continue;
    if (p.kind == QPiece::Kind::constant) {
      emit(make_cell(hi - lo, p.value, z));
      continue;
    }
    int nc = std::max(1, static_cast<int>(std::ceil((hi - lo) / cell_w)));
    double len = (hi - lo) / nc;
    for (int i = 0; i < nc; ++i) {
      double mid = lo + (i + 0.5) * len;
      double qb = p.kind == QPiece::Kind::linear
                      ? p.q0 + p.slope * (mid - p.x_ref)
                      : p.fn(mid);
      emit(make_cell(len, qb, z));
    }
  }
}

struct Mat2 {
  cxd a{1.0}, b{0.0}, c{0.0}, d{1.0};
  double log_scale = 0.0;  // accumulated renormalization, entries *= e^{-log_scale}
  cxd det() const { return a * d - b * c; }
  void apply(const Cell& cell, cxd z) {
    // T_cell = cs Id + sn A(qbar), A = [[q,1],[-z-q^2,-q]]
    cxd ta = cell.cs + cell.sn * cell.qbar;
    cxd tb = cell.sn;
    cxd tc = -cell.sn * (z + cell.qbar * cell.qbar);
    cxd td = cell.cs - cell.sn * cell.qbar;
    cxd na = ta * a + tb * c, nb = ta * b + tb * d;
    cxd nc = tc * a + td * c, nd = tc * b + td * d;
    a = na; b = nb; c = nc; d = nd;
    double m = std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    if (!std::isfinite(m))
      throw numerical_error("transfer matrix degenerated (non-finite entries)");
    if (m > 1e120) {
      a /= m; b /= m; c /= m; d /= m;
      log_scale += std::log(m);
    }
    // Project the running product back onto det = 1 after each multiply
    // (a scalar rescaling, so the Moebius geometry is untouched). This stops
    // the rounding random walk of the product determinant. Once entries are
    // large the computed det is pure cancellation noise, so the projection
    // and its drift monitor only run while it is trustworthy.
    if (log_scale == 0.0 && m < 1e6) {
      cxd det = a * d - b * c;
      if (std::abs(det - 1.0) > 1e-6 * std::max(1.0, m * m))
        throw numerical_error("transfer matrix non-unimodular beyond tolerance");
      cxd corr = std::sqrt(det);
      a /= corr; b /= corr; c /= corr; d /= corr;
    }
  }
};

Mat2 product_over(const NormalizedQ& Q, cxd z, double xl, double xr,
                  double cell_w) {
  Mat2 T;
  walk_cells(Q, z, xl, xr, cell_w, [&](const Cell& cell) { T.apply(cell, z); });
  return T;
}

double rel_diff(const Mat2& A, const Mat2& B) {
  double scale = std::max({std::abs(A.a), std::abs(A.b), std::abs(A.c),
                           std::abs(A.d), 1e-300});
  if (A.log_scale != B.log_scale) return 1.0;
  return std::max({std::abs(A.a - B.a), std::abs(A.b - B.b),
                   std::abs(A.c - B.c), std::abs(A.d - B.d)}) / scale;
}

bool all_constant_within(const NormalizedQ& Q, double xl, double xr) {
  for (const QPiece& p : Q.pieces()) {
    double lo = std::max(xl, p.x_left), hi = std::min(xr, p.x_right);
    if (hi > lo && p.kind != QPiece::Kind::constant) return false;
  }
  return true;
}

cxd sqrt_upper(cxd z) {
  cxd s = std::sqrt(z);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  return s;
}

struct State {
  cxd y, dy;
  void apply(const Cell& cell, cxd z) {
    cxd ta = cell.cs + cell.sn * cell.qbar;
    cxd tb = cell.sn;
    cxd tc = -cell.sn * (z + cell.qbar * cell.qbar);
    cxd td = cell.cs - cell.sn * cell.qbar;
    cxd ny = ta * y + tb * dy;
    cxd nd = tc * y + td * dy;
    y = ny; dy = nd;
    double m = std::max(std::abs(y), std::abs(dy));
    if (m > 1e120) { y /= m; dy /= m; }
  }
};

cxd ratio_m(const NormalizedQ& Q, cxd z, double xl, State y0, double cell_w) {
  State s = y0;
  walk_cells(Q, z, xl, 0.0, cell_w, [&](const Cell& cell) { s.apply(cell, z); });
  if (std::abs(s.y) == 0.0)
    throw numerical_error("m_function: psi(0) vanished");
  return -s.dy / s.y;
}

// Richardson-extrapolated m over halved frozen-Q meshes. The midpoint
// scheme has an even-power error expansion, so (4 m_{l/2} - m_l)/3 removes
// the leading term; two consecutive extrapolants agreeing is the stop rule.
cxd refined_m(const NormalizedQ& Q, cxd z, double xl, const State& y0,
              double tol, double base_cell, int max_levels, double* err_out) {
  if (all_constant_within(Q, xl, 0.0)) {
    if (err_out) *err_out = 0.0;
    return ratio_m(Q, z, xl, y0, 1.0);
  }
  double cw = base_cell;
  cxd m_prev = ratio_m(Q, z, xl, y0, cw);
  cxd extrap_prev{0.0};
  bool have_extrap = false;
  for (int level = 1; level <= max_levels; ++level) {
    cw *= 0.5;
    cxd m_cur = ratio_m(Q, z, xl, y0, cw);
    cxd extrap = (4.0 * m_cur - m_prev) / 3.0;
    if (have_extrap) {
      double err = std::abs(extrap - extrap_prev);
      if (err <= tol * std::max(1.0, std::abs(extrap))) {
        if (err_out) *err_out = err;
        return extrap;
      }
    }
    extrap_prev = extrap;
    have_extrap = true;
    m_prev = m_cur;
  }
  throw numerical_error("m_function: mesh refinement did not converge");
}

// Disk radius and center extracted at two mesh levels and Richardson
// extrapolated as scalars (entrywise extrapolation would fight the
// renormalization thresholds). Both are scale invariant.
WeylDisk disk_from(const Mat2& T, double L);

WeylDisk refined_disk(const NormalizedQ& Q, cxd z, double L, double rel_tol,
                      int max_levels) {
  double cw = 0.03125;
  WeylDisk d1 = disk_from(product_over(Q, z, -L, 0.0, cw), L);
  if (all_constant_within(Q, -L, 0.0)) return d1;
  for (int level = 0; level < max_levels; ++level) {
    cw *= 0.5;
    WeylDisk d2 = disk_from(product_over(Q, z, -L, 0.0, cw), L);
    if (d1.half_plane || d2.half_plane) {
      d1 = d2;
      continue;
    }
    double dr = std::abs(d2.radius - d1.radius);
    double dc = std::abs(d2.center - d1.center);
    double scale = std::max({d2.radius, std::abs(d2.center), 1e-300});
    if (std::max(dr, dc) <= rel_tol * scale) {
      d2.radius = std::max(0.0, (4.0 * d2.radius - d1.radius) / 3.0);
      d2.center = (4.0 * d2.center - d1.center) / 3.0;
      return d2;
    }
    d1 = d2;
  }
  throw numerical_error("weyl_disk: mesh refinement did not converge");
}

WeylDisk disk_from(const Mat2& T, double L) {
  WeylDisk disk;
  disk.L = L;
  cxd ab = T.a * std::conj(T.b);
  double denom = 2.0 * std::abs(ab.imag());
  double scale = std::abs(T.a) * std::abs(T.b);
  if (denom <= 1e-14 * std::max(scale, 1e-300)) {
    disk.half_plane = true;
    disk.radius = kInf;
    disk.center = cxd(0.0, 0.0);
    return disk;
  }
  disk.center = (T.d * std::conj(T.a) - T.c * std::conj(T.b)) /
                (2.0 * cxd(0.0, 1.0) * ab.imag());
  // radius with the determinant taken analytically: det T_true = 1, so the
  // stored product has det e^{-2 log_scale}; the computed det would be
  // cancellation noise for large entries
  double log_r = -2.0 * T.log_scale - std::log(denom);
  disk.radius = log_r < -700.0 ? 0.0 : std::exp(log_r);
  return disk;
}

}  // namespace

WeylPropagator propagate(const NormalizedQ& Q, cxd z, double x_left,
                         double x_right, const MeshControl& mesh) {
  if (!(x_left < x_right) || x_right > 0.0)
    throw config_error("propagate requires x_left < x_right <= 0");
  double cw = mesh.base_cell;
  Mat2 T = product_over(Q, z, x_left, x_right, cw);
  if (!all_constant_within(Q, x_left, x_right)) {
    bool ok = false;
    for (int level = 0; level < mesh.max_levels; ++level) {
      cw *= 0.5;
      Mat2 T2 = product_over(Q, z, x_left, x_right, cw);
      double err = rel_diff(T, T2) / 3.0;  // second-order halving estimate
      T = T2;
      if (err <= mesh.tol) { ok = true; break; }
    }
    if (!ok) throw numerical_error("propagate: mesh too coarse for tolerance");
  }
  if (T.log_scale != 0.0)
    throw numerical_error("propagate: transfer matrix overflow");
  WeylPropagator out;
  out.a = T.a; out.b = T.b; out.c = T.c; out.d = T.d;
  out.x_left = x_left;
  out.x_right = x_right;
  out.z = z;
  return out;
}

WeylDisk weyl_disk(const MiuraProfile& profile, cxd z, double L,
                   const MeshControl& mesh) {
  if (!(z.imag() > 0.0)) throw config_error("weyl_disk requires Im z > 0");
  if (!(L > 0.0)) throw config_error("weyl_disk requires L > 0");
  // degenerate products are caught by the per-multiply drift monitor
  return refined_disk(profile.Q(), z, L, std::max(mesh.tol, 1e-11),
                      mesh.max_levels);
}

MValue m_function(const MiuraProfile& profile, cxd z, double tol) {
  if (z.imag() == 0.0 && z.real() >= 0.0)
    throw config_error("m_function: z on the spectral cut [0, inf)");
  if (!(tol > 0.0)) throw config_error("m_function: tol must be positive");
  if (z.imag() < 0.0) {
    MValue mv = m_function(profile, std::conj(z), tol);
    return MValue{z, std::conj(mv.m), mv.mode, mv.disk_radius_bound};
  }
  const NormalizedQ& Q = profile.Q();
  MValue out;
  out.z = z;
  if (Q.tail_value()) {
    double qt = *Q.tail_value();
    double x0 = Q.support_left();
    State y0{cxd(1.0, 0.0), -cxd(0.0, 1.0) * sqrt_upper(z) - qt};
    out.mode = MMode::exact_tail;
    if (x0 >= 0.0) {
      out.m = -y0.dy / y0.y;
      out.disk_radius_bound = 0.0;
      return out;
    }
    double err = 0.0;
    out.m = refined_m(Q, z, x0, y0, tol * 0.1, 0.03125, 16, &err);
    out.disk_radius_bound = err;
    return out;
  }

  // Truncated problem with Dirichlet shooting; L grows geometrically until
  // the Weyl disk (or the value itself, on the real axis) stabilizes.
  out.mode = MMode::disk;
  const double L_max = 1e4;
  State y0{cxd(0.0, 0.0), cxd(1.0, 0.0)};
  cxd m_prev{0.0};
  bool have_prev = false;
  int stagnant = 0;
  for (double L = 4.0; L <= L_max; L *= 2.0) {
    double err = 0.0;
    cxd mL = refined_m(Q, z, -L, y0, tol * 0.1, 0.03125, 16, &err);
    if (z.imag() > 0.0) {
      WeylDisk disk = refined_disk(Q, z, L, 1e-2, 16);
      if (!disk.half_plane && 2.0 * disk.radius < tol) {
        out.m = mL;
        out.disk_radius_bound = 2.0 * disk.radius;
        return out;
      }
    } else if (have_prev && std::abs(mL - m_prev) <
                                0.5 * tol * std::max(1.0, std::abs(mL))) {
      if (++stagnant >= 2) {
        out.m = mL;
        out.disk_radius_bound = std::abs(mL - m_prev);
        return out;
      }
    } else {
      stagnant = 0;
    }
    m_prev = mL;
    have_prev = true;
  }
  throw numerical_error("m_function: Weyl disk radius did not reach tol before L_max");
}

}  // namespace hankelkdv

#pragma once

#include "hankelkdv/common.hpp"
#include "hankelkdv/profiles.hpp"

namespace hankelkdv {

// Transfer matrix of the quasi-derivative system Y' = A(Q, z) Y,
// A = [[Q, 1], [-z - Q^2, -Q]], acting on Y = (y, Dy), Dy = y' - Q y.
// tr A = 0, so det T = 1.
struct WeylPropagator {
  cxd a{1.0}, b{0.0}, c{0.0}, d{1.0};
  double x_left = 0.0, x_right = 0.0;
  cxd z{0.0};
  cxd det() const { return a * d - b * c; }
};

struct MeshControl {
  double tol = 1e-10;        // relative accuracy target, certified by halving
  double base_cell = 0.03125;  // initial cell width on non-constant pieces
  int max_levels = 14;
};

// Exact piecewise product of frozen-coefficient cells. On each cell Q is
// frozen to its midpoint value; A(Qbar, z)^2 = -z Id makes the cell
// propagator exp(l A) = cos(w l) Id + (sin(w l)/w) A with w^2 = z, an even
// function of w, so no square-root branch enters here. Constant-Q pieces
// are a single exact cell; other pieces are refined until two consecutive
// mesh levels agree to mesh.tol.
WeylPropagator propagate(const NormalizedQ& Q, cxd z, double x_left,
                         double x_right, const MeshControl& mesh = {});

struct WeylDisk {
  cxd center{0.0};
  double radius = 0.0;
  double L = 0.0;
  bool half_plane = false;  // T ~ identity: image degenerates to a half plane
};

// Image of the boundary-condition family at -L under the linear fractional
// action of the transfer matrix; requires Im z > 0.
WeylDisk weyl_disk(const MiuraProfile& profile, cxd z, double L,
                   const MeshControl& mesh = {});

enum class MMode { exact_tail, disk };

struct MValue {
  cxd z{0.0};
  cxd m{0.0};
  MMode mode = MMode::exact_tail;
  double disk_radius_bound = 0.0;  // rigorous/empirical truncation bound
};

// Titchmarsh-Weyl m-function of the half-line problem on (-inf, 0),
// m(z) = -Dpsi(0, z)/psi(0, z) for the solution decaying at -inf.
// Profiles with a constant-Q tail are initialized exactly on the tail
// eigendirection Y = (1, -i sqrt(z) - Q_tail), Im sqrt(z) > 0; otherwise
// Dirichlet shooting y(-L) = 0, Dy(-L) = 1 with L grown geometrically
// until the Weyl disk certifies the truncation. Values in the lower half
// plane use m(conj z) = conj m(z).
MValue m_function(const MiuraProfile& profile, cxd z, double tol = 1e-10);

}  // namespace hankelkdv

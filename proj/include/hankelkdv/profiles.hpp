#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hankelkdv/common.hpp"
#include "hankelkdv/quadrature.hpp"

namespace hankelkdv {

// r(x) on the negative half line, r = 0 on x > 0. Pieces are ordered left
// to right and cover (-inf, 0]; the leftmost piece may be unbounded.
struct RPiece {
  enum class Kind { constant, delta_rational, smooth };
  Kind kind = Kind::constant;
  double x_left = 0.0;   // -inf allowed
  double x_right = 0.0;
  double value = 0.0;                      // constant: r = value
  double c = 0.0;                          // delta_rational: r = -c/(1 - c x)
  std::function<double(double)> fn;        // smooth
};

// The normalized antiderivative: Q = 0 on [0, inf), and on x < 0
//   Q(x) = r(x) - integral_x^0 r(s)^2 ds,
// so that dQ/dx = q = r' + r^2 in the sense of distributions. Piecewise
// constant/linear pieces are evaluated in closed form.
struct QPiece {
  enum class Kind { constant, linear, smooth };
  Kind kind = Kind::constant;
  double x_left = 0.0;
  double x_right = 0.0;
  double value = 0.0;                      // constant
  double q0 = 0.0, slope = 0.0, x_ref = 0.0;  // linear: q0 + slope (x - x_ref)
  std::function<double(double)> fn;        // smooth
};

class NormalizedQ {
 public:
  NormalizedQ() = default;
  explicit NormalizedQ(std::vector<QPiece> pieces);

  double eval(double x) const;
  const std::vector<QPiece>& pieces() const { return pieces_; }
  // Value on the constant unbounded tail, absent when the leftmost piece
  // is not constant (then only the truncated Weyl-disk mode applies).
  std::optional<double> tail_value() const { return tail_value_; }
  // Right edge of the unbounded tail piece (0 when there is no interior
  // structure at all, -inf when the tail is not constant).
  double support_left() const { return support_left_; }

 private:
  std::vector<QPiece> pieces_;
  std::optional<double> tail_value_;
  double support_left_ = 0.0;
};

struct ClosedForms {
  std::function<cxd(cxd)> m;   // m(z)
  std::function<cxd(cxd)> R;   // R(k)
};

class MiuraProfile {
 public:
  static MiuraProfile zero();
  static MiuraProfile delta(double c);
  static MiuraProfile smooth_bump(double a, double amplitude);
  static MiuraProfile positive_box(double b, double a);
  static MiuraProfile constant_r(double kappa);
  static MiuraProfile rough_random(uint64_t seed, double L, double amplitude);
  // Named entry point used by config files: kind + params (+ seed).
  static MiuraProfile catalog(const std::string& name,
                              const std::map<std::string, double>& params);

  double r(double x) const;
  double evaluate_Q(double x) const { return Q_.eval(x); }
  const NormalizedQ& Q() const { return Q_; }
  const std::vector<RPiece>& r_pieces() const { return r_pieces_; }

  // Smooth compactly supported approximation: r truncated at x = -n,
  // shifted left by 1/n and convolved with a C-infinity bump of width 1/n,
  // so the support stays inside the negative half line.
  MiuraProfile mollify(int n) const;

  const std::string& id() const { return id_; }
  const std::optional<ClosedForms>& closed_forms() const { return closed_; }
  bool is_zero() const;

 private:
  MiuraProfile() = default;
  void finalize_Q(int panels_hint);

  std::vector<RPiece> r_pieces_;
  NormalizedQ Q_;
  std::string id_;
  std::optional<ClosedForms> closed_;
  std::shared_ptr<const CumulativeIntegral> r2_integral_;  // keeps smooth Q alive
};

}  // namespace hankelkdv

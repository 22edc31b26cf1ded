#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "hankelkdv/quadrature.hpp"
#include "hankelkdv/weyl.hpp"

namespace hankelkdv {

// Right reflection coefficient R(k) = (ik - m(k^2)) / (ik + m(k^2)).
// Interior evaluation (Im k > 0) is the production path; real nonzero k is
// admitted as a limit from above for diagnostics only. A bound check
// |R| <= 1 + 10 tol guards the Herglotz plumbing underneath.
cxd reflection(const MiuraProfile& profile, cxd k, double tol = 1e-10);

// Cached samples of R on the shifted contour R + ih.
struct ReflectionTable {
  double h = 1.0;
  LambdaRule rule;
  std::vector<cxd> values;  // R(lambda_j + ih)
  std::string profile_id;

  // Text layout: header keys, then one "lambda weight ReR ImR" row per node,
  // all in full precision.
  void dump(const std::string& path) const;
  static ReflectionTable load(const std::string& path);
};

ReflectionTable build_table(const MiuraProfile& profile, double h,
                            const LambdaRule& rule, double tol = 1e-10,
                            int workers = 0);

// Insert-once cache keyed by (profile id, h, rule hash, tol). Sweeping x at
// fixed (t, h) reuses one table; the m-function evaluations dominate cost.
class TableCache {
 public:
  static TableCache& instance();
  std::shared_ptr<const ReflectionTable> get_or_build(
      const MiuraProfile& profile, double h, const LambdaRule& rule,
      double tol = 1e-10, int workers = 0);
  void clear();
  size_t size();

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const ReflectionTable>> map_;
};

}  // namespace hankelkdv

#pragma once

#include <string>
#include <vector>

#include "hankelkdv/dyson.hpp"

namespace hankelkdv {

struct CheckResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;   // distance to the failure threshold, sign-positive
  std::string detail;
};

struct CertifyOptions {
  double t = 0.5;
  double h = 0.0;            // 0: automatic
  int contour_nodes = 0;
  int herglotz_samples = 100;
  uint64_t seed = 12345;
  int workers = 0;
  bool rule_cross_check = true;
  double pole_delta = 1.0;
  int pole_samples = 50;
};

struct CertifyReport {
  std::vector<CheckResult> items;
  bool all_pass() const {
    for (const auto& c : items)
      if (!c.pass) return false;
    return true;
  }
};

// Individual invariant checks; each is independently unit-testable and the
// table-based ones accept injected fixtures.
CheckResult check_reflection_bound(const ReflectionTable& table);
CheckResult check_reflection_symmetry(const MiuraProfile& profile, double h,
                                      int n_nodes, double tol);
CheckResult check_transfer_unimodularity(const MiuraProfile& profile,
                                         uint64_t seed);
CheckResult check_herglotz(const MiuraProfile& profile, int n_samples,
                           uint64_t seed);
CheckResult check_spectral_radius(const MiuraProfile& profile,
                                  const std::vector<double>& xs,
                                  const std::vector<double>& ts, int workers);
CheckResult check_singular_decay(const MiuraProfile& profile, double x,
                                 double t, double h, int workers);
CheckResult check_det_consistency(const MiuraProfile& profile,
                                  const std::vector<std::pair<double, double>>& pts,
                                  int workers);
CheckResult check_pole_free(const MiuraProfile& profile, double t, double delta,
                            int n_samples);
CheckResult check_rule_fallback(const MiuraProfile& profile, double t, double h,
                                int workers);

CertifyReport run_certify(const MiuraProfile& profile,
                          const CertifyOptions& opts = {});

}  // namespace hankelkdv

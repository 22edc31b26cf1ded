#include "hankelkdv/scattering.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hankelkdv {

cxd reflection(const MiuraProfile& profile, cxd k, double tol) {
  if (!(k.imag() > 0.0) && !(k.imag() == 0.0 && k.real() != 0.0))
    throw config_error("reflection requires Im k > 0 or real nonzero k");
  cxd z = k * k;
  if (k.imag() == 0.0) {
    // boundary value as a limit from above (diagnostics only)
    z += cxd(0.0, 1e-9 * std::max(1.0, std::abs(z)));
  }
  MValue mv = m_function(profile, z, tol);
  cxd ik = cxd(0.0, 1.0) * k;
  cxd R = (ik - mv.m) / (ik + mv.m);
  if (!(std::abs(R) <= 1.0 + 10.0 * tol))
    throw numerical_error("reflection: |R| exceeded 1 beyond tolerance at k=(" +
                          std::to_string(k.real()) + "," +
                          std::to_string(k.imag()) + ")");
  return R;
}

ReflectionTable build_table(const MiuraProfile& profile, double h,
                            const LambdaRule& rule, double tol, int workers) {
  if (!(h > 0.0)) throw config_error("build_table requires h > 0");
  ReflectionTable table;
  table.h = h;
  table.rule = rule;
  table.profile_id = profile.id();
  table.values.resize(rule.lambda.size());
  const bool trivially_zero = profile.is_zero();
  parallel_for(
      static_cast<int>(rule.lambda.size()),
      [&](int j) {
        if (trivially_zero) {
          table.values[j] = cxd(0.0, 0.0);
          return;
        }
        cxd k(rule.lambda[j], h);
        try {
          table.values[j] = reflection(profile, k, tol);
        } catch (const std::exception& e) {
          throw numerical_error("build_table: node lambda=" +
                                std::to_string(rule.lambda[j]) +
                                " failed: " + e.what());
        }
      },
      workers);
  return table;
}

void ReflectionTable::dump(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw config_error("cannot open '" + path + "' for writing");
  std::fprintf(f, "# hankelkdv reflection table v1\n");
  std::fprintf(f, "profile %s\n", profile_id.c_str());
  std::fprintf(f, "h %.17g\n", h);
  std::fprintf(f, "t %.17g\n", rule.t);
  std::fprintf(f, "im_z %.17g\n", rule.im_z);
  std::fprintf(f, "kind %s\n",
               rule.kind == LambdaRule::Kind::hermite ? "hermite" : "trapezoid");
  std::fprintf(f, "n_requested %d\n", rule.n_requested);
  std::fprintf(f, "count %zu\n", values.size());
  for (size_t j = 0; j < values.size(); ++j)
    std::fprintf(f, "%.17g %.17g %.17g %.17g\n", rule.lambda[j], rule.weight[j],
                 values[j].real(), values[j].imag());
  std::fclose(f);
}

ReflectionTable ReflectionTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  ReflectionTable table;
  std::string line;
  size_t count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "profile") {
      ss >> table.profile_id;
    } else if (key == "h") {
      ss >> table.h;
      table.rule.h = table.h;
    } else if (key == "t") {
      ss >> table.rule.t;
    } else if (key == "im_z") {
      ss >> table.rule.im_z;
    } else if (key == "kind") {
      std::string k;
      ss >> k;
      table.rule.kind =
          k == "trapezoid" ? LambdaRule::Kind::trapezoid : LambdaRule::Kind::hermite;
    } else if (key == "n_requested") {
      ss >> table.rule.n_requested;
    } else if (key == "count") {
      ss >> count;
    } else {
      // data row
      std::istringstream row(line);
      double lam, w, re, im;
      if (!(row >> lam >> w >> re >> im))
        throw config_error("malformed table row: " + line);
      table.rule.lambda.push_back(lam);
      table.rule.weight.push_back(w);
      table.values.emplace_back(re, im);
    }
  }
  if (count != table.values.size())
    throw config_error("reflection table row count mismatch");
  return table;
}

TableCache& TableCache::instance() {
  static TableCache cache;
  return cache;
}

std::shared_ptr<const ReflectionTable> TableCache::get_or_build(
    const MiuraProfile& profile, double h, const LambdaRule& rule, double tol,
    int workers) {
  char keybuf[128];
  std::snprintf(keybuf, sizeof(keybuf), "|h=%.17g|rule=%" PRIx64 "|tol=%.3g", h,
                rule.hash(), tol);
  std::string key = profile.id() + keybuf;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) return it->second;
  auto table = std::make_shared<ReflectionTable>(
      build_table(profile, h, rule, tol, workers));
  map_.emplace(key, table);
  return table;
}

void TableCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  map_.clear();
}

size_t TableCache::size() {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

}  // namespace hankelkdv

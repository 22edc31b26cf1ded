#include "hankelkdv/runconfig.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

namespace hankelkdv {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& scope,
                    const std::vector<std::string>& allowed) {
  if (!j.is_object())
    throw config_error("config: '" + scope + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw config_error("config: unknown key '" + scope + "." + it.key() + "'");
  }
}

double get_num(const json& j, const std::string& scope, const char* key,
               double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required)
      throw config_error("config: missing key '" + scope + "." + key + "'");
    return fallback;
  }
  if (!j[key].is_number())
    throw config_error("config: '" + scope + "." + key + "' must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& scope, const char* key,
            int fallback) {
  double v = get_num(j, scope, key, fallback);
  if (v != std::floor(v))
    throw config_error("config: '" + scope + "." + key + "' must be an integer");
  return static_cast<int>(v);
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw config_error("config: " + what + " must be positive");
}

}  // namespace

MiuraProfile RunConfig::make_profile() const {
  return MiuraProfile::catalog(profile_kind, profile_params);
}

std::vector<double> RunConfig::x_grid() const {
  std::vector<double> xs;
  if (x_count == 1) {
    xs.push_back(x_min);
    return xs;
  }
  for (int i = 0; i < x_count; ++i)
    xs.push_back(x_min + (x_max - x_min) * i / (x_count - 1));
  return xs;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw config_error(std::string("config: JSON parse failure: ") + e.what());
  }
  reject_unknown(j, "",
                 {"profile", "t", "x_grid", "h", "quadrature", "tolerances",
                  "output", "reflection", "certify", "validate", "workers"});
  RunConfig cfg;

  if (j.contains("profile")) {
    const json& p = j["profile"];
    reject_unknown(p, "profile", {"kind", "params", "seed"});
    if (!p.contains("kind") || !p["kind"].is_string())
      throw config_error("config: profile.kind must be a string");
    cfg.profile_kind = p["kind"].get<std::string>();
    if (p.contains("params")) {
      if (!p["params"].is_object())
        throw config_error("config: profile.params must be an object");
      for (auto it = p["params"].begin(); it != p["params"].end(); ++it) {
        if (!it.value().is_number())
          throw config_error("config: profile.params." + it.key() +
                             " must be a number");
        cfg.profile_params[it.key()] = it.value().get<double>();
      }
    }
    if (p.contains("seed")) {
      if (!p["seed"].is_number())
        throw config_error("config: profile.seed must be a number");
      cfg.profile_params["seed"] = p["seed"].get<double>();
    }
  }

  if (j.contains("t")) {
    cfg.t_values.clear();
    if (j["t"].is_number()) {
      cfg.t_values.push_back(j["t"].get<double>());
    } else if (j["t"].is_array()) {
      for (const auto& v : j["t"]) {
        if (!v.is_number()) throw config_error("config: t entries must be numbers");
        cfg.t_values.push_back(v.get<double>());
      }
    } else {
      throw config_error("config: t must be a number or an array");
    }
    for (double t : cfg.t_values) require_positive(t, "t");
  }

  if (j.contains("x_grid")) {
    const json& g = j["x_grid"];
    reject_unknown(g, "x_grid", {"min", "max", "count"});
    cfg.x_min = get_num(g, "x_grid", "min", cfg.x_min);
    cfg.x_max = get_num(g, "x_grid", "max", cfg.x_max);
    cfg.x_count = get_int(g, "x_grid", "count", cfg.x_count);
    if (cfg.x_count < 1) throw config_error("config: x_grid.count must be >= 1");
    if (!(cfg.x_min <= cfg.x_max))
      throw config_error("config: x_grid.min must be <= x_grid.max");
  }

  if (j.contains("h")) {
    if (j["h"].is_string()) {
      if (j["h"].get<std::string>() != "auto")
        throw config_error("config: h must be a positive number or \"auto\"");
      cfg.h = 0.0;
    } else if (j["h"].is_number()) {
      cfg.h = j["h"].get<double>();
      require_positive(cfg.h, "h");
    } else {
      throw config_error("config: h must be a positive number or \"auto\"");
    }
  }

  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    reject_unknown(q, "quadrature",
                   {"contour_nodes", "nystrom_nodes", "galerkin_size"});
    cfg.contour_nodes = get_int(q, "quadrature", "contour_nodes", 0);
    cfg.nystrom_nodes = get_int(q, "quadrature", "nystrom_nodes", 0);
    cfg.galerkin_size = get_int(q, "quadrature", "galerkin_size", 48);
    if (cfg.contour_nodes < 0 || cfg.nystrom_nodes < 0 || cfg.galerkin_size < 1)
      throw config_error("config: quadrature sizes must be nonnegative");
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    reject_unknown(t, "tolerances", {"m_tol", "q_tol", "reflection_tol"});
    cfg.m_tol = get_num(t, "tolerances", "m_tol", cfg.m_tol);
    cfg.q_tol = get_num(t, "tolerances", "q_tol", cfg.q_tol);
    cfg.reflection_tol = get_num(t, "tolerances", "reflection_tol", cfg.reflection_tol);
    require_positive(cfg.m_tol, "tolerances.m_tol");
    require_positive(cfg.q_tol, "tolerances.q_tol");
    require_positive(cfg.reflection_tol, "tolerances.reflection_tol");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, "output", {"path", "format", "gnuplot"});
    if (o.contains("path")) cfg.out_path = o["path"].get<std::string>();
    if (o.contains("format")) {
      cfg.format = o["format"].get<std::string>();
      if (cfg.format != "csv" && cfg.format != "json")
        throw config_error("config: output.format must be csv or json");
    }
    if (o.contains("gnuplot")) {
      if (!o["gnuplot"].is_boolean())
        throw config_error("config: output.gnuplot must be a boolean");
      cfg.gnuplot = o["gnuplot"].get<bool>();
    }
  }

  if (j.contains("reflection")) {
    const json& r = j["reflection"];
    reject_unknown(r, "reflection", {"h", "lambda_max", "nodes"});
    cfg.reflection_h = get_num(r, "reflection", "h", cfg.reflection_h);
    cfg.reflection_lambda_max =
        get_num(r, "reflection", "lambda_max", cfg.reflection_lambda_max);
    cfg.reflection_nodes = get_int(r, "reflection", "nodes", cfg.reflection_nodes);
    require_positive(cfg.reflection_h, "reflection.h");
    require_positive(cfg.reflection_lambda_max, "reflection.lambda_max");
    if (cfg.reflection_nodes < 1)
      throw config_error("config: reflection.nodes must be >= 1");
  }

  if (j.contains("certify")) {
    const json& c = j["certify"];
    reject_unknown(c, "certify", {"delta", "pole_samples"});
    cfg.delta = get_num(c, "certify", "delta", cfg.delta);
    cfg.pole_samples = get_int(c, "certify", "pole_samples", cfg.pole_samples);
    require_positive(cfg.delta, "certify.delta");
    if (cfg.pole_samples < 1)
      throw config_error("config: certify.pole_samples must be >= 1");
  }

  if (j.contains("validate")) {
    const json& v = j["validate"];
    reject_unknown(v, "validate", {"mollify_ns", "window", "points"});
    if (v.contains("mollify_ns")) {
      cfg.mollify_ns.clear();
      for (const auto& n : v["mollify_ns"]) {
        if (!n.is_number_integer() || n.get<int>() < 1)
          throw config_error("config: validate.mollify_ns entries must be positive integers");
        cfg.mollify_ns.push_back(n.get<int>());
      }
    }
    if (v.contains("window")) {
      const json& w = v["window"];
      if (!w.is_array() || w.size() != 2)
        throw config_error("config: validate.window must be [lo, hi]");
      cfg.window_lo = w[0].get<double>();
      cfg.window_hi = w[1].get<double>();
      if (!(cfg.window_lo < cfg.window_hi))
        throw config_error("config: validate.window must satisfy lo < hi");
    }
    cfg.window_points = get_int(v, "validate", "points", cfg.window_points);
    if (cfg.window_points < 2)
      throw config_error("config: validate.points must be >= 2");
  }

  if (j.contains("workers")) {
    cfg.workers = get_int(j, "", "workers", 0);
    if (cfg.workers < 0) throw config_error("config: workers must be >= 0");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void OutputTable::add_row(const std::vector<std::string>& row) {
  if (row.size() != columns.size())
    throw config_error("output row width mismatch");
  rows.push_back(row);
}

void OutputTable::write_csv(std::ostream& os) const {
  if (!comment.empty()) os << "# " << comment << "\n";
  for (size_t i = 0; i < columns.size(); ++i)
    os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows)
    for (size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
}

void OutputTable::write_json(std::ostream& os) const {
  json j;
  j["comment"] = comment;
  j["columns"] = columns;
  j["rows"] = json::array();
  for (const auto& row : rows) j["rows"].push_back(row);
  os << j.dump(2) << "\n";
}

void OutputTable::write(const std::string& path, const std::string& format) const {
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!path.empty()) {
    file.open(path);
    if (!file) throw config_error("cannot open output path '" + path + "'");
    os = &file;
  }
  if (format == "json")
    write_json(*os);
  else
    write_csv(*os);
}

}  // namespace hankelkdv

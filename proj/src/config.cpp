#include "nli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "nli/errors.hpp"

namespace nli {

namespace {

using json = nlohmann::json;

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

// Rejects keys outside `allowed`, which catches unit-less or misspelled fields.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError(join(where, key) + ": unknown key");
}

double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(where, key) + ": missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(where, key) + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(where, key) + ": not finite");
  return d;
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::size_t count_or(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(join(where, key) + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

bool flag_or(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(join(where, key) + ": expected true/false");
  return obj.at(key).get<bool>();
}

std::string text_or(const json& obj, const std::string& where, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(join(where, key) + ": expected a string");
  return obj.at(key).get<std::string>();
}

char polarization_or(const json& obj, const std::string& where, char fallback) {
  const std::string p = text_or(obj, where, "polarization", std::string(1, fallback));
  if (p != "x" && p != "y") throw ConfigError(join(where, "polarization") + ": must be \"x\" or \"y\"");
  return p[0];
}

template <class Fn>
auto wrap_errors(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

LinkProfile parse_link(const json& j) {
  check_keys(j, "link", {"spans", "xi_pre_ps2", "manakov_factor"});
  if (!j.contains("spans") || !j.at("spans").is_array() || j.at("spans").empty())
    throw ConfigError("link.spans: expected a non-empty array");
  std::vector<Span> spans;
  std::size_t i = 0;
  for (const json& s : j.at("spans")) {
    const std::string where = "link.spans[" + std::to_string(i++) + "]";
    check_keys(s, where,
               {"length_km", "alpha_db_per_km", "beta2_ps2_per_km", "gamma_per_w_per_km",
                "lumped_gain_db", "repeat"});
    Span span;
    span.length = number(s, where, "length_km") * units::kKm;
    span.alpha = units::db_per_km_to_per_m(number(s, where, "alpha_db_per_km"));
    span.beta2 = units::ps2_per_km_to_s2_per_m(number(s, where, "beta2_ps2_per_km"));
    span.gamma = units::per_w_per_km_to_per_w_per_m(number(s, where, "gamma_per_w_per_km"));
    span.lumped_gain_db = number_or(s, where, "lumped_gain_db", 0.0);
    const std::size_t repeat = count_or(s, where, "repeat", 1);
    if (repeat == 0) throw ConfigError(where + ".repeat: must be >= 1");
    spans.insert(spans.end(), repeat, span);
  }
  const double xi_pre = number_or(j, "link", "xi_pre_ps2", 0.0) * 1e-24;
  const bool manakov = flag_or(j, "link", "manakov_factor", true);
  return wrap_errors("link", [&] { return LinkProfile(std::move(spans), xi_pre, manakov); });
}

std::vector<double> number_array(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key) || !obj.at(key).is_array()) throw ConfigError(join(where, key) + ": expected an array");
  std::vector<double> out;
  for (const json& v : obj.at(key)) {
    if (!v.is_number()) throw ConfigError(join(where, key) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PsdShape parse_shape(const json& j, const std::string& where, const std::string& base_dir) {
  if (j.is_null()) return PsdShape::zero();
  const std::string type = text_or(j, where, "type", "");
  return wrap_errors(where, [&]() -> PsdShape {
    if (type == "zero") {
      check_keys(j, where, {"type"});
      return PsdShape::zero();
    }
    if (type == "rectangular") {
      check_keys(j, where, {"type", "center_hz", "bandwidth_hz", "height_per_hz", "power_hat"});
      Rectangular r;
      r.center = number_or(j, where, "center_hz", 0.0);
      r.bandwidth = number(j, where, "bandwidth_hz");
      if (j.contains("height_per_hz") == j.contains("power_hat"))
        throw ConfigError(where + ": give exactly one of height_per_hz, power_hat");
      r.height = j.contains("height_per_hz") ? number(j, where, "height_per_hz")
                                             : number(j, where, "power_hat") / r.bandwidth;
      return PsdShape(r);
    }
    if (type == "raised_cosine") {
      check_keys(j, where,
                 {"type", "center_hz", "bandwidth_hz", "rolloff", "height_per_hz", "power_hat"});
      RaisedCosine r;
      r.center = number_or(j, where, "center_hz", 0.0);
      r.bandwidth = number(j, where, "bandwidth_hz");
      r.rolloff = number(j, where, "rolloff");
      if (j.contains("height_per_hz") == j.contains("power_hat"))
        throw ConfigError(where + ": give exactly one of height_per_hz, power_hat");
      // the raised-cosine integral is height * bandwidth for any rolloff
      r.height = j.contains("height_per_hz") ? number(j, where, "height_per_hz")
                                             : number(j, where, "power_hat") / r.bandwidth;
      return PsdShape(r);
    }
    if (type == "tabulated") {
      check_keys(j, where, {"type", "csv", "frequencies_hz", "values_per_hz"});
      if (j.contains("csv")) {
        std::filesystem::path p = text_or(j, where, "csv", "");
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return PsdShape(load_tabulated_csv(p.string()));
      }
      return PsdShape(Tabulated{number_array(j, where, "frequencies_hz"),
                                number_array(j, where, "values_per_hz")});
    }
    throw ConfigError(where + ".type: expected zero, rectangular, raised_cosine or tabulated");
  });
}

DualPolPsd parse_psd(const json& j, const std::string& base_dir) {
  check_keys(j, "psd", {"p0_w", "x", "y"});
  const double p0 = number(j, "psd", "p0_w");
  if (p0 <= 0.0) throw ConfigError("psd.p0_w: must be > 0");
  PsdShape gx = parse_shape(j.value("x", json()), "psd.x", base_dir);
  PsdShape gy = parse_shape(j.value("y", json()), "psd.y", base_dir);
  return wrap_errors("psd", [&] { return DualPolPsd(std::move(gx), std::move(gy), p0); });
}

QuadratureOptions parse_quadrature(const json& j) {
  QuadratureOptions q;
  q.relative_tolerance = number_or(j, "kernel", "relative_tolerance", q.relative_tolerance);
  q.max_cells_per_span = count_or(j, "kernel", "max_cells_per_span", q.max_cells_per_span);
  if (!(q.relative_tolerance > 0.0)) throw ConfigError("kernel.relative_tolerance: must be > 0");
  if (q.max_cells_per_span == 0) throw ConfigError("kernel.max_cells_per_span: must be >= 1");
  return q;
}

KernelGridConfig parse_kernel_grid(const json& j) {
  check_keys(j, "kernel",
             {"f_min_hz2", "f_max_hz2", "points", "include_zero", "include_negative",
              "relative_tolerance", "max_cells_per_span"});
  KernelGridConfig k;
  k.f_min_hz2 = number_or(j, "kernel", "f_min_hz2", k.f_min_hz2);
  k.f_max_hz2 = number_or(j, "kernel", "f_max_hz2", k.f_max_hz2);
  k.points = count_or(j, "kernel", "points", k.points);
  k.include_zero = flag_or(j, "kernel", "include_zero", k.include_zero);
  k.include_negative = flag_or(j, "kernel", "include_negative", k.include_negative);
  if (!(k.f_min_hz2 > 0.0) || !(k.f_max_hz2 >= k.f_min_hz2))
    throw ConfigError("kernel: need 0 < f_min_hz2 <= f_max_hz2");
  if (k.points < 1) throw ConfigError("kernel.points: must be >= 1");
  return k;
}

PsdOutputConfig parse_psd_output(const json& j, const DualPolPsd& psd) {
  check_keys(j, "psd_output",
             {"f_min_hz", "f_max_hz", "points", "inner_step_hz", "include_phase_term",
              "polarization", "quadrature_kernel"});
  PsdOutputConfig o;
  const Support sx = psd.gx().support(), sy = psd.gy().support();
  double lo = 0.0, hi = 0.0;
  if (!psd.gx().is_zero()) lo = sx.lo, hi = sx.hi;
  if (!psd.gy().is_zero()) {
    lo = psd.gx().is_zero() ? sy.lo : std::min(lo, sy.lo);
    hi = psd.gx().is_zero() ? sy.hi : std::max(hi, sy.hi);
  }
  o.f_min_hz = number_or(j, "psd_output", "f_min_hz", lo);
  o.f_max_hz = number_or(j, "psd_output", "f_max_hz", hi);
  o.points = count_or(j, "psd_output", "points", 65);
  o.inner_step_hz = number_or(j, "psd_output", "inner_step_hz", (hi - lo) / 64.0);
  o.include_phase_term = flag_or(j, "psd_output", "include_phase_term", true);
  o.polarization = polarization_or(j, "psd_output", 'x');
  o.quadrature_kernel = flag_or(j, "psd_output", "quadrature_kernel", false);
  if (o.points < 1) throw ConfigError("psd_output.points: must be >= 1");
  if (o.f_max_hz < o.f_min_hz) throw ConfigError("psd_output: f_max_hz < f_min_hz");
  return o;
}

PerturbationMode parse_mode(const std::string& s, const std::string& where) {
  if (s == "rp1") return PerturbationMode::Rp1;
  if (s == "erp1") return PerturbationMode::DpErp1;
  throw ConfigError(where + ": mode must be rp1 or erp1");
}

MonteCarloConfig parse_montecarlo(const json& j) {
  check_keys(j, "montecarlo",
             {"mode", "lines", "spacing_hz", "trials", "seed", "edge_margin", "z_max",
              "polarization", "inner_step_hz"});
  MonteCarloConfig m;
  m.mode = parse_mode(text_or(j, "montecarlo", "mode", "rp1"), "montecarlo.mode");
  m.lines = count_or(j, "montecarlo", "lines", m.lines);
  m.spacing_hz = number_or(j, "montecarlo", "spacing_hz", m.spacing_hz);
  m.trials = count_or(j, "montecarlo", "trials", m.trials);
  m.seed = count_or(j, "montecarlo", "seed", m.seed);
  m.edge_margin = number_or(j, "montecarlo", "edge_margin", m.edge_margin);
  m.z_max = number_or(j, "montecarlo", "z_max", m.z_max);
  m.polarization = polarization_or(j, "montecarlo", 'x');
  m.inner_step_hz = number_or(j, "montecarlo", "inner_step_hz", 0.0);
  return m;
}

MomentsConfig parse_moments(const json& j) {
  check_keys(j, "moments", {"theorem", "k", "trials", "seed", "ensembles", "grid_size"});
  MomentsConfig m;
  m.theorem = static_cast<int>(count_or(j, "moments", "theorem", 2));
  m.k = count_or(j, "moments", "k", m.k);
  m.trials = count_or(j, "moments", "trials", m.trials);
  m.seed = count_or(j, "moments", "seed", m.seed);
  m.ensembles = count_or(j, "moments", "ensembles", m.ensembles);
  m.grid_size = count_or(j, "moments", "grid_size", m.grid_size);
  return m;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string describe_shape(const PsdShape& s) { return s.describe(); }

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  check_keys(root, "config", {"link", "psd", "kernel", "psd_output", "montecarlo", "moments"});
  if (!root.contains("link")) throw ConfigError("link: missing");
  if (!root.contains("psd")) throw ConfigError("psd: missing");
  const json empty = json::object();
  const json& kernel = root.contains("kernel") ? root.at("kernel") : empty;

  LinkProfile link = parse_link(root.at("link"));
  const QuadratureOptions quadrature = parse_quadrature(kernel);
  DualPolPsd psd = parse_psd(root.at("psd"), base_dir);
  const KernelGridConfig kgrid = parse_kernel_grid(kernel);
  const PsdOutputConfig out = parse_psd_output(root.value("psd_output", empty), psd);
  const MonteCarloConfig mc = parse_montecarlo(root.value("montecarlo", empty));
  const MomentsConfig mom = parse_moments(root.value("moments", empty));
  return RunConfig{"", std::move(link), quadrature, std::move(psd), kgrid, out, mc, mom};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  RunConfig cfg = parse_config(buf.str(), parent.empty() ? "." : parent.string());
  cfg.source = path;
  return cfg;
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string k, std::string v) { out.emplace_back(std::move(k), std::move(v)); };
  add("config_file", cfg.source);
  const auto& spans = cfg.link.spans();
  add("link.spans", std::to_string(spans.size()));
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::string p = "link.span" + std::to_string(i) + ".";
    add(p + "length_m", fmt(spans[i].length));
    add(p + "alpha_per_m", fmt(spans[i].alpha));
    add(p + "beta2_s2_per_m", fmt(spans[i].beta2));
    add(p + "gamma_per_w_per_m", fmt(spans[i].gamma));
    add(p + "lumped_gain_db", fmt(spans[i].lumped_gain_db));
  }
  add("link.xi_pre_s2", fmt(cfg.link.xi_pre()));
  add("link.manakov_factor", cfg.link.manakov_factor_enabled() ? "true" : "false");
  add("kernel.relative_tolerance", fmt(cfg.quadrature.relative_tolerance));
  add("kernel.max_cells_per_span", std::to_string(cfg.quadrature.max_cells_per_span));
  add("psd.p0_w", fmt(cfg.psd.p0()));
  add("psd.x", describe_shape(cfg.psd.gx()));
  add("psd.y", describe_shape(cfg.psd.gy()));
  add("psd.px_hat", fmt(cfg.psd.px_hat()));
  add("psd.py_hat", fmt(cfg.psd.py_hat()));
  return out;
}

}  // namespace nli

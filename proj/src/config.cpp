#include "perscale/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <cmath>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError(fmt::format("config.{}: {}", field, what));
}

void reject_unknown(const json& j, const std::string& field, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) invalid(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
}

const json& require(const json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) invalid(field.empty() ? key : field + "." + key, "missing");
  return j.at(key);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) invalid(field, "expected a number");
  return j.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& field, double fallback) {
  return j.contains(key) ? number(j.at(key), field + "." + key) : fallback;
}

long long integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) invalid(field, "expected an integer");
  return j.get<long long>();
}

std::vector<double> numbers(const json& j, const std::string& field) {
  if (!j.is_array()) invalid(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], fmt::format("{}[{}]", field, i)));
  return out;
}

std::optional<double> auto_or_number(const json& j, const std::string& key, const std::string& field) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
  return number(v, field + "." + key);
}

void strictly_increasing(const std::vector<double>& v, const std::string& field) {
  if (v.empty()) invalid(field, "must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) invalid(field, "must be strictly increasing");
}

}  // namespace

json region_to_json(const Region& region) {
  const int n = region.dim();
  auto coords = [n](const Point& p) {
    std::vector<double> v(p.begin(), p.begin() + n);
    return v;
  };
  switch (region.kind()) {
    case RegionKind::Box:
      return {{"shape", "box"}, {"lower", coords(region.lower())}, {"upper", coords(region.upper())}};
    case RegionKind::Ball:
      return {{"shape", "ball"}, {"center", coords(region.center())}, {"radius", region.radius()}};
    case RegionKind::Simplex: {
      json verts = json::array();
      for (const auto& v : region.vertices()) verts.push_back(coords(v));
      return {{"shape", "simplex"}, {"vertices", verts}};
    }
  }
  return {};
}

Region region_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) invalid(field, "expected an object");
  const json& shape = require(j, "shape", field);
  if (!shape.is_string()) invalid(field + ".shape", "expected a string");
  const std::string s = shape.get<std::string>();
  try {
    Region r = [&] {
      if (s == "box") {
        reject_unknown(j, field, {"shape", "lower", "upper"});
        return Region::box(numbers(require(j, "lower", field), field + ".lower"),
                           numbers(require(j, "upper", field), field + ".upper"));
      }
      if (s == "ball") {
        reject_unknown(j, field, {"shape", "center", "radius"});
        return Region::ball(numbers(require(j, "center", field), field + ".center"),
                            number(require(j, "radius", field), field + ".radius"));
      }
      if (s == "simplex") {
        reject_unknown(j, field, {"shape", "vertices"});
        const json& vs = require(j, "vertices", field);
        if (!vs.is_array()) invalid(field + ".vertices", "expected an array of points");
        std::vector<std::vector<double>> verts;
        for (std::size_t i = 0; i < vs.size(); ++i)
          verts.push_back(numbers(vs[i], fmt::format("{}.vertices[{}]", field, i)));
        return Region::simplex(verts);
      }
      invalid(field + ".shape", "must be one of box, ball, simplex; got '" + s + "'");
    }();
    if (r.is_degenerate()) invalid(field, "region has zero volume");
    return r;
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    invalid(field, e.what());
  }
}

std::vector<double> SummarySpec::grid() const {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) g[i] = count == 1 ? s_min : s_min + (s_max - s_min) * i / (count - 1);
  return g;
}

AveragingSequence ExperimentConfig::sequence() const {
  if (!window) throw ValidationError("config.window: missing");
  return AveragingSequence(*window, scales, scale_axes);
}

Region ExperimentConfig::window_at(std::size_t k, double t) const {
  const AveragingSequence seq = sequence();
  if (window_time_exponent == 0.0) return seq.at(k);
  return seq.at(k).scaled(std::pow(t, window_time_exponent), seq.about);
}

namespace {

ExperimentConfig parse_object(const json& j);

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return parse_object(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config has a field of the wrong type: ") + e.what());
  }
}

namespace {

ExperimentConfig parse_object(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j, "", {"schema", "name", "process", "dimension", "times", "window", "scales", "scale_axes",
                         "window_time_exponent", "ensemble_size", "complex", "grid", "quantities", "betti_queries", "summary", "seed",
                         "tolerances", "expected", "output_dir", "comment"});
  const json& schema = require(j, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != kConfigSchema)
    invalid("schema", fmt::format("must be \"{}\"", kConfigSchema));

  ExperimentConfig c;
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  c.dim = static_cast<int>(integer(require(j, "dimension", ""), "dimension"));
  if (c.dim != 2 && c.dim != 3) invalid("dimension", fmt::format("must be 2 or 3, got {}", c.dim));

  const json& p = require(j, "process", "");
  const std::string type = require(p, "type", "process").get<std::string>();
  if (type == "poisson") {
    reject_unknown(p, "process", {"type", "gamma0", "eta1"});
    c.process.kind = ProcessSpec::Kind::Poisson;
    c.process.poisson.gamma0 = number(require(p, "gamma0", "process"), "process.gamma0");
    c.process.poisson.eta1 = number_or(p, "eta1", "process", 0.0);
    c.process.poisson.dim = c.dim;
    if (!(c.process.poisson.gamma0 > 0)) invalid("process.gamma0", "must be > 0");
    if (!(c.process.poisson.eta1 >= 0)) invalid("process.eta1", "must be >= 0");
  } else if (type == "sublevel") {
    reject_unknown(p, "process", {"type", "alpha", "beta", "kappa", "nu", "points", "modes", "k_min", "k_max"});
    c.process.kind = ProcessSpec::Kind::Sublevel;
    auto& f = c.process.field;
    f.alpha = number_or(p, "alpha", "process", f.alpha);
    f.beta = number_or(p, "beta", "process", f.beta);
    f.kappa = number_or(p, "kappa", "process", f.kappa);
    f.nu = number_or(p, "nu", "process", f.nu);
    if (p.contains("points")) f.points = static_cast<int>(integer(p.at("points"), "process.points"));
    if (p.contains("modes")) f.modes = static_cast<int>(integer(p.at("modes"), "process.modes"));
    f.k_min = number_or(p, "k_min", "process", f.k_min);
    f.k_max = number_or(p, "k_max", "process", f.k_max);
    f.dim = c.dim;
    if (!(f.kappa > 0)) invalid("process.kappa", "must be > 0");
    if (!(f.nu > 0)) invalid("process.nu", "must be > 0");
    if (f.points < 1) invalid("process.points", "must be >= 1");
    if (f.modes < 1) invalid("process.modes", "must be >= 1");
    if (!(f.k_min > 0) || !(f.k_max >= f.k_min)) invalid("process.k_min", "need 0 < k_min <= k_max");
  } else {
    invalid("process.type", "must be 'poisson' or 'sublevel', got '" + type + "'");
  }

  c.times = numbers(require(j, "times", ""), "times");
  strictly_increasing(c.times, "times");
  for (double t : c.times) {
    if (c.process.kind == ProcessSpec::Kind::Poisson && !(t >= 1.0))
      invalid("times", fmt::format("Poisson times must be >= 1, got {}", t));
    if (!(t > 0)) invalid("times", "must be > 0");
  }

  c.window = region_from_json(require(j, "window", ""), "window");
  if (c.window->dim() != c.dim)
    invalid("window", fmt::format("dimension {} does not match config dimension {}", c.window->dim(), c.dim));
  if (j.contains("scales")) c.scales = numbers(j.at("scales"), "scales");
  strictly_increasing(c.scales, "scales");
  for (double s : c.scales)
    if (!(s > 0)) invalid("scales", "must be > 0");
  if (j.contains("scale_axes")) {
    for (const auto& a : j.at("scale_axes")) c.scale_axes.push_back(static_cast<int>(integer(a, "scale_axes")));
    if (!c.scale_axes.empty() && c.window->kind() != RegionKind::Box)
      invalid("scale_axes", "only box windows can be stretched along single axes");
  }

  if (j.contains("window_time_exponent")) c.window_time_exponent = number(j.at("window_time_exponent"), "window_time_exponent");

  const long long m = integer(require(j, "ensemble_size", ""), "ensemble_size");
  if (m < 1) invalid("ensemble_size", fmt::format("must be >= 1, got {}", m));
  c.ensemble_size = static_cast<std::size_t>(m);

  if (j.contains("complex")) {
    const json& cx = j.at("complex");
    reject_unknown(cx, "complex", {"backend", "max_dim", "r_max"});
    const std::string backend = cx.value("backend", std::string("alpha2d"));
    if (backend == "alpha2d")
      c.complex.backend = ComplexSpec::Backend::Alpha2d;
    else if (backend == "cech")
      c.complex.backend = ComplexSpec::Backend::Cech;
    else
      invalid("complex.backend", "must be 'alpha2d' or 'cech', got '" + backend + "'");
    if (cx.contains("max_dim")) c.complex.max_dim = static_cast<int>(integer(cx.at("max_dim"), "complex.max_dim"));
    c.complex.r_max = auto_or_number(cx, "r_max", "complex");
  }
  if (c.complex.backend == ComplexSpec::Backend::Alpha2d) {
    if (c.dim != 2) invalid("complex.backend", "alpha2d needs dimension 2");
    c.complex.max_dim = 2;
  }
  if (c.complex.max_dim < 1 || c.complex.max_dim > c.dim)
    invalid("complex.max_dim", fmt::format("must lie in [1, {}]", c.dim));

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown(g, "grid", {"nb", "nd", "b_max", "d_max", "per_degree"});
    if (g.contains("nb")) c.grid.nb = static_cast<int>(integer(g.at("nb"), "grid.nb"));
    if (g.contains("nd")) c.grid.nd = static_cast<int>(integer(g.at("nd"), "grid.nd"));
    c.grid.b_max = auto_or_number(g, "b_max", "grid");
    c.grid.d_max = auto_or_number(g, "d_max", "grid");
    c.grid.per_degree = g.value("per_degree", false);
    if (c.grid.nb < 1 || c.grid.nd < 1) invalid("grid", "nb and nd must be >= 1");
  }

  c.quantities.n = c.dim;
  if (j.contains("quantities")) {
    const json& q = j.at("quantities");
    reject_unknown(q, "quantities", {"q", "delta", "pers_power", "alpha", "degree"});
    if (q.contains("q")) c.quantities.q = numbers(q.at("q"), "quantities.q");
    c.quantities.delta = number_or(q, "delta", "quantities", c.quantities.delta);
    c.quantities.pers_power = number_or(q, "pers_power", "quantities", c.quantities.pers_power);
    c.quantities.alpha = number_or(q, "alpha", "quantities", c.quantities.alpha);
    if (q.contains("degree")) c.quantities.degree = static_cast<int>(integer(q.at("degree"), "quantities.degree"));
  }
  if (c.quantities.q.empty()) invalid("quantities.q", "must not be empty");
  for (double q : c.quantities.q)
    if (!(q > 0)) invalid("quantities.q", "entries must be > 0");
  if (!(c.quantities.delta > 0)) invalid("quantities.delta", "must be > 0");
  if (!(c.quantities.alpha > 0)) invalid("quantities.alpha", "must be > 0");

  if (j.contains("betti_queries")) {
    std::size_t i = 0;
    for (const auto& b : j.at("betti_queries")) {
      const std::string f = fmt::format("betti_queries[{}]", i++);
      reject_unknown(b, f, {"degree", "r", "s"});
      BettiQuery bq;
      bq.degree = static_cast<int>(integer(require(b, "degree", f), f + ".degree"));
      bq.r = number(require(b, "r", f), f + ".r");
      bq.s = number(require(b, "s", f), f + ".s");
      if (!(0 <= bq.r && bq.r <= bq.s)) invalid(f, "need 0 <= r <= s");
      c.betti.push_back(bq);
    }
  }

  if (j.contains("summary")) {
    const json& s = j.at("summary");
    reject_unknown(s, "summary", {"kind", "s_min", "s_max", "count", "sigma", "degree"});
    SummarySpec sp;
    const std::string kind = s.value("kind", std::string("betti"));
    if (kind == "betti")
      sp.kind = FunctionalSummary::Kind::BettiCurve;
    else if (kind == "gaussian")
      sp.kind = FunctionalSummary::Kind::GaussianBump;
    else
      invalid("summary.kind", "must be 'betti' or 'gaussian'");
    sp.s_min = number_or(s, "s_min", "summary", sp.s_min);
    sp.s_max = number_or(s, "s_max", "summary", sp.s_max);
    if (s.contains("count")) sp.count = static_cast<int>(integer(s.at("count"), "summary.count"));
    sp.sigma = number_or(s, "sigma", "summary", sp.sigma);
    if (s.contains("degree")) sp.degree = static_cast<int>(integer(s.at("degree"), "summary.degree"));
    if (sp.count < 1 || !(sp.s_max >= sp.s_min)) invalid("summary", "need count >= 1 and s_max >= s_min");
    c.summary = sp;
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      invalid("seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "tolerances",
                   {"eta1_abs", "eta2_abs", "packing_rel", "collapse", "fractal_rel", "condition_iv_bound",
                    "packing_bound_multiple", "ergodicity_eps", "intensivity_eps"});
    auto& tl = c.tol;
    tl.eta1_abs = number_or(t, "eta1_abs", "tolerances", tl.eta1_abs);
    tl.eta2_abs = number_or(t, "eta2_abs", "tolerances", tl.eta2_abs);
    tl.packing_rel = number_or(t, "packing_rel", "tolerances", tl.packing_rel);
    tl.collapse = number_or(t, "collapse", "tolerances", tl.collapse);
    tl.fractal_rel = number_or(t, "fractal_rel", "tolerances", tl.fractal_rel);
    tl.condition_iv_bound = number_or(t, "condition_iv_bound", "tolerances", tl.condition_iv_bound);
    tl.packing_bound_multiple = number_or(t, "packing_bound_multiple", "tolerances", tl.packing_bound_multiple);
    tl.ergodicity_eps = number_or(t, "ergodicity_eps", "tolerances", tl.ergodicity_eps);
    tl.intensivity_eps = number_or(t, "intensivity_eps", "tolerances", tl.intensivity_eps);
  }

  if (j.contains("expected")) {
    const json& e = j.at("expected");
    reject_unknown(e, "expected", {"eta1", "eta2"});
    if (e.contains("eta1")) c.expected_eta1 = number(e.at("eta1"), "expected.eta1");
    if (e.contains("eta2")) c.expected_eta2 = number(e.at("eta2"), "expected.eta2");
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace perscale

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "perscale/config.hpp"
#include "perscale/error.hpp"
#include "perscale/experiment.hpp"
#include "perscale/io.hpp"
#include "perscale/parallel.hpp"
#include "perscale/verify.hpp"

using namespace perscale;
using nlohmann::json;

namespace {

constexpr int kPass = 0;
constexpr int kVerdictFailure = 1;
constexpr int kUsage = 2;

int cmd_run(const std::string& config_path, const std::string& output_dir) {
  const ExperimentConfig cfg = load_config(config_path);
  const ExperimentResult r = run_experiment(cfg);
  const std::string dir = output_dir.empty() ? cfg.output_dir : output_dir;
  write_outputs(r, dir);
  for (const auto& [name, v] : r.report.at("verdicts").items())
    std::cout << fmt::format("[{}] {}: value {:.6g}, tolerance {:.6g}\n", v.at("pass").get<bool>() ? "PASS" : "FAIL",
                             name, v.at("value").get<double>(), v.at("tolerance").get<double>());
  std::cout << fmt::format("outputs written to {}; overall {}\n", dir, r.pass ? "PASS" : "FAIL");
  return r.pass ? kPass : kVerdictFailure;
}

int cmd_verify(const std::string& suite) {
  const auto reports = verify::run_suite(suite);
  bool ok = true;
  for (const auto& r : reports) {
    verify::print(std::cout, r);
    ok = ok && r.pass();
  }
  return ok ? kPass : kVerdictFailure;
}

int cmd_sample(const std::string& config_path, const std::string& out, int window_index) {
  const ExperimentConfig cfg = load_config(config_path);
  const AveragingSequence seq = cfg.sequence();
  const std::size_t k = window_index < 0 ? seq.size() - 1 : static_cast<std::size_t>(window_index);
  if (k >= seq.size()) throw ValidationError(fmt::format("--window: index {} outside 0..{}", k, seq.size() - 1));
  const std::size_t m = cfg.ensemble_size;
  std::vector<PointCloud> clouds(cfg.times.size() * m);
  parallel_for(clouds.size(), [&](std::size_t task) {
    const double t = cfg.times[task / m];
    PointCloud c = sample_cloud(cfg, task % m, task / m, cfg.window_at(seq.size() - 1, t));
    clouds[task] = k + 1 == seq.size() ? std::move(c) : c.restricted_to(cfg.window_at(k, t));
  });
  write_points_csv(out, clouds);
  std::cout << fmt::format("wrote {} clouds to {}\n", clouds.size(), out);
  return kPass;
}

int cmd_persist(const std::string& in, const std::string& out, const std::string& backend, int max_dim,
                const std::string& r_max, const std::string& dump) {
  const std::vector<PointCloud> clouds = read_points_csv(in);
  if (clouds.empty()) throw ValidationError(in + ": no clouds");
  ComplexSpec spec;
  if (backend == "alpha2d")
    spec.backend = ComplexSpec::Backend::Alpha2d;
  else if (backend == "cech")
    spec.backend = ComplexSpec::Backend::Cech;
  else
    throw ValidationError("--backend: expected alpha2d or cech, got " + backend);
  if (spec.backend == ComplexSpec::Backend::Alpha2d && clouds.front().dim != 2)
    throw ValidationError("--backend: alpha2d needs planar points");
  spec.max_dim = max_dim;
  if (r_max != "auto") {
    try {
      spec.r_max = std::stod(r_max);
    } catch (const std::exception&) {
      throw ValidationError("--r-max: expected a number or auto, got " + r_max);
    }
  }
  if (!dump.empty()) write_complex_csv(build_complex(clouds.front(), spec), dump);
  std::vector<PersistenceDiagram> diagrams(clouds.size());
  parallel_for(clouds.size(), [&](std::size_t i) {
    try {
      diagrams[i] = diagram_of(clouds[i], spec, -1);
    } catch (const Error& e) {
      throw Error(fmt::format("t={}, sample={}: {}", clouds[i].t, clouds[i].sample_id, e.what()));
    }
  });
  write_diagrams_csv(out, diagrams);
  std::cout << fmt::format("wrote {} diagrams to {}\n", diagrams.size(), out);
  return kPass;
}

struct MeasureArgs {
  std::string in, out, quantities;
  bool group_by_t = false;
  int nb = 64, nd = 64;
  double b_max = 0.0, d_max = 0.0;
  int degree = -1;
  double volume = 0.0;
  int n = 2;
  double delta = 1.0, alpha = 1.0;
  std::vector<double> q{1.0, 2.0};
};

int cmd_measure(const MeasureArgs& a) {
  const std::vector<PersistenceDiagram> diagrams = read_diagrams_csv(a.in);
  if (diagrams.empty()) throw ValidationError(a.in + ": no diagrams");
  std::map<std::string, std::vector<PersistenceDiagram>> groups;
  std::map<std::string, double> group_t;
  for (const auto& d : diagrams) {
    const std::string key = format_number(d.provenance.t);
    groups[key].push_back(d);
    group_t[key] = d.provenance.t;
  }
  if (groups.size() > 1 && !a.group_by_t)
    throw ValidationError(fmt::format("{} holds diagrams at {} different times; pass --group-by-t", a.in, groups.size()));
  for (const auto& [key, members] : groups)
    for (const auto& d : members)
      if (d.provenance.region != members.front().provenance.region)
        throw ValidationError(fmt::format("{}: diagrams at t={} come from different windows", a.in, key));

  double max_b = 0.0, max_d = 0.0;
  for (const auto& d : diagrams)
    for (const auto& p : d.pairs) {
      max_b = std::max(max_b, p.birth);
      max_d = std::max(max_d, p.death);
    }
  HistogramGrid grid = HistogramGrid::covering(max_b, max_d, a.nb, a.nd);
  if (a.b_max > 0) grid.b_max = a.b_max;
  if (a.d_max > 0) grid.d_max = a.d_max;
  const std::optional<int> degree = a.degree >= 0 ? std::optional<int>(a.degree) : std::nullopt;
  const std::optional<double> vol = a.volume > 0 ? std::optional<double>(a.volume) : std::nullopt;

  std::vector<std::pair<double, std::string>> order;
  for (const auto& [key, t] : group_t) order.emplace_back(t, key);
  std::sort(order.begin(), order.end());
  std::vector<MeasureHistogram> hists;
  std::vector<GeometricQuantities> rows;
  QuantitySpec qs;
  qs.n = a.n;
  qs.q = a.q;
  qs.delta = a.delta;
  qs.alpha = a.alpha;
  qs.degree = degree;
  for (const auto& [t, key] : order) {
    const auto& members = groups[key];
    hists.push_back(expectation_measure(members, grid, vol, degree));
    std::vector<GeometricQuantities> per;
    for (const auto& d : members) per.push_back(quantities_from_diagram(d, qs, a.volume > 0 ? a.volume : 1.0));
    rows.push_back(ensemble_quantities(per).mean);
  }
  write_measure_csv(a.out, hists);
  if (!a.quantities.empty()) write_quantities_csv(a.quantities, rows, a.n + a.delta);
  std::cout << fmt::format("wrote {} histogram(s) on a {}x{} grid [0,{:.6g}]x[0,{:.6g}] to {}\n", hists.size(), grid.nb,
                           grid.nd, grid.b_max, grid.d_max, a.out);
  return kPass;
}

int cmd_fit(const std::string& in, const std::string& out, int n, double delta, std::vector<double> q, int k,
            double rel_tol) {
  const auto rows = read_quantities_csv(in, n + delta);
  if (rows.empty()) throw ValidationError(in + ": no rows");
  int kk = k;
  if (kk < 0)
    for (const auto& g : rows) kk = std::max(kk, g.k);
  std::vector<GeometricQuantities> per_time;
  for (const auto& g : rows)
    if (g.k == kk) per_time.push_back(g);
  std::sort(per_time.begin(), per_time.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  if (per_time.size() < 3) throw ValidationError(fmt::format("{}: need >= 3 times at k={}, got {}", in, kk, per_time.size()));
  for (const auto& g : per_time)
    for (double qq : q)
      if (!g.l.count(qq)) throw ValidationError(fmt::format("{}: l_{:g} missing at t={}", in, qq, g.t));

  const ExponentReport ex = fit_exponents(per_time, q);
  const PackingVerdict pv = packing_relation_verdict(ex.eta1.value, ex.eta2.value, n, rel_tol, ex.eta1.stderr_,
                                                     ex.eta2.stderr_);
  auto est = [](const ExponentEstimate& e) {
    return json{{"quantity", e.quantity}, {"value", e.value}, {"stderr", e.stderr_}, {"r_squared", e.r_squared}};
  };
  json rep;
  rep["schema"] = "perscale/fit/v1";
  rep["k"] = kk;
  json estimates = json::array();
  for (const auto& e : ex.eta1_estimates) estimates.push_back(est(e));
  rep["exponents"] = {{"convention", ex.convention},
                      {"eta1", est(ex.eta1)},
                      {"eta2", est(ex.eta2)},
                      {"eta1_estimates", estimates},
                      {"eta1_consistent", ex.eta1_consistent},
                      {"eta2_density", density_exponent_convert(ex.eta1.value, ex.eta2.value)}};
  rep["packing_relation"] = {
      {"pass", pv.pass}, {"deviation", pv.deviation}, {"within_two_sigma", pv.within_two_sigma}, {"rel_tol", rel_tol}};
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << rep.dump(2) << '\n';
  }
  std::cout << fmt::format("eta1 = {} +- {} ({}), eta2 = {} +- {}, packing relation {} (deviation {})\n",
                           format_number(ex.eta1.value), format_number(ex.eta1.stderr_), ex.eta1.quantity,
                           format_number(ex.eta2.value), format_number(ex.eta2.stderr_), pv.pass ? "PASS" : "FAIL",
                           format_number(pv.deviation));
  return pv.pass ? kPass : kVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistence diagram scaling experiments"};
  app.require_subcommand(1);
  app.footer(fmt::format("Environment: {} sets the worker count.\nExit codes: 0 pass, 1 verdict failure, 2 usage or "
                         "validation error.",
                         kWorkersEnv));

  std::string config_path, output_dir;
  auto* run = app.add_subcommand("run", "Run a configured experiment end to end");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("-o,--output-dir", output_dir, "Override the configured output directory");

  std::string suite;
  auto* ver = app.add_subcommand("verify", "Run a self-check suite");
  ver->add_option("suite", suite, "oracle | geometry | isomorphism | convergence | all")->required();

  std::string sample_out = "points.csv";
  int window_index = -1;
  auto* smp = app.add_subcommand("sample", "Sample point clouds for every (sample, t) of a config");
  smp->add_option("config", config_path, "Experiment config (JSON)")->required();
  smp->add_option("-o,--output", sample_out, "Points CSV");
  smp->add_option("--window", window_index, "Averaging-sequence index (default: largest)");

  std::string persist_in, persist_out = "diagrams.csv", backend = "alpha2d", r_max = "auto", dump;
  int max_dim = 2;
  auto* per = app.add_subcommand("persist", "Persistence diagrams of sampled clouds");
  per->add_option("points", persist_in, "Points CSV written by `sample`")->required();
  per->add_option("-o,--output", persist_out, "Diagrams CSV");
  per->add_option("--backend", backend, "alpha2d | cech");
  per->add_option("--max-dim", max_dim, "Top simplex dimension");
  per->add_option("--r-max", r_max, "Filtration cutoff or auto");
  per->add_option("--dump-complex", dump, "Write the complex of the first cloud as dim,v0,v1,v2,filtration_value");

  MeasureArgs ma;
  ma.out = "measure.csv";
  auto* mea = app.add_subcommand("measure", "Binned expectation measures of diagrams");
  mea->add_option("diagrams", ma.in, "Diagrams CSV written by `persist`")->required();
  mea->add_option("-o,--output", ma.out, "Measure CSV");
  mea->add_flag("--group-by-t", ma.group_by_t, "One histogram per time when the file mixes times");
  mea->add_option("--nb", ma.nb, "Birth bins");
  mea->add_option("--nd", ma.nd, "Death bins");
  mea->add_option("--b-max", ma.b_max, "Birth range (default 1.05 x maximum)");
  mea->add_option("--d-max", ma.d_max, "Death range (default 1.05 x maximum)");
  mea->add_option("--degree", ma.degree, "Single homology degree (default: pooled)");
  mea->add_option("--volume", ma.volume, "Window volume; normalizes per unit volume");
  mea->add_option("--quantities", ma.quantities, "Also write the quantities CSV");
  mea->add_option("--n", ma.n, "Ambient dimension");
  mea->add_option("--delta", ma.delta, "Packing offset delta");
  mea->add_option("--alpha", ma.alpha, "Exponent of E^alpha");
  mea->add_option("--q", ma.q, "Degrees q of l_q");

  std::string fit_in, fit_out;
  int fit_n = 2, fit_k = -1;
  double fit_delta = 1.0, fit_tol = 0.1;
  std::vector<double> fit_q{1.0};
  auto* fit = app.add_subcommand("fit", "Fit scaling exponents to a quantities CSV");
  fit->add_option("quantities", fit_in, "Quantities CSV")->required();
  fit->add_option("-o,--output", fit_out, "Report JSON");
  fit->add_option("--n", fit_n, "Ambient dimension");
  fit->add_option("--delta", fit_delta, "Packing offset delta (names the l_ndelta column)");
  fit->add_option("--q", fit_q, "Degrees q of l_q used for eta1");
  fit->add_option("--k", fit_k, "Window index (default: largest)");
  fit->add_option("--rel-tol", fit_tol, "Packing relation tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(config_path, output_dir);
    if (*ver) return cmd_verify(suite);
    if (*smp) return cmd_sample(config_path, sample_out, window_index);
    if (*per) return cmd_persist(persist_in, persist_out, backend, max_dim, r_max, dump);
    if (*mea) return cmd_measure(ma);
    if (*fit) return cmd_fit(fit_in, fit_out, fit_n, fit_delta, fit_q, fit_k, fit_tol);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

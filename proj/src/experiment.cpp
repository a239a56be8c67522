#include "perscale/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "perscale/error.hpp"
#include "perscale/geometry.hpp"
#include "perscale/io.hpp"
#include "perscale/parallel.hpp"

namespace perscale {

using nlohmann::json;

std::uint64_t field_seed(std::uint64_t base_seed, std::size_t sample) {
  return derive_seed(base_seed, sample, std::numeric_limits<std::uint64_t>::max());
}

PointCloud sample_cloud(const ExperimentConfig& config, std::size_t sample, std::size_t time_index,
                        const Region& window) {
  const double t = config.times.at(time_index);
  const std::uint64_t seed = derive_seed(config.seed, sample, time_index);
  PointCloud cloud;
  if (config.process.kind == ProcessSpec::Kind::Poisson) {
    cloud = sample_poisson(config.process.poisson, t, window, seed);
  } else {
    const ScalingField field(config.process.field, field_seed(config.seed, sample));
    cloud = sample_sublevel(field, t, window, seed);
  }
  cloud.sample_id = static_cast<std::int64_t>(sample);
  return cloud;
}

FilteredComplex build_complex(const PointCloud& cloud, const ComplexSpec& spec) {
  if (spec.backend == ComplexSpec::Backend::Cech) {
    CechOptions opt;
    opt.max_dim = spec.max_dim;
    opt.r_max = spec.r_max;
    return cech_complex(cloud, opt);
  }
  FilteredComplex full = alpha_complex_2d(cloud);
  if (!spec.r_max) return full;
  std::vector<Simplex> kept;
  for (const auto& s : full.simplices())
    if (s.value <= *spec.r_max) kept.push_back(s);
  return FilteredComplex(full.vertex_count(), std::move(kept), *spec.r_max, kept.size() < full.size(), full.top_dim());
}

PersistenceDiagram diagram_of(const PointCloud& cloud, const ComplexSpec& spec, int k) {
  PersistenceDiagram d = compute_diagram(build_complex(cloud, spec), cloud.dim);
  d.provenance.sample_id = cloud.sample_id;
  d.provenance.t = cloud.t;
  d.provenance.k = k;
  d.provenance.region = cloud.region ? cloud.region->describe() : std::string();
  return d;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

json estimate_json(const ExponentEstimate& e) {
  return {{"quantity", e.quantity}, {"value", e.value}, {"stderr", e.stderr_}, {"r_squared", e.r_squared}};
}

json tolerances_json(const Tolerances& t) {
  return {{"eta1_abs", t.eta1_abs},
          {"eta2_abs", t.eta2_abs},
          {"packing_rel", t.packing_rel},
          {"collapse", t.collapse},
          {"fractal_rel", t.fractal_rel},
          {"condition_iv_bound", t.condition_iv_bound},
          {"packing_bound_multiple", t.packing_bound_multiple},
          {"ergodicity_eps", t.ergodicity_eps},
          {"intensivity_eps", t.intensivity_eps}};
}

void round_numbers(json& j) {
  if (j.is_number_float()) {
    j = std::stod(format_number(j.get<double>()));
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v);
  }
}

struct Verdicts {
  json table = json::object();
  bool pass = true;

  void add(const std::string& name, bool ok, double value, double tolerance, const std::string& rule) {
    table[name] = {{"pass", ok}, {"value", value}, {"tolerance", tolerance}, {"rule", rule}};
    pass = pass && ok;
  }
};

void build_report(ExperimentResult& r) {
  const ExperimentConfig& c = r.config;
  const std::size_t nt = c.times.size();
  const std::size_t nk = r.windows.size();
  const std::size_t last = nk - 1;
  const int n = c.dim;
  Verdicts verdicts;
  json rep;
  rep["schema"] = "perscale/report/v1";
  rep["name"] = c.name;
  rep["process"] = c.process.kind == ProcessSpec::Kind::Poisson ? "poisson" : "sublevel";
  rep["dimension"] = n;
  rep["times"] = c.times;
  rep["ensemble_size"] = c.ensemble_size;
  rep["seed"] = c.seed;
  rep["tolerances"] = tolerances_json(c.tol);
  json windows = json::array();
  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t k = 0; k < nk; ++k)
      windows.push_back({{"t", c.times[j]},
                         {"k", k},
                         {"region", r.time_windows[j][k].describe()},
                         {"volume", r.cell(j, k).volume}});
  rep["windows"] = windows;
  rep["window_time_exponent"] = c.window_time_exponent;

  // Exponents from ensemble means at the largest window.
  // The class count enters per unit volume, which matters for co-moving windows.
  std::vector<GeometricQuantities> per_time, per_volume;
  for (std::size_t j = 0; j < nt; ++j) {
    per_time.push_back(r.cell(j, last).quantities.mean);
    per_volume.push_back(per_time.back());
    per_volume.back().n_classes /= r.cell(j, last).volume;
  }
  std::optional<ExponentReport> ex;
  if (nt >= 3) {
    ex = fit_exponents(per_volume, c.quantities.q);
    json est = json::array();
    json r2 = json::object();
    for (const auto& e : ex->eta1_estimates) {
      est.push_back(estimate_json(e));
      r2[e.quantity] = e.r_squared;
    }
    r2[ex->eta2.quantity] = ex->eta2.r_squared;
    rep["exponents"] = {{"convention", ex->convention},
                        {"eta1", estimate_json(ex->eta1)},
                        {"eta2", estimate_json(ex->eta2)},
                        {"eta1_estimates", est},
                        {"eta1_consistent", ex->eta1_consistent},
                        {"eta1_spread", ex->eta1_spread},
                        {"eta2_density", density_exponent_convert(ex->eta1.value, ex->eta2.value)}};
    rep["fit_r_squared"] = r2;

    const ExponentEstimate& e1 = ex->eta1;
    const ExponentEstimate& ed = ex->eta1_estimates.back();
    if (c.expected_eta1) {
      verdicts.add("eta1", std::abs(e1.value - *c.expected_eta1) <= c.tol.eta1_abs, e1.value - *c.expected_eta1,
                   c.tol.eta1_abs, "|eta1(" + e1.quantity + ") - expected| <= tolerance");
      verdicts.add("eta1_d_max", std::abs(ed.value - *c.expected_eta1) <= c.tol.eta1_abs,
                   ed.value - *c.expected_eta1, c.tol.eta1_abs, "|eta1(d_max) - expected| <= tolerance");
    }
    const double sigma = std::hypot(e1.stderr_, ed.stderr_);
    verdicts.add("eta1_consistency", std::abs(e1.value - ed.value) <= 2.0 * sigma, e1.value - ed.value,
                 2.0 * sigma, "eta1 from " + e1.quantity + " and d_max within 2 combined sigma");
    if (c.expected_eta2)
      verdicts.add("eta2", std::abs(ex->eta2.value - *c.expected_eta2) <= c.tol.eta2_abs,
                   ex->eta2.value - *c.expected_eta2, c.tol.eta2_abs, "|eta2 - expected| <= tolerance");

    const PackingVerdict pv =
        packing_relation_verdict(e1.value, ex->eta2.value, n, c.tol.packing_rel, e1.stderr_, ex->eta2.stderr_);
    rep["packing_relation"] = {{"pass", pv.pass},
                               {"deviation", pv.deviation},
                               {"within_two_sigma", pv.within_two_sigma},
                               {"rel_tol", c.tol.packing_rel}};
    verdicts.add("packing_relation", pv.pass, pv.deviation, c.tol.packing_rel,
                 "|eta2 - n eta1| / |n eta1| <= tolerance or within 2 sigma");

    const ExtendedDiagnostic ext = sufficiently_extended(per_time, e1.value, ex->eta2.value, n, c.quantities.delta);
    rep["sufficiently_extended"] = {{"advisory", true},
                                    {"realized_ratio", ext.realized_ratio},
                                    {"required_ratio", ext.required_ratio ? json(*ext.required_ratio) : json()},
                                    {"extended", ext.extended},
                                    {"c_proxy", ext.c_proxy}};
  }

  // Collapse over every time pair. The reference is the time whose diagrams
  // sit closer to the origin, so the pushed histogram is contracted and the
  // atom of degree-0 births at b = 0 stays in the first birth column.
  if (nt >= 2 && ex) {
    json fitted = json::array(), zero = json::array();
    bool ok = true;
    double worst = 0.0;
    for (std::size_t a = 0; a < nt; ++a) {
      json row_f = json::array(), row_z = json::array();
      for (std::size_t b = 0; b < nt; ++b) {
        if (b <= a) {
          row_f.push_back(nullptr);
          row_z.push_back(nullptr);
          continue;
        }
        const auto& ref = ex->eta1.value >= 0.0 ? r.histograms[a] : r.histograms[b];
        const auto& pushed = ex->eta1.value >= 0.0 ? r.histograms[b] : r.histograms[a];
        const double df = collapse_distance(ref, pushed, ex->eta1.value, ex->eta2.value);
        const double dz = collapse_distance(ref, pushed, 0.0, 0.0);
        row_f.push_back(df);
        row_z.push_back(dz);
        ok = ok && df < c.tol.collapse && df < dz;
        worst = std::max(worst, df);
      }
      fitted.push_back(row_f);
      zero.push_back(row_z);
    }
    rep["collapse"] = {{"times", c.times},
                       {"reference", ex->eta1.value >= 0.0 ? "earlier time" : "later time"},
                       {"fitted_exponents", fitted},
                       {"zero_exponents", zero}};
    verdicts.add("collapse", ok, worst, c.tol.collapse,
                 "every time pair below tolerance and below the zero-exponent distance");
  }

  // Fractal dimension over the averaging sequence at each time.
  if (nk >= 3) {
    json per = json::array();
    std::vector<double> dims;
    for (std::size_t j = 0; j < nt; ++j) {
      std::vector<double> counts, ea;
      for (std::size_t k = 0; k < nk; ++k) {
        counts.push_back(r.cell(j, k).mean_points);
        ea.push_back(r.cell(j, k).quantities.mean.e_alpha);
      }
      try {
        const FractalDimension fd = fractal_dimension(counts, ea, c.quantities.alpha);
        per.push_back({{"t", c.times[j]}, {"dim", fd.dim}, {"beta", fd.beta}, {"beta_trace", fd.beta_trace},
                       {"dim_trace", fd.dim_trace}});
        dims.push_back(fd.dim);
      } catch (const Error& e) {
        per.push_back({{"t", c.times[j]}, {"error", e.what()}});
      }
    }
    json fr = {{"alpha", c.quantities.alpha}, {"per_time", per}};
    if (nt >= 2 && dims.size() == nt) {
      const double rel = std::abs(dims.back() - dims.front()) / std::abs(dims.front());
      fr["relative_change"] = rel;
      verdicts.add("fractal_constancy", rel <= c.tol.fractal_rel, rel, c.tol.fractal_rel,
                   "|dim(t_last) - dim(t_first)| / dim(t_first) <= tolerance");
    }
    rep["fractal_dimension"] = fr;
  }

  // Window-sequence diagnostics at each time.
  const ConditionIvResult civ = check_condition_iv(c.sequence(), c.tol.condition_iv_bound);
  rep["condition_iv"] = {{"bounded", civ.bounded}, {"ratio_trace", civ.ratio_trace}};
  verdicts.add("condition_iv", civ.bounded,
               civ.ratio_trace.empty() ? 0.0
                                       : *std::max_element(civ.ratio_trace.begin(), civ.ratio_trace.end()) /
                                             *std::min_element(civ.ratio_trace.begin(), civ.ratio_trace.end()),
               c.tol.condition_iv_bound, "max / min of W_{n-1}(A_k) / vol(A_k)^(1/n) <= bound");

  if (nk >= 3) {
    json pl = json::array(), erg = json::array();
    for (std::size_t j = 0; j < nt; ++j) {
      std::vector<GeometricQuantities> per_k;
      std::vector<double> counts, vols;
      for (std::size_t k = 0; k < nk; ++k) {
        per_k.push_back(r.cell(j, k).quantities.mean);
        counts.push_back(r.sample(j, k, 0).n_classes);
        vols.push_back(r.cell(j, k).volume);
      }
      try {
        const PackingCheck pc =
            packing_lemma_check(per_k, c.quantities.delta, n, c.tol.packing_bound_multiple);
        pl.push_back({{"t", c.times[j]}, {"q_trace", pc.q_trace}, {"ratio_trace", pc.ratio_trace},
                      {"median", pc.median}, {"bounded", pc.bounded}, {"tail_spread", pc.tail_spread}});
      } catch (const Error& e) {
        pl.push_back({{"t", c.times[j]}, {"error", e.what()}});
      }
      const ErgodicityResult er = ergodicity_in_persistence_test(counts, vols, c.tol.ergodicity_eps, nk - 3);
      erg.push_back({{"t", c.times[j]},
                     {"sample", 0},
                     {"max_quantity", er.max_quantity},
                     {"satisfied", er.satisfied},
                     {"smallest_index", er.smallest_index ? json(*er.smallest_index) : json()}});
    }
    rep["packing_lemma"] = pl;
    rep["ergodicity_in_persistence"] = erg;
  }

  // Per-window statistics.
  json mass = json::array();
  for (const auto& cell : r.cells)
    mass.push_back({{"t", cell.t},
                    {"k", cell.k},
                    {"per_volume", cell.quantities.mean.n_classes / cell.volume},
                    {"stderr", cell.quantities.n_classes_stderr / cell.volume}});
  rep["total_mass"] = mass;

  // Mean of the per-sample statistic next to the statistic of the pooled
  // ensemble measure, largest window.
  json conv = json::array();
  for (std::size_t j = 0; j < nt; ++j) {
    const EnsembleQuantities& eq = r.cell(j, last).quantities;
    json l_mean = json::object(), l_pooled = json::object();
    for (const auto& [q, v] : eq.mean.l) l_mean[format_number(q)] = v;
    for (const auto& [q, v] : eq.l_pooled) l_pooled[format_number(q)] = v;
    std::optional<double> pooled_max;
    for (std::size_t i = 0; i < c.ensemble_size; ++i)
      if (const auto& d = r.sample(j, last, i).d_max) pooled_max = std::max(pooled_max.value_or(*d), *d);
    conv.push_back({{"t", c.times[j]},
                    {"l_mean_of_samples", l_mean},
                    {"l_pooled", l_pooled},
                    {"d_max_mean_of_samples", eq.mean.d_max ? json(*eq.mean.d_max) : json()},
                    {"d_max_pooled", pooled_max ? json(*pooled_max) : json()}});
  }
  rep["ensemble_conventions"] = conv;

  if (!c.betti.empty()) {
    json bq = json::array();
    for (std::size_t q = 0; q < c.betti.size(); ++q) {
      json vals = json::array();
      for (const auto& cell : r.cells)
        vals.push_back({{"t", cell.t},
                        {"k", cell.k},
                        {"per_volume", cell.betti_per_volume[q]},
                        {"stderr", cell.betti_stderr[q]}});
      bq.push_back({{"degree", c.betti[q].degree}, {"r", c.betti[q].r}, {"s", c.betti[q].s}, {"values", vals}});
    }
    rep["persistent_betti"] = bq;
  }
  if (c.summary && nk >= 3) {
    json it = json::array();
    for (std::size_t j = 0; j < nt; ++j) {
      std::vector<std::vector<double>> s;
      std::vector<double> vols;
      for (std::size_t k = 0; k < nk; ++k) {
        s.push_back(r.cell(j, k).summary);
        vols.push_back(r.cell(j, k).volume);
      }
      const IntensivityResult ir = intensivity_test(s, vols, c.tol.intensivity_eps);
      it.push_back({{"t", c.times[j]}, {"cauchy", ir.cauchy}, {"sup_norm_trace", ir.sup_norm_trace}});
    }
    rep["intensivity"] = it;
  }

  rep["verdicts"] = verdicts.table;
  rep["pass"] = verdicts.pass;
  r.report = std::move(rep);
  r.pass = verdicts.pass;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  ExperimentResult r;
  r.config = config;
  const AveragingSequence seq = config.sequence();
  for (std::size_t k = 0; k < seq.size(); ++k) r.windows.push_back(seq.at(k));
  const std::size_t nt = config.times.size();
  const std::size_t nk = r.windows.size();
  const std::size_t m = config.ensemble_size;
  const std::size_t nq = config.betti.size();
  if (config.summary) r.summary_grid = config.summary->grid();
  std::vector<double> vols;
  for (std::size_t j = 0; j < nt; ++j) {
    r.time_windows.emplace_back();
    for (std::size_t k = 0; k < nk; ++k) {
      r.time_windows[j].push_back(config.window_at(k, config.times[j]));
      vols.push_back(volume(r.time_windows[j][k]));
    }
  }

  r.sample_quantities.resize(nt * nk * m);
  r.sample_betti.resize(nt * nk * m);
  r.diagrams.resize(nt * m);
  std::vector<double> point_counts(nt * nk * m);
  std::vector<std::vector<double>> sample_summary(config.summary ? nt * nk * m : 0);
  std::optional<FunctionalSummary> summary;
  if (config.summary) summary = FunctionalSummary{config.summary->kind, r.summary_grid, config.summary->sigma,
                                                  config.summary->degree};

  parallel_for(nt * m, [&](std::size_t task) {
    const std::size_t j = task / m;
    const std::size_t i = task % m;
    int k_now = -1;
    try {
      const auto& windows = r.time_windows[j];
      const PointCloud cloud = sample_cloud(config, i, j, windows.back());
      for (std::size_t k = 0; k < nk; ++k) {
        k_now = static_cast<int>(k);
        const PointCloud sub = k + 1 == nk ? cloud : cloud.restricted_to(windows[k]);
        PersistenceDiagram d = diagram_of(sub, config.complex, static_cast<int>(k));
        const std::size_t idx = (j * nk + k) * m + i;
        r.sample_quantities[idx] = quantities_from_diagram(d, config.quantities, vols[j * nk + k], static_cast<int>(k));
        point_counts[idx] = static_cast<double>(sub.size());
        for (const auto& b : config.betti) r.sample_betti[idx].push_back(persistent_betti(d, b.degree, b.r, b.s));
        if (summary) sample_summary[idx] = evaluate_summary(*summary, d);
        if (k + 1 == nk) r.diagrams[j * m + i] = std::move(d);
      }
    } catch (const Error& e) {
      throw Error(fmt::format("t={}, k={}, sample={}: {}", config.times[j], k_now, i, e.what()));
    }
  });

  for (std::size_t j = 0; j < nt; ++j)
    for (std::size_t k = 0; k < nk; ++k) {
      const std::size_t base = (j * nk + k) * m;
      ExperimentCell cell;
      cell.t = config.times[j];
      cell.k = static_cast<int>(k);
      cell.volume = vols[j * nk + k];
      cell.quantities = ensemble_quantities(std::span(r.sample_quantities).subspan(base, m));
      cell.mean_points = mean_of({point_counts.begin() + base, point_counts.begin() + base + m});
      for (std::size_t q = 0; q < nq; ++q) {
        std::vector<double> v;
        for (std::size_t i = 0; i < m; ++i) v.push_back(r.sample_betti[base + i][q] / cell.volume);
        cell.betti_per_volume.push_back(mean_of(v));
        cell.betti_stderr.push_back(stderr_of(v));
      }
      if (summary) {
        cell.summary.assign(r.summary_grid.size(), 0.0);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t s = 0; s < cell.summary.size(); ++s)
            cell.summary[s] += sample_summary[base + i][s] / static_cast<double>(m);
      }
      r.cells.push_back(std::move(cell));
    }

  // Histograms of the largest window on a grid shared by all times.
  HistogramGrid grid;
  grid.nb = config.grid.nb;
  grid.nd = config.grid.nd;
  double max_b = 0.0, max_d = 0.0;
  for (const auto& d : r.diagrams)
    for (const auto& p : d.pairs) {
      max_b = std::max(max_b, p.birth);
      max_d = std::max(max_d, p.death);
    }
  const HistogramGrid auto_grid = HistogramGrid::covering(max_b, max_d, grid.nb, grid.nd);
  grid.b_max = config.grid.b_max.value_or(auto_grid.b_max);
  grid.d_max = config.grid.d_max.value_or(auto_grid.d_max);
  for (std::size_t j = 0; j < nt; ++j) {
    const auto members = std::span<const PersistenceDiagram>(r.diagrams).subspan(j * m, m);
    const std::optional<double> per_volume =
        config.window_time_exponent != 0.0 ? std::optional<double>(vols[j * nk + nk - 1]) : std::nullopt;
    r.histograms.push_back(expectation_measure(members, grid, per_volume, config.quantities.degree));
    if (config.grid.per_degree) {
      std::vector<MeasureHistogram> per;
      const int top = r.diagrams.empty() ? 0 : r.diagrams.front().max_degree;
      for (int deg = 0; deg <= top; ++deg) per.push_back(expectation_measure(members, grid, per_volume, deg));
      r.degree_histograms.push_back(std::move(per));
    }
  }

  build_report(r);
  return r;
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const std::string& f) { return (std::filesystem::path(dir) / f).string(); };
  write_diagrams_csv(path("diagrams.csv"), r.diagrams);
  write_measure_csv(path("measure.csv"), r.histograms);
  if (!r.degree_histograms.empty()) {
    const std::size_t degrees = r.degree_histograms.front().size();
    for (std::size_t deg = 0; deg < degrees; ++deg) {
      std::vector<MeasureHistogram> per;
      for (const auto& h : r.degree_histograms) per.push_back(h[deg]);
      write_measure_csv(path(fmt::format("measure_h{}.csv", deg)), per);
    }
  }
  std::vector<GeometricQuantities> rows;
  for (const auto& cell : r.cells) rows.push_back(cell.quantities.mean);
  const double nd = r.config.dim + r.config.quantities.delta;
  write_quantities_csv(path("quantities.csv"), rows, nd);
  if (r.config.summary) {
    std::vector<std::vector<double>> values;
    for (std::size_t j = 0; j < r.config.times.size(); ++j)
      values.push_back(r.cell(j, r.windows.size() - 1).summary);
    write_summary_csv(path("summary.csv"), r.config.times, r.summary_grid, values);
  }
  std::ofstream out(path("report.json"));
  if (!out) throw Error("cannot write " + path("report.json"));
  json rounded = r.report;
  round_numbers(rounded);
  out << rounded.dump(2) << '\n';
}

}  // namespace perscale

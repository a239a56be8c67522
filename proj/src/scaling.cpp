#include "perscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean_stderr(const std::vector<double>& v, double* mean_out) {
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  const double mu = s / n;
  if (mean_out) *mean_out = mu;
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (n - 1.0) / n);
}

}  // namespace

std::vector<double> QuantitySpec::all_q() const {
  std::set<double> s(q.begin(), q.end());
  s.insert(1.0);
  s.insert(2.0);
  s.insert(n + delta);
  return {s.begin(), s.end()};
}

double GeometricQuantities::l_at(double q) const {
  const auto it = l.find(q);
  if (it == l.end()) throw Error(fmt::format("l_q for q={} was not computed", q));
  return it->second;
}

GeometricQuantities quantities_from_diagram(const PersistenceDiagram& diagram, const QuantitySpec& spec,
                                            double volume, int k) {
  GeometricQuantities g;
  g.t = diagram.provenance.t;
  g.k = k >= 0 ? k : diagram.provenance.k;
  g.volume = volume;
  const auto qs = spec.all_q();
  for (double q : qs) g.power_sums[q] = 0.0;
  double count = 0.0;
  for (const auto& p : diagram.pairs) {
    if (spec.degree && p.degree != *spec.degree) continue;
    const double pers = p.persistence();
    count += 1.0;
    for (double q : qs) g.power_sums[q] += std::pow(pers, q);
    g.pers_total += std::pow(pers, spec.pers_power);
    g.e_alpha += std::pow(pers, spec.alpha);
    g.d_max = std::max(g.d_max.value_or(0.0), p.death);
  }
  g.n_classes = count;
  if (count > 0)
    for (double q : qs) g.l[q] = std::pow(g.power_sums[q] / count, 1.0 / q);
  return g;
}

EnsembleQuantities ensemble_quantities(std::span<const GeometricQuantities> samples) {
  if (samples.empty()) throw Error("ensemble quantities of an empty ensemble");
  EnsembleQuantities e;
  GeometricQuantities& m = e.mean;
  m.t = samples.front().t;
  m.k = samples.front().k;
  m.volume = samples.front().volume;
  m.samples = samples.size();

  std::vector<double> n, dmax, ealpha, pers;
  std::map<double, std::vector<double>> lq;
  std::map<double, double> pooled_sums;
  for (const auto& s : samples) {
    n.push_back(s.n_classes);
    ealpha.push_back(s.e_alpha);
    pers.push_back(s.pers_total);
    if (s.d_max) dmax.push_back(*s.d_max);
    for (const auto& [q, v] : s.l) lq[q].push_back(v);
    for (const auto& [q, v] : s.power_sums) pooled_sums[q] += v;
  }
  e.n_classes_stderr = mean_stderr(n, &m.n_classes);
  e.e_alpha_stderr = mean_stderr(ealpha, &m.e_alpha);
  mean_stderr(pers, &m.pers_total);
  if (!dmax.empty()) {
    double mu = 0.0;
    e.d_max_stderr = mean_stderr(dmax, &mu);
    m.d_max = mu;
  }
  for (const auto& [q, v] : lq) {
    double mu = 0.0;
    e.l_stderr[q] = mean_stderr(v, &mu);
    m.l[q] = mu;
  }
  const double total_pairs = m.n_classes * static_cast<double>(samples.size());
  for (const auto& [q, s] : pooled_sums) {
    m.power_sums[q] = s / static_cast<double>(samples.size());
    if (total_pairs > 0) e.l_pooled[q] = std::pow(s / total_pairs, 1.0 / q);
  }
  return e;
}

PackingCheck packing_lemma_check(std::span<const GeometricQuantities> per_window, double delta, int n,
                                 double bound_multiple) {
  if (!(delta > 0)) throw Error("packing check needs delta > 0");
  if (per_window.size() < 3) throw Error("packing check needs at least three windows");
  PackingCheck c;
  for (const auto& g : per_window) {
    if (!g.d_max || !(*g.d_max > 0)) throw Error("packing check needs a positive maximum death in every window");
    const double l = g.l_at(n + delta);
    const double q = g.n_classes * std::pow(l, n + delta) / std::pow(*g.d_max, delta);
    c.q_trace.push_back(q);
    c.ratio_trace.push_back(q / g.volume);
  }
  c.median = median(c.ratio_trace);
  c.bounded = *std::max_element(c.ratio_trace.begin(), c.ratio_trace.end()) <= bound_multiple * c.median;
  const std::vector<double> tail(c.ratio_trace.end() - 3, c.ratio_trace.end());
  const double tail_median = median(tail);
  for (double r : tail) c.tail_spread = std::max(c.tail_spread, std::abs(r - tail_median) / tail_median);
  return c;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("power-law fit needs matching x and y");
  std::set<double> distinct(x.begin(), x.end());
  if (distinct.size() < 3) throw Error("power-law fit needs at least three distinct times");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw Error(fmt::format("power-law fit needs positive values, got ({}, {})", x[i], y[i]));
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  PowerLawFit f;
  f.points = lx.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ssr += r * r;
  }
  f.slope_stderr = std::sqrt(ssr / (m - 2.0) / sxx);
  f.r_squared = syy > 0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

ExponentReport fit_exponents(std::span<const GeometricQuantities> per_time, const std::vector<double>& q) {
  if (q.empty()) throw Error("exponent fit needs at least one q");
  std::vector<double> t, n, dmax;
  for (const auto& g : per_time) {
    t.push_back(g.t);
    n.push_back(g.n_classes);
    if (!g.d_max) throw Error(fmt::format("no finite pairs at t={}", g.t));
    dmax.push_back(*g.d_max);
  }
  ExponentReport r;
  const double q0 = *std::min_element(q.begin(), q.end());
  std::vector<double> sorted_q = q;
  std::sort(sorted_q.begin(), sorted_q.end());
  sorted_q.erase(std::unique(sorted_q.begin(), sorted_q.end()), sorted_q.end());
  for (double qq : sorted_q) {
    std::vector<double> l;
    for (const auto& g : per_time) l.push_back(g.l_at(qq));
    const PowerLawFit f = fit_power_law(t, l);
    ExponentEstimate e{fmt::format("l_{:g}", qq), f.slope, f.slope_stderr, f.r_squared};
    if (qq == q0) r.eta1 = e;
    r.eta1_estimates.push_back(e);
  }
  const PowerLawFit fd = fit_power_law(t, dmax);
  r.eta1_estimates.push_back({"d_max", fd.slope, fd.slope_stderr, fd.r_squared});
  const PowerLawFit fn = fit_power_law(t, n);
  r.eta2 = {"n_classes", -fn.slope, fn.slope_stderr, fn.r_squared};

  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t a = 0; a < r.eta1_estimates.size(); ++a) {
    const auto& ea = r.eta1_estimates[a];
    lo = std::min(lo, ea.value);
    hi = std::max(hi, ea.value);
    for (std::size_t b = a + 1; b < r.eta1_estimates.size(); ++b) {
      const auto& eb = r.eta1_estimates[b];
      const double sigma = std::hypot(ea.stderr_, eb.stderr_);
      if (std::abs(ea.value - eb.value) > 2.0 * sigma) r.eta1_consistent = false;
    }
  }
  r.eta1_spread = hi - lo;
  return r;
}

double collapse_distance(const MeasureHistogram& at_t, const MeasureHistogram& at_t_prime, double eta1, double eta2) {
  const auto& g = at_t.grid;
  const auto& gp = at_t_prime.grid;
  if (g.nb != gp.nb || g.nd != gp.nd || g.b_max != gp.b_max || g.d_max != gp.d_max)
    throw Error("collapse test needs histograms on the same grid");
  if (at_t.normalization != at_t_prime.normalization) throw Error("collapse test needs equal normalizations");
  const double mass_t = at_t.total();
  if (!(mass_t > 0) || !(at_t_prime.total() > 0)) throw Error("collapse test of an empty histogram");

  const double ratio = at_t.t / at_t_prime.t;
  const double kappa = std::pow(ratio, eta1);
  const double mass_scale = std::pow(ratio, -eta2);
  std::vector<double> mapped(g.size(), 0.0);
  double outside = 0.0;

  auto overlap = [](double lo1, double hi1, double lo2, double hi2) {
    return std::max(0.0, std::min(hi1, hi2) - std::max(lo1, lo2));
  };
  for (int i = 0; i < gp.nb; ++i) {
    for (int j = 0; j < gp.nd; ++j) {
      const double m = at_t_prime.mean[gp.index(i, j)];
      if (m == 0.0) continue;
      const double mass = m * mass_scale;
      const double b0 = kappa * gp.b_lo(i), b1 = kappa * gp.b_lo(i + 1);
      const double d0 = kappa * gp.d_lo(j), d1 = kappa * gp.d_lo(j + 1);
      const double area = (b1 - b0) * (d1 - d0);
      const int ib0 = std::max(0, static_cast<int>(std::floor(b0 / g.b_width())));
      const int ib1 = std::min(g.nb - 1, static_cast<int>(std::floor(b1 / g.b_width())));
      const int jd0 = std::max(0, static_cast<int>(std::floor(d0 / g.d_width())));
      const int jd1 = std::min(g.nd - 1, static_cast<int>(std::floor(d1 / g.d_width())));
      double placed = 0.0;
      for (int a = ib0; a <= ib1; ++a) {
        const double ob = overlap(b0, b1, g.b_lo(a), g.b_lo(a + 1));
        if (ob == 0.0) continue;
        for (int c = jd0; c <= jd1; ++c) {
          const double od = overlap(d0, d1, g.d_lo(c), g.d_lo(c + 1));
          if (od == 0.0) continue;
          const double share = mass * ob * od / area;
          mapped[g.index(a, c)] += share;
          placed += share;
        }
      }
      outside += std::max(0.0, mass - placed);
    }
  }
  double diff = outside;
  for (std::size_t b = 0; b < g.size(); ++b) diff += std::abs(at_t.mean[b] - mapped[b]);
  return diff / mass_t;
}

PackingVerdict packing_relation_verdict(double eta1, double eta2, int n, double rel_tol, double eta1_stderr,
                                        double eta2_stderr, double floor) {
  PackingVerdict v;
  const double gap = std::abs(eta2 - n * eta1);
  v.deviation = gap / std::max(std::abs(n * eta1), floor);
  const double sigma = std::hypot(eta2_stderr, n * eta1_stderr);
  v.within_two_sigma = gap <= 2.0 * sigma;
  v.pass = v.deviation <= rel_tol || v.within_two_sigma;
  return v;
}

double density_exponent_convert(double eta1, double eta2_measure) { return eta2_measure + 2.0 * eta1; }

double density_exponent_unconvert(double eta1, double eta2_density) { return eta2_density - 2.0 * eta1; }

FractalDimension fractal_dimension(const std::vector<double>& mean_point_counts,
                                   const std::vector<double>& mean_e_alpha, double alpha) {
  if (mean_point_counts.size() != mean_e_alpha.size()) throw Error("fractal dimension needs matching traces");
  if (mean_point_counts.size() < 3) throw Error("fractal dimension needs at least three windows");
  FractalDimension f;
  for (std::size_t k = 0; k < mean_point_counts.size(); ++k) {
    if (!(mean_e_alpha[k] > 0)) throw Error("fractal dimension needs positive E^alpha");
    if (!(mean_point_counts[k] > 1)) throw Error("fractal dimension needs more than one expected point");
    const double beta = std::log(mean_e_alpha[k]) / std::log(mean_point_counts[k]);
    f.beta_trace.push_back(beta);
    f.dim_trace.push_back(beta < 1 ? alpha / (1.0 - beta) : INFINITY);
  }
  f.beta = f.beta_trace.back();
  if (f.beta >= 1) throw Error(fmt::format("fractal dimension undefined: beta = {:.12g} >= 1", f.beta));
  f.dim = alpha / (1.0 - f.beta);
  return f;
}

ExtendedDiagnostic sufficiently_extended(std::span<const GeometricQuantities> per_time, double eta1, double eta2,
                                         int n, double delta) {
  if (per_time.size() < 2) throw Error("extension diagnostic needs at least two times");
  ExtendedDiagnostic d;
  std::vector<double> qs;
  double t_min = INFINITY, t_max = -INFINITY;
  for (const auto& g : per_time) {
    if (!g.d_max || !(*g.d_max > 0)) throw Error("extension diagnostic needs a positive maximum death");
    qs.push_back(g.n_classes * std::pow(g.l_at(n + delta), n + delta) / std::pow(*g.d_max, delta));
    t_min = std::min(t_min, g.t);
    t_max = std::max(t_max, g.t);
  }
  d.c_proxy = median(qs);
  d.realized_ratio = t_max / t_min;
  const double gap = std::abs(n * eta1 - eta2);
  if (gap > 1e-12) {
    const double worst = d.c_proxy / *std::min_element(qs.begin(), qs.end());
    d.required_ratio = std::pow(worst, 1.0 / gap);
    d.extended = d.realized_ratio > *d.required_ratio;
  }
  return d;
}

}  // namespace perscale

#include "perscale/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "perscale/error.hpp"
#include "perscale/geometry.hpp"
#include "perscale/oracles/delaunay_oracle.hpp"
#include "perscale/oracles/geometry_oracle.hpp"
#include "perscale/oracles/persistence_oracle.hpp"
#include "perscale/persistence.hpp"

namespace perscale::verify {

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.informational; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"oracle", "geometry", "isomorphism", "convergence", "all"};
  return names;
}

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t index, std::size_t max_points) {
  Rng rng(derive_seed(seed, index, 0));
  std::uniform_int_distribution<std::size_t> count(3, max_points);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud c;
  c.dim = 2;
  c.sample_id = static_cast<std::int64_t>(index);
  const std::size_t n = count(rng);
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({u(rng), u(rng), 0.0});
  return c;
}

FilteredComplex full_cech(const PointCloud& cloud) {
  CechOptions opt;
  opt.max_dim = 2;
  return cech_complex(cloud, opt);
}

}  // namespace

SuiteReport oracle_suite(std::size_t clouds, std::size_t max_points, std::uint64_t seed) {
  SuiteReport rep{"oracle", {}};
  std::size_t cech_ok = 0, alpha_ok = 0, betti_ok = 0, betti_total = 0;
  std::string first_failure;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.8);
  for (std::size_t i = 0; i < clouds; ++i) {
    const PointCloud cloud = random_cloud(seed, i, max_points);
    const FilteredComplex cx[2] = {full_cech(cloud), alpha_complex_2d(cloud)};
    for (int b = 0; b < 2; ++b) {
      std::string why;
      if (oracle::diagrams_match(compute_diagram(cx[b], 2), oracle::oracle_diagram(cx[b], 2), 1e-9, &why))
        ++(b == 0 ? cech_ok : alpha_ok);
      else if (first_failure.empty())
        first_failure = fmt::format("cloud {} ({}): {}", i, b == 0 ? "cech" : "alpha", why);
    }
    const PersistenceDiagram d = compute_diagram(cx[0], 2);
    for (int trial = 0; trial < 3; ++trial) {
      double r = u(rng), s = u(rng);
      if (r > s) std::swap(r, s);
      for (int deg = 0; deg <= 1; ++deg) {
        ++betti_total;
        if (persistent_betti(d, deg, r, s) == oracle::oracle_betti(cx[0], deg, r, s)) ++betti_ok;
      }
    }
  }
  const auto n = static_cast<double>(clouds);
  rep.add({"cech diagrams equal oracle", cech_ok == clouds, static_cast<double>(cech_ok), n,
           fmt::format("{}/{} clouds of <= {} points, values to 1e-9", cech_ok, clouds, max_points)});
  rep.add({"alpha diagrams equal oracle", alpha_ok == clouds, static_cast<double>(alpha_ok), n,
           fmt::format("{}/{} clouds of <= {} points, values to 1e-9", alpha_ok, clouds, max_points)});
  rep.add({"persistent Betti numbers equal oracle ranks", betti_ok == betti_total, static_cast<double>(betti_ok),
           static_cast<double>(betti_total), fmt::format("{}/{} random (degree, r, s)", betti_ok, betti_total)});
  if (!first_failure.empty()) rep.add({"first mismatch", false, 0, 0, first_failure, true});
  return rep;
}

SuiteReport isomorphism_suite(std::size_t clouds, std::size_t max_points, std::uint64_t seed) {
  SuiteReport rep{"isomorphism", {}};
  std::size_t ok = 0;
  std::string first_failure;
  for (std::size_t i = 0; i < clouds; ++i) {
    const PointCloud cloud = random_cloud(seed, i, max_points);
    std::string why;
    if (oracle::diagrams_match(compute_diagram(full_cech(cloud), 2), compute_diagram(alpha_complex_2d(cloud), 2),
                               1e-9, &why))
      ++ok;
    else if (first_failure.empty())
      first_failure = fmt::format("cloud {}: {}", i, why);
  }
  rep.add({"cech diagrams equal alpha diagrams", ok == clouds, static_cast<double>(ok), static_cast<double>(clouds),
           fmt::format("{}/{} clouds of <= {} points, values to 1e-9", ok, clouds, max_points)});
  if (!first_failure.empty()) rep.add({"first mismatch", false, 0, 0, first_failure, true});
  return rep;
}

SuiteReport geometry_suite(std::size_t mc_samples, std::uint64_t seed) {
  SuiteReport rep{"geometry", {}};
  const Region square = Region::box({0, 0}, {1, 1});
  const Region disk = Region::ball({0, 0}, 1.0);
  std::uint64_t stream = 0;
  for (const auto& [label, region] : {std::pair{"square", square}, std::pair{"ball", disk}}) {
    for (double delta : {0.1, 0.5, 1.0}) {
      const auto mc = oracle::dilated_volume_mc(region, delta, mc_samples, derive_seed(seed, stream++, 0));
      const double exact = steiner_volume(region, delta);
      const double dev = std::abs(exact - mc.value);
      rep.add({fmt::format("steiner volume {} delta={}", label, delta), dev <= 3.0 * mc.stderr_, dev,
               3.0 * mc.stderr_,
               fmt::format("steiner {:.6f} vs Monte Carlo {:.6f} ({} samples)", exact, mc.value, mc_samples)});
    }
  }

  const std::vector<double> grow{1, 2, 4, 8, 16, 32};
  struct Seq {
    const char* label;
    AveragingSequence seq;
    bool expect;
  };
  const Seq seqs[] = {
      {"cube", AveragingSequence(Region::box({0, 0, 0}, {1, 1, 1}), grow), true},
      {"ball", AveragingSequence(Region::ball({0, 0, 0}, 1.0), grow), true},
      {"simplex", AveragingSequence(Region::simplex({{0, 0}, {1, 0}, {0, 1}}), grow), true},
      {"slab", AveragingSequence(Region::box({0, 0}, {1, 1}), {1, 10, 100, 1e3, 1e4, 1e5}, {0}), false},
  };
  for (const auto& s : seqs) {
    const ConditionIvResult r = check_condition_iv(s.seq);
    const auto [lo, hi] = std::minmax_element(r.ratio_trace.begin(), r.ratio_trace.end());
    rep.add({fmt::format("surface-to-volume condition {} -> {}", s.label, s.expect ? "bounded" : "unbounded"),
             r.bounded == s.expect, *hi / *lo, 10.0, fmt::format("max/min of the ratio trace {:.4g}", *hi / *lo)});
  }

  std::size_t dt_ok = 0;
  const std::size_t dt_clouds = 20;
  for (std::size_t i = 0; i < dt_clouds; ++i) {
    const PointCloud cloud = random_cloud(seed, 1000 + i, 400);
    const auto dt = delaunay_2d(cloud);
    const auto chk = oracle::check_delaunay(dt);
    if (chk.circumcircle_violations == 0 && chk.orientation_ok && chk.adjacency_ok &&
        std::abs(chk.triangle_area - chk.hull_area) <= 1e-9 * chk.hull_area)
      ++dt_ok;
  }
  rep.add({"delaunay triangulations valid", dt_ok == dt_clouds, static_cast<double>(dt_ok),
           static_cast<double>(dt_clouds), "empty circumcircles, orientation, adjacency, hull coverage"});
  return rep;
}

ExperimentConfig convergence_config(RegionKind shape, const ConvergenceParams& p) {
  ExperimentConfig c;
  const bool ball = shape == RegionKind::Ball;
  const std::vector<double>& sizes = ball ? p.ball_radii : p.square_sides;
  if (sizes.empty()) throw ValidationError("convergence sequence needs at least one window");
  const double largest = sizes.back();
  c.name = ball ? "convergence_balls" : "convergence_squares";
  c.process.kind = ProcessSpec::Kind::Poisson;
  c.process.poisson = {p.gamma0, 0.0, 2};
  c.dim = 2;
  c.times = {1.0};
  c.window = ball ? Region::ball({0, 0}, largest) : Region::box({-largest / 2, -largest / 2}, {largest / 2, largest / 2});
  c.scales.clear();
  for (double s : sizes) c.scales.push_back(s / largest);
  c.ensemble_size = p.ensemble_size;
  c.quantities.n = 2;
  const double spacing = std::pow(p.gamma0, -0.5);
  c.betti = {{1, p.r_spacing * spacing, p.s_spacing * spacing}};
  for (const auto& [r, s] : p.info_pairs) c.betti.push_back({1, r * spacing, s * spacing});
  c.seed = p.seed;
  c.output_dir = c.name;
  return c;
}

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

void stabilization_checks(SuiteReport& rep, const ExperimentResult& r, const std::string& label,
                          const ConvergenceParams& p) {
  const std::size_t nk = r.windows_count();
  const std::size_t m = r.config.ensemble_size;
  const auto& big = r.cell(0, nk - 1);
  const auto& prev = r.cell(0, nk - 2);

  const double b1 = big.betti_per_volume[0], b0 = prev.betti_per_volume[0];
  rep.add({fmt::format("{}: persistent Betti per volume, two largest windows", label), rel_diff(b1, b0) < p.rel_tol,
           rel_diff(b1, b0), p.rel_tol,
           fmt::format("beta_1^(r,s)/vol {:.6g} vs {:.6g} (r,s)=({:.4g},{:.4g})", b1, b0, r.config.betti[0].r,
                       r.config.betti[0].s)});
  for (std::size_t q = 1; q < r.config.betti.size(); ++q) {
    const double i1 = big.betti_per_volume[q], i0 = prev.betti_per_volume[q];
    rep.add({fmt::format("{}: persistent Betti per volume at (r,s)=({:.4g},{:.4g})", label, r.config.betti[q].r,
                         r.config.betti[q].s),
             true, i0 > 0 || i1 > 0 ? rel_diff(i1, i0) : 0.0, p.rel_tol,
             fmt::format("{:.6g} vs {:.6g}; mean count in the largest window {:.4g}", i1, i0, i1 * big.volume), true});
  }

  // Paired per-sample difference of total mass per volume.
  std::vector<double> diff;
  for (std::size_t i = 0; i < m; ++i)
    diff.push_back(r.sample(0, nk - 1, i).n_classes / big.volume - r.sample(0, nk - 2, i).n_classes / prev.volume);
  double mu = 0.0;
  for (double d : diff) mu += d / static_cast<double>(m);
  double ss = 0.0;
  for (double d : diff) ss += (d - mu) * (d - mu);
  const double se = m > 1 ? std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m)) : 0.0;
  const double m1 = big.quantities.mean.n_classes / big.volume, m0 = prev.quantities.mean.n_classes / prev.volume;
  rep.add({fmt::format("{}: total mass per volume Cauchy within 2 sigma", label), std::abs(mu) <= 2.0 * se,
           std::abs(mu), 2.0 * se, fmt::format("{:.6g} vs {:.6g}, paired difference {:.4g}", m1, m0, mu)});
}

}  // namespace

ConvergenceOutcome convergence_suite(const ConvergenceParams& p) {
  ConvergenceOutcome out;
  out.report.suite = "convergence";
  out.balls = run_experiment(convergence_config(RegionKind::Ball, p));
  out.squares = run_experiment(convergence_config(RegionKind::Box, p));
  auto& rep = out.report;
  stabilization_checks(rep, out.balls, "balls", p);
  stabilization_checks(rep, out.squares, "squares", p);

  const double bb = out.balls.cells.back().betti_per_volume[0];
  const double bs = out.squares.cells.back().betti_per_volume[0];
  rep.add({"ball and square limits agree", rel_diff(bb, bs) < p.rel_tol, rel_diff(bb, bs), p.rel_tol,
           fmt::format("beta_1^(r,s)/vol {:.6g} (balls) vs {:.6g} (squares)", bb, bs)});

  // Single sample over the three largest balls.
  const std::size_t nk = out.balls.windows_count();
  std::vector<double> counts, vols;
  for (std::size_t k = 0; k < nk; ++k) {
    counts.push_back(out.balls.sample(0, k, 0).n_classes);
    vols.push_back(out.balls.cell(0, k).volume);
  }
  const ErgodicityResult er = ergodicity_in_persistence_test(counts, vols, p.ergodicity_eps, nk >= 3 ? nk - 3 : 0);
  rep.add({"ergodicity in persistence, single sample, three largest balls", er.max_quantity < p.ergodicity_eps,
           er.max_quantity, p.ergodicity_eps,
           er.smallest_index ? fmt::format("criterion holds from window index {}", *er.smallest_index)
                             : std::string("criterion holds from no window index")});

  std::vector<GeometricQuantities> per_k;
  for (std::size_t k = 0; k < nk; ++k) per_k.push_back(out.balls.cell(0, k).quantities.mean);
  const PackingCheck pc = packing_lemma_check(per_k, 1.0, 2);
  std::string trace;
  for (double v : pc.ratio_trace) trace += fmt::format("{}{:.4g}", trace.empty() ? "" : " ", v);
  rep.add({"packing ratio trace stable over the three largest balls", pc.tail_spread < p.packing_spread,
           pc.tail_spread, p.packing_spread, "q_k/vol: " + trace});
  return out;
}

std::vector<SuiteReport> run_suite(const std::string& name) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ValidationError(fmt::format("unknown suite '{}'; valid suites: {}", name, list));
  }
  std::vector<SuiteReport> out;
  const bool all = name == "all";
  if (all || name == "oracle") out.push_back(oracle_suite());
  if (all || name == "geometry") out.push_back(geometry_suite());
  if (all || name == "isomorphism") out.push_back(isomorphism_suite());
  if (all || name == "convergence") out.push_back(convergence_suite().report);
  return out;
}

void print(std::ostream& out, const SuiteReport& report) {
  for (const auto& c : report.checks) {
    const char* tag = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
    out << fmt::format("[{}] {} / {}: measured {:.6g}, tolerance {:.6g}", tag, report.suite, c.name, c.measured,
                       c.tolerance);
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
  out << fmt::format("{} suite: {}\n", report.suite, report.pass() ? "PASS" : "FAIL");
}

}  // namespace perscale::verify

#include <doctest.h>

#include <cmath>

#include "perscale/error.hpp"
#include "perscale/scaling.hpp"
#include "support.hpp"

using namespace perscale;
using doctest::Approx;

namespace {

GeometricQuantities synthetic(double t, double n_classes, double length) {
  GeometricQuantities g;
  g.t = t;
  g.n_classes = n_classes;
  for (double q : {1.0, 2.0, 3.0}) g.l[q] = length;
  g.d_max = 2.0 * length;
  return g;
}

GeometricQuantities window_quantities(double volume, double n_classes, double p, double d_max) {
  GeometricQuantities g;
  g.volume = volume;
  g.n_classes = n_classes;
  g.l[3.0] = p;
  g.d_max = d_max;
  return g;
}

// Smooth cloud of diagram points inside [0, 0.6] x [0, 1].
PersistenceDiagram smooth_diagram(double t, double scale, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PersistenceDiagram d;
  d.max_degree = 1;
  d.provenance.t = t;
  for (std::size_t i = 0; i < count; ++i) {
    const double b = 0.05 + 0.5 * u(rng) * u(rng);
    const double e = b + 0.02 + 0.35 * u(rng);
    d.pairs.push_back({1, scale * b, scale * e});
  }
  return d;
}

}  // namespace

TEST_SUITE("scaling") {

TEST_CASE("geometric quantities of a two pair diagram") {
  const auto d = test::diagram_of_pairs({{0.0, 1.0}, {0.0, 3.0}});
  QuantitySpec spec;
  const auto g = quantities_from_diagram(d, spec);
  CHECK(g.n_classes == 2.0);
  CHECK(g.l_at(1.0) == Approx(2.0));
  CHECK(g.l_at(2.0) == Approx(std::sqrt(5.0)));
  REQUIRE(g.d_max);
  CHECK(*g.d_max == Approx(3.0));
  CHECK(g.pers_total == Approx(10.0));
  CHECK(g.e_alpha == Approx(4.0));
}

TEST_CASE("single pair quantities") {
  QuantitySpec spec;
  spec.q = {1.0, 1.5, 2.0, 7.0};
  const auto g = quantities_from_diagram(test::diagram_of_pairs({{0.25, 1.75}}), spec);
  for (double q : spec.q) CHECK(g.l_at(q) == Approx(1.5));
  CHECK(*g.d_max == Approx(1.75));
}

TEST_CASE("power means grow with q toward the largest persistence") {
  QuantitySpec spec;
  spec.q = {1.0, 2.0, 4.0, 16.0, 128.0};
  const auto g = quantities_from_diagram(test::diagram_of_pairs({{0.0, 1.0}, {0.0, 3.0}, {0.5, 1.0}}), spec);
  for (std::size_t i = 1; i < spec.q.size(); ++i) CHECK(g.l_at(spec.q[i]) >= g.l_at(spec.q[i - 1]));
  CHECK(g.l_at(128.0) == Approx(3.0).epsilon(0.01));
}

TEST_CASE("empty ensemble is an error") {
  CHECK_THROWS_AS(ensemble_quantities(std::span<const GeometricQuantities>{}), Error);
}

TEST_CASE("packing lemma quantity") {
  const double p = 0.3, dm = 1.2;
  std::vector<GeometricQuantities> w;
  for (double v : {1.0, 2.0, 4.0}) w.push_back(window_quantities(v, 10.0 * v, p, dm));
  const auto c = packing_lemma_check(w, 1.0, 2);
  CHECK(c.q_trace[0] == Approx(10.0 * std::pow(p, 3.0) / dm));
  CHECK(c.bounded);
  CHECK(c.tail_spread == Approx(0.0));

  std::vector<GeometricQuantities> adv;
  for (double n : {10.0, 20.0, 40.0, 80.0}) adv.push_back(window_quantities(1.0, n, p, dm));
  CHECK_FALSE(packing_lemma_check(adv, 1.0, 2).bounded);

  w[1].d_max = 0.0;
  CHECK_THROWS_AS(packing_lemma_check(w, 1.0, 2), Error);
}

TEST_CASE("exact power laws give exact exponents") {
  std::vector<GeometricQuantities> per_time;
  for (double t : {1.0, 2.0, 4.0, 8.0}) per_time.push_back(synthetic(t, 100.0 * std::pow(t, -0.5), std::pow(t, 0.25)));
  const auto r = fit_exponents(per_time, {1.0, 2.0});
  CHECK(r.eta1.value == Approx(0.25).epsilon(1e-12));
  CHECK(r.eta2.value == Approx(0.5).epsilon(1e-12));
  CHECK(r.eta1.r_squared == Approx(1.0));
  CHECK(r.eta2.r_squared == Approx(1.0));
  for (const auto& e : r.eta1_estimates) CHECK(e.value == Approx(0.25).epsilon(1e-12));
  CHECK(r.eta1_consistent);
}

TEST_CASE("time independent quantities give zero exponents") {
  std::vector<GeometricQuantities> per_time;
  for (double t : {1.0, 2.0, 4.0}) per_time.push_back(synthetic(t, 50.0, 0.7));
  const auto r = fit_exponents(per_time, {1.0});
  CHECK(r.eta1.value == Approx(0.0));
  CHECK(r.eta2.value == Approx(0.0));
}

TEST_CASE("exponent fit input guards") {
  std::vector<GeometricQuantities> two{synthetic(1, 1, 1), synthetic(2, 1, 1)};
  CHECK_THROWS_AS(fit_exponents(two, {1.0}), Error);
  std::vector<GeometricQuantities> bad{synthetic(1, 1, 1), synthetic(2, 0, 1), synthetic(4, 1, 1)};
  CHECK_THROWS_AS(fit_exponents(bad, {1.0}), Error);
}

TEST_CASE("collapse of identical histograms is zero") {
  const HistogramGrid grid = HistogramGrid::covering(1.0, 1.0);
  const auto h = diagram_measure(smooth_diagram(2.0, 1.0, 5000, 1), grid);
  CHECK(collapse_distance(h, h, 0.25, 0.5) == Approx(0.0));
}

TEST_CASE("collapse of exactly self-similar histograms") {
  const double eta1 = 0.25, eta2 = 0.5, t = 1.0, tp = 4.0;
  const double kappa = std::pow(t / tp, eta1);
  const HistogramGrid grid{1.0, 1.0, 64, 64};
  auto early = diagram_measure(smooth_diagram(t, kappa, 400'000, 3), grid);
  const auto late = diagram_measure(smooth_diagram(tp, 1.0, 400'000, 3), grid);
  for (double& m : early.mean) m *= std::pow(t / tp, -eta2);
  const double fitted = collapse_distance(early, late, eta1, eta2);
  const double zero = collapse_distance(early, late, 0.0, 0.0);
  CHECK(fitted < 0.05);
  CHECK(zero > fitted);
}

TEST_CASE("packing relation verdict") {
  const auto a = packing_relation_verdict(0.25, 0.5, 2, 0.1);
  CHECK(a.pass);
  CHECK(a.deviation == Approx(0.0));
  CHECK_FALSE(packing_relation_verdict(0.25, 0.9, 2, 0.1).pass);
  const auto z = packing_relation_verdict(0.0, 0.0, 3, 0.1);
  CHECK(z.pass);
  CHECK(std::isfinite(z.deviation));
}

TEST_CASE("density exponent conversion") {
  CHECK(density_exponent_convert(0.25, 0.5) == Approx(1.0));
  CHECK(density_exponent_convert(0.25, 0.5) == Approx((2 + 2) * 0.25));
  CHECK(density_exponent_convert(0.0, 0.7) == Approx(0.7));
  for (double e1 : {-0.3, 0.0, 0.4})
    CHECK(density_exponent_unconvert(e1, density_exponent_convert(e1, 0.9)) == Approx(0.9));
}

TEST_CASE("fractal dimension") {
  const std::vector<double> counts{10, 100, 1000, 10000};
  std::vector<double> ea;
  for (double c : counts) ea.push_back(std::pow(c, 0.4));
  const auto f = fractal_dimension(counts, ea, 1.0);
  CHECK(f.beta == Approx(0.4));
  CHECK(f.dim == Approx(1.0 / 0.6));

  const std::vector<double> many{1e2, 1e4, 1e8, 1e16};
  const auto flat = fractal_dimension(many, {5, 5, 5, 5}, 1.0);
  for (std::size_t k = 1; k < flat.beta_trace.size(); ++k) CHECK(flat.beta_trace[k] < flat.beta_trace[k - 1]);
  CHECK(flat.dim == Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(fractal_dimension(counts, counts, 1.0), Error);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "perscale/error.hpp"
#include "perscale/measures.hpp"
#include "support.hpp"

using namespace perscale;
using doctest::Approx;

namespace {

HistogramGrid unit_grid(int bins = 10) { return HistogramGrid{1.0, 1.0, bins, bins}; }

PersistenceDiagram random_diagram(std::uint64_t seed, std::size_t max_pairs = 30) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PersistenceDiagram d;
  d.max_degree = 1;
  const std::size_t n = seed % (max_pairs + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double b = u(rng), e = u(rng);
    if (b > e) std::swap(b, e);
    if (b == e) continue;
    d.pairs.push_back({static_cast<int>(i % 2), b, e});
  }
  return d;
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("single pair histogram") {
  const auto h = diagram_measure(test::diagram_of_pairs({{0.5, 1.0}}), unit_grid());
  CHECK(h.total() == Approx(1.0));
  const auto [i, j] = h.grid.locate(0.5, 1.0);
  CHECK(h.mean[h.grid.index(i, j)] == Approx(1.0));
  CHECK(i == 5);
  CHECK(j == 9);
}

TEST_CASE("empty diagram histogram is zero") {
  const auto h = diagram_measure(PersistenceDiagram{}, unit_grid());
  for (double v : h.mean) CHECK(v == 0.0);
}

TEST_CASE("pairs outside the grid are an error") {
  CHECK_THROWS_AS(diagram_measure(test::diagram_of_pairs({{0.5, 1.5}}), unit_grid()), Error);
}

TEST_CASE("mass conservation and active bins") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto d = random_diagram(s);
    const auto h = diagram_measure(d, unit_grid(16));
    CHECK(h.total() == Approx(static_cast<double>(d.size())));
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        if (!h.grid.active(i, j)) CHECK(h.mean[h.grid.index(i, j)] == 0.0);
  }
}

TEST_CASE("expectation of identical diagrams equals the diagram measure") {
  const auto d = random_diagram(17);
  const std::vector<PersistenceDiagram> ens(7, d);
  const auto e = expectation_measure(ens, unit_grid());
  const auto single = diagram_measure(d, unit_grid());
  for (std::size_t b = 0; b < e.mean.size(); ++b) {
    CHECK(e.mean[b] == Approx(single.mean[b]));
    CHECK(e.stderr_[b] == Approx(0.0));
  }
  CHECK(e.ensemble_size == 7);
}

TEST_CASE("expectation is the bin-wise mean") {
  const std::vector<PersistenceDiagram> ens{test::diagram_of_pairs({{0.0, 1.0}}), PersistenceDiagram{}};
  const auto e = expectation_measure(ens, unit_grid());
  const auto [i, j] = e.grid.locate(0.0, 1.0);
  CHECK(e.mean[e.grid.index(i, j)] == Approx(0.5));
  CHECK(e.total() == Approx(0.5));
}

TEST_CASE("per unit volume divides once") {
  const std::vector<PersistenceDiagram> ens{test::diagram_of_pairs({{0.1, 0.4}, {0.2, 0.9}})};
  const auto e = expectation_measure(ens, unit_grid(), 4.0);
  CHECK(e.normalization == Normalization::PerUnitVolume);
  CHECK(e.volume == 4.0);
  CHECK(e.total() == Approx(0.5));
}

TEST_CASE("mixed provenance is an error") {
  auto a = test::diagram_of_pairs({{0.1, 0.4}});
  auto b = a;
  b.provenance.t = 2.0;
  const std::vector<PersistenceDiagram> ens{a, b};
  CHECK_THROWS_AS(expectation_measure(ens, unit_grid()), Error);
}

TEST_CASE("expectation is linear over a partition of the ensemble") {
  std::vector<PersistenceDiagram> all;
  for (std::uint64_t s = 0; s < 12; ++s) all.push_back(random_diagram(s + 40));
  const auto full = expectation_measure(all, unit_grid());
  const std::span<const PersistenceDiagram> span(all);
  const auto first = expectation_measure(span.subspan(0, 6), unit_grid());
  const auto second = expectation_measure(span.subspan(6), unit_grid());
  for (std::size_t b = 0; b < full.mean.size(); ++b)
    CHECK(full.mean[b] == Approx((first.mean[b] + second.mean[b]) / 2.0));
}

TEST_CASE("density estimate") {
  const std::vector<PersistenceDiagram> ens{test::diagram_of_pairs({{0.55, 0.95}})};
  const auto e = expectation_measure(ens, unit_grid(), 1.0);
  const auto dens = density_estimate(e);
  const auto [i, j] = e.grid.locate(0.55, 0.95);
  CHECK(dens[e.grid.index(i, j)] == Approx(100.0));

  MeasureHistogram flat;
  flat.grid = unit_grid(4);
  flat.mean.assign(flat.grid.size(), 0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (flat.grid.active(a, b)) flat.mean[flat.grid.index(a, b)] = 0.125;
  const auto fd = density_estimate(flat);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (flat.grid.active(a, b)) CHECK(fd[flat.grid.index(a, b)] == Approx(2.0));
}

TEST_CASE("refining the grid keeps the integrated mass") {
  std::vector<PersistenceDiagram> ens;
  for (std::uint64_t s = 0; s < 20; ++s) ens.push_back(random_diagram(s + 90));
  double mass[2];
  for (int r = 0; r < 2; ++r) {
    const auto h = expectation_measure(ens, unit_grid(8 << r), 1.0);
    const auto dens = density_estimate(h);
    const double area = h.grid.b_width() * h.grid.d_width();
    mass[r] = 0.0;
    for (double v : dens) mass[r] += v * area;
  }
  CHECK(mass[0] == Approx(mass[1]));
}

TEST_CASE("betti curve summary") {
  FunctionalSummary f;
  f.grid = {0.5, 2.0};
  const auto v = evaluate_summary(f, test::diagram_of_pairs({{0.0, 1.0}, {0.0, 3.0}}));
  CHECK(v[0] == 2.0);
  CHECK(v[1] == 1.0);
}

TEST_CASE("summaries are additive") {
  for (auto kind : {FunctionalSummary::Kind::BettiCurve, FunctionalSummary::Kind::GaussianBump}) {
    FunctionalSummary f;
    f.kind = kind;
    for (double s = 0.0; s <= 1.0; s += 0.05) f.grid.push_back(s);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const auto a = random_diagram(k), b = random_diagram(k + 100);
      auto ab = a;
      ab.pairs.insert(ab.pairs.end(), b.pairs.begin(), b.pairs.end());
      const auto va = evaluate_summary(f, a), vb = evaluate_summary(f, b), vab = evaluate_summary(f, ab);
      for (std::size_t i = 0; i < vab.size(); ++i) CHECK(vab[i] == Approx(va[i] + vb[i]));
    }
  }
}

TEST_CASE("running means of summaries stabilize") {
  FunctionalSummary f;
  for (double s = 0.0; s <= 1.0; s += 0.05) f.grid.push_back(s);
  std::vector<std::vector<double>> values;
  for (std::uint64_t k = 0; k < 1024; ++k) values.push_back(evaluate_summary(f, random_diagram(k * 7 + 3)));
  auto running = [&](std::size_t m) {
    std::vector<double> out(f.grid.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t g = 0; g < out.size(); ++g) out[g] += values[i][g] / static_cast<double>(m);
    return out;
  };
  auto gap = [&](std::size_t m) {
    const auto a = running(m), b = running(m / 2);
    double s = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) s = std::max(s, std::abs(a[g] - b[g]));
    return s;
  };
  CHECK(gap(1024) < gap(16));
}

TEST_CASE("intensivity test") {
  const std::vector<std::vector<double>> same(4, std::vector<double>{1.0, 2.0, 3.0});
  const auto ok = intensivity_test(same, {1, 1, 1, 1}, 1e-12);
  CHECK(ok.cauchy);
  for (double v : ok.sup_norm_trace) CHECK(v == 0.0);
  const auto bad = intensivity_test(same, {1, 2, 4, 8}, 1e-3);
  CHECK_FALSE(bad.cauchy);
  CHECK_THROWS_AS(intensivity_test({{1.0}, {1.0}}, {1, 1}, 0.1), Error);
}

TEST_CASE("ergodicity in persistence test") {
  const auto ok = ergodicity_in_persistence_test({10, 40, 160}, {1, 4, 16}, 0.1);
  CHECK(ok.satisfied);
  CHECK(ok.max_quantity == Approx(0.0));
  const auto bad = ergodicity_in_persistence_test({10, 10, 10}, {1, 4, 16}, 0.1);
  CHECK_FALSE(bad.satisfied);
  CHECK_THROWS_AS(ergodicity_in_persistence_test({10, 0, 10}, {1, 4, 16}, 0.1), Error);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "perscale/error.hpp"
#include "perscale/persistence.hpp"
#include "perscale/oracles/persistence_oracle.hpp"
#include "support.hpp"

using namespace perscale;
using doctest::Approx;

namespace {

PersistenceDiagram cech_diagram(const PointCloud& c, int max_dim = 2) {
  CechOptions o;
  o.max_dim = max_dim;
  return compute_diagram(cech_complex(c, o), 2);
}

PointCloud two_points() { return test::cloud2d({{0, 0}, {2, 0}}); }

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("two points merge at half their distance") {
  const auto d = cech_diagram(two_points(), 1);
  const auto h0 = d.in_degree(0);
  REQUIRE(h0.size() == 1);
  CHECK(h0[0].birth == 0.0);
  CHECK(h0[0].death == Approx(1.0));
  CHECK(d.essential_count(0) == 1);

  const auto o = oracle::oracle_diagram(alpha_complex_2d(two_points()), 2);
  REQUIRE(o.in_degree(0).size() == 1);
  CHECK(o.in_degree(0)[0].death == Approx(1.0));
}

TEST_CASE("unit square has one loop") {
  const auto c = test::cloud2d({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const auto d = compute_diagram(alpha_complex_2d(c), 2);
  const auto h1 = d.in_degree(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == Approx(0.5));
  CHECK(h1[0].death == Approx(std::numbers::sqrt2 / 2.0));
  CHECK(d.in_degree(0).size() == 3);
  CHECK(d.essential_count(0) == 1);
  CHECK(oracle::diagrams_match(d, cech_diagram(c), 1e-9));
}

TEST_CASE("equilateral triangle loop dies at the circumradius") {
  const auto c = test::cloud2d({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0}});
  const auto d = cech_diagram(c);
  const auto h1 = d.in_degree(1);
  REQUIRE(h1.size() == 1);
  CHECK(h1[0].birth == Approx(0.5));
  CHECK(h1[0].death == Approx(1.0 / std::sqrt(3.0)));
  CHECK(oracle::diagrams_match(d, oracle::oracle_diagram(cech_complex(c), 2), 1e-9));
}

TEST_CASE("empty and single point clouds have no pairs") {
  const auto empty = compute_diagram(FilteredComplex(0, {}), 2);
  CHECK(empty.pairs.empty());
  CHECK(empty.essentials.empty());
  const auto one = cech_diagram(test::cloud2d({{1, 1}}), 1);
  CHECK(one.pairs.empty());
  CHECK(one.essential_count(0) == 1);
}

TEST_CASE("persistent betti numbers of two points") {
  const auto d = cech_diagram(two_points(), 1);
  CHECK(persistent_betti(d, 0, 0.5, 0.9) == 2);
  CHECK(persistent_betti(d, 0, 0.5, 1.2) == 1);
  CHECK_THROWS_AS(persistent_betti(d, 0, 1.0, 0.5), Error);
}

TEST_CASE("truncated filtration reports survivors as essential") {
  CechOptions o;
  o.r_max = 0.6;
  const auto d = compute_diagram(cech_complex(test::cloud2d({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), o), 2);
  CHECK(d.essential_count(0) == 1);
  CHECK(d.essential_count(1) == 1);
  CHECK(d.in_degree(1).empty());
}

TEST_CASE("compute_diagram matches the oracle on random clouds") {
  int matched = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto c = test::random_cloud(3 + s % 10, 1000 + s);
    std::string why;
    matched += oracle::diagrams_match(compute_diagram(cech_complex(c), 2),
                                      oracle::oracle_diagram(cech_complex(c), 2), 1e-9, &why);
    matched += oracle::diagrams_match(compute_diagram(alpha_complex_2d(c), 2),
                                      oracle::oracle_diagram(alpha_complex_2d(c), 2), 1e-9, &why);
  }
  CHECK(matched == 80);
}

TEST_CASE("betti numbers from the diagram equal oracle ranks") {
  Rng rng(55);
  std::uniform_real_distribution<double> u(0.0, 0.8);
  int agree = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto c = test::random_cloud(10, 2000 + s);
    const auto complex = cech_complex(c);
    const auto d = compute_diagram(complex, 2);
    double r = u(rng), q = u(rng);
    if (r > q) std::swap(r, q);
    const int deg = static_cast<int>(s % 2);
    agree += persistent_betti(d, deg, r, q) == oracle::oracle_betti(complex, deg, r, q);
  }
  CHECK(agree == 100);
}

TEST_CASE("persistent betti numbers are monotone") {
  const auto d = compute_diagram(alpha_complex_2d(test::random_cloud(30, 77)), 2);
  for (int deg = 0; deg <= 1; ++deg)
    for (double r = 0.0; r <= 0.3; r += 0.02) {
      int prev = persistent_betti(d, deg, r, r);
      for (double s = r; s <= 0.4; s += 0.02) {
        const int b = persistent_betti(d, deg, r, s);
        CHECK(b <= prev);
        prev = b;
        if (r + 0.02 <= s) CHECK(persistent_betti(d, deg, r + 0.02, s) >= b);
      }
    }
}

TEST_CASE("diagrams are translation invariant") {
  const auto c = test::random_cloud(40, 31);
  auto moved = c;
  for (auto& p : moved.points) p = p + Point{12.5, -3.25, 0.0};
  CHECK(oracle::diagrams_match(compute_diagram(alpha_complex_2d(c), 2),
                               compute_diagram(alpha_complex_2d(moved), 2), 1e-9));
}

TEST_CASE("oracle size cap") {
  CHECK_THROWS_AS(oracle::oracle_diagram(cech_complex(test::random_cloud(30, 3)), 2), ResourceLimitError);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"
#include "perscale/oracles/delaunay_oracle.hpp"
#include "perscale/oracles/geometry_oracle.hpp"
#include "support.hpp"

using namespace perscale;
using doctest::Approx;

namespace {

const double kHalfDiag = std::numbers::sqrt2 / 2.0;

PointCloud square_corners() { return test::cloud2d({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<double> values_of_dim(const FilteredComplex& c, int dim) {
  std::vector<double> v;
  for (const auto& s : c.simplices())
    if (s.dim == dim) v.push_back(s.value);
  return v;
}

}  // namespace

TEST_SUITE("filtration") {

TEST_CASE("minimum enclosing ball") {
  const std::vector<Point> two{{0, 0, 0}, {2, 0, 0}};
  const Ball b = min_enclosing_ball(two, 2);
  CHECK(b.center[0] == Approx(1.0));
  CHECK(b.center[1] == Approx(0.0));
  CHECK(b.radius == Approx(1.0));

  const std::vector<Point> one{{3, -2, 0}};
  const Ball p = min_enclosing_ball(one, 2);
  CHECK(p.radius == 0.0);
  CHECK(p.center[0] == 3.0);
  CHECK(p.center[1] == -2.0);

  const auto sq = square_corners();
  const Ball s = global_enclosing_ball(sq.points, 2);
  CHECK(s.radius == Approx(kHalfDiag));
  CHECK(oracle::exhaustive_enclosing_ball(sq.points, 2).radius == Approx(kHalfDiag));

  CHECK_THROWS_AS(min_enclosing_ball(std::vector<Point>{}, 2), Error);
}

TEST_CASE("obtuse triangle ball is spanned by its longest edge") {
  const std::vector<Point> tri{{0, 0, 0}, {4, 0, 0}, {2, 0.5, 0}};
  CHECK(min_enclosing_ball(tri, 2).radius == Approx(2.0));
}

TEST_CASE("enclosing balls agree with the exhaustive search") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto c = test::random_cloud(4 + s % 6, s);
    const double r = global_enclosing_ball(c.points, 2).radius;
    CHECK(r == Approx(oracle::exhaustive_enclosing_ball(c.points, 2).radius).epsilon(1e-9));
  }
}

TEST_CASE("cech complex of two points") {
  CechOptions o;
  o.max_dim = 1;
  const auto c = cech_complex(test::cloud2d({{0, 0}, {2, 0}}), o);
  const auto edges = values_of_dim(c, 1);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == Approx(1.0));
}

TEST_CASE("cech complex of the unit square") {
  const auto c = cech_complex(square_corners());
  auto edges = values_of_dim(c, 1);
  std::sort(edges.begin(), edges.end());
  REQUIRE(edges.size() == 6);
  for (int i = 0; i < 4; ++i) CHECK(edges[static_cast<std::size_t>(i)] == Approx(0.5));
  CHECK(edges[4] == Approx(kHalfDiag));
  CHECK(edges[5] == Approx(kHalfDiag));
  const auto tris = values_of_dim(c, 2);
  CHECK(tris.size() == 4);
  for (double v : tris) CHECK(v == Approx(kHalfDiag));
}

TEST_CASE("cech complex with zero cutoff has only vertices") {
  CechOptions o;
  o.r_max = 0.0;
  const auto c = cech_complex(test::random_cloud(20, 4), o);
  CHECK(c.size() == 20);
  CHECK(c.max_dim() == 0);
}

TEST_CASE("cech complex size guard") {
  CechOptions o;
  o.max_candidates = 100;
  CHECK_THROWS_AS(cech_complex(test::random_cloud(40, 4), o), ResourceLimitError);
}

TEST_CASE("filtration order puts faces first") {
  const auto c = cech_complex(test::random_cloud(15, 9));
  for (std::size_t i = 1; i < c.size(); ++i) CHECK_FALSE(filtration_less(c[i], c[i - 1]));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (int f : c.boundary(i)) CHECK(static_cast<std::size_t>(f) < i);
}

TEST_CASE("delaunay with one interior point") {
  const auto dt = delaunay_2d(test::cloud2d({{0, 0}, {4, 0}, {0, 4}, {1, 1}}));
  CHECK(dt.triangles.size() == 3);
  // Euler: V - E + F = 1 for a triangulated disk.
  std::set<std::pair<int, int>> edges;
  for (const auto& t : dt.triangles)
    for (int i = 0; i < 3; ++i) {
      const int a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>((i + 1) % 3)];
      edges.insert({std::min(a, b), std::max(a, b)});
    }
  CHECK(4 - static_cast<int>(edges.size()) + static_cast<int>(dt.triangles.size()) == 1);
}

TEST_CASE("delaunay of cocircular points is jittered") {
  const auto dt = delaunay_2d(square_corners());
  CHECK(dt.jittered);
  CHECK(dt.triangles.size() == 2);
}

TEST_CASE("delaunay of collinear points fails") {
  CHECK_THROWS_AS(delaunay_2d(test::cloud2d({{0, 0}, {1, 1}, {2, 2}, {3, 3}})), Error);
}

TEST_CASE("delaunay circumcircles are empty") {
  const auto dt = delaunay_2d(test::random_cloud(100, 12));
  const auto check = oracle::check_delaunay(dt);
  CHECK(check.circumcircle_violations == 0);
  CHECK(check.orientation_ok);
  CHECK(check.adjacency_ok);
  CHECK(check.triangle_area == Approx(check.hull_area).epsilon(1e-9));
}

TEST_CASE("alpha complex of two points") {
  const auto c = alpha_complex_2d(test::cloud2d({{0, 0}, {3, 0}}));
  const auto edges = values_of_dim(c, 1);
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == Approx(1.5));
}

TEST_CASE("alpha complex of the unit square") {
  const auto c = alpha_complex_2d(square_corners());
  auto edges = values_of_dim(c, 1);
  std::sort(edges.begin(), edges.end());
  REQUIRE(edges.size() == 5);
  for (int i = 0; i < 4; ++i) CHECK(edges[static_cast<std::size_t>(i)] == Approx(0.5));
  CHECK(edges[4] == Approx(kHalfDiag));
  for (double v : values_of_dim(c, 2)) CHECK(v == Approx(kHalfDiag));
}

TEST_CASE("obtuse triangle: alpha uses the circumradius where Cech uses the enclosing ball") {
  const auto cloud = test::cloud2d({{0, 0}, {4, 0}, {2, 0.5}});
  const auto alpha = alpha_complex_2d(cloud);
  const auto tris = values_of_dim(alpha, 2);
  REQUIRE(tris.size() == 1);
  CHECK(tris[0] == Approx(4.25));
  // The long edge is not Gabriel and enters with its triangle.
  auto edges = values_of_dim(alpha, 1);
  std::sort(edges.begin(), edges.end());
  CHECK(edges.back() == Approx(4.25));
  CHECK(values_of_dim(cech_complex(cloud), 2)[0] == Approx(2.0));
}

TEST_CASE("alpha complexes of tiny clouds") {
  CHECK(alpha_complex_2d(PointCloud{}).size() == 0);
  CHECK(alpha_complex_2d(test::cloud2d({{1, 2}})).size() == 1);
}

TEST_CASE("complex dump") {
  const std::string path = "filtration_dump_test.csv";
  write_complex_csv(alpha_complex_2d(square_corners()), path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "dim,v0,v1,v2,filtration_value");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 4 + 5 + 2);
  std::remove(path.c_str());
}

}  // TEST_SUITE

#include <algorithm>
#include <cmath>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"

namespace perscale {

namespace {

double circumradius(const Point& a, const Point& b, const Point& c) {
  const double la = distance(b, c), lb = distance(c, a), lc = distance(a, b);
  const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  return la * lb * lc / (2.0 * std::abs(cross));
}

// Opposite vertex strictly inside the diametral disk of edge (a, b).
bool encroaches(const Point& a, const Point& b, const Point& v) {
  return dot(a - v, b - v) < 0.0;
}

}  // namespace

FilteredComplex alpha_complex_2d(const PointCloud& cloud) {
  if (cloud.dim != 2) throw Error("alpha filtration is implemented for planar clouds only");
  // Fewer than three points have no triangulation: vertices and at most one
  // edge valued by half its length.
  if (cloud.size() < 3) {
    std::vector<Simplex> simplices;
    for (int v = 0; v < static_cast<int>(cloud.size()); ++v) simplices.push_back(Simplex{{v, -1, -1, -1}, 0, 0.0});
    if (cloud.size() == 2)
      simplices.push_back(Simplex{{0, 1, -1, -1}, 1, 0.5 * distance(cloud.points[0], cloud.points[1])});
    return FilteredComplex(static_cast<int>(cloud.size()), std::move(simplices));
  }
  const DelaunayTriangulation dt = delaunay_2d(cloud);
  const std::size_t nt = dt.triangles.size();

  // Values come from the input coordinates; the jitter only decides the
  // combinatorics of cocircular configurations. A triangle that is flat in
  // the input (collinear hull points) gets half its longest edge, the value
  // its vertices have in the Cech filtration.
  const auto& p = cloud.points;
  std::vector<double> radius(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = dt.triangles[t];
    const Point &a = p[v[0]], &b = p[v[1]], &c = p[v[2]];
    const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    const double longest = std::max({squared_distance(a, b), squared_distance(b, c), squared_distance(c, a)});
    radius[t] = std::abs(cross) <= 1e-12 * longest ? 0.5 * std::sqrt(longest) : circumradius(a, b, c);
  }

  std::vector<Simplex> simplices;
  simplices.reserve(p.size() + 3 * nt);
  for (int v = 0; v < static_cast<int>(p.size()); ++v) simplices.push_back(Simplex{{v, -1, -1, -1}, 0, 0.0});

  // edge_value[t][i]: value of the edge of t opposite vertex i.
  std::vector<std::array<double, 3>> edge_value(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = dt.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int nb = dt.neighbors[t][i];
      const int a = v[(i + 1) % 3], b = v[(i + 2) % 3];
      if (nb >= 0 && nb < static_cast<int>(t)) {
        for (int j = 0; j < 3; ++j)
          if (dt.triangles[nb][j] != a && dt.triangles[nb][j] != b) edge_value[t][i] = edge_value[nb][j];
        continue;
      }
      bool gabriel = !encroaches(p[a], p[b], p[v[i]]);
      double value = radius[t];
      if (nb >= 0) {
        for (int j = 0; j < 3; ++j) {
          const int w = dt.triangles[nb][j];
          if (w != a && w != b && encroaches(p[a], p[b], p[w])) gabriel = false;
        }
        value = std::min(value, radius[nb]);
      }
      if (gabriel) value = 0.5 * distance(p[a], p[b]);
      edge_value[t][i] = value;
      simplices.push_back(Simplex{{a, b, -1, -1}, 1, value});
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = dt.triangles[t];
    // Right triangles make the circumradius and half the hypotenuse equal;
    // the max keeps the order exact under rounding.
    const double value = std::max({radius[t], edge_value[t][0], edge_value[t][1], edge_value[t][2]});
    simplices.push_back(Simplex{{v[0], v[1], v[2], -1}, 2, value});
  }
  return FilteredComplex(static_cast<int>(p.size()), std::move(simplices));
}

}  // namespace perscale

#pragma once

// Brute-force validity checks for planar Delaunay triangulations.

#include <cstddef>

#include "perscale/filtration.hpp"

namespace perscale::oracle {

struct DelaunayCheck {
  std::size_t circumcircle_violations = 0;  ///< (triangle, point) pairs with the point strictly inside
  double triangle_area = 0.0;
  double hull_area = 0.0;
  bool orientation_ok = true;   ///< every triangle counter-clockwise
  bool adjacency_ok = true;     ///< neighbor links are mutual and share an edge
};

/// O(T * N) scan of every triangle's circumcircle against every point, plus
/// area coverage of the convex hull.
DelaunayCheck check_delaunay(const DelaunayTriangulation& dt, double rel_tol = 1e-9);

double convex_hull_area(const std::vector<Point>& points);

}  // namespace perscale::oracle

#include "perscale/oracles/delaunay_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace perscale::oracle {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

double convex_hull_area(const std::vector<Point>& points) {
  std::vector<Point> p = points;
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return 0.0;
  std::vector<Point> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    area += a[0] * b[1] - a[1] * b[0];
  }
  return 0.5 * std::abs(area);
}

DelaunayCheck check_delaunay(const DelaunayTriangulation& dt, double rel_tol) {
  DelaunayCheck out;
  const auto& p = dt.points;
  for (std::size_t t = 0; t < dt.triangles.size(); ++t) {
    const auto& v = dt.triangles[t];
    const Point &a = p[v[0]], &b = p[v[1]], &c = p[v[2]];
    const double area2 = cross(a, b, c);
    if (area2 <= 0) out.orientation_ok = false;
    out.triangle_area += 0.5 * std::abs(area2);

    // Circumcenter from the perpendicular-bisector equations.
    const double bx = b[0] - a[0], by = b[1] - a[1], cx = c[0] - a[0], cy = c[1] - a[1];
    const double d = 2.0 * (bx * cy - by * cx);
    const double ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
    const double uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
    const Point center{a[0] + ux, a[1] + uy, 0.0};
    const double r = std::hypot(ux, uy);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (static_cast<int>(i) == v[0] || static_cast<int>(i) == v[1] || static_cast<int>(i) == v[2]) continue;
      if (distance(center, p[i]) < r * (1.0 - rel_tol)) ++out.circumcircle_violations;
    }

    for (int e = 0; e < 3; ++e) {
      const int nb = dt.neighbors[t][e];
      if (nb < 0) continue;
      const auto& w = dt.neighbors[static_cast<std::size_t>(nb)];
      if (std::count(w.begin(), w.end(), static_cast<int>(t)) != 1) out.adjacency_ok = false;
      const int a1 = v[(e + 1) % 3], b1 = v[(e + 2) % 3];
      const auto& nv = dt.triangles[static_cast<std::size_t>(nb)];
      if (std::count(nv.begin(), nv.end(), a1) != 1 || std::count(nv.begin(), nv.end(), b1) != 1)
        out.adjacency_ok = false;
    }
  }
  out.hull_area = convex_hull_area(p);
  return out;
}

}  // namespace perscale::oracle

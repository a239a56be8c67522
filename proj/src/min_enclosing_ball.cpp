#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"

namespace perscale {

namespace {

// Smallest ball with every support point on its boundary: the circumcenter
// inside the affine hull of the support set.
Ball circumball(const Point* support, int count, int dim) {
  if (count == 0) return {Point{}, -1.0};
  if (count == 1) return {support[0], 0.0};
  const int m = count - 1;
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) {
    const Point ui = support[i + 1] - support[0];
    rhs(i) = 0.5 * dot(ui, ui);
    for (int j = 0; j < m; ++j) gram(i, j) = dot(ui, support[j + 1] - support[0]);
  }
  const Eigen::VectorXd lam = gram.completeOrthogonalDecomposition().solve(rhs);
  Point c = support[0];
  for (int i = 0; i < m; ++i) c = c + lam(i) * (support[i + 1] - support[0]);
  for (int i = dim; i < 3; ++i) c[i] = 0.0;
  double r2 = 0.0;
  for (int i = 0; i < count; ++i) r2 = std::max(r2, squared_distance(c, support[i]));
  return {c, std::sqrt(r2)};
}

bool inside(const Ball& b, const Point& p) {
  if (b.radius < 0) return false;
  const double tol = 1e-12 * std::max(b.radius * b.radius, 1e-300);
  return squared_distance(b.center, p) <= b.radius * b.radius + tol;
}

// Welzl: smallest ball of pts[0..n) with `support` on the boundary.
Ball welzl(const Point* pts, int n, Point* support, int nsupport, int dim) {
  if (n == 0 || nsupport == dim + 1) return circumball(support, nsupport, dim);
  const Ball b = welzl(pts, n - 1, support, nsupport, dim);
  if (inside(b, pts[n - 1])) return b;
  support[nsupport] = pts[n - 1];
  return welzl(pts, n - 1, support, nsupport + 1, dim);
}

}  // namespace

Ball min_enclosing_ball(std::span<const Point> points, int dim) {
  if (points.empty()) throw Error("minimum enclosing ball of an empty point set");
  if (points.size() > static_cast<std::size_t>(dim) + 1)
    throw Error("min_enclosing_ball takes at most n+1 points; use global_enclosing_ball");
  Point support[4];
  return welzl(points.data(), static_cast<int>(points.size()), support, 0, dim);
}

Ball global_enclosing_ball(std::span<const Point> points, int dim) {
  if (points.empty()) throw Error("minimum enclosing ball of an empty point set");
  // Iterative move-to-front variant: nested loops over support sets.
  std::vector<Point> pts(points.begin(), points.end());
  std::mt19937_64 rng(0x5eed);
  std::shuffle(pts.begin(), pts.end(), rng);

  std::vector<Point> support;
  auto solve = [&](auto&& self, std::size_t n) -> Ball {
    Ball b = circumball(support.data(), static_cast<int>(support.size()), dim);
    if (static_cast<int>(support.size()) == dim + 1) return b;
    for (std::size_t i = 0; i < n; ++i) {
      if (!inside(b, pts[i])) {
        support.push_back(pts[i]);
        b = self(self, i);
        support.pop_back();
      }
    }
    return b;
  };
  return solve(solve, pts.size());
}

}  // namespace perscale

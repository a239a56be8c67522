#include "perscale/oracles/geometry_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "perscale/error.hpp"

namespace perscale::oracle {

namespace {

// Closest point of the affine hull of `pts` to p, with its barycentric
// coordinates.
std::pair<Point, std::vector<double>> project_affine(const std::vector<Point>& pts, const Point& p) {
  const int m = static_cast<int>(pts.size()) - 1;
  if (m == 0) return {pts[0], {1.0}};
  Eigen::MatrixXd a(3, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < 3; ++i) a(i, j) = pts[j + 1][i] - pts[0][i];
  Eigen::Vector3d rhs(p[0] - pts[0][0], p[1] - pts[0][1], p[2] - pts[0][2]);
  const Eigen::VectorXd lam = a.colPivHouseholderQr().solve(rhs);
  Point q = pts[0];
  std::vector<double> bary(pts.size());
  double rest = 1.0;
  for (int j = 0; j < m; ++j) {
    q = q + lam(j) * (pts[j + 1] - pts[0]);
    bary[j + 1] = lam(j);
    rest -= lam(j);
  }
  bary[0] = rest;
  return {q, bary};
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double distance_to_region(const Region& region, const Point& p) {
  const int n = region.dim();
  switch (region.kind()) {
    case RegionKind::Box: {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double e = std::max({region.lower()[i] - p[i], 0.0, p[i] - region.upper()[i]});
        s += e * e;
      }
      return std::sqrt(s);
    }
    case RegionKind::Ball:
      return std::max(0.0, distance(p, region.center()) - region.radius());
    case RegionKind::Simplex: {
      if (region.contains(p)) return 0.0;
      const auto& v = region.vertices();
      const int count = static_cast<int>(v.size());
      double best = INFINITY;
      for (int mask = 1; mask < (1 << count); ++mask) {
        std::vector<Point> face;
        for (int i = 0; i < count; ++i)
          if (mask & (1 << i)) face.push_back(v[i]);
        const auto [q, bary] = project_affine(face, p);
        if (std::all_of(bary.begin(), bary.end(), [](double b) { return b >= -1e-12; }))
          best = std::min(best, distance(p, q));
      }
      return best;
    }
  }
  throw Error("unsupported region kind");
}

MonteCarloEstimate dilated_volume_mc(const Region& region, double delta, std::size_t samples, std::uint64_t seed) {
  const int n = region.dim();
  auto [lo, hi] = region.bounding_box();
  double box_volume = 1.0;
  for (int i = 0; i < n; ++i) {
    lo[i] -= delta;
    hi[i] += delta;
    box_volume *= hi[i] - lo[i];
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    Point p{};
    for (int i = 0; i < n; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
    if (distance_to_region(region, p) <= delta) ++hits;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(samples);
  return {box_volume * f, box_volume * std::sqrt(f * (1.0 - f) / static_cast<double>(samples))};
}

std::vector<double> fitted_quermassintegrals(const Region& region, const std::vector<double>& deltas,
                                             std::size_t samples, std::uint64_t seed) {
  const int n = region.dim();
  if (deltas.size() < static_cast<std::size_t>(n + 1)) throw Error("need at least n+1 dilation radii for the fit");
  Eigen::MatrixXd a(static_cast<Eigen::Index>(deltas.size()), n + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(deltas.size()));
  for (std::size_t r = 0; r < deltas.size(); ++r) {
    for (int i = 0; i <= n; ++i) a(static_cast<Eigen::Index>(r), i) = binom(n, i) * std::pow(deltas[r], i);
    y(static_cast<Eigen::Index>(r)) = dilated_volume_mc(region, deltas[r], samples, seed + r).value;
  }
  const Eigen::VectorXd w = a.colPivHouseholderQr().solve(y);
  return {w.data(), w.data() + w.size()};
}

Ball exhaustive_enclosing_ball(std::span<const Point> points, int dim) {
  if (points.empty()) throw Error("enclosing ball of an empty point set");
  const int count = static_cast<int>(points.size());
  if (count > 20) throw Error("exhaustive enclosing ball is limited to 20 points");
  Ball best{Point{}, INFINITY};
  for (int mask = 1; mask < (1 << count); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) > dim + 1) continue;
    std::vector<Point> support;
    for (int i = 0; i < count; ++i)
      if (mask & (1 << i)) support.push_back(points[i]);
    // Circumcenter: the point of the affine hull equidistant from the support.
    Point c = support[0];
    const int m = static_cast<int>(support.size()) - 1;
    if (m > 0) {
      Eigen::MatrixXd g(m, m);
      Eigen::VectorXd rhs(m);
      for (int i = 0; i < m; ++i) {
        const Point ui = support[i + 1] - support[0];
        rhs(i) = 0.5 * dot(ui, ui);
        for (int j = 0; j < m; ++j) g(i, j) = dot(ui, support[j + 1] - support[0]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd lam = lu.solve(rhs);
      for (int i = 0; i < m; ++i) c = c + lam(i) * (support[i + 1] - support[0]);
    }
    double r = 0.0;
    for (const auto& s : support) r = std::max(r, distance(c, s));
    bool covers = true;
    for (const auto& p : points)
      if (distance(c, p) > r * (1.0 + 1e-12) + 1e-15) covers = false;
    if (covers && r < best.radius) best = {c, r};
  }
  return best;
}

}  // namespace perscale::oracle

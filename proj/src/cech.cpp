#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"

namespace perscale {

namespace {

double binomial(double n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Enclosing-ball radii are monotone under inclusion; the recursion pins that
// exactly so that rounding never puts a simplex before one of its facets.
double cech_value(const PointCloud& cloud, const int* idx, int count) {
  Point support[4];
  for (int i = 0; i < count; ++i) support[i] = cloud.points[idx[i]];
  double value = min_enclosing_ball(std::span<const Point>(support, count), cloud.dim).radius;
  if (count > 2) {
    for (int skip = 0; skip < count; ++skip) {
      int face[4], m = 0;
      for (int i = 0; i < count; ++i)
        if (i != skip) face[m++] = idx[i];
      value = std::max(value, cech_value(cloud, face, m));
    }
  }
  return value;
}

}  // namespace

FilteredComplex cech_complex(const PointCloud& cloud, const CechOptions& options) {
  const int n = cloud.dim;
  const int npts = static_cast<int>(cloud.size());
  if (npts == 0) throw Error("Cech complex of an empty cloud");
  if (options.max_dim < 1 || options.max_dim > n)
    throw Error(fmt::format("Cech max_dim must lie in [1, {}], got {}", n, options.max_dim));
  if (binomial(npts, options.max_dim + 1) > options.max_candidates)
    throw ResourceLimitError(fmt::format("Cech complex of {} points up to dimension {} exceeds the simplex cap",
                                         npts, options.max_dim));

  const double global = global_enclosing_ball(cloud.points, n).radius;
  const double r_max = options.r_max.value_or(global);
  if (r_max < 0) throw Error("Cech cutoff radius must be >= 0");
  const bool truncated = options.r_max.has_value() && r_max < global;
  // With the automatic cutoff every simplex is kept: rounding must not drop a
  // simplex whose radius equals the global one.
  const double cutoff = options.r_max.has_value() ? r_max : INFINITY;

  std::vector<Simplex> simplices;
  for (int v = 0; v < npts; ++v) simplices.push_back(Simplex{{v, -1, -1, -1}, 0, 0.0});

  // Every face of a Cech simplex is a Cech simplex, so candidates grow as
  // cliques of the edge graph.
  std::vector<std::vector<int>> higher(npts);
  for (int a = 0; a < npts; ++a)
    for (int b = a + 1; b < npts; ++b)
      if (0.5 * distance(cloud.points[a], cloud.points[b]) <= cutoff) higher[a].push_back(b);

  std::vector<int> current;
  auto grow = [&](auto&& self, const std::vector<int>& candidates) -> void {
    for (int v : candidates) {
      current.push_back(v);
      const double value = cech_value(cloud, current.data(), static_cast<int>(current.size()));
      if (value <= cutoff) {
        Simplex s;
        s.dim = static_cast<int>(current.size()) - 1;
        std::copy(current.begin(), current.end(), s.vertices.begin());
        s.value = value;
        simplices.push_back(s);
        if (s.dim < options.max_dim) {
          std::vector<int> next;
          for (int w : higher[v])
            if (std::find(candidates.begin(), candidates.end(), w) != candidates.end()) next.push_back(w);
          self(self, next);
        }
      }
      current.pop_back();
    }
  };
  for (int a = 0; a < npts; ++a) {
    current = {a};
    grow(grow, higher[a]);
  }
  return FilteredComplex(npts, std::move(simplices), r_max, truncated, options.max_dim);
}

}  // namespace perscale

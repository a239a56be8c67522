#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "perscale/persistence.hpp"
#include "perscale/sampling.hpp"

namespace perscale::test {

inline PointCloud cloud2d(const std::vector<std::pair<double, double>>& xy) {
  PointCloud c;
  c.dim = 2;
  for (const auto& [x, y] : xy) c.points.push_back({x, y, 0.0});
  return c;
}

inline PointCloud random_cloud(std::size_t n, std::uint64_t seed, double side = 1.0) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  PointCloud c;
  c.dim = 2;
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({u(rng), u(rng), 0.0});
  return c;
}

inline PersistenceDiagram diagram_of_pairs(const std::vector<std::pair<double, double>>& bd, int degree = 0) {
  PersistenceDiagram d;
  d.max_degree = degree;
  for (const auto& [b, e] : bd) d.pairs.push_back({degree, b, e});
  return d;
}

}  // namespace perscale::test

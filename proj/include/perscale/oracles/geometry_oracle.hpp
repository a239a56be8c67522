#pragma once

// Monte Carlo and exhaustive reference computations for the geometry and
// enclosing-ball code.

#include <cstdint>
#include <span>
#include <vector>

#include "perscale/filtration.hpp"
#include "perscale/geometry.hpp"

namespace perscale::oracle {

/// Euclidean distance from p to the region (0 inside). Simplices use a
/// projection onto every face.
double distance_to_region(const Region& region, const Point& p);

struct MonteCarloEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Hit-or-miss estimate of vol(region + delta B) with uniform proposals on
/// the bounding box grown by delta.
MonteCarloEstimate dilated_volume_mc(const Region& region, double delta, std::size_t samples, std::uint64_t seed);

/// Least-squares fit of the Steiner polynomial sum_i C(n,i) W_i delta^i to
/// Monte Carlo dilated volumes; returns W_0..W_n.
std::vector<double> fitted_quermassintegrals(const Region& region, const std::vector<double>& deltas,
                                             std::size_t samples, std::uint64_t seed);

/// Smallest enclosing ball by trying the circumball of every subset of at
/// most n+1 points.
Ball exhaustive_enclosing_ball(std::span<const Point> points, int dim);

}  // namespace perscale::oracle

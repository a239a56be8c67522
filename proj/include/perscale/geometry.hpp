#pragma once

// Observation windows and convex averaging sequences.
//
// Supported windows are axis-aligned boxes, closed balls and simplices in
// R^2 or R^3. All of them admit closed forms for the Lebesgue volume and the
// intrinsic volumes, which is what the Steiner polynomial and the
// surface-to-volume condition on averaging sequences need.

#include <string>
#include <vector>

#include "perscale/point.hpp"

namespace perscale {

enum class RegionKind { Box, Ball, Simplex };

std::string to_string(RegionKind kind);

class Region {
 public:
  /// Axis-aligned box [lower, upper]. `lower.size()` fixes the dimension.
  static Region box(const std::vector<double>& lower, const std::vector<double>& upper);
  static Region ball(const std::vector<double>& center, double radius);
  /// Simplex spanned by n+1 vertices in R^n (each vertex has n coordinates).
  static Region simplex(const std::vector<std::vector<double>>& vertices);

  RegionKind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Box corners (Box only).
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  /// Ball center and radius (Ball only).
  const Point& center() const { return lower_; }
  double radius() const { return radius_; }
  /// Simplex vertices (Simplex only).
  const std::vector<Point>& vertices() const { return vertices_; }

  /// Zero n-volume: a box side or radius <= 0, or affinely dependent vertices.
  bool is_degenerate() const;

  bool contains(const Point& p) const;

  /// Axis-aligned bounding box as (lower, upper).
  std::pair<Point, Point> bounding_box() const;

  /// Center used for nesting: box midpoint, ball center, simplex centroid.
  Point reference_point() const;

  /// Homothetic copy: x -> about + factor * (x - about).
  Region scaled(double factor, const Point& about) const;

  /// Box only: stretch the listed axes by `factor` about `about`, keep the rest.
  Region stretched(double factor, const Point& about, const std::vector<int>& axes) const;

  std::string describe() const;

 private:
  Region() = default;
  RegionKind kind_ = RegionKind::Box;
  int dim_ = 2;
  Point lower_{};
  Point upper_{};
  double radius_ = 0.0;
  std::vector<Point> vertices_;
};

/// Volume of the unit ball in R^j, j in [0, 3].
double unit_ball_volume(int j);

/// Exact Lebesgue measure. Throws perscale::Error for a degenerate region.
double volume(const Region& region);

/// Intrinsic volumes V_0..V_n (V_n = volume, V_{n-1} = half the surface area,
/// V_0 = 1).
std::vector<double> intrinsic_volumes(const Region& region);

/// Quermassintegral W_i, i in [0, n]; W_0 is the volume and W_n the unit-ball
/// volume.
double quermassintegral(const Region& region, int i);

/// Volume of the parallel body region + delta * B_1(0) via the Steiner
/// polynomial.
double steiner_volume(const Region& region, double delta);

/// Nested homothetic copies A_k of a base shape. When `axes` is non-empty
/// only those axes are scaled (boxes only), which admits slab-like sequences
/// that break the surface-to-volume condition.
struct AveragingSequence {
  Region base;
  std::vector<double> scales;
  std::vector<int> axes;
  Point about{};

  AveragingSequence(Region base_region, std::vector<double> scale_factors,
                    std::vector<int> scaled_axes = {});

  std::size_t size() const { return scales.size(); }
  Region at(std::size_t k) const;
};

struct ConditionIvResult {
  bool bounded = false;
  std::vector<double> ratio_trace;  ///< W_{n-1}(A_k) / vol(A_k)^{1/n}
};

/// Surface-to-volume control W_{n-1}(A_k) = O(vol(A_k)^{1/n}), operationalized
/// as max/min of the ratio trace staying below `bound`.
ConditionIvResult check_condition_iv(const AveragingSequence& seq, double bound = 10.0);

}  // namespace perscale

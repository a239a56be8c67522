#pragma once

// Point-cloud samplers for the two worked point-process families:
// time-dependent Poisson processes with power-law intensity, and uniform
// samples from sublevel sets of self-similar random fields.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "perscale/geometry.hpp"
#include "perscale/point.hpp"

namespace perscale {

struct PointCloud {
  int dim = 2;
  std::vector<Point> points;
  std::int64_t sample_id = 0;
  double t = 1.0;
  std::optional<Region> region;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Points of this cloud lying in `window` (same sample id and time).
  PointCloud restricted_to(const Region& window) const;
};

/// Deterministic 64-bit seed mixing (splitmix64 finalizer chained over the
/// inputs).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t sample_index, std::uint64_t time_index);

using Rng = std::mt19937_64;

/// Uniform point in a non-degenerate region.
Point uniform_point(const Region& region, Rng& rng);

/// Poisson process whose intensity decays as gamma0 * t^(-n * eta1).
struct PoissonFamily {
  double gamma0 = 1.0;
  double eta1 = 0.0;
  int dim = 2;

  double intensity(double t) const;
};

struct PoissonOptions {
  double max_expected_points = 1e7;
};

PointCloud sample_poisson(const PoissonFamily& family, double t, const Region& region, std::uint64_t seed,
                          const PoissonOptions& options = {});

/// Y(t, x) = t^alpha * Y0(t^beta * x) with Y0 a finite Fourier sum
///   Y0(x) = sqrt(2 / F) * sum_j cos(k_j . x + phi_j),
/// phases uniform on [0, 2 pi). Wave vectors have uniformly random direction
/// and magnitude uniform in [k_min, k_max].
class ScalingField {
 public:
  struct Params {
    double alpha = 0.0;
    double beta = 0.25;
    double kappa = 2.0;
    double nu = 0.5;
    int points = 2000;
    int modes = 32;
    double k_min = 1.0;
    double k_max = 2.0;
    int dim = 2;
  };

  ScalingField(const Params& params, std::uint64_t field_seed);

  const Params& params() const { return params_; }

  double base(const Point& x) const;
  double value(double t, const Point& x) const;
  /// f(Y) = |Y|^kappa, homogeneous of degree kappa.
  double level(double t, const Point& x) const;
  bool in_sublevel(double t, const Point& x, double nu) const;

 private:
  Params params_;
  std::vector<Point> wave_vectors_;
  std::vector<double> phases_;
  double amplitude_ = 1.0;
};

struct SublevelOptions {
  std::size_t probe_batch = 10000;
  double min_acceptance = 1e-4;
};

/// Exactly `field.params().points` i.i.d. uniform points of
/// {x in region : |Y(t,x)|^kappa <= nu}, by rejection against uniform
/// proposals on the region.
PointCloud sample_sublevel(const ScalingField& field, double t, const Region& region, std::uint64_t seed,
                           const SublevelOptions& options = {});

/// Redraw exact duplicate coordinates so the cloud is simple. `redraw`
/// produces a replacement point.
template <typename Redraw>
void enforce_distinct(std::vector<Point>& pts, Redraw&& redraw);

}  // namespace perscale

#include "perscale/detail/distinct.hpp"

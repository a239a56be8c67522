#include "perscale/sampling.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t sample_index, std::uint64_t time_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ splitmix64(sample_index + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ splitmix64(time_index + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

PointCloud PointCloud::restricted_to(const Region& window) const {
  PointCloud out;
  out.dim = dim;
  out.sample_id = sample_id;
  out.t = t;
  out.region = window;
  for (const auto& p : points)
    if (window.contains(p)) out.points.push_back(p);
  return out;
}

Point uniform_point(const Region& region, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = region.dim();
  switch (region.kind()) {
    case RegionKind::Box: {
      Point p{};
      for (int i = 0; i < n; ++i) p[i] = region.lower()[i] + (region.upper()[i] - region.lower()[i]) * u(rng);
      return p;
    }
    case RegionKind::Ball: {
      const double r = region.radius();
      for (;;) {
        Point d{};
        double rr = 0.0;
        for (int i = 0; i < n; ++i) {
          d[i] = 2.0 * u(rng) - 1.0;
          rr += d[i] * d[i];
        }
        if (rr <= 1.0) return region.center() + r * d;
      }
    }
    case RegionKind::Simplex: {
      // Normalized exponential spacings are uniform on the standard simplex.
      std::exponential_distribution<double> e(1.0);
      std::vector<double> w(n + 1);
      double sum = 0.0;
      for (auto& x : w) sum += (x = e(rng));
      Point p{};
      for (int j = 0; j <= n; ++j) p = p + (w[j] / sum) * region.vertices()[j];
      for (int i = n; i < 3; ++i) p[i] = 0.0;
      return p;
    }
  }
  return {};
}

double PoissonFamily::intensity(double t) const { return gamma0 * std::pow(t, -dim * eta1); }

PointCloud sample_poisson(const PoissonFamily& family, double t, const Region& region, std::uint64_t seed,
                          const PoissonOptions& options) {
  if (!(t >= 1.0)) throw Error(fmt::format("Poisson family is defined for t >= 1, got t = {}", t));
  if (!(family.gamma0 > 0)) throw Error("Poisson intensity gamma0 must be positive");
  if (family.eta1 < 0) throw Error("Poisson exponent eta1 must be >= 0");
  if (region.dim() != family.dim) throw Error("region dimension does not match the Poisson family");

  PointCloud cloud;
  cloud.dim = family.dim;
  cloud.t = t;
  cloud.region = region;
  if (region.is_degenerate()) return cloud;

  const double expected = family.intensity(t) * volume(region);
  if (expected > options.max_expected_points)
    throw ResourceLimitError(fmt::format("expected point count {:.6g} exceeds the cap {:.6g}", expected,
                                         options.max_expected_points));
  Rng rng(seed);
  std::poisson_distribution<long long> count(expected);
  const long long n = count(rng);
  cloud.points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) cloud.points.push_back(uniform_point(region, rng));
  enforce_distinct(cloud.points, [&] { return uniform_point(region, rng); });
  return cloud;
}

ScalingField::ScalingField(const Params& params, std::uint64_t field_seed) : params_(params) {
  if (params.modes < 1) throw Error("scaling field needs at least one Fourier mode");
  if (!(params.kappa > 0)) throw Error("homogeneity degree kappa must be positive");
  if (!(params.nu > 0)) throw Error("sublevel threshold nu must be positive");
  if (!(params.k_min > 0) || params.k_max < params.k_min) throw Error("invalid wave-number range");
  if (params.dim != 2 && params.dim != 3) throw Error("scaling field dimension must be 2 or 3");

  Rng rng(field_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int j = 0; j < params.modes; ++j) {
    Point dir{};
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int i = 0; i < params.dim; ++i) {
        dir[i] = g(rng);
        norm += dir[i] * dir[i];
      }
    } while (norm == 0.0);
    const double k = params.k_min + (params.k_max - params.k_min) * u(rng);
    wave_vectors_.push_back((k / std::sqrt(norm)) * dir);
    phases_.push_back(2.0 * std::numbers::pi * u(rng));
  }
  amplitude_ = std::sqrt(2.0 / params.modes);
}

double ScalingField::base(const Point& x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < wave_vectors_.size(); ++j) s += std::cos(dot(wave_vectors_[j], x) + phases_[j]);
  return amplitude_ * s;
}

double ScalingField::value(double t, const Point& x) const {
  return std::pow(t, params_.alpha) * base(std::pow(t, params_.beta) * x);
}

double ScalingField::level(double t, const Point& x) const {
  return std::pow(std::abs(value(t, x)), params_.kappa);
}

bool ScalingField::in_sublevel(double t, const Point& x, double nu) const { return level(t, x) <= nu; }

PointCloud sample_sublevel(const ScalingField& field, double t, const Region& region, std::uint64_t seed,
                           const SublevelOptions& options) {
  const auto& par = field.params();
  if (region.dim() != par.dim) throw Error("region dimension does not match the scaling field");
  if (par.points < 1) throw Error("sublevel sampler needs at least one point");
  if (region.is_degenerate()) throw Error("sublevel sampler needs a non-degenerate region");

  Rng rng(seed);
  PointCloud cloud;
  cloud.dim = par.dim;
  cloud.t = t;
  cloud.region = region;

  std::size_t accepted_in_probe = 0;
  std::size_t proposals = 0;
  auto draw = [&]() -> Point {
    for (;;) {
      const Point p = uniform_point(region, rng);
      ++proposals;
      const bool ok = field.in_sublevel(t, p, par.nu);
      if (proposals <= options.probe_batch) {
        accepted_in_probe += ok;
        if (proposals == options.probe_batch &&
            static_cast<double>(accepted_in_probe) < options.min_acceptance * static_cast<double>(proposals))
          throw Error(fmt::format("sublevel set too thin: acceptance {} / {} at t = {:.6g}", accepted_in_probe,
                                  proposals, t));
      }
      if (ok) return p;
    }
  };
  cloud.points.reserve(static_cast<std::size_t>(par.points));
  for (int i = 0; i < par.points; ++i) cloud.points.push_back(draw());
  enforce_distinct(cloud.points, draw);
  return cloud;
}

}  // namespace perscale

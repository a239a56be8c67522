#pragma once

// Self-check suites behind `perscale verify` and the acceptance binary.

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "perscale/config.hpp"
#include "perscale/experiment.hpp"

namespace perscale::verify {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
  bool informational = false;  ///< printed but never fails the suite
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  bool pass() const;
  void add(Check c) { checks.push_back(std::move(c)); }
};

/// oracle, geometry, isomorphism, convergence, all.
const std::vector<std::string>& suite_names();

/// Throws ValidationError listing the valid names for an unknown suite.
std::vector<SuiteReport> run_suite(const std::string& name);

/// compute_diagram against the brute-force oracle on random planar clouds,
/// under both the Cech and the alpha backend.
SuiteReport oracle_suite(std::size_t clouds = 100, std::size_t max_points = 12, std::uint64_t seed = 101);

/// Cech and alpha diagrams of the same random planar clouds.
SuiteReport isomorphism_suite(std::size_t clouds = 50, std::size_t max_points = 60, std::uint64_t seed = 202);

/// Steiner volumes against Monte Carlo dilation, the surface-to-volume
/// condition on standard sequences, and Delaunay validity.
SuiteReport geometry_suite(std::size_t mc_samples = 10'000'000, std::uint64_t seed = 303);

struct ConvergenceParams {
  double gamma0 = 100.0;
  std::size_t ensemble_size = 20;
  std::vector<double> ball_radii{2, 4, 8, 16};
  std::vector<double> square_sides{4, 8, 16, 32};
  /// (r, s) of the persistent Betti query in units of the mean spacing
  /// gamma0^(-1/n).
  double r_spacing = 0.6;
  double s_spacing = 0.8;
  /// Further (r, s) pairs, same units, reported for information only.
  std::vector<std::pair<double, double>> info_pairs{{0.03, 0.06}, {0.3, 0.6}};
  double rel_tol = 0.05;
  double ergodicity_eps = 0.1;
  double packing_spread = 0.2;
  std::uint64_t seed = 404;
};

/// Static Poisson over nested balls or squares centered at the origin.
ExperimentConfig convergence_config(RegionKind shape, const ConvergenceParams& p);

struct ConvergenceOutcome {
  SuiteReport report;
  ExperimentResult balls;
  ExperimentResult squares;
};

/// Stabilization of persistent Betti numbers and total mass per unit volume,
/// shape independence of the limit, single-sample ergodicity in persistence
/// and the packing ratio trace over the ball sequence.
ConvergenceOutcome convergence_suite(const ConvergenceParams& p = {});

void print(std::ostream& out, const SuiteReport& report);

}  // namespace perscale::verify

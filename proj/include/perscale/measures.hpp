#pragma once

// Binned persistence diagram measures, their Monte Carlo expectations, and
// additive functional summaries.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perscale/persistence.hpp"

namespace perscale {

/// Rectangular binning of [0, b_max] x [0, d_max]. A bin is active when it
/// meets the half-plane d > b, i.e. when its upper death edge exceeds its
/// lower birth edge; every finite pair lands in an active bin.
struct HistogramGrid {
  double b_max = 1.0;
  double d_max = 1.0;
  int nb = 64;
  int nd = 64;

  double b_width() const { return b_max / nb; }
  double d_width() const { return d_max / nd; }
  double b_lo(int i) const { return i * b_width(); }
  double d_lo(int j) const { return j * d_width(); }
  bool active(int i, int j) const { return d_lo(j + 1) > b_lo(i); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nd + j; }
  std::size_t size() const { return static_cast<std::size_t>(nb) * nd; }

  /// Bin of (b, d); a value on the upper edge goes to the last bin. Throws
  /// perscale::Error if the pair lies outside the grid.
  std::pair<int, int> locate(double b, double d) const;

  /// Grid with the default 1.05 margin over the given maxima.
  static HistogramGrid covering(double max_birth, double max_death, int nb = 64, int nd = 64);
};

enum class Normalization { RawCounts, PerSampleMean, PerUnitVolume };

std::string to_string(Normalization n);

struct MeasureHistogram {
  HistogramGrid grid;
  std::vector<double> mean;    ///< per bin; inactive bins stay 0
  std::vector<double> stderr_; ///< standard error of the mean per bin (0 for a single sample)
  Normalization normalization = Normalization::RawCounts;
  double t = 1.0;
  std::string region;
  std::size_t ensemble_size = 1;
  double volume = 1.0;         ///< divisor applied for PerUnitVolume, else 1
  std::optional<int> degree;   ///< nullopt: all degrees pooled

  /// Standard error of the total mass across the ensemble.
  double total_stderr = 0.0;

  double total() const;
};

/// Raw-count histogram of one diagram's finite pairs (optionally a single
/// degree).
MeasureHistogram diagram_measure(const PersistenceDiagram& diagram, const HistogramGrid& grid,
                                 std::optional<int> degree = std::nullopt);

/// Bin-wise mean and standard error over an ensemble sharing (t, region).
/// With `volume` set the result is divided by it once (PerUnitVolume).
MeasureHistogram expectation_measure(std::span<const PersistenceDiagram> diagrams, const HistogramGrid& grid,
                                     std::optional<double> volume = std::nullopt,
                                     std::optional<int> degree = std::nullopt);

/// Mass per bin divided by the bin area: a piecewise-constant density on the
/// diagram plane. Inactive bins are 0.
std::vector<double> density_estimate(const MeasureHistogram& hist);

struct FunctionalSummary {
  enum class Kind { BettiCurve, GaussianBump };
  Kind kind = Kind::BettiCurve;
  std::vector<double> grid;
  double sigma = 0.1;            ///< GaussianBump width
  std::optional<int> degree;
};

/// Pointwise sum over the diagram's pairs of the per-pair kernel:
/// 1[b <= s < d] or pers * exp(-(s - (b + d) / 2)^2 / (2 sigma^2)).
std::vector<double> evaluate_summary(const FunctionalSummary& summary, const PersistenceDiagram& diagram);

struct IntensivityResult {
  bool cauchy = false;
  std::vector<double> sup_norm_trace;  ///< ||S_{k+1}/vol_{k+1} - S_k/vol_k||_inf
};

IntensivityResult intensivity_test(const std::vector<std::vector<double>>& summaries,
                                   const std::vector<double>& volumes, double epsilon);

struct ErgodicityResult {
  bool satisfied = false;
  /// |1 - n_l/n_k * vol_k/vol_l| for every pair k < l with k >= start_index.
  std::vector<std::vector<double>> quantity;
  double max_quantity = 0.0;
  /// Smallest start index from which every pair stays below epsilon.
  std::optional<std::size_t> smallest_index;
};

ErgodicityResult ergodicity_in_persistence_test(const std::vector<double>& counts, const std::vector<double>& volumes,
                                                double epsilon, std::size_t start_index = 0);

}  // namespace perscale

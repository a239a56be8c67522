#pragma once

// Geometric quantities of persistence diagrams, power-law exponent fits,
// rescaling collapse of binned measures, and the packing relation.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perscale/measures.hpp"
#include "perscale/persistence.hpp"

namespace perscale {

struct QuantitySpec {
  int n = 2;                     ///< ambient dimension
  std::vector<double> q{1.0, 2.0};
  double delta = 1.0;            ///< packing exponent offset; l_{n+delta} is always computed
  double pers_power = 2.0;       ///< k in Pers_k
  double alpha = 1.0;            ///< alpha in E^alpha
  std::optional<int> degree;     ///< nullopt: all degrees pooled

  /// q values for which l_q is evaluated: 1, 2, n+delta and the configured ones.
  std::vector<double> all_q() const;
};

struct GeometricQuantities {
  double t = 1.0;
  int k = -1;
  double volume = 1.0;
  double n_classes = 0.0;
  std::map<double, double> power_sums;  ///< q -> sum of pers^q
  std::map<double, double> l;           ///< q -> l_q; empty without finite pairs
  std::optional<double> d_max;
  double pers_total = 0.0;
  double e_alpha = 0.0;
  std::size_t samples = 1;

  /// l_q, throwing if it was not computed.
  double l_at(double q) const;
};

GeometricQuantities quantities_from_diagram(const PersistenceDiagram& diagram, const QuantitySpec& spec,
                                            double volume = 1.0, int k = -1);

struct EnsembleQuantities {
  GeometricQuantities mean;             ///< ensemble means of the per-sample statistics
  std::map<double, double> l_pooled;    ///< l_q of the pooled ensemble measure
  double n_classes_stderr = 0.0;
  std::map<double, double> l_stderr;
  double d_max_stderr = 0.0;
  double e_alpha_stderr = 0.0;
};

/// Throws perscale::Error for an empty ensemble.
EnsembleQuantities ensemble_quantities(std::span<const GeometricQuantities> samples);

struct PackingCheck {
  std::vector<double> q_trace;       ///< n * l_{n+delta}^{n+delta} / d_max^delta per window
  std::vector<double> ratio_trace;   ///< q_k / vol(A_k)
  double median = 0.0;               ///< median of ratio_trace
  bool bounded = false;              ///< max(ratio_trace) <= bound_multiple * median
  double tail_spread = 0.0;          ///< max relative deviation from the median over the last three windows
};

PackingCheck packing_lemma_check(std::span<const GeometricQuantities> per_window, double delta, int n,
                                 double bound_multiple = 2.0);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 1.0;
  std::size_t points = 0;
};

/// Ordinary least squares of log y on log x. Needs >= 3 distinct x and
/// positive values.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct ExponentEstimate {
  std::string quantity;
  double value = 0.0;
  double stderr_ = 0.0;
  double r_squared = 1.0;
};

struct ExponentReport {
  std::vector<ExponentEstimate> eta1_estimates;  ///< from each l_q and from d_max
  ExponentEstimate eta1;                         ///< from l_q at the smallest configured q
  ExponentEstimate eta2;                         ///< minus the slope of n_classes
  bool eta1_consistent = true;                   ///< all pairs of eta1 estimates within 2 combined sigma
  double eta1_spread = 0.0;                      ///< max - min of the eta1 estimates
  std::string convention = "measure";
};

ExponentReport fit_exponents(std::span<const GeometricQuantities> per_time, const std::vector<double>& q);

/// Normalized L1 distance between the histogram at t and the one at t'
/// pushed through (b, d) -> (t/t')^eta1 (b, d) with mass scaled by
/// (t/t')^-eta2 and rebinned by area overlap. Mass leaving the grid counts
/// as difference.
double collapse_distance(const MeasureHistogram& at_t, const MeasureHistogram& at_t_prime, double eta1, double eta2);

struct PackingVerdict {
  bool pass = false;
  double deviation = 0.0;
  bool within_two_sigma = false;
};

PackingVerdict packing_relation_verdict(double eta1, double eta2, int n, double rel_tol, double eta1_stderr = 0.0,
                                        double eta2_stderr = 0.0, double floor = 1e-9);

/// Exponent of the Lebesgue density on the diagram plane from the exponent
/// of the measure: eta2 + 2 eta1.
double density_exponent_convert(double eta1, double eta2_measure);
double density_exponent_unconvert(double eta1, double eta2_density);

struct FractalDimension {
  double dim = 0.0;
  double beta = 0.0;
  std::vector<double> beta_trace;
  std::vector<double> dim_trace;
};

/// beta_k = log E[E^alpha(A_k)] / log E[N(A_k)], reported at the largest k.
FractalDimension fractal_dimension(const std::vector<double>& mean_point_counts,
                                   const std::vector<double>& mean_e_alpha, double alpha);

struct ExtendedDiagnostic {
  double realized_ratio = 1.0;             ///< t_max / t_min
  std::optional<double> required_ratio;    ///< empty when n eta1 == eta2
  bool extended = false;
  double c_proxy = 0.0;                    ///< median packing quantity standing in for the unknown constant
};

/// Advisory check whether the time range is long enough for the packing
/// argument, with the lemma's constant replaced by the median q.
ExtendedDiagnostic sufficiently_extended(std::span<const GeometricQuantities> per_time, double eta1, double eta2,
                                         int n, double delta);

}  // namespace perscale

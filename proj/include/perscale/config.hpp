#pragma once

// Experiment configuration: a JSON document with a versioned `schema` field.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "perscale/geometry.hpp"
#include "perscale/measures.hpp"
#include "perscale/sampling.hpp"
#include "perscale/scaling.hpp"

namespace perscale {

inline constexpr const char* kConfigSchema = "perscale/experiment/v1";

struct ProcessSpec {
  enum class Kind { Poisson, Sublevel };
  Kind kind = Kind::Poisson;
  PoissonFamily poisson;
  ScalingField::Params field;
};

struct ComplexSpec {
  enum class Backend { Alpha2d, Cech };
  Backend backend = Backend::Alpha2d;
  int max_dim = 2;
  std::optional<double> r_max;  ///< empty: automatic
};

struct GridSpec {
  int nb = 64;
  int nd = 64;
  std::optional<double> b_max;  ///< empty: 1.05 x ensemble maximum over all times
  std::optional<double> d_max;
  bool per_degree = false;
};

struct BettiQuery {
  int degree = 1;
  double r = 0.0;
  double s = 0.0;
};

struct SummarySpec {
  FunctionalSummary::Kind kind = FunctionalSummary::Kind::BettiCurve;
  double s_min = 0.0;
  double s_max = 1.0;
  int count = 50;
  double sigma = 0.1;
  std::optional<int> degree;

  std::vector<double> grid() const;
};

struct Tolerances {
  double eta1_abs = 0.05;
  double eta2_abs = 0.10;
  double packing_rel = 0.10;
  double collapse = 0.15;
  double fractal_rel = 0.10;
  double condition_iv_bound = 10.0;
  double packing_bound_multiple = 2.0;
  double ergodicity_eps = 0.10;
  double intensivity_eps = 0.05;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ProcessSpec process;
  int dim = 2;
  std::vector<double> times{1.0};
  std::optional<Region> window;
  std::vector<double> scales{1.0};
  std::vector<int> scale_axes;
  /// Windows at time t are A_k scaled by t^w about the reference point.
  /// Nonzero w makes counts and histograms per unit volume.
  double window_time_exponent = 0.0;
  std::size_t ensemble_size = 1;
  ComplexSpec complex;
  GridSpec grid;
  QuantitySpec quantities;
  std::vector<BettiQuery> betti;
  std::optional<SummarySpec> summary;
  std::uint64_t seed = 1;
  Tolerances tol;
  std::optional<double> expected_eta1;
  std::optional<double> expected_eta2;
  std::string output_dir = "perscale_out";

  /// Nested windows A_k: the configured window scaled by each factor about
  /// its reference point.
  AveragingSequence sequence() const;
  Region window_at(std::size_t k, double t) const;
};

/// Throws ValidationError with the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

nlohmann::json region_to_json(const Region& region);
Region region_from_json(const nlohmann::json& j, const std::string& field);

}  // namespace perscale

#pragma once

// The sample -> filter -> persist -> measure -> fit pipeline over an ensemble,
// a set of times and an averaging sequence of windows.

#include <string>
#include <vector>

#include <json.hpp>

#include "perscale/config.hpp"
#include "perscale/filtration.hpp"
#include "perscale/measures.hpp"
#include "perscale/persistence.hpp"
#include "perscale/sampling.hpp"
#include "perscale/scaling.hpp"

namespace perscale {

/// Seed of the random field of ensemble member `sample`; shared by all times.
std::uint64_t field_seed(std::uint64_t base_seed, std::size_t sample);

/// Cloud of ensemble member `sample` at times[time_index] in `window`.
PointCloud sample_cloud(const ExperimentConfig& config, std::size_t sample, std::size_t time_index,
                        const Region& window);

/// Filtered complex of the configured backend. An explicit r_max truncates
/// the alpha filtration as well.
FilteredComplex build_complex(const PointCloud& cloud, const ComplexSpec& spec);

/// Diagram with provenance (sample, t, k, window).
PersistenceDiagram diagram_of(const PointCloud& cloud, const ComplexSpec& spec, int k);

/// Ensemble statistics of one (t, k) cell.
struct ExperimentCell {
  double t = 1.0;
  int k = 0;
  double volume = 1.0;
  EnsembleQuantities quantities;
  double mean_points = 0.0;
  std::vector<double> betti_per_volume;  ///< per configured query
  std::vector<double> betti_stderr;
  std::vector<double> summary;           ///< ensemble-mean functional summary
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Region> windows;                        ///< A_0..A_{K-1} at t = 1
  std::vector<std::vector<Region>> time_windows;      ///< [time][k], differs from `windows` for co-moving windows
  std::vector<ExperimentCell> cells;                  ///< index time * K + k
  std::vector<GeometricQuantities> sample_quantities; ///< index (time * K + k) * M + sample
  std::vector<std::vector<double>> sample_betti;      ///< same index, one value per query (raw count)
  std::vector<PersistenceDiagram> diagrams;           ///< largest window, index time * M + sample
  std::vector<MeasureHistogram> histograms;           ///< largest window, one per time
  std::vector<std::vector<MeasureHistogram>> degree_histograms;  ///< per degree when grid.per_degree
  std::vector<double> summary_grid;
  nlohmann::json report;
  bool pass = true;

  std::size_t windows_count() const { return windows.size(); }
  const ExperimentCell& cell(std::size_t time_index, std::size_t k) const {
    return cells[time_index * windows.size() + k];
  }
  const GeometricQuantities& sample(std::size_t time_index, std::size_t k, std::size_t i) const {
    return sample_quantities[(time_index * windows.size() + k) * config.ensemble_size + i];
  }
};

/// Runs the whole pipeline. Errors inside a cell are rethrown with their
/// (t, k, sample) provenance.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// diagrams.csv (+ sidecar), measure.csv, quantities.csv, summary.csv when a
/// summary is configured, and report.json.
void write_outputs(const ExperimentResult& result, const std::string& dir);

}  // namespace perscale

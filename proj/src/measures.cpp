#include "perscale/measures.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

std::pair<int, int> HistogramGrid::locate(double b, double d) const {
  if (!(b >= 0.0 && b <= b_max && d >= 0.0 && d <= d_max))
    throw Error(fmt::format("pair ({:.12g}, {:.12g}) lies outside the grid [0,{:.12g}]x[0,{:.12g}]; "
                            "use b_max >= {:.12g} and d_max >= {:.12g}",
                            b, d, b_max, d_max, 1.05 * std::max(b, b_max), 1.05 * std::max(d, d_max)));
  const int i = std::min(static_cast<int>(b / b_width()), nb - 1);
  const int j = std::min(static_cast<int>(d / d_width()), nd - 1);
  return {i, j};
}

HistogramGrid HistogramGrid::covering(double max_birth, double max_death, int nb, int nd) {
  if (nb < 1 || nd < 1) throw Error("histogram grids need at least one bin per axis");
  HistogramGrid g;
  // Degenerate maxima (all births 0) still need a positive extent.
  g.d_max = 1.05 * std::max(max_death, 1e-12);
  g.b_max = max_birth > 0 ? 1.05 * max_birth : g.d_max;
  g.nb = nb;
  g.nd = nd;
  return g;
}

std::string to_string(Normalization n) {
  switch (n) {
    case Normalization::RawCounts:
      return "raw";
    case Normalization::PerSampleMean:
      return "per_sample_mean";
    case Normalization::PerUnitVolume:
      return "per_unit_volume";
  }
  return "?";
}

double MeasureHistogram::total() const {
  double s = 0.0;
  for (double m : mean) s += m;
  return s;
}

namespace {

void accumulate(const PersistenceDiagram& diagram, const HistogramGrid& grid, std::optional<int> degree,
                std::vector<double>& counts) {
  for (const auto& p : diagram.pairs) {
    if (degree && p.degree != *degree) continue;
    const auto [i, j] = grid.locate(p.birth, p.death);
    counts[grid.index(i, j)] += 1.0;
  }
}

}  // namespace

MeasureHistogram diagram_measure(const PersistenceDiagram& diagram, const HistogramGrid& grid,
                                 std::optional<int> degree) {
  MeasureHistogram h;
  h.grid = grid;
  h.mean.assign(grid.size(), 0.0);
  h.stderr_.assign(grid.size(), 0.0);
  h.t = diagram.provenance.t;
  h.region = diagram.provenance.region;
  h.degree = degree;
  accumulate(diagram, grid, degree, h.mean);
  return h;
}

MeasureHistogram expectation_measure(std::span<const PersistenceDiagram> diagrams, const HistogramGrid& grid,
                                     std::optional<double> volume, std::optional<int> degree) {
  if (diagrams.empty()) throw Error("expectation measure of an empty ensemble");
  const auto& ref = diagrams.front().provenance;
  for (const auto& d : diagrams)
    if (d.provenance.t != ref.t || d.provenance.region != ref.region)
      throw Error(fmt::format("mixed provenance in ensemble: (t={}, {}) vs (t={}, {})", ref.t, ref.region,
                              d.provenance.t, d.provenance.region));
  if (volume && !(*volume > 0)) throw Error("normalizing volume must be positive");

  const std::size_t m = diagrams.size();
  std::vector<double> sum(grid.size(), 0.0), sum_sq(grid.size(), 0.0), counts(grid.size());
  double total_sum = 0.0, total_sq = 0.0;
  for (const auto& d : diagrams) {
    std::fill(counts.begin(), counts.end(), 0.0);
    accumulate(d, grid, degree, counts);
    double total = 0.0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
      sum[b] += counts[b];
      sum_sq[b] += counts[b] * counts[b];
      total += counts[b];
    }
    total_sum += total;
    total_sq += total * total;
  }

  const double scale = volume ? 1.0 / *volume : 1.0;
  auto stderr_of = [&](double s, double s2) {
    if (m < 2) return 0.0;
    const double mu = s / static_cast<double>(m);
    const double var = std::max(0.0, (s2 - static_cast<double>(m) * mu * mu) / static_cast<double>(m - 1));
    return std::sqrt(var / static_cast<double>(m));
  };

  MeasureHistogram h;
  h.grid = grid;
  h.mean.resize(grid.size());
  h.stderr_.resize(grid.size());
  for (std::size_t b = 0; b < grid.size(); ++b) {
    h.mean[b] = sum[b] / static_cast<double>(m) * scale;
    h.stderr_[b] = stderr_of(sum[b], sum_sq[b]) * scale;
  }
  h.total_stderr = stderr_of(total_sum, total_sq) * scale;
  h.normalization = volume ? Normalization::PerUnitVolume : Normalization::PerSampleMean;
  h.t = ref.t;
  h.region = ref.region;
  h.ensemble_size = m;
  h.volume = volume.value_or(1.0);
  h.degree = degree;
  return h;
}

std::vector<double> density_estimate(const MeasureHistogram& hist) {
  const auto& g = hist.grid;
  const double area = g.b_width() * g.d_width();
  std::vector<double> out(g.size(), 0.0);
  for (int i = 0; i < g.nb; ++i)
    for (int j = 0; j < g.nd; ++j)
      if (g.active(i, j)) out[g.index(i, j)] = hist.mean[g.index(i, j)] / area;
  return out;
}

std::vector<double> evaluate_summary(const FunctionalSummary& summary, const PersistenceDiagram& diagram) {
  std::vector<double> out(summary.grid.size(), 0.0);
  const double two_sigma2 = 2.0 * summary.sigma * summary.sigma;
  for (const auto& p : diagram.pairs) {
    if (summary.degree && p.degree != *summary.degree) continue;
    for (std::size_t i = 0; i < summary.grid.size(); ++i) {
      const double s = summary.grid[i];
      if (summary.kind == FunctionalSummary::Kind::BettiCurve) {
        if (p.birth <= s && s < p.death) out[i] += 1.0;
      } else {
        const double mid = 0.5 * (p.birth + p.death);
        out[i] += p.persistence() * std::exp(-(s - mid) * (s - mid) / two_sigma2);
      }
    }
  }
  return out;
}

IntensivityResult intensivity_test(const std::vector<std::vector<double>>& summaries,
                                   const std::vector<double>& volumes, double epsilon) {
  if (summaries.size() != volumes.size()) throw Error("intensivity test needs one volume per summary");
  if (summaries.size() < 3) throw Error("intensivity test needs at least three windows");
  IntensivityResult r;
  for (std::size_t k = 0; k + 1 < summaries.size(); ++k) {
    if (summaries[k].size() != summaries[k + 1].size()) throw Error("summaries evaluated on different grids");
    double sup = 0.0;
    for (std::size_t i = 0; i < summaries[k].size(); ++i)
      sup = std::max(sup, std::abs(summaries[k + 1][i] / volumes[k + 1] - summaries[k][i] / volumes[k]));
    r.sup_norm_trace.push_back(sup);
  }
  r.cauchy = r.sup_norm_trace.back() < epsilon;
  return r;
}

ErgodicityResult ergodicity_in_persistence_test(const std::vector<double>& counts, const std::vector<double>& volumes,
                                                double epsilon, std::size_t start_index) {
  if (counts.size() != volumes.size()) throw Error("ergodicity test needs one volume per count");
  if (counts.size() < 3) throw Error("ergodicity test needs at least three windows");
  for (double c : counts)
    if (!(c > 0)) throw Error("ergodicity test needs positive class counts in every window");
  const std::size_t kk = counts.size();
  ErgodicityResult r;
  r.quantity.assign(kk, std::vector<double>(kk, 0.0));
  for (std::size_t k = 0; k < kk; ++k)
    for (std::size_t l = 0; l < kk; ++l)
      r.quantity[k][l] = std::abs(1.0 - counts[l] / counts[k] * volumes[k] / volumes[l]);

  auto all_below = [&](std::size_t from) {
    for (std::size_t k = from; k < kk; ++k)
      for (std::size_t l = k + 1; l < kk; ++l)
        if (!(r.quantity[k][l] < epsilon)) return false;
    return true;
  };
  for (std::size_t k = start_index; k < kk; ++k)
    for (std::size_t l = k + 1; l < kk; ++l) r.max_quantity = std::max(r.max_quantity, r.quantity[k][l]);
  r.satisfied = start_index + 1 < kk && all_below(start_index);
  for (std::size_t n = 0; n + 1 < kk; ++n)
    if (all_below(n)) {
      r.smallest_index = n;
      break;
    }
  return r;
}

}  // namespace perscale

#pragma once

// Persistence diagrams of filtered complexes over the two-element field.

#include <cstdint>
#include <string>
#include <vector>

#include "perscale/filtration.hpp"

namespace perscale {

struct PersistencePair {
  int degree = 0;
  double birth = 0.0;
  double death = 0.0;

  double persistence() const { return death - birth; }
};

/// A class that never dies inside the filtration (or dies exactly at a
/// truncated cutoff).
struct EssentialClass {
  int degree = 0;
  double birth = 0.0;
};

struct Provenance {
  std::int64_t sample_id = 0;
  double t = 1.0;
  int k = -1;           ///< averaging-sequence index, -1 if not part of one
  std::string region;   ///< Region::describe() of the window
};

struct PersistenceDiagram {
  int max_degree = 0;  ///< degrees 0..max_degree are reported
  std::vector<PersistencePair> pairs;
  std::vector<EssentialClass> essentials;
  Provenance provenance;

  std::size_t size() const { return pairs.size(); }
  int essential_count(int degree) const;
  std::vector<PersistencePair> in_degree(int degree) const;
};

/// Canonical order (degree, birth, death) used for comparisons and output.
void sort_pairs(std::vector<PersistencePair>& pairs);

/// Column reduction with clearing. Reported degrees are 0..min(max_dim, n)-1
/// where n is `ambient_dim` (0 means no ambient bound). Zero-persistence pairs
/// are dropped.
PersistenceDiagram compute_diagram(const FilteredComplex& complex, int ambient_dim = 0);

/// beta^{r,s}_degree = #{pairs: b <= r, d > s} + #{essential: b <= r}.
/// Throws perscale::Error if r > s.
int persistent_betti(const PersistenceDiagram& diagram, int degree, double r, double s);
int persistent_betti(const FilteredComplex& complex, int degree, double r, double s);

}  // namespace perscale

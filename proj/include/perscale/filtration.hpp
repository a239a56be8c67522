#pragma once

// Filtered simplicial complexes built from point clouds: the Cech filtration
// (minimum enclosing ball radii, R^2 and R^3) and the planar alpha filtration
// on the Delaunay triangulation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perscale/point.hpp"
#include "perscale/sampling.hpp"

namespace perscale {

/// A simplex with sorted vertex indices; unused slots hold -1.
struct Simplex {
  std::array<int, 4> vertices{-1, -1, -1, -1};
  int dim = 0;
  double value = 0.0;

  int vertex(int i) const { return vertices[static_cast<std::size_t>(i)]; }
};

/// Filtration order: value, then dimension, then lexicographic vertex tuple.
bool filtration_less(const Simplex& a, const Simplex& b);

class FilteredComplex {
 public:
  FilteredComplex() = default;
  /// Sorts into filtration order and indexes facets. Throws perscale::Error if
  /// a facet is missing or appears later than its coface.
  /// `declared_dim` is the dimension the construction allowed, which can
  /// exceed the realized one when a cutoff removes every top simplex.
  FilteredComplex(int vertex_count, std::vector<Simplex> simplices, double r_max = INFINITY, bool truncated = false,
                  int declared_dim = 0);

  int vertex_count() const { return vertex_count_; }
  std::size_t size() const { return simplices_.size(); }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const Simplex& operator[](std::size_t i) const { return simplices_[i]; }
  int max_dim() const { return max_dim_; }
  /// max(realized dimension, declared dimension); fixes the reported degrees.
  int top_dim() const { return std::max(max_dim_, declared_dim_); }

  /// Filtration cutoff; deaths at a truncated cutoff are reported as essential.
  double r_max() const { return r_max_; }
  bool truncated() const { return truncated_; }

  /// Facet indices of simplex i (in filtration order, ascending).
  std::span<const int> boundary(std::size_t i) const;

 private:
  int vertex_count_ = 0;
  int max_dim_ = 0;
  int declared_dim_ = 0;
  double r_max_ = INFINITY;
  bool truncated_ = false;
  std::vector<Simplex> simplices_;
  std::vector<int> boundary_offsets_;
  std::vector<int> boundary_entries_;
};

struct Ball {
  Point center{};
  double radius = 0.0;
};

/// Smallest enclosing ball of 1..n+1 points (Welzl recursion over boundary
/// support sets). Throws on empty input.
Ball min_enclosing_ball(std::span<const Point> points, int dim);

/// Smallest enclosing ball of an arbitrary point set.
Ball global_enclosing_ball(std::span<const Point> points, int dim);

struct CechOptions {
  int max_dim = 2;
  /// Cutoff radius; empty means the radius of the cloud's enclosing ball.
  std::optional<double> r_max;
  /// Upper bound on the number of candidate top simplices.
  double max_candidates = 2e7;
};

FilteredComplex cech_complex(const PointCloud& cloud, const CechOptions& options = {});

struct DelaunayTriangulation {
  std::vector<Point> points;                   ///< possibly jittered copy of the input
  std::vector<std::array<int, 3>> triangles;   ///< counter-clockwise vertex triples
  std::vector<std::array<int, 3>> neighbors;   ///< neighbors[t][i] is opposite vertex i, -1 on the hull
  bool jittered = false;
};

/// Bowyer-Watson insertion. When an orientation or in-circle predicate cannot
/// be decided in floating point the input is perturbed by a seeded jitter of
/// relative size 1e-9 and the triangulation is rebuilt.
DelaunayTriangulation delaunay_2d(const PointCloud& cloud);

/// Alpha filtration of a planar cloud: Delaunay simplices valued by the radius
/// of their smallest empty circumscribing disk.
FilteredComplex alpha_complex_2d(const PointCloud& cloud);

/// Debug dump `dim,v0,v1,v2,filtration_value`.
void write_complex_csv(const FilteredComplex& complex, const std::string& path);

}  // namespace perscale

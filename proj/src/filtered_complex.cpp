#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"

namespace perscale {

namespace {

// Simplices of dimension <= 2 pack into 21-bit fields; tetrahedra need the
// vertex count to fit in 16 bits.
struct KeyPacker {
  int bits = 21;
  int fields = 3;

  explicit KeyPacker(int vertex_count, int max_dim) {
    if (max_dim >= 3) {
      if (vertex_count >= (1 << 16) - 1) throw Error("tetrahedral complexes support at most 65534 vertices");
      bits = 16;
      fields = 4;
    } else if (vertex_count >= (1 << 21) - 1) {
      throw Error("complexes support at most 2097150 vertices");
    }
  }

  std::uint64_t operator()(const int* v, int count) const {
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    std::uint64_t key = 0;
    for (int i = 0; i < fields; ++i) {
      const std::uint64_t field = i < count ? static_cast<std::uint64_t>(v[i]) : mask;
      key = (key << bits) | field;
    }
    return key;
  }
};

}  // namespace

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.vertices < b.vertices;
}

FilteredComplex::FilteredComplex(int vertex_count, std::vector<Simplex> simplices, double r_max, bool truncated,
                                 int declared_dim)
    : vertex_count_(vertex_count),
      declared_dim_(declared_dim),
      r_max_(r_max),
      truncated_(truncated),
      simplices_(std::move(simplices)) {
  for (auto& s : simplices_) {
    if (s.dim < 0 || s.dim > 3) throw Error(fmt::format("simplex dimension {} unsupported", s.dim));
    std::sort(s.vertices.begin(), s.vertices.begin() + s.dim + 1);
    for (int i = 0; i <= s.dim; ++i)
      if (s.vertices[i] < 0 || s.vertices[i] >= vertex_count) throw Error("simplex vertex index out of range");
    for (int i = s.dim + 1; i < 4; ++i) s.vertices[i] = -1;
    max_dim_ = std::max(max_dim_, s.dim);
  }
  std::sort(simplices_.begin(), simplices_.end(), filtration_less);

  const KeyPacker pack(vertex_count, max_dim_);
  std::vector<std::pair<std::uint64_t, int>> index(simplices_.size());
  for (std::size_t i = 0; i < simplices_.size(); ++i)
    index[i] = {pack(simplices_[i].vertices.data(), simplices_[i].dim + 1), static_cast<int>(i)};
  std::sort(index.begin(), index.end());
  for (std::size_t i = 1; i < index.size(); ++i)
    if (index[i].first == index[i - 1].first) throw Error("duplicate simplex in filtration");

  boundary_offsets_.reserve(simplices_.size() + 1);
  boundary_offsets_.push_back(0);
  for (std::size_t i = 0; i < simplices_.size(); ++i) {
    const Simplex& s = simplices_[i];
    if (s.dim > 0) {
      const auto first = boundary_entries_.size();
      for (int skip = 0; skip <= s.dim; ++skip) {
        int face[4];
        int m = 0;
        for (int j = 0; j <= s.dim; ++j)
          if (j != skip) face[m++] = s.vertices[j];
        const std::uint64_t key = pack(face, m);
        auto it = std::lower_bound(index.begin(), index.end(), std::pair<std::uint64_t, int>{key, -1});
        if (it == index.end() || it->first != key)
          throw Error(fmt::format("filtration is not closed: a facet of a {}-simplex is missing", s.dim));
        const int f = it->second;
        if (simplices_[f].value > s.value || f > static_cast<int>(i))
          throw Error(fmt::format("filtration is not monotone: facet value {:.17g} exceeds simplex value {:.17g}",
                                  simplices_[f].value, s.value));
        boundary_entries_.push_back(f);
      }
      std::sort(boundary_entries_.begin() + static_cast<std::ptrdiff_t>(first), boundary_entries_.end());
    }
    boundary_offsets_.push_back(static_cast<int>(boundary_entries_.size()));
  }
}

std::span<const int> FilteredComplex::boundary(std::size_t i) const {
  return {boundary_entries_.data() + boundary_offsets_[i],
          static_cast<std::size_t>(boundary_offsets_[i + 1] - boundary_offsets_[i])};
}

void write_complex_csv(const FilteredComplex& complex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "dim,v0,v1,v2,filtration_value\n";
  for (const auto& s : complex.simplices()) {
    out << s.dim;
    for (int i = 0; i < 3; ++i) {
      out << ',';
      if (i <= s.dim) out << s.vertices[i];
    }
    out << fmt::format(",{:.12g}\n", s.value);
  }
}

}  // namespace perscale

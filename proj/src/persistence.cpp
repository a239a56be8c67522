#include "perscale/persistence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

int PersistenceDiagram::essential_count(int degree) const {
  return static_cast<int>(std::count_if(essentials.begin(), essentials.end(),
                                        [&](const EssentialClass& e) { return e.degree == degree; }));
}

std::vector<PersistencePair> PersistenceDiagram::in_degree(int degree) const {
  std::vector<PersistencePair> out;
  for (const auto& p : pairs)
    if (p.degree == degree) out.push_back(p);
  return out;
}

void sort_pairs(std::vector<PersistencePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
}

namespace {

// out = a xor b for ascending index lists.
void symmetric_difference(const std::vector<int>& a, const std::vector<int>& b, std::vector<int>& out) {
  out.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
}

}  // namespace

PersistenceDiagram compute_diagram(const FilteredComplex& complex, int ambient_dim) {
  const std::size_t n = complex.size();
  int top = complex.top_dim();
  if (ambient_dim > 0) top = std::min(top, ambient_dim);

  PersistenceDiagram dgm;
  dgm.max_degree = std::max(top - 1, 0);
  if (n == 0) return dgm;

  std::vector<int> pivot_of(n, -1);   // row -> column whose reduced low is that row
  std::vector<char> zero_column(n, 0);
  std::vector<std::vector<int>> reduced(n);
  std::vector<int> col, scratch;

  // Highest dimension first so that every pivot found clears a column one
  // dimension lower before it is visited.
  for (int d = complex.max_dim(); d >= 1; --d) {
    for (std::size_t j = 0; j < n; ++j) {
      if (complex[j].dim != d) continue;
      if (zero_column[j]) continue;
      const auto bd = complex.boundary(j);
      col.assign(bd.begin(), bd.end());
      while (!col.empty()) {
        const int owner = pivot_of[col.back()];
        if (owner < 0) break;
        symmetric_difference(col, reduced[owner], scratch);
        col.swap(scratch);
      }
      if (col.empty()) {
        zero_column[j] = 1;
        continue;
      }
      const int low = col.back();
      pivot_of[low] = static_cast<int>(j);
      zero_column[low] = 1;
      reduced[j] = col;
    }
  }

  const double r_max = complex.r_max();
  for (std::size_t j = 0; j < n; ++j) {
    const Simplex& s = complex[j];
    if (s.dim > dgm.max_degree || (top == 0 && s.dim > 0)) continue;
    // Negative simplices (nonzero reduced column) are reported through their pivot.
    if (s.dim > 0 && !reduced[j].empty()) continue;
    const int killer = pivot_of[j];
    if (killer < 0) {
      dgm.essentials.push_back({s.dim, s.value});
      continue;
    }
    const double death = complex[static_cast<std::size_t>(killer)].value;
    if (complex.truncated() && death >= r_max) {
      dgm.essentials.push_back({s.dim, s.value});
    } else if (death > s.value) {
      dgm.pairs.push_back({s.dim, s.value, death});
    }
  }
  sort_pairs(dgm.pairs);
  return dgm;
}

int persistent_betti(const PersistenceDiagram& diagram, int degree, double r, double s) {
  if (r > s) throw Error(fmt::format("persistent Betti number needs r <= s, got r={} s={}", r, s));
  int count = 0;
  for (const auto& p : diagram.pairs)
    if (p.degree == degree && p.birth <= r && p.death > s) ++count;
  for (const auto& e : diagram.essentials)
    if (e.degree == degree && e.birth <= r) ++count;
  return count;
}

int persistent_betti(const FilteredComplex& complex, int degree, double r, double s) {
  return persistent_betti(compute_diagram(complex), degree, r, s);
}

}  // namespace perscale

#include "perscale/oracles/persistence_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale::oracle {

namespace {

using Bits = std::vector<std::uint64_t>;

int highest(const Bits& v) {
  for (std::size_t w = v.size(); w-- > 0;)
    if (v[w]) return static_cast<int>(w * 64 + 63 - static_cast<std::size_t>(__builtin_clzll(v[w])));
  return -1;
}

void xor_into(Bits& v, const Bits& u) {
  for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= u[w];
}

// Span of F2 vectors kept in echelon form by highest set bit.
class XorBasis {
 public:
  explicit XorBasis(std::size_t bits) : rows_(bits) {}

  bool insert(Bits v) {
    for (int h = highest(v); h >= 0; h = highest(v)) {
      if (rows_[h].empty()) {
        rows_[h] = std::move(v);
        ++rank_;
        return true;
      }
      xor_into(v, rows_[h]);
    }
    return false;
  }

  int rank() const { return rank_; }

 private:
  std::vector<Bits> rows_;
  int rank_ = 0;
};

struct Chains {
  std::vector<Bits> cycles;         // basis of Z, in order of appearance
  std::vector<double> cycle_birth;  // filtration value at which each appears
  std::vector<Bits> boundaries;     // boundary of every (degree+1)-simplex
  std::vector<double> boundary_value;
};

Bits boundary_bits(const FilteredComplex& complex, std::size_t j, std::size_t words) {
  Bits v(words, 0);
  for (int f : complex.boundary(j)) v[static_cast<std::size_t>(f) / 64] |= std::uint64_t{1} << (f % 64);
  return v;
}

Chains chains(const FilteredComplex& complex, int degree) {
  const std::size_t n = complex.size();
  const std::size_t words = (n + 63) / 64;
  Chains c;
  // Cycles of the prefix complexes: eliminate boundaries while tracking the
  // chain combination; a combination whose boundary vanishes is a new cycle.
  std::vector<Bits> pivot_vec(n), pivot_combo(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Simplex& s = complex[j];
    if (s.dim == degree) {
      Bits v = degree == 0 ? Bits(words, 0) : boundary_bits(complex, j, words);
      Bits combo(words, 0);
      combo[j / 64] |= std::uint64_t{1} << (j % 64);
      for (int h = highest(v); h >= 0; h = highest(v)) {
        if (pivot_vec[h].empty()) break;
        xor_into(v, pivot_vec[h]);
        xor_into(combo, pivot_combo[h]);
      }
      const int h = highest(v);
      if (h < 0) {
        c.cycles.push_back(std::move(combo));
        c.cycle_birth.push_back(s.value);
      } else {
        pivot_vec[h] = std::move(v);
        pivot_combo[h] = std::move(combo);
      }
    } else if (s.dim == degree + 1) {
      c.boundaries.push_back(boundary_bits(complex, j, words));
      c.boundary_value.push_back(s.value);
    }
  }
  return c;
}

// table[i][m] = dim(Z_{r_i} + B_m) - dim(B_m) where Z_{r_i} holds the cycles
// born at or before births[i] and B_m the boundaries of the first m death
// values.
std::vector<std::vector<int>> rank_table(const Chains& c, const std::vector<double>& births,
                                         const std::vector<double>& deaths, std::size_t bits) {
  std::vector<std::vector<int>> table(births.size(), std::vector<int>(deaths.size() + 1, 0));
  for (std::size_t m = 0; m <= deaths.size(); ++m) {
    XorBasis basis(bits);
    for (std::size_t b = 0; b < c.boundaries.size(); ++b)
      if (m > 0 && c.boundary_value[b] <= deaths[m - 1]) basis.insert(c.boundaries[b]);
    const int rank_b = basis.rank();
    std::size_t next = 0;
    for (std::size_t i = 0; i < births.size(); ++i) {
      while (next < c.cycles.size() && c.cycle_birth[next] <= births[i]) basis.insert(c.cycles[next++]);
      table[i][m] = basis.rank() - rank_b;
    }
  }
  return table;
}

std::vector<double> distinct_values(const FilteredComplex& complex, int dim) {
  std::vector<double> v;
  for (const auto& s : complex.simplices())
    if (s.dim == dim) v.push_back(s.value);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void check_size(const FilteredComplex& complex) {
  if (complex.size() > kMaxOracleSimplices)
    throw ResourceLimitError(
        fmt::format("oracle takes at most {} simplices, got {}", kMaxOracleSimplices, complex.size()));
}

}  // namespace

PersistenceDiagram oracle_diagram(const FilteredComplex& complex, int ambient_dim) {
  check_size(complex);
  int top = complex.top_dim();
  if (ambient_dim > 0) top = std::min(top, ambient_dim);
  PersistenceDiagram dgm;
  dgm.max_degree = std::max(top - 1, 0);
  if (complex.size() == 0) return dgm;
  const std::size_t bits = ((complex.size() + 63) / 64) * 64;

  for (int degree = 0; degree <= dgm.max_degree; ++degree) {
    if (degree > complex.max_dim()) break;
    const Chains c = chains(complex, degree);
    const std::vector<double> births = distinct_values(complex, degree);
    const std::vector<double> deaths = distinct_values(complex, degree + 1);
    const auto table = rank_table(c, births, deaths, bits);
    const std::size_t q = deaths.size();
    auto at = [&](std::size_t i, std::size_t m) { return i == 0 ? 0 : table[i - 1][m]; };  // 1-based births

    for (std::size_t i = 1; i <= births.size(); ++i) {
      const double b = births[i - 1];
      for (std::size_t j = 1; j <= q; ++j) {
        const double d = deaths[j - 1];
        if (!(b < d)) continue;
        const int mult = at(i, j - 1) - at(i - 1, j - 1) - at(i, j) + at(i - 1, j);
        if (mult < 0) throw Error("oracle found a negative multiplicity");
        for (int k = 0; k < mult; ++k) {
          if (complex.truncated() && d >= complex.r_max())
            dgm.essentials.push_back({degree, b});
          else
            dgm.pairs.push_back({degree, b, d});
        }
      }
      const int essential = at(i, q) - at(i - 1, q);
      for (int k = 0; k < essential; ++k) dgm.essentials.push_back({degree, b});
    }
  }
  sort_pairs(dgm.pairs);
  return dgm;
}

int oracle_betti(const FilteredComplex& complex, int degree, double r, double s) {
  check_size(complex);
  if (r > s) throw Error(fmt::format("persistent Betti number needs r <= s, got r={} s={}", r, s));
  const std::size_t bits = ((complex.size() + 63) / 64) * 64;
  const Chains c = chains(complex, degree);
  XorBasis basis(bits);
  for (std::size_t b = 0; b < c.boundaries.size(); ++b)
    if (c.boundary_value[b] <= s) basis.insert(c.boundaries[b]);
  const int rank_b = basis.rank();
  for (std::size_t z = 0; z < c.cycles.size(); ++z)
    if (c.cycle_birth[z] <= r) basis.insert(c.cycles[z]);
  return basis.rank() - rank_b;
}

bool diagrams_match(const PersistenceDiagram& a, const PersistenceDiagram& b, double tol, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.pairs.size() != b.pairs.size())
    return fail(fmt::format("pair counts differ: {} vs {}", a.pairs.size(), b.pairs.size()));
  auto pa = a.pairs, pb = b.pairs;
  sort_pairs(pa);
  sort_pairs(pb);
  // Sorting can interleave near-equal births differently; match greedily
  // within each degree instead of index by index.
  std::vector<char> used(pb.size(), 0);
  for (const auto& p : pa) {
    bool found = false;
    for (std::size_t j = 0; j < pb.size() && !found; ++j) {
      if (used[j] || pb[j].degree != p.degree) continue;
      if (std::abs(pb[j].birth - p.birth) <= tol && std::abs(pb[j].death - p.death) <= tol) {
        used[j] = 1;
        found = true;
      }
    }
    if (!found) return fail(fmt::format("pair (dim {}, {:.12g}, {:.12g}) has no partner", p.degree, p.birth, p.death));
  }
  for (int d = 0; d <= std::max(a.max_degree, b.max_degree); ++d) {
    if (a.essential_count(d) != b.essential_count(d))
      return fail(fmt::format("essential counts in degree {} differ: {} vs {}", d, a.essential_count(d),
                              b.essential_count(d)));
    std::vector<double> ea, eb;
    for (const auto& e : a.essentials)
      if (e.degree == d) ea.push_back(e.birth);
    for (const auto& e : b.essentials)
      if (e.degree == d) eb.push_back(e.birth);
    std::sort(ea.begin(), ea.end());
    std::sort(eb.begin(), eb.end());
    for (std::size_t i = 0; i < ea.size(); ++i)
      if (std::abs(ea[i] - eb[i]) > tol) return fail(fmt::format("essential births in degree {} differ", d));
  }
  return true;
}

}  // namespace perscale::oracle

#pragma once

// Brute-force persistence over F2 for small complexes: ranks of cycle and
// boundary spaces at every critical value, no reduction tricks. Serves as an
// independent check on compute_diagram.

#include <string>

#include "perscale/persistence.hpp"

namespace perscale::oracle {

constexpr std::size_t kMaxOracleSimplices = 2000;

/// Diagram recovered from persistent Betti numbers by inclusion-exclusion
/// over the grid of critical values. Same degree range and truncation rule as
/// compute_diagram. Throws ResourceLimitError above kMaxOracleSimplices.
PersistenceDiagram oracle_diagram(const FilteredComplex& complex, int ambient_dim = 0);

/// rank of H_degree(K_r) -> H_degree(K_s), computed as
/// dim(Z_r + B_s) - dim(B_s).
int oracle_betti(const FilteredComplex& complex, int degree, double r, double s);

/// Multiset equality of finite pairs (values within `tol`) and equality of
/// essential classes. On mismatch `why` receives a short description.
bool diagrams_match(const PersistenceDiagram& a, const PersistenceDiagram& b, double tol, std::string* why = nullptr);

}  // namespace perscale::oracle

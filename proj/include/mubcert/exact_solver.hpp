#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mubcert/polynomial.hpp"

namespace mubcert {

/// Sparse rational matrix stored by columns, together with a right-hand side.
struct SparseSystem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  // columns[c] holds (row, value) pairs with distinct rows and nonzero values.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> columns;
  std::vector<Rational> rhs;

  std::size_t nonzeros() const;
};

struct ExactSolveOptions {
  // Abort once any working integer exceeds this many bits (0 = unlimited).
  std::size_t max_bits = 0;
};

struct ExactSolveStats {
  std::size_t rank = 0;
  std::size_t max_bits = 0;
  std::size_t fill = 0;  // peak number of stored nonzeros
};

/// Decides consistency of A y = b exactly and returns one solution (free
/// variables set to zero) if it exists.
///
/// Rows are scaled to integers and eliminated fraction-free: a target row is
/// combined as (p/g) row - (a/g) pivot_row with g = gcd(p, a) and then divided
/// by its content. Pivots follow a Markowitz-style rule (sparsest active row,
/// then the column with the fewest active entries in that row) to limit
/// fill-in. Back substitution runs over Q.
std::optional<std::vector<Rational>> solve_exact(const SparseSystem& sys, const ExactSolveOptions& opts = {},
                                                 ExactSolveStats* stats = nullptr);

}  // namespace mubcert

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mubcert/consys.hpp"
#include "mubcert/exact_solver.hpp"
#include "mubcert/polynomial.hpp"

namespace mubcert {

/// Cofactors r_1..r_s with sum r_i p_i = 1.
struct Certificate {
  std::vector<Polynomial> cofactors;
  unsigned degree = 0;  // max deg(r_i p_i) over nonzero r_i
};

/// C(n+d, d): monomials in n variables of degree at most d.
Integer count_monomials(std::size_t n, unsigned d);

/// All monomials of degree <= d, ordered by ascending degree-lex.
std::vector<Monomial> monomials_up_to(std::size_t n, unsigned d);

struct ColumnLabel {
  Monomial shift;  // x^delta
  std::size_t constraint;
};

/// M y = b for the degree-d identity 1 = sum r_i p_i. Row alpha is the
/// coefficient of x^alpha; column (delta, i) holds the coefficients of x^delta p_i.
struct LinearSystem {
  unsigned degree = 0;
  std::vector<Monomial> row_labels;
  std::vector<ColumnLabel> col_labels;
  SparseSystem matrix;
  std::unordered_map<Monomial, std::size_t, MonomialHash> row_index;
};

struct NullaLimits {
  std::size_t max_rows = 2'000'000;
  std::size_t max_cols = 2'000'000;
  std::size_t max_bits = 0;
  unsigned threads = 0;  // 0 = MUBCERT_THREADS or 1
};

LinearSystem build_linear_system(const std::vector<Polynomial>& F, unsigned d, const NullaLimits& limits = {});

/// Assembles the certificate encoded by a solution vector of `ls`.
Certificate certificate_from_solution(const std::vector<Polynomial>& F, const LinearSystem& ls,
                                      const std::vector<Rational>& y);

/// Exact test of sum r_i p_i == 1.
bool verify(const std::vector<Polynomial>& F, const Certificate& c);

unsigned certificate_degree(const std::vector<Polynomial>& F, const std::vector<Polynomial>& cofactors);

struct DegreeAttempt {
  unsigned degree = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool consistent = false;
};

struct NullaResult {
  std::optional<Certificate> certificate;
  std::vector<DegreeAttempt> attempts;
  bool symmetric = false;  // searched over the orbit-reduced systems
};

/// Tries d = max deg p_i, ..., d_max and returns the first certificate found.
/// Throws ResourceError (progress = last completed degree) when a limit is hit.
NullaResult nulla_search(const std::vector<Polynomial>& F, unsigned d_max, const NullaLimits& limits = {});

// ---- symmetry reduction ---------------------------------------------------

/// M-bar y-bar = b-bar over monomial orbits (rows) and orbits of x^delta f_i (columns).
struct ReducedSystem {
  LinearSystem full;
  SparseSystem matrix;
  std::vector<std::vector<std::size_t>> row_orbits;  // indices into full.row_labels
  std::vector<std::vector<std::size_t>> col_orbits;  // indices into full.col_labels
  std::vector<std::size_t> col_orbit_of;              // full column -> orbit

  /// M-bar entry computed from an arbitrary member of the row orbit.
  Rational entry_from(std::size_t row_member, std::size_t col_orbit) const;
  /// Expands a reduced solution to a solution of the full system.
  std::vector<Rational> lift(const std::vector<Rational>& reduced) const;
};

/// Requires that every generator maps F onto itself (PreconditionError otherwise).
ReducedSystem orbit_reduce(const std::vector<Polynomial>& F, unsigned d, const PermutationGroup& group,
                           const NullaLimits& limits = {});

/// As nulla_search, but over the orbit-reduced systems. A negative result only
/// means that no symmetric certificate exists up to d_max.
NullaResult nulla_search_symmetric(const std::vector<Polynomial>& F, unsigned d_max, const PermutationGroup& group,
                                   const NullaLimits& limits = {});

struct CertificateStats {
  unsigned degree = 0;
  std::vector<std::size_t> term_counts;
  std::size_t max_coefficient_bits = 0;
};

CertificateStats certificate_stats(const Certificate& c);

/// The degree-6 certificate r_1..r_5 for the {1,1,1,1}_2 system of build_1111_2.
Certificate known_certificate_1111_2();

}  // namespace mubcert

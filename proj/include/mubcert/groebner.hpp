#pragma once

#include <cstddef>
#include <vector>

#include "mubcert/polynomial.hpp"

namespace mubcert {

struct GroebnerBasis {
  std::vector<Polynomial> polynomials;
  MonomialOrder order = MonomialOrder::Grevlex;
  bool reduced = false;
};

struct GroebnerOptions {
  MonomialOrder order = MonomialOrder::Grevlex;
  // Skip pairs via the lcm/chain criterion in addition to the coprime one.
  bool chain_criterion = false;
  // 0 disables a cap. Exceeding a cap raises ResourceError.
  unsigned max_degree = 0;
  std::size_t max_basis = 0;
  std::size_t max_pairs = 0;
  std::size_t max_terms = 0;  // terms in any single intermediate polynomial
};

struct GroebnerStats {
  std::size_t pairs = 0;       // S-pairs reduced
  std::size_t skipped = 0;     // S-pairs discarded by a criterion
  std::size_t reductions = 0;  // nonzero remainders added to the basis
  unsigned max_degree_seen = 0;
};

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, MonomialOrder ord);

/// Normal form of f modulo G: no monomial of the result is divisible by any lp(g).
Polynomial reduce(const Polynomial& f, const std::vector<Polynomial>& G, MonomialOrder ord);

/// Buchberger's algorithm with the normal selection strategy. The result is a
/// Groebner basis of <F> but not necessarily reduced.
GroebnerBasis buchberger(const std::vector<Polynomial>& F, const GroebnerOptions& opts = {},
                         GroebnerStats* stats = nullptr);

/// Minimalizes, inter-reduces and makes monic.
GroebnerBasis reduce_basis(const GroebnerBasis& G);

/// Reduced Groebner basis of <F>.
GroebnerBasis reduced_groebner_basis(const std::vector<Polynomial>& F, const GroebnerOptions& opts = {},
                                     GroebnerStats* stats = nullptr);

/// True iff every S-polynomial of G reduces to zero modulo G.
bool is_groebner_basis(const std::vector<Polynomial>& G, MonomialOrder ord);

/// True iff the reduced Groebner basis is {1}, i.e. F has no common zero over C.
bool infeasible_over_C(const std::vector<Polynomial>& F, const GroebnerOptions& opts = {},
                       GroebnerStats* stats = nullptr);

}  // namespace mubcert

#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mubcert/polynomial.hpp"
#include "mubcert/sdp.hpp"

namespace mubcert {

/// Order-k moment relaxation of  min p0(x)  s.t.  p_i(x) = 0.
///
/// The SDP variable is the moment matrix M_k(y), indexed by the monomials of
/// degree <= k. Entries sharing a moment are tied by linear constraints, each
/// moment y_alpha being read at a fixed representative entry. Equations enter
/// as L_y(p_i x^delta) = 0 for |delta| <= 2k - deg p_i, and y_0 = 1.
struct MomentRelaxation {
  unsigned order = 0;
  std::size_t nvars = 0;
  std::vector<Monomial> basis;    // rows of M_k, degree-lex
  std::vector<Monomial> moments;  // all |alpha| <= 2k, degree-lex
  std::unordered_map<Monomial, std::size_t, MonomialHash> moment_index;
  std::vector<std::pair<std::size_t, std::size_t>> representative;  // per moment, (i, j) with i <= j
  std::size_t consistency_rows = 0;
  std::size_t equality_rows = 0;
  SdpProblem sdp;

  /// SDP entry of the functional L_y(p).
  SparseSymMatrix functional(const Polynomial& p) const;
  /// Moment matrix of the Dirac measure at x.
  Eigen::MatrixXd dirac_moment_matrix(std::span<const double> x) const;
};

/// Requires 2k >= deg p0 and 2k >= deg p_i (PreconditionError otherwise).
MomentRelaxation build_moment_relaxation(const Polynomial& objective, const std::vector<Polynomial>& eqs, unsigned k);

/// Smallest k with 2k covering every degree.
unsigned minimal_order(const Polynomial& objective, const std::vector<Polynomial>& eqs);

struct LowerBound {
  unsigned order = 0;
  double value = 0.0;
  SdpSolution solution;
};

LowerBound lower_bound(const Polynomial& objective, const std::vector<Polynomial>& eqs, unsigned k,
                       const SdpOptions& opts = {});

}  // namespace mubcert

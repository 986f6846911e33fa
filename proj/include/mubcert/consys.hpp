#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mubcert/polynomial.hpp"

namespace mubcert {

/// Constellation label {a1,...,ak}_d: k groups of pairwise orthogonal pure
/// states in C^d, unbiased across groups.
struct ConstellationSpec {
  unsigned d = 0;
  std::vector<unsigned> groups;

  /// Parses "a1,a2,...,ak@d".
  static ConstellationSpec parse(const std::string& text);
  std::string to_string() const;
  /// Throws SpecError unless k >= 1, d >= 1 and 1 <= ai <= d.
  void validate() const;
};

/// Named variables plus polynomial constraints (each required to vanish) and
/// an optional objective.
struct PolySystem {
  std::size_t nvars = 0;
  std::vector<std::string> vars;
  std::vector<Polynomial> constraints;
  std::optional<Polynomial> objective;
  std::string spec;  // constellation label when generated from one
  std::string provenance;

  void validate() const;
  std::size_t max_constraint_degree() const;
};

/// Permutation group on variable indices, given by generators (0-based images).
struct PermutationGroup {
  std::size_t degree = 0;
  std::vector<std::vector<std::uint32_t>> generators;

  static PermutationGroup trivial(std::size_t degree);
  void validate() const;
  /// Group order by closure enumeration; throws ResourceError past `limit` elements.
  std::uint64_t order(std::uint64_t limit = 2'000'000) const;
};

// ---- generators ----------------------------------------------------------

/// The four-variable {1,1,1,1}_2 system p1..p5.
PolySystem build_1111_2();
/// minimize p1^2 subject to p2..p5 = 0.
PolySystem build_1111_2_optimization();
/// {5,5,5,1}_6 in 100 real variables x_{i,j,k}, y_{i,j,k}; 105 equations.
PolySystem build_5551_6();

struct VectorParamOptions {
  // Fix the first vector of the second group to (1,...,1)/sqrt(d). Only
  // applied when a1 >= d-1, where every such vector is unimodular.
  bool extra_gauge = true;
};

/// Vector parameterization of an arbitrary constellation. The first group is
/// the first a1 computational basis vectors; every other vector is
/// (1, z_2, ..., z_d)/sqrt(d) with z_k = x + i*y.
PolySystem build_vector_system(const ConstellationSpec& spec, VectorParamOptions opts = {});

struct DensityParamOptions {
  // Add every 2x2 minor instead of only the adjacent windows.
  bool full_minors = false;
};

/// Density-matrix parameterization: every state outside the first group is
/// (1/d) * H with unit diagonal and complex off-diagonal entries. Requires
/// a1 >= d-1 so the diagonal is fixed to 1/d.
PolySystem build_density_system(const ConstellationSpec& spec, DensityParamOptions opts = {});
PolySystem build_5333_6_density(DensityParamOptions opts = {});

/// S2 x S5 x S5 acting simultaneously on the (i, j, k) indices of the
/// {5,5,5,1}_6 variables.
PermutationGroup symmetry_group_5551();

/// Image index of every constraint under `perm`, or nullopt if the
/// constraint set is not mapped onto itself.
std::optional<std::vector<std::size_t>> constraint_permutation(
    const std::vector<Polynomial>& constraints, const std::vector<std::uint32_t>& perm);

/// True iff every generator maps the constraint set onto itself.
bool verify_invariance(const PolySystem& sys, const PermutationGroup& group);

// ---- numerical fixtures --------------------------------------------------

using Ket = Eigen::VectorXcd;
using Basis = std::vector<Ket>;

Basis computational_basis(unsigned d);
Basis fourier_basis(unsigned d);
/// Complete set of d+1 mutually unbiased bases for prime d.
std::vector<Basis> mub_fixture(unsigned d);

struct MuReport {
  double max_deviation = 0.0;
  bool pass = false;
  // Deviation of |<e_i^a|e_j^b>| from its target, per (a, b) group pair.
  std::vector<std::vector<double>> group_pair_deviation;
};

/// Checks |<e_i^a|e_j^b>| = delta_ij (a == b) or 1/sqrt(d) (a != b).
MuReport check_mu(const std::vector<std::vector<Ket>>& groups, double tol);

}  // namespace mubcert

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mubcert/consys.hpp"

namespace mubcert {

/// Coordinates of M - I/d in the generalized Gell-Mann basis, scaled so that
/// m1 . m2 = 1/2 tr{(M1 - I/d)(M2 - I/d)}.
struct BlochVector {
  unsigned d = 0;
  Eigen::VectorXd components;  // length d^2 - 1
};

/// Orthogonal projector in R^{d^2-1} onto the span of a basis' Bloch vectors.
struct PlaneProjector {
  unsigned d = 0;
  Eigen::MatrixXd matrix;
};

/// Generalized Gell-Mann matrices lambda_a with tr{lambda_a lambda_b} = 2 delta_ab.
std::vector<Eigen::MatrixXcd> gell_mann_basis(unsigned d);

/// Throws PreconditionError unless `state` is hermitian with unit trace (to 1e-10).
BlochVector bloch_embed(const Eigen::MatrixXcd& state);
/// Embeds |e><e|; the ket must have unit norm.
BlochVector bloch_embed(const Ket& ket);

/// Requires an orthonormal basis of C^d (to 1e-10). The result has rank d-1.
PlaneProjector basis_plane(const Basis& basis);

/// 1/2 tr{(P1 - P2)^2}.
double distance_sq(const PlaneProjector& p1, const PlaneProjector& p2);

/// Mean of the six pairwise squared distances.
double avg_distance_sq(const PlaneProjector& p1, const PlaneProjector& p2, const PlaneProjector& p3,
                       const PlaneProjector& p4);

/// Mean of D^2 over all pairs of a list with at least two entries.
double avg_distance_sq(const std::vector<PlaneProjector>& planes);

}  // namespace mubcert

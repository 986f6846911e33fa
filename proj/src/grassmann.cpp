#include "mubcert/grassmann.hpp"

#include <cmath>

#include "mubcert/errors.hpp"

namespace mubcert {

namespace {

constexpr double kValidationTol = 1e-10;

void check_same(unsigned a, unsigned b) {
  if (a != b) throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

std::vector<Eigen::MatrixXcd> gell_mann_basis(unsigned d) {
  if (d < 2) throw DimensionError("Gell-Mann basis needs d >= 2");
  using C = std::complex<double>;
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<Eigen::MatrixXcd> out;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n), a = Eigen::MatrixXcd::Zero(n, n);
      s(j, k) = s(k, j) = 1.0;
      a(j, k) = C(0, -1);
      a(k, j) = C(0, 1);
      out.push_back(std::move(s));
      out.push_back(std::move(a));
    }
  }
  for (Eigen::Index l = 1; l < n; ++l) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const double f = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) m(j, j) = f;
    m(l, l) = -f * static_cast<double>(l);
    out.push_back(std::move(m));
  }
  return out;
}

BlochVector bloch_embed(const Eigen::MatrixXcd& state) {
  if (state.rows() != state.cols() || state.rows() < 2) throw DimensionError("state must be square with d >= 2");
  if ((state - state.adjoint()).cwiseAbs().maxCoeff() > kValidationTol)
    throw PreconditionError("state is not hermitian");
  if (std::abs(state.trace() - 1.0) > kValidationTol) throw PreconditionError("state does not have unit trace");
  const auto d = static_cast<unsigned>(state.rows());
  BlochVector b;
  b.d = d;
  const auto basis = gell_mann_basis(d);
  b.components.resize(static_cast<Eigen::Index>(basis.size()));
  // m_a = 1/2 tr{M lambda_a}; the identity part drops out since lambda_a is traceless.
  for (std::size_t a = 0; a < basis.size(); ++a)
    b.components(static_cast<Eigen::Index>(a)) = 0.5 * (state * basis[a]).trace().real();
  return b;
}

BlochVector bloch_embed(const Ket& ket) {
  if (std::abs(ket.norm() - 1.0) > kValidationTol) throw PreconditionError("ket is not normalized");
  return bloch_embed(Eigen::MatrixXcd(ket * ket.adjoint()));
}

PlaneProjector basis_plane(const Basis& basis) {
  if (basis.empty()) throw DimensionError("empty basis");
  const auto d = static_cast<unsigned>(basis.front().size());
  if (basis.size() != d) throw DimensionError("a basis of C^d needs d vectors");
  for (std::size_t i = 0; i < d; ++i) {
    if (static_cast<unsigned>(basis[i].size()) != d) throw DimensionError("ket dimension mismatch");
    for (std::size_t j = i; j < d; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      if (std::abs(std::abs(basis[i].dot(basis[j])) - target) > kValidationTol)
        throw PreconditionError("basis is not orthonormal");
    }
  }
  const auto dim = static_cast<Eigen::Index>(d * d - 1);
  Eigen::MatrixXd vecs(dim, static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) vecs.col(static_cast<Eigen::Index>(i)) = bloch_embed(basis[i]).components;
  // The embedded vectors sum to zero, so their span has dimension d - 1.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vecs, Eigen::ComputeThinU);
  const Eigen::MatrixXd u = svd.matrixU().leftCols(static_cast<Eigen::Index>(d - 1));
  return {d, u * u.transpose()};
}

double distance_sq(const PlaneProjector& p1, const PlaneProjector& p2) {
  check_same(p1.d, p2.d);
  if (p1.matrix.rows() != p2.matrix.rows()) throw DimensionError("projector size mismatch");
  return 0.5 * (p1.matrix - p2.matrix).squaredNorm();
}

double avg_distance_sq(const PlaneProjector& p1, const PlaneProjector& p2, const PlaneProjector& p3,
                       const PlaneProjector& p4) {
  return avg_distance_sq(std::vector<PlaneProjector>{p1, p2, p3, p4});
}

double avg_distance_sq(const std::vector<PlaneProjector>& planes) {
  if (planes.size() < 2) throw DimensionError("need at least two planes");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < planes.size(); ++i) {
    for (std::size_t j = i + 1; j < planes.size(); ++j) {
      sum += distance_sq(planes[i], planes[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

}  // namespace mubcert

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mubcert/consys.hpp"
#include "mubcert/sdp.hpp"

namespace mubcert {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// f(X) = tr{X^T A X} + 2 tr{B^T X} + c for X in R^{n x r}.
struct QmpFunction {
  SparseMatrix A;  // n x n symmetric
  SparseMatrix B;  // n x r
  double c = 0.0;
  std::string label;

  double evaluate(const Eigen::MatrixXd& X) const;
};

/// min f_0(X)  s.t.  f_i(X) = 0.
struct QmpProblem {
  std::size_t n = 0;
  std::size_t r = 0;
  QmpFunction objective;
  std::vector<QmpFunction> constraints;

  /// Throws DimensionError on inconsistent shapes or an asymmetric A.
  void validate() const;
  /// The same constraints plus f_0 = 0, with a zero objective.
  QmpProblem feasibility() const;
  double max_violation(const Eigen::MatrixXd& X) const;
};

/// M(f) = [[A, B], [B^T, (c/r) I_r]].
Eigen::MatrixXd homogenize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double c, std::size_t r);
Eigen::MatrixXd homogenize(const QmpFunction& f, std::size_t r);

/// min tr{M(f_0) U}  s.t.  tr{M(f_i) U} = 0,  tr{N_ij U} = 2 delta_ij (i <= j),
/// U PSD of size N = n + r, and rank U <= r (not part of the SDP).
struct RankConstrainedSdp {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t qmp_constraints = 0;
  SdpProblem sdp;  // one PSD block of size N; N_ij rows come last

  std::size_t size() const { return n + r; }
  std::size_t rank_bound() const { return r; }
};

RankConstrainedSdp build_relaxation(const QmpProblem& q);

struct PolishResult {
  Eigen::MatrixXd X;
  double violation_before = 0.0;
  double violation_after = 0.0;
  int steps = 0;
};

/// Gauss-Newton refinement of an approximate solution of f_i(X) = 0, taking
/// minimum-norm steps. Stops once the max violation is <= tol.
PolishResult polish(const QmpProblem& q, const Eigen::MatrixXd& X, int max_steps = 20, double tol = 1e-14);

/// U = (X; I)(X; I)^T.
Eigen::MatrixXd lift(const Eigen::MatrixXd& X);

// ---- constellations ---------------------------------------------------------

/// Constellation as a QMP. The first group is fixed to the computational
/// projectors E_kk, k < a1. Each remaining state rho = C + iD contributes the
/// rows of C followed by the rows of D to X (2d rows, r = d columns).
struct QmpEncoding {
  ConstellationSpec spec;
  QmpProblem problem;
  std::vector<std::pair<std::size_t, std::size_t>> free_states;  // (group, index within group)
  std::optional<std::pair<std::size_t, std::size_t>> objective_pair;  // free-state indices

  std::size_t row_c(std::size_t state, std::size_t p) const { return state * 2 * spec.d + p; }
  std::size_t row_d(std::size_t state, std::size_t p) const { return state * 2 * spec.d + spec.d + p; }

  /// X for given density matrices of the free states.
  Eigen::MatrixXd pack(const std::vector<Eigen::MatrixXcd>& states) const;
  std::vector<Eigen::MatrixXcd> unpack(const Eigen::MatrixXd& X) const;
  /// All groups as kets: the computational group, then the dominant
  /// eigenvector of every free state.
  std::vector<std::vector<Ket>> kets(const Eigen::MatrixXd& X) const;
};

struct QmpEncodeOptions {
  // Free-state pair whose orthogonality becomes f_0. Defaults to the first
  // within-group pair; with no such pair the objective is zero.
  std::optional<std::pair<std::size_t, std::size_t>> objective_pair;
  bool promote_objective = true;
};

/// Throws UnsupportedError when the spec leaves no free state.
QmpEncoding encode_constellation_qmp(const ConstellationSpec& spec, const QmpEncodeOptions& opts = {});

// ---- convex iteration -------------------------------------------------------

struct FantopeStep {
  Eigen::MatrixXd W;
  double value = 0.0;
};

/// Minimizer of tr{G W} over the (N - rank)-Fantope: the projector onto the
/// eigenvectors of the N - rank smallest eigenvalues of G.
FantopeStep fantope_step(const Eigen::MatrixXd& G, std::size_t rank);

struct ConvexIterOptions {
  long max_iter = 500;
  double tol = 1e-7;        // target for tau
  // Stalled once tau decreased by less than stall_tol over stall_window iterations.
  double stall_tol = 1e-10;
  long stall_window = 25;
  std::optional<std::uint64_t> seed;  // random initial projector instead of W = 0
  SdpOptions sdp{1e-9, 200'000, 1.6, 1.0, 25};
};

enum class ConvexIterStatus { Converged, Stalled, MaxIter };
std::string to_string(ConvexIterStatus s);

struct ConvexIterState {
  long iterations = 0;
  Eigen::MatrixXd G;
  Eigen::MatrixXd W;
  std::vector<double> tau;           // Ky Fan value of G after each SDP1 solve
  std::vector<std::string> sdp_status;
  ConvexIterStatus status = ConvexIterStatus::MaxIter;
  // Present when tau <= tol.
  std::optional<Eigen::MatrixXd> factor;  // N x rank(G), G ~ F F^T
  double reconstruction_residual = 0.0;
  std::optional<Eigen::MatrixXd> X;       // top-right n x r block of G
};

ConvexIterState convex_iteration(const RankConstrainedSdp& sdp, const ConvexIterOptions& opts = {});

}  // namespace mubcert

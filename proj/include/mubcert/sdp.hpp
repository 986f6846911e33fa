#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mubcert {

/// One upper-triangular entry (row <= col, 0-based) of a symmetric block matrix.
struct SymEntry {
  std::size_t block = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  bool operator==(const SymEntry&) const = default;
};

/// Sparse symmetric block-diagonal matrix. Entries are canonical after
/// `canonicalize()`: sorted by (block, row, col), duplicates summed, zeros dropped.
struct SparseSymMatrix {
  std::vector<SymEntry> entries;

  void add(std::size_t block, std::size_t i, std::size_t j, double v);
  void canonicalize();
  bool operator==(const SparseSymMatrix&) const = default;
};

/// min <C, X>  s.t.  <A_i, X> = b_i,  X = diag(X_1, ..., X_p) PSD.
/// A negative block size -s declares an s x s diagonal block.
struct SdpProblem {
  std::vector<long> block_sizes;
  SparseSymMatrix objective;
  std::vector<SparseSymMatrix> constraints;
  std::vector<double> rhs;
  std::string comment;  // emitted on the first line of SDPA files

  std::size_t num_constraints() const { return constraints.size(); }
  /// Throws DimensionError on inconsistent shapes or out-of-range entries.
  void validate() const;
  void canonicalize();
  bool operator==(const SdpProblem&) const = default;
};

using BlockMatrices = std::vector<Eigen::MatrixXd>;

/// Dense block value of <M, X> for a sparse symmetric M.
double inner(const SparseSymMatrix& m, const BlockMatrices& x);
BlockMatrices to_dense(const SparseSymMatrix& m, const std::vector<long>& block_sizes);

enum class SdpStatus { Optimal, MaxIter, InfeasibleDetected };
std::string to_string(SdpStatus s);

struct SdpOptions {
  double tol = 1e-7;
  long max_iter = 200'000;
  double alpha = 1.6;  // over-relaxation
  double rho = 1.0;
  int check_every = 25;
};

struct SdpSolution {
  BlockMatrices X;
  std::vector<double> y;
  BlockMatrices S;  // C - sum y_i A_i
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  // Recomputed from X, y, S after the iteration loop.
  double primal_residual = 0.0;  // ||A(X) - b|| / (1 + ||b||)
  double min_eigenvalue = 0.0;   // of X
  double dual_min_eigenvalue = 0.0;
  double gap = 0.0;              // |pobj - dobj| / (1 + |pobj|)
  long iterations = 0;
  SdpStatus status = SdpStatus::MaxIter;
};

/// Warm-start state of the splitting iteration, in the solver's scaled space.
struct SdpWarmStart {
  Eigen::VectorXd z;
  Eigen::VectorXd u;
  double rho = 0.0;
};

/// First-order solver (ADMM with over-relaxation) alternating an affine
/// projection onto {A(X) = b} with a projection onto the PSD cone.
///
/// The constraint data is factored once, so several objectives over the same
/// feasible set can be solved cheaply.
class SdpSolver {
 public:
  explicit SdpSolver(const SdpProblem& p);

  SdpSolution solve(const SparseSymMatrix& objective, const SdpOptions& opts = {},
                    SdpWarmStart* warm = nullptr) const;
  SdpSolution solve(const SdpOptions& opts = {}) const { return solve(problem_.objective, opts); }

  std::size_t svec_dim() const { return dim_; }

 private:
  Eigen::VectorXd svec(const SparseSymMatrix& m) const;
  Eigen::VectorXd svec(const BlockMatrices& x) const;
  BlockMatrices smat(const Eigen::VectorXd& v) const;
  void project_psd(Eigen::VectorXd& v) const;

  SdpProblem problem_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  Eigen::MatrixXd A_;        // rows scaled to unit norm
  Eigen::VectorXd b_;
  Eigen::VectorXd row_scale_;
  Eigen::MatrixXd pinv_;     // (A A^T)^+
};

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts = {});

/// Recomputes S, residuals and objectives of `sol` from X and y.
void evaluate_solution(const SdpProblem& p, const SparseSymMatrix& objective, SdpSolution& sol);

// ---- SDPA sparse format ---------------------------------------------------
//
// Our minimization problem is the dual form of the SDPA standard pair, so the
// objective is written as F0 = -C and the constraints as F_i = A_i with c = b.

void write_sdpa(const SdpProblem& p, std::ostream& out);
std::string emit_sdpa(const SdpProblem& p);
void emit_sdpa(const SdpProblem& p, const std::string& path);
SdpProblem parse_sdpa(std::istream& in);
SdpProblem parse_sdpa_string(const std::string& text);
SdpProblem parse_sdpa_file(const std::string& path);

}  // namespace mubcert

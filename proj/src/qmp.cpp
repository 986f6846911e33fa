#include "mubcert/qmp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mubcert/errors.hpp"

namespace mubcert {

double QmpFunction::evaluate(const Eigen::MatrixXd& X) const {
  return (X.transpose() * (A * X)).trace() + 2.0 * (B.cwiseProduct(X.sparseView())).sum() + c;
}

void QmpProblem::validate() const {
  if (n == 0 || r == 0) throw DimensionError("QMP needs n, r >= 1");
  auto check = [&](const QmpFunction& f) {
    if (static_cast<std::size_t>(f.A.rows()) != n || static_cast<std::size_t>(f.A.cols()) != n)
      throw DimensionError("A has the wrong shape in '" + f.label + "'");
    if (static_cast<std::size_t>(f.B.rows()) != n || static_cast<std::size_t>(f.B.cols()) != r)
      throw DimensionError("B has the wrong shape in '" + f.label + "'");
    SparseMatrix diff = SparseMatrix(f.A.transpose()) - f.A;
    if (diff.norm() > 1e-12) throw DimensionError("A is not symmetric in '" + f.label + "'");
  };
  check(objective);
  for (const auto& f : constraints) check(f);
}

QmpProblem QmpProblem::feasibility() const {
  QmpProblem q = *this;
  const bool trivial = objective.A.nonZeros() == 0 && objective.B.nonZeros() == 0 && objective.c == 0.0;
  if (!trivial) q.constraints.push_back(objective);
  q.objective = QmpFunction{SparseMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                            SparseMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r)), 0.0,
                            "zero"};
  return q;
}

double QmpProblem::max_violation(const Eigen::MatrixXd& X) const {
  double v = 0.0;
  for (const auto& f : constraints) v = std::max(v, std::abs(f.evaluate(X)));
  return v;
}

PolishResult polish(const QmpProblem& q, const Eigen::MatrixXd& X0, int max_steps, double tol) {
  const auto n = static_cast<Eigen::Index>(q.n), r = static_cast<Eigen::Index>(q.r);
  if (X0.rows() != n || X0.cols() != r) throw DimensionError("polish: X has the wrong shape");
  const auto m = static_cast<Eigen::Index>(q.constraints.size());
  auto residual = [&](const Eigen::MatrixXd& X) {
    Eigen::VectorXd res(m);
    for (Eigen::Index i = 0; i < m; ++i) res[i] = q.constraints[static_cast<std::size_t>(i)].evaluate(X);
    return res;
  };
  PolishResult out{X0, 0.0, 0.0, 0};
  Eigen::VectorXd res = residual(out.X);
  out.violation_before = m ? res.cwiseAbs().maxCoeff() : 0.0;
  out.violation_after = out.violation_before;
  while (out.steps < max_steps && out.violation_after > tol) {
    Eigen::MatrixXd J(m, n * r);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& f = q.constraints[static_cast<std::size_t>(i)];
      Eigen::MatrixXd grad = 2.0 * (f.A * out.X + Eigen::MatrixXd(f.B));
      J.row(i) = Eigen::Map<const Eigen::VectorXd>(grad.data(), grad.size()).transpose();
    }
    Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-res);
    // Backtrack until the residual norm decreases.
    bool improved = false;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      Eigen::MatrixXd trial = out.X + t * Eigen::Map<const Eigen::MatrixXd>(step.data(), n, r);
      Eigen::VectorXd tres = residual(trial);
      if (tres.norm() < res.norm()) {
        out.X = std::move(trial);
        res = std::move(tres);
        improved = true;
        break;
      }
    }
    if (!improved) break;
    ++out.steps;
    out.violation_after = res.cwiseAbs().maxCoeff();
  }
  return out;
}

Eigen::MatrixXd homogenize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double c, std::size_t r) {
  const Eigen::Index n = A.rows();
  const auto rr = static_cast<Eigen::Index>(r);
  if (r == 0 || A.cols() != n || B.rows() != n || B.cols() != rr) throw DimensionError("homogenize: shape mismatch");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + rr, n + rr);
  M.topLeftCorner(n, n) = A;
  M.topRightCorner(n, rr) = B;
  M.bottomLeftCorner(rr, n) = B.transpose();
  M.bottomRightCorner(rr, rr) = Eigen::MatrixXd::Identity(rr, rr) * (c / static_cast<double>(r));
  return M;
}

Eigen::MatrixXd homogenize(const QmpFunction& f, std::size_t r) {
  return homogenize(Eigen::MatrixXd(f.A), Eigen::MatrixXd(f.B), f.c, r);
}

namespace {

SparseSymMatrix homogenized_entries(const QmpFunction& f, std::size_t n, std::size_t r) {
  SparseSymMatrix m;
  for (Eigen::Index k = 0; k < f.A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(f.A, k); it; ++it) {
      if (it.row() <= it.col()) m.add(0, static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value());
    }
  }
  for (Eigen::Index k = 0; k < f.B.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(f.B, k); it; ++it)
      m.add(0, static_cast<std::size_t>(it.row()), n + static_cast<std::size_t>(it.col()), it.value());
  }
  if (f.c != 0.0) {
    for (std::size_t j = 0; j < r; ++j) m.add(0, n + j, n + j, f.c / static_cast<double>(r));
  }
  m.canonicalize();
  return m;
}

}  // namespace

RankConstrainedSdp build_relaxation(const QmpProblem& q) {
  q.validate();
  RankConstrainedSdp out;
  out.n = q.n;
  out.r = q.r;
  out.qmp_constraints = q.constraints.size();
  SdpProblem& p = out.sdp;
  p.block_sizes = {static_cast<long>(q.n + q.r)};
  p.objective = homogenized_entries(q.objective, q.n, q.r);
  for (const auto& f : q.constraints) {
    p.constraints.push_back(homogenized_entries(f, q.n, q.r));
    p.rhs.push_back(0.0);
  }
  for (std::size_t i = 0; i < q.r; ++i) {
    for (std::size_t j = i; j < q.r; ++j) {
      SparseSymMatrix nij;
      // tr{N_ij U} = 2 U_{n+i, n+j}
      nij.add(0, q.n + i, q.n + j, i == j ? 2.0 : 1.0);
      p.constraints.push_back(std::move(nij));
      p.rhs.push_back(i == j ? 2.0 : 0.0);
    }
  }
  p.comment = "rank bound " + std::to_string(q.r) + "; N = " + std::to_string(q.n + q.r);
  return out;
}

Eigen::MatrixXd lift(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd v(X.rows() + X.cols(), X.cols());
  v.topRows(X.rows()) = X;
  v.bottomRows(X.cols()) = Eigen::MatrixXd::Identity(X.cols(), X.cols());
  return v * v.transpose();
}

// ------------------------------------------------------------ encoder

namespace {

class FunctionBuilder {
 public:
  FunctionBuilder(std::size_t n, std::size_t r) : n_(n), r_(r) {}

  // coeff * <row a, row b>
  void quad(std::size_t a, std::size_t b, double coeff) {
    if (a == b) {
      a_.emplace_back(a, a, coeff);
    } else {
      a_.emplace_back(a, b, coeff / 2);
      a_.emplace_back(b, a, coeff / 2);
    }
  }
  // coeff * X(row, col)
  void linear(std::size_t row, std::size_t col, double coeff) { b_.emplace_back(row, col, coeff / 2); }
  void constant(double c) { c_ += c; }

  QmpFunction build(std::string label) const {
    QmpFunction f;
    f.A.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    f.A.setFromTriplets(a_.begin(), a_.end());
    f.A.prune(0.0);
    f.B.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(r_));
    f.B.setFromTriplets(b_.begin(), b_.end());
    f.B.prune(0.0);
    f.c = c_;
    f.label = std::move(label);
    return f;
  }

 private:
  using T = Eigen::Triplet<double>;
  std::size_t n_, r_;
  std::vector<T> a_, b_;
  double c_ = 0.0;
};

std::string pair_label(const char* kind, std::size_t s, std::size_t t) {
  return std::string(kind) + "(" + std::to_string(s) + "," + std::to_string(t) + ")";
}

}  // namespace

QmpEncoding encode_constellation_qmp(const ConstellationSpec& spec, const QmpEncodeOptions& opts) {
  spec.validate();
  QmpEncoding enc;
  enc.spec = spec;
  for (std::size_t g = 1; g < spec.groups.size(); ++g)
    for (std::size_t i = 0; i < spec.groups[g]; ++i) enc.free_states.emplace_back(g, i);
  if (enc.free_states.empty()) throw UnsupportedError("constellation " + spec.to_string() + " has no free states");

  const std::size_t d = spec.d;
  const std::size_t S = enc.free_states.size();
  const std::size_t n = 2 * d * S;
  const double inv_d = 1.0 / static_cast<double>(d);
  QmpProblem& q = enc.problem;
  q.n = n;
  q.r = d;

  for (std::size_t s = 0; s < S; ++s) {
    const std::string tag = "s" + std::to_string(s);
    // C symmetric, D antisymmetric.
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t t = p + 1; t < d; ++t) {
        FunctionBuilder f(n, d);
        f.linear(enc.row_c(s, p), t, 1.0);
        f.linear(enc.row_c(s, t), p, -1.0);
        q.constraints.push_back(f.build("herm_c_" + tag + pair_label("", p, t)));
      }
    }
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t t = p; t < d; ++t) {
        FunctionBuilder f(n, d);
        f.linear(enc.row_d(s, p), t, 1.0);
        f.linear(enc.row_d(s, t), p, 1.0);
        q.constraints.push_back(f.build("herm_d_" + tag + pair_label("", p, t)));
      }
    }
    {
      FunctionBuilder f(n, d);
      for (std::size_t p = 0; p < d; ++p) f.linear(enc.row_c(s, p), p, 1.0);
      f.constant(-1.0);
      q.constraints.push_back(f.build("trace_" + tag));
    }
    // rho^2 = rho, using (rho^2)_pt = sum_m rho_pm conj(rho_tm).
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t t = p; t < d; ++t) {
        FunctionBuilder f(n, d);
        f.quad(enc.row_c(s, p), enc.row_c(s, t), 1.0);
        f.quad(enc.row_d(s, p), enc.row_d(s, t), 1.0);
        f.linear(enc.row_c(s, p), t, -1.0);
        q.constraints.push_back(f.build("proj_re_" + tag + pair_label("", p, t)));
      }
    }
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t t = p + 1; t < d; ++t) {
        FunctionBuilder f(n, d);
        f.quad(enc.row_d(s, p), enc.row_c(s, t), 1.0);
        f.quad(enc.row_c(s, p), enc.row_d(s, t), -1.0);
        f.linear(enc.row_d(s, p), t, -1.0);
        q.constraints.push_back(f.build("proj_im_" + tag + pair_label("", p, t)));
      }
    }
    // Unbiased with every computational projector of the first group.
    for (std::size_t k = 0; k < spec.groups[0]; ++k) {
      FunctionBuilder f(n, d);
      f.linear(enc.row_c(s, k), k, 1.0);
      f.constant(-inv_d);
      q.constraints.push_back(f.build("mu_e" + std::to_string(k) + "_" + tag));
    }
  }

  std::optional<std::pair<std::size_t, std::size_t>> promote = opts.objective_pair;
  if (promote) {
    auto [a, b] = *promote;
    if (a >= S || b >= S || a == b) throw SpecError("objective pair out of range");
    if (enc.free_states[a].first != enc.free_states[b].first)
      throw SpecError("objective pair must lie in one group");
    if (a > b) std::swap(a, b);
    promote = std::make_pair(a, b);
  }
  q.objective = FunctionBuilder(n, d).build("zero");
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t t = s + 1; t < S; ++t) {
      const bool same = enc.free_states[s].first == enc.free_states[t].first;
      // tr{rho_s rho_t} = sum_p <C_sp, C_tp> + <D_sp, D_tp>
      FunctionBuilder f(n, d);
      for (std::size_t p = 0; p < d; ++p) {
        f.quad(enc.row_c(s, p), enc.row_c(t, p), 1.0);
        f.quad(enc.row_d(s, p), enc.row_d(t, p), 1.0);
      }
      if (!same) f.constant(-inv_d);
      if (same && opts.promote_objective && !enc.objective_pair && (!promote || *promote == std::make_pair(s, t))) {
        enc.objective_pair = std::make_pair(s, t);
        q.objective = f.build(pair_label("orth", s, t));
        continue;
      }
      q.constraints.push_back(f.build(pair_label(same ? "orth" : "mu", s, t)));
    }
  }
  q.validate();
  return enc;
}

Eigen::MatrixXd QmpEncoding::pack(const std::vector<Eigen::MatrixXcd>& states) const {
  if (states.size() != free_states.size()) throw DimensionError("wrong number of states");
  const auto d = static_cast<Eigen::Index>(spec.d);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(problem.n), d);
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s].rows() != d || states[s].cols() != d) throw DimensionError("state has the wrong size");
    X.middleRows(static_cast<Eigen::Index>(row_c(s, 0)), d) = states[s].real();
    X.middleRows(static_cast<Eigen::Index>(row_d(s, 0)), d) = states[s].imag();
  }
  return X;
}

std::vector<Eigen::MatrixXcd> QmpEncoding::unpack(const Eigen::MatrixXd& X) const {
  const auto d = static_cast<Eigen::Index>(spec.d);
  if (X.rows() != static_cast<Eigen::Index>(problem.n) || X.cols() != d) throw DimensionError("X has the wrong shape");
  std::vector<Eigen::MatrixXcd> out;
  for (std::size_t s = 0; s < free_states.size(); ++s) {
    Eigen::MatrixXcd rho(d, d);
    rho.real() = X.middleRows(static_cast<Eigen::Index>(row_c(s, 0)), d);
    rho.imag() = X.middleRows(static_cast<Eigen::Index>(row_d(s, 0)), d);
    out.push_back(std::move(rho));
  }
  return out;
}

std::vector<std::vector<Ket>> QmpEncoding::kets(const Eigen::MatrixXd& X) const {
  std::vector<std::vector<Ket>> groups(spec.groups.size());
  const Basis e = computational_basis(spec.d);
  for (std::size_t k = 0; k < spec.groups[0]; ++k) groups[0].push_back(e[k]);
  const auto rhos = unpack(X);
  for (std::size_t s = 0; s < rhos.size(); ++s) {
    const Eigen::MatrixXcd h = 0.5 * (rhos[s] + rhos[s].adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    groups[free_states[s].first].push_back(es.eigenvectors().col(h.rows() - 1).normalized());
  }
  return groups;
}

// ------------------------------------------------------------ convex iteration

FantopeStep fantope_step(const Eigen::MatrixXd& G, std::size_t rank) {
  if (G.rows() != G.cols()) throw DimensionError("G must be square");
  const auto N = static_cast<std::size_t>(G.rows());
  if (rank > N) throw DimensionError("rank bound exceeds matrix size");
  const auto k = static_cast<Eigen::Index>(N - rank);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  const Eigen::MatrixXd V = es.eigenvectors().leftCols(k);
  return {V * V.transpose(), es.eigenvalues().head(k).sum()};
}

std::string to_string(ConvexIterStatus s) {
  switch (s) {
    case ConvexIterStatus::Converged: return "converged";
    case ConvexIterStatus::Stalled: return "stalled";
    case ConvexIterStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

namespace {

SparseSymMatrix dense_objective(const Eigen::MatrixXd& W) {
  SparseSymMatrix m;
  for (Eigen::Index j = 0; j < W.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      if (W(i, j) != 0.0)
        m.add(0, static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0.5 * (W(i, j) + W(j, i)));
  return m;
}

}  // namespace

ConvexIterState convex_iteration(const RankConstrainedSdp& rc, const ConvexIterOptions& opts) {
  if (opts.max_iter < 1 || !(opts.tol > 0)) throw PreconditionError("invalid convex iteration options");
  const auto N = static_cast<Eigen::Index>(rc.size());
  const std::size_t rank = rc.rank_bound();
  SdpSolver solver(rc.sdp);
  SdpWarmStart warm;

  ConvexIterState st;
  st.W = Eigen::MatrixXd::Zero(N, N);
  if (opts.seed) {
    std::mt19937_64 rng(*opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd R(N, N - static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(N, R.cols());
    st.W = Q * Q.transpose();
  }

  st.status = ConvexIterStatus::MaxIter;
  for (long it = 0; it < opts.max_iter; ++it) {
    SdpSolution sol;
    try {
      sol = solver.solve(dense_objective(st.W), opts.sdp, &warm);
    } catch (const Error& e) {
      throw Error(std::string("SDP1 failed at convex iteration ") + std::to_string(it + 1) + ": " + e.what());
    }
    st.sdp_status.push_back(to_string(sol.status));
    st.G = sol.X[0];
    FantopeStep w = fantope_step(st.G, rank);
    st.W = std::move(w.W);
    const double tau = std::max(0.0, w.value);
    st.tau.push_back(tau);
    st.iterations = it + 1;
    if (sol.status == SdpStatus::InfeasibleDetected) {
      st.status = ConvexIterStatus::Stalled;
      break;
    }
    if (tau <= opts.tol) {
      st.status = ConvexIterStatus::Converged;
      break;
    }
    const auto t = static_cast<long>(st.tau.size()) - 1;
    if (t >= opts.stall_window && st.tau[static_cast<std::size_t>(t - opts.stall_window)] - tau < opts.stall_tol) {
      st.status = ConvexIterStatus::Stalled;
      break;
    }
  }

  if (st.status == ConvexIterStatus::Converged) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.G);
    const double cut = std::sqrt(opts.tol);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < N; ++i)
      if (es.eigenvalues()(i) > cut) keep.push_back(i);
    Eigen::MatrixXd F(N, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
      F.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) * std::sqrt(es.eigenvalues()(keep[c]));
    st.reconstruction_residual = (st.G - F * F.transpose()).norm();
    st.factor = std::move(F);
    st.X = st.G.topRightCorner(static_cast<Eigen::Index>(rc.n), static_cast<Eigen::Index>(rc.r));
  }
  return st;
}

}  // namespace mubcert

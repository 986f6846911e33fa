#include "mubcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mubcert/errors.hpp"

namespace mubcert {

void SparseSymMatrix::add(std::size_t block, std::size_t i, std::size_t j, double v) {
  if (i > j) std::swap(i, j);
  entries.push_back({block, i, j, v});
}

void SparseSymMatrix::canonicalize() {
  std::stable_sort(entries.begin(), entries.end(), [](const SymEntry& a, const SymEntry& b) {
    return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
  });
  std::vector<SymEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().block == e.block && out.back().row == e.row && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const SymEntry& e) { return e.value == 0.0; });
  entries = std::move(out);
}

namespace {

std::size_t block_dim(long s) { return static_cast<std::size_t>(s < 0 ? -s : s); }

void check_entries(const SparseSymMatrix& m, const std::vector<long>& blocks, const std::string& what) {
  for (const auto& e : m.entries) {
    if (e.block >= blocks.size()) throw DimensionError(what + ": block index out of range");
    const std::size_t s = block_dim(blocks[e.block]);
    if (e.row > e.col || e.col >= s) throw DimensionError(what + ": entry index out of range");
    if (blocks[e.block] < 0 && e.row != e.col) throw DimensionError(what + ": off-diagonal entry in a diagonal block");
    if (!std::isfinite(e.value)) throw DimensionError(what + ": non-finite value");
  }
}

}  // namespace

void SdpProblem::validate() const {
  if (block_sizes.empty()) throw DimensionError("SDP has no blocks");
  for (long s : block_sizes) {
    if (s == 0) throw DimensionError("zero block size");
  }
  if (rhs.size() != constraints.size()) throw DimensionError("rhs length differs from constraint count");
  for (double b : rhs) {
    if (!std::isfinite(b)) throw DimensionError("non-finite rhs");
  }
  check_entries(objective, block_sizes, "objective");
  for (std::size_t i = 0; i < constraints.size(); ++i)
    check_entries(constraints[i], block_sizes, "constraint " + std::to_string(i + 1));
}

void SdpProblem::canonicalize() {
  objective.canonicalize();
  for (auto& c : constraints) c.canonicalize();
}

double inner(const SparseSymMatrix& m, const BlockMatrices& x) {
  double s = 0.0;
  for (const auto& e : m.entries) s += (e.row == e.col ? 1.0 : 2.0) * e.value * x[e.block](e.row, e.col);
  return s;
}

BlockMatrices to_dense(const SparseSymMatrix& m, const std::vector<long>& block_sizes) {
  BlockMatrices out;
  for (long s : block_sizes) out.push_back(Eigen::MatrixXd::Zero(block_dim(s), block_dim(s)));
  for (const auto& e : m.entries) {
    out[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) out[e.block](e.col, e.row) += e.value;
  }
  return out;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIter: return "max_iter";
    case SdpStatus::InfeasibleDetected: return "infeasible_detected";
  }
  return "unknown";
}

// ------------------------------------------------------------ solver

namespace {

const double kSqrt2 = std::sqrt(2.0);

double min_eigenvalue(const Eigen::MatrixXd& m, bool diagonal) {
  if (m.size() == 0) return 0.0;
  if (diagonal) return m.diagonal().minCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

SdpSolver::SdpSolver(const SdpProblem& p) : problem_(p) {
  problem_.validate();
  for (long s : problem_.block_sizes) {
    offsets_.push_back(dim_);
    const std::size_t n = block_dim(s);
    dim_ += s < 0 ? n : n * (n + 1) / 2;
  }
  const std::size_t m = problem_.constraints.size();
  A_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dim_));
  b_.resize(static_cast<Eigen::Index>(m));
  row_scale_.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXd a = svec(problem_.constraints[i]);
    const double nrm = a.norm();
    const double s = nrm > 0 ? 1.0 / nrm : 1.0;
    A_.row(static_cast<Eigen::Index>(i)) = a.transpose() * s;
    b_(static_cast<Eigen::Index>(i)) = problem_.rhs[i] * s;
    row_scale_(static_cast<Eigen::Index>(i)) = s;
  }
  if (m > 0) {
    Eigen::MatrixXd gram = A_ * A_.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const Eigen::VectorXd& lam = es.eigenvalues();
    const double cut = 1e-10 * std::max(1.0, lam.maxCoeff());
    Eigen::VectorXd inv = lam.unaryExpr([cut](double l) { return l > cut ? 1.0 / l : 0.0; });
    pinv_ = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  }
}

Eigen::VectorXd SdpSolver::svec(const SparseSymMatrix& m) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  for (const auto& e : m.entries) {
    const long s = problem_.block_sizes[e.block];
    std::size_t idx;
    if (s < 0) {
      idx = offsets_[e.block] + e.row;
    } else {
      idx = offsets_[e.block] + e.col * (e.col + 1) / 2 + e.row;
    }
    v(static_cast<Eigen::Index>(idx)) += (e.row == e.col ? 1.0 : kSqrt2) * e.value;
  }
  return v;
}

Eigen::VectorXd SdpSolver::svec(const BlockMatrices& x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
  for (std::size_t b = 0; b < x.size(); ++b) {
    const long s = problem_.block_sizes[b];
    const std::size_t n = block_dim(s);
    std::size_t idx = offsets_[b];
    if (s < 0) {
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(idx++)) = x[b](i, i);
    } else {
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i)
          v(static_cast<Eigen::Index>(idx++)) = (i == j ? 1.0 : kSqrt2) * x[b](i, j);
    }
  }
  return v;
}

BlockMatrices SdpSolver::smat(const Eigen::VectorXd& v) const {
  BlockMatrices out;
  for (std::size_t b = 0; b < problem_.block_sizes.size(); ++b) {
    const long s = problem_.block_sizes[b];
    const auto n = static_cast<Eigen::Index>(block_dim(s));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    auto idx = static_cast<Eigen::Index>(offsets_[b]);
    if (s < 0) {
      for (Eigen::Index i = 0; i < n; ++i) m(i, i) = v(idx++);
    } else {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
          const double val = i == j ? v(idx) : v(idx) / kSqrt2;
          m(i, j) = m(j, i) = val;
          ++idx;
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

void SdpSolver::project_psd(Eigen::VectorXd& v) const {
  for (std::size_t b = 0; b < problem_.block_sizes.size(); ++b) {
    const long s = problem_.block_sizes[b];
    const auto n = static_cast<Eigen::Index>(block_dim(s));
    const auto off = static_cast<Eigen::Index>(offsets_[b]);
    if (s < 0) {
      for (Eigen::Index i = 0; i < n; ++i) v(off + i) = std::max(0.0, v(off + i));
      continue;
    }
    Eigen::MatrixXd m(n, n);
    Eigen::Index idx = off;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double val = i == j ? v(idx) : v(idx) / kSqrt2;
        m(i, j) = m(j, i) = val;
        ++idx;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    if (lam.maxCoeff() == 0.0) {
      v.segment(off, idx - off).setZero();
      continue;
    }
    m = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    idx = off;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i <= j; ++i) v(idx++) = i == j ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

void evaluate_solution(const SdpProblem& p, const SparseSymMatrix& objective, SdpSolution& sol) {
  const std::size_t m = p.constraints.size();
  double res2 = 0.0, b2 = 0.0, dobj = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = inner(p.constraints[i], sol.X) - p.rhs[i];
    res2 += r * r;
    b2 += p.rhs[i] * p.rhs[i];
    dobj += p.rhs[i] * sol.y[i];
  }
  sol.primal_residual = std::sqrt(res2) / (1.0 + std::sqrt(b2));
  sol.primal_objective = inner(objective, sol.X);
  sol.dual_objective = dobj;
  sol.gap = std::abs(sol.primal_objective - sol.dual_objective) / (1.0 + std::abs(sol.primal_objective));

  sol.S = to_dense(objective, p.block_sizes);
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& e : p.constraints[i].entries) {
      sol.S[e.block](e.row, e.col) -= sol.y[i] * e.value;
      if (e.row != e.col) sol.S[e.block](e.col, e.row) -= sol.y[i] * e.value;
    }
  }
  sol.min_eigenvalue = 0.0;
  sol.dual_min_eigenvalue = 0.0;
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    const bool diag = p.block_sizes[b] < 0;
    const double lx = min_eigenvalue(sol.X[b], diag);
    const double ls = min_eigenvalue(sol.S[b], diag);
    if (b == 0 || lx < sol.min_eigenvalue) sol.min_eigenvalue = lx;
    if (b == 0 || ls < sol.dual_min_eigenvalue) sol.dual_min_eigenvalue = ls;
  }
}

namespace {

bool meets_optimality(const SdpSolution& s, double tol) {
  return s.primal_residual <= tol && s.min_eigenvalue >= -tol && s.gap <= tol;
}

}  // namespace

SdpSolution SdpSolver::solve(const SparseSymMatrix& objective, const SdpOptions& opts, SdpWarmStart* warm) const {
  check_entries(objective, problem_.block_sizes, "objective");
  if (!(opts.tol > 0) || opts.max_iter < 0 || !(opts.alpha > 0 && opts.alpha < 2) || !(opts.rho > 0)) {
    throw PreconditionError("invalid SDP solver options");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dim_);
  const Eigen::Index m = A_.rows();

  Eigen::VectorXd c = svec(objective);
  const double cscale = std::max(1.0, c.norm());
  c /= cscale;

  SdpSolution sol;
  auto finish = [&](const Eigen::VectorXd& z, const Eigen::VectorXd& w_scaled, double rho) {
    sol.X = smat(z);
    sol.y.assign(static_cast<std::size_t>(m), 0.0);
    for (Eigen::Index i = 0; i < m; ++i)
      sol.y[static_cast<std::size_t>(i)] = -rho * w_scaled(i) * row_scale_(i) * cscale;
    evaluate_solution(problem_, objective, sol);
  };

  // An inconsistent affine set cannot meet any PSD point.
  if (m > 0) {
    const Eigen::VectorXd ls = A_ * (A_.transpose() * (pinv_ * b_)) - b_;
    if (ls.norm() > 1e-8 * (1.0 + b_.norm())) {
      Eigen::VectorXd z = A_.transpose() * (pinv_ * b_);
      project_psd(z);
      finish(z, Eigen::VectorXd::Zero(m), opts.rho);
      sol.status = SdpStatus::InfeasibleDetected;
      return sol;
    }
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(n), u = Eigen::VectorXd::Zero(n);
  double rho = opts.rho;
  if (warm && warm->z.size() == n && warm->u.size() == n && warm->rho > 0) {
    z = warm->z;
    u = warm->u;
    rho = warm->rho;
  }
  Eigen::VectorXd x(n), v(n), xh(n), zold(n), w = Eigen::VectorXd::Zero(m);
  const double bnorm = b_.norm();

  long it = 0;
  int checks = 0;
  sol.status = SdpStatus::MaxIter;
  for (; it < opts.max_iter; ++it) {
    v = z - u - c / rho;
    if (m > 0) {
      w = pinv_ * (A_ * v - b_);
      x = v - A_.transpose() * w;
    } else {
      x = v;
    }
    xh = opts.alpha * x + (1.0 - opts.alpha) * z;
    zold = z;
    z = xh + u;
    project_psd(z);
    u += xh - z;

    if ((it + 1) % opts.check_every != 0) continue;
    ++checks;
    const double scale_p = 1.0 + std::max(x.norm(), z.norm());
    const double rp = (x - z).norm() / scale_p;
    const double rd = rho * (z - zold).norm() / (1.0 + c.norm());
    const double pobj = c.dot(z);
    const double dobj = m > 0 ? -rho * b_.dot(w) : 0.0;
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double prim = m > 0 ? (A_ * z - b_).norm() / (1.0 + bnorm) : 0.0;

    if (rp <= opts.tol && rd <= opts.tol && gap <= opts.tol && prim <= opts.tol) {
      finish(z, w, rho);
      if (meets_optimality(sol, opts.tol)) {
        sol.status = SdpStatus::Optimal;
        ++it;
        break;
      }
    }
    if (!std::isfinite(rp) || !std::isfinite(rd)) throw Error("SDP iteration produced non-finite values");
    // Divergent scaled duals are the signature of an empty intersection.
    if (rho * u.norm() > 1e10) {
      sol.status = SdpStatus::InfeasibleDetected;
      ++it;
      break;
    }
    if (checks % 4 == 0) {
      if (rp > 10.0 * rd && rho < 1e6) {
        rho *= 2.0;
        u *= 0.5;
      } else if (rd > 10.0 * rp && rho > 1e-6) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }
  const SdpStatus status = sol.status;
  finish(z, w, rho);
  sol.iterations = it;
  sol.status = status;
  if (status == SdpStatus::MaxIter && meets_optimality(sol, opts.tol)) sol.status = SdpStatus::Optimal;
  if (warm) {
    warm->z = z;
    warm->u = u;
    warm->rho = rho;
  }
  return sol;
}

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opts) { return SdpSolver(p).solve(opts); }

// ------------------------------------------------------------ SDPA

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_entries(std::ostream& out, std::size_t matno, const SparseSymMatrix& m, double sign) {
  SparseSymMatrix c = m;
  c.canonicalize();
  for (const auto& e : c.entries) {
    out << matno << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << fmt(sign * e.value)
        << '\n';
  }
}

struct Tokenizer {
  std::istream& in;
  long line_no = 0;
  std::vector<std::string> tokens;
  std::size_t pos = 0;

  bool next_line() {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      // Header lines are often annotated, e.g. "3 =mdim".
      if (auto eq = line.find('='); eq != std::string::npos) line.erase(eq);
      for (char& ch : line) {
        if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '\r' || ch == '\t') ch = ' ';
      }
      std::istringstream ss(line);
      tokens.clear();
      pos = 0;
      std::string t;
      while (ss >> t) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }
  std::string next() {
    while (pos >= tokens.size()) {
      if (!next_line()) throw ParseError("unexpected end of SDPA input", line_no);
    }
    return tokens[pos++];
  }
};

double parse_double(const std::string& t, long line) {
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0' || !std::isfinite(v)) throw ParseError("bad number '" + t + "'", line);
  return v;
}

long parse_long(const std::string& t, long line) {
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end == t.c_str() || *end != '\0') {
    // Some writers emit integral counts as "3.0".
    const double d = parse_double(t, line);
    if (d != std::floor(d)) throw ParseError("expected an integer, got '" + t + "'", line);
    return static_cast<long>(d);
  }
  return v;
}

}  // namespace

void write_sdpa(const SdpProblem& p, std::ostream& out) {
  p.validate();
  std::string comment = p.comment;
  std::replace(comment.begin(), comment.end(), '\n', ' ');
  out << '*' << (comment.empty() ? "" : " " + comment) << '\n';
  out << p.constraints.size() << '\n';
  out << p.block_sizes.size() << '\n';
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) out << (b ? " " : "") << p.block_sizes[b];
  out << '\n';
  for (std::size_t i = 0; i < p.rhs.size(); ++i) out << (i ? " " : "") << fmt(p.rhs[i]);
  out << '\n';
  write_entries(out, 0, p.objective, -1.0);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) write_entries(out, i + 1, p.constraints[i], 1.0);
}

std::string emit_sdpa(const SdpProblem& p) {
  std::ostringstream ss;
  write_sdpa(p, ss);
  return ss.str();
}

void emit_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_sdpa(p, f);
  if (!f) throw Error("write to '" + path + "' failed");
}

SdpProblem parse_sdpa(std::istream& in) {
  SdpProblem p;
  // Leading comment lines start with '"' or '*'; the first one is kept.
  std::string line;
  long line_no = 0;
  bool have_comment = false;
  while (true) {
    if (!std::getline(in, line)) throw ParseError("empty SDPA input", line_no);
    ++line_no;
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
      if (!have_comment) {
        std::string c = line.substr(1);
        if (!c.empty() && c.back() == '\r') c.pop_back();
        if (!c.empty() && c[0] == ' ') c.erase(0, 1);
        p.comment = c;
        have_comment = true;
      }
      continue;
    }
    break;
  }
  // Re-tokenize from the first data line.
  std::string rest = line + "\n" + std::string(std::istreambuf_iterator<char>(in), {});
  std::istringstream body(rest);
  Tokenizer tk{body, 0, {}, 0};
  tk.line_no = line_no - 1;

  const long m = parse_long(tk.next(), tk.line_no);
  const long nb = parse_long(tk.next(), tk.line_no);
  if (m < 0 || nb <= 0) throw ParseError("invalid constraint or block count", tk.line_no);
  for (long b = 0; b < nb; ++b) {
    const long s = parse_long(tk.next(), tk.line_no);
    if (s == 0) throw ParseError("zero block size", tk.line_no);
    p.block_sizes.push_back(s);
  }
  for (long i = 0; i < m; ++i) p.rhs.push_back(parse_double(tk.next(), tk.line_no));
  p.constraints.resize(static_cast<std::size_t>(m));
  if (tk.pos != tk.tokens.size()) throw ParseError("trailing tokens after rhs vector", tk.line_no);

  while (tk.next_line()) {
    if (tk.tokens.size() != 5) throw ParseError("expected 'matno blk i j value'", tk.line_no);
    const long mat = parse_long(tk.tokens[0], tk.line_no);
    const long blk = parse_long(tk.tokens[1], tk.line_no);
    const long i = parse_long(tk.tokens[2], tk.line_no);
    const long j = parse_long(tk.tokens[3], tk.line_no);
    const double v = parse_double(tk.tokens[4], tk.line_no);
    if (mat < 0 || mat > m) throw ParseError("matrix number out of range", tk.line_no);
    if (blk < 1 || blk > nb) throw ParseError("block number out of range", tk.line_no);
    const long s = std::labs(p.block_sizes[static_cast<std::size_t>(blk - 1)]);
    if (i < 1 || j < 1 || i > s || j > s) throw ParseError("entry index out of range", tk.line_no);
    if (p.block_sizes[static_cast<std::size_t>(blk - 1)] < 0 && i != j)
      throw ParseError("off-diagonal entry in a diagonal block", tk.line_no);
    SparseSymMatrix& target = mat == 0 ? p.objective : p.constraints[static_cast<std::size_t>(mat - 1)];
    target.add(static_cast<std::size_t>(blk - 1), static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
               mat == 0 ? -v : v);
  }
  p.canonicalize();
  return p;
}

SdpProblem parse_sdpa_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_sdpa(ss);
}

SdpProblem parse_sdpa_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  return parse_sdpa(f);
}

}  // namespace mubcert

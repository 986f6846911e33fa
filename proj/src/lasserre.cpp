#include "mubcert/lasserre.hpp"

#include <algorithm>

#include "mubcert/errors.hpp"
#include "mubcert/nulla.hpp"

namespace mubcert {

namespace {

unsigned deg(const Polynomial& p) { return p.degree().value_or(0); }

void put(SparseSymMatrix& m, std::size_t i, std::size_t j, double coeff) {
  m.add(0, i, j, i == j ? coeff : coeff / 2.0);
}

}  // namespace

unsigned minimal_order(const Polynomial& objective, const std::vector<Polynomial>& eqs) {
  unsigned d = deg(objective);
  for (const auto& p : eqs) d = std::max(d, deg(p));
  return std::max(1u, (d + 1) / 2);
}

SparseSymMatrix MomentRelaxation::functional(const Polynomial& p) const {
  SparseSymMatrix m;
  for (const auto& t : p.terms()) {
    auto it = moment_index.find(t.mono);
    if (it == moment_index.end()) throw PreconditionError("monomial degree exceeds the relaxation order");
    const auto [i, j] = representative[it->second];
    put(m, i, j, t.coeff.get_d());
  }
  m.canonicalize();
  return m;
}

Eigen::MatrixXd MomentRelaxation::dirac_moment_matrix(std::span<const double> x) const {
  if (x.size() != nvars) throw DimensionError("point has wrong dimension");
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = Polynomial::monomial(basis[static_cast<std::size_t>(i)] * basis[static_cast<std::size_t>(j)])
                    .evaluate(x);
    }
  }
  return m;
}

MomentRelaxation build_moment_relaxation(const Polynomial& objective, const std::vector<Polynomial>& eqs, unsigned k) {
  const std::size_t n = objective.nvars();
  for (const auto& p : eqs) {
    if (p.nvars() != n) throw DimensionError("polynomial nvars mismatch");
  }
  if (k < minimal_order(objective, eqs)) {
    throw PreconditionError("relaxation order " + std::to_string(k) + " is below the minimal order " +
                            std::to_string(minimal_order(objective, eqs)));
  }
  MomentRelaxation r;
  r.order = k;
  r.nvars = n;
  r.basis = monomials_up_to(n, k);
  r.moments = monomials_up_to(n, 2 * k);
  for (std::size_t a = 0; a < r.moments.size(); ++a) r.moment_index.emplace(r.moments[a], a);

  const std::size_t s = r.basis.size();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  r.representative.assign(r.moments.size(), {unset, unset});
  SdpProblem& sdp = r.sdp;
  sdp.block_sizes = {static_cast<long>(s)};
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      const std::size_t a = r.moment_index.at(r.basis[i] * r.basis[j]);
      auto& rep = r.representative[a];
      if (rep.first == unset) {
        rep = {i, j};
        continue;
      }
      SparseSymMatrix c;
      put(c, i, j, 1.0);
      put(c, rep.first, rep.second, -1.0);
      c.canonicalize();
      sdp.constraints.push_back(std::move(c));
      sdp.rhs.push_back(0.0);
      ++r.consistency_rows;
    }
  }

  SparseSymMatrix y0;
  put(y0, 0, 0, 1.0);
  sdp.constraints.push_back(y0);
  sdp.rhs.push_back(1.0);

  for (const auto& p : eqs) {
    if (p.is_zero()) continue;
    for (const auto& delta : monomials_up_to(n, 2 * k - deg(p))) {
      SparseSymMatrix c = r.functional(p.times(delta));
      if (c.entries.empty()) continue;
      sdp.constraints.push_back(std::move(c));
      sdp.rhs.push_back(0.0);
      ++r.equality_rows;
    }
  }
  sdp.objective = r.functional(objective);
  sdp.comment = "moment relaxation order " + std::to_string(k);
  return r;
}

LowerBound lower_bound(const Polynomial& objective, const std::vector<Polynomial>& eqs, unsigned k,
                       const SdpOptions& opts) {
  MomentRelaxation r = build_moment_relaxation(objective, eqs, k);
  LowerBound lb;
  lb.order = k;
  lb.solution = solve_sdp(r.sdp, opts);
  lb.value = lb.solution.primal_objective;
  return lb;
}

}  // namespace mubcert

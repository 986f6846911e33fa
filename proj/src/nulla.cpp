#include "mubcert/nulla.hpp"

#include <algorithm>
#include <numeric>

#include "mubcert/errors.hpp"
#include "mubcert/parallel.hpp"

namespace mubcert {

Integer count_monomials(std::size_t n, unsigned d) {
  Integer c;
  mpz_bin_uiui(c.get_mpz_t(), n + d, d);
  return c;
}

namespace {

void compositions(std::size_t n, unsigned total, std::size_t pos, std::vector<Exponent>& cur,
                  std::vector<Monomial>& out) {
  if (pos + 1 == n) {
    cur[pos] = total;
    out.emplace_back(cur);
    return;
  }
  for (unsigned e = total + 1; e-- > 0;) {
    cur[pos] = e;
    compositions(n, total - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

std::size_t checked_count(std::size_t n, unsigned d, std::size_t cap, const char* what, long progress) {
  Integer c = count_monomials(n, d);
  if (c > Integer(static_cast<unsigned long>(cap))) {
    throw ResourceError(std::string(what) + " count " + c.get_str() + " exceeds cap " + std::to_string(cap),
                        std::string("max_") + what, progress);
  }
  return c.get_ui();
}

unsigned max_degree(const std::vector<Polynomial>& F) {
  unsigned m = 0;
  for (const auto& f : F) m = std::max(m, f.degree().value_or(0));
  return m;
}

}  // namespace

std::vector<Monomial> monomials_up_to(std::size_t n, unsigned d) {
  std::vector<Monomial> out;
  if (n == 0) {
    out.emplace_back(0);
    return out;
  }
  std::vector<Exponent> cur(n, 0);
  for (unsigned t = 0; t <= d; ++t) {
    std::vector<Monomial> level;
    compositions(n, t, 0, cur, level);
    // compositions() yields descending lex within a degree; reverse for ascending.
    out.insert(out.end(), level.rbegin(), level.rend());
  }
  return out;
}

LinearSystem build_linear_system(const std::vector<Polynomial>& F, unsigned d, const NullaLimits& limits) {
  if (F.empty()) throw PreconditionError("empty polynomial list");
  const std::size_t n = F.front().nvars();
  for (const auto& f : F) {
    if (f.nvars() != n) throw DimensionError("polynomial nvars mismatch");
  }
  const unsigned maxdeg = max_degree(F);
  if (d < maxdeg) {
    throw PreconditionError("degree " + std::to_string(d) + " is below the maximum constraint degree " +
                            std::to_string(maxdeg));
  }
  const long progress = static_cast<long>(d) - 1;
  const std::size_t nrows = checked_count(n, d, limits.max_rows, "rows", progress);
  std::size_t ncols = 0;
  for (const auto& f : F) {
    if (f.is_zero()) continue;
    ncols += checked_count(n, d - *f.degree(), limits.max_cols, "cols", progress);
    if (ncols > limits.max_cols) {
      throw ResourceError("column count exceeds cap " + std::to_string(limits.max_cols), "max_cols", progress);
    }
  }

  LinearSystem ls;
  ls.degree = d;
  ls.row_labels = monomials_up_to(n, d);
  ls.row_index.reserve(nrows);
  for (std::size_t r = 0; r < ls.row_labels.size(); ++r) ls.row_index.emplace(ls.row_labels[r], r);

  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i].is_zero()) continue;
    for (auto& m : monomials_up_to(n, d - *F[i].degree())) ls.col_labels.push_back({std::move(m), i});
  }

  ls.matrix.rows = nrows;
  ls.matrix.cols = ls.col_labels.size();
  ls.matrix.columns.resize(ls.matrix.cols);
  ls.matrix.rhs.assign(nrows, 0);
  ls.matrix.rhs[ls.row_index.at(Monomial(n))] = 1;

  const unsigned threads = limits.threads ? limits.threads : configured_threads();
  parallel_for(ls.matrix.cols, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      const auto& label = ls.col_labels[c];
      auto& column = ls.matrix.columns[c];
      for (const auto& t : F[label.constraint].terms()) {
        column.emplace_back(ls.row_index.at(t.mono * label.shift), t.coeff);
      }
      std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    }
  });
  return ls;
}

unsigned certificate_degree(const std::vector<Polynomial>& F, const std::vector<Polynomial>& cofactors) {
  unsigned deg = 0;
  for (std::size_t i = 0; i < cofactors.size() && i < F.size(); ++i) {
    if (cofactors[i].is_zero() || F[i].is_zero()) continue;
    deg = std::max(deg, *cofactors[i].degree() + *F[i].degree());
  }
  return deg;
}

Certificate certificate_from_solution(const std::vector<Polynomial>& F, const LinearSystem& ls,
                                      const std::vector<Rational>& y) {
  if (y.size() != ls.col_labels.size()) throw DimensionError("solution length differs from column count");
  const std::size_t n = F.empty() ? 0 : F.front().nvars();
  std::vector<std::vector<Term>> terms(F.size());
  for (std::size_t c = 0; c < y.size(); ++c) {
    if (y[c] == 0) continue;
    terms[ls.col_labels[c].constraint].push_back({ls.col_labels[c].shift, y[c]});
  }
  Certificate cert;
  for (auto& t : terms) cert.cofactors.emplace_back(n, std::move(t));
  cert.degree = certificate_degree(F, cert.cofactors);
  return cert;
}

bool verify(const std::vector<Polynomial>& F, const Certificate& c) {
  if (c.cofactors.size() != F.size()) {
    throw DimensionError("certificate has " + std::to_string(c.cofactors.size()) + " cofactors for " +
                         std::to_string(F.size()) + " constraints");
  }
  if (F.empty()) return false;
  const std::size_t n = F.front().nvars();
  Polynomial sum(n);
  for (std::size_t i = 0; i < F.size(); ++i) sum += c.cofactors[i] * F[i];
  return sum == Polynomial::constant(n, 1);
}

NullaResult nulla_search(const std::vector<Polynomial>& F, unsigned d_max, const NullaLimits& limits) {
  if (F.empty()) throw PreconditionError("empty polynomial list");
  const unsigned start = max_degree(F);
  if (d_max < start) {
    throw PreconditionError("d_max " + std::to_string(d_max) + " is below the maximum constraint degree " +
                            std::to_string(start));
  }
  NullaResult result;
  for (unsigned d = start; d <= d_max; ++d) {
    LinearSystem ls = build_linear_system(F, d, limits);
    DegreeAttempt attempt{d, ls.matrix.rows, ls.matrix.cols, false};
    ExactSolveOptions so{limits.max_bits};
    std::optional<std::vector<Rational>> y;
    try {
      y = solve_exact(ls.matrix, so);
    } catch (const ResourceError& e) {
      throw ResourceError(e.what(), e.cap(), static_cast<long>(d) - 1);
    }
    attempt.consistent = y.has_value();
    result.attempts.push_back(attempt);
    if (y) {
      Certificate cert = certificate_from_solution(F, ls, *y);
      if (!verify(F, cert)) throw Error("internal error: NulLA solution does not verify");
      result.certificate = std::move(cert);
      break;
    }
  }
  return result;
}

// ------------------------------------------------------------ symmetry

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<std::vector<std::size_t>> classes(UnionFind& uf, std::vector<std::size_t>& class_of) {
  const std::size_t n = uf.parent.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> root_class(n, SIZE_MAX);
  class_of.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = uf.find(i);
    if (root_class[r] == SIZE_MAX) {
      root_class[r] = out.size();
      out.emplace_back();
    }
    out[root_class[r]].push_back(i);
    class_of[i] = root_class[r];
  }
  return out;
}

}  // namespace

Rational ReducedSystem::entry_from(std::size_t row_member, std::size_t col_orbit) const {
  Rational sum = 0;
  for (std::size_t c : col_orbits[col_orbit]) {
    for (const auto& [r, v] : full.matrix.columns[c]) {
      if (r == row_member) sum += v;
    }
  }
  return sum;
}

std::vector<Rational> ReducedSystem::lift(const std::vector<Rational>& reduced) const {
  if (reduced.size() != col_orbits.size()) throw DimensionError("reduced solution has wrong length");
  std::vector<Rational> y(full.col_labels.size());
  for (std::size_t c = 0; c < y.size(); ++c) y[c] = reduced[col_orbit_of[c]];
  return y;
}

ReducedSystem orbit_reduce(const std::vector<Polynomial>& F, unsigned d, const PermutationGroup& group,
                           const NullaLimits& limits) {
  if (F.empty()) throw PreconditionError("empty polynomial list");
  if (group.degree != F.front().nvars()) throw DimensionError("group degree differs from nvars");
  group.validate();
  std::vector<std::vector<std::size_t>> constraint_images;
  for (const auto& g : group.generators) {
    auto img = constraint_permutation(F, g);
    if (!img) throw PreconditionError("constraint set is not invariant under the group");
    constraint_images.push_back(std::move(*img));
  }

  ReducedSystem rs;
  rs.full = build_linear_system(F, d, limits);
  const LinearSystem& ls = rs.full;

  UnionFind rows(ls.row_labels.size());
  for (std::size_t r = 0; r < ls.row_labels.size(); ++r)
    for (const auto& g : group.generators) rows.unite(r, ls.row_index.at(ls.row_labels[r].permuted(g)));

  std::unordered_map<Monomial, std::size_t, MonomialHash> shift_index;
  std::vector<std::unordered_map<Monomial, std::size_t, MonomialHash>> col_index(F.size());
  for (std::size_t c = 0; c < ls.col_labels.size(); ++c)
    col_index[ls.col_labels[c].constraint].emplace(ls.col_labels[c].shift, c);
  UnionFind cols(ls.col_labels.size());
  for (std::size_t c = 0; c < ls.col_labels.size(); ++c) {
    for (std::size_t k = 0; k < group.generators.size(); ++k) {
      const auto& label = ls.col_labels[c];
      const std::size_t target = constraint_images[k][label.constraint];
      cols.unite(c, col_index[target].at(label.shift.permuted(group.generators[k])));
    }
  }

  std::vector<std::size_t> row_orbit_of;
  rs.row_orbits = classes(rows, row_orbit_of);
  rs.col_orbits = classes(cols, rs.col_orbit_of);

  rs.matrix.rows = rs.row_orbits.size();
  rs.matrix.cols = rs.col_orbits.size();
  rs.matrix.columns.resize(rs.matrix.cols);
  rs.matrix.rhs.assign(rs.matrix.rows, 0);
  rs.matrix.rhs[row_orbit_of[ls.row_index.at(Monomial(F.front().nvars()))]] = 1;

  // Row orbits are represented by their first member.
  std::vector<bool> is_rep(ls.row_labels.size(), false);
  for (const auto& orbit : rs.row_orbits) is_rep[orbit.front()] = true;
  for (std::size_t o = 0; o < rs.col_orbits.size(); ++o) {
    std::unordered_map<std::size_t, Rational> acc;
    for (std::size_t c : rs.col_orbits[o]) {
      for (const auto& [r, v] : ls.matrix.columns[c]) {
        if (is_rep[r]) acc[row_orbit_of[r]] += v;
      }
    }
    auto& column = rs.matrix.columns[o];
    for (auto& [r, v] : acc)
      if (v != 0) column.emplace_back(r, v);
    std::sort(column.begin(), column.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return rs;
}

NullaResult nulla_search_symmetric(const std::vector<Polynomial>& F, unsigned d_max, const PermutationGroup& group,
                                   const NullaLimits& limits) {
  if (F.empty()) throw PreconditionError("empty polynomial list");
  const unsigned start = max_degree(F);
  if (d_max < start) throw PreconditionError("d_max is below the maximum constraint degree");
  NullaResult result;
  result.symmetric = true;
  for (unsigned d = start; d <= d_max; ++d) {
    ReducedSystem rs = orbit_reduce(F, d, group, limits);
    DegreeAttempt attempt{d, rs.matrix.rows, rs.matrix.cols, false};
    std::optional<std::vector<Rational>> ybar;
    try {
      ybar = solve_exact(rs.matrix, ExactSolveOptions{limits.max_bits});
    } catch (const ResourceError& e) {
      throw ResourceError(e.what(), e.cap(), static_cast<long>(d) - 1);
    }
    attempt.consistent = ybar.has_value();
    result.attempts.push_back(attempt);
    if (ybar) {
      Certificate cert = certificate_from_solution(F, rs.full, rs.lift(*ybar));
      if (!verify(F, cert)) throw Error("internal error: lifted symmetric solution does not verify");
      result.certificate = std::move(cert);
      break;
    }
  }
  return result;
}

CertificateStats certificate_stats(const Certificate& c) {
  CertificateStats st;
  st.degree = c.degree;
  for (const auto& r : c.cofactors) {
    st.term_counts.push_back(r.size());
    for (const auto& t : r.terms()) {
      st.max_coefficient_bits =
          std::max({st.max_coefficient_bits, mpz_sizeinbase(t.coeff.get_num_mpz_t(), 2),
                    mpz_sizeinbase(t.coeff.get_den_mpz_t(), 2)});
    }
  }
  return st;
}

Certificate known_certificate_1111_2() {
  constexpr std::size_t n = 4;
  auto x = [](std::size_t i) { return Polynomial::variable(n, i - 1); };
  auto c = [](long v) { return Polynomial::constant(n, v); };
  const Rational half(1, 2);
  Certificate cert;
  cert.cofactors = {
      (-x(1) - c(2) * x(4) * x(4) + x(1) * x(3) * x(3) + x(2) * x(3) * x(4) - x(2) * x(3) * x(3) * x(4) -
       x(2) * x(4).pow(3))
          .scaled(half),
      (-c(2) - x(3) + c(2) * x(1) * x(1) - x(2) * x(4)).scaled(half),
      (x(1) - x(1) * x(3) * x(3) - x(2) * x(3) * x(4)).scaled(half),
      x(3).scaled(half),
      (x(2) * x(4)).scaled(half),
  };
  cert.degree = 6;
  return cert;
}

}  // namespace mubcert

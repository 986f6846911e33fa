#include "mubcert/exact_solver.hpp"

#include <algorithm>
#include <set>

#include "mubcert/errors.hpp"

namespace mubcert {

std::size_t SparseSystem::nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  return nnz;
}

namespace {

using Entry = std::pair<std::size_t, Integer>;

struct Row {
  std::vector<Entry> entries;  // sorted by column
  Integer rhs;
};

std::size_t bits(const Integer& v) { return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2); }

const Integer* find(const Row& r, std::size_t col) {
  auto it = std::lower_bound(r.entries.begin(), r.entries.end(), col,
                             [](const Entry& e, std::size_t c) { return e.first < c; });
  return it != r.entries.end() && it->first == col ? &it->second : nullptr;
}

void remove_content(Row& r) {
  Integer g = abs(r.rhs);
  for (const auto& e : r.entries) {
    if (g == 1) return;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.second.get_mpz_t());
  }
  if (g <= 1) return;
  for (auto& e : r.entries) mpz_divexact(e.second.get_mpz_t(), e.second.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(r.rhs.get_mpz_t(), r.rhs.get_mpz_t(), g.get_mpz_t());
}

}  // namespace

std::optional<std::vector<Rational>> solve_exact(const SparseSystem& sys, const ExactSolveOptions& opts,
                                                 ExactSolveStats* stats) {
  if (sys.rhs.size() != sys.rows) throw DimensionError("rhs length differs from row count");
  if (sys.columns.size() != sys.cols) throw DimensionError("column count mismatch");

  // Row-major copy with denominators cleared row by row.
  std::vector<std::vector<std::pair<std::size_t, Rational>>> qrows(sys.rows);
  for (std::size_t c = 0; c < sys.cols; ++c) {
    for (const auto& [r, v] : sys.columns[c]) {
      if (r >= sys.rows) throw DimensionError("row index out of range");
      if (v != 0) qrows[r].emplace_back(c, v);
    }
  }
  std::vector<Row> rows(sys.rows);
  for (std::size_t r = 0; r < sys.rows; ++r) {
    Integer l = sys.rhs[r].get_den();
    for (const auto& e : qrows[r]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), e.second.get_den_mpz_t());
    rows[r].entries.reserve(qrows[r].size());
    for (const auto& [c, v] : qrows[r]) rows[r].entries.emplace_back(c, Integer(v.get_num() * (l / v.get_den())));
    rows[r].rhs = sys.rhs[r].get_num() * (l / sys.rhs[r].get_den());
    remove_content(rows[r]);
  }
  qrows.clear();

  std::vector<std::size_t> colcount(sys.cols, 0);
  std::vector<std::vector<std::size_t>> col_rows(sys.cols);
  std::set<std::pair<std::size_t, std::size_t>> active;  // (nnz, row)
  std::size_t stored = 0, peak_bits = 0;
  for (std::size_t r = 0; r < sys.rows; ++r) {
    for (const auto& e : rows[r].entries) {
      ++colcount[e.first];
      col_rows[e.first].push_back(r);
    }
    stored += rows[r].entries.size();
    if (rows[r].entries.empty()) {
      if (rows[r].rhs != 0) return std::nullopt;
      continue;
    }
    active.emplace(rows[r].entries.size(), r);
  }
  std::size_t peak_fill = stored;

  struct Pivot {
    std::size_t row, col;
  };
  std::vector<Pivot> pivots;
  std::vector<bool> is_active(sys.rows, false);
  for (const auto& a : active) is_active[a.second] = true;

  while (!active.empty()) {
    // Markowitz choice among the sparsest rows.
    std::size_t best_row = 0, best_col = 0, best_cost = SIZE_MAX, examined = 0;
    for (auto it = active.begin(); it != active.end() && examined < 4; ++it, ++examined) {
      const Row& r = rows[it->second];
      const std::size_t rr = r.entries.size() - 1;
      for (const auto& e : r.entries) {
        const std::size_t cost = rr * (colcount[e.first] - 1);
        if (cost < best_cost) {
          best_cost = cost;
          best_row = it->second;
          best_col = e.first;
        }
      }
      if (best_cost == 0) break;
    }
    active.erase({rows[best_row].entries.size(), best_row});
    is_active[best_row] = false;
    for (const auto& e : rows[best_row].entries) --colcount[e.first];
    pivots.push_back({best_row, best_col});

    const Row& pr = rows[best_row];
    const Integer p = *find(pr, best_col);

    std::vector<std::size_t> targets;
    for (std::size_t r : col_rows[best_col]) {
      if (is_active[r] && find(rows[r], best_col) != nullptr) targets.push_back(r);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    col_rows[best_col].clear();

    for (std::size_t t : targets) {
      Row& tr = rows[t];
      const Integer a = *find(tr, best_col);
      Integer g;
      mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), a.get_mpz_t());
      const Integer sp = p / g, sa = a / g;

      Row out;
      out.entries.reserve(tr.entries.size() + pr.entries.size());
      std::size_t i = 0, j = 0;
      while (i < tr.entries.size() || j < pr.entries.size()) {
        if (j == pr.entries.size() || (i < tr.entries.size() && tr.entries[i].first < pr.entries[j].first)) {
          out.entries.emplace_back(tr.entries[i].first, Integer(sp * tr.entries[i].second));
          ++i;
        } else if (i == tr.entries.size() || pr.entries[j].first < tr.entries[i].first) {
          out.entries.emplace_back(pr.entries[j].first, Integer(-sa * pr.entries[j].second));
          col_rows[pr.entries[j].first].push_back(t);
          ++colcount[pr.entries[j].first];
          ++j;
        } else {
          Integer v = sp * tr.entries[i].second - sa * pr.entries[j].second;
          if (v != 0) {
            out.entries.emplace_back(tr.entries[i].first, std::move(v));
          } else {
            --colcount[tr.entries[i].first];
          }
          ++i;
          ++j;
        }
      }
      out.rhs = sp * tr.rhs - sa * pr.rhs;
      remove_content(out);

      if (opts.max_bits != 0 || stats) {
        for (const auto& e : out.entries) peak_bits = std::max(peak_bits, bits(e.second));
        peak_bits = std::max(peak_bits, bits(out.rhs));
        if (opts.max_bits != 0 && peak_bits > opts.max_bits) {
          throw ResourceError("coefficient bit size exceeds " + std::to_string(opts.max_bits), "max_bits",
                              static_cast<long>(pivots.size()));
        }
      }

      active.erase({tr.entries.size(), t});
      stored = stored - tr.entries.size() + out.entries.size();
      tr = std::move(out);
      if (tr.entries.empty()) {
        is_active[t] = false;
        if (tr.rhs != 0) return std::nullopt;
      } else {
        active.emplace(tr.entries.size(), t);
      }
    }
    peak_fill = std::max(peak_fill, stored);
  }

  // Back substitution in reverse pivot order; non-pivot columns are zero.
  std::vector<Rational> y(sys.cols, 0);
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const Row& r = rows[it->row];
    Rational acc = r.rhs;
    Integer p;
    for (const auto& [c, v] : r.entries) {
      if (c == it->col) {
        p = v;
      } else if (y[c] != 0) {
        acc -= Rational(v) * y[c];
      }
    }
    y[it->col] = acc / Rational(p);
  }

  if (stats) {
    stats->rank = pivots.size();
    stats->max_bits = peak_bits;
    stats->fill = peak_fill;
  }
  return y;
}

}  // namespace mubcert

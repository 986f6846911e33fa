#include "mubcert/groebner.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "mubcert/errors.hpp"

namespace mubcert {

namespace {

// Terms sorted by descending `ord`; the working representation of this module.
struct OrderedPoly {
  std::vector<Term> terms;

  bool empty() const { return terms.empty(); }
  const Monomial& lead() const { return terms.front().mono; }
  const Rational& lc() const { return terms.front().coeff; }
};

OrderedPoly to_ordered(const Polynomial& p, MonomialOrder ord) {
  OrderedPoly out{p.terms()};
  if (ord != MonomialOrder::Grlex) {
    std::sort(out.terms.begin(), out.terms.end(),
              [ord](const Term& a, const Term& b) { return compare(a.mono, b.mono, ord) > 0; });
  }
  return out;
}

Polynomial to_polynomial(const OrderedPoly& p, std::size_t nvars) {
  return Polynomial(nvars, p.terms);
}

void make_monic(OrderedPoly& p) {
  if (p.empty() || p.lc() == 1) return;
  const Rational inv = 1 / p.lc();
  for (auto& t : p.terms) t.coeff *= inv;
}

// a[from..] - c * m * b, all in descending `ord`.
std::vector<Term> sub_multiple(const std::vector<Term>& a, std::size_t from, const Rational& c,
                               const Monomial& m, const std::vector<Term>& b, MonomialOrder ord) {
  std::vector<Term> out;
  out.reserve(a.size() - from + b.size());
  std::size_t i = from, j = 0;
  Monomial bm;
  bool have_bm = false;
  while (i < a.size() || j < b.size()) {
    if (j < b.size() && !have_bm) {
      bm = b[j].mono * m;
      have_bm = true;
    }
    std::strong_ordering cmp = std::strong_ordering::less;
    if (i < a.size() && j < b.size()) {
      cmp = compare(a[i].mono, bm, ord);
    } else if (i < a.size()) {
      cmp = std::strong_ordering::greater;
    }
    if (cmp > 0) {
      out.push_back(a[i++]);
    } else if (cmp < 0) {
      out.push_back({std::move(bm), -(c * b[j].coeff)});
      have_bm = false;
      ++j;
    } else {
      Rational v = a[i].coeff - c * b[j].coeff;
      if (v != 0) out.push_back({a[i].mono, std::move(v)});
      have_bm = false;
      ++i;
      ++j;
    }
  }
  return out;
}

OrderedPoly reduce_ordered(OrderedPoly p, const std::vector<OrderedPoly>& G, MonomialOrder ord,
                           std::size_t max_terms) {
  OrderedPoly rem;
  std::size_t start = 0;
  while (start < p.terms.size()) {
    const Term& lt = p.terms[start];
    const OrderedPoly* divisor = nullptr;
    for (const auto& g : G) {
      if (!g.empty() && g.lead().divides(lt.mono)) {
        divisor = &g;
        break;
      }
    }
    if (divisor == nullptr) {
      rem.terms.push_back(lt);
      ++start;
      continue;
    }
    const Rational c = lt.coeff / divisor->lc();
    const Monomial m = lt.mono / divisor->lead();
    p.terms = sub_multiple(p.terms, start, c, m, divisor->terms, ord);
    start = 0;
    if (max_terms != 0 && p.terms.size() > max_terms) {
      throw ResourceError("intermediate polynomial exceeds " + std::to_string(max_terms) + " terms",
                          "max_terms");
    }
  }
  return rem;
}

OrderedPoly spoly_ordered(const OrderedPoly& f, const OrderedPoly& g, MonomialOrder ord) {
  const Monomial L = f.lead().lcm(g.lead());
  // (L/lt(f)) f - (L/lt(g)) g
  OrderedPoly lhs;
  const Monomial mf = L / f.lead();
  const Rational cf = 1 / f.lc();
  lhs.terms.reserve(f.terms.size());
  for (const auto& t : f.terms) lhs.terms.push_back({t.mono * mf, t.coeff * cf});
  OrderedPoly out;
  out.terms = sub_multiple(lhs.terms, 0, 1 / g.lc(), L / g.lead(), g.terms, ord);
  return out;
}

std::size_t nvars_of(const std::vector<Polynomial>& F) {
  for (const auto& f : F) return f.nvars();
  return 0;
}

}  // namespace

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, MonomialOrder ord) {
  if (f.is_zero() || g.is_zero()) throw PreconditionError("S-polynomial of a zero polynomial");
  if (f.nvars() != g.nvars()) throw DimensionError("polynomial nvars mismatch");
  return to_polynomial(spoly_ordered(to_ordered(f, ord), to_ordered(g, ord), ord), f.nvars());
}

Polynomial reduce(const Polynomial& f, const std::vector<Polynomial>& G, MonomialOrder ord) {
  std::vector<OrderedPoly> gs;
  gs.reserve(G.size());
  for (const auto& g : G) {
    if (g.is_zero()) throw PreconditionError("cannot reduce by the zero polynomial");
    if (g.nvars() != f.nvars()) throw DimensionError("polynomial nvars mismatch");
    gs.push_back(to_ordered(g, ord));
  }
  return to_polynomial(reduce_ordered(to_ordered(f, ord), gs, ord, 0), f.nvars());
}

GroebnerBasis buchberger(const std::vector<Polynomial>& F, const GroebnerOptions& opts, GroebnerStats* stats) {
  const MonomialOrder ord = opts.order;
  const std::size_t n = nvars_of(F);
  GroebnerStats local;
  GroebnerStats& st = stats ? *stats : local;
  st = {};

  std::vector<OrderedPoly> G;
  for (const auto& f : F) {
    if (f.nvars() != n) throw DimensionError("polynomial nvars mismatch");
    if (f.is_zero()) continue;
    G.push_back(to_ordered(f, ord));
    make_monic(G.back());
    st.max_degree_seen = std::max(st.max_degree_seen, *f.degree());
  }
  if (G.empty()) throw PreconditionError("input generates the zero ideal");

  auto unit_basis = [&] {
    GroebnerBasis out{{Polynomial::constant(n, 1)}, ord, false};
    return out;
  };
  for (const auto& g : G)
    if (g.lead().is_one()) return unit_basis();

  struct Pair {
    std::size_t i, j;
    Monomial lcm;
  };
  auto later = [ord](const Pair& a, const Pair& b) {
    if (a.lcm.degree() != b.lcm.degree()) return a.lcm.degree() > b.lcm.degree();
    auto c = compare(a.lcm, b.lcm, ord);
    if (c != 0) return c > 0;
    return std::tie(a.j, a.i) > std::tie(b.j, b.i);
  };
  std::priority_queue<Pair, std::vector<Pair>, decltype(later)> queue(later);
  std::set<std::pair<std::size_t, std::size_t>> pending;

  auto add_pairs = [&](std::size_t j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (G[i].lead().coprime(G[j].lead())) {
        ++st.skipped;
        continue;
      }
      queue.push({i, j, G[i].lead().lcm(G[j].lead())});
      pending.emplace(i, j);
    }
  };
  for (std::size_t j = 0; j < G.size(); ++j) add_pairs(j);

  while (!queue.empty()) {
    Pair p = queue.top();
    queue.pop();
    pending.erase({p.i, p.j});

    if (opts.chain_criterion) {
      bool redundant = false;
      for (std::size_t k = 0; k < G.size() && !redundant; ++k) {
        if (k == p.i || k == p.j || !G[k].lead().divides(p.lcm)) continue;
        auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
        redundant = !pending.count(key(p.i, k)) && !pending.count(key(p.j, k));
      }
      if (redundant) {
        ++st.skipped;
        continue;
      }
    }

    if (opts.max_degree != 0 && p.lcm.degree() > opts.max_degree) {
      throw ResourceError("S-pair degree " + std::to_string(p.lcm.degree()) + " exceeds max degree " +
                              std::to_string(opts.max_degree),
                          "max_degree", static_cast<long>(st.max_degree_seen));
    }
    if (opts.max_pairs != 0 && st.pairs >= opts.max_pairs) {
      throw ResourceError("S-pair budget of " + std::to_string(opts.max_pairs) + " exhausted", "max_pairs",
                          static_cast<long>(st.pairs));
    }
    ++st.pairs;
    st.max_degree_seen = std::max(st.max_degree_seen, p.lcm.degree());

    OrderedPoly r = reduce_ordered(spoly_ordered(G[p.i], G[p.j], ord), G, ord, opts.max_terms);
    if (r.empty()) continue;
    make_monic(r);
    ++st.reductions;
    if (r.lead().is_one()) return unit_basis();
    const unsigned deg = std::max_element(r.terms.begin(), r.terms.end(), [](const Term& a, const Term& b) {
                           return a.mono.degree() < b.mono.degree();
                         })->mono.degree();
    st.max_degree_seen = std::max(st.max_degree_seen, deg);
    if (opts.max_degree != 0 && deg > opts.max_degree) {
      throw ResourceError("basis element of degree " + std::to_string(deg) + " exceeds max degree " +
                              std::to_string(opts.max_degree),
                          "max_degree", static_cast<long>(st.max_degree_seen));
    }
    G.push_back(std::move(r));
    if (opts.max_basis != 0 && G.size() > opts.max_basis) {
      throw ResourceError("basis size exceeds " + std::to_string(opts.max_basis), "max_basis",
                          static_cast<long>(G.size()));
    }
    add_pairs(G.size() - 1);
  }

  GroebnerBasis out;
  out.order = ord;
  for (const auto& g : G) out.polynomials.push_back(to_polynomial(g, n));
  return out;
}

GroebnerBasis reduce_basis(const GroebnerBasis& in) {
  const MonomialOrder ord = in.order;
  std::vector<OrderedPoly> G;
  std::size_t n = 0;
  for (const auto& p : in.polynomials) {
    if (p.is_zero()) continue;
    n = p.nvars();
    G.push_back(to_ordered(p, ord));
    make_monic(G.back());
  }
  if (G.empty()) return {{}, ord, true};

  // Minimalize: drop g whose leading monomial is divisible by another's.
  std::sort(G.begin(), G.end(),
            [ord](const OrderedPoly& a, const OrderedPoly& b) { return compare(a.lead(), b.lead(), ord) < 0; });
  std::vector<OrderedPoly> minimal;
  for (auto& g : G) {
    bool redundant = std::any_of(minimal.begin(), minimal.end(),
                                 [&](const OrderedPoly& h) { return h.lead().divides(g.lead()); });
    if (!redundant) minimal.push_back(std::move(g));
  }

  // Inter-reduce the tails; leading terms are untouched because the set is minimal.
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<OrderedPoly> others;
    for (std::size_t k = 0; k < minimal.size(); ++k)
      if (k != i) others.push_back(minimal[k]);
    OrderedPoly tail{std::vector<Term>(minimal[i].terms.begin() + 1, minimal[i].terms.end())};
    OrderedPoly red = reduce_ordered(std::move(tail), others, ord, 0);
    red.terms.insert(red.terms.begin(), minimal[i].terms.front());
    minimal[i] = std::move(red);
  }

  GroebnerBasis out;
  out.order = ord;
  out.reduced = true;
  std::sort(minimal.begin(), minimal.end(),
            [ord](const OrderedPoly& a, const OrderedPoly& b) { return compare(a.lead(), b.lead(), ord) > 0; });
  for (const auto& g : minimal) out.polynomials.push_back(to_polynomial(g, n));
  return out;
}

GroebnerBasis reduced_groebner_basis(const std::vector<Polynomial>& F, const GroebnerOptions& opts,
                                     GroebnerStats* stats) {
  return reduce_basis(buchberger(F, opts, stats));
}

bool is_groebner_basis(const std::vector<Polynomial>& G, MonomialOrder ord) {
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = i + 1; j < G.size(); ++j)
      if (!reduce(s_polynomial(G[i], G[j], ord), G, ord).is_zero()) return false;
  return true;
}

bool infeasible_over_C(const std::vector<Polynomial>& F, const GroebnerOptions& opts, GroebnerStats* stats) {
  if (F.empty()) throw PreconditionError("empty polynomial list");
  GroebnerBasis rg = reduced_groebner_basis(F, opts, stats);
  return rg.polynomials.size() == 1 && rg.polynomials.front() == Polynomial::constant(rg.polynomials[0].nvars(), 1);
}

}  // namespace mubcert

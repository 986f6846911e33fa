#include "mubcert/consys.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mubcert/errors.hpp"
#include "mubcert/poly_json.hpp"

namespace mubcert {

// ------------------------------------------------------------------ specs

ConstellationSpec ConstellationSpec::parse(const std::string& text) {
  const auto at = text.find('@');
  if (at == std::string::npos) throw SpecError("constellation spec must look like a1,...,ak@d: " + text);
  ConstellationSpec spec;
  try {
    spec.d = static_cast<unsigned>(std::stoul(text.substr(at + 1)));
    std::stringstream ss(text.substr(0, at));
    std::string item;
    while (std::getline(ss, item, ',')) spec.groups.push_back(static_cast<unsigned>(std::stoul(item)));
  } catch (const std::logic_error&) {
    throw SpecError("malformed constellation spec: " + text);
  }
  spec.validate();
  return spec;
}

std::string ConstellationSpec::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(groups[i]);
  }
  return out + "@" + std::to_string(d);
}

void ConstellationSpec::validate() const {
  if (d < 1) throw SpecError("dimension must be positive");
  if (groups.empty()) throw SpecError("constellation needs at least one group");
  for (unsigned a : groups) {
    if (a < 1 || a > d) throw SpecError("group sizes must lie in [1, d]: " + to_string());
  }
}

void PolySystem::validate() const {
  if (vars.size() != nvars) throw DimensionError("variable names do not match nvars");
  for (const auto& p : constraints) {
    if (p.nvars() != nvars) throw DimensionError("constraint nvars mismatch");
  }
  if (objective && objective->nvars() != nvars) throw DimensionError("objective nvars mismatch");
}

std::size_t PolySystem::max_constraint_degree() const {
  std::size_t best = 0;
  for (const auto& p : constraints) best = std::max<std::size_t>(best, p.degree().value_or(0));
  return best;
}

PermutationGroup PermutationGroup::trivial(std::size_t degree) {
  return PermutationGroup{degree, {}};
}

void PermutationGroup::validate() const {
  for (const auto& g : generators) {
    if (g.size() != degree) throw DimensionError("generator length differs from group degree");
    std::vector<bool> seen(degree, false);
    for (auto v : g) {
      if (v >= degree || seen[v]) throw PreconditionError("generator is not a bijection");
      seen[v] = true;
    }
  }
}

std::uint64_t PermutationGroup::order(std::uint64_t limit) const {
  validate();
  using Perm = std::vector<std::uint32_t>;
  Perm id(degree);
  for (std::size_t i = 0; i < degree; ++i) id[i] = static_cast<std::uint32_t>(i);
  std::set<Perm> seen{id};
  std::vector<Perm> frontier{id};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& p : frontier) {
      for (const auto& g : generators) {
        Perm q(degree);
        for (std::size_t i = 0; i < degree; ++i) q[i] = g[p[i]];
        if (seen.insert(q).second) {
          if (seen.size() > limit) throw ResourceError("group order exceeds enumeration limit", "group_order");
          next.push_back(std::move(q));
        }
      }
    }
    frontier = std::move(next);
  }
  return seen.size();
}

// ------------------------------------------------------ complex polynomials

namespace {

// Polynomial with Gaussian-rational coefficients stored as real and imaginary parts.
struct CPoly {
  Polynomial re, im;

  static CPoly real(Polynomial p) {
    auto n = p.nvars();
    return {std::move(p), Polynomial(n)};
  }
  static CPoly constant(std::size_t n, const Rational& c) { return real(Polynomial::constant(n, c)); }

  CPoly conj() const { return {re, -im}; }
  CPoly operator+(const CPoly& o) const { return {re + o.re, im + o.im}; }
  CPoly operator-(const CPoly& o) const { return {re - o.re, im - o.im}; }
  CPoly operator*(const CPoly& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  Polynomial abs2() const { return re * re + im * im; }
};

class VarTable {
 public:
  std::size_t add(std::string name) {
    names_.push_back(std::move(name));
    return names_.size() - 1;
  }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

void push_nonzero(std::vector<Polynomial>& out, Polynomial p) {
  if (!p.is_zero()) out.push_back(std::move(p));
}

}  // namespace

// -------------------------------------------------------- fixed systems

PolySystem build_1111_2() {
  constexpr std::size_t n = 4;
  auto x = [](std::size_t i) { return Polynomial::variable(n, i - 1); };
  auto c = [](long v) { return Polynomial::constant(n, v); };
  PolySystem sys;
  sys.spec = "1,1,1,1@2";
  sys.nvars = n;
  sys.vars = {"x1", "x2", "x3", "x4"};
  sys.constraints = {
      x(1) * x(1) + x(2) * x(2) - c(1),
      x(3) * x(3) + x(4) * x(4) - c(1),
      (c(1) + x(1)).pow(2) + x(2) * x(2) - c(2),
      (c(1) + x(3)).pow(2) + x(4) * x(4) - c(2),
      (c(1) + x(1) * x(3) + x(2) * x(4)).pow(2) + (x(1) * x(4) - x(2) * x(3)).pow(2) - c(2),
  };
  sys.provenance = "build_1111_2: {1,1,1,1}_2 with vectors (1,0), (1,1)/sqrt2, (1,x1+i x2)/sqrt2, (1,x3+i x4)/sqrt2";
  return sys;
}

PolySystem build_1111_2_optimization() {
  PolySystem full = build_1111_2();
  PolySystem sys;
  sys.spec = full.spec;
  sys.nvars = full.nvars;
  sys.vars = full.vars;
  sys.objective = full.constraints[0] * full.constraints[0];
  sys.constraints.assign(full.constraints.begin() + 1, full.constraints.end());
  sys.provenance = "build_1111_2_optimization: minimize p1^2 subject to p2..p5 = 0";
  return sys;
}

PolySystem build_5551_6() {
  constexpr std::size_t n = 100;
  auto xi = [](int i, int j, int k) { return static_cast<std::size_t>((i * 5 + j) * 5 + k); };
  auto yi = [&](int i, int j, int k) { return 50 + xi(i, j, k); };
  auto X = [&](int i, int j, int k) { return Polynomial::variable(n, xi(i, j, k)); };
  auto Y = [&](int i, int j, int k) { return Polynomial::variable(n, yi(i, j, k)); };
  const Polynomial one = Polynomial::constant(n, 1);

  PolySystem sys;
  sys.spec = "5,5,5,1@6";
  sys.nvars = n;
  sys.vars.resize(n);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        auto suffix = "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
        sys.vars[xi(i, j, k)] = "x" + suffix;
        sys.vars[yi(i, j, k)] = "y" + suffix;
      }
    }
  }

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k)
        sys.constraints.push_back(X(i, j, k) * X(i, j, k) + Y(i, j, k) * Y(i, j, k) - one);

  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 5; ++j) {
      Polynomial sx = one, sy(n);
      for (int k = 0; k < 5; ++k) {
        sx += X(i, j, k);
        sy += Y(i, j, k);
      }
      sys.constraints.push_back(sx * sx + sy * sy - Polynomial::constant(n, 6));
    }
  }

  auto overlap = [&](int i, int j, int ip, int jp, long rhs) {
    Polynomial re = one, im(n);
    for (int k = 0; k < 5; ++k) {
      re += X(i, j, k) * X(ip, jp, k) + Y(i, j, k) * Y(ip, jp, k);
      im += X(i, j, k) * Y(ip, jp, k) - X(ip, jp, k) * Y(i, j, k);
    }
    return re * re + im * im - Polynomial::constant(n, rhs);
  };
  for (int j = 0; j < 5; ++j)
    for (int jp = 0; jp < 5; ++jp) sys.constraints.push_back(overlap(0, j, 1, jp, 6));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j)
      for (int jp = j + 1; jp < 5; ++jp) sys.constraints.push_back(overlap(i, j, i, jp, 0));

  sys.provenance =
      "build_5551_6: first group computational, singleton (1,...,1)/sqrt6, two groups of five "
      "vectors (1, x+iy, ...)/sqrt6; 50 unimodularity + 10 singleton + 25 cross + 20 orthogonality";
  return sys;
}

// ------------------------------------------------- vector parameterization

PolySystem build_vector_system(const ConstellationSpec& spec, VectorParamOptions opts) {
  spec.validate();
  const unsigned d = spec.d;
  const unsigned a1 = spec.groups.front();
  const bool gauge2 = opts.extra_gauge && spec.groups.size() >= 2 && a1 + 1 >= d;

  // First pass: allocate variables. Component 0 of every vector is the real constant 1.
  struct VecVars {
    std::size_t group;
    unsigned index;
    bool fixed;
    std::vector<std::size_t> x, y;  // for components 1..d-1
  };
  VarTable vt;
  std::vector<VecVars> vectors;
  for (std::size_t g = 1; g < spec.groups.size(); ++g) {
    for (unsigned j = 0; j < spec.groups[g]; ++j) {
      VecVars v{g, j, gauge2 && g == 1 && j == 0, {}, {}};
      if (!v.fixed) {
        for (unsigned k = 1; k < d; ++k) {
          auto suffix = "_" + std::to_string(g + 1) + "_" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
          v.x.push_back(vt.add("x" + suffix));
          v.y.push_back(vt.add("y" + suffix));
        }
      }
      vectors.push_back(std::move(v));
    }
  }
  const std::size_t n = vt.size();

  auto component = [&](const VecVars& v, unsigned k) {
    if (k == 0 || v.fixed) return CPoly::constant(n, 1);
    return CPoly{Polynomial::variable(n, v.x[k - 1]), Polynomial::variable(n, v.y[k - 1])};
  };
  // d * <v|w>
  auto scaled_overlap = [&](const VecVars& v, const VecVars& w) {
    CPoly acc = CPoly::constant(n, 0);
    for (unsigned k = 0; k < d; ++k) acc = acc + component(v, k).conj() * component(w, k);
    return acc;
  };

  PolySystem sys;
  sys.spec = spec.to_string();
  sys.nvars = n;
  sys.vars = vt.names();
  const Polynomial one = Polynomial::constant(n, 1);

  // Unbiasedness to computational vectors e_1..e_a1 is |z_k|^2 = 1 for k < a1.
  for (const auto& v : vectors) {
    if (v.fixed) continue;
    for (unsigned k = 1; k < a1; ++k) push_nonzero(sys.constraints, component(v, k).abs2() - one);
  }
  // The norm is implied by unimodularity when a1 == d.
  if (a1 < d) {
    for (const auto& v : vectors) {
      if (v.fixed) continue;
      Polynomial norm(n);
      for (unsigned k = 0; k < d; ++k) norm += component(v, k).abs2();
      push_nonzero(sys.constraints, norm - Polynomial::constant(n, d));
    }
  }
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    for (std::size_t b = a + 1; b < vectors.size(); ++b) {
      if (vectors[a].group == vectors[b].group) continue;
      push_nonzero(sys.constraints,
                   scaled_overlap(vectors[a], vectors[b]).abs2() - Polynomial::constant(n, d));
    }
  }
  for (std::size_t a = 0; a < vectors.size(); ++a) {
    for (std::size_t b = a + 1; b < vectors.size(); ++b) {
      if (vectors[a].group != vectors[b].group) continue;
      push_nonzero(sys.constraints, scaled_overlap(vectors[a], vectors[b]).abs2());
    }
  }

  std::ostringstream prov;
  prov << "build_vector_system " << spec.to_string() << ": group 1 = e_1..e_" << a1
       << "; vectors (1, x+iy, ...)/sqrt" << d << " with real first component"
       << (gauge2 ? "; first vector of group 2 fixed to (1,...,1)/sqrt" + std::to_string(d) : std::string())
       << "; denominators cleared";
  sys.provenance = prov.str();
  return sys;
}

// ------------------------------------------------ density parameterization

PolySystem build_density_system(const ConstellationSpec& spec, DensityParamOptions opts) {
  spec.validate();
  const unsigned d = spec.d;
  if (spec.groups.front() + 1 < d) {
    throw SpecError("density parameterization needs a1 >= d-1 to fix the diagonal: " + spec.to_string());
  }
  if (d < 2) throw SpecError("density parameterization needs d >= 2");

  struct State {
    std::size_t group;
    unsigned index;
    std::vector<std::size_t> re, im;  // lower-triangular entries, column-major
  };
  VarTable vt;
  std::vector<State> states;
  for (std::size_t g = 1; g < spec.groups.size(); ++g) {
    for (unsigned i = 0; i < spec.groups[g]; ++i) {
      State s{g, i, {}, {}};
      unsigned m = 0;
      for (unsigned q = 0; q < d; ++q) {
        for (unsigned p = q + 1; p < d; ++p) {
          ++m;
          auto suffix = "_" + std::to_string(g + 1) + "_" + std::to_string(i + 1) + "_" + std::to_string(m);
          s.re.push_back(vt.add("zr" + suffix));
          s.im.push_back(vt.add("zi" + suffix));
        }
      }
      states.push_back(std::move(s));
    }
  }
  const std::size_t n = vt.size();

  // Position of lower-triangular entry (p, q), p > q, in column-major order.
  auto slot = [d](unsigned p, unsigned q) {
    std::size_t idx = 0;
    for (unsigned c = 0; c < q; ++c) idx += d - 1 - c;
    return idx + (p - q - 1);
  };
  auto H = [&](const State& s, unsigned p, unsigned q) {
    if (p == q) return CPoly::constant(n, 1);
    if (p > q) {
      auto k = slot(p, q);
      return CPoly{Polynomial::variable(n, s.re[k]), Polynomial::variable(n, s.im[k])};
    }
    auto k = slot(q, p);
    return CPoly{Polynomial::variable(n, s.re[k]), -Polynomial::variable(n, s.im[k])};
  };
  auto minor = [&](const State& s, unsigned p1, unsigned p2, unsigned q1, unsigned q2) {
    return H(s, p1, q1) * H(s, p2, q2) - H(s, p1, q2) * H(s, p2, q1);
  };
  // tr{H H'} (real because both are hermitian).
  auto trace_product = [&](const State& a, const State& b) {
    Polynomial acc(n);
    for (unsigned p = 0; p < d; ++p)
      for (unsigned q = 0; q < d; ++q) acc += (H(a, p, q) * H(b, q, p)).re;
    return acc;
  };

  PolySystem sys;
  sys.spec = spec.to_string();
  sys.nvars = n;
  sys.vars = vt.names();

  std::size_t minor_complex = 0;
  for (const auto& s : states) {
    if (!opts.full_minors) {
      for (unsigned p = 0; p + 1 < d; ++p) {
        for (unsigned q = p; q + 1 < d; ++q) {
          CPoly m = minor(s, p, p + 1, q, q + 1);
          push_nonzero(sys.constraints, m.re);
          push_nonzero(sys.constraints, m.im);
          ++minor_complex;
        }
      }
    } else {
      std::vector<std::pair<unsigned, unsigned>> pairs;
      for (unsigned a = 0; a < d; ++a)
        for (unsigned b = a + 1; b < d; ++b) pairs.emplace_back(a, b);
      for (std::size_t r = 0; r < pairs.size(); ++r) {
        for (std::size_t c = r; c < pairs.size(); ++c) {
          CPoly m = minor(s, pairs[r].first, pairs[r].second, pairs[c].first, pairs[c].second);
          push_nonzero(sys.constraints, m.re);
          push_nonzero(sys.constraints, m.im);
          ++minor_complex;
        }
      }
    }
  }
  const std::size_t minor_real = sys.constraints.size();

  // d^2 tr{rho rho'} = d for states in different groups.
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b)
      if (states[a].group != states[b].group)
        push_nonzero(sys.constraints, trace_product(states[a], states[b]) - Polynomial::constant(n, d));
  const std::size_t cross = sys.constraints.size() - minor_real;

  Polynomial p0(n);
  for (std::size_t a = 0; a < states.size(); ++a)
    for (std::size_t b = a + 1; b < states.size(); ++b)
      if (states[a].group == states[b].group) p0 += trace_product(states[a], states[b]);
  sys.objective = p0.scaled(Rational(1, static_cast<long>(d) * d));

  std::ostringstream prov;
  prov << "build_density_system " << spec.to_string() << ": rho = H/" << d << " with unit diagonal; "
       << minor_complex << " complex " << (opts.full_minors ? "2x2" : "adjacent 2x2") << " minors -> "
       << minor_real << " real equations; " << cross << " cross-group trace constraints; objective p0 = "
       << "sum of within-group tr{rho rho'}";
  sys.provenance = prov.str();
  return sys;
}

PolySystem build_5333_6_density(DensityParamOptions opts) {
  return build_density_system(ConstellationSpec{6, {5, 3, 3, 3}}, opts);
}

// --------------------------------------------------------------- symmetry

PermutationGroup symmetry_group_5551() {
  constexpr std::size_t n = 100;
  auto index = [](int i, int j, int k) { return static_cast<std::uint32_t>((i * 5 + j) * 5 + k); };
  auto make = [&](auto fi, auto fj, auto fk) {
    std::vector<std::uint32_t> g(n);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < 5; ++k) {
          g[index(i, j, k)] = index(fi(i), fj(j), fk(k));
          g[50 + index(i, j, k)] = 50 + index(fi(i), fj(j), fk(k));
        }
    return g;
  };
  auto id = [](int v) { return v; };
  auto swap2 = [](int v) { return 1 - v; };
  auto transpose = [](int v) { return v == 0 ? 1 : (v == 1 ? 0 : v); };
  auto cycle = [](int v) { return (v + 1) % 5; };
  PermutationGroup g;
  g.degree = n;
  g.generators = {make(swap2, id, id), make(id, transpose, id), make(id, cycle, id),
                  make(id, id, transpose), make(id, id, cycle)};
  return g;
}

std::optional<std::vector<std::size_t>> constraint_permutation(
    const std::vector<Polynomial>& constraints, const std::vector<std::uint32_t>& perm) {
  std::unordered_multimap<std::string, std::size_t> index;
  for (std::size_t i = 0; i < constraints.size(); ++i) index.emplace(to_json(constraints[i]).dump(), i);
  std::vector<bool> used(constraints.size(), false);
  std::vector<std::size_t> image(constraints.size());
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    auto key = to_json(constraints[i].permuted(perm)).dump();
    auto [lo, hi] = index.equal_range(key);
    bool found = false;
    for (auto it = lo; it != hi; ++it) {
      if (!used[it->second]) {
        used[it->second] = true;
        image[i] = it->second;
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return image;
}

bool verify_invariance(const PolySystem& sys, const PermutationGroup& group) {
  if (group.degree != sys.nvars) throw DimensionError("group degree differs from system nvars");
  group.validate();
  for (const auto& g : group.generators) {
    if (!constraint_permutation(sys.constraints, g)) return false;
  }
  return true;
}

// --------------------------------------------------------------- fixtures

namespace {

bool is_prime(unsigned d) {
  if (d < 2) return false;
  for (unsigned k = 2; k * k <= d; ++k)
    if (d % k == 0) return false;
  return true;
}

}  // namespace

Basis computational_basis(unsigned d) {
  Basis b;
  for (unsigned i = 0; i < d; ++i) b.push_back(Ket::Unit(d, i));
  return b;
}

Basis fourier_basis(unsigned d) {
  if (d < 1) throw SpecError("dimension must be positive");
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  Basis b;
  for (unsigned m = 0; m < d; ++m) {
    Ket v(d);
    for (unsigned j = 0; j < d; ++j) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((m * j) % d) / d;
      v[j] = std::polar(norm, phase);
    }
    b.push_back(std::move(v));
  }
  return b;
}

std::vector<Basis> mub_fixture(unsigned d) {
  if (!is_prime(d)) throw UnsupportedError("complete MUB fixture requires prime d, got " + std::to_string(d));
  std::vector<Basis> out{computational_basis(d)};
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (unsigned a = 0; a < d; ++a) {
    Basis basis;
    for (unsigned b = 0; b < d; ++b) {
      Ket v(d);
      for (unsigned j = 0; j < d; ++j) {
        double phase;
        if (d == 2) {
          // i^{a j} (-1)^{b j}
          phase = std::numbers::pi * (0.5 * a * j + b * j);
        } else {
          phase = 2.0 * std::numbers::pi * static_cast<double>((a * j * j + b * j) % d) / d;
        }
        v[j] = std::polar(norm, phase);
      }
      basis.push_back(std::move(v));
    }
    out.push_back(std::move(basis));
  }
  return out;
}

MuReport check_mu(const std::vector<std::vector<Ket>>& groups, double tol) {
  if (groups.empty()) throw DimensionError("no groups given");
  Eigen::Index d = -1;
  for (const auto& g : groups)
    for (const auto& v : g) {
      if (d < 0) d = v.size();
      if (v.size() != d) throw DimensionError("kets have different dimensions");
    }
  MuReport report;
  const double unbiased = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 0.0;
  report.group_pair_deviation.assign(groups.size(), std::vector<double>(groups.size(), 0.0));
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a; b < groups.size(); ++b) {
      double worst = 0.0;
      for (std::size_t i = 0; i < groups[a].size(); ++i) {
        for (std::size_t j = 0; j < groups[b].size(); ++j) {
          const double overlap = std::abs(groups[a][i].dot(groups[b][j]));
          const double target = a == b ? (i == j ? 1.0 : 0.0) : unbiased;
          worst = std::max(worst, std::abs(overlap - target));
        }
      }
      report.group_pair_deviation[a][b] = report.group_pair_deviation[b][a] = worst;
      report.max_deviation = std::max(report.max_deviation, worst);
    }
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

}  // namespace mubcert

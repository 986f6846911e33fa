#include "mubcert/polynomial.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "mubcert/errors.hpp"

namespace mubcert {

Rational make_rational(const std::string& num, const std::string& den) {
  Integer n, d;
  if (n.set_str(num, 10) != 0 || d.set_str(den, 10) != 0) {
    throw ParseError("invalid rational " + num + "/" + den);
  }
  if (d == 0) throw ParseError("zero denominator in rational " + num + "/" + den);
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(std::vector<Exponent> exps) : exps_(std::move(exps)) {
  for (Exponent e : exps_) degree_ += e;
}

Monomial Monomial::variable(std::size_t nvars, std::size_t index, Exponent power) {
  if (index >= nvars) throw DimensionError("variable index out of range");
  Monomial m(nvars);
  m.exps_[index] = power;
  m.degree_ = power;
  return m;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (nvars() != other.nvars()) throw DimensionError("monomial nvars mismatch");
  Monomial r(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) r.exps_[i] += other.exps_[i];
  r.degree_ += other.degree_;
  return r;
}

Monomial Monomial::operator/(const Monomial& other) const {
  if (nvars() != other.nvars()) throw DimensionError("monomial nvars mismatch");
  Monomial r(*this);
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (other.exps_[i] > exps_[i]) throw PreconditionError("monomial quotient is not exact");
    r.exps_[i] -= other.exps_[i];
  }
  r.degree_ -= other.degree_;
  return r;
}

bool Monomial::divides(const Monomial& other) const {
  if (degree_ > other.degree_) return false;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] > other.exps_[i]) return false;
  }
  return true;
}

bool Monomial::coprime(const Monomial& other) const {
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] != 0 && other.exps_[i] != 0) return false;
  }
  return true;
}

Monomial Monomial::lcm(const Monomial& other) const {
  if (nvars() != other.nvars()) throw DimensionError("monomial nvars mismatch");
  std::vector<Exponent> e(exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::max(exps_[i], other.exps_[i]);
  return Monomial(std::move(e));
}

Monomial Monomial::permuted(std::span<const std::uint32_t> perm) const {
  if (perm.size() != exps_.size()) throw DimensionError("permutation degree mismatch");
  std::vector<Exponent> e(exps_.size(), 0);
  for (std::size_t i = 0; i < e.size(); ++i) e[perm[i]] = exps_[i];
  return Monomial(std::move(e));
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (Exponent e : m.exponents()) {
    h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

MonomialOrder parse_order(const std::string& name) {
  if (name == "lex") return MonomialOrder::Lex;
  if (name == "grlex") return MonomialOrder::Grlex;
  if (name == "grevlex") return MonomialOrder::Grevlex;
  throw ParseError("unknown monomial order '" + name + "'");
}

std::string to_string(MonomialOrder ord) {
  switch (ord) {
    case MonomialOrder::Lex: return "lex";
    case MonomialOrder::Grlex: return "grlex";
    case MonomialOrder::Grevlex: return "grevlex";
  }
  return "?";
}

namespace {

std::strong_ordering lex_compare(const Monomial& a, const Monomial& b) {
  for (std::size_t i = 0; i < a.nvars(); ++i) {
    if (a[i] != b[i]) return a[i] <=> b[i];
  }
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering compare(const Monomial& a, const Monomial& b, MonomialOrder ord) {
  if (a.nvars() != b.nvars()) throw DimensionError("cannot compare monomials of different nvars");
  switch (ord) {
    case MonomialOrder::Lex:
      return lex_compare(a, b);
    case MonomialOrder::Grlex:
      if (a.degree() != b.degree()) return a.degree() <=> b.degree();
      return lex_compare(a, b);
    case MonomialOrder::Grevlex:
      if (a.degree() != b.degree()) return a.degree() <=> b.degree();
      // Last differing exponent decides; the smaller exponent is the larger monomial.
      for (std::size_t i = a.nvars(); i-- > 0;) {
        if (a[i] != b[i]) return b[i] <=> a[i];
      }
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const Monomial& m, const std::vector<std::string>& names) {
  if (m.is_one()) return "1";
  std::string out;
  for (std::size_t i = 0; i < m.nvars(); ++i) {
    if (m[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    if (m[i] > 1) out += "^" + std::to_string(m[i]);
  }
  return out;
}

// -------------------------------------------------------------- Polynomial

namespace {

bool canonical_greater(const Monomial& a, const Monomial& b) {
  return compare(a, b, MonomialOrder::Grlex) > 0;
}

// Sorts, merges duplicates and drops zeros.
void canonicalize(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return canonical_greater(a.mono, b.mono); });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().mono == t.mono) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff == 0) out.pop_back();
  terms = std::move(out);
}

}  // namespace

Polynomial::Polynomial(std::size_t nvars, std::vector<Term> terms)
    : nvars_(nvars), terms_(std::move(terms)) {
  for (auto& t : terms_) {
    if (t.mono.nvars() != nvars_) throw DimensionError("term nvars mismatch");
    t.coeff.canonicalize();
  }
  canonicalize(terms_);
}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  if (c != 0) p.terms_.push_back({Monomial(nvars), c});
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  return monomial(Monomial::variable(nvars, index));
}

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p(m.nvars());
  if (c != 0) p.terms_.push_back({m, c});
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one());
}

std::optional<unsigned> Polynomial::degree() const {
  if (terms_.empty()) return std::nullopt;
  return terms_.front().mono.degree();
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m, [](const Term& t, const Monomial& key) {
    return canonical_greater(t.mono, key);
  });
  if (it != terms_.end() && it->mono == m) return it->coeff;
  return 0;
}

Rational Polynomial::constant_term() const {
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
  return 0;
}

LeadingTerm Polynomial::leading(MonomialOrder ord) const {
  if (terms_.empty()) throw PreconditionError("leading term of the zero polynomial is undefined");
  if (ord == MonomialOrder::Grlex) return {terms_.front().mono, terms_.front().coeff};
  const Term* best = &terms_.front();
  for (const auto& t : terms_) {
    if (compare(t.mono, best->mono, ord) > 0) best = &t;
  }
  return {best->mono, best->coeff};
}

void Polynomial::check_same(const Polynomial& other) const {
  if (nvars_ != other.nvars_) {
    throw DimensionError("polynomial nvars mismatch: " + std::to_string(nvars_) + " vs " +
                         std::to_string(other.nvars_));
  }
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  Polynomial r(*this);
  r += other;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  Polynomial r(*this);
  r -= other;
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(*this);
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

// Merge of two canonical term lists: a + sign*b.
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, int sign) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && canonical_greater(a[i].mono, b[j].mono))) {
      out.push_back(a[i++]);
    } else if (i == a.size() || canonical_greater(b[j].mono, a[i].mono)) {
      out.push_back(b[j]);
      if (sign < 0) out.back().coeff = -out.back().coeff;
      ++j;
    } else {
      Rational c = sign < 0 ? Rational(a[i].coeff - b[j].coeff) : Rational(a[i].coeff + b[j].coeff);
      if (c != 0) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same(other);
  terms_ = merge(terms_, other.terms_, +1);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_same(other);
  terms_ = merge(terms_, other.terms_, -1);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  check_same(other);
  if (is_zero() || other.is_zero()) return Polynomial(nvars_);
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      acc[a.mono * b.mono] += a.coeff * b.coeff;
    }
  }
  std::vector<Term> terms;
  terms.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (c != 0) terms.push_back({m, std::move(c)});
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return canonical_greater(x.mono, y.mono); });
  Polynomial r(nvars_);
  r.terms_ = std::move(terms);
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  if (c == 0) return Polynomial(nvars_);
  Polynomial r(*this);
  for (auto& t : r.terms_) t.coeff *= c;
  return r;
}

Polynomial Polynomial::times(const Monomial& m, const Rational& c) const {
  if (m.nvars() != nvars_) throw DimensionError("monomial nvars mismatch");
  if (c == 0) return Polynomial(nvars_);
  Polynomial r(nvars_);
  r.terms_.reserve(terms_.size());
  // Multiplication by a monomial preserves the graded-lex order.
  for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coeff * c});
  return r;
}

Polynomial Polynomial::pow(unsigned k) const {
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1U) result *= base;
    k >>= 1U;
    if (k > 0) base *= base;
  }
  return result;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != nvars_) throw DimensionError("evaluation point has wrong length");
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (Exponent e = 0; e < t.mono[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (point.size() != nvars_) throw DimensionError("evaluation point has wrong length");
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff.get_d();
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (Exponent e = 0; e < t.mono[i]; ++e) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::permuted(std::span<const std::uint32_t> perm) const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& t : terms_) terms.push_back({t.mono.permuted(perm), t.coeff});
  Polynomial r(nvars_);
  r.terms_ = std::move(terms);
  canonicalize(r.terms_);
  return r;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coeff;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    c = abs(c);
    if (t.mono.is_one()) {
      os << c.get_str();
    } else {
      if (c != 1) os << c.get_str() << "*";
      os << mubcert::to_string(t.mono, names);
    }
    first = false;
  }
  return os.str();
}

bool Polynomial::operator==(const Polynomial& other) const {
  if (nvars_ != other.nvars_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(terms_[i].mono == other.terms_[i].mono) || terms_[i].coeff != other.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

Polynomial operator*(const Rational& c, const Polynomial& p) { return p.scaled(c); }

}  // namespace mubcert

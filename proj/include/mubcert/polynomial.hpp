#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace mubcert {

using Rational = mpq_class;
using Integer = mpz_class;

/// Builds a canonical rational from decimal numerator/denominator strings.
Rational make_rational(const std::string& num, const std::string& den = "1");

using Exponent = std::uint32_t;

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps_(nvars, 0) {}
  explicit Monomial(std::vector<Exponent> exps);

  static Monomial variable(std::size_t nvars, std::size_t index, Exponent power = 1);

  std::size_t nvars() const { return exps_.size(); }
  unsigned degree() const { return degree_; }
  Exponent operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<Exponent>& exponents() const { return exps_; }
  bool is_one() const { return degree_ == 0; }

  Monomial operator*(const Monomial& other) const;
  /// Exact quotient; requires other.divides(*this).
  Monomial operator/(const Monomial& other) const;
  bool divides(const Monomial& other) const;
  bool coprime(const Monomial& other) const;
  Monomial lcm(const Monomial& other) const;

  /// Image under the variable permutation i -> perm[i].
  Monomial permuted(std::span<const std::uint32_t> perm) const;

  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<Exponent> exps_;
  unsigned degree_ = 0;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

enum class MonomialOrder { Lex, Grlex, Grevlex };

/// Parses "lex", "grlex" or "grevlex".
MonomialOrder parse_order(const std::string& name);
std::string to_string(MonomialOrder ord);

/// Total, multiplicative well-order on monomials with x1 > x2 > ... > xn.
std::strong_ordering compare(const Monomial& a, const Monomial& b, MonomialOrder ord);

struct MonomialLess {
  MonomialOrder ord;
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b, ord) < 0; }
};

struct Term {
  Monomial mono;
  Rational coeff;
};

struct LeadingTerm {
  Monomial mono;
  Rational coeff;
};

/// Sparse multivariate polynomial over Q.
///
/// Terms are kept in canonical form: no zero coefficients, sorted by
/// descending graded-lex order of the monomials. Two polynomials are equal
/// iff their term vectors are equal.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}
  /// Terms may be unsorted and contain duplicates or zeros.
  Polynomial(std::size_t nvars, std::vector<Term> terms);

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial monomial(const Monomial& m, const Rational& c = 1);

  std::size_t nvars() const { return nvars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Total degree; std::nullopt stands for the degree of the zero polynomial.
  std::optional<unsigned> degree() const;
  Rational coefficient(const Monomial& m) const;
  Rational constant_term() const;

  LeadingTerm leading(MonomialOrder ord) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator-(const Polynomial& other) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);

  Polynomial scaled(const Rational& c) const;
  Polynomial times(const Monomial& m, const Rational& c = 1) const;
  Polynomial pow(unsigned k) const;

  Rational evaluate(std::span<const Rational> point) const;
  double evaluate(std::span<const double> point) const;

  Polynomial permuted(std::span<const std::uint32_t> perm) const;

  /// Human-readable form, e.g. "x1^2 + 2*x1*x2 - 1".
  std::string to_string(const std::vector<std::string>& names = {}) const;

  bool operator==(const Polynomial& other) const;

 private:
  void check_same(const Polynomial& other) const;

  std::size_t nvars_ = 0;
  std::vector<Term> terms_;
};

Polynomial operator*(const Rational& c, const Polynomial& p);

/// Canonical "x1*x2^2" style rendering of a monomial.
std::string to_string(const Monomial& m, const std::vector<std::string>& names = {});

}  // namespace mubcert

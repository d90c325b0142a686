#pragma once

// Exact coefficient field Q(p, q, r, ...): rational functions in a finite set
// of commuting parameters, numerators allowed to carry Laurent monomials.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncdiff {

using Rational = mpq_class;

class ParameterSet {
public:
  ParameterSet() = default;
  explicit ParameterSet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(const std::string& name) const;

  // Appends a name, returns its index. Throws on duplicates.
  std::size_t add(const std::string& name);

  bool operator==(const ParameterSet&) const = default;

private:
  std::vector<std::string> names_;
};

// Sparse exponent vector, sorted by parameter index, zero exponents absent.
class LaurentMonomial {
public:
  using Entry = std::pair<std::uint32_t, std::int32_t>;

  LaurentMonomial() = default;
  static LaurentMonomial variable(std::uint32_t index, std::int32_t exponent = 1);

  const std::vector<Entry>& entries() const { return exps_; }
  bool is_one() const { return exps_.empty(); }
  std::int64_t degree() const;
  std::int32_t exponent(std::uint32_t index) const;
  // True when every exponent is non-negative.
  bool is_proper() const;

  LaurentMonomial operator*(const LaurentMonomial& other) const;
  LaurentMonomial inverse() const;
  LaurentMonomial pow(std::int32_t n) const;
  // Exponent-wise minimum / maximum (the gcd / lcm for Laurent monomials).
  static LaurentMonomial min(const LaurentMonomial& a, const LaurentMonomial& b);
  bool divides(const LaurentMonomial& other) const;

  bool operator==(const LaurentMonomial&) const = default;

private:
  explicit LaurentMonomial(std::vector<Entry> e) : exps_(std::move(e)) {}
  std::vector<Entry> exps_;
};

// Graded-lex order: total degree first, then exponents in parameter order.
int grlex_compare(const LaurentMonomial& a, const LaurentMonomial& b);

struct GrlexGreater {
  bool operator()(const LaurentMonomial& a, const LaurentMonomial& b) const {
    return grlex_compare(a, b) > 0;
  }
};

class Polynomial {
public:
  // Leading term first.
  using Terms = std::map<LaurentMonomial, Rational, GrlexGreater>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT: constants convert implicitly
  Polynomial(const LaurentMonomial& m, const Rational& c);
  static Polynomial variable(std::uint32_t index);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  std::size_t size() const { return terms_.size(); }
  const LaurentMonomial& leading_monomial() const { return terms_.begin()->first; }
  const Rational& leading_coefficient() const { return terms_.begin()->second; }
  // Exponent-wise minimum over all terms.
  LaurentMonomial monomial_content() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial scaled(const Rational& c, const LaurentMonomial& m = {}) const;
  Polynomial pow(unsigned n) const;

  // Exact quotient if `divisor` divides this polynomial in the Laurent ring,
  // nullopt otherwise. The divisor must be proper with no monomial content.
  std::optional<Polynomial> exact_quotient(const Polynomial& divisor) const;

  bool operator==(const Polynomial&) const = default;

private:
  void add_term(const LaurentMonomial& m, const Rational& c);
  Terms terms_;
};

int polynomial_compare(const Polynomial& a, const Polynomial& b);

class RationalFunction {
public:
  // Denominator factors: proper, monic under grlex, no monomial content,
  // never constant. Exponents positive.
  using Factor = std::pair<Polynomial, int>;

  RationalFunction() = default;
  RationalFunction(const Rational& c);  // NOLINT
  RationalFunction(long c) : RationalFunction(Rational(c)) {}  // NOLINT
  RationalFunction(int c) : RationalFunction(Rational(c)) {}  // NOLINT
  explicit RationalFunction(Polynomial numerator);
  static RationalFunction parameter(std::uint32_t index, std::int32_t exponent = 1);
  static RationalFunction fraction(const Polynomial& numerator, const Polynomial& denominator);

  const Polynomial& numerator() const { return num_; }
  const std::vector<Factor>& denominator_factors() const { return den_; }
  Polynomial denominator() const;

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const;
  bool is_constant() const { return den_.empty() && num_.is_constant(); }
  // The constant value; only meaningful when is_constant().
  Rational constant_value() const;
  // Sign of the leading numerator coefficient (0 for zero).
  int sign() const;

  RationalFunction operator+(const RationalFunction& o) const;
  RationalFunction operator-(const RationalFunction& o) const;
  RationalFunction operator-() const;
  RationalFunction operator*(const RationalFunction& o) const;
  RationalFunction operator/(const RationalFunction& o) const;
  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
  RationalFunction inverse() const;
  RationalFunction pow(int n) const;

  // Semantic equality (cross-multiplied zero test).
  bool operator==(const RationalFunction& o) const { return (*this - o).is_zero(); }
  // Identical stored representation.
  bool same_representation(const RationalFunction& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

private:
  void normalize();
  Polynomial num_;
  std::vector<Factor> den_;
};

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b);
RationalFunction rf_inv(const RationalFunction& a);
bool rf_is_zero(const RationalFunction& a);

using Bindings = std::map<std::uint32_t, RationalFunction>;
using Point = std::map<std::uint32_t, Rational>;

RationalFunction rf_substitute(const RationalFunction& a, const Bindings& bindings);
// Throws PoleError when the denominator vanishes at the point. Parameters
// missing from the point are an error as well.
Rational rf_eval(const RationalFunction& a, const Point& point);
Rational poly_eval(const Polynomial& p, const Point& point);

// Plain-text rendering in the model-language syntax, e.g. "(p*q - 1)/(q - 1)".
std::string to_string(const Polynomial& p, const ParameterSet& params);
std::string to_string(const RationalFunction& a, const ParameterSet& params);
std::string to_latex(const RationalFunction& a, const ParameterSet& params);
// True when the rendering is a sum that needs parentheses as a factor.
bool needs_parentheses(const RationalFunction& a);
// Renders sum c_i * text_i with signs pulled out ("x - q * y"); an empty
// text stands for the unit.
std::string render_linear(const std::vector<std::pair<RationalFunction, std::string>>& terms,
                          const ParameterSet& params, bool latex = false);

}  // namespace ncdiff

#include "ncdiff/coeff.hpp"

#include <algorithm>
#include <sstream>

#include "ncdiff/errors.hpp"

namespace ncdiff {

// ---------------------------------------------------------------------------
// ParameterSet

ParameterSet::ParameterSet(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

std::optional<std::size_t> ParameterSet::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t ParameterSet::add(const std::string& name) {
  if (find(name)) throw Error("duplicate parameter '" + name + "'");
  names_.push_back(name);
  return names_.size() - 1;
}

// ---------------------------------------------------------------------------
// LaurentMonomial

LaurentMonomial LaurentMonomial::variable(std::uint32_t index, std::int32_t exponent) {
  if (exponent == 0) return {};
  return LaurentMonomial({{index, exponent}});
}

std::int64_t LaurentMonomial::degree() const {
  std::int64_t d = 0;
  for (const auto& [i, e] : exps_) d += e;
  return d;
}

std::int32_t LaurentMonomial::exponent(std::uint32_t index) const {
  for (const auto& [i, e] : exps_) {
    if (i == index) return e;
    if (i > index) break;
  }
  return 0;
}

bool LaurentMonomial::is_proper() const {
  return std::all_of(exps_.begin(), exps_.end(), [](const Entry& x) { return x.second >= 0; });
}

LaurentMonomial LaurentMonomial::operator*(const LaurentMonomial& other) const {
  std::vector<Entry> out;
  out.reserve(exps_.size() + other.exps_.size());
  auto a = exps_.begin();
  auto b = other.exps_.begin();
  while (a != exps_.end() || b != other.exps_.end()) {
    if (b == other.exps_.end() || (a != exps_.end() && a->first < b->first)) {
      out.push_back(*a++);
    } else if (a == exps_.end() || b->first < a->first) {
      out.push_back(*b++);
    } else {
      std::int32_t e = a->second + b->second;
      if (e != 0) out.emplace_back(a->first, e);
      ++a;
      ++b;
    }
  }
  return LaurentMonomial(std::move(out));
}

LaurentMonomial LaurentMonomial::inverse() const { return pow(-1); }

LaurentMonomial LaurentMonomial::pow(std::int32_t n) const {
  if (n == 0) return {};
  std::vector<Entry> out = exps_;
  for (auto& [i, e] : out) e *= n;
  return LaurentMonomial(std::move(out));
}

LaurentMonomial LaurentMonomial::min(const LaurentMonomial& a, const LaurentMonomial& b) {
  std::vector<Entry> out;
  auto x = a.exps_.begin();
  auto y = b.exps_.begin();
  while (x != a.exps_.end() || y != b.exps_.end()) {
    if (y == b.exps_.end() || (x != a.exps_.end() && x->first < y->first)) {
      if (x->second < 0) out.push_back(*x);
      ++x;
    } else if (x == a.exps_.end() || y->first < x->first) {
      if (y->second < 0) out.push_back(*y);
      ++y;
    } else {
      std::int32_t e = std::min(x->second, y->second);
      if (e != 0) out.emplace_back(x->first, e);
      ++x;
      ++y;
    }
  }
  return LaurentMonomial(std::move(out));
}

bool LaurentMonomial::divides(const LaurentMonomial& other) const {
  // Proper-monomial divisibility: every exponent of *this <= that of other.
  return (inverse() * other).is_proper();
}

int grlex_compare(const LaurentMonomial& a, const LaurentMonomial& b) {
  auto da = a.degree();
  auto db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  auto x = a.entries().begin();
  auto y = b.entries().begin();
  while (x != a.entries().end() || y != b.entries().end()) {
    std::uint32_t ix = x != a.entries().end() ? x->first : UINT32_MAX;
    std::uint32_t iy = y != b.entries().end() ? y->first : UINT32_MAX;
    std::uint32_t i = std::min(ix, iy);
    std::int32_t ex = ix == i ? x->second : 0;
    std::int32_t ey = iy == i ? y->second : 0;
    if (ex != ey) return ex < ey ? -1 : 1;
    if (ix == i) ++x;
    if (iy == i) ++y;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(LaurentMonomial{}, c);
}

Polynomial::Polynomial(const LaurentMonomial& m, const Rational& c) {
  if (c != 0) terms_.emplace(m, c);
}

Polynomial Polynomial::variable(std::uint32_t index) {
  return Polynomial(LaurentMonomial::variable(index), 1);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

LaurentMonomial Polynomial::monomial_content() const {
  if (terms_.empty()) return {};
  LaurentMonomial m = terms_.begin()->first;
  for (const auto& [mono, c] : terms_) m = LaurentMonomial::min(m, mono);
  return m;
}

void Polynomial::add_term(const LaurentMonomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

Polynomial Polynomial::scaled(const Rational& c, const LaurentMonomial& m) const {
  Polynomial r;
  if (c == 0) return r;
  for (const auto& [mono, coef] : terms_) r.terms_.emplace(mono * m, coef * c);
  return r;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial result(1);
  Polynomial base = *this;
  while (n) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n) base = base * base;
  }
  return result;
}

std::optional<Polynomial> Polynomial::exact_quotient(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw DivisionByZero("polynomial division by zero");
  if (is_zero()) return Polynomial{};
  const LaurentMonomial shift = monomial_content();
  Polynomial f = scaled(1, shift.inverse());
  const LaurentMonomial& lm = divisor.leading_monomial();
  const Rational& lc = divisor.leading_coefficient();
  Polynomial quotient;
  while (!f.is_zero()) {
    const LaurentMonomial& fl = f.leading_monomial();
    if (!lm.divides(fl)) return std::nullopt;
    LaurentMonomial tm = lm.inverse() * fl;
    Rational tc = f.leading_coefficient() / lc;
    quotient.add_term(tm, tc);
    f = f - divisor.scaled(tc, tm);
  }
  return quotient.scaled(1, shift);
}

int polynomial_compare(const Polynomial& a, const Polynomial& b) {
  auto x = a.terms().begin();
  auto y = b.terms().begin();
  for (; x != a.terms().end() && y != b.terms().end(); ++x, ++y) {
    if (int c = grlex_compare(x->first, y->first); c != 0) return c;
    if (x->second != y->second) return x->second < y->second ? -1 : 1;
  }
  if (x == a.terms().end() && y == b.terms().end()) return 0;
  return x == a.terms().end() ? -1 : 1;
}

// ---------------------------------------------------------------------------
// RationalFunction

namespace {

// Splits p = c * m * q with q proper, monic and free of monomial content.
struct Split {
  Rational scalar;
  LaurentMonomial monomial;
  Polynomial primitive;
};

Split split_content(const Polynomial& p) {
  Split s;
  s.monomial = p.monomial_content();
  s.scalar = p.leading_coefficient();
  s.primitive = p.scaled(1 / s.scalar, s.monomial.inverse());
  return s;
}

}  // namespace

RationalFunction::RationalFunction(const Rational& c) : num_(c) {}

RationalFunction::RationalFunction(Polynomial numerator) : num_(std::move(numerator)) {}

RationalFunction RationalFunction::parameter(std::uint32_t index, std::int32_t exponent) {
  return RationalFunction(Polynomial(LaurentMonomial::variable(index, exponent), 1));
}

RationalFunction RationalFunction::fraction(const Polynomial& numerator,
                                            const Polynomial& denominator) {
  return RationalFunction(numerator) * RationalFunction(denominator).inverse();
}

Polynomial RationalFunction::denominator() const {
  Polynomial d(1);
  for (const auto& [f, e] : den_) d = d * f.pow(static_cast<unsigned>(e));
  return d;
}

bool RationalFunction::is_one() const {
  return den_.empty() && num_.is_constant() && !num_.is_zero() && num_.leading_coefficient() == 1;
}

Rational RationalFunction::constant_value() const {
  if (num_.is_zero()) return 0;
  return num_.leading_coefficient();
}

int RationalFunction::sign() const {
  if (num_.is_zero()) return 0;
  return sgn(num_.leading_coefficient());
}

void RationalFunction::normalize() {
  if (num_.is_zero()) {
    den_.clear();
    return;
  }
  std::sort(den_.begin(), den_.end(), [](const Factor& a, const Factor& b) {
    return polynomial_compare(a.first, b.first) < 0;
  });
  std::vector<Factor> merged;
  for (auto& fe : den_) {
    if (!merged.empty() && merged.back().first == fe.first) {
      merged.back().second += fe.second;
    } else {
      merged.push_back(std::move(fe));
    }
  }
  den_.clear();
  for (auto& [f, e] : merged) {
    while (e > 0) {
      auto q = num_.exact_quotient(f);
      if (!q) break;
      num_ = std::move(*q);
      --e;
    }
    if (e > 0) den_.emplace_back(std::move(f), e);
  }
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_.empty() && o.den_.empty()) return RationalFunction(num_ + o.num_);
  // Denominator lcm over the (syntactically identified) factors.
  std::vector<Factor> lcm = den_;
  for (const auto& [f, e] : o.den_) {
    auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Factor& x) { return x.first == f; });
    if (it == lcm.end()) {
      lcm.emplace_back(f, e);
    } else {
      it->second = std::max(it->second, e);
    }
  }
  auto cofactor = [&](const std::vector<Factor>& own) {
    Polynomial c(1);
    for (const auto& [f, e] : lcm) {
      int have = 0;
      for (const auto& [g, k] : own) {
        if (g == f) have = k;
      }
      if (e > have) c = c * f.pow(static_cast<unsigned>(e - have));
    }
    return c;
  };
  RationalFunction r;
  r.num_ = num_ * cofactor(den_) + o.num_ * cofactor(o.den_);
  r.den_ = std::move(lcm);
  r.normalize();
  return r;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const { return *this + (-o); }

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
  if (is_zero() || o.is_zero()) return {};
  RationalFunction r;
  r.num_ = num_ * o.num_;
  if (den_.empty() && o.den_.empty()) return r;
  r.den_ = den_;
  r.den_.insert(r.den_.end(), o.den_.begin(), o.den_.end());
  r.normalize();
  return r;
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw DivisionByZero("inverse of zero rational function");
  Split s = split_content(num_);
  RationalFunction r;
  r.num_ = denominator().scaled(1 / s.scalar, s.monomial.inverse());
  if (!s.primitive.is_constant()) r.den_.emplace_back(std::move(s.primitive), 1);
  r.normalize();
  return r;
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
  return *this * o.inverse();
}

RationalFunction RationalFunction::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  RationalFunction r;
  r.num_ = num_.pow(static_cast<unsigned>(n));
  if (r.num_.is_zero()) return r;
  for (const auto& [f, e] : den_) r.den_.emplace_back(f, e * n);
  r.normalize();
  return r;
}

RationalFunction rf_add(const RationalFunction& a, const RationalFunction& b) { return a + b; }
RationalFunction rf_mul(const RationalFunction& a, const RationalFunction& b) { return a * b; }
RationalFunction rf_inv(const RationalFunction& a) { return a.inverse(); }
bool rf_is_zero(const RationalFunction& a) { return a.is_zero(); }

namespace {

RationalFunction substitute_poly(const Polynomial& p, const Bindings& bindings) {
  RationalFunction out;
  for (const auto& [m, c] : p.terms()) {
    RationalFunction term(c);
    LaurentMonomial kept;
    for (const auto& [i, e] : m.entries()) {
      auto it = bindings.find(i);
      if (it == bindings.end()) {
        kept = kept * LaurentMonomial::variable(i, e);
      } else {
        if (e < 0 && it->second.is_zero()) {
          throw DivisionByZero("substitution sends a denominator parameter to zero");
        }
        term = term * it->second.pow(e);
      }
    }
    out += term * RationalFunction(Polynomial(kept, 1));
  }
  return out;
}

}  // namespace

RationalFunction rf_substitute(const RationalFunction& a, const Bindings& bindings) {
  if (bindings.empty()) return a;
  RationalFunction num = substitute_poly(a.numerator(), bindings);
  RationalFunction den(1);
  for (const auto& [f, e] : a.denominator_factors()) {
    den = den * substitute_poly(f, bindings).pow(e);
  }
  if (den.is_zero()) throw DivisionByZero("substitution makes a denominator vanish");
  return num / den;
}

Rational poly_eval(const Polynomial& p, const Point& point) {
  Rational total = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (const auto& [i, e] : m.entries()) {
      auto it = point.find(i);
      if (it == point.end()) throw Error("evaluation point misses a parameter");
      if (it->second == 0 && e < 0) throw PoleError("pole at evaluation point");
      Rational v = e < 0 ? Rational(1 / it->second) : it->second;
      for (std::int32_t k = 0; k < (e < 0 ? -e : e); ++k) t *= v;
    }
    total += t;
  }
  return total;
}

Rational rf_eval(const RationalFunction& a, const Point& point) {
  Rational den = 1;
  for (const auto& [f, e] : a.denominator_factors()) {
    Rational v = poly_eval(f, point);
    for (int k = 0; k < e; ++k) den *= v;
  }
  if (den == 0) throw PoleError("pole at evaluation point");
  return poly_eval(a.numerator(), point) / den;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string monomial_text(const LaurentMonomial& m, const ParameterSet& params,
                          const char* sep, bool latex) {
  std::string out;
  for (const auto& [i, e] : m.entries()) {
    if (!out.empty()) out += sep;
    out += params.name(i);
    if (e != 1) {
      if (latex) {
        out += "^{" + std::to_string(e) + "}";
      } else {
        out += "^" + std::to_string(e);
      }
    }
  }
  return out;
}

std::string rational_text(const Rational& c, bool latex) {
  if (latex && c.get_den() != 1) {
    return "\\frac{" + c.get_num().get_str() + "}{" + c.get_den().get_str() + "}";
  }
  return c.get_str();
}

std::string poly_text(const Polynomial& p, const ParameterSet& params, bool latex) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Rational mag = abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono = monomial_text(m, params, latex ? " " : "*", latex);
    if (mono.empty()) {
      out += rational_text(mag, latex);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += rational_text(mag, latex) + (latex ? " " : "*") + mono;
    }
  }
  return out;
}

}  // namespace

std::string to_string(const Polynomial& p, const ParameterSet& params) {
  return poly_text(p, params, false);
}

bool needs_parentheses(const RationalFunction& a) {
  return a.denominator_factors().empty() && a.numerator().size() > 1;
}

std::string to_string(const RationalFunction& a, const ParameterSet& params) {
  std::string num = poly_text(a.numerator(), params, false);
  if (a.denominator_factors().empty()) return num;
  if (a.numerator().size() > 1) num = "(" + num + ")";
  std::string den;
  for (const auto& [f, e] : a.denominator_factors()) {
    if (!den.empty()) den += "*";
    den += "(" + poly_text(f, params, false) + ")";
    if (e != 1) den += "^" + std::to_string(e);
  }
  if (a.denominator_factors().size() > 1 || a.denominator_factors().front().second != 1) {
    den = "(" + den + ")";
  }
  return num + "/" + den;
}

std::string render_linear(const std::vector<std::pair<RationalFunction, std::string>>& terms,
                          const ParameterSet& params, bool latex) {
  std::string out;
  bool first = true;
  for (const auto& [c, text] : terms) {
    if (c.is_zero()) continue;
    bool negative = c.sign() < 0;
    RationalFunction mag = negative ? -c : c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string coeff = latex ? to_latex(mag, params) : to_string(mag, params);
    if (needs_parentheses(mag)) coeff = latex ? "\\left(" + coeff + "\\right)" : "(" + coeff + ")";
    if (text.empty()) {
      out += coeff;
    } else if (mag.is_one()) {
      out += text;
    } else {
      out += coeff + (latex ? " \\, " : " * ") + text;
    }
  }
  return first ? "0" : out;
}

std::string to_latex(const RationalFunction& a, const ParameterSet& params) {
  std::string num = poly_text(a.numerator(), params, true);
  if (a.denominator_factors().empty()) return num;
  std::string den;
  for (const auto& [f, e] : a.denominator_factors()) {
    den += "(" + poly_text(f, params, true) + ")";
    if (e != 1) den += "^{" + std::to_string(e) + "}";
  }
  return "\\frac{" + num + "}{" + den + "}";
}

}  // namespace ncdiff

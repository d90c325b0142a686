#pragma once

// Graded differential algebra over an algebra with a diagonal bimodule
// structure: theta^s a = phi_s(a) theta^s. Forms keep their algebra
// coefficients on the left of strictly ascending theta-monomials, and the
// differential is the graded commutator with the inner 1-form.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncdiff/algebra.hpp"
#include "ncdiff/morphism.hpp"

namespace ncdiff {

using ThetaIndex = std::uint8_t;
using ThetaWord = std::vector<ThetaIndex>;

// Degree, then lexicographic.
struct ThetaLess {
  bool operator()(const ThetaWord& a, const ThetaWord& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class Form {
public:
  using Terms = std::map<ThetaWord, Element, ThetaLess>;

  Form() = default;
  Form(const Element& e);  // NOLINT: grade-0 embedding
  Form(ThetaWord w, const Element& coeff);
  static Form basis(ThetaIndex s);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Grade-k part.
  Form component(std::size_t grade) const;
  std::size_t max_grade() const;
  bool is_homogeneous() const;
  // The grade-0 part as an Element.
  Element scalar_part() const;

  void add_term(const ThetaWord& w, const Element& coeff);
  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator-() const;
  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  Form scaled(const RationalFunction& c) const;

  bool operator==(const Form& o) const { return (*this - o).is_zero(); }

private:
  Terms terms_;
};

// theta^upper theta^lower -> sum c * theta^i theta^j with i < j (empty for a
// vanishing product).
struct WedgeRule {
  ThetaIndex upper = 0;
  ThetaIndex lower = 0;
  struct Term {
    RationalFunction coeff;
    ThetaIndex first;
    ThetaIndex second;
  };
  std::vector<Term> rhs;
};

struct Verdict {
  bool passed = true;
  std::string witness;
  explicit operator bool() const { return passed; }
};

class CalculusSpec {
public:
  CalculusSpec(std::shared_ptr<const Algebra> algebra, std::vector<std::string> labels,
               std::vector<Endomorphism> twists, std::vector<Element> weights,
               std::vector<WedgeRule> wedge_rules);
  CalculusSpec(const CalculusSpec& other);
  CalculusSpec& operator=(const CalculusSpec& other);

  const Algebra& algebra() const { return *alg_; }
  const std::shared_ptr<const Algebra>& algebra_ptr() const { return alg_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<ThetaIndex> find_label(const std::string& label) const;
  const Endomorphism& twist(ThetaIndex s) const { return twists_.at(s); }
  const Element& weight(ThetaIndex s) const { return weights_.at(s); }
  // Weight used by the inner 1-form; equals weight(s) unless overridden.
  const Element& inner_weight(ThetaIndex s) const { return inner_weights_.at(s); }
  TwistedDerivation derivation(ThetaIndex s) const { return {weights_.at(s), twists_.at(s)}; }
  const std::vector<WedgeRule>& wedge_rules() const { return rules_; }

  // Copy with one inner-form weight replaced (the derivations keep theirs).
  CalculusSpec with_inner_weight(ThetaIndex s, const Element& w) const;
  // Copy with one wedge rule replaced or added.
  CalculusSpec with_wedge_rule(const WedgeRule& rule) const;

  // Composite twist phi_{i1} o ... o phi_{ik} for a theta-monomial.
  Endomorphism word_twist(const ThetaWord& w) const;
  // Normal form of a theta-letter sequence: ascending monomials, reduced by
  // the wedge rules and by the higher-degree consequences they imply.
  // Throws MissingThetaRule when a needed pair has no rule.
  std::vector<std::pair<RationalFunction, ThetaWord>> theta_normal_form(
      const std::vector<ThetaIndex>& letters) const;
  // Relations among ascending monomials of degree >= 3 forced by the
  // quadratic wedge rules, as "pivot = combination of smaller monomials".
  struct DerivedThetaRelation {
    ThetaWord pivot;
    std::vector<std::pair<RationalFunction, ThetaWord>> rhs;
  };
  const std::vector<DerivedThetaRelation>& derived_theta_relations() const;

  // Structural problems: automorphisms failing their relation check, wedge
  // rules not compatible with the twists, missing rules.
  std::vector<std::string> validation_problems() const;

private:
  using Reduced = std::map<ThetaWord, RationalFunction, ThetaLess>;
  Reduced reduce_pairs(const std::vector<ThetaIndex>& letters) const;
  void ensure_completed() const;

  std::shared_ptr<const Algebra> alg_;
  std::vector<std::string> labels_;
  std::vector<Endomorphism> twists_;
  std::vector<Element> weights_;
  std::vector<Element> inner_weights_;
  std::vector<WedgeRule> rules_;
  std::map<std::pair<ThetaIndex, ThetaIndex>, std::size_t> rule_index_;

  mutable std::mutex mutex_;
  mutable std::map<std::vector<ThetaIndex>, Reduced> pair_cache_;
  mutable std::map<ThetaWord, Endomorphism> twist_cache_;
  mutable bool completed_ = false;
  mutable std::vector<DerivedThetaRelation> derived_;
};

Form wedge(const CalculusSpec& spec, const Form& a, const Form& b);
// a * omega for an algebra element on the left (no twist involved).
Form left_multiply(const CalculusSpec& spec, const Element& a, const Form& omega);
Form d_zero(const CalculusSpec& spec, const Element& a);
Form mc_form(const CalculusSpec& spec);
// Graded commutator with the inner 1-form, per homogeneous component.
Form d_form(const CalculusSpec& spec, const Form& omega);
Form rf_substitute(const Form& f, const Bindings& bindings);

// d_zero(g) = [vartheta, g] on every symbol and on `samples` random elements.
Verdict verify_inner(const CalculusSpec& spec, std::mt19937_64& rng, std::size_t samples = 20);
// vartheta^2 commutes with every generator and every theta^s.
Verdict verify_d_squared(const CalculusSpec& spec);
// theta^s * g = phi_s(g) * theta^s for every symbol g and every s.
Verdict verify_theta_passing(const CalculusSpec& spec);

enum class RelationSide {
  ElementLeft,  // e * omega = sum c * omega' * e'
  FormLeft,     // omega * e = sum c * e' * omega'
};

struct DerivedRelation {
  std::string element;
  std::string form;
  RelationSide side = RelationSide::ElementLeft;
  struct Term {
    RationalFunction coeff;
    std::string form;
    std::string element;
  };
  std::vector<Term> terms;
};

using NamedForm = std::pair<std::string, Form>;
using NamedElement = std::pair<std::string, Element>;

// Expresses every product element*form (or form*element) in the span of the
// opposite-order products with scalar coefficients. Throws
// InexpressibleRelation when no such combination exists.
std::vector<DerivedRelation> commutation_relations(const CalculusSpec& spec,
                                                   const std::vector<NamedForm>& forms,
                                                   const std::vector<NamedElement>& elements,
                                                   RelationSide side = RelationSide::ElementLeft);

std::string to_string(const Form& f, const CalculusSpec& spec);
std::string to_latex(const Form& f, const CalculusSpec& spec);
std::string to_string(const DerivedRelation& r, const ParameterSet& params);
std::string to_latex(const DerivedRelation& r, const ParameterSet& params);

}  // namespace ncdiff

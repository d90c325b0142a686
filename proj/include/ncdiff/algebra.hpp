#pragma once

// Finitely presented associative algebras with two-letter rewrite rules,
// formal inverses for selected generators and a diamond-lemma overlap check.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ncdiff/coeff.hpp"

namespace ncdiff {

using Symbol = std::uint16_t;

// Symbols are numbered in declaration order with each formal inverse placed
// immediately after its base generator. That numbering is the letter order
// used by rewriting.
class GeneratorTable {
public:
  GeneratorTable() = default;
  GeneratorTable(const std::vector<std::string>& generators,
                 const std::vector<std::string>& invertible);

  std::size_t size() const { return entries_.size(); }
  // "x" for base symbols, "x^-1" for inverses.
  std::string display_name(Symbol s) const;
  const std::string& base_name(Symbol s) const { return entries_.at(s).name; }
  bool is_inverse(Symbol s) const { return entries_.at(s).is_inverse; }
  Symbol base_of(Symbol s) const { return entries_.at(s).base; }
  std::optional<Symbol> inverse_of(Symbol s) const { return entries_.at(s).partner; }
  bool is_invertible(Symbol s) const { return entries_.at(s).partner.has_value(); }
  // Accepts display names.
  std::optional<Symbol> find(const std::string& name) const;
  // Base generators in declaration order.
  std::vector<Symbol> generators() const;
  std::vector<std::string> generator_names() const;
  std::vector<std::string> invertible_names() const;

private:
  struct Entry {
    std::string name;
    bool is_inverse = false;
    Symbol base = 0;
    std::optional<Symbol> partner;
  };
  std::vector<Entry> entries_;
};

// Run-length encoded word; runs never repeat a symbol in adjacent positions.
class Word {
public:
  using Run = std::pair<Symbol, std::uint32_t>;

  Word() = default;
  static Word from_letters(const std::vector<Symbol>& letters);

  const std::vector<Run>& runs() const { return runs_; }
  bool empty() const { return runs_.empty(); }
  std::size_t length() const;
  std::vector<Symbol> letters() const;
  Symbol last() const { return runs_.back().first; }

  void push_back(Symbol s, std::uint32_t count = 1);
  Word without_last() const;
  Word operator*(const Word& other) const;

  bool operator==(const Word&) const = default;

private:
  std::vector<Run> runs_;
};

// Degree, then left-lexicographic comparison of the letter sequences.
int word_compare(const Word& a, const Word& b);

struct WordLess {
  bool operator()(const Word& a, const Word& b) const { return word_compare(a, b) < 0; }
};

struct WordHash {
  std::size_t operator()(const Word& w) const;
};

// Unreduced linear combination of words.
struct Combination {
  struct Term {
    RationalFunction coeff;
    std::vector<Symbol> letters;
  };
  std::vector<Term> terms;
};

// Algebra element: coefficient per normal-form word, zero coefficients absent.
class Element {
public:
  using Terms = std::map<Word, RationalFunction, WordLess>;

  Element() = default;
  Element(const RationalFunction& c);  // NOLINT: scalars embed implicitly
  Element(Word w, const RationalFunction& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  // Coefficient of the empty word if the element is a scalar multiple of 1.
  std::optional<RationalFunction> as_scalar() const;
  RationalFunction coefficient(const Word& w) const;
  std::size_t degree() const;

  void add_term(const Word& w, const RationalFunction& c);
  Element operator+(const Element& o) const;
  Element operator-(const Element& o) const;
  Element operator-() const;
  Element& operator+=(const Element& o);
  Element& operator-=(const Element& o);
  Element scaled(const RationalFunction& c) const;

  // Exact equality of coefficients on identical normal-form words.
  bool operator==(const Element& o) const { return (*this - o).is_zero(); }

private:
  Terms terms_;
};

struct Rule {
  Symbol left = 0;   // first letter of the left-hand side
  Symbol right = 0;  // second letter
  Combination rhs;
  std::string origin;
};

class RewriteSystem {
public:
  // Validates that every right-hand side word is strictly smaller than the
  // left-hand side; appended rules with an already-present left-hand side
  // are kept (for overlap checking) but never used for rewriting.
  void add(Rule rule);
  const Rule* find(Symbol left, Symbol right) const;
  const std::vector<Rule>& rules() const { return rules_; }

private:
  std::vector<Rule> rules_;
  std::map<std::pair<Symbol, Symbol>, std::size_t> index_;
};

struct Relation {
  Combination lhs;
  Combination rhs;
  std::string label;
};

class Algebra {
public:
  Algebra(ParameterSet params, GeneratorTable generators);
  Algebra(const Algebra& other);
  Algebra& operator=(const Algebra& other);

  const ParameterSet& parameters() const { return params_; }
  const GeneratorTable& generators() const { return gens_; }
  const RewriteSystem& rewrite_system() const { return rules_; }
  const std::vector<Relation>& relations() const { return relations_; }

  // Orients lhs = rhs into a rule whose left-hand side is the largest word.
  // Throws UnsupportedRelation if that word is not an out-of-order pair.
  void add_relation(const Combination& lhs, const Combination& rhs, std::string label);
  // Adds a rule verbatim; used to build deliberately inconsistent systems.
  void add_rule(Rule rule);
  // Adds g g^-1 -> 1, g^-1 g -> 1 for every invertible generator and the
  // conjugated commutation rules for pairs involving inverses.
  void complete_inverse_rules();

  Element one() const { return Element(RationalFunction(1)); }
  Element letter(Symbol s) const { return Element(Word::from_letters({s}), RationalFunction(1)); }
  Element normal_form(const Combination& expr) const;
  Element normal_form(const std::vector<Symbol>& letters) const;
  Element mul(const Element& a, const Element& b) const;
  Element pow(const Element& a, unsigned n) const;
  // Right-multiplication of a normal-form element by one letter.
  Element append(const Element& a, Symbol s) const;

private:
  Element append_word(const Word& u, Symbol s) const;

  ParameterSet params_;
  GeneratorTable gens_;
  RewriteSystem rules_;
  std::vector<Relation> relations_;

  struct CacheKeyHash {
    std::size_t operator()(const std::pair<Word, Symbol>& k) const {
      return WordHash{}(k.first) * 31 + k.second;
    }
  };
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::pair<Word, Symbol>, Element, CacheKeyHash> cache_;
};

Element scale(const RationalFunction& c, const Element& a);
Element add(const Element& a, const Element& b);
Element mul(const Algebra& alg, const Element& a, const Element& b);
Element rf_substitute(const Element& a, const Bindings& bindings);

// Letters of w^-1: reversed, each letter replaced by its formal inverse.
// Throws MissingInverse if some letter is not invertible.
std::vector<Symbol> inverse_letters(const GeneratorTable& gens, const std::vector<Symbol>& letters);

// Given a pure commutation rule h g -> c g h, returns the conjugated rules
// for every pair obtained by replacing h and/or g by its formal inverse.
// Throws UnsupportedRelation when the rule carries a tail.
std::vector<Rule> derive_inverse_rules(const GeneratorTable& gens, const Rule& base);
// g g^-1 -> 1 and g^-1 g -> 1.
std::vector<Rule> inverse_pair_rules(const GeneratorTable& gens, Symbol g);

struct Overlap {
  std::vector<Symbol> word;  // length 3, or length 2 for duplicate left-hand sides
  Element left_reduction;
  Element right_reduction;
};

struct ConfluenceReport {
  std::size_t overlaps_checked = 0;
  std::vector<Overlap> unresolved;
  bool confluent() const { return unresolved.empty(); }
};

ConfluenceReport check_confluence(const Algebra& algebra);

// If x*y = lambda*y*x for a scalar lambda, returns lambda.
std::optional<RationalFunction> commutation_scalar(const Algebra& alg, const Element& x,
                                                   const Element& y);

std::string to_string(const Word& w, const GeneratorTable& gens);
std::string to_string(const Element& e, const Algebra& alg);
std::string to_latex(const Element& e, const Algebra& alg);
std::string to_string(const Combination& c, const Algebra& alg);

}  // namespace ncdiff

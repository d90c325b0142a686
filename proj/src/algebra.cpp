#include "ncdiff/algebra.hpp"

#include <algorithm>

#include "ncdiff/errors.hpp"

namespace ncdiff {

// ---------------------------------------------------------------------------
// GeneratorTable

GeneratorTable::GeneratorTable(const std::vector<std::string>& generators,
                               const std::vector<std::string>& invertible) {
  for (const auto& inv : invertible) {
    if (std::find(generators.begin(), generators.end(), inv) == generators.end()) {
      throw Error("invertible symbol '" + inv + "' is not a generator");
    }
  }
  for (const auto& g : generators) {
    if (find(g)) throw Error("duplicate generator '" + g + "'");
    auto base = static_cast<Symbol>(entries_.size());
    entries_.push_back({g, false, base, std::nullopt});
    if (std::find(invertible.begin(), invertible.end(), g) != invertible.end()) {
      auto inv = static_cast<Symbol>(entries_.size());
      entries_[base].partner = inv;
      entries_.push_back({g, true, base, base});
    }
  }
}

std::string GeneratorTable::display_name(Symbol s) const {
  const auto& e = entries_.at(s);
  return e.is_inverse ? e.name + "^-1" : e.name;
}

std::optional<Symbol> GeneratorTable::find(const std::string& name) const {
  const std::string suffix = "^-1";
  if (name.size() > suffix.size() && name.ends_with(suffix)) {
    auto base = find(name.substr(0, name.size() - suffix.size()));
    return base ? inverse_of(*base) : std::nullopt;
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!entries_[i].is_inverse && entries_[i].name == name) return static_cast<Symbol>(i);
  }
  return std::nullopt;
}

std::vector<Symbol> GeneratorTable::generators() const {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!entries_[i].is_inverse) out.push_back(static_cast<Symbol>(i));
  }
  return out;
}

std::vector<std::string> GeneratorTable::generator_names() const {
  std::vector<std::string> out;
  for (auto s : generators()) out.push_back(entries_[s].name);
  return out;
}

std::vector<std::string> GeneratorTable::invertible_names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.is_inverse) out.push_back(e.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Word

Word Word::from_letters(const std::vector<Symbol>& letters) {
  Word w;
  for (auto s : letters) w.push_back(s);
  return w;
}

std::size_t Word::length() const {
  std::size_t n = 0;
  for (const auto& [s, k] : runs_) n += k;
  return n;
}

std::vector<Symbol> Word::letters() const {
  std::vector<Symbol> out;
  for (const auto& [s, k] : runs_) out.insert(out.end(), k, s);
  return out;
}

void Word::push_back(Symbol s, std::uint32_t count) {
  if (count == 0) return;
  if (!runs_.empty() && runs_.back().first == s) {
    runs_.back().second += count;
  } else {
    runs_.emplace_back(s, count);
  }
}

Word Word::without_last() const {
  Word w = *this;
  if (--w.runs_.back().second == 0) w.runs_.pop_back();
  return w;
}

Word Word::operator*(const Word& other) const {
  Word w = *this;
  for (const auto& [s, k] : other.runs_) w.push_back(s, k);
  return w;
}

int word_compare(const Word& a, const Word& b) {
  auto la = a.length();
  auto lb = b.length();
  if (la != lb) return la < lb ? -1 : 1;
  // Walk both run sequences in lockstep.
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint32_t used_a = 0;
  std::uint32_t used_b = 0;
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  while (i < ra.size() && j < rb.size()) {
    if (ra[i].first != rb[j].first) return ra[i].first < rb[j].first ? -1 : 1;
    std::uint32_t step = std::min(ra[i].second - used_a, rb[j].second - used_b);
    used_a += step;
    used_b += step;
    if (used_a == ra[i].second) {
      ++i;
      used_a = 0;
    }
    if (used_b == rb[j].second) {
      ++j;
      used_b = 0;
    }
  }
  return 0;
}

std::size_t WordHash::operator()(const Word& w) const {
  std::size_t h = 1469598103934665603ULL;
  for (const auto& [s, k] : w.runs()) {
    h = (h ^ s) * 1099511628211ULL;
    h = (h ^ k) * 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Element

Element::Element(const RationalFunction& c) {
  if (!c.is_zero()) terms_.emplace(Word{}, c);
}

Element::Element(Word w, const RationalFunction& c) {
  if (!c.is_zero()) terms_.emplace(std::move(w), c);
}

std::optional<RationalFunction> Element::as_scalar() const {
  if (terms_.empty()) return RationalFunction{};
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

RationalFunction Element::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? RationalFunction{} : it->second;
}

std::size_t Element::degree() const {
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.length());
  return d;
}

void Element::add_term(const Word& w, const RationalFunction& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Element& Element::operator+=(const Element& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

Element& Element::operator-=(const Element& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

Element Element::operator+(const Element& o) const {
  Element r = *this;
  r += o;
  return r;
}

Element Element::operator-(const Element& o) const {
  Element r = *this;
  r -= o;
  return r;
}

Element Element::operator-() const {
  Element r = *this;
  for (auto& [w, c] : r.terms_) c = -c;
  return r;
}

Element Element::scaled(const RationalFunction& c) const {
  Element r;
  if (c.is_zero()) return r;
  for (const auto& [w, k] : terms_) r.add_term(w, k * c);
  return r;
}

Element scale(const RationalFunction& c, const Element& a) { return a.scaled(c); }
Element add(const Element& a, const Element& b) { return a + b; }
Element mul(const Algebra& alg, const Element& a, const Element& b) { return alg.mul(a, b); }

Element rf_substitute(const Element& a, const Bindings& bindings) {
  Element r;
  for (const auto& [w, c] : a.terms()) r.add_term(w, rf_substitute(c, bindings));
  return r;
}

// ---------------------------------------------------------------------------
// RewriteSystem

void RewriteSystem::add(Rule rule) {
  Word lhs = Word::from_letters({rule.left, rule.right});
  for (const auto& t : rule.rhs.terms) {
    if (word_compare(Word::from_letters(t.letters), lhs) >= 0) {
      throw UnsupportedRelation("rule right-hand side is not smaller than its left-hand side (" +
                                rule.origin + ")");
    }
  }
  index_.try_emplace({rule.left, rule.right}, rules_.size());
  rules_.push_back(std::move(rule));
}

const Rule* RewriteSystem::find(Symbol left, Symbol right) const {
  auto it = index_.find({left, right});
  return it == index_.end() ? nullptr : &rules_[it->second];
}

// ---------------------------------------------------------------------------
// Algebra

Algebra::Algebra(ParameterSet params, GeneratorTable generators)
    : params_(std::move(params)), gens_(std::move(generators)) {}

Algebra::Algebra(const Algebra& other)
    : params_(other.params_),
      gens_(other.gens_),
      rules_(other.rules_),
      relations_(other.relations_) {}

Algebra& Algebra::operator=(const Algebra& other) {
  if (this != &other) {
    params_ = other.params_;
    gens_ = other.gens_;
    rules_ = other.rules_;
    relations_ = other.relations_;
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
  return *this;
}

namespace {

bool is_inverse_pair(const GeneratorTable& gens, Symbol a, Symbol b) {
  auto inv = gens.inverse_of(a);
  return inv && *inv == b;
}

}  // namespace

void Algebra::add_relation(const Combination& lhs, const Combination& rhs, std::string label) {
  relations_.push_back({lhs, rhs, label});
  // Collect lhs - rhs with words merged (no rewriting: the words are taken as written).
  std::map<Word, RationalFunction, WordLess> diff;
  auto accumulate = [&](const Combination& c, int sign) {
    for (const auto& t : c.terms) {
      auto& slot = diff[Word::from_letters(t.letters)];
      slot = sign > 0 ? slot + t.coeff : slot - t.coeff;
    }
  };
  accumulate(lhs, 1);
  accumulate(rhs, -1);
  std::erase_if(diff, [](const auto& kv) { return kv.second.is_zero(); });
  if (diff.empty()) throw UnsupportedRelation("relation is trivially satisfied (" + label + ")");
  const auto& [lead, lead_coeff] = *diff.rbegin();
  auto letters = lead.letters();
  if (letters.size() != 2) {
    throw UnsupportedRelation("leading word of a relation must have two letters (" + label + ")");
  }
  Symbol h = letters[0];
  Symbol g = letters[1];
  if (!(h > g) && !is_inverse_pair(gens_, h, g)) {
    throw UnsupportedRelation("leading word of a relation must be an out-of-order pair (" + label +
                              ")");
  }
  Rule rule{h, g, {}, label};
  RationalFunction scale_by = -lead_coeff.inverse();
  for (auto it = diff.begin(); it != std::prev(diff.end()); ++it) {
    rule.rhs.terms.push_back({it->second * scale_by, it->first.letters()});
  }
  add_rule(std::move(rule));
}

void Algebra::add_rule(Rule rule) {
  rules_.add(std::move(rule));
  std::lock_guard lock(cache_mutex_);
  cache_.clear();
}

void Algebra::complete_inverse_rules() {
  std::vector<Rule> extra;
  for (auto g : gens_.generators()) {
    if (gens_.is_invertible(g)) {
      for (auto& r : inverse_pair_rules(gens_, g)) extra.push_back(std::move(r));
    }
  }
  for (const auto& rule : rules_.rules()) {
    if (gens_.is_inverse(rule.left) || gens_.is_inverse(rule.right)) continue;
    if (is_inverse_pair(gens_, rule.left, rule.right)) continue;
    if (!gens_.is_invertible(rule.left) && !gens_.is_invertible(rule.right)) continue;
    for (auto& r : derive_inverse_rules(gens_, rule)) extra.push_back(std::move(r));
  }
  for (auto& r : extra) {
    if (!rules_.find(r.left, r.right)) add_rule(std::move(r));
  }
}

std::vector<Symbol> inverse_letters(const GeneratorTable& gens, const std::vector<Symbol>& letters) {
  std::vector<Symbol> out;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    auto inv = gens.inverse_of(*it);
    if (!inv) throw MissingInverse("'" + gens.display_name(*it) + "' has no inverse");
    out.push_back(*inv);
  }
  return out;
}

std::vector<Rule> inverse_pair_rules(const GeneratorTable& gens, Symbol g) {
  auto inv = gens.inverse_of(g);
  if (!inv) throw MissingInverse("'" + gens.display_name(g) + "' is not invertible");
  std::string name = gens.display_name(g);
  return {Rule{g, *inv, {{{RationalFunction(1), {}}}}, name + "*" + name + "^-1 = 1"},
          Rule{*inv, g, {{{RationalFunction(1), {}}}}, name + "^-1*" + name + " = 1"}};
}

std::vector<Rule> derive_inverse_rules(const GeneratorTable& gens, const Rule& base) {
  const auto& terms = base.rhs.terms;
  if (terms.size() != 1 || terms[0].letters.size() != 2 || terms[0].letters[0] != base.right ||
      terms[0].letters[1] != base.left) {
    throw UnsupportedRelation("cannot adjoin inverses across a relation with a tail (" +
                              base.origin + ")");
  }
  const RationalFunction& c = terms[0].coeff;
  // h^a g^b = c^(a*b) g^b h^a for a, b in {+1, -1}.
  std::vector<std::pair<Symbol, int>> hs{{base.left, 1}};
  std::vector<std::pair<Symbol, int>> gs{{base.right, 1}};
  if (auto hi = gens.inverse_of(base.left)) hs.emplace_back(*hi, -1);
  if (auto gi = gens.inverse_of(base.right)) gs.emplace_back(*gi, -1);
  std::vector<Rule> out;
  for (const auto& [h, a] : hs) {
    for (const auto& [g, b] : gs) {
      if (a == 1 && b == 1) continue;
      Rule r{h, g, {{{c.pow(a * b), {g, h}}}},
             "derived from " + base.origin + " for " + gens.display_name(h) + "*" +
                 gens.display_name(g)};
      out.push_back(std::move(r));
    }
  }
  return out;
}

Element Algebra::append_word(const Word& u, Symbol s) const {
  if (u.empty()) return Element(Word::from_letters({s}), RationalFunction(1));
  const Rule* rule = rules_.find(u.last(), s);
  if (!rule) {
    Word w = u;
    w.push_back(s);
    return Element(std::move(w), RationalFunction(1));
  }
  {
    std::lock_guard lock(cache_mutex_);
    auto it = cache_.find({u, s});
    if (it != cache_.end()) return it->second;
  }
  Word prefix = u.without_last();
  Element out;
  for (const auto& t : rule->rhs.terms) {
    Element part(prefix, t.coeff);
    for (auto letter : t.letters) part = append(part, letter);
    out += part;
  }
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(std::make_pair(u, s), out);
  return out;
}

Element Algebra::append(const Element& a, Symbol s) const {
  Element out;
  for (const auto& [w, c] : a.terms()) {
    Element part = append_word(w, s);
    if (part.size() == 1 && part.terms().begin()->second.is_one()) {
      out.add_term(part.terms().begin()->first, c);
    } else {
      out += part.scaled(c);
    }
  }
  return out;
}

Element Algebra::normal_form(const std::vector<Symbol>& letters) const {
  Element e = one();
  for (auto s : letters) e = append(e, s);
  return e;
}

Element Algebra::normal_form(const Combination& expr) const {
  Element out;
  for (const auto& t : expr.terms) out += normal_form(t.letters).scaled(t.coeff);
  return out;
}

Element Algebra::mul(const Element& a, const Element& b) const {
  Element out;
  if (a.is_zero() || b.is_zero()) return out;
  for (const auto& [w, c] : b.terms()) {
    Element part = a;
    for (const auto& [s, k] : w.runs()) {
      for (std::uint32_t i = 0; i < k; ++i) part = append(part, s);
    }
    out += part.scaled(c);
  }
  return out;
}

Element Algebra::pow(const Element& a, unsigned n) const {
  Element r = one();
  for (unsigned i = 0; i < n; ++i) r = mul(r, a);
  return r;
}

// ---------------------------------------------------------------------------
// Confluence

namespace {

Combination rhs_times(const Combination& rhs, const std::vector<Symbol>& prefix,
                      const std::vector<Symbol>& suffix) {
  Combination out;
  for (const auto& t : rhs.terms) {
    std::vector<Symbol> letters = prefix;
    letters.insert(letters.end(), t.letters.begin(), t.letters.end());
    letters.insert(letters.end(), suffix.begin(), suffix.end());
    out.terms.push_back({t.coeff, std::move(letters)});
  }
  return out;
}

}  // namespace

ConfluenceReport check_confluence(const Algebra& algebra) {
  ConfluenceReport report;
  const auto& rules = algebra.rewrite_system().rules();
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      if (rules[i].left != rules[j].left || rules[i].right != rules[j].right) continue;
      ++report.overlaps_checked;
      Element x = algebra.normal_form(rules[i].rhs);
      Element y = algebra.normal_form(rules[j].rhs);
      if (!(x == y)) report.unresolved.push_back({{rules[i].left, rules[i].right}, x, y});
    }
  }
  for (const auto& first : rules) {
    for (const auto& second : rules) {
      if (first.right != second.left) continue;
      ++report.overlaps_checked;
      Element x = algebra.normal_form(rhs_times(first.rhs, {}, {second.right}));
      Element y = algebra.normal_form(rhs_times(second.rhs, {first.left}, {}));
      if (!(x == y)) {
        report.unresolved.push_back({{first.left, first.right, second.right}, x, y});
      }
    }
  }
  return report;
}

std::optional<RationalFunction> commutation_scalar(const Algebra& alg, const Element& x,
                                                   const Element& y) {
  Element xy = alg.mul(x, y);
  Element yx = alg.mul(y, x);
  if (yx.is_zero()) return xy.is_zero() ? std::optional<RationalFunction>(RationalFunction(1))
                                        : std::nullopt;
  const auto& [w, c] = *yx.terms().rbegin();
  RationalFunction lambda = xy.coefficient(w) / c;
  if (xy == yx.scaled(lambda)) return lambda;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Rendering

std::string to_string(const Word& w, const GeneratorTable& gens) {
  std::string out;
  for (const auto& [s, k] : w.runs()) {
    if (!out.empty()) out += "*";
    out += gens.base_name(s);
    long e = gens.is_inverse(s) ? -static_cast<long>(k) : static_cast<long>(k);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

namespace {

std::string word_latex(const Word& w, const GeneratorTable& gens) {
  std::string out;
  for (const auto& [s, k] : w.runs()) {
    if (!out.empty()) out += " ";
    out += gens.base_name(s);
    long e = gens.is_inverse(s) ? -static_cast<long>(k) : static_cast<long>(k);
    if (e != 1) out += "^{" + std::to_string(e) + "}";
  }
  return out;
}

}  // namespace

std::string to_string(const Element& e, const Algebra& alg) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    bool negative = c.sign() < 0;
    RationalFunction mag = negative ? -c : c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string coeff = to_string(mag, alg.parameters());
    if (needs_parentheses(mag)) coeff = "(" + coeff + ")";
    if (w.empty()) {
      out += coeff;
    } else if (mag.is_one()) {
      out += to_string(w, alg.generators());
    } else {
      out += coeff + " * " + to_string(w, alg.generators());
    }
  }
  return out;
}

std::string to_latex(const Element& e, const Algebra& alg) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : e.terms()) {
    bool negative = c.sign() < 0;
    RationalFunction mag = negative ? -c : c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string coeff = to_latex(mag, alg.parameters());
    if (needs_parentheses(mag)) coeff = "\\left(" + coeff + "\\right)";
    if (w.empty()) {
      out += coeff;
    } else if (mag.is_one()) {
      out += word_latex(w, alg.generators());
    } else {
      out += coeff + " \\, " + word_latex(w, alg.generators());
    }
  }
  return out;
}

std::string to_string(const Combination& c, const Algebra& alg) {
  std::string out;
  for (const auto& t : c.terms) {
    if (!out.empty()) out += " + ";
    std::string coeff = to_string(t.coeff, alg.parameters());
    if (needs_parentheses(t.coeff)) coeff = "(" + coeff + ")";
    std::string word;
    for (auto s : t.letters) {
      if (!word.empty()) word += "*";
      word += alg.generators().display_name(s);
    }
    out += word.empty() ? coeff : coeff + "*" + word;
  }
  return out.empty() ? "0" : out;
}

}  // namespace ncdiff

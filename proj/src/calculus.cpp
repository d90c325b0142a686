#include "ncdiff/calculus.hpp"

#include <algorithm>
#include <set>

#include "ncdiff/errors.hpp"
#include "ncdiff/linalg.hpp"
#include "ncdiff/sampling.hpp"

namespace ncdiff {

// ---------------------------------------------------------------------------
// Form

Form::Form(const Element& e) {
  if (!e.is_zero()) terms_.emplace(ThetaWord{}, e);
}

Form::Form(ThetaWord w, const Element& coeff) {
  if (!coeff.is_zero()) terms_.emplace(std::move(w), coeff);
}

Form Form::basis(ThetaIndex s) { return Form(ThetaWord{s}, Element(RationalFunction(1))); }

Form Form::component(std::size_t grade) const {
  Form out;
  for (const auto& [w, c] : terms_) {
    if (w.size() == grade) out.terms_.emplace(w, c);
  }
  return out;
}

std::size_t Form::max_grade() const {
  std::size_t g = 0;
  for (const auto& [w, c] : terms_) g = std::max(g, w.size());
  return g;
}

bool Form::is_homogeneous() const {
  if (terms_.empty()) return true;
  return terms_.begin()->first.size() == terms_.rbegin()->first.size();
}

Element Form::scalar_part() const {
  auto it = terms_.find(ThetaWord{});
  return it == terms_.end() ? Element{} : it->second;
}

void Form::add_term(const ThetaWord& w, const Element& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(w, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Form& Form::operator+=(const Form& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

Form& Form::operator-=(const Form& o) {
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

Form Form::operator+(const Form& o) const {
  Form r = *this;
  r += o;
  return r;
}

Form Form::operator-(const Form& o) const {
  Form r = *this;
  r -= o;
  return r;
}

Form Form::operator-() const {
  Form r;
  for (const auto& [w, c] : terms_) r.terms_.emplace(w, -c);
  return r;
}

Form Form::scaled(const RationalFunction& c) const {
  Form r;
  for (const auto& [w, e] : terms_) r.add_term(w, e.scaled(c));
  return r;
}

Form rf_substitute(const Form& f, const Bindings& bindings) {
  Form r;
  for (const auto& [w, e] : f.terms()) r.add_term(w, rf_substitute(e, bindings));
  return r;
}

// ---------------------------------------------------------------------------
// CalculusSpec

CalculusSpec::CalculusSpec(std::shared_ptr<const Algebra> algebra, std::vector<std::string> labels,
                           std::vector<Endomorphism> twists, std::vector<Element> weights,
                           std::vector<WedgeRule> wedge_rules)
    : alg_(std::move(algebra)),
      labels_(std::move(labels)),
      twists_(std::move(twists)),
      weights_(std::move(weights)),
      rules_(std::move(wedge_rules)) {
  if (twists_.size() != labels_.size() || weights_.size() != labels_.size()) {
    throw Error("calculus needs one twist and one weight per theta label");
  }
  if (labels_.size() > 64) throw Error("too many theta labels");
  inner_weights_ = weights_;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.upper < r.lower) throw Error("wedge rule left-hand side must be out of order");
    for (const auto& t : r.rhs) {
      bool smaller = t.first < r.upper || (t.first == r.upper && t.second < r.lower);
      if (!(t.first < t.second) || !smaller) {
        throw Error("wedge rule for " + labels_.at(r.upper) + "*" + labels_.at(r.lower) +
                    " must rewrite to smaller ascending pairs");
      }
    }
    if (!rule_index_.try_emplace({r.upper, r.lower}, i).second) {
      throw Error("duplicate wedge rule for " + labels_.at(r.upper) + "*" + labels_.at(r.lower));
    }
  }
}

CalculusSpec::CalculusSpec(const CalculusSpec& other)
    : alg_(other.alg_),
      labels_(other.labels_),
      twists_(other.twists_),
      weights_(other.weights_),
      inner_weights_(other.inner_weights_),
      rules_(other.rules_),
      rule_index_(other.rule_index_) {}

CalculusSpec& CalculusSpec::operator=(const CalculusSpec& other) {
  if (this == &other) return *this;
  alg_ = other.alg_;
  labels_ = other.labels_;
  twists_ = other.twists_;
  weights_ = other.weights_;
  inner_weights_ = other.inner_weights_;
  rules_ = other.rules_;
  rule_index_ = other.rule_index_;
  std::lock_guard lock(mutex_);
  pair_cache_.clear();
  twist_cache_.clear();
  completed_ = false;
  derived_.clear();
  return *this;
}

std::optional<ThetaIndex> CalculusSpec::find_label(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<ThetaIndex>(i);
  }
  return std::nullopt;
}

CalculusSpec CalculusSpec::with_inner_weight(ThetaIndex s, const Element& w) const {
  CalculusSpec copy(*this);
  copy.inner_weights_.at(s) = w;
  return copy;
}

CalculusSpec CalculusSpec::with_wedge_rule(const WedgeRule& rule) const {
  std::vector<WedgeRule> rules;
  bool replaced = false;
  for (const auto& r : rules_) {
    if (r.upper == rule.upper && r.lower == rule.lower) {
      rules.push_back(rule);
      replaced = true;
    } else {
      rules.push_back(r);
    }
  }
  if (!replaced) rules.push_back(rule);
  CalculusSpec copy(alg_, labels_, twists_, weights_, rules);
  copy.inner_weights_ = inner_weights_;
  return copy;
}

Endomorphism CalculusSpec::word_twist(const ThetaWord& w) const {
  {
    std::lock_guard lock(mutex_);
    auto it = twist_cache_.find(w);
    if (it != twist_cache_.end()) return it->second;
  }
  Endomorphism acc = Endomorphism::identity(alg_);
  for (auto s : w) acc = compose(acc, twists_.at(s));
  std::lock_guard lock(mutex_);
  twist_cache_.emplace(w, acc);
  return acc;
}

CalculusSpec::Reduced CalculusSpec::reduce_pairs(const std::vector<ThetaIndex>& letters) const {
  {
    std::lock_guard lock(mutex_);
    auto it = pair_cache_.find(letters);
    if (it != pair_cache_.end()) return it->second;
  }
  Reduced out;
  std::size_t i = 0;
  while (i + 1 < letters.size() && letters[i] < letters[i + 1]) ++i;
  if (i + 1 >= letters.size()) {
    out.emplace(letters, RationalFunction(1));
  } else {
    auto it = rule_index_.find({letters[i], letters[i + 1]});
    if (it == rule_index_.end()) {
      throw MissingThetaRule("no wedge rule for " + labels_.at(letters[i]) + "*" +
                             labels_.at(letters[i + 1]));
    }
    for (const auto& t : rules_[it->second].rhs) {
      std::vector<ThetaIndex> next(letters.begin(), letters.begin() + static_cast<long>(i));
      next.push_back(t.first);
      next.push_back(t.second);
      next.insert(next.end(), letters.begin() + static_cast<long>(i) + 2, letters.end());
      for (const auto& [w, c] : reduce_pairs(next)) {
        auto& slot = out[w];
        slot += c * t.coeff;
      }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  }
  std::lock_guard lock(mutex_);
  pair_cache_.emplace(letters, out);
  return out;
}

namespace {

void ascending_words(std::size_t n, std::size_t k, ThetaIndex start, ThetaWord& cur,
                     std::vector<ThetaWord>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (auto s = start; s < n; ++s) {
    cur.push_back(s);
    ascending_words(n, k, static_cast<ThetaIndex>(s + 1), cur, out);
    cur.pop_back();
  }
}

void all_sequences(std::size_t n, std::size_t k, std::vector<ThetaIndex>& cur,
                   std::vector<std::vector<ThetaIndex>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t s = 0; s < n; ++s) {
    cur.push_back(static_cast<ThetaIndex>(s));
    all_sequences(n, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

void CalculusSpec::ensure_completed() const {
  {
    std::lock_guard lock(mutex_);
    if (completed_) return;
  }
  // The degree-k part of the ideal generated by the quadratic rules is
  // spanned by u (lhs - rhs) v; its image under pair reduction gives every
  // linear relation among ascending monomials of degree k.
  std::vector<DerivedThetaRelation> derived;
  const std::size_t n = labels_.size();
  for (std::size_t k = 3; k <= n; ++k) {
    std::vector<ThetaWord> basis;
    ThetaWord cur;
    ascending_words(n, k, 0, cur, basis);
    std::map<ThetaWord, std::size_t> column;
    for (std::size_t i = 0; i < basis.size(); ++i) column[basis[i]] = i;
    Matrix rows;
    for (std::size_t left = 0; left + 2 <= k; ++left) {
      std::size_t right = k - 2 - left;
      std::vector<std::vector<ThetaIndex>> us;
      std::vector<std::vector<ThetaIndex>> vs;
      std::vector<ThetaIndex> tmp;
      all_sequences(n, left, tmp, us);
      all_sequences(n, right, tmp, vs);
      for (const auto& rule : rules_) {
        for (const auto& u : us) {
          for (const auto& v : vs) {
            Row row(basis.size());
            auto accumulate = [&](std::vector<ThetaIndex> middle, const RationalFunction& c) {
              std::vector<ThetaIndex> seq = u;
              seq.insert(seq.end(), middle.begin(), middle.end());
              seq.insert(seq.end(), v.begin(), v.end());
              for (const auto& [w, x] : reduce_pairs(seq)) row[column.at(w)] += x * c;
            };
            accumulate({rule.upper, rule.lower}, RationalFunction(1));
            for (const auto& t : rule.rhs) accumulate({t.first, t.second}, -t.coeff);
            if (std::any_of(row.begin(), row.end(), [](const auto& x) { return !x.is_zero(); })) {
              rows.push_back(std::move(row));
            }
          }
        }
      }
    }
    for (const auto& row : echelon_from_top(rows)) {
      std::size_t pivot = row.size();
      while (pivot > 0 && row[pivot - 1].is_zero()) --pivot;
      DerivedThetaRelation rel;
      rel.pivot = basis[pivot - 1];
      for (std::size_t j = 0; j + 1 < pivot; ++j) {
        if (!row[j].is_zero()) rel.rhs.emplace_back(-row[j], basis[j]);
      }
      derived.push_back(std::move(rel));
    }
  }
  std::lock_guard lock(mutex_);
  if (!completed_) {
    derived_ = std::move(derived);
    completed_ = true;
  }
}

const std::vector<CalculusSpec::DerivedThetaRelation>& CalculusSpec::derived_theta_relations()
    const {
  ensure_completed();
  return derived_;
}

std::vector<std::pair<RationalFunction, ThetaWord>> CalculusSpec::theta_normal_form(
    const std::vector<ThetaIndex>& letters) const {
  Reduced reduced = reduce_pairs(letters);
  if (letters.size() >= 3) {
    ensure_completed();
    for (const auto& rel : derived_) {
      auto it = reduced.find(rel.pivot);
      if (it == reduced.end()) continue;
      RationalFunction c = it->second;
      reduced.erase(it);
      for (const auto& [k, w] : rel.rhs) {
        auto& slot = reduced[w];
        slot += c * k;
      }
    }
    std::erase_if(reduced, [](const auto& kv) { return kv.second.is_zero(); });
  }
  std::vector<std::pair<RationalFunction, ThetaWord>> out;
  for (auto& [w, c] : reduced) out.emplace_back(c, w);
  return out;
}

std::vector<std::string> CalculusSpec::validation_problems() const {
  std::vector<std::string> problems;
  for (const auto& phi : twists_) {
    if (!verify_respects_relations(phi)) {
      problems.push_back("twist " + phi.name() + " does not respect the defining relations");
    }
  }
  for (std::size_t a = 0; a < labels_.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      if (!rule_index_.count({static_cast<ThetaIndex>(a), static_cast<ThetaIndex>(b)})) {
        problems.push_back("missing wedge rule for " + labels_[a] + "*" + labels_[b]);
      }
    }
  }
  for (const auto& r : rules_) {
    Endomorphism lhs = word_twist({r.upper, r.lower});
    for (const auto& t : r.rhs) {
      if (!lhs.same_images(word_twist({t.first, t.second}))) {
        problems.push_back("wedge rule for " + labels_[r.upper] + "*" + labels_[r.lower] +
                           " mixes monomials with different twists");
      }
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Operations

Form wedge(const CalculusSpec& spec, const Form& a, const Form& b) {
  const Algebra& alg = spec.algebra();
  Form out;
  for (const auto& [wa, ca] : a.terms()) {
    Endomorphism twist = spec.word_twist(wa);
    for (const auto& [wb, cb] : b.terms()) {
      Element coeff = alg.mul(ca, wa.empty() ? cb : twist.apply(cb));
      if (coeff.is_zero()) continue;
      if (wb.empty()) {
        out.add_term(wa, coeff);
        continue;
      }
      std::vector<ThetaIndex> letters = wa;
      letters.insert(letters.end(), wb.begin(), wb.end());
      for (const auto& [c, w] : spec.theta_normal_form(letters)) out.add_term(w, coeff.scaled(c));
    }
  }
  return out;
}

Form left_multiply(const CalculusSpec& spec, const Element& a, const Form& omega) {
  Form out;
  for (const auto& [w, c] : omega.terms()) out.add_term(w, spec.algebra().mul(a, c));
  return out;
}

Form d_zero(const CalculusSpec& spec, const Element& a) {
  Form out;
  for (std::size_t s = 0; s < spec.size(); ++s) {
    auto idx = static_cast<ThetaIndex>(s);
    out.add_term({idx}, derive_apply(spec.derivation(idx), a));
  }
  return out;
}

Form mc_form(const CalculusSpec& spec) {
  Form out;
  for (std::size_t s = 0; s < spec.size(); ++s) {
    auto idx = static_cast<ThetaIndex>(s);
    out.add_term({idx}, spec.inner_weight(idx));
  }
  return out;
}

Form d_form(const CalculusSpec& spec, const Form& omega) {
  Form theta = mc_form(spec);
  Form out;
  for (std::size_t k = 0; k <= omega.max_grade(); ++k) {
    Form part = omega.component(k);
    if (part.is_zero()) continue;
    Form left = wedge(spec, theta, part);
    Form right = wedge(spec, part, theta);
    out += k % 2 == 0 ? left - right : left + right;
  }
  return out;
}

Verdict verify_theta_passing(const CalculusSpec& spec) {
  const Algebra& alg = spec.algebra();
  for (std::size_t s = 0; s < spec.size(); ++s) {
    auto idx = static_cast<ThetaIndex>(s);
    for (std::size_t g = 0; g < alg.generators().size(); ++g) {
      Element x = alg.letter(static_cast<Symbol>(g));
      Form lhs = wedge(spec, Form::basis(idx), x);
      Form rhs = Form({idx}, spec.twist(idx).apply(x));
      if (!(lhs == rhs)) {
        return {false, spec.labels()[s] + "*" + alg.generators().display_name(static_cast<Symbol>(g)) +
                           " = " + to_string(lhs, spec) + ", expected " + to_string(rhs, spec)};
      }
    }
  }
  return {};
}

Verdict verify_inner(const CalculusSpec& spec, std::mt19937_64& rng, std::size_t samples) {
  const Algebra& alg = spec.algebra();
  Form theta = mc_form(spec);
  auto check = [&](const Element& x, const std::string& what) -> Verdict {
    Form lhs = d_zero(spec, x);
    Form rhs = wedge(spec, theta, x) - wedge(spec, x, theta);
    if (lhs == rhs) return {};
    return {false, "d(" + what + ") = " + to_string(lhs, spec) + " but [vartheta, " + what +
                       "] = " + to_string(rhs, spec)};
  };
  for (std::size_t g = 0; g < alg.generators().size(); ++g) {
    auto s = static_cast<Symbol>(g);
    if (auto v = check(alg.letter(s), alg.generators().display_name(s)); !v) return v;
  }
  auto pool = default_coefficient_pool(alg.parameters());
  for (std::size_t i = 0; i < samples; ++i) {
    Element x = random_element(alg, rng, pool);
    if (auto v = check(x, to_string(x, alg)); !v) return v;
  }
  return {};
}

Verdict verify_d_squared(const CalculusSpec& spec) {
  const Algebra& alg = spec.algebra();
  Form theta = mc_form(spec);
  Form square = wedge(spec, theta, theta);
  auto check = [&](const Form& x, const std::string& what) -> Verdict {
    Form lhs = wedge(spec, square, x);
    Form rhs = wedge(spec, x, square);
    if (lhs == rhs) return {};
    return {false, "vartheta^2 does not commute with " + what + ": difference " +
                       to_string(lhs - rhs, spec)};
  };
  for (std::size_t g = 0; g < alg.generators().size(); ++g) {
    auto s = static_cast<Symbol>(g);
    if (auto v = check(alg.letter(s), alg.generators().display_name(s)); !v) return v;
  }
  for (std::size_t s = 0; s < spec.size(); ++s) {
    if (auto v = check(Form::basis(static_cast<ThetaIndex>(s)), spec.labels()[s]); !v) return v;
  }
  return {};
}

std::vector<DerivedRelation> commutation_relations(const CalculusSpec& spec,
                                                   const std::vector<NamedForm>& forms,
                                                   const std::vector<NamedElement>& elements,
                                                   RelationSide side) {
  auto product = [&](const Form& omega, const Element& e) {
    return side == RelationSide::ElementLeft ? wedge(spec, omega, e) : wedge(spec, e, omega);
  };
  // Candidate products in the opposite order.
  std::vector<Form> candidates;
  std::vector<std::pair<std::size_t, std::size_t>> labels;
  for (std::size_t f = 0; f < forms.size(); ++f) {
    for (std::size_t e = 0; e < elements.size(); ++e) {
      candidates.push_back(product(forms[f].second, elements[e].second));
      labels.emplace_back(f, e);
    }
  }
  std::vector<DerivedRelation> out;
  for (const auto& [ename, element] : elements) {
    for (const auto& [fname, form] : forms) {
      Form target = side == RelationSide::ElementLeft ? wedge(spec, element, form)
                                                      : wedge(spec, form, element);
      auto key_less = [](const std::pair<ThetaWord, Word>& x, const std::pair<ThetaWord, Word>& y) {
        if (x.first != y.first) return ThetaLess{}(x.first, y.first);
        return WordLess{}(x.second, y.second);
      };
      std::map<std::pair<ThetaWord, Word>, std::size_t, decltype(key_less)> index(key_less);
      auto key_of = [&](const Form& f) {
        for (const auto& [tw, el] : f.terms()) {
          for (const auto& [w, c] : el.terms()) index.try_emplace({tw, w}, index.size());
        }
      };
      key_of(target);
      for (const auto& c : candidates) key_of(c);
      Matrix a(index.size(), Row(candidates.size()));
      Row b(index.size());
      for (std::size_t j = 0; j < candidates.size(); ++j) {
        for (const auto& [tw, el] : candidates[j].terms()) {
          for (const auto& [w, c] : el.terms()) a[index.at({tw, w})][j] = c;
        }
      }
      for (const auto& [tw, el] : target.terms()) {
        for (const auto& [w, c] : el.terms()) b[index.at({tw, w})] = c;
      }
      auto x = solve_linear(a, b);
      std::string shown = side == RelationSide::ElementLeft ? ename + "*" + fname : fname + "*" + ename;
      if (!x) {
        throw InexpressibleRelation(shown + " is not a scalar combination of the given products");
      }
      Form check;
      DerivedRelation rel{ename, fname, side, {}};
      for (std::size_t j = 0; j < candidates.size(); ++j) {
        if ((*x)[j].is_zero()) continue;
        check += candidates[j].scaled((*x)[j]);
        rel.terms.push_back({(*x)[j], forms[labels[j].first].first, elements[labels[j].second].first});
      }
      if (!(check == target)) throw InexpressibleRelation(shown + ": solution failed to verify");
      out.push_back(std::move(rel));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::vector<std::pair<RationalFunction, std::string>> form_terms(const Form& f,
                                                                 const CalculusSpec& spec,
                                                                 bool latex) {
  const Algebra& alg = spec.algebra();
  std::vector<std::pair<RationalFunction, std::string>> terms;
  for (const auto& [tw, el] : f.terms()) {
    std::string thetas;
    for (auto s : tw) {
      if (!thetas.empty()) thetas += latex ? " " : "*";
      thetas += latex ? "\\theta^{" + spec.labels()[s] + "}" : spec.labels()[s];
    }
    for (const auto& [w, c] : el.terms()) {
      std::string text = latex ? std::string() : to_string(w, alg.generators());
      if (latex) {
        for (const auto& [sym, k] : w.runs()) {
          if (!text.empty()) text += " ";
          text += alg.generators().base_name(sym);
          long e = alg.generators().is_inverse(sym) ? -static_cast<long>(k) : static_cast<long>(k);
          if (e != 1) text += "^{" + std::to_string(e) + "}";
        }
      }
      if (!thetas.empty()) text += text.empty() ? thetas : (latex ? " " : "*") + thetas;
      terms.emplace_back(c, text);
    }
  }
  return terms;
}

std::string relation_text(const DerivedRelation& r, const ParameterSet& params, bool latex) {
  const char* times = latex ? " " : "*";
  std::string lhs = r.side == RelationSide::ElementLeft ? r.element + times + r.form
                                                        : r.form + times + r.element;
  std::vector<std::pair<RationalFunction, std::string>> terms;
  for (const auto& t : r.terms) {
    terms.emplace_back(t.coeff, r.side == RelationSide::ElementLeft ? t.form + times + t.element
                                                                    : t.element + times + t.form);
  }
  return lhs + " = " + render_linear(terms, params, latex);
}

}  // namespace

std::string to_string(const Form& f, const CalculusSpec& spec) {
  return render_linear(form_terms(f, spec, false), spec.algebra().parameters());
}

std::string to_latex(const Form& f, const CalculusSpec& spec) {
  return render_linear(form_terms(f, spec, true), spec.algebra().parameters(), true);
}

std::string to_string(const DerivedRelation& r, const ParameterSet& params) {
  return relation_text(r, params, false);
}

std::string to_latex(const DerivedRelation& r, const ParameterSet& params) {
  return relation_text(r, params, true);
}

}  // namespace ncdiff

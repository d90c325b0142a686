#include "ncdiff/model.hpp"

#include <functional>
#include <set>

#include "ncdiff/errors.hpp"

namespace ncdiff {

namespace {

[[noreturn]] void fail_at(const SourceLoc& loc, const std::string& msg, const std::string& token = {}) {
  throw ModelError(msg, loc.line, loc.column, token);
}

struct FreeTerm {
  RationalFunction coeff;
  std::vector<std::string> letters;
};
using FreeSum = std::vector<FreeTerm>;

// Expands an expression into scalar multiples of letter strings without any
// rewriting; identifiers accepted by `is_letter` are letters, everything
// else must evaluate to a scalar.
FreeSum free_eval(const Expr& e, const ModelBundle& bundle,
                  const std::function<bool(const std::string&)>& is_letter) {
  auto scalar_of = [](const FreeSum& s) -> std::optional<RationalFunction> {
    RationalFunction c;
    for (const auto& t : s) {
      if (!t.letters.empty()) return std::nullopt;
      c += t.coeff;
    }
    return c;
  };
  switch (e.kind) {
    case Expr::Kind::Number:
      return {{RationalFunction(Rational(e.text)), {}}};
    case Expr::Kind::Ident: {
      if (is_letter(e.text)) return {{RationalFunction(1), {e.text}}};
      Value v = bundle.evaluate(e);
      if (v.level != Value::Level::Scalar) fail_at(e.loc, "expected a scalar or a declared letter", e.text);
      auto c = v.element().as_scalar();
      return {{c ? *c : RationalFunction(), {}}};
    }
    case Expr::Kind::Neg: {
      FreeSum s = free_eval(e.args[0], bundle, is_letter);
      for (auto& t : s) t.coeff = -t.coeff;
      return s;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      FreeSum a = free_eval(e.args[0], bundle, is_letter);
      FreeSum b = free_eval(e.args[1], bundle, is_letter);
      for (auto& t : b) {
        if (e.kind == Expr::Kind::Sub) t.coeff = -t.coeff;
        a.push_back(std::move(t));
      }
      return a;
    }
    case Expr::Kind::Mul: {
      FreeSum a = free_eval(e.args[0], bundle, is_letter);
      FreeSum b = free_eval(e.args[1], bundle, is_letter);
      FreeSum out;
      for (const auto& x : a) {
        for (const auto& y : b) {
          FreeTerm t{x.coeff * y.coeff, x.letters};
          t.letters.insert(t.letters.end(), y.letters.begin(), y.letters.end());
          out.push_back(std::move(t));
        }
      }
      return out;
    }
    case Expr::Kind::Div: {
      FreeSum a = free_eval(e.args[0], bundle, is_letter);
      auto c = scalar_of(free_eval(e.args[1], bundle, is_letter));
      if (!c) fail_at(e.loc, "division by a non-scalar", "/");
      if (c->is_zero()) fail_at(e.loc, "division by zero", "/");
      RationalFunction inv = c->inverse();
      for (auto& t : a) t.coeff *= inv;
      return a;
    }
    case Expr::Kind::Pow: {
      FreeSum base = free_eval(e.args[0], bundle, is_letter);
      if (auto c = scalar_of(base)) {
        if (c->is_zero() && e.exponent < 0) fail_at(e.loc, "division by zero", "^");
        return {{c->pow(static_cast<int>(e.exponent)), {}}};
      }
      if (e.exponent < 0) {
        if (base.size() != 1 || base[0].letters.size() != 1) {
          fail_at(e.loc, "negative powers apply to single letters only", "^");
        }
        FreeTerm t{base[0].coeff.pow(static_cast<int>(e.exponent)), {}};
        for (long k = 0; k < -e.exponent; ++k) t.letters.push_back(base[0].letters[0] + "^-1");
        return {t};
      }
      FreeSum out{{RationalFunction(1), {}}};
      for (long k = 0; k < e.exponent; ++k) {
        FreeSum next;
        for (const auto& x : out) {
          for (const auto& y : base) {
            FreeTerm t{x.coeff * y.coeff, x.letters};
            t.letters.insert(t.letters.end(), y.letters.begin(), y.letters.end());
            next.push_back(std::move(t));
          }
        }
        out = std::move(next);
      }
      return out;
    }
    case Expr::Kind::Call:
      fail_at(e.loc, "function calls are not allowed here", e.text);
  }
  return {};
}

Combination to_combination(const FreeSum& s, const GeneratorTable& gens, const SourceLoc& loc) {
  Combination c;
  for (const auto& t : s) {
    Combination::Term term{t.coeff, {}};
    for (const auto& l : t.letters) {
      bool inverse = l.size() > 3 && l.ends_with("^-1");
      std::string base = inverse ? l.substr(0, l.size() - 3) : l;
      auto sym = gens.find(base);
      if (!sym) fail_at(loc, "unknown generator", base);
      if (inverse) {
        auto inv = gens.inverse_of(*sym);
        if (!inv) fail_at(loc, "generator is not invertible", base);
        sym = inv;
      }
      term.letters.push_back(*sym);
    }
    c.terms.push_back(std::move(term));
  }
  return c;
}

std::string echo(const Equation& eq) { return to_string(eq.lhs) + " = " + to_string(eq.rhs); }

}  // namespace

const Endomorphism* ModelBundle::find_automorphism(const std::string& name) const {
  for (const auto& a : automorphisms) {
    if (a.name() == name) return &a;
  }
  return nullptr;
}

const FormExtension* ModelBundle::find_extension(const std::string& automorphism) const {
  for (const auto& e : extensions) {
    if (e.base.name() == automorphism) return &e;
  }
  return nullptr;
}

namespace {

Value level_max(Value::Level a, Value::Level b, Form f) {
  return {std::max(a, b), std::move(f)};
}

Value eval(const ModelBundle& b, const Expr& e) {
  using L = Value::Level;
  auto need_calculus = [&]() -> const CalculusSpec& {
    if (!b.calculus) fail_at(e.loc, "forms need a calc block", e.text);
    return *b.calculus;
  };
  auto need_algebra = [&]() -> const Algebra& {
    if (!b.algebra) fail_at(e.loc, "generators are not available here", e.text);
    return *b.algebra;
  };
  switch (e.kind) {
    case Expr::Kind::Number:
      return {L::Scalar, Form(Element(RationalFunction(Rational(e.text))))};
    case Expr::Kind::Ident: {
      const std::string& n = e.text;
      if (auto idx = b.parameters.find(n)) {
        auto key = static_cast<std::uint32_t>(*idx);
        auto it = b.substitutions.find(key);
        return {L::Scalar, Form(Element(it != b.substitutions.end() ? it->second
                                                                    : RationalFunction::parameter(key)))};
      }
      if (b.algebra) {
        if (auto sym = b.algebra->generators().find(n)) {
          return {L::Element, Form(b.algebra->letter(*sym))};
        }
      }
      for (const auto& [name, el] : b.elements) {
        if (name == n) return {L::Element, Form(el)};
      }
      for (const auto& [name, f] : b.forms) {
        if (name == n) return {L::Form, f};
      }
      if (b.calculus) {
        if (auto s = b.calculus->find_label(n)) return {L::Form, Form::basis(*s)};
        if (n == "vartheta") return {L::Form, mc_form(*b.calculus)};
      }
      fail_at(e.loc, "unknown symbol", n);
    }
    case Expr::Kind::Neg: {
      Value v = eval(b, e.args[0]);
      return {v.level, -v.form};
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      Value x = eval(b, e.args[0]);
      Value y = eval(b, e.args[1]);
      return level_max(x.level, y.level, e.kind == Expr::Kind::Add ? x.form + y.form : x.form - y.form);
    }
    case Expr::Kind::Mul: {
      Value x = eval(b, e.args[0]);
      Value y = eval(b, e.args[1]);
      if (x.level == L::Scalar || y.level == L::Scalar) {
        const Value& s = x.level == L::Scalar ? x : y;
        const Value& o = x.level == L::Scalar ? y : x;
        auto c = s.element().as_scalar();
        return {o.level, c ? o.form.scaled(*c) : Form()};
      }
      if (x.level == L::Element && y.level == L::Element) {
        return {L::Element, Form(need_algebra().mul(x.element(), y.element()))};
      }
      return {L::Form, wedge(need_calculus(), x.form, y.form)};
    }
    case Expr::Kind::Div: {
      Value x = eval(b, e.args[0]);
      Value y = eval(b, e.args[1]);
      if (y.level != L::Scalar) fail_at(e.loc, "division by a non-scalar", "/");
      auto c = y.element().as_scalar();
      if (!c || c->is_zero()) fail_at(e.loc, "division by zero", "/");
      return {x.level, x.form.scaled(c->inverse())};
    }
    case Expr::Kind::Pow: {
      Value x = eval(b, e.args[0]);
      long n = e.exponent;
      if (x.level == L::Scalar) {
        auto c = x.element().as_scalar();
        RationalFunction v = c ? *c : RationalFunction();
        if (v.is_zero() && n < 0) fail_at(e.loc, "division by zero", "^");
        return {L::Scalar, Form(Element(v.pow(static_cast<int>(n))))};
      }
      if (x.level == L::Element) {
        const Algebra& alg = need_algebra();
        Element base = x.element();
        if (n < 0) {
          if (base.size() != 1) fail_at(e.loc, "only monomials can be inverted", "^");
          const auto& [w, c] = *base.terms().begin();
          try {
            base = alg.normal_form(inverse_letters(alg.generators(), w.letters())).scaled(c.inverse());
          } catch (const MissingInverse& err) {
            fail_at(e.loc, err.what(), "^");
          }
          n = -n;
        }
        return {L::Element, Form(alg.pow(base, static_cast<unsigned>(n)))};
      }
      if (n < 0) fail_at(e.loc, "forms cannot be inverted", "^");
      Form acc(Element(RationalFunction(1)));
      for (long k = 0; k < n; ++k) acc = wedge(need_calculus(), acc, x.form);
      return {L::Form, acc};
    }
    case Expr::Kind::Call: {
      Value x = eval(b, e.args[0]);
      if (e.text == "d") {
        const CalculusSpec& spec = need_calculus();
        if (x.level == L::Scalar) return {L::Form, Form()};
        if (x.level == L::Element) return {L::Form, d_zero(spec, x.element())};
        return {L::Form, d_form(spec, x.form)};
      }
      if (const Endomorphism* phi = b.find_automorphism(e.text)) {
        if (x.level != L::Form) return {x.level, Form(phi->apply(x.element()))};
        const FormExtension* ext = b.find_extension(e.text);
        if (!ext) fail_at(e.loc, "automorphism has no action on forms", e.text);
        return {L::Form, ext->apply(need_calculus(), x.form)};
      }
      fail_at(e.loc, "unknown function", e.text);
    }
  }
  return {};
}

}  // namespace

Value ModelBundle::evaluate(const Expr& e) const {
  try {
    return eval(*this, e);
  } catch (const ModelError&) {
    throw;
  } catch (const Error& err) {
    throw ModelError(err.what(), e.loc.line, e.loc.column);
  }
}

Element ModelBundle::evaluate_element(const Expr& e) const {
  Value v = evaluate(e);
  if (v.level == Value::Level::Form) fail_at(e.loc, "expected an algebra element, got a form");
  return v.element();
}

Form ModelBundle::evaluate_form(const Expr& e) const { return evaluate(e).form; }

std::string render(const Value& v, const ModelBundle& bundle, bool latex) {
  switch (v.level) {
    case Value::Level::Scalar: {
      auto c = v.element().as_scalar();
      RationalFunction x = c ? *c : RationalFunction();
      return latex ? to_latex(x, bundle.parameters) : to_string(x, bundle.parameters);
    }
    case Value::Level::Element:
      return latex ? to_latex(v.element(), *bundle.algebra) : to_string(v.element(), *bundle.algebra);
    case Value::Level::Form:
      return latex ? to_latex(v.form, *bundle.calculus) : to_string(v.form, *bundle.calculus);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Builder

namespace {

class Builder {
public:
  Builder(const ModelDocument& doc, const BuildOptions& opt) : doc_(doc), opt_(opt) {
    b_.document = doc;
  }

  ModelBundle run() {
    parameters();
    algebra();
    automorphisms();
    elements();
    calculus();
    forms();
    extensions();
    tensors();
    checks();
    return std::move(b_);
  }

private:
  void claim(const std::string& name, const SourceLoc& loc, const char* what) {
    if (name == "vartheta") fail_at(loc, std::string("reserved name used as ") + what, name);
    if (!names_.insert(name).second) fail_at(loc, std::string("duplicate ") + what, name);
  }

  static SourceLoc loc_of(const std::vector<SourceLoc>& locs, std::size_t i) {
    return i < locs.size() ? locs[i] : SourceLoc{};
  }

  void problem(const SourceLoc& loc, const std::string& msg) {
    if (opt_.strict) fail_at(loc, msg);
    b_.problems.push_back(msg);
  }

  void parameters() {
    for (std::size_t i = 0; i < doc_.parameters.size(); ++i) {
      const auto& p = doc_.parameters[i];
      claim(p, loc_of(doc_.name_locs.parameters, i), "parameter");
      b_.parameters.add(p);
    }
    for (const auto& s : doc_.substitutions) {
      auto idx = b_.parameters.find(s.name);
      if (!idx) fail_at(s.loc, "substitution for an undeclared parameter", s.name);
      Value v = b_.evaluate(s.value);
      if (v.level != Value::Level::Scalar) fail_at(s.loc, "substitution must be a scalar", s.name);
      auto key = static_cast<std::uint32_t>(*idx);
      if (b_.substitutions.count(key)) fail_at(s.loc, "duplicate substitution", s.name);
      auto c = v.element().as_scalar();
      b_.substitutions[key] = c ? *c : RationalFunction();
    }
  }

  void algebra() {
    for (std::size_t i = 0; i < doc_.generators.size(); ++i) {
      claim(doc_.generators[i], loc_of(doc_.name_locs.generators, i), "generator");
    }
    std::set<std::string> gens(doc_.generators.begin(), doc_.generators.end());
    for (std::size_t i = 0; i < doc_.invertible.size(); ++i) {
      const auto& g = doc_.invertible[i];
      if (!gens.count(g)) fail_at(loc_of(doc_.name_locs.invertible, i), "invertible name is not a generator", g);
    }
    auto alg = std::make_shared<Algebra>(b_.parameters, GeneratorTable(doc_.generators, doc_.invertible));
    b_.algebra = alg;
    auto is_gen = [&](const std::string& n) { return gens.count(n) > 0; };
    for (const auto& r : doc_.relations) {
      Combination lhs = to_combination(free_eval(r.lhs, b_, is_gen), alg->generators(), r.loc);
      Combination rhs = to_combination(free_eval(r.rhs, b_, is_gen), alg->generators(), r.loc);
      try {
        alg->add_relation(lhs, rhs, echo(r));
      } catch (const Error& err) {
        fail_at(r.loc, err.what());
      }
    }
    try {
      alg->complete_inverse_rules();
    } catch (const Error& err) {
      fail_at({}, err.what());
    }
  }

  void automorphisms() {
    const Algebra& alg = *b_.algebra;
    for (const auto& a : doc_.automorphisms) {
      claim(a.name, a.loc, "automorphism");
      std::map<Symbol, Element> images;
      for (const auto& img : a.images) {
        auto sym = alg.generators().find(img.name);
        if (!sym || alg.generators().is_inverse(*sym)) fail_at(img.loc, "unknown generator", img.name);
        if (images.count(*sym)) fail_at(img.loc, "duplicate image", img.name);
        images[*sym] = b_.evaluate_element(img.value);
      }
      Endomorphism phi;
      try {
        phi = Endomorphism::from_images(b_.algebra, a.name, images);
      } catch (const Error& err) {
        fail_at(a.loc, err.what(), a.name);
      }
      for (const auto& rel : alg.relations()) {
        if (!(phi.apply(rel.lhs) == phi.apply(rel.rhs))) {
          problem(a.loc, "automorphism " + a.name + " does not respect relation " + rel.label);
        }
      }
      b_.automorphisms.push_back(std::move(phi));
    }
  }

  void elements() {
    for (const auto& e : doc_.elements) {
      claim(e.name, e.loc, "element");
      b_.elements.emplace_back(e.name, b_.evaluate_element(e.value));
    }
  }

  void calculus() {
    const CalculusDecl& c = doc_.calculus;
    if (!c.present) return;
    if (c.labels.empty()) fail_at(c.loc, "calc block declares no theta labels");
    if (c.labels.size() > 64) fail_at(c.loc, "too many theta labels");
    std::map<std::string, ThetaIndex> label_index;
    for (const auto& l : c.labels) {
      claim(l, c.loc, "theta label");
      label_index[l] = static_cast<ThetaIndex>(label_index.size());
    }
    std::vector<std::optional<Endomorphism>> twists(c.labels.size());
    for (const auto& [label, phi] : c.twists) {
      auto it = label_index.find(label);
      if (it == label_index.end()) fail_at(c.loc, "twist for an unknown theta label", label);
      const Endomorphism* a = b_.find_automorphism(phi);
      if (!a) fail_at(c.loc, "unknown automorphism", phi);
      if (twists[it->second]) fail_at(c.loc, "duplicate twist", label);
      twists[it->second] = *a;
    }
    std::vector<Endomorphism> tw;
    for (std::size_t s = 0; s < twists.size(); ++s) {
      if (!twists[s]) fail_at(c.loc, "missing twist", c.labels[s]);
      tw.push_back(*twists[s]);
    }
    std::vector<std::optional<Element>> weights(c.labels.size());
    for (const auto& w : c.weights) {
      auto it = label_index.find(w.name);
      if (it == label_index.end()) fail_at(w.loc, "weight for an unknown theta label", w.name);
      if (weights[it->second]) fail_at(w.loc, "duplicate weight", w.name);
      weights[it->second] = b_.evaluate_element(w.value);
    }
    std::vector<Element> ws;
    for (auto& w : weights) ws.push_back(w ? *w : b_.algebra->one());

    auto is_label = [&](const std::string& n) { return label_index.count(n) > 0; };
    std::vector<WedgeRule> rules;
    for (const auto& w : c.wedges) {
      FreeSum lhs = free_eval(w.lhs, b_, is_label);
      if (lhs.size() != 1 || lhs[0].letters.size() != 2 || !lhs[0].coeff.is_one()) {
        fail_at(w.loc, "wedge rule must rewrite a product of two theta labels: " + echo(w));
      }
      WedgeRule rule;
      rule.upper = label_index.at(lhs[0].letters[0]);
      rule.lower = label_index.at(lhs[0].letters[1]);
      if (rule.upper < rule.lower) {
        fail_at(w.loc, "wedge rule must rewrite an out-of-order pair: " + echo(w));
      }
      std::map<std::pair<ThetaIndex, ThetaIndex>, RationalFunction> rhs;
      for (const auto& t : free_eval(w.rhs, b_, is_label)) {
        if (t.coeff.is_zero()) continue;
        if (t.letters.size() != 2) fail_at(w.loc, "wedge rule right-hand side must be quadratic: " + echo(w));
        ThetaIndex i = label_index.at(t.letters[0]);
        ThetaIndex j = label_index.at(t.letters[1]);
        bool smaller = i < rule.upper || (i == rule.upper && j < rule.lower);
        if (!(i < j) || !smaller) {
          fail_at(w.loc, "wedge rule right-hand side must use smaller ascending pairs: " + echo(w));
        }
        rhs[{i, j}] += t.coeff;
      }
      for (const auto& [k, v] : rhs) {
        if (!v.is_zero()) rule.rhs.push_back({v, k.first, k.second});
      }
      for (const auto& r : rules) {
        if (r.upper == rule.upper && r.lower == rule.lower) {
          fail_at(w.loc, "duplicate wedge rule: " + echo(w));
        }
      }
      rules.push_back(std::move(rule));
    }
    try {
      b_.calculus.emplace(b_.algebra, c.labels, tw, ws, rules);
    } catch (const ModelError&) {
      throw;
    } catch (const Error& err) {
      fail_at(c.loc, err.what());
    }
    for (const auto& p : b_.calculus->validation_problems()) problem(c.loc, p);
  }

  void forms() {
    for (const auto& f : doc_.forms) {
      claim(f.name, f.loc, "form");
      if (!b_.calculus) fail_at(f.loc, "forms need a calc block", f.name);
      b_.forms.emplace_back(f.name, b_.evaluate_form(f.value));
    }
  }

  void extensions() {
    if (doc_.extensions.empty()) return;
    if (!b_.calculus) fail_at(doc_.extensions.front().loc, "extend needs a calc block");
    const CalculusSpec& spec = *b_.calculus;
    auto is_label = [&](const std::string& n) { return spec.find_label(n).has_value(); };
    for (const auto& e : doc_.extensions) {
      const Endomorphism* phi = b_.find_automorphism(e.automorphism);
      if (!phi) fail_at(e.loc, "unknown automorphism", e.automorphism);
      if (b_.find_extension(e.automorphism)) fail_at(e.loc, "duplicate extension", e.automorphism);
      Matrix m = identity_matrix(spec.size());
      std::set<std::string> seen;
      for (const auto& img : e.images) {
        auto s = spec.find_label(img.name);
        if (!s) fail_at(img.loc, "unknown theta label", img.name);
        if (!seen.insert(img.name).second) fail_at(img.loc, "duplicate image", img.name);
        Row row(spec.size());
        for (const auto& t : free_eval(img.value, b_, is_label)) {
          if (t.letters.size() != 1) fail_at(img.loc, "theta images must be linear in theta", img.name);
          row[*spec.find_label(t.letters[0])] += t.coeff;
        }
        m[*s] = std::move(row);
      }
      b_.extensions.push_back({*phi, std::move(m)});
    }
    std::vector<FormExtension> per_label;
    for (std::size_t s = 0; s < spec.size(); ++s) {
      const FormExtension* ext = b_.find_extension(spec.twist(static_cast<ThetaIndex>(s)).name());
      if (!ext) return;
      per_label.push_back(*ext);
    }
    try {
      b_.geometry.emplace(spec, per_label);
    } catch (const Error& err) {
      fail_at(doc_.extensions.front().loc, err.what());
    }
  }

  void tensors() {
    auto need_geometry = [&](const SourceLoc& loc) -> const CalculusSpec& {
      if (!b_.geometry) fail_at(loc, "metrics and connections need an extension for every twist");
      return b_.geometry->calculus();
    };
    for (const auto& m : doc_.metrics) {
      claim(m.name, m.loc, "metric");
      const CalculusSpec& spec = need_geometry(m.loc);
      TensorForm g;
      for (const auto& e : m.entries) {
        auto s = spec.find_label(e.first);
        auto t = spec.find_label(e.second);
        if (!s || !t) fail_at(e.loc, "unknown theta label", s ? e.second : e.first);
        g.add_term(*s, *t, b_.evaluate_element(e.value));
      }
      b_.metrics.emplace_back(m.name, std::move(g));
    }
    for (const auto& c : doc_.connections) {
      claim(c.name, c.loc, "connection");
      const CalculusSpec& spec = need_geometry(c.loc);
      Connection conn = Connection::trivial(spec.size());
      for (const auto& e : c.entries) {
        auto s = spec.find_label(e.first);
        auto t = spec.find_label(e.second);
        if (!s || !t) fail_at(e.loc, "unknown theta label", s ? e.second : e.first);
        Form v = b_.evaluate_form(e.value);
        for (const auto& [w, coeff] : v.terms()) {
          if (w.size() != 1) fail_at(e.loc, "transport images must be 1-forms");
        }
        conn.transport[*s][*t] = v;
      }
      b_.connections.emplace_back(c.name, std::move(conn));
    }
  }

  void symbols(const Expr& e) {
    if (e.kind == Expr::Kind::Ident && !names_.count(e.text) && e.text != "vartheta") {
      fail_at(e.loc, "unknown symbol", e.text);
    }
    if (e.kind == Expr::Kind::Call && e.text != "d" && !b_.find_automorphism(e.text)) {
      fail_at(e.loc, "unknown function", e.text);
    }
    for (const auto& a : e.args) symbols(a);
  }

  void checks() {
    std::set<std::string> seen;
    for (const auto& c : doc_.checks) {
      if (!seen.insert(c.name).second) fail_at(c.loc, "duplicate check name", c.name);
      switch (c.kind) {
        case CheckDecl::Kind::Equal:
          symbols(c.lhs);
          symbols(c.rhs);
          for (const auto& [from, to] : c.mirror) {
            if (!names_.count(from) || !names_.count(to)) fail_at(c.loc, "unknown symbol in mirror", from);
          }
          break;
        case CheckDecl::Kind::Diagonal: {
          bool found = false;
          for (const auto& [n, f] : b_.forms) found = found || n == c.subject;
          if (!found && !(b_.calculus && b_.calculus->find_label(c.subject))) {
            fail_at(c.loc, "unknown form", c.subject);
          }
          if (!b_.find_automorphism(c.target)) fail_at(c.loc, "unknown automorphism", c.target);
          break;
        }
        case CheckDecl::Kind::Metric: {
          bool metric = false;
          bool conn = false;
          for (const auto& [n, g] : b_.metrics) metric = metric || n == c.subject;
          for (const auto& [n, v] : b_.connections) conn = conn || n == c.target;
          if (!metric) fail_at(c.loc, "unknown metric", c.subject);
          if (!conn) fail_at(c.loc, "unknown connection", c.target);
          break;
        }
        case CheckDecl::Kind::Derive:
          if (!b_.calculus) fail_at(c.loc, "derive needs a calc block");
          if (c.elements.empty() || c.forms.empty()) fail_at(c.loc, "derive needs elements and forms");
          for (const auto& n : c.elements) {
            if (b_.evaluate(Expr::ident(n, c.loc)).level == Value::Level::Form) {
              fail_at(c.loc, "expected an element", n);
            }
          }
          for (const auto& n : c.forms) b_.evaluate(Expr::ident(n, c.loc));
          for (const auto& eq : c.expected) {
            symbols(eq.lhs);
            symbols(eq.rhs);
          }
          break;
      }
    }
  }

  const ModelDocument& doc_;
  BuildOptions opt_;
  ModelBundle b_;
  std::set<std::string> names_;
};

}  // namespace

std::vector<std::pair<RationalFunction, std::vector<std::string>>> expand_words(
    const ModelBundle& bundle, const Expr& e, const std::vector<std::string>& letters) {
  std::set<std::string> names(letters.begin(), letters.end());
  std::vector<std::pair<RationalFunction, std::vector<std::string>>> out;
  for (auto& t : free_eval(e, bundle, [&](const std::string& n) { return names.count(n) > 0; })) {
    out.emplace_back(std::move(t.coeff), std::move(t.letters));
  }
  return out;
}

ModelBundle build_model(const ModelDocument& doc, const BuildOptions& options) {
  return Builder(doc, options).run();
}

ModelBundle load_model(const std::string& text, const BuildOptions& options) {
  return build_model(parse_model(text), options);
}

}  // namespace ncdiff

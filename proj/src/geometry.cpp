#include "ncdiff/geometry.hpp"

#include "ncdiff/errors.hpp"

namespace ncdiff {

namespace {

Form theta_image(const CalculusSpec& spec, const Matrix& m, ThetaIndex s) {
  Form out;
  for (std::size_t t = 0; t < spec.size(); ++t) {
    if (!m.at(s).at(t).is_zero()) out.add_term({static_cast<ThetaIndex>(t)}, Element(m[s][t]));
  }
  return out;
}

}  // namespace

Form FormExtension::apply(const CalculusSpec& spec, const Form& omega) const {
  Form out;
  for (const auto& [w, c] : omega.terms()) {
    Form term(base.apply(c));
    for (auto s : w) term = wedge(spec, term, theta_image(spec, theta_action, s));
    out += term;
  }
  return out;
}

FormExtension identity_extension(const Endomorphism& base, std::size_t size) {
  return {base, identity_matrix(size)};
}

FormExtension inverse_extension(const FormExtension& ext) {
  const Endomorphism* inv = ext.base.declared_inverse();
  if (!inv) throw MissingInverse("no inverse declared for " + ext.base.name());
  auto m = invert(ext.theta_action);
  if (!m) throw MissingInverse("theta action of " + ext.base.name() + " is singular");
  return {*inv, *m};
}

Verdict verify_differentiable(const CalculusSpec& spec, const FormExtension& ext) {
  const Algebra& alg = spec.algebra();
  for (std::size_t g = 0; g < alg.generators().size(); ++g) {
    auto sym = static_cast<Symbol>(g);
    Element x = alg.letter(sym);
    Form lhs = ext.apply(spec, d_zero(spec, x));
    Form rhs = d_zero(spec, ext.base.apply(x));
    if (!(lhs == rhs)) {
      return {false, ext.base.name() + "(d " + alg.generators().display_name(sym) + ") = " +
                         to_string(lhs, spec) + " but d(" + ext.base.name() + " " +
                         alg.generators().display_name(sym) + ") = " + to_string(rhs, spec)};
    }
    for (std::size_t s = 0; s < spec.size(); ++s) {
      auto idx = static_cast<ThetaIndex>(s);
      Form passed = ext.apply(spec, wedge(spec, Form::basis(idx), x));
      Form direct = wedge(spec, ext.apply(spec, Form::basis(idx)), ext.base.apply(x));
      if (!(passed == direct)) {
        return {false, ext.base.name() + " does not respect " + spec.labels()[s] + "*" +
                           alg.generators().display_name(sym)};
      }
    }
  }
  return {};
}

Element TensorForm::entry(ThetaIndex s, ThetaIndex t) const {
  auto it = terms_.find({s, t});
  return it == terms_.end() ? Element{} : it->second;
}

void TensorForm::add_term(ThetaIndex s, ThetaIndex t, const Element& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace({s, t}, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

TensorForm& TensorForm::operator+=(const TensorForm& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
  return *this;
}

TensorForm& TensorForm::operator-=(const TensorForm& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
  return *this;
}

TensorForm TensorForm::operator+(const TensorForm& o) const {
  TensorForm r = *this;
  r += o;
  return r;
}

TensorForm TensorForm::operator-(const TensorForm& o) const {
  TensorForm r = *this;
  r -= o;
  return r;
}

Geometry::Geometry(CalculusSpec spec, std::vector<FormExtension> extensions)
    : spec_(std::move(spec)), ext_(std::move(extensions)) {
  if (ext_.size() != spec_.size()) throw Error("geometry needs one extension per theta label");
  for (const auto& e : ext_) inv_.push_back(inverse_extension(e));
}

Connection Connection::trivial(std::size_t size) {
  Connection c;
  c.transport.assign(size, std::vector<Form>(size));
  for (std::size_t s = 0; s < size; ++s) {
    for (std::size_t t = 0; t < size; ++t) c.transport[s][t] = Form::basis(static_cast<ThetaIndex>(t));
  }
  return c;
}

namespace {

void require_grade_one(const Form& f, const char* what) {
  for (const auto& [w, c] : f.terms()) {
    if (w.size() != 1) throw Error(std::string(what) + " expects grade-1 forms");
  }
}

}  // namespace

TensorForm tensor_L(const Geometry& geo, const Form& omega, const Form& eta) {
  require_grade_one(omega, "tensor_L");
  require_grade_one(eta, "tensor_L");
  const Algebra& alg = geo.calculus().algebra();
  TensorForm out;
  for (const auto& [ws, a] : omega.terms()) {
    for (const auto& [wt, b] : eta.terms()) out.add_term(ws[0], wt[0], alg.mul(a, b));
  }
  return out;
}

TensorForm tensor_A(const Geometry& geo, const Form& omega, const Form& eta) {
  require_grade_one(omega, "tensor_A");
  require_grade_one(eta, "tensor_A");
  const CalculusSpec& spec = geo.calculus();
  const Algebra& alg = spec.algebra();
  TensorForm out;
  for (const auto& [ws, a] : omega.terms()) {
    ThetaIndex s = ws[0];
    const FormExtension& ext = geo.extension(s);
    for (const auto& [wt, b] : eta.terms()) {
      // a theta^s (x)_A b theta^t = a phi_s(b) theta^s (x)_L phi_s(theta^t)
      Element coeff = alg.mul(a, spec.twist(s).apply(b));
      for (std::size_t u = 0; u < spec.size(); ++u) {
        const RationalFunction& m = ext.theta_action[wt[0]][u];
        if (!m.is_zero()) out.add_term(s, static_cast<ThetaIndex>(u), coeff.scaled(m));
      }
    }
  }
  return out;
}

Form transport_form(const Geometry& geo, const Connection& conn, ThetaIndex s, const Form& omega) {
  require_grade_one(omega, "transport_form");
  const CalculusSpec& spec = geo.calculus();
  const Endomorphism& inv = geo.inverse(s).base;
  Form out;
  for (const auto& [w, a] : omega.terms()) {
    out += left_multiply(spec, inv.apply(a), conn.transport.at(s).at(w[0]));
  }
  return out;
}

TensorForm transport_tensor(const Geometry& geo, const Connection& conn, ThetaIndex s,
                            const TensorForm& t) {
  TensorForm out;
  for (const auto& [k, g] : t.terms()) {
    Form left = transport_form(geo, conn, s, Form({k.first}, g));
    out += tensor_L(geo, left, conn.transport.at(s).at(k.second));
  }
  return out;
}

TensorForm nabla(const Geometry& geo, const Connection& conn, const Form& omega) {
  const CalculusSpec& spec = geo.calculus();
  TensorForm out = tensor_A(geo, mc_form(spec), omega);
  for (std::size_t s = 0; s < spec.size(); ++s) {
    auto idx = static_cast<ThetaIndex>(s);
    out -= tensor_A(geo, Form::basis(idx), transport_form(geo, conn, idx, omega));
  }
  return out;
}

Verdict metric_compatible(const Geometry& geo, const Connection& conn, const TensorForm& g) {
  const CalculusSpec& spec = geo.calculus();
  for (std::size_t s = 0; s < spec.size(); ++s) {
    TensorForm moved = transport_tensor(geo, conn, static_cast<ThetaIndex>(s), g);
    if (!(moved == g)) {
      return {false, "V_" + spec.labels()[s] + "(g) = " + to_string(moved, spec) + " differs from g = " +
                         to_string(g, spec)};
    }
  }
  return {};
}

Form wedge_project(const Geometry& geo, const TensorForm& t) {
  const CalculusSpec& spec = geo.calculus();
  Form out;
  for (const auto& [k, c] : t.terms()) {
    Form right = geo.inverse(k.first).apply(spec, Form::basis(k.second));
    out += wedge(spec, Form({k.first}, c), right);
  }
  return out;
}

Form torsion(const Geometry& geo, const Connection& conn, const Form& omega) {
  return d_form(geo.calculus(), omega) - wedge_project(geo, nabla(geo, conn, omega));
}

std::string to_string(const TensorForm& t, const CalculusSpec& spec) {
  const Algebra& alg = spec.algebra();
  std::vector<std::pair<RationalFunction, std::string>> terms;
  for (const auto& [k, e] : t.terms()) {
    std::string basis = spec.labels()[k.first] + "(x)" + spec.labels()[k.second];
    for (const auto& [w, c] : e.terms()) {
      std::string word = to_string(w, alg.generators());
      terms.emplace_back(c, word.empty() ? basis : word + "*" + basis);
    }
  }
  return render_linear(terms, alg.parameters());
}

}  // namespace ncdiff

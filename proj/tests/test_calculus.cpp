#include <doctest.h>

#include "helpers.hpp"
#include "ncdiff/calculus.hpp"
#include "ncdiff/errors.hpp"
#include "ncdiff/model.hpp"
#include "ncdiff/sampling.hpp"

using namespace ncdiff;
using testing_support::point_of;
using testing_support::reduce_words;
using testing_support::to_oracle;

namespace {

RationalFunction param(const ModelBundle& b, const char* name) {
  return RationalFunction::parameter(static_cast<std::uint32_t>(*b.parameters.find(name)));
}

Form random_form(const CalculusSpec& spec, Rng& rng, const std::vector<RationalFunction>& pool,
                 std::size_t grade) {
  Form out;
  std::uniform_int_distribution<std::size_t> pick(0, spec.size() - 1);
  for (int i = 0; i < 2; ++i) {
    Form term(random_element(spec.algebra(), rng, pool, 2, 2));
    for (std::size_t g = 0; g < grade; ++g) term = wedge(spec, term, Form::basis(static_cast<ThetaIndex>(pick(rng))));
    out += term;
  }
  return out;
}

// theta^4 theta^2 = -r theta^2 theta^4 in place of the sign-only rule.
CalculusSpec displayed_rule(const ModelBundle& gl) {
  RationalFunction r = param(gl, "p") * param(gl, "q");
  return gl.calculus->with_wedge_rule(WedgeRule{3, 1, {{-r, 1, 3}}});
}

}  // namespace

TEST_SUITE("calculus") {

TEST_CASE("theta passes generators through its twist") {
  for (const ModelBundle& b : {build_quantum_torus(), build_glpq(), build_glpq(true)}) {
    Verdict v = verify_theta_passing(*b.calculus);
    CHECK_MESSAGE(v.passed, v.witness);
  }
}

TEST_CASE("quantum plane differentials") {
  ModelBundle b = build_quantum_torus();
  const CalculusSpec& spec = *b.calculus;
  Element x = b.evaluate("x").element();
  RationalFunction r = param(b, "r");
  Form dx = d_zero(spec, x);
  CHECK(dx == Form({0}, x.scaled(r.inverse() - 1)));
  CHECK(to_string(dx, spec) == "-(1 - r^-1) * x*t1");
  CHECK(mc_form(spec) == Form::basis(0) + Form::basis(1));
}

TEST_CASE("wedge is associative") {
  ModelBundle b = build_glpq();
  const CalculusSpec& spec = *b.calculus;
  Rng rng(3);
  auto pool = default_coefficient_pool(spec.algebra().parameters(), b.substitutions);
  for (int i = 0; i < 8; ++i) {
    Form f = random_form(spec, rng, pool, 1);
    Form g = random_form(spec, rng, pool, 1);
    Form h = random_form(spec, rng, pool, 1);
    CHECK(wedge(spec, wedge(spec, f, g), h) == wedge(spec, f, wedge(spec, g, h)));
  }
}

TEST_CASE("graded Leibniz rule") {
  for (const ModelBundle& b : {build_quantum_torus(), build_glpq()}) {
    const CalculusSpec& spec = *b.calculus;
    Rng rng(20041207);
    auto pool = default_coefficient_pool(spec.algebra().parameters(), b.substitutions);
    for (std::size_t k = 0; k < 2; ++k) {
      for (int i = 0; i < 6; ++i) {
        Form f = random_form(spec, rng, pool, k);
        Form g = random_form(spec, rng, pool, 1);
        Form lhs = d_form(spec, wedge(spec, f, g));
        Form rhs = wedge(spec, d_form(spec, f), g);
        Form tail = wedge(spec, f, d_form(spec, g));
        rhs = (k % 2 == 0) ? rhs + tail : rhs - tail;
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("d squares to zero") {
  for (const ModelBundle& b : {build_quantum_torus(), build_glpq()}) {
    const CalculusSpec& spec = *b.calculus;
    Rng rng(17);
    auto pool = default_coefficient_pool(spec.algebra().parameters(), b.substitutions);
    for (int i = 0; i < 8; ++i) {
      Element a = random_element(spec.algebra(), rng, pool);
      CHECK(d_form(spec, d_zero(spec, a)).is_zero());
      CHECK(d_form(spec, d_form(spec, random_form(spec, rng, pool, 1))).is_zero());
    }
    CHECK(verify_d_squared(spec).passed);
  }
}

TEST_CASE("innerness") {
  for (const ModelBundle& b : {build_quantum_torus(), build_glpq()}) {
    Rng rng(20041207);
    Verdict v = verify_inner(*b.calculus, rng);
    CHECK_MESSAGE(v.passed, v.witness);
  }
}

TEST_CASE("innerness fails with a perturbed inner weight") {
  ModelBundle b = build_glpq();
  const CalculusSpec& spec = *b.calculus;
  CalculusSpec bad = spec.with_inner_weight(3, spec.weight(3) + spec.algebra().one());
  Rng rng(20041207);
  CHECK_FALSE(verify_inner(bad, rng).passed);
}

TEST_CASE("a wrong wedge rule breaks d squared") {
  ModelBundle b = build_quantum_torus();
  CalculusSpec bad = b.calculus->with_wedge_rule(WedgeRule{1, 0, {{RationalFunction(-2), 0, 1}}});
  CHECK_FALSE(verify_d_squared(bad).passed);
}

TEST_CASE("missing wedge rule") {
  ModelBundle b = build_quantum_torus();
  const CalculusSpec& spec = *b.calculus;
  std::vector<WedgeRule> rules;
  for (const auto& r : spec.wedge_rules()) {
    if (!(r.upper == 1 && r.lower == 0)) rules.push_back(r);
  }
  std::vector<Endomorphism> twists{spec.twist(0), spec.twist(1)};
  std::vector<Element> weights{spec.weight(0), spec.weight(1)};
  CalculusSpec partial(spec.algebra_ptr(), spec.labels(), twists, weights, rules);
  CHECK_FALSE(partial.validation_problems().empty());
  CHECK_THROWS_AS(wedge(partial, Form::basis(1), Form::basis(0)), MissingThetaRule);
}

TEST_CASE("the shipped GL wedge rules force no cubic relations") {
  ModelBundle b = build_glpq();
  CHECK(b.calculus->derived_theta_relations().empty());
  CHECK(b.calculus->validation_problems().empty());
}

TEST_CASE("theta4 theta2 = -r theta2 theta4 is incompatible with d squared = 0") {
  ModelBundle b = build_glpq();
  CalculusSpec bad = displayed_rule(b);
  Verdict v = verify_d_squared(bad);
  CHECK_FALSE(v.passed);
  // theta2 theta3 theta4 = 0, and with it the top monomial.
  const auto& derived = bad.derived_theta_relations();
  REQUIRE(derived.size() == 2);
  CHECK(derived[0].pivot == ThetaWord{1, 2, 3});
  CHECK(derived[1].pivot == ThetaWord{0, 1, 2, 3});
  CHECK(derived[0].rhs.empty());
  CHECK(derived[1].rhs.empty());
}

TEST_CASE("reference oracle: d squared on GL generators under both theta4 theta2 rules") {
  oracle::Q p(5, 3), q(-2, 7);
  for (bool displayed : {false, true}) {
    oracle::Calculus ref = oracle::glpq(p, q, displayed);
    bool all_zero = true;
    for (const char* g : {"a", "b", "c", "d"}) {
      oracle::Form dd = ref.d(ref.d(oracle::letter_form(g), 0), 1);
      all_zero = all_zero && dd.empty();
    }
    CHECK(all_zero == !displayed);
  }
}

TEST_CASE("differentials agree with the reference oracle") {
  ModelBundle b = build_glpq();
  const CalculusSpec& spec = *b.calculus;
  oracle::Q p(5, 3), q(-2, 7);
  oracle::Calculus ref = oracle::glpq(p, q, false);
  Point pt = point_of(b.parameters, {{"p", p}, {"q", q}, {"r", p * q}});
  for (const char* g : {"a", "b", "c", "d"}) {
    CAPTURE(g);
    Form dg = d_zero(spec, b.evaluate(g).element());
    CHECK(to_oracle(dg, spec.algebra(), pt) == reduce_words(ref, ref.d(oracle::letter_form(g), 0)));
  }
}

TEST_CASE("Maurer-Cartan relations for the matrix entries") {
  // d(a) = a v1 + b v3 with v1 = bc t1 and v3 = -p a c t1 + c t3, and
  // similarly for the other entries; checked entirely in the oracle.
  oracle::Q p(4, 3), q(3, 5);
  oracle::Calculus ref = oracle::glpq(p, q, false);
  auto el = [](const char* w, oracle::Q c, const char* t) { return oracle::Form{{{w, t}, c}}; };
  oracle::Form v1 = el("bc", 1, "0");
  oracle::Form v2 = oracle::form_add(el("bd", q / p, "0"), el("b", q / p, "1"));
  oracle::Form v3 = oracle::form_add(el("ac", -p, "0"), el("c", 1, "2"));
  oracle::Form v4 = el("ad", -q, "0");
  v4 = oracle::form_add(v4, el("a", -q, "1"));
  v4 = oracle::form_add(v4, el("d", 1 / p, "2"));
  v4 = oracle::form_add(v4, el("", q / p, "3"));
  v2 = reduce_words(ref, v2);
  v4 = reduce_words(ref, v4);
  auto lm = [&](const char* g, const oracle::Form& f) { return ref.wedge(oracle::letter_form(g), f); };
  CHECK(ref.d(oracle::letter_form("a"), 0) == oracle::form_add(lm("a", v1), lm("b", v3)));
  CHECK(ref.d(oracle::letter_form("b"), 0) == oracle::form_add(lm("a", v2), lm("b", v4)));
  CHECK(ref.d(oracle::letter_form("c"), 0) == oracle::form_add(lm("c", v1), lm("d", v3)));
  CHECK(ref.d(oracle::letter_form("d"), 0) == oracle::form_add(lm("c", v2), lm("d", v4)));
}

TEST_CASE("Wess-Zumino relations") {
  ModelBundle b = build_quantum_torus();
  const CalculusSpec& spec = *b.calculus;
  std::vector<NamedForm> forms{{"dx", b.evaluate("dx").form}, {"dy", b.evaluate("dy").form}};
  std::vector<NamedElement> elems{{"x", b.evaluate("x").element()}, {"y", b.evaluate("y").element()}};
  auto rels = commutation_relations(spec, forms, elems);
  REQUIRE(rels.size() == 4);
  RationalFunction q = param(b, "q"), r = param(b, "r");
  RationalFunction p = r / q;
  auto coeff = [&](const DerivedRelation& rel, const std::string& f, const std::string& e) {
    RationalFunction c;
    for (const auto& t : rel.terms) {
      if (t.form == f && t.element == e) c += t.coeff;
    }
    return c;
  };
  for (const auto& rel : rels) {
    CAPTURE(rel.element);
    CAPTURE(rel.form);
    if (rel.element == "x" && rel.form == "dx") {
      CHECK(coeff(rel, "dx", "x") == p * q);
      CHECK(rel.terms.size() == 1);
    } else if (rel.element == "y" && rel.form == "dx") {
      CHECK(coeff(rel, "dx", "y") == p);
      CHECK(rel.terms.size() == 1);
    } else if (rel.element == "y" && rel.form == "dy") {
      CHECK(coeff(rel, "dy", "y") == p * q);
      CHECK(rel.terms.size() == 1);
    } else {
      CHECK(coeff(rel, "dy", "x") == q);
      CHECK(coeff(rel, "dx", "y") == p * q - 1);
      CHECK(rel.terms.size() == 2);
    }
  }
}

TEST_CASE("reference oracle: Wess-Zumino relations") {
  oracle::Q q(7, 3), r(-4, 5);
  oracle::Q p = r / q;
  oracle::Calculus ref = oracle::qplane(q, r);
  auto lf = oracle::letter_form;
  oracle::Form dx = ref.d(lf("x"), 0), dy = ref.d(lf("y"), 0);
  auto w = [&](const oracle::Form& a, const oracle::Form& b) { return ref.wedge(a, b); };
  using oracle::form_scaled;
  using oracle::form_sub;
  CHECK(form_sub(w(lf("x"), dx), form_scaled(w(dx, lf("x")), p * q)).empty());
  CHECK(form_sub(w(lf("y"), dx), form_scaled(w(dx, lf("y")), p)).empty());
  CHECK(form_sub(w(lf("y"), dy), form_scaled(w(dy, lf("y")), p * q)).empty());
  oracle::Form rhs = oracle::form_add(form_scaled(w(dy, lf("x")), q), form_scaled(w(dx, lf("y")), p * q - 1));
  CHECK(form_sub(w(lf("x"), dy), rhs).empty());
  oracle::Form vt = ref.vartheta();
  CHECK(w(vt, vt).empty());
}

TEST_CASE("inexpressible relation") {
  ModelBundle b = build_quantum_torus();
  std::vector<NamedForm> forms{{"dy", b.evaluate("dy").form}};
  std::vector<NamedElement> elems{{"x", b.evaluate("x").element()}};
  CHECK_THROWS_AS(commutation_relations(*b.calculus, forms, elems), InexpressibleRelation);
}

}

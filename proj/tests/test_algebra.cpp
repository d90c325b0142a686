#include <doctest.h>

#include "helpers.hpp"
#include "ncdiff/algebra.hpp"
#include "ncdiff/errors.hpp"
#include "ncdiff/model.hpp"
#include "ncdiff/sampling.hpp"

using namespace ncdiff;
using testing_support::point_of;
using testing_support::to_oracle;

namespace {

Combination monomial(RationalFunction c, std::vector<Symbol> letters) {
  return Combination{{Combination::Term{std::move(c), std::move(letters)}}};
}

// x*y = q*y*x over Q(q), no inverses.
std::shared_ptr<Algebra> quantum_plane() {
  auto alg = std::make_shared<Algebra>(ParameterSet({"q"}), GeneratorTable({"x", "y"}, {}));
  alg->add_relation(monomial(1, {0, 1}), monomial(RationalFunction::parameter(0), {1, 0}), "xy");
  return alg;
}

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("words are run-length encoded") {
  Word w = Word::from_letters({0, 0, 1, 0});
  CHECK(w.runs().size() == 3);
  CHECK(w.length() == 4);
  CHECK(w.letters() == std::vector<Symbol>{0, 0, 1, 0});
  CHECK(word_compare(Word::from_letters({0, 1}), Word::from_letters({1, 0})) < 0);
  CHECK(word_compare(Word::from_letters({1}), Word::from_letters({0, 0})) < 0);
}

TEST_CASE("quantum plane normal forms") {
  auto alg = quantum_plane();
  RationalFunction q = RationalFunction::parameter(0);
  Element yx = alg->normal_form(std::vector<Symbol>{1, 0});
  CHECK(yx == Element(Word::from_letters({0, 1}), q.inverse()));
  // y^2 x^2 = q^-4 x^2 y^2
  Element e = alg->normal_form(std::vector<Symbol>{1, 1, 0, 0});
  CHECK(e == Element(Word::from_letters({0, 0, 1, 1}), q.pow(-4)));
  CHECK(to_string(yx, *alg) == "q^-1 * x*y");
}

TEST_CASE("relations must be quadratic out-of-order pairs") {
  auto alg = std::make_shared<Algebra>(ParameterSet({"q"}), GeneratorTable({"x", "y"}, {}));
  CHECK_THROWS_AS(alg->add_relation(monomial(1, {0, 1, 1}), monomial(1, {1, 0}), "cubic"),
                  UnsupportedRelation);
}

TEST_CASE("formal inverses") {
  ModelBundle b = build_quantum_torus();
  const Algebra& alg = *b.algebra;
  auto x = *alg.generators().find("x");
  auto xi = *alg.generators().find("x^-1");
  auto y = *alg.generators().find("y");
  CHECK(alg.generators().is_inverse(xi));
  CHECK(alg.normal_form(std::vector<Symbol>{x, xi}) == alg.one());
  CHECK(alg.normal_form(std::vector<Symbol>{xi, x}) == alg.one());
  // x^-1 y = q^-1 y x^-1
  Element lhs = alg.normal_form(std::vector<Symbol>{xi, y});
  Element rhs = alg.normal_form(std::vector<Symbol>{y, xi}).scaled(RationalFunction::parameter(0, -1));
  CHECK(lhs == rhs);
  CHECK(inverse_letters(alg.generators(), {x, y}) == std::vector<Symbol>{*alg.generators().find("y^-1"), xi});
}

TEST_CASE("missing inverse") {
  auto alg = quantum_plane();
  CHECK_THROWS_AS(inverse_letters(alg->generators(), {0}), MissingInverse);
}

TEST_CASE("shipped presentations are confluent") {
  CHECK(check_confluence(*build_quantum_torus().algebra).confluent());
  ConfluenceReport gl = check_confluence(*build_glpq().algebra);
  CHECK(gl.confluent());
  CHECK(gl.overlaps_checked > 0);
  CHECK(check_confluence(*build_glpq(true).algebra).confluent());
}

TEST_CASE("a broken presentation has unresolved overlaps") {
  // xy = q yx, yz = zy, xz = 2 zx with the middle rule scaled: z y -> 3 y z
  // disagrees with the other two on the overlap z y x.
  auto alg = std::make_shared<Algebra>(ParameterSet({"q"}), GeneratorTable({"x", "y", "z"}, {}));
  RationalFunction q = RationalFunction::parameter(0);
  alg->add_relation(monomial(1, {0, 1}), monomial(q, {1, 0}), "xy");
  alg->add_relation(monomial(1, {1, 2}), monomial(1, {2, 1}), "yz");
  alg->add_relation(monomial(1, {0, 2}), monomial(2, {2, 0}), "xz");
  CHECK(check_confluence(*alg).confluent());
  alg->add_rule(Rule{2, 1, monomial(3, {1, 2}), "zy twice"});
  ConfluenceReport rep = check_confluence(*alg);
  CHECK_FALSE(rep.confluent());
  CHECK(rep.unresolved.size() >= 1);
}

TEST_CASE("multiplication is associative") {
  ModelBundle b = build_glpq();
  const Algebra& alg = *b.algebra;
  Rng rng(20041207);
  auto pool = default_coefficient_pool(alg.parameters(), b.substitutions);
  for (int i = 0; i < 25; ++i) {
    Element x = random_element(alg, rng, pool);
    Element y = random_element(alg, rng, pool);
    Element z = random_element(alg, rng, pool);
    CHECK(alg.mul(alg.mul(x, y), z) == alg.mul(x, alg.mul(y, z)));
    CHECK(alg.mul(x, y + z) == alg.mul(x, y) + alg.mul(x, z));
  }
}

TEST_CASE("normal forms agree with the reference rewriter") {
  ModelBundle b = build_glpq();
  const Algebra& alg = *b.algebra;
  oracle::Q p(3, 2), q(-5, 3);
  oracle::Calculus ref = oracle::glpq(p, q, false);
  Point pt = point_of(alg.parameters(), {{"p", p}, {"q", q}, {"r", p * q}});
  // Words over a, b, c, d only; the reference rewriter has no inverses.
  Rng rng(99);
  std::uniform_int_distribution<int> letter(0, 3), len(0, 3), coef(-4, 4);
  auto random_plain = [&]() {
    Combination c;
    for (int t = 0; t < 2; ++t) {
      std::vector<Symbol> w;
      for (int k = len(rng); k > 0; --k) w.push_back(*alg.generators().find(std::string(1, "abcd"[letter(rng)])));
      c.terms.push_back({RationalFunction(coef(rng)) * RationalFunction::parameter(0, coef(rng) % 2), w});
    }
    return alg.normal_form(c);
  };
  for (int i = 0; i < 25; ++i) {
    Element x = random_plain();
    Element y = random_plain();
    oracle::Elem expected = ref.algebra.mul(to_oracle(x, alg, pt), to_oracle(y, alg, pt));
    CHECK(to_oracle(alg.mul(x, y), alg, pt) == expected);
  }
}

TEST_CASE("determinant commutation scalars") {
  ModelBundle b = build_glpq();
  const Algebra& alg = *b.algebra;
  Element D = b.evaluate("D").element();
  RationalFunction p = RationalFunction::parameter(0), q = RationalFunction::parameter(1);
  auto gen = [&](const char* n) { return alg.letter(*alg.generators().find(n)); };
  CHECK(*commutation_scalar(alg, D, gen("a")) == RationalFunction(1));
  CHECK(*commutation_scalar(alg, D, gen("b")) == p / q);
  CHECK(*commutation_scalar(alg, D, gen("c")) == q / p);
  CHECK(*commutation_scalar(alg, D, gen("d")) == RationalFunction(1));
  CHECK_FALSE(commutation_scalar(alg, gen("a"), gen("d")).has_value());

  // Reference values at a point.
  oracle::Q pv(2, 7), qv(9, 4);
  oracle::Calculus ref = oracle::glpq(pv, qv, false);
  oracle::Elem Dv = ref.algebra.reduce(oracle::Elem{{"ad", 1}, {"bc", -pv}});
  auto lam = [&](const std::string& g) {
    oracle::Elem left = ref.algebra.mul(Dv, oracle::Elem{{g, 1}});
    oracle::Elem right = ref.algebra.mul(oracle::Elem{{g, 1}}, Dv);
    oracle::Q l = left.begin()->second / right.at(left.begin()->first);
    CHECK(oracle::sub(left, oracle::scaled(right, l)).empty());
    return l;
  };
  CHECK(lam("a") == 1);
  CHECK(lam("d") == 1);
  CHECK(lam("b") == pv / qv);
  CHECK(lam("c") == qv / pv);
}

}

#pragma once

// Models assembled from the description language, the two built-in models
// and their verification suites.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncdiff/calculus.hpp"
#include "ncdiff/dsl.hpp"
#include "ncdiff/geometry.hpp"

namespace ncdiff {

// Result of evaluating an expression: a scalar, an algebra element or a form,
// always stored as a form.
struct Value {
  enum class Level { Scalar, Element, Form };
  Level level = Level::Scalar;
  Form form;

  Element element() const { return form.scalar_part(); }
};

struct BuildOptions {
  // When false, automorphisms failing their relation check and calculus
  // validation problems are recorded instead of rejected.
  bool strict = true;
};

struct ModelBundle {
  ModelDocument document;
  ParameterSet parameters;
  std::shared_ptr<const Algebra> algebra;
  Bindings substitutions;
  std::vector<Endomorphism> automorphisms;
  std::vector<NamedElement> elements;
  std::optional<CalculusSpec> calculus;
  std::vector<NamedForm> forms;
  std::vector<FormExtension> extensions;
  std::optional<Geometry> geometry;
  std::vector<std::pair<std::string, TensorForm>> metrics;
  std::vector<std::pair<std::string, Connection>> connections;
  std::vector<std::string> problems;

  const Endomorphism* find_automorphism(const std::string& name) const;
  const FormExtension* find_extension(const std::string& automorphism) const;
  Value evaluate(const Expr& e) const;
  Value evaluate(const std::string& text) const { return evaluate(parse_expression(text)); }
  // Semantic failures become ModelError with the location of `e`.
  Element evaluate_element(const Expr& e) const;
  Form evaluate_form(const Expr& e) const;
};

// Expands an expression into scalar multiples of words in `letters`
// without rewriting; every other identifier must be a scalar.
std::vector<std::pair<RationalFunction, std::vector<std::string>>> expand_words(
    const ModelBundle& bundle, const Expr& e, const std::vector<std::string>& letters);

ModelBundle build_model(const ModelDocument& doc, const BuildOptions& options = {});
ModelBundle load_model(const std::string& text, const BuildOptions& options = {});
std::string render(const Value& v, const ModelBundle& bundle, bool latex = false);

// Shipped model sources.
const std::string& quantum_torus_source();
const std::string& glpq_source();

ModelBundle build_quantum_torus();
// With adjoin_det_inverse, a generator Dinv commuting with every generator
// like the inverse of the quantum determinant is added.
ModelBundle build_glpq(bool adjoin_det_inverse = false);
// The GL model document without the substitution r = p*q.
ModelDocument glpq_unsubstituted_document();

struct CheckResult {
  std::string name;
  std::string anchor;
  bool passed = false;
  std::string witness;
};

struct SuiteReport {
  std::string model;
  std::vector<CheckResult> checks;
  bool passed() const;
  std::size_t failures() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20041207;
  std::size_t samples = 20;
};

SuiteReport run_suite(const ModelBundle& bundle, const SuiteOptions& options = {});

std::string render_plain(const SuiteReport& report);
std::string render_latex(const SuiteReport& report);
std::string render_json(const SuiteReport& report);

}  // namespace ncdiff

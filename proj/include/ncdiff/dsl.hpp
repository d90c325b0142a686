#pragma once

// Model description language: syntax tree, recursive-descent parser and a
// printer whose output parses back to the same tree.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ncdiff {

// Locations are carried for diagnostics only and never affect equality.
struct SourceLoc {
  int line = 0;
  int column = 0;
  bool operator==(const SourceLoc&) const { return true; }
};

struct Expr {
  enum class Kind { Number, Ident, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  std::string text;   // digits, identifier or callee
  long exponent = 0;  // Pow only
  std::vector<Expr> args;
  SourceLoc loc;

  static Expr number(std::string digits, SourceLoc loc = {});
  static Expr ident(std::string name, SourceLoc loc = {});
  static Expr unary(Expr arg, SourceLoc loc = {});
  static Expr binary(Kind kind, Expr lhs, Expr rhs, SourceLoc loc = {});
  static Expr power(Expr base, long exponent, SourceLoc loc = {});
  static Expr call(std::string callee, Expr arg, SourceLoc loc = {});

  bool operator==(const Expr&) const = default;
};

// Renames identifiers (not callees).
Expr rename(const Expr& e, const std::vector<std::pair<std::string, std::string>>& mapping);

struct Binding {
  std::string name;
  Expr value;
  SourceLoc loc;
  bool operator==(const Binding&) const = default;
};

struct Equation {
  Expr lhs;
  Expr rhs;
  SourceLoc loc;
  bool operator==(const Equation&) const = default;
};

struct AutomorphismDecl {
  std::string name;
  std::vector<Binding> images;  // generator -> image
  SourceLoc loc;
  bool operator==(const AutomorphismDecl&) const = default;
};

struct CalculusDecl {
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::string>> twists;  // label -> automorphism
  std::vector<Binding> weights;
  std::vector<Equation> wedges;
  SourceLoc loc;
  bool present = false;
  bool operator==(const CalculusDecl&) const = default;
};

// `extend phi { t1 -> r*t1; }`: the action of an automorphism on theta.
struct ExtensionDecl {
  std::string automorphism;
  std::vector<Binding> images;
  SourceLoc loc;
  bool operator==(const ExtensionDecl&) const = default;
};

struct TensorEntry {
  std::string first;
  std::string second;
  Expr value;
  SourceLoc loc;
  bool operator==(const TensorEntry&) const = default;
};

// `metric g { [t1, t2] = 1; }`
struct MetricDecl {
  std::string name;
  std::vector<TensorEntry> entries;
  SourceLoc loc;
  bool operator==(const MetricDecl&) const = default;
};

// `connection v { V[t1](t2) = 2*t2; }`; omitted entries are the identity.
struct ConnectionDecl {
  std::string name;
  std::vector<TensorEntry> entries;
  SourceLoc loc;
  bool operator==(const ConnectionDecl&) const = default;
};

struct CheckDecl {
  enum class Kind { Equal, Diagonal, Derive, Metric };

  Kind kind = Kind::Equal;
  std::string name;
  std::string anchor;
  // Equal
  std::vector<std::pair<std::string, std::string>> mirror;
  Expr lhs;
  Expr rhs;
  // Diagonal: form `subject` passes generators through `target`.
  // Metric: metric `subject` under connection `target`.
  std::string subject;
  std::string target;
  bool expect_pass = true;
  // Derive
  std::vector<std::string> elements;
  std::vector<std::string> forms;
  bool form_left = false;
  std::vector<Equation> expected;
  SourceLoc loc;

  bool operator==(const CheckDecl&) const = default;
};

struct ModelDocument {
  std::string name;
  std::vector<std::string> parameters;
  std::vector<Binding> substitutions;
  std::vector<std::string> generators;
  std::vector<std::string> invertible;
  // Locations of the names above, when parsed from text; ignored by ==.
  struct NameLocations {
    std::vector<SourceLoc> parameters;
    std::vector<SourceLoc> generators;
    std::vector<SourceLoc> invertible;
    bool operator==(const NameLocations&) const { return true; }
  } name_locs;
  std::vector<Equation> relations;
  std::vector<AutomorphismDecl> automorphisms;
  std::vector<Binding> elements;
  CalculusDecl calculus;
  std::vector<Binding> forms;
  std::vector<ExtensionDecl> extensions;
  std::vector<MetricDecl> metrics;
  std::vector<ConnectionDecl> connections;
  std::vector<CheckDecl> checks;

  bool operator==(const ModelDocument&) const = default;
};

// Throws ModelError with line, column and offending token.
ModelDocument parse_model(std::string_view text);
Expr parse_expression(std::string_view text);

std::string to_string(const Expr& e);
std::string export_model(const ModelDocument& doc);

}  // namespace ncdiff

#include "ncdiff/dsl.hpp"

#include <cctype>
#include <set>

#include "ncdiff/errors.hpp"

namespace ncdiff {

Expr Expr::number(std::string digits, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Number;
  e.text = std::move(digits);
  e.loc = loc;
  return e;
}

Expr Expr::ident(std::string name, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Ident;
  e.text = std::move(name);
  e.loc = loc;
  return e;
}

Expr Expr::unary(Expr arg, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Neg;
  e.args.push_back(std::move(arg));
  e.loc = loc;
  return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs, SourceLoc loc) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.loc = loc;
  return e;
}

Expr Expr::power(Expr base, long exponent, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Pow;
  e.exponent = exponent;
  e.args.push_back(std::move(base));
  e.loc = loc;
  return e;
}

Expr Expr::call(std::string callee, Expr arg, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Call;
  e.text = std::move(callee);
  e.args.push_back(std::move(arg));
  e.loc = loc;
  return e;
}

Expr rename(const Expr& e, const std::vector<std::pair<std::string, std::string>>& mapping) {
  Expr out = e;
  if (out.kind == Expr::Kind::Ident) {
    for (const auto& [from, to] : mapping) {
      if (out.text == from) {
        out.text = to;
        break;
      }
    }
  }
  for (auto& a : out.args) a = rename(a, mapping);
  return out;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        throw ModelError("malformed number", line, col, std::string(src.substr(i, j + 1 - i)));
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), loc});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw ModelError("unterminated string", line, col, "\"");
      out.push_back({Tok::String, std::string(src.substr(i + 1, j - i - 1)), loc});
      advance(j + 1 - i);
      continue;
    }
    static const char* two[] = {"==", "->", ".."};
    bool matched = false;
    for (const char* t : two) {
      if (src.substr(i, 2) == t) {
        out.push_back({Tok::Punct, t, loc});
        advance(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view(";,:(){}[]+-*/^=").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), loc});
      advance(1);
      continue;
    }
    throw ModelError("unexpected character", line, col, std::string(1, c));
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ModelDocument document();
  Expr lone_expression() {
    Expr e = expression();
    expect_end();
    return e;
  }

private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(std::string_view punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
  bool at_word(std::string_view word) const { return peek().kind == Tok::Ident && peek().text == word; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ModelError(msg, t.loc.line, t.loc.column, t.kind == Tok::End ? "end of input" : t.text);
  }

  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect(std::string_view punct) {
    if (!at(punct)) fail("expected '" + std::string(punct) + "'");
    take();
  }

  void expect_word(std::string_view word) {
    if (!at_word(word)) fail("expected '" + std::string(word) + "'");
    take();
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail("unexpected trailing input");
  }

  std::string name() {
    if (peek().kind != Tok::Ident) fail("expected a name");
    return take().text;
  }

  std::string string_literal() {
    if (peek().kind != Tok::String) fail("expected a quoted string");
    return take().text;
  }

  std::vector<std::string> name_list(std::vector<SourceLoc>* locs = nullptr) {
    std::vector<std::string> out;
    do {
      if (!out.empty()) take();
      if (locs) locs->push_back(peek().loc);
      out.push_back(name());
    } while (at(","));
    return out;
  }

  // Theta labels accept a range form t1..t4 as shorthand.
  std::vector<std::string> label_list() {
    std::vector<std::string> out;
    do {
      if (!out.empty()) take();
      Token first = peek();
      std::string label = name();
      if (!at("..")) {
        out.push_back(label);
        continue;
      }
      take();
      std::string last = name();
      auto split = [&](const std::string& s) {
        std::size_t k = s.size();
        while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
        if (k == 0 || k == s.size()) {
          throw ModelError("range bounds need a common prefix and numeric suffix", first.loc.line,
                           first.loc.column, s);
        }
        return std::pair{s.substr(0, k), std::stol(s.substr(k))};
      };
      auto [p1, n1] = split(label);
      auto [p2, n2] = split(last);
      if (p1 != p2 || n2 < n1) {
        throw ModelError("invalid label range", first.loc.line, first.loc.column, label + ".." + last);
      }
      for (long n = n1; n <= n2; ++n) out.push_back(p1 + std::to_string(n));
    } while (at(","));
    return out;
  }

  Expr expression();
  Expr product();
  Expr unary();
  Expr power();
  Expr primary();
  long signed_integer();

  Binding binding(std::string_view sep);
  Equation equation(std::string_view sep);
  void calculus_block(ModelDocument& doc, SourceLoc loc);
  CheckDecl check(SourceLoc loc, CheckDecl::Kind kind);
  void derive_block(CheckDecl& c);
  TensorEntry tensor_entry(bool connection);

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

Expr Parser::expression() {
  Expr lhs = product();
  while (at("+") || at("-")) {
    Token op = take();
    Expr rhs = product();
    lhs = Expr::binary(op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, std::move(lhs), std::move(rhs),
                       op.loc);
  }
  return lhs;
}

Expr Parser::product() {
  Expr lhs = unary();
  while (at("*") || at("/")) {
    Token op = take();
    Expr rhs = unary();
    lhs = Expr::binary(op.text == "*" ? Expr::Kind::Mul : Expr::Kind::Div, std::move(lhs), std::move(rhs),
                       op.loc);
  }
  return lhs;
}

Expr Parser::unary() {
  if (at("-")) {
    Token op = take();
    return Expr::unary(unary(), op.loc);
  }
  return power();
}

long Parser::signed_integer() {
  bool negative = false;
  if (at("-")) {
    take();
    negative = true;
  }
  if (peek().kind != Tok::Number) fail("expected an integer exponent");
  const Token& t = peek();
  if (t.text.size() > 6) fail("exponent too large");
  long v = std::stol(take().text);
  return negative ? -v : v;
}

Expr Parser::power() {
  Expr base = primary();
  if (at("^")) {
    Token op = take();
    base = Expr::power(std::move(base), signed_integer(), op.loc);
    if (at("^")) fail("chained exponents need parentheses");
  }
  return base;
}

Expr Parser::primary() {
  const Token& t = peek();
  if (t.kind == Tok::Number) {
    Token n = take();
    return Expr::number(n.text, n.loc);
  }
  if (t.kind == Tok::Ident) {
    Token id = take();
    if (at("(")) {
      take();
      Expr arg = expression();
      expect(")");
      return Expr::call(id.text, std::move(arg), id.loc);
    }
    return Expr::ident(id.text, id.loc);
  }
  if (at("(")) {
    take();
    Expr e = expression();
    expect(")");
    return e;
  }
  fail("expected an expression");
}

Binding Parser::binding(std::string_view sep) {
  Binding b;
  b.loc = peek().loc;
  b.name = name();
  expect(sep);
  b.value = expression();
  expect(";");
  return b;
}

Equation Parser::equation(std::string_view sep) {
  Equation eq;
  eq.loc = peek().loc;
  eq.lhs = expression();
  expect(sep);
  eq.rhs = expression();
  expect(";");
  return eq;
}

void Parser::calculus_block(ModelDocument& doc, SourceLoc loc) {
  if (doc.calculus.present) fail("duplicate calc block");
  CalculusDecl& c = doc.calculus;
  c.present = true;
  c.loc = loc;
  expect("{");
  while (!at("}")) {
    if (peek().kind == Tok::End) fail("unterminated calc block");
    std::string kw = name();
    if (kw == "theta") {
      auto labels = label_list();
      c.labels.insert(c.labels.end(), labels.begin(), labels.end());
      expect(";");
    } else if (kw == "twist") {
      std::string label = name();
      expect("=");
      std::string phi = name();
      expect(";");
      c.twists.emplace_back(label, phi);
    } else if (kw == "weight") {
      c.weights.push_back(binding("="));
    } else if (kw == "wedge") {
      c.wedges.push_back(equation("="));
    } else {
      --pos_;
      fail("unknown calc entry");
    }
  }
  expect("}");
}

TensorEntry Parser::tensor_entry(bool connection) {
  TensorEntry e;
  e.loc = peek().loc;
  if (connection) {
    expect_word("V");
    expect("[");
    e.first = name();
    expect("]");
    expect("(");
    e.second = name();
    expect(")");
  } else {
    expect("[");
    e.first = name();
    expect(",");
    e.second = name();
    expect("]");
  }
  expect("=");
  e.value = expression();
  expect(";");
  return e;
}

void Parser::derive_block(CheckDecl& c) {
  expect("{");
  while (!at("}")) {
    if (peek().kind == Tok::End) fail("unterminated derive block");
    if (at_word("elements") && peek(1).kind == Tok::Ident) {
      take();
      c.elements = name_list();
      expect(";");
    } else if (at_word("forms") && peek(1).kind == Tok::Ident) {
      take();
      c.forms = name_list();
      expect(";");
    } else if (at_word("side") && peek(1).kind == Tok::Ident) {
      take();
      std::string side = name();
      if (side == "form_left") {
        c.form_left = true;
      } else if (side == "element_left") {
        c.form_left = false;
      } else {
        --pos_;
        fail("side must be element_left or form_left");
      }
      expect(";");
    } else {
      c.expected.push_back(equation("=="));
    }
  }
  expect("}");
}

CheckDecl Parser::check(SourceLoc loc, CheckDecl::Kind kind) {
  CheckDecl c;
  c.kind = kind;
  c.loc = loc;
  c.name = string_literal();
  if (at(",")) {
    take();
    c.anchor = string_literal();
  }
  if (kind == CheckDecl::Kind::Derive) {
    derive_block(c);
    return c;
  }
  if (kind == CheckDecl::Kind::Equal && at_word("mirror")) {
    take();
    do {
      if (!c.mirror.empty()) take();
      std::string from = name();
      expect("->");
      c.mirror.emplace_back(from, name());
    } while (at(","));
  }
  expect(":");
  switch (kind) {
    case CheckDecl::Kind::Equal:
      c.lhs = expression();
      expect("==");
      c.rhs = expression();
      break;
    case CheckDecl::Kind::Diagonal:
      c.subject = name();
      expect_word("by");
      c.target = name();
      break;
    case CheckDecl::Kind::Metric: {
      c.subject = name();
      expect_word("under");
      c.target = name();
      expect_word("expect");
      std::string verdict = name();
      if (verdict != "pass" && verdict != "fail") {
        --pos_;
        fail("expected 'pass' or 'fail'");
      }
      c.expect_pass = verdict == "pass";
      break;
    }
    case CheckDecl::Kind::Derive:
      break;
  }
  expect(";");
  return c;
}

ModelDocument Parser::document() {
  ModelDocument doc;
  while (peek().kind != Tok::End) {
    if (peek().kind != Tok::Ident) fail("expected a declaration");
    if (doc.name.empty() && peek().text != "model") fail("expected 'model' declaration");
    Token kw = take();
    const std::string& k = kw.text;
    if (k == "model") {
      doc.name = name();
      expect(";");
    } else if (k == "param") {
      for (auto& n : name_list(&doc.name_locs.parameters)) doc.parameters.push_back(n);
      expect(";");
    } else if (k == "subst") {
      doc.substitutions.push_back(binding("="));
    } else if (k == "gen") {
      for (auto& n : name_list(&doc.name_locs.generators)) doc.generators.push_back(n);
      expect(";");
    } else if (k == "invertible") {
      for (auto& n : name_list(&doc.name_locs.invertible)) doc.invertible.push_back(n);
      expect(";");
    } else if (k == "rel") {
      doc.relations.push_back(equation("="));
    } else if (k == "auto") {
      AutomorphismDecl a;
      a.loc = kw.loc;
      a.name = name();
      expect("{");
      while (!at("}")) {
        if (peek().kind == Tok::End) fail("unterminated auto block");
        a.images.push_back(binding("->"));
      }
      expect("}");
      doc.automorphisms.push_back(std::move(a));
    } else if (k == "elem") {
      doc.elements.push_back(binding("="));
    } else if (k == "form") {
      doc.forms.push_back(binding("="));
    } else if (k == "calc") {
      calculus_block(doc, kw.loc);
    } else if (k == "extend") {
      ExtensionDecl e;
      e.loc = kw.loc;
      e.automorphism = name();
      expect("{");
      while (!at("}")) {
        if (peek().kind == Tok::End) fail("unterminated extend block");
        e.images.push_back(binding("->"));
      }
      expect("}");
      doc.extensions.push_back(std::move(e));
    } else if (k == "metric" || k == "connection") {
      bool conn = k == "connection";
      std::string n = name();
      std::vector<TensorEntry> entries;
      expect("{");
      while (!at("}")) {
        if (peek().kind == Tok::End) fail("unterminated " + k + " block");
        entries.push_back(tensor_entry(conn));
      }
      expect("}");
      if (conn) {
        doc.connections.push_back({n, std::move(entries), kw.loc});
      } else {
        doc.metrics.push_back({n, std::move(entries), kw.loc});
      }
    } else if (k == "check") {
      doc.checks.push_back(check(kw.loc, CheckDecl::Kind::Equal));
    } else if (k == "diagonal") {
      doc.checks.push_back(check(kw.loc, CheckDecl::Kind::Diagonal));
    } else if (k == "derive") {
      doc.checks.push_back(check(kw.loc, CheckDecl::Kind::Derive));
    } else if (k == "metriccheck") {
      doc.checks.push_back(check(kw.loc, CheckDecl::Kind::Metric));
    } else {
      --pos_;
      fail("unknown declaration");
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Printer

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Neg:
      return 3;
    case Expr::Kind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string print(const Expr& e, int min_prec) {
  std::string s;
  switch (e.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Ident:
      s = e.text;
      break;
    case Expr::Kind::Call:
      s = e.text + "(" + print(e.args[0], 0) + ")";
      break;
    case Expr::Kind::Neg:
      s = "-" + print(e.args[0], 3);
      break;
    case Expr::Kind::Add:
      s = print(e.args[0], 1) + " + " + print(e.args[1], 2);
      break;
    case Expr::Kind::Sub:
      s = print(e.args[0], 1) + " - " + print(e.args[1], 2);
      break;
    case Expr::Kind::Mul:
      s = print(e.args[0], 2) + "*" + print(e.args[1], 3);
      break;
    case Expr::Kind::Div:
      s = print(e.args[0], 2) + "/" + print(e.args[1], 3);
      break;
    case Expr::Kind::Pow:
      s = print(e.args[0], 5) + "^" + std::to_string(e.exponent);
      break;
  }
  return precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::string quoted_header(const CheckDecl& c) {
  std::string s = "\"" + c.name + "\"";
  if (!c.anchor.empty()) s += ", \"" + c.anchor + "\"";
  return s;
}

}  // namespace

ModelDocument parse_model(std::string_view text) { return Parser(text).document(); }

Expr parse_expression(std::string_view text) { return Parser(text).lone_expression(); }

std::string to_string(const Expr& e) { return print(e, 0); }

std::string export_model(const ModelDocument& doc) {
  std::string out;
  auto line = [&](const std::string& s) { out += s + "\n"; };
  if (!doc.name.empty()) line("model " + doc.name + ";");
  if (!doc.parameters.empty()) line("param " + join(doc.parameters) + ";");
  for (const auto& b : doc.substitutions) line("subst " + b.name + " = " + to_string(b.value) + ";");
  if (!doc.generators.empty()) line("gen " + join(doc.generators) + ";");
  if (!doc.invertible.empty()) line("invertible " + join(doc.invertible) + ";");
  for (const auto& r : doc.relations) line("rel " + to_string(r.lhs) + " = " + to_string(r.rhs) + ";");
  for (const auto& a : doc.automorphisms) {
    line("auto " + a.name + " {");
    for (const auto& b : a.images) line("  " + b.name + " -> " + to_string(b.value) + ";");
    line("}");
  }
  for (const auto& b : doc.elements) line("elem " + b.name + " = " + to_string(b.value) + ";");
  if (doc.calculus.present) {
    const auto& c = doc.calculus;
    line("calc {");
    if (!c.labels.empty()) line("  theta " + join(c.labels) + ";");
    for (const auto& [l, phi] : c.twists) line("  twist " + l + " = " + phi + ";");
    for (const auto& b : c.weights) line("  weight " + b.name + " = " + to_string(b.value) + ";");
    for (const auto& w : c.wedges) line("  wedge " + to_string(w.lhs) + " = " + to_string(w.rhs) + ";");
    line("}");
  }
  for (const auto& b : doc.forms) line("form " + b.name + " = " + to_string(b.value) + ";");
  for (const auto& e : doc.extensions) {
    line("extend " + e.automorphism + " {");
    for (const auto& b : e.images) line("  " + b.name + " -> " + to_string(b.value) + ";");
    line("}");
  }
  for (const auto& m : doc.metrics) {
    line("metric " + m.name + " {");
    for (const auto& e : m.entries) {
      line("  [" + e.first + ", " + e.second + "] = " + to_string(e.value) + ";");
    }
    line("}");
  }
  for (const auto& m : doc.connections) {
    line("connection " + m.name + " {");
    for (const auto& e : m.entries) {
      line("  V[" + e.first + "](" + e.second + ") = " + to_string(e.value) + ";");
    }
    line("}");
  }
  for (const auto& c : doc.checks) {
    switch (c.kind) {
      case CheckDecl::Kind::Equal: {
        std::string head = "check " + quoted_header(c);
        if (!c.mirror.empty()) {
          std::vector<std::string> pairs;
          for (const auto& [a, b] : c.mirror) pairs.push_back(a + " -> " + b);
          head += " mirror " + join(pairs);
        }
        line(head + " : " + to_string(c.lhs) + " == " + to_string(c.rhs) + ";");
        break;
      }
      case CheckDecl::Kind::Diagonal:
        line("diagonal " + quoted_header(c) + " : " + c.subject + " by " + c.target + ";");
        break;
      case CheckDecl::Kind::Metric:
        line("metriccheck " + quoted_header(c) + " : " + c.subject + " under " + c.target + " expect " +
             (c.expect_pass ? "pass" : "fail") + ";");
        break;
      case CheckDecl::Kind::Derive:
        line("derive " + quoted_header(c) + " {");
        if (!c.elements.empty()) line("  elements " + join(c.elements) + ";");
        if (!c.forms.empty()) line("  forms " + join(c.forms) + ";");
        if (c.form_left) line("  side form_left;");
        for (const auto& e : c.expected) line("  " + to_string(e.lhs) + " == " + to_string(e.rhs) + ";");
        line("}");
        break;
    }
  }
  return out;
}

}  // namespace ncdiff

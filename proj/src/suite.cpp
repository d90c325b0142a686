#include <algorithm>
#include <atomic>
#include <functional>
#include <set>
#include <thread>

#include <json.hpp>

#include "ncdiff/errors.hpp"
#include "ncdiff/model.hpp"
#include "ncdiff/sampling.hpp"

namespace ncdiff {

bool SuiteReport::passed() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

namespace {

using Job = std::function<CheckResult(Rng&)>;

CheckResult verdict(std::string name, std::string anchor, const Verdict& v) {
  return {std::move(name), std::move(anchor), v.passed, v.witness};
}

CheckResult equal_check(const ModelBundle& b, const std::string& name, const std::string& anchor,
                        const Expr& lhs, const Expr& rhs) {
  Form l = b.evaluate_form(lhs);
  Form r = b.evaluate_form(rhs);
  if (l == r) return {name, anchor, true, {}};
  const CalculusSpec* spec = b.calculus ? &*b.calculus : nullptr;
  Form diff = l - r;
  std::string shown = spec ? to_string(diff, *spec) : to_string(diff.scalar_part(), *b.algebra);
  return {name, anchor, false, "lhs - rhs = " + shown};
}

CheckResult diagonal_check(const ModelBundle& b, const CheckDecl& c) {
  const CalculusSpec& spec = *b.calculus;
  const Algebra& alg = spec.algebra();
  Form f = b.evaluate_form(Expr::ident(c.subject));
  const Endomorphism& phi = *b.find_automorphism(c.target);
  for (std::size_t g = 0; g < alg.generators().size(); ++g) {
    auto sym = static_cast<Symbol>(g);
    Element x = alg.letter(sym);
    Form lhs = wedge(spec, f, x);
    Form rhs = wedge(spec, phi.apply(x), f);
    if (!(lhs == rhs)) {
      return {c.name, c.anchor, false,
              c.subject + "*" + alg.generators().display_name(sym) + " - " + c.target + "(" +
                  alg.generators().display_name(sym) + ")*" + c.subject + " = " + to_string(lhs - rhs, spec)};
    }
  }
  return {c.name, c.anchor, true, {}};
}

CheckResult derive_check(const ModelBundle& b, const CheckDecl& c) {
  const CalculusSpec& spec = *b.calculus;
  std::vector<NamedForm> forms;
  std::vector<NamedElement> elements;
  for (const auto& n : c.forms) forms.emplace_back(n, b.evaluate_form(Expr::ident(n)));
  for (const auto& n : c.elements) elements.emplace_back(n, b.evaluate(Expr::ident(n)).element());
  auto side = c.form_left ? RelationSide::FormLeft : RelationSide::ElementLeft;
  std::vector<DerivedRelation> derived;
  try {
    derived = commutation_relations(spec, forms, elements, side);
  } catch (const InexpressibleRelation& err) {
    return {c.name, c.anchor, false, err.what()};
  }
  std::vector<std::string> letters = c.forms;
  letters.insert(letters.end(), c.elements.begin(), c.elements.end());
  std::set<std::string> form_names(c.forms.begin(), c.forms.end());
  // (element, form) -> (form, element) -> coefficient
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::map<Key, RationalFunction>> expected;
  auto split = [&](const std::vector<std::string>& w, const SourceLoc& loc) -> Key {
    if (w.size() != 2) throw ModelError("expected a product of one element and one form", loc.line, loc.column);
    bool form_first = form_names.count(w[0]) > 0;
    if (form_first == (form_names.count(w[1]) > 0)) {
      throw ModelError("expected a product of one element and one form", loc.line, loc.column);
    }
    return form_first ? Key{w[1], w[0]} : Key{w[0], w[1]};
  };
  for (const auto& eq : c.expected) {
    auto lhs = expand_words(b, eq.lhs, letters);
    if (lhs.size() != 1 || !lhs[0].first.is_one()) {
      throw ModelError("expected relation must start with a single product", eq.loc.line, eq.loc.column);
    }
    Key key = split(lhs[0].second, eq.loc);
    auto& coeffs = expected[key];
    for (const auto& [k, w] : expand_words(b, eq.rhs, letters)) {
      Key ek = split(w, eq.loc);
      coeffs[{ek.second, ek.first}] += k;
    }
  }
  const ParameterSet& params = spec.algebra().parameters();
  std::set<Key> matched;
  for (const auto& rel : derived) {
    Key key{rel.element, rel.form};
    auto it = expected.find(key);
    if (it == expected.end()) {
      return {c.name, c.anchor, false, "unexpected derived relation " + to_string(rel, params)};
    }
    matched.insert(key);
    std::map<Key, RationalFunction> got;
    for (const auto& t : rel.terms) got[{t.form, t.element}] += t.coeff;
    std::set<Key> keys;
    for (const auto& [k, v] : got) keys.insert(k);
    for (const auto& [k, v] : it->second) keys.insert(k);
    for (const auto& k : keys) {
      RationalFunction x = got.count(k) ? got[k] : RationalFunction();
      RationalFunction y = it->second.count(k) ? it->second.at(k) : RationalFunction();
      if (!(x == y)) {
        return {c.name, c.anchor, false, "derived " + to_string(rel, params)};
      }
    }
  }
  for (const auto& [k, v] : expected) {
    if (!matched.count(k)) {
      return {c.name, c.anchor, false, "no relation derived for " + k.first + " and " + k.second};
    }
  }
  return {c.name, c.anchor, true, {}};
}

CheckResult metric_check(const ModelBundle& b, const CheckDecl& c) {
  const TensorForm* g = nullptr;
  const Connection* conn = nullptr;
  for (const auto& [n, m] : b.metrics) {
    if (n == c.subject) g = &m;
  }
  for (const auto& [n, v] : b.connections) {
    if (n == c.target) conn = &v;
  }
  Verdict v = metric_compatible(*b.geometry, *conn, *g);
  if (v.passed == c.expect_pass) return {c.name, c.anchor, true, {}};
  return {c.name, c.anchor, false,
          c.expect_pass ? v.witness : "metric unexpectedly preserved by " + c.target};
}

std::vector<Job> structural_jobs(const ModelBundle& b, const SuiteOptions& opt) {
  std::vector<Job> jobs;
  const Algebra& alg = *b.algebra;
  const std::string anchor = "structure";
  jobs.push_back([&b, anchor](Rng&) {
    ConfluenceReport r = check_confluence(*b.algebra);
    std::string w;
    if (!r.confluent()) {
      const Overlap& o = r.unresolved.front();
      std::vector<Symbol> letters = o.word;
      w = "overlap " + to_string(Word::from_letters(letters), b.algebra->generators()) + " resolves to " +
          to_string(o.left_reduction, *b.algebra) + " and " + to_string(o.right_reduction, *b.algebra);
    }
    return CheckResult{"confluence of the rewrite system", anchor, r.confluent(), w};
  });
  for (const auto& phi : b.automorphisms) {
    jobs.push_back([&phi, anchor](Rng&) {
      bool ok = verify_respects_relations(phi);
      return CheckResult{phi.name() + " respects the relations", anchor, ok,
                         ok ? "" : "some relation is not preserved"};
    });
    if (phi.declared_inverse()) {
      jobs.push_back([&phi, anchor](Rng&) {
        bool ok = verify_inverse(phi);
        return CheckResult{phi.name() + " is invertible", anchor, ok, ok ? "" : "inverse mismatch"};
      });
    }
  }
  if (!b.calculus) return jobs;
  const CalculusSpec& spec = *b.calculus;
  std::size_t samples = opt.samples;
  jobs.push_back([&spec, anchor](Rng&) {
    auto problems = spec.validation_problems();
    return CheckResult{"calculus data consistent", anchor, problems.empty(),
                       problems.empty() ? "" : problems.front()};
  });
  jobs.push_back([&spec, anchor](Rng&) { return verdict("theta passing", anchor, verify_theta_passing(spec)); });
  for (std::size_t s = 0; s < spec.size(); ++s) {
    auto idx = static_cast<ThetaIndex>(s);
    jobs.push_back([&spec, &alg, idx, samples, anchor, &b](Rng& rng) {
      auto pool = default_coefficient_pool(alg.parameters(), b.substitutions);
      TwistedDerivation e = spec.derivation(idx);
      for (std::size_t i = 0; i < samples; ++i) {
        Element x = random_element(alg, rng, pool);
        Element y = random_element(alg, rng, pool);
        Element lhs = derive_apply(e, alg.mul(x, y));
        Element rhs = alg.mul(derive_apply(e, x), e.twist.apply(y)) + alg.mul(x, derive_apply(e, y));
        if (!(lhs == rhs)) {
          return CheckResult{"twisted Leibniz rule for e_" + spec.labels()[idx], anchor, false,
                             "x = " + to_string(x, alg) + ", y = " + to_string(y, alg)};
        }
      }
      return CheckResult{"twisted Leibniz rule for e_" + spec.labels()[idx], anchor, true, {}};
    });
  }
  jobs.push_back([&spec, &alg, samples, anchor, &b](Rng& rng) {
    auto pool = default_coefficient_pool(alg.parameters(), b.substitutions);
    for (std::size_t i = 0; i < samples; ++i) {
      Element x = random_element(alg, rng, pool);
      Element y = random_element(alg, rng, pool);
      Form lhs = d_zero(spec, alg.mul(x, y));
      Form rhs = wedge(spec, d_zero(spec, x), y) + wedge(spec, x, d_zero(spec, y));
      if (!(lhs == rhs)) {
        return CheckResult{"Leibniz rule for d", anchor, false,
                           "x = " + to_string(x, alg) + ", y = " + to_string(y, alg)};
      }
    }
    return CheckResult{"Leibniz rule for d", anchor, true, {}};
  });
  jobs.push_back([&spec, samples, anchor](Rng& rng) {
    return verdict("calculus is inner", anchor, verify_inner(spec, rng, samples));
  });
  jobs.push_back([&spec, anchor](Rng&) {
    return verdict("square of the inner form is graded-central", anchor, verify_d_squared(spec));
  });
  jobs.push_back([&spec, &alg, anchor](Rng&) {
    for (std::size_t g = 0; g < alg.generators().size(); ++g) {
      Form dd = d_form(spec, d_zero(spec, alg.letter(static_cast<Symbol>(g))));
      if (!dd.is_zero()) {
        return CheckResult{"d squared vanishes on generators and theta", anchor, false,
                           "d(d " + alg.generators().display_name(static_cast<Symbol>(g)) + ") = " +
                               to_string(dd, spec)};
      }
    }
    for (std::size_t s = 0; s < spec.size(); ++s) {
      Form dd = d_form(spec, d_form(spec, Form::basis(static_cast<ThetaIndex>(s))));
      if (!dd.is_zero()) {
        return CheckResult{"d squared vanishes on generators and theta", anchor, false,
                           "d(d " + spec.labels()[s] + ") = " + to_string(dd, spec)};
      }
    }
    return CheckResult{"d squared vanishes on generators and theta", anchor, true, {}};
  });
  for (const auto& ext : b.extensions) {
    jobs.push_back([&spec, &ext, anchor](Rng&) {
      return verdict(ext.base.name() + " is differentiable", anchor, verify_differentiable(spec, ext));
    });
    jobs.push_back([&spec, &ext, anchor](Rng&) {
      try {
        return verdict(ext.base.name() + "^-1 is differentiable", anchor,
                       verify_differentiable(spec, inverse_extension(ext)));
      } catch (const MissingInverse& err) {
        return CheckResult{ext.base.name() + "^-1 is differentiable", anchor, false, err.what()};
      }
    });
  }
  return jobs;
}

std::vector<Job> document_jobs(const ModelBundle& b) {
  std::vector<Job> jobs;
  for (const auto& c : b.document.checks) {
    switch (c.kind) {
      case CheckDecl::Kind::Equal:
        jobs.push_back([&b, &c](Rng&) { return equal_check(b, c.name, c.anchor, c.lhs, c.rhs); });
        if (!c.mirror.empty()) {
          jobs.push_back([&b, &c](Rng&) {
            return equal_check(b, c.name + " (mirrored)", c.anchor, rename(c.lhs, c.mirror),
                               rename(c.rhs, c.mirror));
          });
        }
        break;
      case CheckDecl::Kind::Diagonal:
        jobs.push_back([&b, &c](Rng&) { return diagonal_check(b, c); });
        break;
      case CheckDecl::Kind::Derive:
        jobs.push_back([&b, &c](Rng&) { return derive_check(b, c); });
        break;
      case CheckDecl::Kind::Metric:
        jobs.push_back([&b, &c](Rng&) { return metric_check(b, c); });
        break;
    }
  }
  return jobs;
}

}  // namespace

SuiteReport run_suite(const ModelBundle& bundle, const SuiteOptions& options) {
  SuiteReport report;
  report.model = bundle.document.name;
  std::vector<Job> jobs = structural_jobs(bundle, options);
  for (auto& j : document_jobs(bundle)) jobs.push_back(std::move(j));
  report.checks.resize(jobs.size());
  // Each job gets its own generator, so results do not depend on scheduling.
  auto run = [&](std::size_t i) {
    Rng rng(options.seed + i);
    try {
      report.checks[i] = jobs[i](rng);
    } catch (const std::exception& err) {
      report.checks[i] = {"check #" + std::to_string(i + 1), "error", false, err.what()};
    }
  };
  std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) run(i);
    });
  }
  for (auto& t : pool) t.join();
  return report;
}

// ---------------------------------------------------------------------------
// Reports

std::string render_plain(const SuiteReport& report) {
  std::string out = "model " + report.model + "\n";
  for (const auto& c : report.checks) {
    out += std::string(c.passed ? "  PASS  " : "  FAIL  ") + c.name;
    if (!c.anchor.empty()) out += "  [" + c.anchor + "]";
    out += "\n";
    if (!c.passed && !c.witness.empty()) out += "        " + c.witness + "\n";
  }
  out += std::to_string(report.checks.size() - report.failures()) + " passed, " +
         std::to_string(report.failures()) + " failed\n";
  return out;
}

namespace {

std::string latex_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '_':
      case '&':
      case '%':
      case '#':
      case '$':
      case '{':
      case '}':
        out += '\\';
        out += ch;
        break;
      case '^':
        out += "\\^{}";
        break;
      case '\\':
        out += "\\textbackslash{}";
        break;
      case '~':
        out += "\\~{}";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_latex(const SuiteReport& report) {
  std::string out = "\\begin{tabular}{lll}\n\\hline\ncheck & anchor & status \\\\\n\\hline\n";
  for (const auto& c : report.checks) {
    out += latex_escape(c.name) + " & " + latex_escape(c.anchor) + " & " + (c.passed ? "pass" : "fail") +
           " \\\\\n";
    if (!c.passed && !c.witness.empty()) {
      out += "\\multicolumn{3}{l}{\\texttt{" + latex_escape(c.witness) + "}} \\\\\n";
    }
  }
  out += "\\hline\n\\end{tabular}\n";
  return out;
}

std::string render_json(const SuiteReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model;
  j["passed"] = report.passed();
  j["failures"] = report.failures();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json e;
    e["check_name"] = c.name;
    e["anchor"] = c.anchor;
    e["status"] = c.passed ? "pass" : "fail";
    if (!c.passed) e["witness"] = c.witness;
    j["checks"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Built-in models

ModelBundle build_quantum_torus() { return load_model(quantum_torus_source()); }

ModelDocument glpq_unsubstituted_document() {
  ModelDocument doc = parse_model(glpq_source());
  std::erase_if(doc.substitutions, [](const Binding& b) { return b.name == "r"; });
  doc.name += "_free_r";
  return doc;
}

ModelBundle build_glpq(bool adjoin_det_inverse) {
  ModelBundle base = load_model(glpq_source());
  if (!adjoin_det_inverse) return base;
  const Algebra& alg = *base.algebra;
  const ParameterSet& params = alg.parameters();
  Element det;
  for (const auto& [n, e] : base.elements) {
    if (n == "D") det = e;
  }
  ModelDocument doc = base.document;
  const std::string inv = "Dinv";
  doc.generators.push_back(inv);
  auto scalar_expr = [&](const RationalFunction& c) { return parse_expression("(" + to_string(c, params) + ")"); };
  for (Symbol g : alg.generators().generators()) {
    const std::string& name = alg.generators().base_name(g);
    auto lambda = commutation_scalar(alg, det, alg.letter(g));
    if (!lambda) throw Error("determinant does not commute with " + name + " up to a scalar");
    // D g = l g D gives Dinv g = l^-1 g Dinv.
    Equation eq;
    eq.lhs = Expr::binary(Expr::Kind::Mul, Expr::ident(inv), Expr::ident(name));
    eq.rhs = Expr::binary(Expr::Kind::Mul,
                          Expr::binary(Expr::Kind::Mul, scalar_expr(lambda->inverse()), Expr::ident(name)),
                          Expr::ident(inv));
    doc.relations.push_back(std::move(eq));
  }
  for (std::size_t i = 0; i < base.automorphisms.size(); ++i) {
    const Endomorphism& phi = base.automorphisms[i];
    Element image = phi.apply(det);
    std::optional<RationalFunction> scale;
    if (!image.is_zero()) {
      const auto& [w, c] = *det.terms().begin();
      RationalFunction k = image.coefficient(w) / c;
      if (image == det.scaled(k)) scale = k;
    }
    if (!scale) throw Error(phi.name() + " does not scale the determinant");
    doc.automorphisms[i].images.push_back(
        {inv, Expr::binary(Expr::Kind::Mul, scalar_expr(scale->inverse()), Expr::ident(inv)), {}});
  }
  CheckDecl c;
  c.name = "Dinv commutes with the determinant";
  c.anchor = "determinant";
  c.lhs = Expr::binary(Expr::Kind::Mul, Expr::ident("D"), Expr::ident(inv));
  c.rhs = Expr::binary(Expr::Kind::Mul, Expr::ident(inv), Expr::ident("D"));
  doc.checks.push_back(std::move(c));
  doc.name += "_with_Dinv";
  return build_model(doc);
}

}  // namespace ncdiff

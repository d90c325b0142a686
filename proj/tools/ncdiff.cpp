#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncdiff/errors.hpp"
#include "ncdiff/model.hpp"
#include "ncdiff/sampling.hpp"

namespace {

using ncdiff::ModelBundle;
using json = nlohmann::ordered_json;

enum class Format { Plain, Latex, Json };

// "@quantum_torus" and "@glpq2" name the shipped models.
std::string read_model(const std::string& path) {
  if (path == "@quantum_torus") return ncdiff::quantum_torus_source();
  if (path == "@glpq2") return ncdiff::glpq_source();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ncdiff::Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report_error(const std::exception& err, Format format) {
  if (format == Format::Json) {
    json e;
    e["message"] = err.what();
    if (const auto* m = dynamic_cast<const ncdiff::ModelError*>(&err)) {
      e["message"] = m->bare_message();
      e["line"] = m->line();
      e["column"] = m->column();
      e["token"] = m->token();
    }
    json out;
    out["status"] = "error";
    out["errors"] = json::array({e});
    std::cout << out.dump(2) << "\n";
  } else {
    std::cerr << "error: " << err.what() << "\n";
  }
  return 2;
}

int cmd_nf(const std::string& file, const std::string& expr, Format format) {
  ModelBundle b = ncdiff::load_model(read_model(file));
  ncdiff::Value v = b.evaluate(expr);
  std::string text = ncdiff::render(v, b, format == Format::Latex);
  if (format == Format::Json) {
    json out;
    out["status"] = "ok";
    out["input"] = expr;
    out["normal_form"] = text;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << text << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& file, Format format) {
  ModelBundle b = ncdiff::load_model(read_model(file));
  ncdiff::SuiteOptions opt;
  opt.seed = ncdiff::seed_from_env();
  ncdiff::SuiteReport r = ncdiff::run_suite(b, opt);
  switch (format) {
    case Format::Plain:
      std::cout << ncdiff::render_plain(r);
      break;
    case Format::Latex:
      std::cout << ncdiff::render_latex(r);
      break;
    case Format::Json:
      std::cout << ncdiff::render_json(r);
      break;
  }
  return r.passed() ? 0 : 1;
}

int cmd_relations(const std::string& file, const std::vector<std::string>& forms,
                  const std::vector<std::string>& elements, const std::string& direction, Format format) {
  ModelBundle b = ncdiff::load_model(read_model(file));
  if (!b.calculus) throw ncdiff::Error("model has no calc block");
  std::vector<ncdiff::NamedForm> fs;
  std::vector<ncdiff::NamedElement> es;
  for (const auto& f : forms) fs.emplace_back(f, b.evaluate(f).form);
  for (const auto& e : elements) {
    ncdiff::Value v = b.evaluate(e);
    if (v.level == ncdiff::Value::Level::Form) throw ncdiff::Error(e + " is not an algebra element");
    es.emplace_back(e, v.element());
  }
  auto side = direction == "form-left" ? ncdiff::RelationSide::FormLeft : ncdiff::RelationSide::ElementLeft;
  auto rels = ncdiff::commutation_relations(*b.calculus, fs, es, side);
  const auto& params = b.algebra->parameters();
  if (format == Format::Json) {
    json out;
    out["status"] = "ok";
    out["relations"] = json::array();
    for (const auto& r : rels) {
      json j;
      j["element"] = r.element;
      j["form"] = r.form;
      j["relation"] = ncdiff::to_string(r, params);
      out["relations"].push_back(std::move(j));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& r : rels) {
      std::cout << (format == Format::Latex ? ncdiff::to_latex(r, params) : ncdiff::to_string(r, params)) << "\n";
    }
  }
  return 0;
}

int cmd_confluence(const std::string& file, Format format) {
  ModelBundle b = ncdiff::load_model(read_model(file));
  ncdiff::ConfluenceReport r = ncdiff::check_confluence(*b.algebra);
  const auto& gens = b.algebra->generators();
  if (format == Format::Json) {
    json out;
    out["status"] = r.confluent() ? "pass" : "fail";
    out["overlaps_checked"] = r.overlaps_checked;
    out["unresolved"] = json::array();
    for (const auto& o : r.unresolved) {
      json j;
      j["word"] = ncdiff::to_string(ncdiff::Word::from_letters(o.word), gens);
      j["left"] = ncdiff::to_string(o.left_reduction, *b.algebra);
      j["right"] = ncdiff::to_string(o.right_reduction, *b.algebra);
      out["unresolved"].push_back(std::move(j));
    }
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << r.overlaps_checked << " overlaps checked, " << r.unresolved.size() << " unresolved\n";
    for (const auto& o : r.unresolved) {
      std::cout << "  " << ncdiff::to_string(ncdiff::Word::from_letters(o.word), gens) << ": "
                << ncdiff::to_string(o.left_reduction, *b.algebra) << " vs "
                << ncdiff::to_string(o.right_reduction, *b.algebra) << "\n";
    }
  }
  return r.confluent() ? 0 : 1;
}

int cmd_export(const std::string& file) {
  std::cout << ncdiff::export_model(ncdiff::parse_model(read_model(file)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncdiff: exact differential calculi on noncommutative algebras"};
  app.require_subcommand(1);

  std::string file;
  std::string format_name = "plain";
  const std::map<std::string, Format> formats{
      {"plain", Format::Plain}, {"latex", Format::Latex}, {"json", Format::Json}};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", file, "model file, or @quantum_torus / @glpq2")->required();
    sub->add_option("--format", format_name, "plain, latex or json")
        ->check(CLI::IsMember({"plain", "latex", "json"}));
  };

  std::string expr;
  auto* nf = app.add_subcommand("nf", "normal form of an expression");
  add_common(nf);
  nf->add_option("-e,--expr", expr, "expression")->required();

  auto* verify = app.add_subcommand("verify", "run the model's verification suite");
  add_common(verify);

  std::vector<std::string> forms;
  std::vector<std::string> elements;
  std::string direction = "element-left";
  auto* relations = app.add_subcommand("relations", "derive commutation relations");
  add_common(relations);
  relations->add_option("--forms", forms, "1-forms, comma separated")->delimiter(',')->required();
  relations->add_option("--elements", elements, "elements, comma separated")->delimiter(',')->required();
  relations->add_option("--direction", direction, "element-left or form-left")
      ->check(CLI::IsMember({"element-left", "form-left"}));

  auto* confluence = app.add_subcommand("confluence", "check overlaps of the rewrite rules");
  add_common(confluence);

  auto* exporter = app.add_subcommand("export", "print the parsed model in canonical form");
  exporter->add_option("file", file, "model file")->required();

  CLI11_PARSE(app, argc, argv);
  Format format = formats.at(format_name);
  try {
    if (*nf) return cmd_nf(file, expr, format);
    if (*verify) return cmd_verify(file, format);
    if (*relations) return cmd_relations(file, forms, elements, direction, format);
    if (*confluence) return cmd_confluence(file, format);
    if (*exporter) return cmd_export(file);
  } catch (const std::exception& err) {
    return report_error(err, format);
  }
  return 0;
}

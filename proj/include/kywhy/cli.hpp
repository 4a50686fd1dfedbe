#pragma once

// Command-line front end. run_cli is the whole program so the test suite can
// drive it in-process. Exit codes: 0 = success / true verdict, 1 = false
// verdict / countermodel found / violations / failed check, 2 = usage or
// input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fixtures.hpp"
#include "parser.hpp"
#include "proofs.hpp"
#include "search.hpp"
#include "semantics.hpp"

namespace kywhy {

namespace detail {

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("file '" + path + "' is not valid JSON: " + e.what());
  }
  return j;
}

inline void write_output(const Json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write file '" + out_path + "'");
    f << j.dump(2) << "\n";
  }
}

inline Semantics semantics_from(const std::string& variant, const std::string& context) {
  if (variant == "standard") {
    if (!context.empty()) throw Error("--context requires --variant context");
    return Semantics::standard();
  }
  if (variant == "alt-kyr") {
    if (!context.empty()) throw Error("--context requires --variant context");
    return Semantics::alt_kyr();
  }
  if (variant == "context")
    return Semantics::with_context(context.empty() ? Formula::top() : parse_formula(context));
  throw Error("unknown variant '" + variant + "' (expected standard, alt-kyr or context)");
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"workbench for epistemic logics of knowing why"};
  app.name("kywhy");
  app.require_subcommand(1);

  // ---- parse ----
  auto* parse_cmd = app.add_subcommand("parse", "parse a formula and print its normal form");
  std::string parse_formula_text;
  bool parse_json = false;
  parse_cmd->add_option("--formula", parse_formula_text, "formula text")->required();
  parse_cmd->add_flag("--json", parse_json, "machine-readable output");

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a formula at a world of a model");
  std::string eval_model, eval_world, eval_formula, eval_variant = "standard", eval_context;
  bool eval_json = false;
  eval_cmd->add_option("--model", eval_model, "model JSON file")->required();
  eval_cmd->add_option("--world", eval_world, "world id")->required();
  eval_cmd->add_option("--formula", eval_formula, "formula text")->required();
  eval_cmd->add_option("--variant", eval_variant, "standard | alt-kyr | context");
  eval_cmd->add_option("--context", eval_context, "context formula (variant context)");
  eval_cmd->add_flag("--json", eval_json, "machine-readable output");

  // ---- update ----
  auto* update_cmd = app.add_subcommand("update", "announce a formula and print the updated model");
  std::string update_model_path, update_announce, update_out;
  bool update_json = false;
  update_cmd->add_option("--model", update_model_path, "model JSON file")->required();
  update_cmd->add_option("--announce", update_announce, "announced formula")->required();
  update_cmd->add_option("--out", update_out, "write the updated model here instead of stdout");
  update_cmd->add_flag("--json", update_json, "machine-readable output");

  // ---- validate ----
  auto* validate_cmd = app.add_subcommand("validate", "check model well-formedness");
  std::string validate_model_path;
  bool validate_json = false;
  validate_cmd->add_option("--model", validate_model_path, "model JSON file")->required();
  validate_cmd->add_flag("--json", validate_json, "machine-readable output");

  // ---- factive ----
  auto* factive_cmd = app.add_subcommand("factive", "build the factive companion of a model");
  std::string factive_model_path, factive_out;
  bool factive_json = false;
  factive_cmd->add_option("--model", factive_model_path, "model JSON file")->required();
  factive_cmd->add_option("--out", factive_out, "write the companion here instead of stdout");
  factive_cmd->add_flag("--json", factive_json, "machine-readable output");

  // ---- prove-check ----
  auto* prove_cmd = app.add_subcommand("prove-check", "check a Hilbert-style line derivation");
  std::string prove_proof, prove_system = "skyr", prove_lambda;
  bool prove_json = false;
  prove_cmd->add_option("--proof", prove_proof, "derivation JSON file")->required();
  prove_cmd->add_option("--system", prove_system, "sky | skyr");
  prove_cmd->add_option("--lambda", prove_lambda, "tautology-ground JSON file (array of formulas)");
  prove_cmd->add_flag("--json", prove_json, "machine-readable output");

  // ---- find-countermodel ----
  auto* find_cmd = app.add_subcommand("find-countermodel", "search bounded models refuting a formula");
  std::string find_formula, find_variant = "standard", find_context;
  std::vector<std::string> find_agents, find_atoms;
  int find_max_worlds = 3, find_max_extents = 2;
  std::uint64_t find_max_models = ~0ull;
  bool find_all_relations = false, find_json = false;
  find_cmd->add_option("--formula", find_formula, "formula text")->required();
  find_cmd->add_option("--variant", find_variant, "standard | alt-kyr | context");
  find_cmd->add_option("--context", find_context, "context formula (variant context)");
  find_cmd->add_option("--max-worlds", find_max_worlds, "largest domain size (default 3)");
  find_cmd->add_option("--max-extents", find_max_extents, "extents per tracked formula (default 2)");
  find_cmd->add_option("--agents", find_agents, "agent ids (default: from the formula)");
  find_cmd->add_option("--atoms", find_atoms, "atom ids (default: from the formula)");
  find_cmd->add_option("--max-models", find_max_models, "candidate budget");
  find_cmd->add_flag("--all-relations", find_all_relations, "drop the equivalence-relation requirement");
  find_cmd->add_flag("--json", find_json, "machine-readable output");

  // ---- equiv ----
  auto* equiv_cmd = app.add_subcommand("equiv", "search for a model separating two formulas");
  std::string equiv_left, equiv_right, equiv_variant = "standard", equiv_context;
  int equiv_max_worlds = 3, equiv_max_extents = 2;
  bool equiv_json = false;
  equiv_cmd->add_option("--left", equiv_left, "first formula")->required();
  equiv_cmd->add_option("--right", equiv_right, "second formula")->required();
  equiv_cmd->add_option("--variant", equiv_variant, "standard | alt-kyr | context");
  equiv_cmd->add_option("--context", equiv_context, "context formula (variant context)");
  equiv_cmd->add_option("--max-worlds", equiv_max_worlds, "largest domain size (default 3)");
  equiv_cmd->add_option("--max-extents", equiv_max_extents, "extents per tracked formula (default 2)");
  equiv_cmd->add_flag("--json", equiv_json, "machine-readable output");

  // ---- corpus ----
  auto* corpus_cmd = app.add_subcommand("corpus", "replay the built-in fixture checks");
  std::string corpus_dump_name;
  bool corpus_json = false;
  corpus_cmd->add_option("--dump", corpus_dump_name, "print a named fixture as JSON and exit");
  corpus_cmd->add_flag("--json", corpus_json, "machine-readable output");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*parse_cmd) {
      Formula f = parse_formula(parse_formula_text);
      if (parse_json) {
        Json j{{"formula", print_formula(f)}, {"language", to_string(classify_language(f))}};
        out << j.dump(2) << "\n";
      } else {
        out << print_formula(f) << "\n";
        out << "language: " << to_string(classify_language(f)) << "\n";
      }
      return 0;
    }

    if (*eval_cmd) {
      KyModel m = model_from_json(detail::load_json_file(eval_model));
      Formula f = parse_formula(eval_formula);
      Semantics sem = detail::semantics_from(eval_variant, eval_context);
      EvalResult r = eval(m, eval_world, f, sem);
      if (eval_json) {
        Json j{{"verdict", r.verdict}};
        if (r.witness)
          j["witness"] = Json{{"term", print_term(r.witness->term)},
                              {"extent", m.world_ids(r.witness->extent)}};
        out << j.dump(2) << "\n";
      } else {
        out << (r.verdict ? "true" : "false") << "\n";
        if (r.witness)
          out << "witness: " << print_term(r.witness->term) << " over {"
              << [&] {
                   std::string s;
                   for (const auto& w : m.world_ids(r.witness->extent))
                     s += (s.empty() ? "" : ", ") + w;
                   return s;
                 }()
              << "}\n";
      }
      return r.verdict ? 0 : 1;
    }

    if (*update_cmd) {
      KyModel m = model_from_json(detail::load_json_file(update_model_path));
      KyModel u = update_model(m, parse_formula(update_announce));
      detail::write_output(model_to_json(u), update_out, out);
      (void)update_json;
      return 0;
    }

    if (*validate_cmd) {
      KyModel m = model_from_json(detail::load_json_file(validate_model_path));
      auto violations = validate_model(m);
      if (validate_json) {
        Json j = Json::array();
        for (const auto& v : violations) j.push_back(v.message);
        out << Json{{"valid", violations.empty()}, {"violations", j}}.dump(2) << "\n";
      } else if (violations.empty()) {
        out << "valid\n";
      } else {
        for (const auto& v : violations) out << v.message << "\n";
      }
      return violations.empty() ? 0 : 1;
    }

    if (*factive_cmd) {
      KyModel m = model_from_json(detail::load_json_file(factive_model_path));
      KyModel c = factive_companion(m);
      Json j = model_to_json(c);
      if (factive_json && factive_out.empty()) {
        out << Json{{"already_factive", is_factive(m)}, {"companion", j}}.dump(2) << "\n";
      } else {
        detail::write_output(j, factive_out, out);
      }
      return 0;
    }

    if (*prove_cmd) {
      Derivation d = derivation_from_json(detail::load_json_file(prove_proof));
      ProofSystem sys = proof_system_from_string(prove_system);
      std::vector<Formula> lambda;
      if (!prove_lambda.empty()) lambda = lambda_from_json(detail::load_json_file(prove_lambda));
      CheckResult r = check_derivation(d, sys, lambda);
      if (prove_json) {
        Json j{{"ok", r.ok}};
        if (!r.ok) {
          j["line"] = r.line;
          j["reason"] = r.reason;
        }
        out << j.dump(2) << "\n";
      } else if (r.ok) {
        out << "ok (" << d.size() << " lines)\n";
      } else {
        out << "line " << r.line << ": " << r.reason << "\n";
      }
      return r.ok ? 0 : 1;
    }

    if (*find_cmd) {
      Formula f = parse_formula(find_formula);
      Semantics sem = detail::semantics_from(find_variant, find_context);
      SearchBounds b;
      b.max_worlds = find_max_worlds;
      b.max_extents_per_formula = find_max_extents;
      b.agents = find_agents;
      b.atoms = find_atoms;
      b.max_models = find_max_models;
      b.s5_frames = !find_all_relations;
      auto cm = find_countermodel(f, sem, b);
      if (!cm) {
        if (find_json)
          out << Json{{"countermodel", nullptr}}.dump(2) << "\n";
        else
          out << "no countermodel within bounds\n";
        return 0;
      }
      if (find_json) {
        out << Json{{"countermodel", model_to_json(cm->model)},
                    {"world", cm->world},
                    {"transcript", cm->transcript}}
                   .dump(2)
            << "\n";
      } else {
        out << "countermodel at world " << cm->world << ":\n";
        out << model_to_json(cm->model).dump(2) << "\n";
        for (const auto& line : cm->transcript) out << line << "\n";
      }
      return 1;
    }

    if (*equiv_cmd) {
      Formula f = parse_formula(equiv_left);
      Formula g = parse_formula(equiv_right);
      Semantics sem = detail::semantics_from(equiv_variant, equiv_context);
      SearchBounds b;
      b.max_worlds = equiv_max_worlds;
      b.max_extents_per_formula = equiv_max_extents;
      auto r = check_equivalence(f, g, sem, b);
      if (r.equivalent) {
        if (equiv_json)
          out << Json{{"equivalent_within_bounds", true}}.dump(2) << "\n";
        else
          out << "indistinguishable within bounds\n";
        return 0;
      }
      if (equiv_json) {
        out << Json{{"equivalent_within_bounds", false},
                    {"model", model_to_json(r.witness->model)},
                    {"world", r.witness->world}}
                   .dump(2)
            << "\n";
      } else {
        out << "separated at world " << r.witness->world << ":\n";
        out << model_to_json(r.witness->model).dump(2) << "\n";
      }
      return 1;
    }

    if (*corpus_cmd) {
      if (!corpus_dump_name.empty()) {
        out << corpus_dump(corpus_dump_name).dump(2) << "\n";
        return 0;
      }
      auto results = run_corpus();
      int failures = 0;
      if (corpus_json) {
        Json j = Json::array();
        for (const auto& r : results) {
          j.push_back(Json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
          if (!r.pass) ++failures;
        }
        out << j.dump(2) << "\n";
      } else {
        for (const auto& r : results) {
          out << (r.pass ? "[pass] " : "[FAIL] ") << r.name << " — " << r.detail << "\n";
          if (!r.pass) ++failures;
        }
        out << results.size() - failures << "/" << results.size() << " checks passed\n";
      }
      return failures == 0 ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace kywhy

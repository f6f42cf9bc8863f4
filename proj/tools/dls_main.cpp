// dls: decision procedures for dynamic logics of agents on the discrete
// plane. Thin command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dls.h"

namespace {

int exit_code_for(dls_status s) {
  switch (s) {
    case DLS_OK: return 0;
    case DLS_ERR_PARSE: return 2;
    case DLS_ERR_INVALID_ARG: return 2;
    case DLS_ERR_UNSUPPORTED: return 3;
    case DLS_ERR_BUDGET: return 4;
    case DLS_ERR_INTERNAL: return 5;
  }
  return 5;
}

[[noreturn]] void die(dls_status s) {
  std::cerr << "error: " << dls_last_error() << "\n";
  std::exit(exit_code_for(s));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    std::exit(2);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --formula accepts literal text or @path
std::string resolve_formula_text(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
  return arg;
}

bool parse_pos(const std::string& s, int& x, int& y) {
  std::size_t comma = s.find(',');
  if (comma == std::string::npos) return false;
  try {
    x = std::stoi(s.substr(0, comma));
    y = std::stoi(s.substr(comma + 1));
  } catch (...) {
    return false;
  }
  return true;
}

struct Cleanup {
  dls_formula* f = nullptr;
  dls_formula* g = nullptr;
  dls_model* m = nullptr;
  dls_model* m2 = nullptr;
  dls_sat_result* r = nullptr;
  ~Cleanup() {
    dls_formula_free(f);
    dls_formula_free(g);
    dls_model_free(m);
    dls_model_free(m2);
    dls_sat_result_free(r);
  }
};

dls_model* load_model(const std::string& path) {
  std::string text = read_file(path);
  dls_model* m = nullptr;
  dls_status s = dls_model_parse(text.c_str(), &m);
  if (s != DLS_OK) die(s);
  return m;
}

std::string agents_of_model(dls_model* m) {
  // agent names straight out of the rendered model text
  char* text = nullptr;
  if (dls_model_render(m, &text) != DLS_OK) return "";
  std::istringstream in(text);
  dls_string_free(text);
  std::string out, kw, name;
  int x, y;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    if (ls >> kw && kw == "agent" && ls >> name >> x >> y) {
      if (!out.empty()) out += ',';
      out += name;
    }
  }
  return out;
}

void note_perception(dls_formula* f) {
  if (dls_formula_has_perception(f))
    std::cerr << "note: perception verdicts range over a finitized variant "
                 "window\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision procedures for dynamic logics of the discrete plane"};
  app.require_subcommand(1);

  std::string model_path, model2_path, formula_arg, program_arg;
  std::string at_arg = "0,0", at2_arg = "0,0", fragment_arg = "starfree";
  std::string schema_arg = "all";
  int depth = 0, trials = 200;
  std::uint64_t seed = 0xD15C0DEull;
  std::uint64_t budget_cells = 0, budget_candidates = 0;
  std::uint32_t budget_ms = 0;

  auto add_budget_flags = [&](CLI::App* cmd) {
    cmd->add_option("--budget-cells", budget_cells,
                    "max open (atom,cell) pairs for the search");
    cmd->add_option("--budget-candidates", budget_candidates,
                    "max search nodes");
    cmd->add_option("--budget-ms", budget_ms, "wall-clock cap in ms");
  };

  CLI::App* c_check = app.add_subcommand("check", "model-check a formula");
  c_check->add_option("--model,-m", model_path, "model file")->required();
  c_check->add_option("--formula,-f", formula_arg, "formula text or @path");
  c_check->add_option("FORMULA", formula_arg, "formula text");
  c_check->add_option("--at", at_arg, "evaluation position x,y");

  CLI::App* c_sat = app.add_subcommand("sat", "decide satisfiability");
  c_sat->add_option("--fragment", fragment_arg, "starfree|positions");
  c_sat->add_option("--formula,-f", formula_arg, "formula text or @path");
  c_sat->add_option("FORMULA", formula_arg, "formula text");
  add_budget_flags(c_sat);

  CLI::App* c_valid = app.add_subcommand("valid", "decide validity");
  c_valid->add_option("--fragment", fragment_arg, "starfree|positions");
  c_valid->add_option("--formula,-f", formula_arg, "formula text or @path");
  c_valid->add_option("FORMULA", formula_arg, "formula text");
  add_budget_flags(c_valid);

  CLI::App* c_reduce =
      app.add_subcommand("reduce", "reduce to the atomic-box core");
  c_reduce->add_option("--formula,-f", formula_arg, "formula text or @path");
  c_reduce->add_option("FORMULA", formula_arg, "formula text");

  CLI::App* c_sim = app.add_subcommand("simulate", "run a motion program");
  c_sim->add_option("--model,-m", model_path, "model file")->required();
  c_sim->add_option("--program,-p", program_arg, "motion program text");
  c_sim->add_option("PROGRAM", program_arg, "motion program text");
  c_sim->add_option("--formula,-f", formula_arg,
                    "formula to evaluate along the trace");
  c_sim->add_option("--at", at_arg, "anchor position x,y");

  CLI::App* c_bisim =
      app.add_subcommand("bisim", "decide depth-bounded bisimilarity");
  c_bisim->add_option("--model,-m", model_path, "first model")->required();
  c_bisim->add_option("--model2", model2_path, "second model")->required();
  c_bisim->add_option("--at", at_arg, "position in the first model");
  c_bisim->add_option("--at2", at2_arg, "position in the second model");
  c_bisim->add_option("--depth", depth, "bisimulation depth")->required();

  CLI::App* c_probe =
      app.add_subcommand("probe", "probe axiom schemas on random models");
  c_probe->add_option("--schema", schema_arg, "schema id or 'all'");
  c_probe->add_option("--trials", trials, "trials per schema");
  c_probe->add_option("--seed", seed, "random seed");
  c_probe->add_flag_callback("--list", [] {
    for (int i = 0; i < dls_schema_count(); ++i)
      std::cout << dls_schema_id(i) << "\n";
    std::exit(0);
  });

  CLI11_PARSE(app, argc, argv);

  int x = 0, y = 0, x2 = 0, y2 = 0;
  if (!parse_pos(at_arg, x, y) || !parse_pos(at2_arg, x2, y2)) {
    std::cerr << "error: positions must be given as x,y\n";
    return 2;
  }

  dls_budget budget{budget_cells, budget_candidates, budget_ms};
  dls_fragment fragment = fragment_arg == "positions" ? DLS_FRAGMENT_POSITIONS
                                                      : DLS_FRAGMENT_STARFREE;
  if (fragment_arg != "positions" && fragment_arg != "starfree") {
    std::cerr << "error: unknown fragment '" << fragment_arg << "'\n";
    return 3;
  }

  Cleanup owned;

  if (c_check->parsed()) {
    if (formula_arg.empty()) {
      std::cerr << "error: no formula given\n";
      return 2;
    }
    owned.m = load_model(model_path);
    std::string text = resolve_formula_text(formula_arg);
    std::string agents = agents_of_model(owned.m);
    dls_status s = dls_formula_parse(text.c_str(), agents.c_str(), &owned.f);
    if (s != DLS_OK) die(s);
    note_perception(owned.f);
    int verdict = 0;
    s = dls_check(owned.m, owned.f, x, y, &verdict);
    if (s != DLS_OK) die(s);
    std::cout << (verdict ? "true" : "false") << "\n";
    return 0;
  }

  if (c_sat->parsed() || c_valid->parsed()) {
    if (formula_arg.empty()) {
      std::cerr << "error: no formula given\n";
      return 2;
    }
    std::string text = resolve_formula_text(formula_arg);
    dls_status s = dls_formula_parse(text.c_str(), nullptr, &owned.f);
    if (s != DLS_OK) die(s);
    if (c_valid->parsed()) {
      int verdict = 0;
      s = dls_valid(owned.f, fragment, &budget, &verdict);
      if (s == DLS_ERR_BUDGET) {
        std::cout << "INCONCLUSIVE(budget)\n";
        std::cerr << dls_last_error() << "\n";
        return 4;
      }
      if (s != DLS_OK) die(s);
      std::cout << (verdict ? "valid" : "invalid") << "\n";
      return 0;
    }
    s = dls_sat(owned.f, fragment, &budget, &owned.r);
    if (s != DLS_OK) die(s);
    switch (dls_sat_result_verdict(owned.r)) {
      case DLS_SAT: {
        int wx = 0, wy = 0;
        dls_sat_result_position(owned.r, &wx, &wy);
        std::cout << "SAT\n";
        std::cerr << "witness position " << wx << "," << wy
                  << " (bound " << dls_sat_result_bound(owned.r) << ")\n";
        dls_model* witness = nullptr;
        if (dls_sat_result_witness(owned.r, &witness) == DLS_OK) {
          char* text_out = nullptr;
          if (dls_model_render(witness, &text_out) == DLS_OK) {
            std::cout << text_out;
            dls_string_free(text_out);
          }
          dls_model_free(witness);
        }
        return 0;
      }
      case DLS_UNSAT:
        std::cout << "UNSAT\n";
        return 0;
      case DLS_INCONCLUSIVE:
        std::cout << "INCONCLUSIVE(budget)\n";
        std::cerr << dls_sat_result_note(owned.r) << "\n";
        return 4;
    }
    return 5;
  }

  if (c_reduce->parsed()) {
    if (formula_arg.empty()) {
      std::cerr << "error: no formula given\n";
      return 2;
    }
    std::string text = resolve_formula_text(formula_arg);
    dls_status s = dls_formula_parse(text.c_str(), nullptr, &owned.f);
    if (s != DLS_OK) die(s);
    s = dls_reduce(owned.f, &owned.g);
    if (s != DLS_OK) die(s);
    char* out = nullptr;
    s = dls_formula_render(owned.g, &out);
    if (s != DLS_OK) die(s);
    std::cout << out << "\n";
    dls_string_free(out);
    return 0;
  }

  if (c_sim->parsed()) {
    if (program_arg.empty()) {
      std::cerr << "error: no program given\n";
      return 2;
    }
    owned.m = load_model(model_path);
    if (!formula_arg.empty()) {
      std::string text = resolve_formula_text(formula_arg);
      std::string agents = agents_of_model(owned.m);
      dls_status s = dls_formula_parse(text.c_str(), agents.c_str(), &owned.f);
      if (s != DLS_OK) die(s);
      note_perception(owned.f);
    }
    char* trace = nullptr;
    dls_status s = dls_simulate(owned.m, program_arg.c_str(), owned.f, x, y, &trace);
    if (s != DLS_OK) die(s);
    std::cout << trace;
    dls_string_free(trace);
    return 0;
  }

  if (c_bisim->parsed()) {
    owned.m = load_model(model_path);
    owned.m2 = load_model(model2_path);
    int result = 0;
    dls_status s = dls_bisim(owned.m, x, y, owned.m2, x2, y2, depth, &result);
    if (s != DLS_OK) die(s);
    std::cout << (result ? "bisimilar" : "not bisimilar") << "\n";
    return result ? 0 : 1;
  }

  if (c_probe->parsed()) {
    char* report = nullptr;
    int counterexamples = 0;
    dls_status s =
        dls_probe(schema_arg.c_str(), trials, seed, &report, &counterexamples);
    if (s != DLS_OK) die(s);
    std::cout << report;
    dls_string_free(report);
    return counterexamples == 0 ? 0 : 1;
  }

  return 2;
}

#include "dls.h"

#include <cstdlib>
#include <memory>
#include <cstring>
#include <exception>
#include <string>

#include "dls/axioms.hpp"
#include "dls/modelcheck.hpp"
#include "dls/models.hpp"
#include "dls/motion.hpp"
#include "dls/sat.hpp"
#include "dls/syntax.hpp"

struct dls_formula {
  dls::FormulaPtr f;
  std::set<dls::AgentId> agents;  // declared agent set at parse time
};

struct dls_model {
  dls::SpatialModel m;
};

struct dls_sat_result {
  dls::SatResult r;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
dls_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const dls::ParseError& e) {
    set_error(std::string(e.what()) + " (at offset " +
              std::to_string(e.position()) + ")");
    return DLS_ERR_PARSE;
  } catch (const dls::UnsupportedError& e) {
    set_error(e.what());
    return DLS_ERR_UNSUPPORTED;
  } catch (const dls::BudgetError& e) {
    set_error(e.what());
    return DLS_ERR_BUDGET;
  } catch (const dls::ModelError& e) {
    set_error(e.what());
    return DLS_ERR_INVALID_ARG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return DLS_ERR_INTERNAL;
  }
}

dls::Budget to_budget(const dls_budget* b) {
  dls::Budget out;
  if (b) {
    if (b->max_atom_cells) out.max_atom_cells = b->max_atom_cells;
    if (b->max_nodes) out.max_nodes = b->max_nodes;
    if (b->wall_ms) out.wall_ms = b->wall_ms;
  }
  return out;
}

std::set<dls::AgentId> parse_agent_list(const char* csv) {
  std::set<dls::AgentId> out;
  if (!csv) return out;
  std::string s(csv);
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    std::string name = s.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!name.empty() && (name.front() == ' ')) name.erase(name.begin());
    while (!name.empty() && (name.back() == ' ')) name.pop_back();
    if (!name.empty()) out.insert(dls::AgentId{name});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

extern "C" {

const char* dls_version(void) { return "0.1.0"; }

const char* dls_last_error(void) { return g_last_error.c_str(); }

void dls_string_free(char* s) { ::free(s); }

dls_status dls_formula_parse(const char* text, const char* agents,
                             dls_formula** out) {
  return guarded([&]() -> dls_status {
    if (!text || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    auto handle = std::make_unique<dls_formula>();
    if (agents) {
      handle->agents = parse_agent_list(agents);
    } else {
      handle->agents = dls::scan_agents(text);
    }
    handle->f = dls::parse_formula(text, handle->agents);
    *out = handle.release();
    return DLS_OK;
  });
}

dls_status dls_formula_render(const dls_formula* f, char** out) {
  return guarded([&]() -> dls_status {
    if (!f || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    *out = dup_string(dls::render_formula(f->f));
    return DLS_OK;
  });
}

int dls_formula_degree(const dls_formula* f) {
  return f ? dls::modal_degree(f->f) : -1;
}

int dls_formula_size(const dls_formula* f) {
  return f ? dls::formula_size(f->f) : -1;
}

int dls_formula_has_perception(const dls_formula* f) {
  return f && dls::features(f->f).sees ? 1 : 0;
}

void dls_formula_free(dls_formula* f) { delete f; }

dls_status dls_model_parse(const char* text, dls_model** out) {
  return guarded([&]() -> dls_status {
    if (!text || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    auto handle = new dls_model{dls::parse_model(text)};
    *out = handle;
    return DLS_OK;
  });
}

dls_status dls_model_render(const dls_model* m, char** out) {
  return guarded([&]() -> dls_status {
    if (!m || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    *out = dup_string(dls::render_model(m->m));
    return DLS_OK;
  });
}

void dls_model_free(dls_model* m) { delete m; }

dls_status dls_check(const dls_model* m, const dls_formula* f, int x, int y,
                     int* verdict) {
  return guarded([&]() -> dls_status {
    if (!m || !f || !verdict) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    *verdict = dls::evaluate(m->m, {x, y}, f->f) ? 1 : 0;
    return DLS_OK;
  });
}

dls_status dls_reduce(const dls_formula* f, dls_formula** out) {
  return guarded([&]() -> dls_status {
    if (!f || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    dls::FormulaPtr g = f->f;
    if (dls::features(g).coalition)
      g = dls::expand_all_coalitions(g, f->agents);
    if (dls::features(g).motion) g = dls::red(g);
    g = dls::reduce_star_free(g);
    auto handle = new dls_formula{g, f->agents};
    *out = handle;
    return DLS_OK;
  });
}

dls_status dls_sat(const dls_formula* f, dls_fragment fragment,
                   const dls_budget* budget, dls_sat_result** out) {
  return guarded([&]() -> dls_status {
    if (!f || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    dls::Fragment frag = fragment == DLS_FRAGMENT_POSITIONS
                             ? dls::Fragment::Positions
                             : dls::Fragment::StarFree;
    auto handle = new dls_sat_result{
        dls::decide_sat(f->f, frag, to_budget(budget), f->agents)};
    *out = handle;
    return DLS_OK;
  });
}

dls_verdict dls_sat_result_verdict(const dls_sat_result* r) {
  if (!r) return DLS_INCONCLUSIVE;
  switch (r->r.verdict) {
    case dls::Verdict::Satisfiable: return DLS_SAT;
    case dls::Verdict::Unsatisfiable: return DLS_UNSAT;
    case dls::Verdict::Inconclusive: return DLS_INCONCLUSIVE;
  }
  return DLS_INCONCLUSIVE;
}

int dls_sat_result_bound(const dls_sat_result* r) {
  return r ? r->r.bound_used : -1;
}

dls_status dls_sat_result_witness(const dls_sat_result* r, dls_model** out) {
  return guarded([&]() -> dls_status {
    if (!r || !out || !r->r.witness) {
      set_error("no witness available");
      return DLS_ERR_INVALID_ARG;
    }
    *out = new dls_model{*r->r.witness};
    return DLS_OK;
  });
}

dls_status dls_sat_result_position(const dls_sat_result* r, int* x, int* y) {
  if (!r || !x || !y) {
    set_error("null argument");
    return DLS_ERR_INVALID_ARG;
  }
  *x = r->r.position.x;
  *y = r->r.position.y;
  return DLS_OK;
}

const char* dls_sat_result_note(const dls_sat_result* r) {
  return r ? r->r.note.c_str() : "";
}

void dls_sat_result_free(dls_sat_result* r) { delete r; }

dls_status dls_valid(const dls_formula* f, dls_fragment fragment,
                     const dls_budget* budget, int* verdict) {
  return guarded([&]() -> dls_status {
    if (!f || !verdict) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    dls::Fragment frag = fragment == DLS_FRAGMENT_POSITIONS
                             ? dls::Fragment::Positions
                             : dls::Fragment::StarFree;
    switch (dls::validity(f->f, frag, to_budget(budget))) {
      case dls::Validity::Valid: *verdict = 1; return DLS_OK;
      case dls::Validity::Invalid: *verdict = 0; return DLS_OK;
      case dls::Validity::Inconclusive:
        set_error("budget exhausted before a verdict was reached");
        return DLS_ERR_BUDGET;
    }
    return DLS_ERR_INTERNAL;
  });
}

dls_status dls_bisim(const dls_model* m1, int x1, int y1, const dls_model* m2,
                     int x2, int y2, int depth, int* result) {
  return guarded([&]() -> dls_status {
    if (!m1 || !m2 || !result) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    if (depth < 0) {
      set_error("depth must be nonnegative");
      return DLS_ERR_INVALID_ARG;
    }
    std::set<dls::Atom> atoms = m1->m.atoms();
    for (const auto& a : m2->m.atoms()) atoms.insert(a);
    std::set<dls::AgentId> agents = m1->m.agents();
    for (const auto& a : m2->m.agents()) agents.insert(a);
    *result = dls::bounded_bisim(m1->m, {x1, y1}, m2->m, {x2, y2}, depth,
                                 atoms, agents)
                  ? 1
                  : 0;
    return DLS_OK;
  });
}

}  // extern "C"

// ---------------------------------------------------------------------------
// Simulation

namespace {

struct RunResult {
  bool blocked = false;
  std::string block_reason;
  std::vector<std::pair<std::string, dls::SpatialModel>> steps;
  dls::SpatialModel final;
};

// Tests stay anchored at the starting evaluation position; a choice takes
// the first branch that runs to completion.
RunResult run_motion(const dls::SpatialModel& m, dls::Pos anchor,
                     const dls::MotionProgramPtr& p) {
  using K = dls::MotionProgram::Kind;
  RunResult r;
  r.final = m;
  switch (p->kind()) {
    case K::Joint: {
      dls::SpatialModel next = dls::apply_joint_action(m, p->action());
      r.steps.emplace_back(dls::render_joint_action(p->action()), next);
      r.final = std::move(next);
      return r;
    }
    case K::Seq: {
      RunResult left = run_motion(m, anchor, p->left());
      if (left.blocked) return left;
      RunResult right = run_motion(left.final, anchor, p->right());
      left.steps.insert(left.steps.end(), right.steps.begin(), right.steps.end());
      left.blocked = right.blocked;
      left.block_reason = right.block_reason;
      left.final = right.final;
      return left;
    }
    case K::Choice: {
      RunResult first = run_motion(m, anchor, p->left());
      if (!first.blocked) return first;
      RunResult second = run_motion(m, anchor, p->right());
      if (!second.blocked) return second;
      return first;
    }
    case K::Test: {
      if (dls::evaluate(m, anchor, p->condition())) return r;
      r.blocked = true;
      r.block_reason =
          "test failed: " + dls::render_formula(p->condition());
      return r;
    }
  }
  return r;
}

std::string positions_line(const dls::SpatialModel& m) {
  std::string out;
  bool first = true;
  for (const auto& [agent, pos] : m.positions()) {
    if (!first) out += ' ';
    out += agent.name + "=(" + std::to_string(pos.x) + "," +
           std::to_string(pos.y) + ")";
    first = false;
  }
  if (first) out += "(no agents)";
  return out;
}

dls::MotionProgramPtr spatial_tests_to_motion(const dls::SpatialProgramPtr& p) {
  using K = dls::SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Test: return dls::MotionProgram::test(p->condition());
    case K::Seq:
      return dls::MotionProgram::seq(spatial_tests_to_motion(p->left()),
                                     spatial_tests_to_motion(p->right()));
    case K::Choice:
      return dls::MotionProgram::choice(spatial_tests_to_motion(p->left()),
                                        spatial_tests_to_motion(p->right()));
    default:
      throw dls::UnsupportedError("not a motion program");
  }
}

}  // namespace

extern "C" {

dls_status dls_simulate(const dls_model* m, const char* program,
                        const dls_formula* formula_or_null, int x, int y,
                        char** out) {
  return guarded([&]() -> dls_status {
    if (!m || !program || !out) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    // reuse the formula grammar: a bracketed program in front of `true`
    dls::FormulaPtr probe = dls::parse_formula(
        "[" + std::string(program) + "]true", m->m.agents());
    dls::MotionProgramPtr prog;
    if (probe->kind() == dls::Formula::Kind::BoxM) {
      prog = probe->mprog();
    } else if (probe->kind() == dls::Formula::Kind::BoxS) {
      prog = spatial_tests_to_motion(probe->sprog());
    } else {
      set_error("not a motion program");
      return DLS_ERR_PARSE;
    }

    dls::Pos anchor{x, y};
    auto verdict_suffix = [&](const dls::SpatialModel& model) -> std::string {
      if (!formula_or_null) return "";
      return std::string("  formula=") +
             (dls::evaluate(model, anchor, formula_or_null->f) ? "true" : "false");
    };

    std::string trace =
        "initial: " + positions_line(m->m) + verdict_suffix(m->m) + "\n";
    RunResult r = run_motion(m->m, anchor, prog);
    for (const auto& [label, model] : r.steps)
      trace += "after " + label + ": " + positions_line(model) +
               verdict_suffix(model) + "\n";
    if (r.blocked) trace += "blocked: " + r.block_reason + "\n";
    *out = dup_string(trace);
    return DLS_OK;
  });
}

// ---------------------------------------------------------------------------
// Probing

int dls_schema_count(void) {
  return static_cast<int>(dls::schema_registry().size());
}

const char* dls_schema_id(int index) {
  const auto& reg = dls::schema_registry();
  if (index < 0 || static_cast<std::size_t>(index) >= reg.size()) return nullptr;
  return reg[static_cast<std::size_t>(index)].id.c_str();
}

dls_status dls_probe(const char* schema_id, int trials, uint64_t seed,
                     char** report, int* counterexamples) {
  return guarded([&]() -> dls_status {
    if (!schema_id || !report || trials < 0) {
      set_error("null argument");
      return DLS_ERR_INVALID_ARG;
    }
    dls::ProbeParams params;
    params.seed = seed;
    std::string text;
    int bad = 0;
    if (std::string(schema_id) == "all") {
      for (const dls::Schema& s : dls::schema_registry()) {
        dls::ProbeReport r = dls::probe(s, trials, params);
        bad += static_cast<int>(r.counterexamples.size());
        text += dls::to_text(r);
        text += "\n";
      }
    } else {
      const dls::Schema* s = dls::find_schema(schema_id);
      if (!s) {
        set_error("unknown schema '" + std::string(schema_id) + "'");
        return DLS_ERR_INVALID_ARG;
      }
      dls::ProbeReport r = dls::probe(*s, trials, params);
      bad = static_cast<int>(r.counterexamples.size());
      text = dls::to_text(r);
    }
    *report = dup_string(text);
    if (counterexamples) *counterexamples = bad;
    return DLS_OK;
  });
}

}  // extern "C"

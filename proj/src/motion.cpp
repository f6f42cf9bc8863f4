#include "dls/motion.hpp"

#include <algorithm>
#include <vector>

#include "dls/modelcheck.hpp"

namespace dls {

SpatialProgramPtr relocation_program(const AgentId& i, const JointAction& delta) {
  switch (delta.action(i)) {
    case Action::Up: return SpatialProgram::move(Move::Down);
    case Action::Down: return SpatialProgram::move(Move::Up);
    case Action::Right: return SpatialProgram::move(Move::Left);
    case Action::Left: return SpatialProgram::move(Move::Right);
    case Action::Stay: return SpatialProgram::test(Formula::verum());
  }
  return SpatialProgram::test(Formula::verum());
}

// ---------------------------------------------------------------------------
// Motion elimination

namespace {

FormulaPtr red_joint(const JointAction& delta, const FormulaPtr& f);

FormulaPtr red_impl(const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return f;
    case K::Not:
      return Formula::negation(red_impl(f->child()));
    case K::And:
      return Formula::conjunction(red_impl(f->left()), red_impl(f->right()));
    case K::BoxS: {
      const auto& p = f->sprog();
      using PK = SpatialProgram::Kind;
      switch (p->kind()) {
        case PK::Move:
          return Formula::box(p, red_impl(f->child()));
        case PK::Seq:
          return red_impl(Formula::box(
              p->left(), Formula::box(p->right(), f->child())));
        case PK::Choice:
          return Formula::conjunction(
              red_impl(Formula::box(p->left(), f->child())),
              red_impl(Formula::box(p->right(), f->child())));
        case PK::Test:
          return red_impl(Formula::negation(Formula::conjunction(
              p->condition(), Formula::negation(f->child()))));
        case PK::Star:
          throw UnsupportedError("iteration cannot be reduced away");
      }
      throw UnsupportedError("bad program");
    }
    case K::BoxM: {
      const auto& p = f->mprog();
      using PK = MotionProgram::Kind;
      switch (p->kind()) {
        case PK::Joint:
          return red_joint(p->action(), f->child());
        case PK::Seq:
          return red_impl(Formula::box(
              p->left(), Formula::box(p->right(), f->child())));
        case PK::Choice:
          return Formula::conjunction(
              red_impl(Formula::box(p->left(), f->child())),
              red_impl(Formula::box(p->right(), f->child())));
        case PK::Test:
          return red_impl(Formula::negation(Formula::conjunction(
              p->condition(), Formula::negation(f->child()))));
      }
      throw UnsupportedError("bad program");
    }
    case K::Sees:
      throw UnsupportedError("perception operators have no reduction");
    case K::Coalition:
      throw UnsupportedError("coalition operators must be expanded before reduction");
  }
  throw UnsupportedError("bad formula");
}

// Pushes a single joint-action box through f until it meets an atom, where
// it vanishes, or a positional atom, where it turns into the relocation
// program. Inner boxes are dealt with innermost-first.
FormulaPtr red_joint(const JointAction& delta, const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::False:
      return f;
    case K::Here:
      return Formula::box(relocation_program(f->agent(), delta), f);
    case K::Not:
      return Formula::negation(red_joint(delta, f->child()));
    case K::And:
      return Formula::conjunction(red_joint(delta, f->left()),
                                  red_joint(delta, f->right()));
    case K::BoxS: {
      const auto& p = f->sprog();
      using PK = SpatialProgram::Kind;
      switch (p->kind()) {
        case PK::Move:
          return Formula::box(p, red_joint(delta, f->child()));
        case PK::Seq:
          return red_joint(delta, Formula::box(p->left(),
                                               Formula::box(p->right(), f->child())));
        case PK::Choice:
          return red_joint(delta, Formula::conjunction(
                                      Formula::box(p->left(), f->child()),
                                      Formula::box(p->right(), f->child())));
        case PK::Test:
          return red_joint(delta,
                           Formula::negation(Formula::conjunction(
                               p->condition(), Formula::negation(f->child()))));
        case PK::Star:
          throw UnsupportedError("iteration cannot be reduced away");
      }
      throw UnsupportedError("bad program");
    }
    case K::BoxM:
      return red_joint(delta, red_impl(f));
    case K::Sees:
      throw UnsupportedError("perception operators have no reduction");
    case K::Coalition:
      throw UnsupportedError("coalition operators must be expanded before reduction");
  }
  throw UnsupportedError("bad formula");
}

}  // namespace

FormulaPtr red(const FormulaPtr& f) { return red_impl(f); }

// ---------------------------------------------------------------------------
// Coalition expansion

namespace {

std::vector<std::map<AgentId, Action>> action_maps(const std::vector<AgentId>& agents) {
  std::vector<std::map<AgentId, Action>> out;
  out.emplace_back();
  for (const AgentId& agent : agents) {
    std::vector<std::map<AgentId, Action>> next;
    next.reserve(out.size() * 5);
    for (const auto& m : out)
      for (Action act : kAllActions) {
        auto m2 = m;
        m2[agent] = act;
        next.push_back(std::move(m2));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

FormulaPtr expand_coalition(const std::set<AgentId>& members, const FormulaPtr& f,
                            const std::set<AgentId>& all_agents) {
  std::vector<AgentId> crew, rest;
  for (const AgentId& a : members) {
    if (!all_agents.contains(a))
      throw ModelError("coalition member '" + a.name + "' is not a declared agent");
    crew.push_back(a);
  }
  for (const AgentId& a : all_agents)
    if (!members.contains(a)) rest.push_back(a);

  FormulaPtr result;
  for (const auto& cm : action_maps(crew)) {
    FormulaPtr conj;
    for (const auto& rm : action_maps(rest)) {
      auto full = cm;
      full.insert(rm.begin(), rm.end());
      FormulaPtr boxed =
          Formula::box(MotionProgram::joint(JointAction(std::move(full))), f);
      conj = conj ? Formula::conjunction(std::move(conj), std::move(boxed))
                  : std::move(boxed);
    }
    result = result ? Formula::disjunction(std::move(result), std::move(conj))
                    : std::move(conj);
  }
  return result;
}

namespace {

SpatialProgramPtr expand_in_program(const SpatialProgramPtr& p,
                                    const std::set<AgentId>& all);
MotionProgramPtr expand_in_program(const MotionProgramPtr& p,
                                   const std::set<AgentId>& all);

FormulaPtr expand_all(const FormulaPtr& f, const std::set<AgentId>& all) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return f;
    case K::Not:
      return Formula::negation(expand_all(f->child(), all));
    case K::And:
      return Formula::conjunction(expand_all(f->left(), all),
                                  expand_all(f->right(), all));
    case K::BoxS:
      return Formula::box(expand_in_program(f->sprog(), all),
                          expand_all(f->child(), all));
    case K::BoxM:
      return Formula::box(expand_in_program(f->mprog(), all),
                          expand_all(f->child(), all));
    case K::Sees:
      return Formula::sees(f->agent(), f->sees_range(),
                           expand_all(f->child(), all));
    case K::Coalition:
      return expand_coalition(f->members(), expand_all(f->child(), all), all);
  }
  return f;
}

SpatialProgramPtr expand_in_program(const SpatialProgramPtr& p,
                                    const std::set<AgentId>& all) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return p;
    case K::Seq:
      return SpatialProgram::seq(expand_in_program(p->left(), all),
                                 expand_in_program(p->right(), all));
    case K::Choice:
      return SpatialProgram::choice(expand_in_program(p->left(), all),
                                    expand_in_program(p->right(), all));
    case K::Star:
      return SpatialProgram::star(expand_in_program(p->body(), all));
    case K::Test:
      return SpatialProgram::test(expand_all(p->condition(), all));
  }
  return p;
}

MotionProgramPtr expand_in_program(const MotionProgramPtr& p,
                                   const std::set<AgentId>& all) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint: return p;
    case K::Seq:
      return MotionProgram::seq(expand_in_program(p->left(), all),
                                expand_in_program(p->right(), all));
    case K::Choice:
      return MotionProgram::choice(expand_in_program(p->left(), all),
                                   expand_in_program(p->right(), all));
    case K::Test:
      return MotionProgram::test(expand_all(p->condition(), all));
  }
  return p;
}

}  // namespace

FormulaPtr expand_all_coalitions(const FormulaPtr& f,
                                 const std::set<AgentId>& all_agents) {
  return expand_all(f, all_agents);
}

// ---------------------------------------------------------------------------
// Perception

const char* sees_finitization_note() {
  return "perception verdicts range over a finitized variant window "
         "(radius k+deg+1 plus one far placement per relocatable agent)";
}

bool check_sees(const SpatialModel& m, const AgentId& i, int range,
                const FormulaPtr& f, const Budget& budget) {
  if (range < 0) throw ModelError("perception range must be nonnegative");
  Features ft = features(f);
  if (ft.motion || ft.sees || ft.coalition)
    throw UnsupportedError("perception bodies must be static formulas");
  FormulaPtr core = normalize_compass(f);
  Pos center = m.position_of(i);
  const int k = range;
  const int d = modal_degree(core);
  const int w = k + d + 1;

  auto in_sight = [&](Pos p) {
    return std::abs(p.x - center.x) <= k && std::abs(p.y - center.y) <= k;
  };
  auto in_window = [&](Pos p) {
    return std::abs(p.x - center.x) <= w && std::abs(p.y - center.y) <= w;
  };

  Vocabulary voc = vocabulary(core);
  for (const AgentId& a : voc.agents)
    if (!m.position(a))
      throw ModelError("agent '" + a.name + "' does not occur in the model");

  ModelSearchSpace space;
  std::map<AgentId, Pos> fixed;
  for (const auto& [agent, pos] : m.positions()) {
    // agents in sight are pinned; relocatable ones may move anywhere out of
    // sight (within the window, or to the canonical far cell)
    if (in_sight(pos) || !voc.agents.contains(agent)) fixed[agent] = pos;
    else space.free_agents.push_back(agent);
  }
  std::vector<Pos> candidates;
  for (int x = center.x - w; x <= center.x + w; ++x)
    for (int y = center.y - w; y <= center.y + w; ++y)
      if (!in_sight({x, y})) candidates.push_back({x, y});
  candidates.push_back({center.x + w + 1, center.y});
  for (const AgentId& a : space.free_agents) space.agent_candidates[a] = candidates;

  space.base = SpatialModel::with_inferred_bound(std::move(fixed), m.valuation());
  space.free_atoms = voc.atoms;
  space.free_cell = [=](Pos p) { return in_window(p) && !in_sight(p); };
  int extent = std::max(std::abs(center.x), std::abs(center.y)) + w + 1;
  space.eval_bound = std::max(m.bound(), extent);

  std::uint64_t window_cells =
      static_cast<std::uint64_t>(2 * w + 1) * (2 * w + 1) -
      static_cast<std::uint64_t>(2 * k + 1) * (2 * k + 1);
  if (voc.atoms.size() * window_cells > budget.max_atom_cells)
    throw BudgetError("perception cell budget exceeded");

  // S(i,k)f holds iff no indistinguishable variant refutes f at the agent.
  auto refutation =
      search_satisfying_model(space, Formula::negation(core), center, budget);
  return !refutation.has_value();
}

// ---------------------------------------------------------------------------
// Full evaluator

namespace {

class MotionEval {
 public:
  MotionEval(const Budget& budget) : budget_(budget) {}

  bool eval(const SpatialModel& m, Pos pos, const FormulaPtr& f) {
    Features ft = features(f);
    if (!ft.motion && !ft.sees && !ft.coalition) return check(m, pos, f);
    using K = Formula::Kind;
    switch (f->kind()) {
      case K::Atom:
        return m.atom_at(f->atom_name(), pos);
      case K::Here:
        return m.position_of(f->agent()) == pos;
      case K::False:
        return false;
      case K::Not:
        return !eval(m, pos, f->child());
      case K::And:
        return eval(m, pos, f->left()) && eval(m, pos, f->right());
      case K::BoxS: {
        std::vector<Pos> reach;
        successors(m, pos, f->sprog(), reach);
        for (Pos q : reach)
          if (!eval(m, q, f->child())) return false;
        return true;
      }
      case K::BoxM: {
        std::vector<SpatialModel> updates;
        successors(m, pos, f->mprog(), updates);
        for (const SpatialModel& m2 : updates)
          if (!eval(m2, pos, f->child())) return false;
        return true;
      }
      case K::Sees:
        return check_sees(m, f->agent(), f->sees_range(), f->child(), budget_);
      case K::Coalition:
        return eval(m, pos,
                    expand_coalition(f->members(), f->child(), m.agents()));
    }
    throw UnsupportedError("bad formula");
  }

 private:
  void successors(const SpatialModel& m, Pos pos, const SpatialProgramPtr& p,
                  std::vector<Pos>& out) {
    using K = SpatialProgram::Kind;
    switch (p->kind()) {
      case K::Move:
        out.push_back(step(pos, p->move_dir()));
        return;
      case K::Seq: {
        std::vector<Pos> mid;
        successors(m, pos, p->left(), mid);
        for (Pos q : mid) successors(m, q, p->right(), out);
        return;
      }
      case K::Choice:
        successors(m, pos, p->left(), out);
        successors(m, pos, p->right(), out);
        return;
      case K::Test:
        if (eval(m, pos, p->condition())) out.push_back(pos);
        return;
      case K::Star:
        throw UnsupportedError(
            "iteration over a motion-dependent body is not supported");
    }
  }

  // Motion relations compose over models; tests stay anchored at the
  // evaluation position of the enclosing box.
  void successors(const SpatialModel& m, Pos anchor, const MotionProgramPtr& p,
                  std::vector<SpatialModel>& out) {
    using K = MotionProgram::Kind;
    switch (p->kind()) {
      case K::Joint:
        out.push_back(apply_joint_action(m, p->action()));
        return;
      case K::Seq: {
        std::vector<SpatialModel> mid;
        successors(m, anchor, p->left(), mid);
        for (const SpatialModel& m2 : mid) successors(m2, anchor, p->right(), out);
        return;
      }
      case K::Choice:
        successors(m, anchor, p->left(), out);
        successors(m, anchor, p->right(), out);
        return;
      case K::Test:
        if (eval(m, anchor, p->condition())) out.push_back(m);
        return;
    }
  }

  const Budget& budget_;
};

}  // namespace

bool check_motion(const SpatialModel& m, Pos pos, const FormulaPtr& f,
                  const Budget& budget) {
  return MotionEval(budget).eval(m, pos, f);
}

bool evaluate(const SpatialModel& m, Pos pos, const FormulaPtr& f,
              const Budget& budget) {
  return check_motion(m, pos, f, budget);
}

}  // namespace dls

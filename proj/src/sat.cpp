#include "dls/sat.hpp"

#include <algorithm>
#include <unordered_map>

#include "dls/modelcheck.hpp"
#include "dls/motion.hpp"

namespace dls {

FormulaPtr reduce_star_free(const FormulaPtr& f) {
  return eliminate_compound_programs(f, /*allow_atomic_star=*/false);
}

// ---------------------------------------------------------------------------
// Three-valued backtracking search

namespace {

enum class Tri : std::uint8_t { False, True, Unknown };

Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return Tri::Unknown;
  return t == Tri::True ? Tri::False : Tri::True;
}

class Engine {
 public:
  Engine(const ModelSearchSpace& space, FormulaPtr goal, Pos at,
         const Budget& budget, SearchStats* stats)
      : space_(space), goal_(std::move(goal)), at_(at), budget_(budget),
        stats_(stats),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::milliseconds(budget.wall_ms)) {
    for (const FormulaPtr& g : enumerate_subformulas(goal_))
      degree_.emplace(g, modal_degree(g));
    for (const AgentId& a : space_.free_agents) free_agent_set_.insert(a);
  }

  std::optional<SpatialModel> run() {
    if (dfs()) return complete();
    return std::nullopt;
  }

 private:
  bool dfs() {
    bump();
    unknown_atom_.reset();
    unknown_agent_.reset();
    Tri v = eval(at_, goal_);
    if (v == Tri::True) return true;
    if (v == Tri::False) return false;
    if (unknown_agent_) {
      AgentId agent = *unknown_agent_;
      for (Pos cand : space_.agent_candidates.at(agent)) {
        agent_pos_[agent] = cand;
        if (dfs()) return true;
      }
      agent_pos_.erase(agent);
      return false;
    }
    // otherwise the first unknown is an open (atom, cell) pair
    auto key = *unknown_atom_;
    for (bool value : {false, true}) {
      atom_val_[key] = value;
      if (dfs()) return true;
    }
    atom_val_.erase(key);
    return false;
  }

  void bump() {
    std::uint64_t n = ++nodes_;
    if (stats_) stats_->nodes = n;
    if (n > budget_.max_nodes)
      throw BudgetError("search node budget exhausted");
    if ((n & 1023) == 0 && std::chrono::steady_clock::now() > deadline_)
      throw BudgetError("search wall-clock budget exhausted");
  }

  Tri eval(Pos pos, const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind()) {
      case K::Atom: {
        const Atom& a = f->atom_name();
        if (space_.free_atoms.contains(a) && space_.free_cell(pos)) {
          auto it = atom_val_.find({a, pos});
          if (it != atom_val_.end()) return it->second ? Tri::True : Tri::False;
          if (!unknown_atom_ && !unknown_agent_) unknown_atom_ = {{a, pos}};
          return Tri::Unknown;
        }
        return space_.base.atom_at(a, pos) ? Tri::True : Tri::False;
      }
      case K::Here: {
        const AgentId& i = f->agent();
        if (free_agent_set_.contains(i)) {
          auto it = agent_pos_.find(i);
          if (it == agent_pos_.end()) {
            if (!unknown_atom_ && !unknown_agent_) unknown_agent_ = i;
            return Tri::Unknown;
          }
          return it->second == pos ? Tri::True : Tri::False;
        }
        return space_.base.position_of(i) == pos ? Tri::True : Tri::False;
      }
      case K::False:
        return Tri::False;
      case K::Not:
        return tri_not(eval(pos, f->child()));
      case K::And: {
        Tri l = eval(pos, f->left());
        if (l == Tri::False) return Tri::False;
        Tri r = eval(pos, f->right());
        if (r == Tri::False) return Tri::False;
        if (l == Tri::Unknown || r == Tri::Unknown) return Tri::Unknown;
        return Tri::True;
      }
      case K::BoxS: {
        const auto& p = f->sprog();
        if (p->kind() == SpatialProgram::Kind::Move)
          return eval(step(pos, p->move_dir()), f->child());
        if (p->kind() == SpatialProgram::Kind::Star &&
            p->body()->kind() == SpatialProgram::Kind::Move)
          return eval_star(pos, p->body()->move_dir(), f->child());
        throw UnsupportedError("compound program reached the search engine");
      }
      default:
        throw UnsupportedError("unsupported operator reached the search engine");
    }
  }

  Tri eval_star(Pos pos, Move mv, const FormulaPtr& body) {
    int w = space_.eval_bound + degree_.at(body) + 1;
    bool horizontal = (mv == Move::Right || mv == Move::Left);
    int z0 = horizontal ? pos.x : pos.y;
    int from, to;
    if (mv == Move::Right || mv == Move::Up) {
      if (z0 > w) return eval(pos, body);
      from = z0;
      to = w;
    } else {
      if (z0 < -w) return eval(pos, body);
      from = -w;
      to = z0;
    }
    Tri acc = Tri::True;
    for (int z = from; z <= to; ++z) {
      Pos q = horizontal ? Pos{z, pos.y} : Pos{pos.x, z};
      Tri v = eval(q, body);
      if (v == Tri::False) return Tri::False;
      if (v == Tri::Unknown) acc = Tri::Unknown;
    }
    return acc;
  }

  SpatialModel complete() const {
    std::map<AgentId, Pos> positions = space_.base.positions();
    for (const AgentId& a : space_.free_agents) {
      auto it = agent_pos_.find(a);
      positions[a] = it != agent_pos_.end()
                         ? it->second
                         : space_.agent_candidates.at(a).front();
    }
    std::map<Pos, std::set<Atom>> valuation = space_.base.valuation();
    for (const auto& [key, value] : atom_val_) {
      if (value) valuation[key.second].insert(key.first);
      else if (auto it = valuation.find(key.second); it != valuation.end())
        it->second.erase(key.first);
    }
    return SpatialModel::with_inferred_bound(std::move(positions),
                                             std::move(valuation));
  }

  const ModelSearchSpace& space_;
  FormulaPtr goal_;
  Pos at_;
  Budget budget_;
  SearchStats* stats_;
  std::chrono::steady_clock::time_point deadline_;

  std::unordered_map<FormulaPtr, int, FormulaPtrHash, FormulaPtrEq> degree_;
  std::set<AgentId> free_agent_set_;
  std::map<std::pair<Atom, Pos>, bool> atom_val_;
  std::map<AgentId, Pos> agent_pos_;
  std::optional<std::pair<Atom, Pos>> unknown_atom_;
  std::optional<AgentId> unknown_agent_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<SpatialModel> search_satisfying_model(const ModelSearchSpace& space,
                                                    const FormulaPtr& goal, Pos at,
                                                    const Budget& budget,
                                                    SearchStats* stats) {
  return Engine(space, goal, at, budget, stats).run();
}

// ---------------------------------------------------------------------------
// Star-free satisfiability

namespace {

// Cells a degree-n star-free formula can inspect from the origin, plus the
// designated exterior placement shared by all far-away agents.
std::vector<Pos> agent_candidates_for(int n) {
  std::vector<Pos> cells;
  for (int x = -n; x <= n; ++x)
    for (int y = -n; y <= n; ++y)
      if (std::abs(x) + std::abs(y) <= n) cells.push_back({x, y});
  std::sort(cells.begin(), cells.end(), [](Pos a, Pos b) {
    int da = std::abs(a.x) + std::abs(a.y);
    int db = std::abs(b.x) + std::abs(b.y);
    if (da != db) return da < db;
    return a < b;
  });
  cells.push_back({n + 1, 0});
  return cells;
}

SatResult inconclusive(const std::string& note, int bound) {
  SatResult r;
  r.verdict = Verdict::Inconclusive;
  r.note = note;
  r.bound_used = bound;
  return r;
}

}  // namespace

SatResult sat_star_free(const FormulaPtr& f, const Budget& budget,
                        const std::set<AgentId>& declared_agents) {
  // Bring the formula into the atomic-box core first: coalitions expand into
  // joint-action boxes, motion boxes reduce away, then programs flatten.
  FormulaPtr g = f;
  Features ft = features(f);
  if (ft.sees)
    throw UnsupportedError("perception operators are outside the decidable fragments");
  std::set<AgentId> everyone = declared_agents;
  for (const AgentId& a : vocabulary(f).agents) everyone.insert(a);
  if (ft.coalition) g = expand_all_coalitions(g, everyone);
  if (features(g).motion) g = red(g);
  FormulaPtr core = reduce_star_free(g);

  const int n = modal_degree(core);
  Vocabulary voc = vocabulary(core);

  ModelSearchSpace space;
  std::map<AgentId, Pos> fixed;
  for (const AgentId& a : everyone)
    if (!voc.agents.contains(a)) fixed[a] = Pos{n + 1, 0};
  space.base = SpatialModel(std::move(fixed), {}, n + 1);
  space.free_agents.assign(voc.agents.begin(), voc.agents.end());
  auto candidates = agent_candidates_for(n);
  for (const AgentId& a : space.free_agents) space.agent_candidates[a] = candidates;
  space.free_atoms = voc.atoms;
  space.free_cell = [n](Pos p) { return chebyshev(p) <= n; };
  space.eval_bound = n + 1;

  std::uint64_t cellcount = static_cast<std::uint64_t>(voc.atoms.size()) *
                            static_cast<std::uint64_t>(2 * n + 1) *
                            static_cast<std::uint64_t>(2 * n + 1);
  if (cellcount > budget.max_atom_cells)
    return inconclusive("cell budget exceeded (" + std::to_string(cellcount) +
                            " atom cells)", n + 1);

  try {
    auto witness = search_satisfying_model(space, core, {0, 0}, budget);
    if (!witness) {
      SatResult r;
      r.verdict = Verdict::Unsatisfiable;
      r.bound_used = n + 1;
      return r;
    }
    if (!evaluate(*witness, {0, 0}, f))
      throw std::logic_error("satisfiability witness failed re-verification");
    SatResult r;
    r.verdict = Verdict::Satisfiable;
    r.witness = std::move(*witness);
    r.position = {0, 0};
    r.bound_used = n + 1;
    return r;
  } catch (const BudgetError& e) {
    return inconclusive(e.what(), n + 1);
  }
}

// ---------------------------------------------------------------------------
// Position-fragment satisfiability

SatResult sat_positions(const FormulaPtr& f, const Budget& budget,
                        const std::set<AgentId>& declared_agents) {
  Vocabulary voc = vocabulary(f);
  if (!voc.atoms.empty())
    throw UnsupportedError("the position fragment admits no propositional atoms");
  Features ft = features(f);
  if (ft.motion || ft.sees || ft.coalition)
    throw UnsupportedError("the position fragment is a static compass language");
  FormulaPtr core = normalize_compass(f);  // rejects compound stars

  const int d = modal_degree(core);
  const long size = formula_size(f);
  const long cap = 2 * (size + 1) * (size + 1);

  if (voc.agents.empty()) {
    SpatialModel empty({}, {}, 0);
    SatResult r;
    if (check(empty, {0, 0}, core)) {
      r.verdict = Verdict::Satisfiable;
      r.witness = empty;
    } else {
      r.verdict = Verdict::Unsatisfiable;
    }
    return r;
  }

  // Iterated gap removal compresses any satisfying model until consecutive
  // occupied coordinates differ by at most 2d+2, so coordinates up to
  // agents*(2d+2) around the translated origin exhaust the search.
  long complete_bound =
      std::min(cap, static_cast<long>(voc.agents.size()) * (2L * d + 2));
  complete_bound = std::max(complete_bound, 1L);

  Budget remaining = budget;
  SearchStats stats;
  std::uint64_t used = 0;

  long b = std::max(1, d);
  for (;;) {
    bool final_level = b >= complete_bound;
    if (final_level) b = complete_bound;

    std::uint64_t candidate_cells =
        static_cast<std::uint64_t>(2 * b + 1) * static_cast<std::uint64_t>(2 * b + 1);
    if (candidate_cells > budget.max_nodes)
      return inconclusive("candidate grid exceeds the node budget",
                          static_cast<int>(b));

    ModelSearchSpace space;
    std::map<AgentId, Pos> fixed;
    for (const AgentId& a : declared_agents)
      if (!voc.agents.contains(a)) fixed[a] = Pos{static_cast<int>(b) + 1, 0};
    space.base = SpatialModel(std::move(fixed), {}, static_cast<int>(b) + 1);
    space.free_agents.assign(voc.agents.begin(), voc.agents.end());
    std::vector<Pos> cells;
    for (int x = -static_cast<int>(b); x <= b; ++x)
      for (int y = -static_cast<int>(b); y <= b; ++y) cells.push_back({x, y});
    std::sort(cells.begin(), cells.end(), [](Pos a, Pos c) {
      if (chebyshev(a) != chebyshev(c)) return chebyshev(a) < chebyshev(c);
      return a < c;
    });
    for (const AgentId& a : space.free_agents) space.agent_candidates[a] = cells;
    space.free_cell = [](Pos) { return false; };
    space.eval_bound = static_cast<int>(b) + 1;

    try {
      remaining.max_nodes = budget.max_nodes - used;
      auto witness = search_satisfying_model(space, core, {0, 0}, remaining, &stats);
      used += stats.nodes;
      if (witness) {
        if (!evaluate(*witness, {0, 0}, f))
          throw std::logic_error("satisfiability witness failed re-verification");
        SatResult r;
        r.verdict = Verdict::Satisfiable;
        r.witness = std::move(*witness);
        r.position = {0, 0};
        r.bound_used = static_cast<int>(b);
        return r;
      }
      if (final_level) {
        SatResult r;
        r.verdict = Verdict::Unsatisfiable;
        r.bound_used = static_cast<int>(b);
        return r;
      }
    } catch (const BudgetError& e) {
      return inconclusive(e.what(), static_cast<int>(b));
    }
    b *= 2;
  }
}

SatResult decide_sat(const FormulaPtr& f, Fragment fragment, const Budget& budget,
                     const std::set<AgentId>& declared_agents) {
  return fragment == Fragment::StarFree
             ? sat_star_free(f, budget, declared_agents)
             : sat_positions(f, budget, declared_agents);
}

Validity validity(const FormulaPtr& f, Fragment fragment, const Budget& budget) {
  SatResult r = decide_sat(Formula::negation(f), fragment, budget);
  switch (r.verdict) {
    case Verdict::Satisfiable: return Validity::Invalid;
    case Verdict::Unsatisfiable: return Validity::Valid;
    case Verdict::Inconclusive: return Validity::Inconclusive;
  }
  return Validity::Inconclusive;
}

}  // namespace dls

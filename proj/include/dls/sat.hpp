#ifndef DLS_SAT_HPP
#define DLS_SAT_HPP

// Satisfiability and validity for the decidable fragments: the star-free
// fragment (searched over truncated models around the origin) and the
// position-only compass fragment (iterative deepening over position models).
// Both are driven by a shared backtracking search that evaluates the goal in
// three-valued logic over a partially assigned model and branches only on
// the first decoration the evaluation actually consulted.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dls/models.hpp"
#include "dls/syntax.hpp"

namespace dls {

struct Budget {
  std::uint64_t max_atom_cells = 1u << 21;  // free (atom, cell) pairs
  std::uint64_t max_nodes = 2'000'000;      // search tree nodes
  std::uint32_t wall_ms = 20'000;
};

enum class Verdict : std::uint8_t { Satisfiable, Unsatisfiable, Inconclusive };

struct SatResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<SpatialModel> witness;  // present iff satisfiable; re-verified
  Pos position{0, 0};                   // evaluation position of the witness
  int bound_used = 0;
  std::string note;                     // inconclusive reason
};

enum class Fragment : std::uint8_t { StarFree, Positions };
enum class Validity : std::uint8_t { Valid, Invalid, Inconclusive };

// Rewrites sequence/choice/test program structure away; the result uses
// boxes over atomic moves only. Any iteration construct is an error.
FormulaPtr reduce_star_free(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Shared search engine.

// A partially fixed model together with the decorations a search may choose:
// candidate positions per free agent and open (atom, cell) pairs. Cells
// outside free_cell and atoms outside free_atoms read from the base model.
struct ModelSearchSpace {
  SpatialModel base;
  std::vector<AgentId> free_agents;
  std::map<AgentId, std::vector<Pos>> agent_candidates;
  std::set<Atom> free_atoms;
  std::function<bool(Pos)> free_cell;
  int eval_bound = 0;  // covers every decorated or candidate cell
};

struct SearchStats {
  std::uint64_t nodes = 0;
};

// Finds a completion of the space satisfying the goal at the given position,
// or nullopt when the space is exhausted. The goal must be free of compound
// programs (normalize first). Throws BudgetError when a budget is hit.
std::optional<SpatialModel> search_satisfying_model(const ModelSearchSpace& space,
                                                    const FormulaPtr& goal, Pos at,
                                                    const Budget& budget,
                                                    SearchStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Decision procedures.

// Star-free satisfiability at the origin. Coalition operators are expanded
// and motion modalities reduced away first; a found witness is re-verified
// with the model checker before it is reported. declared_agents (if any)
// are placed in the witness even when the formula does not mention them.
SatResult sat_star_free(const FormulaPtr& f, const Budget& budget = {},
                        const std::set<AgentId>& declared_agents = {});

// Satisfiability over position models for the compass fragment without
// atoms. Iterative deepening doubles the coordinate bound; exhausting the
// gap-removal bound (capped by 2(|f|+1)^2) yields unsatisfiable.
SatResult sat_positions(const FormulaPtr& f, const Budget& budget = {},
                        const std::set<AgentId>& declared_agents = {});

SatResult decide_sat(const FormulaPtr& f, Fragment fragment,
                     const Budget& budget = {},
                     const std::set<AgentId>& declared_agents = {});

// f is valid iff ~f is unsatisfiable; budget exhaustion propagates.
Validity validity(const FormulaPtr& f, Fragment fragment, const Budget& budget = {});

}  // namespace dls

#endif  // DLS_SAT_HPP

#ifndef DLS_MOTION_HPP
#define DLS_MOTION_HPP

// Model-update semantics for motion programs, the rewriting that eliminates
// motion modalities in favour of static boxes, coalition-operator expansion,
// and the perception operator.

#include <set>

#include "dls/models.hpp"
#include "dls/sat.hpp"
#include "dls/syntax.hpp"

namespace dls {

// The spatial program that tracks where "here" went under agent i's own
// action: the inverse move for a real move, the trivial test when i stays.
SpatialProgramPtr relocation_program(const AgentId& i, const JointAction& delta);

// Eliminates every motion modality, pushing joint-action boxes inwards until
// they face an atom or a positional atom. The input must be star-free and
// free of perception/coalition operators; the output is equivalent and fully
// static.
FormulaPtr red(const FormulaPtr& f);

// <<C>>f as a disjunction over C's joint actions of conjunctions over the
// other agents' completions. Exponential in the number of agents.
FormulaPtr expand_coalition(const std::set<AgentId>& members, const FormulaPtr& f,
                            const std::set<AgentId>& all_agents);
FormulaPtr expand_all_coalitions(const FormulaPtr& f,
                                 const std::set<AgentId>& all_agents);

// Truth of S(i,k)f: f must hold at P(i) in every model the agent cannot
// distinguish from m. The variant space is finitized to a window of radius
// k+deg(f)+1 around the agent plus one canonical far placement per
// relocatable agent; the verdict is exact for star-free bodies and searched
// within the budget otherwise.
bool check_sees(const SpatialModel& m, const AgentId& i, int range,
                const FormulaPtr& f, const Budget& budget = {});

// Direct update-semantics evaluation of the full language over a bounded
// model: static subtrees go through the table checker, motion boxes update
// the model, coalition operators expand, perception delegates to check_sees.
bool check_motion(const SpatialModel& m, Pos pos, const FormulaPtr& f,
                  const Budget& budget = {});

// Entry point used by the CLI and the C API; routes to the table checker or
// the update evaluator depending on the formula's features.
bool evaluate(const SpatialModel& m, Pos pos, const FormulaPtr& f,
              const Budget& budget = {});

// Caveat attached to perception verdicts (the variant space is finitized).
const char* sees_finitization_note();

}  // namespace dls

#endif  // DLS_MOTION_HPP

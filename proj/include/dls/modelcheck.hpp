#ifndef DLS_MODELCHECK_HPP
#define DLS_MODELCHECK_HPP

// Model checking of compass formulas over bounded spatial models:
//  - check: the polynomial-time labelling algorithm over clamped windows,
//  - check_naive: a direct recursive evaluator, kept independent of the
//    table construction and used as an oracle in tests,
//  - bounded_bisim: a decision procedure for depth-bounded bisimilarity
//    with respect to the four atomic moves.

#include <cstddef>
#include <set>

#include "dls/models.hpp"
#include "dls/syntax.hpp"

namespace dls {

// Maps z into the window |z| <= n+d+1; identity inside it.
int clamp_coordinate(int z, int n, int degree);

// Rewrites compound star-free program structure away using the box
// equivalences for sequence, choice and test. With allow_atomic_star the
// result is a compass formula (atomic moves and their stars); otherwise any
// iteration is rejected. Motion, perception and coalition operators are
// rejected in both modes.
FormulaPtr eliminate_compound_programs(const FormulaPtr& f, bool allow_atomic_star);

inline FormulaPtr normalize_compass(const FormulaPtr& f) {
  return eliminate_compound_programs(f, true);
}

struct CheckStats {
  std::size_t table_cells = 0;  // total entries over all subformula layers
  std::size_t layers = 0;
};

// Truth of f at pos in m. f may use compound star-free programs (they are
// normalized away first) and stars over atomic moves; iteration over a
// compound program is reported as unsupported, never mis-evaluated.
bool check(const SpatialModel& m, Pos pos, const FormulaPtr& f,
           CheckStats* stats = nullptr);

// Direct recursion on the truth conditions. Star programs walk positions
// until the moving coordinate leaves the |z| <= n+deg+1 window, beyond which
// truth is constant. Independent of the table algorithm.
bool check_naive(const SpatialModel& m, Pos pos, const FormulaPtr& f);

// Depth-bounded bisimilarity of two pointed models with respect to the four
// atomic moves and the given vocabulary. Positions are clamped into the
// window max(bounds)+depth+1 at every level, which keeps the memoized
// recursion finite on the infinite grid.
bool bounded_bisim(const SpatialModel& m1, Pos p1, const SpatialModel& m2,
                   Pos p2, int depth, const std::set<Atom>& atoms,
                   const std::set<AgentId>& agents);

}  // namespace dls

#endif  // DLS_MODELCHECK_HPP

#ifndef DLS_MODELS_HPP
#define DLS_MODELS_HPP

// Spatial models (agent positions + sparse valuation + declared bound),
// position models, and the model transformations: truncation, joint-action
// update, and gap removal. Models are immutable values; every transformation
// returns a new model.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dls/syntax.hpp"

namespace dls {

struct Pos {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pos&) const = default;
};

inline int chebyshev(Pos p) {
  int ax = p.x < 0 ? -p.x : p.x;
  int ay = p.y < 0 ? -p.y : p.y;
  return ax > ay ? ax : ay;
}

// The unique successor under an atomic compass move.
inline Pos step(Pos p, Move m) {
  switch (m) {
    case Move::Up: return {p.x, p.y + 1};
    case Move::Down: return {p.x, p.y - 1};
    case Move::Right: return {p.x + 1, p.y};
    case Move::Left: return {p.x - 1, p.y};
  }
  return p;
}

inline Pos step(Pos p, Action a) {
  switch (a) {
    case Action::Up: return {p.x, p.y + 1};
    case Action::Down: return {p.x, p.y - 1};
    case Action::Right: return {p.x + 1, p.y};
    case Action::Left: return {p.x - 1, p.y};
    case Action::Stay: return p;
  }
  return p;
}

inline Move inverse(Move m) {
  switch (m) {
    case Move::Up: return Move::Down;
    case Move::Down: return Move::Up;
    case Move::Right: return Move::Left;
    case Move::Left: return Move::Right;
  }
  return m;
}

std::string to_string(Pos p);

// ---------------------------------------------------------------------------
// An n-bounded model: every agent position within [-n,n]^2 and the valuation
// empty outside that box. Formulas are still interpreted over all of Z^2.
// Equality compares positions and the nonempty valuation; the declared bound
// is metadata.
class SpatialModel {
 public:
  SpatialModel() = default;

  // Throws ModelError if a position or a decorated cell violates the bound.
  SpatialModel(std::map<AgentId, Pos> positions,
               std::map<Pos, std::set<Atom>> valuation, int bound);

  static SpatialModel with_inferred_bound(std::map<AgentId, Pos> positions,
                                          std::map<Pos, std::set<Atom>> valuation);

  const std::map<AgentId, Pos>& positions() const { return positions_; }
  const std::map<Pos, std::set<Atom>>& valuation() const { return valuation_; }
  int bound() const { return bound_; }

  std::optional<Pos> position(const AgentId& i) const;
  // Throws ModelError when the agent is not part of the model.
  Pos position_of(const AgentId& i) const;
  bool atom_at(const Atom& p, Pos cell) const;

  std::set<AgentId> agents() const;
  std::set<Atom> atoms() const;

  bool operator==(const SpatialModel& other) const {
    return positions_ == other.positions_ && valuation_ == other.valuation_;
  }

 private:
  std::map<AgentId, Pos> positions_;
  std::map<Pos, std::set<Atom>> valuation_;  // normalized: no empty entries
  int bound_ = 0;
};

// A position model is an agent-position map with no valuation.
class PositionModel {
 public:
  PositionModel() = default;
  explicit PositionModel(std::map<AgentId, Pos> positions)
      : positions_(std::move(positions)) {}

  const std::map<AgentId, Pos>& positions() const { return positions_; }
  std::optional<Pos> position(const AgentId& i) const;
  Pos position_of(const AgentId& i) const;
  std::set<AgentId> agents() const;

  // View as a spatial model with an empty valuation (bound inferred, at
  // least the given floor).
  SpatialModel as_spatial(int min_bound = 0) const;

  bool operator==(const PositionModel&) const = default;

 private:
  std::map<AgentId, Pos> positions_;
};

// ---------------------------------------------------------------------------
// Transformations

// Truncation: keeps positions within the n-box, relocates the others to
// (n+1,0), and intersects the valuation with [-n,n]^2. The result is
// (n+1)-bounded.
SpatialModel truncate(const SpatialModel& m, int n);

// Synchronous update: the valuation is unchanged and every agent moves one
// step per its action (absent entries hold still). The declared bound is
// recomputed to the minimal covering bound.
SpatialModel apply_joint_action(const SpatialModel& m, const JointAction& delta);

// ---------------------------------------------------------------------------
// Gaps: agent-free coordinate strips of a position model.

struct Gap {
  enum class Orientation : std::uint8_t { Vertical, Horizontal };
  Orientation orientation = Orientation::Vertical;
  int a = 0;  // a <= b; the strip is [a,b] x Z (vertical) or Z x [a,b]
  int b = 0;
};

// Maximal finite agent-free intervals between consecutive occupied
// coordinates of the chosen axis. Unbounded exterior regions are not gaps.
std::vector<Gap> find_gaps(const PositionModel& p, const std::set<AgentId>& agents,
                           Gap::Orientation orientation);
std::vector<Gap> find_gaps(const PositionModel& p, Gap::Orientation orientation);

// Distance from pos into the gap: min(z-a, b-z) on the constrained axis.
// Throws ModelError when pos lies outside the gap.
int gap_depth(const Gap& g, Pos pos);

// The compression map deleting a gap: coordinates at most a are fixed and
// the far side is translated by the gap width, collapsing [a,b] onto a.
struct GapRemoval {
  Gap gap;
  Pos operator()(Pos p) const;
};

// Throws ModelError when the interval is not actually agent-free.
std::pair<PositionModel, GapRemoval> remove_gap(const PositionModel& p, const Gap& g);

// ---------------------------------------------------------------------------
// Text format: one declaration per line.
//   bound <n>
//   agent <id> <x> <y>
//   atom <name> <x> <y>
// '#' starts a comment. Loading rejects declarations violating the bound;
// a missing bound line declares the minimal covering bound.
SpatialModel parse_model(std::string_view text);
std::string render_model(const SpatialModel& m);

}  // namespace dls

#endif  // DLS_MODELS_HPP

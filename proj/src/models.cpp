#include "dls/models.hpp"

#include <algorithm>
#include <sstream>

namespace dls {

std::string to_string(Pos p) {
  return std::to_string(p.x) + "," + std::to_string(p.y);
}

namespace {

void drop_empty(std::map<Pos, std::set<Atom>>& valuation) {
  for (auto it = valuation.begin(); it != valuation.end();) {
    if (it->second.empty()) it = valuation.erase(it);
    else ++it;
  }
}

int covering_bound(const std::map<AgentId, Pos>& positions,
                   const std::map<Pos, std::set<Atom>>& valuation) {
  int n = 0;
  for (const auto& [agent, pos] : positions) n = std::max(n, chebyshev(pos));
  for (const auto& [cell, atoms] : valuation)
    if (!atoms.empty()) n = std::max(n, chebyshev(cell));
  return n;
}

}  // namespace

SpatialModel::SpatialModel(std::map<AgentId, Pos> positions,
                           std::map<Pos, std::set<Atom>> valuation, int bound)
    : positions_(std::move(positions)),
      valuation_(std::move(valuation)),
      bound_(bound) {
  if (bound < 0) throw ModelError("bound must be nonnegative");
  drop_empty(valuation_);
  for (const auto& [agent, pos] : positions_) {
    if (chebyshev(pos) > bound_)
      throw ModelError("agent '" + agent.name + "' at " + to_string(pos) +
                       " violates bound " + std::to_string(bound_));
  }
  for (const auto& [cell, atoms] : valuation_) {
    if (chebyshev(cell) > bound_)
      throw ModelError("atom '" + atoms.begin()->name + "' at " + to_string(cell) +
                       " violates bound " + std::to_string(bound_));
  }
}

SpatialModel SpatialModel::with_inferred_bound(
    std::map<AgentId, Pos> positions, std::map<Pos, std::set<Atom>> valuation) {
  drop_empty(valuation);
  int n = covering_bound(positions, valuation);
  return SpatialModel(std::move(positions), std::move(valuation), n);
}

std::optional<Pos> SpatialModel::position(const AgentId& i) const {
  auto it = positions_.find(i);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

Pos SpatialModel::position_of(const AgentId& i) const {
  auto it = positions_.find(i);
  if (it == positions_.end())
    throw ModelError("agent '" + i.name + "' does not occur in the model");
  return it->second;
}

bool SpatialModel::atom_at(const Atom& p, Pos cell) const {
  auto it = valuation_.find(cell);
  return it != valuation_.end() && it->second.contains(p);
}

std::set<AgentId> SpatialModel::agents() const {
  std::set<AgentId> out;
  for (const auto& [agent, pos] : positions_) out.insert(agent);
  return out;
}

std::set<Atom> SpatialModel::atoms() const {
  std::set<Atom> out;
  for (const auto& [cell, atoms] : valuation_) out.insert(atoms.begin(), atoms.end());
  return out;
}

std::optional<Pos> PositionModel::position(const AgentId& i) const {
  auto it = positions_.find(i);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

Pos PositionModel::position_of(const AgentId& i) const {
  auto it = positions_.find(i);
  if (it == positions_.end())
    throw ModelError("agent '" + i.name + "' does not occur in the model");
  return it->second;
}

std::set<AgentId> PositionModel::agents() const {
  std::set<AgentId> out;
  for (const auto& [agent, pos] : positions_) out.insert(agent);
  return out;
}

SpatialModel PositionModel::as_spatial(int min_bound) const {
  int n = std::max(min_bound, covering_bound(positions_, {}));
  return SpatialModel(positions_, {}, n);
}

SpatialModel truncate(const SpatialModel& m, int n) {
  if (n < 0) throw ModelError("truncation bound must be nonnegative");
  std::map<AgentId, Pos> positions;
  for (const auto& [agent, pos] : m.positions())
    positions[agent] = chebyshev(pos) <= n ? pos : Pos{n + 1, 0};
  std::map<Pos, std::set<Atom>> valuation;
  for (const auto& [cell, atoms] : m.valuation())
    if (chebyshev(cell) <= n) valuation[cell] = atoms;
  return SpatialModel(std::move(positions), std::move(valuation), n + 1);
}

SpatialModel apply_joint_action(const SpatialModel& m, const JointAction& delta) {
  std::map<AgentId, Pos> positions;
  for (const auto& [agent, pos] : m.positions())
    positions[agent] = step(pos, delta.action(agent));
  return SpatialModel::with_inferred_bound(std::move(positions), m.valuation());
}

namespace {

int axis_coord(Pos p, Gap::Orientation o) {
  return o == Gap::Orientation::Vertical ? p.x : p.y;
}

}  // namespace

std::vector<Gap> find_gaps(const PositionModel& p, const std::set<AgentId>& agents,
                           Gap::Orientation orientation) {
  std::set<int> occupied;
  for (const auto& [agent, pos] : p.positions())
    if (agents.contains(agent)) occupied.insert(axis_coord(pos, orientation));
  std::vector<Gap> out;
  if (occupied.size() < 2) return out;
  auto it = occupied.begin();
  int prev = *it++;
  for (; it != occupied.end(); ++it) {
    if (*it - prev >= 2) out.push_back(Gap{orientation, prev + 1, *it - 1});
    prev = *it;
  }
  return out;
}

std::vector<Gap> find_gaps(const PositionModel& p, Gap::Orientation orientation) {
  return find_gaps(p, p.agents(), orientation);
}

int gap_depth(const Gap& g, Pos pos) {
  int z = axis_coord(pos, g.orientation);
  if (z < g.a || z > g.b)
    throw ModelError("position " + to_string(pos) + " lies outside the gap");
  return std::min(z - g.a, g.b - z);
}

Pos GapRemoval::operator()(Pos p) const {
  int z = axis_coord(p, gap.orientation);
  int zp = z <= gap.a ? z : std::max(gap.a, z - (gap.b - gap.a));
  if (gap.orientation == Gap::Orientation::Vertical) return {zp, p.y};
  return {p.x, zp};
}

std::pair<PositionModel, GapRemoval> remove_gap(const PositionModel& p, const Gap& g) {
  if (g.a > g.b) throw ModelError("gap interval is empty");
  for (const auto& [agent, pos] : p.positions()) {
    int z = axis_coord(pos, g.orientation);
    if (z >= g.a && z <= g.b)
      throw ModelError("agent '" + agent.name + "' lies inside the gap");
  }
  GapRemoval rho{g};
  std::map<AgentId, Pos> moved;
  for (const auto& [agent, pos] : p.positions()) moved[agent] = rho(pos);
  return {PositionModel(std::move(moved)), rho};
}

// ---------------------------------------------------------------------------
// Text format

namespace {

bool valid_name(const std::string& s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'))
      return false;
  return true;
}

[[noreturn]] void line_error(int line, const std::string& what) {
  throw ModelError("model line " + std::to_string(line) + ": " + what);
}

}  // namespace

SpatialModel parse_model(std::string_view text) {
  std::map<AgentId, Pos> positions;
  std::map<Pos, std::set<Atom>> valuation;
  std::optional<int> bound;

  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::string kw;
    if (!(line >> kw)) continue;
    if (kw == "bound") {
      long n;
      if (!(line >> n) || n < 0) line_error(lineno, "expected a nonnegative bound");
      if (bound) line_error(lineno, "duplicate bound declaration");
      bound = static_cast<int>(n);
    } else if (kw == "agent") {
      std::string name;
      long x, y;
      if (!(line >> name >> x >> y)) line_error(lineno, "expected: agent <id> <x> <y>");
      if (!valid_name(name)) line_error(lineno, "bad agent name '" + name + "'");
      AgentId id{name};
      if (positions.contains(id)) line_error(lineno, "agent '" + name + "' declared twice");
      positions[id] = Pos{static_cast<int>(x), static_cast<int>(y)};
    } else if (kw == "atom") {
      std::string name;
      long x, y;
      if (!(line >> name >> x >> y)) line_error(lineno, "expected: atom <name> <x> <y>");
      if (!valid_name(name)) line_error(lineno, "bad atom name '" + name + "'");
      valuation[Pos{static_cast<int>(x), static_cast<int>(y)}].insert(Atom{name});
    } else {
      line_error(lineno, "unknown declaration '" + kw + "'");
    }
    std::string extra;
    if (line >> extra) line_error(lineno, "trailing input '" + extra + "'");
  }

  if (!bound)
    return SpatialModel::with_inferred_bound(std::move(positions), std::move(valuation));
  return SpatialModel(std::move(positions), std::move(valuation), *bound);
}

std::string render_model(const SpatialModel& m) {
  std::string out = "bound " + std::to_string(m.bound()) + "\n";
  for (const auto& [agent, pos] : m.positions())
    out += "agent " + agent.name + " " + std::to_string(pos.x) + " " +
           std::to_string(pos.y) + "\n";
  for (const auto& [cell, atoms] : m.valuation())
    for (const auto& atom : atoms)
      out += "atom " + atom.name + " " + std::to_string(cell.x) + " " +
             std::to_string(cell.y) + "\n";
  return out;
}

}  // namespace dls

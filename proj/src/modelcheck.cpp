#include "dls/modelcheck.hpp"

#include <algorithm>
#include <unordered_map>
#include <vector>

namespace dls {

int clamp_coordinate(int z, int n, int degree) {
  int w = n + degree + 1;
  if (z > w) return w;
  if (z < -w) return -w;
  return z;
}

// ---------------------------------------------------------------------------
// Program elimination

namespace {

FormulaPtr eliminate(const FormulaPtr& f, bool allow_atomic_star);

FormulaPtr eliminate_box(const SpatialProgramPtr& p, FormulaPtr body,
                         bool allow_atomic_star) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move:
      return Formula::box(p, std::move(body));
    case K::Star:
      if (!allow_atomic_star)
        throw UnsupportedError("star encountered in a star-free reduction");
      if (p->body()->kind() != K::Move)
        throw UnsupportedError("iteration over a compound program is not supported");
      return Formula::box(p, std::move(body));
    case K::Seq:
      return eliminate_box(p->left(),
                           eliminate_box(p->right(), std::move(body),
                                         allow_atomic_star),
                           allow_atomic_star);
    case K::Choice: {
      FormulaPtr l = eliminate_box(p->left(), body, allow_atomic_star);
      FormulaPtr r = eliminate_box(p->right(), std::move(body), allow_atomic_star);
      return Formula::conjunction(std::move(l), std::move(r));
    }
    case K::Test: {
      FormulaPtr cond = eliminate(p->condition(), allow_atomic_star);
      return Formula::implies(std::move(cond), std::move(body));
    }
  }
  throw UnsupportedError("bad program");
}

FormulaPtr eliminate(const FormulaPtr& f, bool allow_atomic_star) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return f;
    case K::Not:
      return Formula::negation(eliminate(f->child(), allow_atomic_star));
    case K::And:
      return Formula::conjunction(eliminate(f->left(), allow_atomic_star),
                                  eliminate(f->right(), allow_atomic_star));
    case K::BoxS:
      return eliminate_box(f->sprog(), eliminate(f->child(), allow_atomic_star),
                           allow_atomic_star);
    case K::BoxM:
      throw UnsupportedError("motion modality in a static formula");
    case K::Sees:
      throw UnsupportedError("perception operator in a static formula");
    case K::Coalition:
      throw UnsupportedError("coalition operator in a static formula");
  }
  throw UnsupportedError("bad formula");
}

}  // namespace

FormulaPtr eliminate_compound_programs(const FormulaPtr& f, bool allow_atomic_star) {
  return eliminate(f, allow_atomic_star);
}

// ---------------------------------------------------------------------------
// Table checker. One boolean layer per distinct subformula, each over its own
// window [-w,w]^2 with w = n + deg + 1; lookups into a child layer clamp into
// the child's window, which is sound because truth stabilizes beyond it.

namespace {

int clamp_to(int z, int w) { return z > w ? w : (z < -w ? -w : z); }

struct Layer {
  FormulaPtr f;
  int w = 0;
  int side = 0;  // 2w+1
  Formula::Kind kind{};
  Move mv{};
  int child_a = -1;
  int child_b = -1;
  std::vector<char> bits;

  char& at(int x, int y) { return bits[(y + w) * side + (x + w)]; }
  char get(int x, int y) const { return bits[(y + w) * side + (x + w)]; }
  char get_clamped(int x, int y) const {
    int cx = x > w ? w : (x < -w ? -w : x);
    int cy = y > w ? w : (y < -w ? -w : y);
    return get(cx, cy);
  }
};

}  // namespace

bool check(const SpatialModel& m, Pos pos, const FormulaPtr& f, CheckStats* stats) {
  FormulaPtr q = normalize_compass(f);
  const int n = m.bound();

  std::vector<FormulaPtr> subs = enumerate_subformulas(q);
  std::unordered_map<FormulaPtr, int, FormulaPtrHash, FormulaPtrEq> index;
  index.reserve(subs.size());

  std::vector<Layer> layers(subs.size());
  for (std::size_t a = 0; a < subs.size(); ++a) {
    Layer& L = layers[a];
    L.f = subs[a];
    L.kind = L.f->kind();
    L.w = n + modal_degree(L.f) + 1;
    L.side = 2 * L.w + 1;
    L.bits.assign(static_cast<std::size_t>(L.side) * L.side, 0);
    using K = Formula::Kind;
    switch (L.kind) {
      case K::Atom: {
        for (const auto& [cell, atoms] : m.valuation())
          if (atoms.contains(L.f->atom_name()) && chebyshev(cell) <= L.w)
            L.at(cell.x, cell.y) = 1;
        break;
      }
      case K::Here: {
        auto p = m.position(L.f->agent());
        if (!p)
          throw ModelError("agent '" + L.f->agent().name +
                           "' does not occur in the model");
        if (chebyshev(*p) <= L.w) L.at(p->x, p->y) = 1;
        break;
      }
      case K::False:
        break;
      case K::Not: {
        L.child_a = index.at(L.f->child());
        const Layer& C = layers[L.child_a];
        for (int y = -L.w; y <= L.w; ++y)
          for (int x = -L.w; x <= L.w; ++x)
            L.at(x, y) = !C.get_clamped(x, y);
        break;
      }
      case K::And: {
        L.child_a = index.at(L.f->left());
        L.child_b = index.at(L.f->right());
        const Layer& A = layers[L.child_a];
        const Layer& B = layers[L.child_b];
        for (int y = -L.w; y <= L.w; ++y)
          for (int x = -L.w; x <= L.w; ++x)
            L.at(x, y) = A.get_clamped(x, y) && B.get_clamped(x, y);
        break;
      }
      case K::BoxS: {
        const auto& prog = L.f->sprog();
        L.child_a = index.at(L.f->child());
        const Layer& C = layers[L.child_a];
        if (prog->kind() == SpatialProgram::Kind::Move) {
          L.mv = prog->move_dir();
          for (int y = -L.w; y <= L.w; ++y)
            for (int x = -L.w; x <= L.w; ++x) {
              Pos s = step({x, y}, L.mv);
              L.at(x, y) = C.get_clamped(s.x, s.y);
            }
        } else {  // star over an atomic move
          L.mv = prog->body()->move_dir();
          const int cw = C.w;
          // prefix/suffix conjunctions along the scan axis of the child
          if (L.mv == Move::Right || L.mv == Move::Left) {
            for (int y = -L.w; y <= L.w; ++y) {
              int cy = clamp_to(y, cw);  // |cy| <= cw
              if (L.mv == Move::Right) {
                // value(x) = all child(z,cy) for z in [clamp(x), cw]
                char acc = 1;
                std::vector<char> suffix(static_cast<std::size_t>(2 * cw + 2), 1);
                for (int z = cw; z >= -cw; --z) {
                  acc = acc && C.get(z, cy);
                  suffix[static_cast<std::size_t>(z + cw)] = acc;
                }
                for (int x = -L.w; x <= L.w; ++x) {
                  int cx = clamp_to(x, cw);
                  L.at(x, y) = suffix[static_cast<std::size_t>(cx + cw)];
                }
              } else {
                char acc = 1;
                std::vector<char> prefix(static_cast<std::size_t>(2 * cw + 2), 1);
                for (int z = -cw; z <= cw; ++z) {
                  acc = acc && C.get(z, cy);
                  prefix[static_cast<std::size_t>(z + cw)] = acc;
                }
                for (int x = -L.w; x <= L.w; ++x) {
                  int cx = clamp_to(x, cw);
                  L.at(x, y) = prefix[static_cast<std::size_t>(cx + cw)];
                }
              }
            }
          } else {
            for (int x = -L.w; x <= L.w; ++x) {
              int cx = clamp_to(x, cw);
              if (L.mv == Move::Up) {
                char acc = 1;
                std::vector<char> suffix(static_cast<std::size_t>(2 * cw + 2), 1);
                for (int z = cw; z >= -cw; --z) {
                  acc = acc && C.get(cx, z);
                  suffix[static_cast<std::size_t>(z + cw)] = acc;
                }
                for (int y = -L.w; y <= L.w; ++y) {
                  int cy = clamp_to(y, cw);
                  L.at(x, y) = suffix[static_cast<std::size_t>(cy + cw)];
                }
              } else {
                char acc = 1;
                std::vector<char> prefix(static_cast<std::size_t>(2 * cw + 2), 1);
                for (int z = -cw; z <= cw; ++z) {
                  acc = acc && C.get(cx, z);
                  prefix[static_cast<std::size_t>(z + cw)] = acc;
                }
                for (int y = -L.w; y <= L.w; ++y) {
                  int cy = clamp_to(y, cw);
                  L.at(x, y) = prefix[static_cast<std::size_t>(cy + cw)];
                }
              }
            }
          }
        }
        break;
      }
      default:
        throw UnsupportedError("non-compass operator reached the table checker");
    }
    index.emplace(L.f, static_cast<int>(a));
    if (stats) {
      stats->table_cells += L.bits.size();
      stats->layers += 1;
    }
  }

  return layers.back().get_clamped(pos.x, pos.y) != 0;
}

// ---------------------------------------------------------------------------
// Recursive oracle

namespace {

class NaiveEval {
 public:
  explicit NaiveEval(const SpatialModel& m) : m_(m), n_(m.bound()) {}

  bool eval(Pos pos, const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind()) {
      case K::Atom:
        return m_.atom_at(f->atom_name(), pos);
      case K::Here:
        return m_.position_of(f->agent()) == pos;
      case K::False:
        return false;
      case K::Not:
        return !eval(pos, f->child());
      case K::And:
        return eval(pos, f->left()) && eval(pos, f->right());
      case K::BoxS:
        return eval_box(pos, f->sprog(), f->child());
      default:
        throw UnsupportedError("non-compass operator in the naive evaluator");
    }
  }

 private:
  bool eval_box(Pos pos, const SpatialProgramPtr& p, const FormulaPtr& body) {
    using K = SpatialProgram::Kind;
    if (p->kind() == K::Star) {
      if (p->body()->kind() != K::Move)
        throw UnsupportedError("iteration over a compound program is not supported");
      return eval_star(pos, p->body()->move_dir(), body);
    }
    std::vector<Pos> reach;
    successors(pos, p, reach);
    for (Pos q : reach)
      if (!eval(q, body)) return false;
    return true;
  }

  // Truth of the body is constant once the moving coordinate passes
  // n + deg(body) + 1, so a finite walk decides the star.
  bool eval_star(Pos pos, Move mv, const FormulaPtr& body) {
    int w = n_ + modal_degree(body) + 1;
    int from, to;
    bool horizontal = (mv == Move::Right || mv == Move::Left);
    int z0 = horizontal ? pos.x : pos.y;
    if (mv == Move::Right || mv == Move::Up) {
      if (z0 > w) return eval(pos, body);
      from = z0;
      to = w;
    } else {
      if (z0 < -w) return eval(pos, body);
      from = -w;
      to = z0;
    }
    for (int z = from; z <= to; ++z) {
      Pos q = horizontal ? Pos{z, pos.y} : Pos{pos.x, z};
      if (!eval(q, body)) return false;
    }
    return true;
  }

  void successors(Pos pos, const SpatialProgramPtr& p, std::vector<Pos>& out) {
    using K = SpatialProgram::Kind;
    switch (p->kind()) {
      case K::Move:
        out.push_back(step(pos, p->move_dir()));
        return;
      case K::Seq: {
        std::vector<Pos> mid;
        successors(pos, p->left(), mid);
        for (Pos q : mid) successors(q, p->right(), out);
        return;
      }
      case K::Choice:
        successors(pos, p->left(), out);
        successors(pos, p->right(), out);
        return;
      case K::Test:
        if (eval(pos, p->condition())) out.push_back(pos);
        return;
      case K::Star:
        throw UnsupportedError("iteration inside a compound program is not supported");
    }
  }

  const SpatialModel& m_;
  int n_;
};

}  // namespace

bool check_naive(const SpatialModel& m, Pos pos, const FormulaPtr& f) {
  return NaiveEval(m).eval(pos, f);
}

// ---------------------------------------------------------------------------
// Bounded bisimulation

namespace {

struct PairKey {
  Pos a, b;
  int depth;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    std::size_t h = static_cast<std::size_t>(k.a.x + 40000);
    h = h * 1000003u + static_cast<std::size_t>(k.a.y + 40000);
    h = h * 1000003u + static_cast<std::size_t>(k.b.x + 40000);
    h = h * 1000003u + static_cast<std::size_t>(k.b.y + 40000);
    h = h * 1000003u + static_cast<std::size_t>(k.depth);
    return h;
  }
};

class BisimCheck {
 public:
  BisimCheck(const SpatialModel& m1, const SpatialModel& m2,
             const std::set<Atom>& atoms, const std::set<AgentId>& agents)
      : m1_(m1), m2_(m2), atoms_(atoms), agents_(agents),
        base_(std::max(m1.bound(), m2.bound())) {}

  bool run(Pos p1, Pos p2, int depth) {
    p1 = {clamp_coordinate(p1.x, base_, depth), clamp_coordinate(p1.y, base_, depth)};
    p2 = {clamp_coordinate(p2.x, base_, depth), clamp_coordinate(p2.y, base_, depth)};
    PairKey key{p1, p2, depth};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool ok = decorations_agree(p1, p2);
    if (ok && depth > 0) {
      for (Move mv : kAllMoves) {
        // both relations are total functions, so forth and back coincide
        if (!run(step(p1, mv), step(p2, mv), depth - 1)) {
          ok = false;
          break;
        }
      }
    }
    memo_.emplace(key, ok);
    return ok;
  }

 private:
  bool decorations_agree(Pos p1, Pos p2) const {
    for (const auto& i : agents_) {
      bool at1 = m1_.position(i).has_value() && *m1_.position(i) == p1;
      bool at2 = m2_.position(i).has_value() && *m2_.position(i) == p2;
      if (at1 != at2) return false;
    }
    for (const auto& p : atoms_)
      if (m1_.atom_at(p, p1) != m2_.atom_at(p, p2)) return false;
    return true;
  }

  const SpatialModel& m1_;
  const SpatialModel& m2_;
  const std::set<Atom>& atoms_;
  const std::set<AgentId>& agents_;
  int base_;
  std::unordered_map<PairKey, bool, PairKeyHash> memo_;
};

}  // namespace

bool bounded_bisim(const SpatialModel& m1, Pos p1, const SpatialModel& m2,
                   Pos p2, int depth, const std::set<Atom>& atoms,
                   const std::set<AgentId>& agents) {
  if (depth < 0) throw ModelError("bisimulation depth must be nonnegative");
  return BisimCheck(m1, m2, atoms, agents).run(p1, p2, depth);
}

}  // namespace dls

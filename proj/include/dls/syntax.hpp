#ifndef DLS_SYNTAX_HPP
#define DLS_SYNTAX_HPP

// Abstract syntax, parsing, printing and structural measures for the three
// grammars of the logic: spatial programs, motion programs and formulas.
// All AST values are immutable after construction and safe to share across
// threads; parsing is reentrant.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dls {

// ---------------------------------------------------------------------------
// Errors shared across the library.

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Input is outside the fragment an algorithm is defined on (e.g. iteration
// over a compound program). Never turned into a silent wrong answer.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model data or a query referring to vocabulary the model lacks.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal signal for search budgets; callers convert it into an
// inconclusive verdict, never into sat/unsat.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Vocabulary tokens. Equality is by name.

struct AgentId {
  std::string name;
  auto operator<=>(const AgentId&) const = default;
};

struct Atom {
  std::string name;
  auto operator<=>(const Atom&) const = default;
};

enum class Move : std::uint8_t { Up, Down, Right, Left };
enum class Action : std::uint8_t { Up, Down, Right, Left, Stay };

constexpr Move kAllMoves[4] = {Move::Up, Move::Down, Move::Right, Move::Left};
constexpr Action kAllActions[5] = {Action::Up, Action::Down, Action::Right,
                                   Action::Left, Action::Stay};

const char* to_string(Move m);
const char* to_string(Action a);

class Formula;
class SpatialProgram;
class MotionProgram;
using FormulaPtr = std::shared_ptr<const Formula>;
using SpatialProgramPtr = std::shared_ptr<const SpatialProgram>;
using MotionProgramPtr = std::shared_ptr<const MotionProgram>;

// One action per agent, applied synchronously. Agents without an entry are
// treated as holding still; the parser always produces maps that are total
// over the declared agent set.
class JointAction {
 public:
  JointAction() = default;
  explicit JointAction(std::map<AgentId, Action> entries)
      : entries_(std::move(entries)) {}

  Action action(const AgentId& agent) const {
    auto it = entries_.find(agent);
    return it == entries_.end() ? Action::Stay : it->second;
  }
  bool has(const AgentId& agent) const { return entries_.contains(agent); }
  const std::map<AgentId, Action>& entries() const { return entries_; }

  bool operator==(const JointAction&) const = default;
  std::size_t hash() const;

 private:
  std::map<AgentId, Action> entries_;
};

// ---------------------------------------------------------------------------
// Spatial programs: the PDL program grammar over the four compass moves.

class SpatialProgram {
 public:
  enum class Kind : std::uint8_t { Move, Seq, Choice, Star, Test };

  static SpatialProgramPtr move(Move m);
  static SpatialProgramPtr seq(SpatialProgramPtr a, SpatialProgramPtr b);
  static SpatialProgramPtr choice(SpatialProgramPtr a, SpatialProgramPtr b);
  static SpatialProgramPtr star(SpatialProgramPtr body);
  static SpatialProgramPtr test(FormulaPtr condition);

  Kind kind() const { return kind_; }
  Move move_dir() const { assert(kind_ == Kind::Move); return move_; }
  const SpatialProgramPtr& left() const { assert(a_); return a_; }
  const SpatialProgramPtr& right() const { assert(b_); return b_; }
  const SpatialProgramPtr& body() const { assert(kind_ == Kind::Star); return a_; }
  const FormulaPtr& condition() const;
  std::size_t hash() const { return hash_; }

 private:
  SpatialProgram() = default;
  Kind kind_{};
  Move move_{};
  SpatialProgramPtr a_, b_;
  FormulaPtr test_;
  std::size_t hash_ = 0;
};

// ---------------------------------------------------------------------------
// Motion programs: joint actions composed with seq/choice/test. No iteration
// constructor exists in this grammar.

class MotionProgram {
 public:
  enum class Kind : std::uint8_t { Joint, Seq, Choice, Test };

  static MotionProgramPtr joint(JointAction delta);
  static MotionProgramPtr seq(MotionProgramPtr a, MotionProgramPtr b);
  static MotionProgramPtr choice(MotionProgramPtr a, MotionProgramPtr b);
  static MotionProgramPtr test(FormulaPtr condition);

  Kind kind() const { return kind_; }
  const JointAction& action() const { assert(kind_ == Kind::Joint); return delta_; }
  const MotionProgramPtr& left() const { assert(a_); return a_; }
  const MotionProgramPtr& right() const { assert(b_); return b_; }
  const FormulaPtr& condition() const;
  std::size_t hash() const { return hash_; }

 private:
  MotionProgram() = default;
  Kind kind_{};
  JointAction delta_;
  MotionProgramPtr a_, b_;
  FormulaPtr test_;
  std::size_t hash_ = 0;
};

// ---------------------------------------------------------------------------
// Formulas. The core connectives are atoms, positional atoms (here),
// falsum, negation, conjunction, the two box families, the perception
// operator and the coalition operator. Everything else desugars at
// construction/parse time: t := ~false, (a|b) := ~(~a&~b),
// (a->b) := ~(a&~b), <p>f := ~[p]~f.

class Formula {
 public:
  enum class Kind : std::uint8_t {
    Atom, Here, False, Not, And, BoxS, BoxM, Sees, Coalition
  };

  static FormulaPtr atom(Atom p);
  static FormulaPtr here(AgentId i);
  static FormulaPtr falsum();
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr box(SpatialProgramPtr program, FormulaPtr f);
  static FormulaPtr box(MotionProgramPtr program, FormulaPtr f);
  static FormulaPtr sees(AgentId i, int range, FormulaPtr f);
  static FormulaPtr coalition(std::set<AgentId> members, FormulaPtr f);

  // Derived connectives.
  static FormulaPtr verum();
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
  static FormulaPtr diamond(SpatialProgramPtr program, FormulaPtr f);
  static FormulaPtr diamond(MotionProgramPtr program, FormulaPtr f);

  Kind kind() const { return kind_; }
  const Atom& atom_name() const { assert(kind_ == Kind::Atom); return atom_; }
  const AgentId& agent() const;  // Here and Sees
  int sees_range() const { assert(kind_ == Kind::Sees); return range_; }
  const std::set<AgentId>& members() const { assert(kind_ == Kind::Coalition); return members_; }
  const FormulaPtr& child() const { assert(a_); return a_; }    // Not/BoxS/BoxM/Sees/Coalition
  const FormulaPtr& left() const { assert(a_); return a_; }     // And
  const FormulaPtr& right() const { assert(b_); return b_; }
  const SpatialProgramPtr& sprog() const { assert(kind_ == Kind::BoxS); return sprog_; }
  const MotionProgramPtr& mprog() const { assert(kind_ == Kind::BoxM); return mprog_; }
  std::size_t hash() const { return hash_; }

 private:
  Formula() = default;
  Kind kind_{};
  Atom atom_;
  AgentId agent_;
  int range_ = 0;
  std::set<AgentId> members_;
  FormulaPtr a_, b_;
  SpatialProgramPtr sprog_;
  MotionProgramPtr mprog_;
  std::size_t hash_ = 0;
};

// Deep structural equality (hash-accelerated).
bool equal(const SpatialProgramPtr& a, const SpatialProgramPtr& b);
bool equal(const MotionProgramPtr& a, const MotionProgramPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaPtrHash {
  std::size_t operator()(const FormulaPtr& f) const { return f->hash(); }
};
struct FormulaPtrEq {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return equal(a, b);
  }
};

// ---------------------------------------------------------------------------
// Structural measures.

// Nesting depth of modal operators. A box counts 1 plus the maximum of its
// body's degree and the degrees of test conditions embedded in its program;
// the perception and coalition operators count 1 plus their body's degree.
int modal_degree(const FormulaPtr& f);
int modal_degree(const SpatialProgramPtr& p);  // max test degree inside p
int modal_degree(const MotionProgramPtr& p);

// Number of AST nodes, program nodes included (a joint action is one node).
int formula_size(const FormulaPtr& f);
int program_size(const SpatialProgramPtr& p);
int program_size(const MotionProgramPtr& p);

// Distinct subformulas (test conditions included) in an order where every
// strict subformula precedes each formula containing it; f itself is last.
std::vector<FormulaPtr> enumerate_subformulas(const FormulaPtr& f);

struct Vocabulary {
  std::set<Atom> atoms;
  std::set<AgentId> agents;
};
Vocabulary vocabulary(const FormulaPtr& f);

// Which syntactic features occur; used to route queries to the right
// decision procedure.
struct Features {
  bool star = false;            // any iterated program
  bool compound_star = false;   // iteration over a non-atomic program
  bool compound_program = false;  // seq/choice/test in a spatial program
  bool motion = false;
  bool sees = false;
  bool coalition = false;
};
Features features(const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Concrete syntax.
//
//   atoms        [a-z][a-z0-9_]* (true/false/here are reserved)
//   formulas     p, here(i), true, false, ~f, (f&f), (f|f), (f->f), (f<->f),
//                [prog]f, <prog>f, S(i,k)f, <<i,j>>f
//   programs     U D L R, p1;p2, p1+p2, p1*, f?, {i:up,j:stay}
//                ';' binds tighter than '+'; '*' and '?' are postfix.
//
// A bracketed program containing a joint action is a motion program (moves
// and iteration are then rejected inside it); otherwise it is spatial.

// Parses with an explicitly declared agent set; referring to an undeclared
// agent is an error, and joint actions are completed to be total over it.
FormulaPtr parse_formula(std::string_view text, const std::set<AgentId>& agents);

// Parses with the agent set inferred from the text itself.
FormulaPtr parse_formula(std::string_view text);

// Agent names that occur in agent positions of the token stream; the set a
// bare parse_formula(text) call will declare.
std::set<AgentId> scan_agents(std::string_view text);

// Printing. Output always reparses to an equal AST (under the same declared
// agent set); rendering then parsing is the identity on core-form text up to
// whitespace.
std::string render_formula(const FormulaPtr& f);
std::string render_program(const SpatialProgramPtr& p);
std::string render_program(const MotionProgramPtr& p);
std::string render_joint_action(const JointAction& delta);

}  // namespace dls

#endif  // DLS_SYNTAX_HPP

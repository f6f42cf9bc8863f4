#include "dls/syntax.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_set>

namespace dls {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  // boost::hash_combine flavour
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_str(const std::string& s) { return std::hash<std::string>{}(s); }

}  // namespace

const char* to_string(Move m) {
  switch (m) {
    case Move::Up: return "U";
    case Move::Down: return "D";
    case Move::Right: return "R";
    case Move::Left: return "L";
  }
  return "?";
}

const char* to_string(Action a) {
  switch (a) {
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Right: return "right";
    case Action::Left: return "left";
    case Action::Stay: return "stay";
  }
  return "?";
}

std::size_t JointAction::hash() const {
  std::size_t h = 0xa71e;
  for (const auto& [agent, act] : entries_) {
    h = mix(h, hash_str(agent.name));
    h = mix(h, static_cast<std::size_t>(act));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Factories

SpatialProgramPtr SpatialProgram::move(Move m) {
  auto p = std::shared_ptr<SpatialProgram>(new SpatialProgram());
  p->kind_ = Kind::Move;
  p->move_ = m;
  p->hash_ = mix(1, static_cast<std::size_t>(m));
  return p;
}

SpatialProgramPtr SpatialProgram::seq(SpatialProgramPtr a, SpatialProgramPtr b) {
  auto p = std::shared_ptr<SpatialProgram>(new SpatialProgram());
  p->kind_ = Kind::Seq;
  p->hash_ = mix(mix(2, a->hash()), b->hash());
  p->a_ = std::move(a);
  p->b_ = std::move(b);
  return p;
}

SpatialProgramPtr SpatialProgram::choice(SpatialProgramPtr a, SpatialProgramPtr b) {
  auto p = std::shared_ptr<SpatialProgram>(new SpatialProgram());
  p->kind_ = Kind::Choice;
  p->hash_ = mix(mix(3, a->hash()), b->hash());
  p->a_ = std::move(a);
  p->b_ = std::move(b);
  return p;
}

SpatialProgramPtr SpatialProgram::star(SpatialProgramPtr body) {
  auto p = std::shared_ptr<SpatialProgram>(new SpatialProgram());
  p->kind_ = Kind::Star;
  p->hash_ = mix(4, body->hash());
  p->a_ = std::move(body);
  return p;
}

SpatialProgramPtr SpatialProgram::test(FormulaPtr condition) {
  auto p = std::shared_ptr<SpatialProgram>(new SpatialProgram());
  p->kind_ = Kind::Test;
  p->hash_ = mix(5, condition->hash());
  p->test_ = std::move(condition);
  return p;
}

const FormulaPtr& SpatialProgram::condition() const {
  assert(kind_ == Kind::Test);
  return test_;
}

MotionProgramPtr MotionProgram::joint(JointAction delta) {
  auto p = std::shared_ptr<MotionProgram>(new MotionProgram());
  p->kind_ = Kind::Joint;
  p->hash_ = mix(11, delta.hash());
  p->delta_ = std::move(delta);
  return p;
}

MotionProgramPtr MotionProgram::seq(MotionProgramPtr a, MotionProgramPtr b) {
  auto p = std::shared_ptr<MotionProgram>(new MotionProgram());
  p->kind_ = Kind::Seq;
  p->hash_ = mix(mix(12, a->hash()), b->hash());
  p->a_ = std::move(a);
  p->b_ = std::move(b);
  return p;
}

MotionProgramPtr MotionProgram::choice(MotionProgramPtr a, MotionProgramPtr b) {
  auto p = std::shared_ptr<MotionProgram>(new MotionProgram());
  p->kind_ = Kind::Choice;
  p->hash_ = mix(mix(13, a->hash()), b->hash());
  p->a_ = std::move(a);
  p->b_ = std::move(b);
  return p;
}

MotionProgramPtr MotionProgram::test(FormulaPtr condition) {
  auto p = std::shared_ptr<MotionProgram>(new MotionProgram());
  p->kind_ = Kind::Test;
  p->hash_ = mix(14, condition->hash());
  p->test_ = std::move(condition);
  return p;
}

const FormulaPtr& MotionProgram::condition() const {
  assert(kind_ == Kind::Test);
  return test_;
}

FormulaPtr Formula::atom(Atom p) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Atom;
  f->hash_ = mix(21, hash_str(p.name));
  f->atom_ = std::move(p);
  return f;
}

FormulaPtr Formula::here(AgentId i) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Here;
  f->hash_ = mix(22, hash_str(i.name));
  f->agent_ = std::move(i);
  return f;
}

FormulaPtr Formula::falsum() {
  static const FormulaPtr instance = [] {
    auto f = std::shared_ptr<Formula>(new Formula());
    f->kind_ = Kind::False;
    f->hash_ = 23;
    return FormulaPtr(f);
  }();
  return instance;
}

FormulaPtr Formula::negation(FormulaPtr g) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->hash_ = mix(24, g->hash());
  f->a_ = std::move(g);
  return f;
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::And;
  f->hash_ = mix(mix(25, a->hash()), b->hash());
  f->a_ = std::move(a);
  f->b_ = std::move(b);
  return f;
}

FormulaPtr Formula::box(SpatialProgramPtr program, FormulaPtr g) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::BoxS;
  f->hash_ = mix(mix(26, program->hash()), g->hash());
  f->sprog_ = std::move(program);
  f->a_ = std::move(g);
  return f;
}

FormulaPtr Formula::box(MotionProgramPtr program, FormulaPtr g) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::BoxM;
  f->hash_ = mix(mix(27, program->hash()), g->hash());
  f->mprog_ = std::move(program);
  f->a_ = std::move(g);
  return f;
}

FormulaPtr Formula::sees(AgentId i, int range, FormulaPtr g) {
  assert(range >= 0);
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Sees;
  f->hash_ = mix(mix(mix(28, hash_str(i.name)), static_cast<std::size_t>(range)),
                 g->hash());
  f->agent_ = std::move(i);
  f->range_ = range;
  f->a_ = std::move(g);
  return f;
}

FormulaPtr Formula::coalition(std::set<AgentId> members, FormulaPtr g) {
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Coalition;
  std::size_t h = 29;
  for (const auto& m : members) h = mix(h, hash_str(m.name));
  f->hash_ = mix(h, g->hash());
  f->members_ = std::move(members);
  f->a_ = std::move(g);
  return f;
}

const AgentId& Formula::agent() const {
  assert(kind_ == Kind::Here || kind_ == Kind::Sees);
  return agent_;
}

FormulaPtr Formula::verum() { return negation(falsum()); }

FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b) {
  return negation(conjunction(negation(std::move(a)), negation(std::move(b))));
}

FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  return negation(conjunction(std::move(a), negation(std::move(b))));
}

FormulaPtr Formula::iff(FormulaPtr a, FormulaPtr b) {
  FormulaPtr forward = implies(a, b);
  FormulaPtr backward = implies(std::move(b), std::move(a));
  return conjunction(std::move(forward), std::move(backward));
}

FormulaPtr Formula::diamond(SpatialProgramPtr program, FormulaPtr f) {
  return negation(box(std::move(program), negation(std::move(f))));
}

FormulaPtr Formula::diamond(MotionProgramPtr program, FormulaPtr f) {
  return negation(box(std::move(program), negation(std::move(f))));
}

// ---------------------------------------------------------------------------
// Structural equality

bool equal(const SpatialProgramPtr& a, const SpatialProgramPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->hash() != b->hash() || a->kind() != b->kind()) return false;
  using K = SpatialProgram::Kind;
  switch (a->kind()) {
    case K::Move: return a->move_dir() == b->move_dir();
    case K::Seq:
    case K::Choice:
      return equal(a->left(), b->left()) && equal(a->right(), b->right());
    case K::Star: return equal(a->body(), b->body());
    case K::Test: return equal(a->condition(), b->condition());
  }
  return false;
}

bool equal(const MotionProgramPtr& a, const MotionProgramPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->hash() != b->hash() || a->kind() != b->kind()) return false;
  using K = MotionProgram::Kind;
  switch (a->kind()) {
    case K::Joint: return a->action() == b->action();
    case K::Seq:
    case K::Choice:
      return equal(a->left(), b->left()) && equal(a->right(), b->right());
    case K::Test: return equal(a->condition(), b->condition());
  }
  return false;
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->hash() != b->hash() || a->kind() != b->kind()) return false;
  using K = Formula::Kind;
  switch (a->kind()) {
    case K::Atom: return a->atom_name() == b->atom_name();
    case K::Here: return a->agent() == b->agent();
    case K::False: return true;
    case K::Not: return equal(a->child(), b->child());
    case K::And: return equal(a->left(), b->left()) && equal(a->right(), b->right());
    case K::BoxS:
      return equal(a->sprog(), b->sprog()) && equal(a->child(), b->child());
    case K::BoxM:
      return equal(a->mprog(), b->mprog()) && equal(a->child(), b->child());
    case K::Sees:
      return a->agent() == b->agent() && a->sees_range() == b->sees_range() &&
             equal(a->child(), b->child());
    case K::Coalition:
      return a->members() == b->members() && equal(a->child(), b->child());
  }
  return false;
}

// ---------------------------------------------------------------------------
// Measures

int modal_degree(const SpatialProgramPtr& p) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return 0;
    case K::Seq:
    case K::Choice:
      return std::max(modal_degree(p->left()), modal_degree(p->right()));
    case K::Star: return modal_degree(p->body());
    case K::Test: return modal_degree(p->condition());
  }
  return 0;
}

int modal_degree(const MotionProgramPtr& p) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint: return 0;
    case K::Seq:
    case K::Choice:
      return std::max(modal_degree(p->left()), modal_degree(p->right()));
    case K::Test: return modal_degree(p->condition());
  }
  return 0;
}

int modal_degree(const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return 0;
    case K::Not: return modal_degree(f->child());
    case K::And:
      return std::max(modal_degree(f->left()), modal_degree(f->right()));
    case K::BoxS:
      return 1 + std::max(modal_degree(f->child()), modal_degree(f->sprog()));
    case K::BoxM:
      return 1 + std::max(modal_degree(f->child()), modal_degree(f->mprog()));
    case K::Sees:
    case K::Coalition:
      return 1 + modal_degree(f->child());
  }
  return 0;
}

int program_size(const SpatialProgramPtr& p) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return 1;
    case K::Seq:
    case K::Choice:
      return 1 + program_size(p->left()) + program_size(p->right());
    case K::Star: return 1 + program_size(p->body());
    case K::Test: return 1 + formula_size(p->condition());
  }
  return 1;
}

int program_size(const MotionProgramPtr& p) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint: return 1;
    case K::Seq:
    case K::Choice:
      return 1 + program_size(p->left()) + program_size(p->right());
    case K::Test: return 1 + formula_size(p->condition());
  }
  return 1;
}

int formula_size(const FormulaPtr& f) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return 1;
    case K::Not: return 1 + formula_size(f->child());
    case K::And: return 1 + formula_size(f->left()) + formula_size(f->right());
    case K::BoxS: return 1 + program_size(f->sprog()) + formula_size(f->child());
    case K::BoxM: return 1 + program_size(f->mprog()) + formula_size(f->child());
    case K::Sees:
    case K::Coalition:
      return 1 + formula_size(f->child());
  }
  return 1;
}

namespace {

void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                         std::unordered_set<FormulaPtr, FormulaPtrHash,
                                            FormulaPtrEq>& seen);

void collect_program_tests(const SpatialProgramPtr& p, std::vector<FormulaPtr>& out,
                           std::unordered_set<FormulaPtr, FormulaPtrHash,
                                              FormulaPtrEq>& seen) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return;
    case K::Seq:
    case K::Choice:
      collect_program_tests(p->left(), out, seen);
      collect_program_tests(p->right(), out, seen);
      return;
    case K::Star: collect_program_tests(p->body(), out, seen); return;
    case K::Test: collect_subformulas(p->condition(), out, seen); return;
  }
}

void collect_program_tests(const MotionProgramPtr& p, std::vector<FormulaPtr>& out,
                           std::unordered_set<FormulaPtr, FormulaPtrHash,
                                              FormulaPtrEq>& seen) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint: return;
    case K::Seq:
    case K::Choice:
      collect_program_tests(p->left(), out, seen);
      collect_program_tests(p->right(), out, seen);
      return;
    case K::Test: collect_subformulas(p->condition(), out, seen); return;
  }
}

void collect_subformulas(const FormulaPtr& f, std::vector<FormulaPtr>& out,
                         std::unordered_set<FormulaPtr, FormulaPtrHash,
                                            FormulaPtrEq>& seen) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      break;
    case K::Not:
    case K::Sees:
    case K::Coalition:
      collect_subformulas(f->child(), out, seen);
      break;
    case K::And:
      collect_subformulas(f->left(), out, seen);
      collect_subformulas(f->right(), out, seen);
      break;
    case K::BoxS:
      collect_program_tests(f->sprog(), out, seen);
      collect_subformulas(f->child(), out, seen);
      break;
    case K::BoxM:
      collect_program_tests(f->mprog(), out, seen);
      collect_subformulas(f->child(), out, seen);
      break;
  }
  if (seen.insert(f).second) out.push_back(f);
}

}  // namespace

std::vector<FormulaPtr> enumerate_subformulas(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  std::unordered_set<FormulaPtr, FormulaPtrHash, FormulaPtrEq> seen;
  collect_subformulas(f, out, seen);
  return out;
}

namespace {

void collect_vocab(const FormulaPtr& f, Vocabulary& v);

void collect_vocab(const SpatialProgramPtr& p, Vocabulary& v) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return;
    case K::Seq:
    case K::Choice:
      collect_vocab(p->left(), v);
      collect_vocab(p->right(), v);
      return;
    case K::Star: collect_vocab(p->body(), v); return;
    case K::Test: collect_vocab(p->condition(), v); return;
  }
}

void collect_vocab(const MotionProgramPtr& p, Vocabulary& v) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint:
      for (const auto& [agent, act] : p->action().entries()) {
        (void)act;
        v.agents.insert(agent);
      }
      return;
    case K::Seq:
    case K::Choice:
      collect_vocab(p->left(), v);
      collect_vocab(p->right(), v);
      return;
    case K::Test: collect_vocab(p->condition(), v); return;
  }
}

void collect_vocab(const FormulaPtr& f, Vocabulary& v) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom: v.atoms.insert(f->atom_name()); return;
    case K::Here: v.agents.insert(f->agent()); return;
    case K::False: return;
    case K::Not: collect_vocab(f->child(), v); return;
    case K::And:
      collect_vocab(f->left(), v);
      collect_vocab(f->right(), v);
      return;
    case K::BoxS:
      collect_vocab(f->sprog(), v);
      collect_vocab(f->child(), v);
      return;
    case K::BoxM:
      collect_vocab(f->mprog(), v);
      collect_vocab(f->child(), v);
      return;
    case K::Sees:
      v.agents.insert(f->agent());
      collect_vocab(f->child(), v);
      return;
    case K::Coalition:
      for (const auto& m : f->members()) v.agents.insert(m);
      collect_vocab(f->child(), v);
      return;
  }
}

void collect_features(const FormulaPtr& f, Features& x);

void collect_features(const SpatialProgramPtr& p, Features& x) {
  using K = SpatialProgram::Kind;
  switch (p->kind()) {
    case K::Move: return;
    case K::Seq:
    case K::Choice:
      x.compound_program = true;
      collect_features(p->left(), x);
      collect_features(p->right(), x);
      return;
    case K::Star:
      x.star = true;
      if (p->body()->kind() != K::Move) x.compound_star = true;
      collect_features(p->body(), x);
      return;
    case K::Test:
      x.compound_program = true;
      collect_features(p->condition(), x);
      return;
  }
}

void collect_features(const MotionProgramPtr& p, Features& x) {
  using K = MotionProgram::Kind;
  switch (p->kind()) {
    case K::Joint: return;
    case K::Seq:
    case K::Choice:
      collect_features(p->left(), x);
      collect_features(p->right(), x);
      return;
    case K::Test: collect_features(p->condition(), x); return;
  }
}

void collect_features(const FormulaPtr& f, Features& x) {
  using K = Formula::Kind;
  switch (f->kind()) {
    case K::Atom:
    case K::Here:
    case K::False:
      return;
    case K::Not:
      collect_features(f->child(), x);
      return;
    case K::And:
      collect_features(f->left(), x);
      collect_features(f->right(), x);
      return;
    case K::BoxS:
      collect_features(f->sprog(), x);
      collect_features(f->child(), x);
      return;
    case K::BoxM:
      x.motion = true;
      collect_features(f->mprog(), x);
      collect_features(f->child(), x);
      return;
    case K::Sees:
      x.sees = true;
      collect_features(f->child(), x);
      return;
    case K::Coalition:
      x.coalition = true;
      collect_features(f->child(), x);
      return;
  }
}

}  // namespace

Vocabulary vocabulary(const FormulaPtr& f) {
  Vocabulary v;
  collect_vocab(f, v);
  return v;
}

Features features(const FormulaPtr& f) {
  Features x;
  collect_features(f, x);
  return x;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok : std::uint8_t {
  Ident, Upper, Int,
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Lt, Gt, LtLt, GtGt,
  Tilde, Amp, Pipe, Arrow, DoubleArrow,
  Semi, Plus, Star, Question, Comma, Colon,
  End
};

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t at, std::string text = {}, long v = 0) {
    out.push_back(Token{k, std::move(text), v, at});
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
    std::size_t at = i;
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < s.size() &&
             ((s[j] >= 'a' && s[j] <= 'z') || (s[j] >= '0' && s[j] <= '9') ||
              s[j] == '_'))
        ++j;
      push(Tok::Ident, at, std::string(s.substr(i, j - i)));
      i = j;
      continue;
    }
    if (c >= 'A' && c <= 'Z') {
      push(Tok::Upper, at, std::string(1, c));
      ++i;
      continue;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i;
      long v = 0;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') {
        v = v * 10 + (s[j] - '0');
        ++j;
      }
      push(Tok::Int, at, std::string(s.substr(i, j - i)), v);
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, at); ++i; break;
      case ')': push(Tok::RParen, at); ++i; break;
      case '[': push(Tok::LBracket, at); ++i; break;
      case ']': push(Tok::RBracket, at); ++i; break;
      case '{': push(Tok::LBrace, at); ++i; break;
      case '}': push(Tok::RBrace, at); ++i; break;
      case '~': push(Tok::Tilde, at); ++i; break;
      case '&': push(Tok::Amp, at); ++i; break;
      case '|': push(Tok::Pipe, at); ++i; break;
      case ';': push(Tok::Semi, at); ++i; break;
      case '+': push(Tok::Plus, at); ++i; break;
      case '*': push(Tok::Star, at); ++i; break;
      case '?': push(Tok::Question, at); ++i; break;
      case ',': push(Tok::Comma, at); ++i; break;
      case ':': push(Tok::Colon, at); ++i; break;
      case '-':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          push(Tok::Arrow, at);
          i += 2;
        } else {
          throw ParseError("unexpected '-'", at);
        }
        break;
      case '<':
        if (i + 2 < s.size() && s[i + 1] == '-' && s[i + 2] == '>') {
          push(Tok::DoubleArrow, at);
          i += 3;
        } else if (i + 1 < s.size() && s[i + 1] == '<') {
          push(Tok::LtLt, at);
          i += 2;
        } else {
          push(Tok::Lt, at);
          ++i;
        }
        break;
      case '>':
        if (i + 1 < s.size() && s[i + 1] == '>') {
          push(Tok::GtGt, at);
          i += 2;
        } else {
          push(Tok::Gt, at);
          ++i;
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }
  }
  out.push_back(Token{Tok::End, "", 0, s.size()});
  return out;
}

// Program segments are parsed into a shape-neutral tree first; a bracketed
// program is classified as motion exactly when it contains a joint action.
struct PProg {
  enum class Kind : std::uint8_t { Move, Joint, Seq, Choice, Star, Test };
  Kind kind{};
  Move move{};
  JointAction delta;
  std::shared_ptr<PProg> a, b;
  FormulaPtr test;
};
using PProgPtr = std::shared_ptr<PProg>;

bool contains_joint(const PProg& p) {
  switch (p.kind) {
    case PProg::Kind::Move: return false;
    case PProg::Kind::Joint: return true;
    case PProg::Kind::Seq:
    case PProg::Kind::Choice:
      return contains_joint(*p.a) || contains_joint(*p.b);
    case PProg::Kind::Star: return contains_joint(*p.a);
    case PProg::Kind::Test: return false;
  }
  return false;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::set<AgentId> agents)
      : toks_(std::move(tokens)), agents_(std::move(agents)) {}

  FormulaPtr run() {
    FormulaPtr f = formula();
    expect(Tok::End, "end of input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, toks_[i_].pos);
  }
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = i_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    take();
  }

  AgentId agent_ref(const std::string& name) {
    AgentId id{name};
    if (!agents_.contains(id)) fail("undeclared agent '" + name + "'");
    return id;
  }

  FormulaPtr formula() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Tilde:
        take();
        return Formula::negation(formula());
      case Tok::LBracket: {
        take();
        PProgPtr p = program();
        expect(Tok::RBracket, "']'");
        FormulaPtr body = formula();
        return make_box(p, std::move(body));
      }
      case Tok::Lt: {
        take();
        PProgPtr p = program();
        expect(Tok::Gt, "'>'");
        FormulaPtr body = formula();
        return Formula::negation(
            make_box(p, Formula::negation(std::move(body))));
      }
      case Tok::LtLt: {
        take();
        std::set<AgentId> members;
        if (peek().kind != Tok::GtGt) {
          members.insert(agent_ref(ident("agent name")));
          while (peek().kind == Tok::Comma) {
            take();
            members.insert(agent_ref(ident("agent name")));
          }
        }
        expect(Tok::GtGt, "'>>'");
        return Formula::coalition(std::move(members), formula());
      }
      case Tok::Upper:
        if (t.text == "S" && peek(1).kind == Tok::LParen) {
          take();
          take();
          AgentId i = agent_ref(ident("agent name"));
          expect(Tok::Comma, "','");
          if (peek().kind != Tok::Int) fail("expected a nonnegative range");
          long k = take().value;
          expect(Tok::RParen, "')'");
          return Formula::sees(std::move(i), static_cast<int>(k), formula());
        }
        fail("unexpected '" + t.text + "'");
      case Tok::LParen: {
        take();
        FormulaPtr a = formula();
        if (peek().kind == Tok::RParen) {
          take();
          return a;
        }
        Tok op = peek().kind;
        if (op != Tok::Amp && op != Tok::Pipe && op != Tok::Arrow &&
            op != Tok::DoubleArrow)
          fail("expected a binary connective or ')'");
        take();
        FormulaPtr b = formula();
        expect(Tok::RParen, "')'");
        switch (op) {
          case Tok::Amp: return Formula::conjunction(std::move(a), std::move(b));
          case Tok::Pipe: return Formula::disjunction(std::move(a), std::move(b));
          case Tok::Arrow: return Formula::implies(std::move(a), std::move(b));
          default: return Formula::iff(std::move(a), std::move(b));
        }
      }
      case Tok::Ident: {
        if (t.text == "true") { take(); return Formula::verum(); }
        if (t.text == "false") { take(); return Formula::falsum(); }
        if (t.text == "here") {
          take();
          expect(Tok::LParen, "'(' after here");
          AgentId i = agent_ref(ident("agent name"));
          expect(Tok::RParen, "')'");
          return Formula::here(std::move(i));
        }
        take();
        return Formula::atom(Atom{t.text});
      }
      default:
        fail("expected a formula");
    }
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return take().text;
  }

  // program := seq ('+' seq)* ; seq := postfix (';' postfix)* ;
  // postfix := primary '*'* ; primary := move | '{'joint'}' | '('program')'
  //            | formula '?'
  PProgPtr program() {
    PProgPtr p = seq_prog();
    while (peek().kind == Tok::Plus) {
      take();
      PProgPtr q = seq_prog();
      auto r = std::make_shared<PProg>();
      r->kind = PProg::Kind::Choice;
      r->a = std::move(p);
      r->b = std::move(q);
      p = std::move(r);
    }
    return p;
  }

  PProgPtr seq_prog() {
    PProgPtr p = postfix_prog();
    while (peek().kind == Tok::Semi) {
      take();
      PProgPtr q = postfix_prog();
      auto r = std::make_shared<PProg>();
      r->kind = PProg::Kind::Seq;
      r->a = std::move(p);
      r->b = std::move(q);
      p = std::move(r);
    }
    return p;
  }

  PProgPtr postfix_prog() {
    PProgPtr p = primary_prog();
    while (peek().kind == Tok::Star) {
      take();
      auto r = std::make_shared<PProg>();
      r->kind = PProg::Kind::Star;
      r->a = std::move(p);
      p = std::move(r);
    }
    return p;
  }

  PProgPtr primary_prog() {
    const Token& t = peek();
    if (t.kind == Tok::Upper && t.text.size() == 1 &&
        (t.text[0] == 'U' || t.text[0] == 'D' || t.text[0] == 'R' ||
         t.text[0] == 'L')) {
      take();
      auto p = std::make_shared<PProg>();
      p->kind = PProg::Kind::Move;
      switch (t.text[0]) {
        case 'U': p->move = Move::Up; break;
        case 'D': p->move = Move::Down; break;
        case 'R': p->move = Move::Right; break;
        default: p->move = Move::Left; break;
      }
      return p;
    }
    if (t.kind == Tok::LBrace) return joint_prog();
    if (t.kind == Tok::LParen) {
      // A '(' may open a grouped program or a parenthesised test formula;
      // try the program reading first and fall back on failure.
      std::size_t save = i_;
      try {
        take();
        PProgPtr p = program();
        expect(Tok::RParen, "')'");
        return p;
      } catch (const ParseError&) {
        i_ = save;
      }
    }
    FormulaPtr f = formula();
    expect(Tok::Question, "'?'");
    auto p = std::make_shared<PProg>();
    p->kind = PProg::Kind::Test;
    p->test = std::move(f);
    return p;
  }

  PProgPtr joint_prog() {
    expect(Tok::LBrace, "'{'");
    std::map<AgentId, Action> entries;
    if (peek().kind != Tok::RBrace) {
      for (;;) {
        AgentId id = agent_ref(ident("agent name"));
        if (entries.contains(id))
          fail("agent '" + id.name + "' listed twice in a joint action");
        expect(Tok::Colon, "':'");
        std::string act = ident("action");
        Action a;
        if (act == "up") a = Action::Up;
        else if (act == "down") a = Action::Down;
        else if (act == "left") a = Action::Left;
        else if (act == "right") a = Action::Right;
        else if (act == "stay" || act == "skip") a = Action::Stay;
        else fail("unknown action '" + act + "'");
        entries.emplace(std::move(id), a);
        if (peek().kind != Tok::Comma) break;
        take();
      }
    }
    expect(Tok::RBrace, "'}'");
    // total over the declared agent set
    for (const auto& agent : agents_)
      entries.try_emplace(agent, Action::Stay);
    auto p = std::make_shared<PProg>();
    p->kind = PProg::Kind::Joint;
    p->delta = JointAction(std::move(entries));
    return p;
  }

  SpatialProgramPtr to_spatial(const PProgPtr& p) {
    switch (p->kind) {
      case PProg::Kind::Move: return SpatialProgram::move(p->move);
      case PProg::Kind::Joint:
        fail("joint action inside a spatial program");
      case PProg::Kind::Seq:
        return SpatialProgram::seq(to_spatial(p->a), to_spatial(p->b));
      case PProg::Kind::Choice:
        return SpatialProgram::choice(to_spatial(p->a), to_spatial(p->b));
      case PProg::Kind::Star: return SpatialProgram::star(to_spatial(p->a));
      case PProg::Kind::Test: return SpatialProgram::test(p->test);
    }
    fail("bad program");
  }

  MotionProgramPtr to_motion(const PProgPtr& p) {
    switch (p->kind) {
      case PProg::Kind::Move:
        fail("compass move inside a motion program");
      case PProg::Kind::Joint: return MotionProgram::joint(p->delta);
      case PProg::Kind::Seq:
        return MotionProgram::seq(to_motion(p->a), to_motion(p->b));
      case PProg::Kind::Choice:
        return MotionProgram::choice(to_motion(p->a), to_motion(p->b));
      case PProg::Kind::Star:
        fail("motion programs cannot be iterated");
      case PProg::Kind::Test: return MotionProgram::test(p->test);
    }
    fail("bad program");
  }

  FormulaPtr make_box(const PProgPtr& p, FormulaPtr body) {
    if (contains_joint(*p)) return Formula::box(to_motion(p), std::move(body));
    return Formula::box(to_spatial(p), std::move(body));
  }

  std::vector<Token> toks_;
  std::set<AgentId> agents_;
  std::size_t i_ = 0;
};

std::set<AgentId> prescan_agents(const std::vector<Token>& toks) {
  std::set<AgentId> agents;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind == Tok::Ident && t.text == "here" && i + 2 < toks.size() &&
        toks[i + 1].kind == Tok::LParen && toks[i + 2].kind == Tok::Ident) {
      agents.insert(AgentId{toks[i + 2].text});
    } else if (t.kind == Tok::Upper && t.text == "S" && i + 2 < toks.size() &&
               toks[i + 1].kind == Tok::LParen &&
               toks[i + 2].kind == Tok::Ident) {
      agents.insert(AgentId{toks[i + 2].text});
    } else if (t.kind == Tok::LBrace) {
      for (std::size_t j = i + 1;
           j + 1 < toks.size() && toks[j].kind != Tok::RBrace; ++j) {
        if (toks[j].kind == Tok::Ident && toks[j + 1].kind == Tok::Colon)
          agents.insert(AgentId{toks[j].text});
      }
    } else if (t.kind == Tok::LtLt) {
      for (std::size_t j = i + 1;
           j < toks.size() && toks[j].kind != Tok::GtGt; ++j) {
        if (toks[j].kind == Tok::Ident) agents.insert(AgentId{toks[j].text});
      }
    }
  }
  return agents;
}

}  // namespace

FormulaPtr parse_formula(std::string_view text, const std::set<AgentId>& agents) {
  Parser p(lex(text), agents);
  return p.run();
}

FormulaPtr parse_formula(std::string_view text) {
  auto toks = lex(text);
  Parser p(toks, prescan_agents(toks));
  return p.run();
}

std::set<AgentId> scan_agents(std::string_view text) {
  return prescan_agents(lex(text));
}

// ---------------------------------------------------------------------------
// Printer

namespace {

bool is_verum(const FormulaPtr& f) {
  return f->kind() == Formula::Kind::Not &&
         f->child()->kind() == Formula::Kind::False;
}

void render(const FormulaPtr& f, std::string& out);

// precedence: choice 0 < seq 1 < postfix/primary 2
void render(const SpatialProgramPtr& p, std::string& out, int parent, bool rhs) {
  using K = SpatialProgram::Kind;
  int prec;
  switch (p->kind()) {
    case K::Choice: prec = 0; break;
    case K::Seq: prec = 1; break;
    default: prec = 2; break;
  }
  bool wrap = prec < parent || (prec == parent && rhs && prec < 2);
  if (wrap) out += '(';
  switch (p->kind()) {
    case K::Move: out += to_string(p->move_dir()); break;
    case K::Seq:
      render(p->left(), out, 1, false);
      out += ';';
      render(p->right(), out, 1, true);
      break;
    case K::Choice:
      render(p->left(), out, 0, false);
      out += '+';
      render(p->right(), out, 0, true);
      break;
    case K::Star:
      render(p->body(), out, 2, false);
      out += '*';
      break;
    case K::Test:
      render(p->condition(), out);
      out += '?';
      break;
  }
  if (wrap) out += ')';
}

void render(const MotionProgramPtr& p, std::string& out, int parent, bool rhs) {
  using K = MotionProgram::Kind;
  int prec;
  switch (p->kind()) {
    case K::Choice: prec = 0; break;
    case K::Seq: prec = 1; break;
    default: prec = 2; break;
  }
  bool wrap = prec < parent || (prec == parent && rhs && prec < 2);
  if (wrap) out += '(';
  switch (p->kind()) {
    case K::Joint: out += render_joint_action(p->action()); break;
    case K::Seq:
      render(p->left(), out, 1, false);
      out += ';';
      render(p->right(), out, 1, true);
      break;
    case K::Choice:
      render(p->left(), out, 0, false);
      out += '+';
      render(p->right(), out, 0, true);
      break;
    case K::Test:
      render(p->condition(), out);
      out += '?';
      break;
  }
  if (wrap) out += ')';
}

void render(const FormulaPtr& f, std::string& out) {
  using K = Formula::Kind;
  if (is_verum(f)) {
    out += "true";
    return;
  }
  switch (f->kind()) {
    case K::Atom: out += f->atom_name().name; return;
    case K::Here:
      out += "here(";
      out += f->agent().name;
      out += ')';
      return;
    case K::False: out += "false"; return;
    case K::Not:
      out += '~';
      render(f->child(), out);
      return;
    case K::And:
      out += '(';
      render(f->left(), out);
      out += '&';
      render(f->right(), out);
      out += ')';
      return;
    case K::BoxS:
      out += '[';
      render(f->sprog(), out, 0, false);
      out += ']';
      render(f->child(), out);
      return;
    case K::BoxM:
      out += '[';
      render(f->mprog(), out, 0, false);
      out += ']';
      render(f->child(), out);
      return;
    case K::Sees:
      out += "S(";
      out += f->agent().name;
      out += ',';
      out += std::to_string(f->sees_range());
      out += ')';
      render(f->child(), out);
      return;
    case K::Coalition: {
      out += "<<";
      bool first = true;
      for (const auto& m : f->members()) {
        if (!first) out += ',';
        out += m.name;
        first = false;
      }
      out += ">>";
      render(f->child(), out);
      return;
    }
  }
}

}  // namespace

std::string render_joint_action(const JointAction& delta) {
  std::string out = "{";
  bool first = true;
  for (const auto& [agent, act] : delta.entries()) {
    if (!first) out += ',';
    out += agent.name;
    out += ':';
    out += to_string(act);
    first = false;
  }
  out += '}';
  return out;
}

std::string render_formula(const FormulaPtr& f) {
  std::string out;
  render(f, out);
  return out;
}

std::string render_program(const SpatialProgramPtr& p) {
  std::string out;
  render(p, out, 0, false);
  return out;
}

std::string render_program(const MotionProgramPtr& p) {
  std::string out;
  render(p, out, 0, false);
  return out;
}

}  // namespace dls

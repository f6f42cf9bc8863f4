#include "dls/axioms.hpp"

#include <algorithm>
#include <limits>

#include "dls/motion.hpp"

namespace dls {

int Rng::range(int lo, int hi) {
  assert(lo <= hi);
  std::uint64_t span = static_cast<std::uint64_t>(hi) - lo + 1;
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return lo + static_cast<int>(r % span);
}

Rng Rng::fork(std::uint64_t salt) const {
  // splitmix64 of (seed, salt)
  std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

SpatialModel random_model(Rng& rng, int bound, const std::set<Atom>& atoms,
                          const std::set<AgentId>& agents) {
  std::map<AgentId, Pos> positions;
  for (const AgentId& a : agents)
    positions[a] = {rng.range(-bound, bound), rng.range(-bound, bound)};
  std::map<Pos, std::set<Atom>> valuation;
  for (int x = -bound; x <= bound; ++x)
    for (int y = -bound; y <= bound; ++y)
      for (const Atom& p : atoms)
        if (rng.coin()) valuation[{x, y}].insert(p);
  return SpatialModel(std::move(positions), std::move(valuation), bound);
}

// ---------------------------------------------------------------------------
// Random formulas

namespace {

Move random_move(Rng& rng) { return kAllMoves[rng.range(0, 3)]; }

JointAction random_joint(Rng& rng, const std::set<AgentId>& agents) {
  std::map<AgentId, Action> entries;
  for (const AgentId& a : agents) entries[a] = kAllActions[rng.range(0, 4)];
  return JointAction(std::move(entries));
}

FormulaPtr gen_formula(Rng& rng, const GenOptions& opts, int budget);

SpatialProgramPtr gen_sprog(Rng& rng, const GenOptions& opts, int budget) {
  int roll = rng.range(0, 99);
  if (opts.allow_compound && budget >= 0 && roll < 30) {
    switch (rng.range(0, 2)) {
      case 0:
        return SpatialProgram::seq(gen_sprog(rng, opts, budget),
                                   gen_sprog(rng, opts, budget));
      case 1:
        return SpatialProgram::choice(gen_sprog(rng, opts, budget),
                                      gen_sprog(rng, opts, budget));
      default:
        return SpatialProgram::test(gen_formula(rng, opts, budget));
    }
  }
  if (opts.allow_star && roll >= 70)
    return SpatialProgram::star(SpatialProgram::move(random_move(rng)));
  return SpatialProgram::move(random_move(rng));
}

MotionProgramPtr gen_mprog(Rng& rng, const GenOptions& opts, int budget) {
  MotionProgramPtr base = MotionProgram::joint(random_joint(rng, opts.all_agents));
  int roll = rng.range(0, 99);
  if (roll < 20)
    return MotionProgram::seq(base,
                              MotionProgram::joint(random_joint(rng, opts.all_agents)));
  if (roll < 35)
    return MotionProgram::choice(base,
                                 MotionProgram::joint(random_joint(rng, opts.all_agents)));
  if (roll < 50 && budget >= 0)
    return MotionProgram::seq(MotionProgram::test(gen_formula(rng, opts, budget)),
                              base);
  return base;
}

FormulaPtr gen_leaf(Rng& rng, const GenOptions& opts) {
  bool can_atom = !opts.atoms.empty();
  bool can_here = !opts.agents.empty();
  int roll = rng.range(0, 99);
  if (can_atom && (roll < 45 || !can_here)) return Formula::atom(rng.pick(opts.atoms));
  if (can_here && roll < 90) return Formula::here(rng.pick(opts.agents));
  return rng.coin() ? Formula::verum() : Formula::falsum();
}

FormulaPtr gen_formula(Rng& rng, const GenOptions& opts, int budget) {
  int roll = rng.range(0, 99);
  if (budget > 0 && roll < 50) {
    if (opts.allow_motion && rng.range(0, 99) < 40)
      return Formula::box(gen_mprog(rng, opts, budget - 1),
                          gen_formula(rng, opts, budget - 1));
    return Formula::box(gen_sprog(rng, opts, budget - 1),
                        gen_formula(rng, opts, budget - 1));
  }
  if (roll < 65)
    return gen_leaf(rng, opts);
  if (roll < 82)
    return Formula::negation(gen_formula(rng, opts, budget));
  return Formula::conjunction(gen_formula(rng, opts, budget),
                              gen_formula(rng, opts, budget));
}

}  // namespace

FormulaPtr random_formula(Rng& rng, const GenOptions& opts) {
  GenOptions o = opts;
  if (o.all_agents.empty())
    o.all_agents = std::set<AgentId>(o.agents.begin(), o.agents.end());
  return gen_formula(rng, o, o.degree);
}

std::vector<SpatialProgramPtr> neighborhood_programs(int k) {
  std::vector<SpatialProgramPtr> out;
  out.push_back(SpatialProgram::test(Formula::verum()));  // h = 0
  for (int h = 1; h <= k; ++h) {
    for (Move horizontal : {Move::Left, Move::Right}) {
      for (Move vertical : {Move::Up, Move::Down}) {
        SpatialProgramPtr p = SpatialProgram::move(horizontal);
        for (int t = 1; t < h; ++t)
          p = SpatialProgram::seq(p, SpatialProgram::move(horizontal));
        for (int t = 0; t < h; ++t)
          p = SpatialProgram::seq(p, SpatialProgram::move(vertical));
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Schema registry

namespace {

const Atom kP{"p"};
const Atom kQ{"q"};
const AgentId kI{"i"};
const AgentId kJ{"j"};

GenOptions payload_options(const ProbeParams& params) {
  GenOptions o;
  o.atoms = {kP, kQ};
  o.agents = {kI, kJ};
  o.all_agents = {kI, kJ};
  o.degree = params.payload_degree;
  return o;
}

FormulaPtr payload(Rng& rng, const ProbeParams& params) {
  return random_formula(rng, payload_options(params));
}

Instance static_instance(FormulaPtr f) {
  Instance inst;
  inst.agents = vocabulary(f).agents;
  inst.agents.insert(kI);
  inst.agents.insert(kJ);
  inst.formula = std::move(f);
  return inst;
}

SpatialProgramPtr small_program(Rng& rng, const ProbeParams& params) {
  GenOptions o = payload_options(params);
  o.allow_compound = true;
  return gen_sprog(rng, o, 0);
}

MotionProgramPtr small_motion(Rng& rng, const ProbeParams& params) {
  GenOptions o = payload_options(params);
  return gen_mprog(rng, o, 0);
}

std::set<AgentId> random_coalition(Rng& rng, const std::set<AgentId>& pool) {
  std::set<AgentId> c;
  for (const AgentId& a : pool)
    if (rng.coin()) c.insert(a);
  return c;
}

std::vector<Schema> build_registry() {
  using F = Formula;
  std::vector<Schema> r;
  auto add = [&r](std::string id, std::string summary, int holes,
                  std::function<Instance(Rng&, const ProbeParams&)> fn) {
    r.push_back(Schema{std::move(id), std::move(summary), holes, std::move(fn)});
  };

  // --- static axioms -------------------------------------------------------
  add("k-distribution", "[a](f->g) -> ([a]f -> [a]g)", 3,
      [](Rng& rng, const ProbeParams& p) {
        Move a = random_move(rng);
        FormulaPtr f = payload(rng, p), g = payload(rng, p);
        auto box = [&](FormulaPtr x) {
          return F::box(SpatialProgram::move(a), std::move(x));
        };
        return static_instance(F::implies(box(F::implies(f, g)),
                                          F::implies(box(f), box(g))));
      });
  add("functionality", "[a]f <-> <a>f", 2, [](Rng& rng, const ProbeParams& p) {
    Move a = random_move(rng);
    FormulaPtr f = payload(rng, p);
    return static_instance(F::iff(F::box(SpatialProgram::move(a), f),
                                  F::diamond(SpatialProgram::move(a), f)));
  });
  add("return", "f -> [a]<inverse a>f", 2, [](Rng& rng, const ProbeParams& p) {
    Move a = random_move(rng);
    FormulaPtr f = payload(rng, p);
    return static_instance(F::implies(
        f, F::box(SpatialProgram::move(a),
                  F::diamond(SpatialProgram::move(inverse(a)), f))));
  });
  add("commutation", "[a][b]f <-> [b][a]f", 3, [](Rng& rng, const ProbeParams& p) {
    Move a = random_move(rng), b = random_move(rng);
    FormulaPtr f = payload(rng, p);
    auto ab = F::box(SpatialProgram::move(a), F::box(SpatialProgram::move(b), f));
    auto ba = F::box(SpatialProgram::move(b), F::box(SpatialProgram::move(a), f));
    return static_instance(F::iff(ab, ba));
  });
  add("nominal-uniqueness", "here(i) -> [U]^x[R]^y ~here(i)", 3,
      [](Rng& rng, const ProbeParams& p) {
        AgentId i = rng.coin() ? kI : kJ;
        int x = 0, y = 0;
        while (x == 0 && y == 0) {
          x = rng.range(0, p.max_offset);
          y = rng.range(0, p.max_offset);
        }
        FormulaPtr f = F::negation(F::here(i));
        for (int t = 0; t < y; ++t) f = F::box(SpatialProgram::move(Move::Right), f);
        for (int t = 0; t < x; ++t) f = F::box(SpatialProgram::move(Move::Up), f);
        return static_instance(F::implies(F::here(i), f));
      });
  add("box-seq", "[a;b]f <-> [a][b]f", 3, [](Rng& rng, const ProbeParams& p) {
    SpatialProgramPtr a = small_program(rng, p), b = small_program(rng, p);
    FormulaPtr f = payload(rng, p);
    return static_instance(F::iff(F::box(SpatialProgram::seq(a, b), f),
                                  F::box(a, F::box(b, f))));
  });
  add("box-choice", "[a+b]f <-> ([a]f & [b]f)", 3,
      [](Rng& rng, const ProbeParams& p) {
        SpatialProgramPtr a = small_program(rng, p), b = small_program(rng, p);
        FormulaPtr f = payload(rng, p);
        return static_instance(
            F::iff(F::box(SpatialProgram::choice(a, b), f),
                   F::conjunction(F::box(a, f), F::box(b, f))));
      });
  add("box-test", "[g?]f <-> (g -> f)", 2, [](Rng& rng, const ProbeParams& p) {
    FormulaPtr g = payload(rng, p), f = payload(rng, p);
    return static_instance(
        F::iff(F::box(SpatialProgram::test(g), f), F::implies(g, f)));
  });

  // --- motion reduction equivalences ---------------------------------------
  add("act-seq", "[b;c]f <-> [b][c]f", 3, [](Rng& rng, const ProbeParams& p) {
    MotionProgramPtr b = small_motion(rng, p), c = small_motion(rng, p);
    FormulaPtr f = payload(rng, p);
    return static_instance(F::iff(F::box(MotionProgram::seq(b, c), f),
                                  F::box(b, F::box(c, f))));
  });
  add("act-choice", "[b+c]f <-> ([b]f & [c]f)", 3,
      [](Rng& rng, const ProbeParams& p) {
        MotionProgramPtr b = small_motion(rng, p), c = small_motion(rng, p);
        FormulaPtr f = payload(rng, p);
        return static_instance(
            F::iff(F::box(MotionProgram::choice(b, c), f),
                   F::conjunction(F::box(b, f), F::box(c, f))));
      });
  add("act-test", "[g?]f <-> (g -> f) for motion tests", 2,
      [](Rng& rng, const ProbeParams& p) {
        FormulaPtr g = payload(rng, p), f = payload(rng, p);
        return static_instance(
            F::iff(F::box(MotionProgram::test(g), f), F::implies(g, f)));
      });
  add("act-fact-inert", "[d]p <-> p", 2, [](Rng& rng, const ProbeParams& p) {
    JointAction d = random_joint(rng, {kI, kJ});
    FormulaPtr a = F::atom(rng.coin() ? kP : kQ);
    (void)p;
    return static_instance(F::iff(F::box(MotionProgram::joint(d), a), a));
  });
  add("act-here-relocate", "[d]here(i) <-> [relocation]here(i)", 2,
      [](Rng& rng, const ProbeParams& p) {
        (void)p;
        JointAction d = random_joint(rng, {kI, kJ});
        AgentId i = rng.coin() ? kI : kJ;
        return static_instance(
            F::iff(F::box(MotionProgram::joint(d), F::here(i)),
                   F::box(relocation_program(i, d), F::here(i))));
      });
  add("act-neg-commute", "[d]~f <-> ~[d]f", 2, [](Rng& rng, const ProbeParams& p) {
    JointAction d = random_joint(rng, {kI, kJ});
    FormulaPtr f = payload(rng, p);
    return static_instance(
        F::iff(F::box(MotionProgram::joint(d), F::negation(f)),
               F::negation(F::box(MotionProgram::joint(d), f))));
  });
  add("act-and-dist", "[d](f&g) <-> ([d]f & [d]g)", 3,
      [](Rng& rng, const ProbeParams& p) {
        JointAction d = random_joint(rng, {kI, kJ});
        FormulaPtr f = payload(rng, p), g = payload(rng, p);
        auto boxd = [&](FormulaPtr x) {
          return F::box(MotionProgram::joint(d), std::move(x));
        };
        return static_instance(F::iff(boxd(F::conjunction(f, g)),
                                      F::conjunction(boxd(f), boxd(g))));
      });
  add("act-box-commute", "[d][a]f <-> [a][d]f", 3,
      [](Rng& rng, const ProbeParams& p) {
        JointAction d = random_joint(rng, {kI, kJ});
        Move a = random_move(rng);
        FormulaPtr f = payload(rng, p);
        auto bd = MotionProgram::joint(d);
        auto ba = SpatialProgram::move(a);
        return static_instance(F::iff(F::box(bd, F::box(ba, f)),
                                      F::box(ba, F::box(bd, f))));
      });

  // --- perception -----------------------------------------------------------
  add("sight-covers-facts", "here(i) -> ([a]p <-> S(i,k)[a]p), a in Prg(k)", 2,
      [](Rng& rng, const ProbeParams& p) {
        int k = rng.range(0, p.max_sees_range);
        auto programs = neighborhood_programs(k);
        SpatialProgramPtr a = rng.pick(programs);
        FormulaPtr boxed = F::box(a, F::atom(kP));
        return static_instance(F::implies(
            F::here(kI), F::iff(boxed, F::sees(kI, k, boxed))));
      });
  add("sight-covers-agents", "here(i) -> ([a]here(j) <-> S(i,k)[a]here(j))", 2,
      [](Rng& rng, const ProbeParams& p) {
        int k = rng.range(0, p.max_sees_range);
        auto programs = neighborhood_programs(k);
        SpatialProgramPtr a = rng.pick(programs);
        FormulaPtr boxed = F::box(a, F::here(kJ));
        return static_instance(F::implies(
            F::here(kI), F::iff(boxed, F::sees(kI, k, boxed))));
      });
  add("sight-above-unit", "here(i) -> ([U]here(j) <-> S(i,1)[U]here(j))", 0,
      [](Rng& rng, const ProbeParams& p) {
        (void)rng;
        (void)p;
        FormulaPtr boxed = F::box(SpatialProgram::move(Move::Up), F::here(kJ));
        return static_instance(F::implies(
            F::here(kI), F::iff(boxed, F::sees(kI, 1, boxed))));
      });

  // --- coalitions ------------------------------------------------------------
  add("coalition-consistency", "~<<C>>false", 1,
      [](Rng& rng, const ProbeParams& p) {
        (void)p;
        auto c = random_coalition(rng, {kI, kJ});
        return static_instance(
            F::negation(F::coalition(c, F::falsum())));
      });
  add("coalition-liveness", "<<C>>true", 1, [](Rng& rng, const ProbeParams& p) {
    (void)p;
    auto c = random_coalition(rng, {kI, kJ});
    return static_instance(F::coalition(c, F::verum()));
  });
  add("coalition-grand", "~<<>>~f -> <<Agt>>f", 1,
      [](Rng& rng, const ProbeParams& p) {
        FormulaPtr f = payload(rng, p);
        return static_instance(F::implies(
            F::negation(F::coalition({}, F::negation(f))),
            F::coalition({kI, kJ}, f)));
      });
  add("coalition-monotone", "<<C>>(f&g) -> <<C>>f", 3,
      [](Rng& rng, const ProbeParams& p) {
        auto c = random_coalition(rng, {kI, kJ});
        FormulaPtr f = payload(rng, p), g = payload(rng, p);
        return static_instance(F::implies(
            F::coalition(c, F::conjunction(f, g)), F::coalition(c, f)));
      });
  add("coalition-superadditive",
      "(<<C1>>f & <<C2>>g) -> <<C1+C2>>(f&g), C1,C2 disjoint", 4,
      [](Rng& rng, const ProbeParams& p) {
        bool swap = rng.coin();
        std::set<AgentId> c1 = swap ? std::set<AgentId>{kJ} : std::set<AgentId>{kI};
        std::set<AgentId> c2;
        if (rng.coin()) c2 = swap ? std::set<AgentId>{kI} : std::set<AgentId>{kJ};
        FormulaPtr f = payload(rng, p), g = payload(rng, p);
        std::set<AgentId> both = c1;
        both.insert(c2.begin(), c2.end());
        return static_instance(F::implies(
            F::conjunction(F::coalition(c1, f), F::coalition(c2, g)),
            F::coalition(both, F::conjunction(f, g))));
      });
  add("coalition-position-exclusive", "~<<C>>here(i) when i not in C", 2,
      [](Rng& rng, const ProbeParams& p) {
        (void)p;
        std::set<AgentId> c;
        if (rng.coin()) c.insert(kJ);
        return static_instance(F::negation(F::coalition(c, F::here(kI))));
      });
  add("coalition-position-reach",
      "adjacent agents can move here: neighbours(i) -> <<i>>here(i)", 1,
      [](Rng& rng, const ProbeParams& p) {
        (void)rng;
        (void)p;
        FormulaPtr any;
        for (Move m : kAllMoves) {
          FormulaPtr b = F::box(SpatialProgram::move(m), F::here(kI));
          any = any ? F::disjunction(any, b) : b;
        }
        return static_instance(
            F::implies(any, F::coalition({kI}, F::here(kI))));
      });

  return r;
}

}  // namespace

const std::vector<Schema>& schema_registry() {
  static const std::vector<Schema> registry = build_registry();
  return registry;
}

const Schema* find_schema(std::string_view id) {
  for (const Schema& s : schema_registry())
    if (s.id == id) return &s;
  return nullptr;
}

Instance instantiate(const Schema& s, std::uint64_t seed, const ProbeParams& params) {
  Rng rng(seed);
  return s.instantiate(rng, params);
}

ProbeReport probe(const Schema& s, int trials, const ProbeParams& params) {
  ProbeReport report;
  report.schema_id = s.id;
  report.trials = trials;
  Rng master(params.seed);
  std::uint64_t salt = std::hash<std::string>{}(s.id);
  for (int t = 0; t < trials; ++t) {
    Rng rng = master.fork(salt + static_cast<std::uint64_t>(t) * 0x10001);
    Instance inst = s.instantiate(rng, params);
    int n = rng.range(0, params.max_bound);
    Vocabulary voc = vocabulary(inst.formula);
    SpatialModel model = random_model(rng, n, voc.atoms, inst.agents);
    int w = n + modal_degree(inst.formula) + 1;
    Pos pos{rng.range(-w, w), rng.range(-w, w)};
    if (!evaluate(model, pos, inst.formula))
      report.counterexamples.push_back(Counterexample{model, pos, inst.formula});
  }
  return report;
}

std::string to_text(const ProbeReport& report) {
  std::string out;
  out += "schema " + report.schema_id + "\n";
  out += "trials " + std::to_string(report.trials) + "\n";
  out += "counterexamples " + std::to_string(report.counterexamples.size()) + "\n";
  int k = 0;
  for (const Counterexample& c : report.counterexamples) {
    out += "--- counterexample " + std::to_string(++k) + "\n";
    out += render_model(c.model);
    out += "position " + to_string(c.position) + "\n";
    out += "formula " + render_formula(c.instance) + "\n";
  }
  return out;
}

}  // namespace dls

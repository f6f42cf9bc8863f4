#ifndef DLS_AXIOMS_HPP
#define DLS_AXIOMS_HPP

// Schema instantiation and randomized validity probing. Every axiom schema
// and validity the library implements is registered here by a semantic id;
// probing instantiates a schema with random payloads, samples random bounded
// models and positions, and reports any falsifying instance.

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dls/models.hpp"
#include "dls/syntax.hpp"

namespace dls {

// Deterministic random stream; forked children derive from the seed, not
// the consumed state, so per-trial streams are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  bool coin() { return (next() >> 33) & 1u; }
  // inclusive, rejection-sampled
  int range(int lo, int hi);
  Rng fork(std::uint64_t salt) const;
  std::uint64_t seed() const { return seed_; }

  template <typename T>
  const T& pick(const std::vector<T>& pool) {
    return pool[static_cast<std::size_t>(range(0, static_cast<int>(pool.size()) - 1))];
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Uniformly sampled n-bounded model: positions uniform over the n-box and
// each (atom, cell) decoration a fair coin.
SpatialModel random_model(Rng& rng, int bound, const std::set<Atom>& atoms,
                          const std::set<AgentId>& agents);

struct GenOptions {
  std::vector<Atom> atoms;
  std::vector<AgentId> agents;      // positional-atom pool
  std::set<AgentId> all_agents;     // joint actions are total over this
  int degree = 1;                   // modal-depth budget
  bool allow_star = false;
  bool allow_compound = false;      // seq/choice/test spatial programs
  bool allow_motion = false;
};

// Weighted random formula with modal depth at most opts.degree. Motion
// programs always contain at least one joint action.
FormulaPtr random_formula(Rng& rng, const GenOptions& opts);

// The programs reaching exactly the diagonal points of a radius-k
// neighborhood: for each 0<h<=k the four move^h;move^h combinations, plus
// the trivial test for h=0. Cardinality 4k+1.
std::vector<SpatialProgramPtr> neighborhood_programs(int k);

// ---------------------------------------------------------------------------
// Schemas and probing

struct ProbeParams {
  int max_bound = 2;        // model bounds are drawn from [0, max_bound]
  int payload_degree = 1;   // depth of random payload formulas
  int max_offset = 3;       // nominal-uniqueness offset cap
  int max_sees_range = 2;
  std::uint64_t seed = 0xD15C0DEull;
};

struct Instance {
  FormulaPtr formula;
  std::set<AgentId> agents;  // the declared agent set of the instance
};

struct Schema {
  std::string id;
  std::string summary;
  int holes = 0;
  std::function<Instance(Rng&, const ProbeParams&)> instantiate;
};

const std::vector<Schema>& schema_registry();
const Schema* find_schema(std::string_view id);

Instance instantiate(const Schema& s, std::uint64_t seed, const ProbeParams& params);

struct Counterexample {
  SpatialModel model;
  Pos position;
  FormulaPtr instance;
};

struct ProbeReport {
  std::string schema_id;
  int trials = 0;
  std::vector<Counterexample> counterexamples;
};

// Evaluates `trials` random instances at random positions of random bounded
// models; positions stay within the clamped window so evaluation is exact.
ProbeReport probe(const Schema& s, int trials, const ProbeParams& params);

std::string to_text(const ProbeReport& report);

}  // namespace dls

#endif  // DLS_AXIOMS_HPP

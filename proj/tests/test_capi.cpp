#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <string>

#include "dls.h"

namespace {

std::string take_string(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  dls_string_free(s);
  return out;
}

struct FormulaHandle {
  dls_formula* f = nullptr;
  ~FormulaHandle() { dls_formula_free(f); }
};

struct ModelHandle {
  dls_model* m = nullptr;
  ~ModelHandle() { dls_model_free(m); }
};

const char* kModel =
    "bound 2\n"
    "agent i 0 0\n"
    "agent j 1 1\n"
    "atom p 0 0\n";

}  // namespace

TEST_CASE("version and error plumbing") {
  CHECK(std::strlen(dls_version()) >= 5);
  FormulaHandle f;
  CHECK(dls_formula_parse("(p &", nullptr, &f.f) == DLS_ERR_PARSE);
  CHECK(std::strlen(dls_last_error()) > 0);
  CHECK(dls_formula_parse(nullptr, nullptr, &f.f) == DLS_ERR_INVALID_ARG);
}

TEST_CASE("formula parse, render, measures") {
  FormulaHandle f;
  REQUIRE(dls_formula_parse("[U;q?]here(i)", "i,j", &f.f) == DLS_OK);
  CHECK(take_string([&] { char* s = nullptr; dls_formula_render(f.f, &s); return s; }()) ==
        "[U;q?]here(i)");
  CHECK(dls_formula_degree(f.f) == 1);
  CHECK(dls_formula_size(f.f) == 6);
  CHECK(dls_formula_has_perception(f.f) == 0);

  FormulaHandle undeclared;
  CHECK(dls_formula_parse("here(k)", "i,j", &undeclared.f) == DLS_ERR_PARSE);

  FormulaHandle sees;
  REQUIRE(dls_formula_parse("S(i,1)p", nullptr, &sees.f) == DLS_OK);
  CHECK(dls_formula_has_perception(sees.f) == 1);
}

TEST_CASE("model parse and render round trip") {
  ModelHandle m;
  REQUIRE(dls_model_parse(kModel, &m.m) == DLS_OK);
  std::string text = take_string([&] { char* s = nullptr; dls_model_render(m.m, &s); return s; }());
  ModelHandle again;
  REQUIRE(dls_model_parse(text.c_str(), &again.m) == DLS_OK);

  ModelHandle bad;
  CHECK(dls_model_parse("bound 1\nagent i 5 5\n", &bad.m) == DLS_ERR_INVALID_ARG);
}

TEST_CASE("checking through the C surface") {
  ModelHandle m;
  REQUIRE(dls_model_parse(kModel, &m.m) == DLS_OK);
  FormulaHandle f;
  REQUIRE(dls_formula_parse("[R*]~p", "i,j", &f.f) == DLS_OK);
  int verdict = -1;
  REQUIRE(dls_check(m.m, f.f, 1, 0, &verdict) == DLS_OK);
  CHECK(verdict == 1);
  REQUIRE(dls_check(m.m, f.f, 0, 0, &verdict) == DLS_OK);
  CHECK(verdict == 0);

  FormulaHandle unsupported;
  REQUIRE(dls_formula_parse("[(R;R)*]p", nullptr, &unsupported.f) == DLS_OK);
  CHECK(dls_check(m.m, unsupported.f, 0, 0, &verdict) == DLS_ERR_UNSUPPORTED);
}

TEST_CASE("satisfiability and witnesses through the C surface") {
  FormulaHandle f;
  REQUIRE(dls_formula_parse("(p & [R]~p)", nullptr, &f.f) == DLS_OK);
  dls_sat_result* r = nullptr;
  REQUIRE(dls_sat(f.f, DLS_FRAGMENT_STARFREE, nullptr, &r) == DLS_OK);
  CHECK(dls_sat_result_verdict(r) == DLS_SAT);
  CHECK(dls_sat_result_bound(r) >= 1);
  int x = 9, y = 9;
  REQUIRE(dls_sat_result_position(r, &x, &y) == DLS_OK);
  dls_model* witness = nullptr;
  REQUIRE(dls_sat_result_witness(r, &witness) == DLS_OK);
  int verdict = 0;
  REQUIRE(dls_check(witness, f.f, x, y, &verdict) == DLS_OK);
  CHECK(verdict == 1);
  dls_model_free(witness);
  dls_sat_result_free(r);

  FormulaHandle unsat;
  REQUIRE(dls_formula_parse("(here(i) & [U]here(i))", nullptr, &unsat.f) == DLS_OK);
  REQUIRE(dls_sat(unsat.f, DLS_FRAGMENT_STARFREE, nullptr, &r) == DLS_OK);
  CHECK(dls_sat_result_verdict(r) == DLS_UNSAT);
  dls_model* none = nullptr;
  CHECK(dls_sat_result_witness(r, &none) == DLS_ERR_INVALID_ARG);
  dls_sat_result_free(r);

  // a starving budget yields an inconclusive verdict, not a wrong one
  dls_budget tiny{0, 2, 0};
  FormulaHandle hard;
  REQUIRE(dls_formula_parse("((p&[U]q)&[R](p|q))", nullptr, &hard.f) == DLS_OK);
  REQUIRE(dls_sat(hard.f, DLS_FRAGMENT_STARFREE, &tiny, &r) == DLS_OK);
  CHECK(dls_sat_result_verdict(r) == DLS_INCONCLUSIVE);
  CHECK(std::strlen(dls_sat_result_note(r)) > 0);
  dls_sat_result_free(r);
}

TEST_CASE("validity and the position fragment") {
  FormulaHandle f;
  REQUIRE(dls_formula_parse("(p -> [U]<D>p)", nullptr, &f.f) == DLS_OK);
  int verdict = 0;
  REQUIRE(dls_valid(f.f, DLS_FRAGMENT_STARFREE, nullptr, &verdict) == DLS_OK);
  CHECK(verdict == 1);

  FormulaHandle g;
  REQUIRE(dls_formula_parse("(<R><R*>here(i) & <U><U*>here(i))", nullptr, &g.f) ==
          DLS_OK);
  dls_sat_result* r = nullptr;
  REQUIRE(dls_sat(g.f, DLS_FRAGMENT_POSITIONS, nullptr, &r) == DLS_OK);
  CHECK(dls_sat_result_verdict(r) == DLS_UNSAT);
  dls_sat_result_free(r);

  FormulaHandle atoms;
  REQUIRE(dls_formula_parse("p", nullptr, &atoms.f) == DLS_OK);
  CHECK(dls_sat(atoms.f, DLS_FRAGMENT_POSITIONS, nullptr, &r) ==
        DLS_ERR_UNSUPPORTED);
}

TEST_CASE("reduction through the C surface") {
  FormulaHandle f, g;
  REQUIRE(dls_formula_parse("[{i:up}][R]here(i)", nullptr, &f.f) == DLS_OK);
  REQUIRE(dls_reduce(f.f, &g.f) == DLS_OK);
  CHECK(take_string([&] { char* s = nullptr; dls_formula_render(g.f, &s); return s; }()) ==
        "[R][D]here(i)");
}

TEST_CASE("bisimilarity through the C surface") {
  ModelHandle m1, m2;
  REQUIRE(dls_model_parse("bound 1\nagent i 0 0\natom p 0 1\n", &m1.m) == DLS_OK);
  REQUIRE(dls_model_parse("bound 1\nagent i 0 0\n", &m2.m) == DLS_OK);
  int result = -1;
  REQUIRE(dls_bisim(m1.m, 0, 0, m2.m, 0, 0, 0, &result) == DLS_OK);
  CHECK(result == 1);
  REQUIRE(dls_bisim(m1.m, 0, 0, m2.m, 0, 0, 1, &result) == DLS_OK);
  CHECK(result == 0);
  CHECK(dls_bisim(m1.m, 0, 0, m2.m, 0, 0, -1, &result) == DLS_ERR_INVALID_ARG);
}

TEST_CASE("simulation trace") {
  ModelHandle m;
  REQUIRE(dls_model_parse(kModel, &m.m) == DLS_OK);
  FormulaHandle f;
  REQUIRE(dls_formula_parse("here(i)", "i,j", &f.f) == DLS_OK);
  char* trace = nullptr;
  REQUIRE(dls_simulate(m.m, "{i:up};{i:down}", f.f, 0, 0, &trace) == DLS_OK);
  std::string t = take_string(trace);
  CHECK(t.find("initial: i=(0,0) j=(1,1)  formula=true") != std::string::npos);
  CHECK(t.find("after {i:up,j:stay}: i=(0,1) j=(1,1)  formula=false") !=
        std::string::npos);
  CHECK(t.find("blocked") == std::string::npos);

  REQUIRE(dls_simulate(m.m, "{i:up};(here(i)?)", nullptr, 0, 0, &trace) == DLS_OK);
  t = take_string(trace);
  CHECK(t.find("blocked: test failed: here(i)") != std::string::npos);

  // a choice takes the branch that does not block
  REQUIRE(dls_simulate(m.m, "(here(j)?;{i:up})+({i:right})", nullptr, 0, 0,
                       &trace) == DLS_OK);
  t = take_string(trace);
  CHECK(t.find("after {i:right,j:stay}") != std::string::npos);
  CHECK(t.find("blocked") == std::string::npos);
}

TEST_CASE("schema listing and probing") {
  CHECK(dls_schema_count() >= 26);
  CHECK(dls_schema_id(0) != nullptr);
  CHECK(dls_schema_id(dls_schema_count()) == nullptr);

  char* report = nullptr;
  int bad = -1;
  REQUIRE(dls_probe("functionality", 40, 123, &report, &bad) == DLS_OK);
  std::string text = take_string(report);
  CHECK(bad == 0);
  CHECK(text.find("schema functionality") != std::string::npos);
  CHECK(text.find("counterexamples 0") != std::string::npos);

  CHECK(dls_probe("no-such-schema", 5, 0, &report, &bad) == DLS_ERR_INVALID_ARG);
}

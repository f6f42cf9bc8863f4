#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dls/axioms.hpp"
#include "dls/models.hpp"

using namespace dls;

namespace {

const AgentId I{"i"};
const AgentId J{"j"};
const Atom P{"p"};

SpatialModel model_with(std::map<AgentId, Pos> pos,
                        std::map<Pos, std::set<Atom>> val, int bound) {
  return SpatialModel(std::move(pos), std::move(val), bound);
}

JointAction all_do(const SpatialModel& m, Action a) {
  std::map<AgentId, Action> entries;
  for (const auto& agent : m.agents()) entries[agent] = a;
  return JointAction(std::move(entries));
}

}  // namespace

TEST_CASE("construction validates the bound") {
  CHECK_NOTHROW(model_with({{I, {2, 1}}}, {}, 3));
  CHECK_THROWS_AS(model_with({{I, {4, 0}}}, {}, 3), ModelError);
  CHECK_THROWS_AS(model_with({}, {{{5, 5}, {P}}}, 3), ModelError);
  // empty valuation entries are dropped, not validated
  SpatialModel m = model_with({}, {{{9, 9}, {}}}, 0);
  CHECK(m.valuation().empty());
}

TEST_CASE("equality ignores the declared bound") {
  SpatialModel a = model_with({{I, {0, 0}}}, {{{1, 1}, {P}}}, 2);
  SpatialModel b = model_with({{I, {0, 0}}}, {{{1, 1}, {P}}}, 7);
  CHECK(a == b);
}

TEST_CASE("truncation") {
  SpatialModel m = model_with({{I, {2, 1}}, {J, {7, 1}}}, {{{5, 5}, {P}}}, 10);
  SpatialModel t = truncate(m, 3);
  CHECK(t.position_of(I) == Pos{2, 1});
  CHECK(t.position_of(J) == Pos{4, 0});
  CHECK(t.valuation().empty());
  CHECK(t.bound() == 4);

  // the result is (n+1)-bounded for random inputs
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    SpatialModel r = random_model(rng, 8, {P}, {I, J});
    int n = rng.range(0, 6);
    SpatialModel rt = truncate(r, n);
    for (const auto& [agent, pos] : rt.positions()) CHECK(chebyshev(pos) <= n + 1);
    for (const auto& [cell, atoms] : rt.valuation()) CHECK(chebyshev(cell) <= n);
  }
}

TEST_CASE("joint-action update") {
  SpatialModel m = model_with({{I, {0, 0}}}, {}, 0);
  CHECK(apply_joint_action(m, JointAction({{I, Action::Up}})).position_of(I) ==
        Pos{0, 1});
  CHECK(apply_joint_action(m, JointAction({{I, Action::Stay}})).position_of(I) ==
        Pos{0, 0});

  SpatialModel two = model_with({{I, {1, 0}}, {J, {0, 2}}}, {}, 2);
  SpatialModel moved = apply_joint_action(
      two, JointAction({{I, Action::Left}, {J, Action::Right}}));
  CHECK(moved.position_of(I) == Pos{0, 0});
  CHECK(moved.position_of(J) == Pos{1, 2});

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    SpatialModel r = random_model(rng, 3, {P}, {I, J});
    CHECK(apply_joint_action(r, all_do(r, Action::Stay)) == r);
    SpatialModel up = apply_joint_action(r, all_do(r, Action::Up));
    CHECK(apply_joint_action(up, all_do(up, Action::Down)) == r);
  }
}

TEST_CASE("gap discovery") {
  PositionModel p({{I, {0, 3}}, {J, {10, -2}}});
  auto gaps = find_gaps(p, Gap::Orientation::Vertical);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].a == 1);
  CHECK(gaps[0].b == 9);

  PositionModel adjacent({{I, {0, 0}}, {J, {1, 5}}});
  CHECK(find_gaps(adjacent, Gap::Orientation::Vertical).empty());

  PositionModel lone({{I, {0, 0}}});
  CHECK(find_gaps(lone, Gap::Orientation::Vertical).empty());

  auto horizontal = find_gaps(p, Gap::Orientation::Horizontal);
  REQUIRE(horizontal.size() == 1);  // between y=-2 and y=3
  CHECK(horizontal[0].a == -1);
  CHECK(horizontal[0].b == 2);
}

TEST_CASE("gap depth") {
  Gap g{Gap::Orientation::Vertical, 0, 10};
  CHECK(gap_depth(g, {3, 99}) == 3);
  CHECK(gap_depth(g, {0, 0}) == 0);
  CHECK(gap_depth(g, {5, -7}) == 5);
  CHECK_THROWS_AS(gap_depth(g, {11, 0}), ModelError);
}

TEST_CASE("gap removal") {
  Gap g{Gap::Orientation::Vertical, 2, 8};
  PositionModel p({{I, {1, 5}}, {J, {10, 3}}});
  auto [removed, rho] = remove_gap(p, g);
  CHECK(rho(Pos{1, 5}) == Pos{1, 5});
  CHECK(rho(Pos{10, 3}) == Pos{4, 3});
  CHECK(rho(Pos{8, 0}) == Pos{2, 0});
  CHECK(removed.position_of(I) == Pos{1, 5});
  CHECK(removed.position_of(J) == Pos{4, 3});

  PositionModel inside({{I, {5, 0}}});
  CHECK_THROWS_AS(remove_gap(inside, g), ModelError);

  // order preservation on x and no agent left in the collapsed strip
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    int a = rng.range(-3, 3);
    int width = rng.range(1, 5);
    Gap gap{Gap::Orientation::Vertical, a, a + width};
    std::map<AgentId, Pos> pos;
    pos[I] = {a - 1 - rng.range(0, 4), rng.range(-3, 3)};
    pos[J] = {a + width + 1 + rng.range(0, 4), rng.range(-3, 3)};
    auto [q, rho2] = remove_gap(PositionModel(pos), gap);
    CHECK(q.position_of(I).x <= a);
    CHECK(q.position_of(J).x > a);
    for (int x1 = -12; x1 <= 12; ++x1)
      for (int x2 = x1; x2 <= 12; ++x2)
        CHECK(rho2(Pos{x1, 0}).x <= rho2(Pos{x2, 0}).x);
  }
}

TEST_CASE("model text round trip") {
  SpatialModel m = model_with({{I, {0, 0}}, {J, {-2, 1}}},
                              {{{1, 1}, {P, Atom{"q"}}}, {{0, -2}, {P}}}, 2);
  SpatialModel back = parse_model(render_model(m));
  CHECK(back == m);
  CHECK(back.bound() == 2);
}

TEST_CASE("model text format errors and comments") {
  CHECK_NOTHROW(parse_model("# empty\n"));
  SpatialModel m = parse_model("bound 2\nagent i 1 1 # trailing comment\n");
  CHECK(m.position_of(I) == Pos{1, 1});
  CHECK_THROWS_AS(parse_model("bound 1\nagent i 2 0\n"), ModelError);
  CHECK_THROWS_AS(parse_model("bound 1\natom p 0 2\n"), ModelError);
  CHECK_THROWS_AS(parse_model("agent i 0 0\nagent i 1 1\n"), ModelError);
  CHECK_THROWS_AS(parse_model("bound 1\nbound 2\n"), ModelError);
  CHECK_THROWS_AS(parse_model("wall 0 0\n"), ModelError);
  CHECK_THROWS_AS(parse_model("agent i 0\n"), ModelError);
  // missing bound infers the minimal covering bound
  CHECK(parse_model("agent i 3 -1\n").bound() == 3);
}

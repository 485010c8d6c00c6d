#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracle/naive_conformance.hpp"
#include "random_graphs.hpp"
#include "wsub/conformance.hpp"

using namespace wsub;
using namespace fx;

namespace {

ShapeAssignment randomTau(std::mt19937& rng, const WikibaseGraph& g, const WShExSchema& s, int percent) {
  ShapeAssignment t;
  for (const auto& n : g.nodes())
    for (LabelId l = 0; l < s.size(); ++l)
      if (rg::coin(rng, percent)) t.insert(n, l);
  return t;
}

std::set<std::pair<EntityId, std::string>> named(const ShapeAssignment& t, const WShExSchema& s) {
  std::set<std::pair<EntityId, std::string>> out;
  for (const auto& [n, l] : t.pairs()) out.insert({n, s.name(l)});
  return out;
}

}  // namespace

TEST_CASE("open empty shape accepts any node") {
  auto g = example4();
  auto s = parseSchema("<S> { }");
  ShapeAssignment none;
  for (const auto& n : g.nodes()) CHECK(conforms(g, n, none, s.delta(0), s));
  CHECK(conforms(g, UK, none, s.delta(0), s));
  CHECK(conforms(g, year("2000"), none, s.delta(0), s));
}

TEST_CASE("simple researcher schema over the running example") {
  auto g = example4();
  auto s = schemaFile("example18.wshex");
  auto tau = maximalAssignment(g, s);

  CHECK(tau.contains(timBl, s.label("Researcher")));
  CHECK_FALSE(tau.contains(vintCerf, s.label("Researcher")));
  CHECK(tau.contains(London, s.label("Place")));
  CHECK_FALSE(tau.contains(NewHaven, s.label("Place")));
  CHECK(tau.contains(PA, s.label("Place")));
  CHECK_FALSE(tau.contains(CERN, s.label("Place")));
  CHECK(tau.contains(Human, s.label("Human")));
  CHECK_FALSE(tau.contains(London, s.label("Human")));
  for (const auto& n : g.nodes()) {
    CHECK(tau.contains(n, s.label("Country")));
    CHECK_FALSE(tau.contains(n, s.label("Date")));
  }
  CHECK(tau.size() == 1 + 2 + 9 + 1);

  CHECK(validateNode(g, timBl, "Researcher", s));
  CHECK_FALSE(validateNode(g, vintCerf, "Researcher", s));
  // Outside the graph: open empty shape holds, value set does not.
  CHECK(validateNode(g, EntityId::item(1), "Country", s));
  CHECK_FALSE(validateNode(g, EntityId::item(1), "Human", s));
}

TEST_CASE("qualifier specs over the running example") {
  auto g = example4();
  auto s = schemaFile("example11.wshex");
  auto tau = maximalAssignment(g, s);
  CHECK(tau.contains(timBl, s.label("Researcher")));
  CHECK_FALSE(tau.contains(vintCerf, s.label("Researcher")));
  CHECK(tau.contains(PA, s.label("Award")));
  CHECK_FALSE(tau.contains(CERN, s.label("Award")));
}

TEST_CASE("closed qualifier spec rejects extra pairs") {
  auto g = example4();
  auto o = aliases();
  auto closedSpec = parseSchema("<R> { employer . [[ start . ]] * }", o);
  auto openSpec = parseSchema("<R> { employer . {{ start . }} * }", o);
  auto both = parseSchema("<R> { employer . [[ start . , end . ]] * }", o);
  ShapeAssignment none;
  CHECK_FALSE(conforms(g, timBl, none, closedSpec.delta(0), closedSpec));
  CHECK(conforms(g, timBl, none, openSpec.delta(0), openSpec));
  CHECK(conforms(g, timBl, none, both.delta(0), both));
  // CERN has no employer statements at all.
  CHECK(conforms(g, CERN, none, closedSpec.delta(0), closedSpec));
}

TEST_CASE("closed shape rejects statements outside its predicates") {
  auto g = example4();
  auto o = aliases();
  auto s = parseSchema("<A> CLOSED { instanceOf . ; birthPlace . }\n<B> { instanceOf . ; birthPlace . }", o);
  ShapeAssignment none;
  CHECK_FALSE(conforms(g, timBl, none, s.delta(0), s));
  CHECK(conforms(g, timBl, none, s.delta(1), s));
  CHECK(conforms(g, vintCerf, none, s.delta(0), s));
}

TEST_CASE("cyclic references: both nodes of a cycle conform") {
  auto a = EntityId::item(1), b = EntityId::item(2), c = EntityId::item(3);
  auto p = EntityId::property(1);
  auto s = parseSchema("<l> { P1 @<l> }");

  WikibaseGraph cyc({st(a, p, b), st(b, p, a)});
  auto t = maximalAssignment(cyc, s);
  CHECK(t.contains(a, 0));
  CHECK(t.contains(b, 0));

  WikibaseGraph chain({st(a, p, b), st(b, p, c)});
  CHECK(maximalAssignment(chain, s).size() == 0);
}

TEST_CASE("statements sharing a property are distributed over leaves") {
  auto x = EntityId::item(1), y = EntityId::item(2), n = EntityId::item(3);
  auto p = EntityId::property(1);
  auto s = parseSchema("<S> { P1 @<A> ; P1 @<B> }\n<A> [ Q1 ]\n<B> [ Q2 ]");
  WikibaseGraph g({st(n, p, x), st(n, p, y)});
  auto t = maximalAssignment(g, s);
  CHECK(t.contains(n, 0));

  WikibaseGraph g2({st(n, p, x), st(n, p, EntityId::item(4))});
  CHECK_FALSE(maximalAssignment(g2, s).contains(n, 0));
}

TEST_CASE("witness lists consumed statements and qualifiers") {
  auto g = example4();
  auto s = schemaFile("example11.wshex");
  auto tau = maximalAssignment(g, s);
  Evaluator ev(s);
  Witness w;
  REQUIRE(ev.conformsLabel(timBl, s.label("Researcher"), assignmentContext(g, tau), &w));
  // instanceOf is not a predicate of the shape.
  CHECK(w.triples.size() == 5);
  std::size_t quals = 0;
  for (const auto& u : w.triples) {
    CHECK(u.statement->property() != instanceOf);
    quals += u.qualifiers.size();
  }
  CHECK(quals == 6);
}

TEST_CASE("assignLeaves groups identical candidate sets") {
  // Three items that may each go to leaf 0 or 1; expression is 0 ; 1 ; 1.
  auto r = Rbe<std::size_t>::seq(Rbe<std::size_t>::symbol(0),
                                 Rbe<std::size_t>::seq(Rbe<std::size_t>::symbol(1), Rbe<std::size_t>::symbol(1)));
  std::vector<std::size_t> chosen;
  REQUIRE(assignLeaves({{0, 1}, {0, 1}, {0, 1}}, r, &chosen));
  CHECK(std::count(chosen.begin(), chosen.end(), 0) == 1);
  CHECK(std::count(chosen.begin(), chosen.end(), 1) == 2);
  CHECK_FALSE(assignLeaves({{0}, {0}, {0, 1}}, r, nullptr));
  CHECK_FALSE(assignLeaves({{0}, {}, {1}}, r, nullptr));
}

TEST_CASE("engine agrees with the rule oracle") {
  std::mt19937 rng(11);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  for (int i = 0; i < 400; ++i) {
    sp.leafStarPercent = i % 2 ? 50 : 0;
    auto g = rg::randomGraph(rng, 5, 8);
    auto s = rg::randomSchema(rng, sp);
    auto tau = randomTau(rng, g, s, 50);
    std::vector<Value> probes(g.nodes().begin(), g.nodes().end());
    probes.push_back(year("1"));
    probes.push_back(EntityId::item(99));
    for (const auto& n : probes)
      for (LabelId l = 0; l < s.size(); ++l)
        CHECK(conforms(g, n, tau, s.delta(l), s) == oracle::naiveConforms(g, n, tau.pairs(), s.delta(l), s));
  }
}

TEST_CASE("conformance is monotone in the assignment") {
  std::mt19937 rng(12);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  sp.leafStarPercent = 40;
  for (int i = 0; i < 200; ++i) {
    auto g = rg::randomGraph(rng, 5, 8);
    auto s = rg::randomSchema(rng, sp);
    auto small = randomTau(rng, g, s, 40);
    auto big = small;
    for (const auto& n : g.nodes())
      for (LabelId l = 0; l < s.size(); ++l)
        if (rg::coin(rng, 40)) big.insert(n, l);
    for (const auto& n : g.nodes())
      for (LabelId l = 0; l < s.size(); ++l)
        if (conforms(g, n, small, s.delta(l), s)) CHECK(conforms(g, n, big, s.delta(l), s));
  }
}

TEST_CASE("maximal assignment is the union of all valid assignments") {
  std::mt19937 rng(13);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  sp.leafStarPercent = 50;
  int checked = 0, cyclicGain = 0;
  while (checked < 400) {
    auto g = rg::randomGraph(rng, 4, 9);
    auto s = rg::randomSchema(rng, sp);
    oracle::Tau expect;
    if (!oracle::bruteForceMaximal(g, s, 12, expect)) continue;
    ++checked;
    auto got = maximalAssignment(g, s);
    CHECK(got.pairs() == expect);
    std::size_t grounded = 0;
    for (const auto& [n, l] : expect) grounded += oracle::naiveConforms(g, n, {}, s.delta(l), s);
    cyclicGain += expect.size() > grounded;
  }
  // Enough instances where the answer depends on assumptions about other nodes.
  CHECK(cyclicGain >= 40);
}

TEST_CASE("maximal assignment is a fixpoint") {
  std::mt19937 rng(14);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  sp.leafStarPercent = 40;
  for (int i = 0; i < 200; ++i) {
    auto g = rg::randomGraph(rng, 6, 12);
    auto s = rg::randomSchema(rng, sp);
    auto tau = maximalAssignment(g, s);
    for (const auto& n : g.nodes())
      for (LabelId l = 0; l < s.size(); ++l) CHECK(conforms(g, n, tau, s.delta(l), s) == tau.contains(n, l));
  }
}

TEST_CASE("open shapes ignore statements on other properties") {
  std::mt19937 rng(15);
  rg::SchemaParams sp;
  for (int i = 0; i < 150; ++i) {
    auto g = rg::randomGraph(rng, 5, 10);
    if (g.nodes().empty()) continue;
    auto s = rg::randomSchema(rng, sp);
    auto before = maximalAssignment(g, s);
    auto stmts = g.statements();
    const auto& nodes = g.nodes();
    std::vector<Statement> more(stmts.begin(), stmts.end());
    more.push_back(st(nodes[rg::pick(rng, nodes.size())], EntityId::property(99), nodes[rg::pick(rng, nodes.size())]));
    WikibaseGraph g2(std::move(more));
    CHECK(named(maximalAssignment(g2, s), s) == named(before, s));
  }
}

TEST_CASE("closed shapes notice statements on other properties") {
  std::mt19937 rng(16);
  for (int i = 0; i < 100; ++i) {
    auto g = rg::randomGraph(rng, 5, 10);
    auto n = EntityId::item(1 + rg::pick(rng, 5));
    WShExSchema s;
    s.addLabel("S");
    s.define(0, ShapeExpr::shape(TripleExpr::star(TripleExpr::constraint(EntityId::property(1), std::nullopt)), true));
    s.finalize();
    auto stmts = g.statements();
    std::vector<Statement> more(stmts.begin(), stmts.end());
    more.push_back(st(n, EntityId::property(99), year("1")));
    WikibaseGraph g2(std::move(more));
    CHECK_FALSE(maximalAssignment(g2, s).contains(n, 0));
  }
}

TEST_CASE("parallel refinement matches serial") {
  std::mt19937 rng(17);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  sp.leafStarPercent = 40;
  for (int i = 0; i < 60; ++i) {
    auto g = rg::randomGraph(rng, 30, 80);
    auto s = rg::randomSchema(rng, sp);
    auto a = maximalAssignment(g, s, {Exec::Serial, 1});
    auto b = maximalAssignment(g, s, {Exec::Parallel, 4});
    CHECK(a == b);
  }
}

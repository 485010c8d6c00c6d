#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "random_graphs.hpp"
#include "wsub/slurp.hpp"

using namespace wsub;
using namespace fx;

namespace {

using Set = std::set<Statement>;

bool qualifierSubset(std::span<const Qualifier> sub, std::span<const Qualifier> super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// Some statement of g with the same triple and a qualifier superset.
bool reducedFrom(const Statement& s, const WikibaseGraph& g) {
  for (const auto& t : g.neighs(s.subject()))
    if (t.property() == s.property() && t.value() == s.value() && qualifierSubset(s.qualifiers(), t.qualifiers()))
      return true;
  return false;
}

std::set<std::tuple<EntityId, EntityId, Value>> triples(const std::set<Statement>& ss) {
  std::set<std::tuple<EntityId, EntityId, Value>> out;
  for (const auto& s : ss) out.insert({s.subject(), s.property(), s.value()});
  return out;
}

}  // namespace

TEST_CASE("node constraint slurps just the node") {
  auto g = example4();
  auto s = parseSchema("<H> [ wde:Q5 ]", aliases());
  auto r = conformsSlurp(g, Human, {}, s.delta(0), s);
  CHECK(r.conforms);
  CHECK(r.slurped.nodes == std::set<Value>{Human});
  CHECK(r.slurped.statements.empty());
  CHECK_FALSE(conformsSlurp(g, UK, {}, s.delta(0), s).conforms);
}

TEST_CASE("simple researcher schema slurps four statements") {
  auto g = example4();
  auto s = schemaFile("example18.wshex");
  auto tau = maximalAssignment(g, s);
  auto r = conformsSlurp(g, timBl, tau, s.delta(s.label("Researcher")), s);
  CHECK(r.conforms);
  Set expect{timInstance(), timBirthDate(), timBirthPlace(), londonCountry()};
  CHECK(r.slurped.statements == expect);
  CHECK(r.slurped.nodes.count(UK));
  CHECK(r.slurped.nodes.count(year("1955")));

  auto sub = slurpSubset(g, s, s.label("Researcher"));
  CHECK(sub.slurp.statements == expect);
  CHECK(sub.conformingRoots == 1);
  CHECK(sub.graph().size() == 4);
  CHECK_THROWS_AS(slurpSubset(g, s, 99), SchemaError);
}

TEST_CASE("open qualifier specs reduce slurped qualifiers") {
  auto g = example4();
  auto s = parseSchema("<R> { awarded . {{ pointTime @<D> }} }\n<D> xsd:date", aliases());
  ShapeAssignment tau = maximalAssignment(g, s);
  auto r = conformsSlurp(g, timBl, tau, s.delta(0), s);
  REQUIRE(r.conforms);
  CHECK(r.slurped.statements == Set{st(timBl, awarded, PA, {{pointTime, year("2002")}})});
  CHECK(r.slurped.nodes.count(year("2002")));
  CHECK_FALSE(r.slurped.nodes.count(vintCerf));

  SlurpOptions full;
  full.fullQualifiers = true;
  auto f = conformsSlurp(g, timBl, tau, s.delta(0), s, full);
  CHECK(f.slurped.statements == Set{timAwarded()});
}

TEST_CASE("open empty start shape") {
  auto g = example4();
  auto s = parseSchema("<S> { }");
  auto sub = slurpSubset(g, s, 0);
  CHECK(sub.conformingRoots == g.nodes().size());
  CHECK(sub.slurp.statements.empty());
  CHECK(sub.slurp.nodes.size() == g.nodes().size());
}

TEST_CASE("cycles are slurped once") {
  auto a = EntityId::item(1), b = EntityId::item(2);
  auto p = EntityId::property(1);
  WikibaseGraph g({st(a, p, b), st(b, p, a)});
  auto s = parseSchema("<l> { P1 @<l> }");
  auto sub = slurpSubset(g, s, 0);
  CHECK(sub.slurp.statements == Set{st(a, p, b), st(b, p, a)});
  CHECK(sub.slurp.nodes == std::set<Value>{a, b});
}

TEST_CASE("failed alternatives contribute nothing unless visited") {
  auto g = example4();
  // London fails Bad (UK is not Q1), so timBl matches through the second branch.
  auto s = parseSchema("<R> { birthPlace @<Bad> | birthPlace . }\n<Bad> { country @<Q1> }\n<Q1> [ wde:Q1 ]", aliases());
  auto tau = maximalAssignment(g, s);
  CHECK_FALSE(tau.contains(London, s.label("Bad")));
  auto r = conformsSlurp(g, timBl, tau, s.delta(0), s);
  REQUIRE(r.conforms);
  CHECK(r.slurped.statements == Set{timBirthPlace()});
  CHECK_FALSE(r.slurped.nodes.count(UK));

  SlurpOptions v;
  v.visited = true;
  auto w = conformsSlurp(g, timBl, tau, s.delta(0), s, v);
  CHECK(w.conforms);
  CHECK(w.slurped.statements == Set{timBirthPlace(), londonCountry()});
  CHECK(w.slurped.nodes.count(UK));
}

TEST_CASE("all-shapes driver") {
  auto g = example4();
  auto s = schemaFile("example18.wshex");
  auto one = slurpSubset(g, s, s.label("Researcher"));
  auto all = slurpSubset(g, s, s.label("Researcher"), {}, true);
  CHECK(all.conformingRoots > one.conformingRoots);
  CHECK(std::includes(all.slurp.statements.begin(), all.slurp.statements.end(), one.slurp.statements.begin(),
                      one.slurp.statements.end()));
  // PA conforms to Place, so its country statement is included.
  CHECK(all.slurp.statements.count(paCountry()));
}

TEST_CASE("slurp properties on random instances") {
  std::mt19937 rng(51);
  rg::SchemaParams sp;
  sp.allowClosed = true;
  sp.leafStarPercent = 40;
  for (int i = 0; i < 300; ++i) {
    auto g = rg::randomGraph(rng, 6, 12);
    auto s = rg::randomSchema(rng, sp);
    auto tau = maximalAssignment(g, s);
    Slurper rule(g, s, tau);
    SlurpOptions vo;
    vo.visited = true;
    Slurper visited(g, s, tau, vo);
    SlurpOptions fo;
    fo.fullQualifiers = true;
    Slurper full(g, s, tau, fo);
    for (const auto& n : g.nodes()) {
      for (LabelId l = 0; l < s.size(); ++l) {
        auto r = rule.slurp(n, s.delta(l));
        CHECK(r.conforms == conforms(g, n, tau, s.delta(l), s));
        if (!r.conforms) continue;
        for (const auto& st : r.slurped.statements) CHECK(reducedFrom(st, g));

        // The slurp holds its own evidence: the root still conforms inside it.
        WikibaseGraph sub(std::vector<Statement>(r.slurped.statements.begin(), r.slurped.statements.end()));
        CHECK(validateNode(sub, n, l, s, maximalAssignment(sub, s)));

        auto v = visited.slurp(n, s.delta(l));
        auto f = full.slurp(n, s.delta(l));
        CHECK(v.conforms);
        CHECK(f.conforms);
        auto tv = triples(v.slurped.statements), tr = triples(r.slurped.statements);
        CHECK(std::includes(tv.begin(), tv.end(), tr.begin(), tr.end()));
        CHECK(triples(f.slurped.statements) == tr);
        for (const auto& st : f.slurped.statements) CHECK(g.contains(st));
      }
    }

    // Every conforming root's slurp is inside the subset, serial or parallel.
    LabelId start = rg::pick(rng, s.size());
    auto serial = slurpSubset(g, s, tau, start, {false, false, {Exec::Serial, 1}});
    auto par = slurpSubset(g, s, tau, start, {false, false, {Exec::Parallel, 4}});
    CHECK(serial.slurp.statements == par.slurp.statements);
    CHECK(serial.slurp.nodes == par.slurp.nodes);
    for (const auto& n : g.nodes()) {
      if (!tau.contains(n, start)) continue;
      auto r = rule.slurpLabel(n, start);
      CHECK(std::includes(serial.slurp.statements.begin(), serial.slurp.statements.end(),
                          r.slurped.statements.begin(), r.slurped.statements.end()));
    }
  }
}

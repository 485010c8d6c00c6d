#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <zlib.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "random_graphs.hpp"
#include "wsub/dumpio.hpp"

using namespace wsub;
using namespace fx;

namespace {

using Set = std::set<Statement>;
Set asSet(const WikibaseGraph& g) { return Set(g.statements().begin(), g.statements().end()); }

std::string gzip(const std::string& text) {
  z_stream z{};
  REQUIRE(deflateInit2(&z, 6, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) == Z_OK);
  std::string out(deflateBound(&z, text.size()) + 32, '\0');
  z.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(text.data()));
  z.avail_in = static_cast<uInt>(text.size());
  z.next_out = reinterpret_cast<Bytef*>(out.data());
  z.avail_out = static_cast<uInt>(out.size());
  REQUIRE(deflate(&z, Z_FINISH) == Z_STREAM_END);
  out.resize(z.total_out);
  deflateEnd(&z);
  return out;
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("documents are read in order") {
  auto docs = readDumpString(
      "{\"type\":\"item\",\"id\":\"Q80\",\"claims\":{\"P31\":[{\"value\":{\"entity\":\"Q5\"}}]}}\n"
      "{\"type\":\"property\",\"id\":\"P108\",\"claims\":{}}\n");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == timBl);
  CHECK(docs[0].statements == std::vector<Statement>{timInstance()});
  CHECK(docs[1].id == employer);
  CHECK(docs[1].entityType() == "property");
  CHECK(readDumpString("").empty());
}

TEST_CASE("array wrapper lines and unknown fields") {
  auto docs = readDumpString(
      "[\n"
      "{\"type\":\"item\",\"id\":\"Q84\",\"labels\":{\"en\":\"London\"},\"claims\":{\"P17\":[{\"value\":{\"entity\":"
      "\"Q145\"},\"rank\":\"normal\"}]}},\n"
      "{\"id\":\"Q145\"}\n"
      "]\n");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].statements == std::vector<Statement>{londonCountry()});
  CHECK(docs[1].statements.empty());
}

TEST_CASE("the running-example fixture") {
  auto docs = readDump(*std::make_unique<std::istringstream>(readFile(dataPath("example4.wbjl"))));
  CHECK(docs.size() == 19);
  auto g = graphFromDocs(docs);
  CHECK(g.size() == 11);
  CHECK(asSet(g) == asSet(example4()));

  auto text = writeDumpString(docs);
  CHECK(asSet(graphFromDocs(readDumpString(text))) == asSet(g));
  // Qualifier sets survive exactly, including both employer statements.
  auto back = graphFromDocs(readDumpString(writeDumpString(docsFromGraph(g))));
  CHECK(back.contains(timEmployer1()));
  CHECK(back.contains(timEmployer2()));
  CHECK(back.contains(timAwarded()));
  // One line per subject with statements.
  CHECK(lines(writeDumpString(docsFromGraph(g))) == 5);
}

TEST_CASE("canonical line format") {
  EntityDocument d{timBl, {st(timBl, employer, CERN, {{start, year("1984")}})}};
  CHECK(documentLine(d) ==
        "{\"type\":\"item\",\"id\":\"Q80\",\"claims\":{\"P108\":[{\"value\":{\"entity\":\"Q42944\"},\"qualifiers\":{"
        "\"P580\":[{\"literal\":\"1984\",\"datatype\":\"year\"}]}}]}}");
  // Numeric property order, no qualifiers key when there are none.
  EntityDocument e{timBl, {timEmployer2(), timBirthPlace(), timInstance()}};
  auto line = documentLine(e);
  CHECK(line.find("\"P19\"") < line.find("\"P31\""));
  CHECK(line.find("\"P31\"") < line.find("\"P108\""));
  CHECK(line.find("{\"value\":{\"entity\":\"Q5\"}}") != std::string::npos);
  CHECK(writeDumpString({}).empty());
}

TEST_CASE("writer is deterministic and order-insensitive") {
  std::mt19937 rng(31);
  rg::GraphParams gp;
  gp.qualifierPercent = 60;
  for (int i = 0; i < 50; ++i) {
    auto g = rg::randomGraph(rng, gp);
    auto docs = docsFromGraph(g);
    auto a = writeDumpString(docs);
    for (auto& d : docs) std::shuffle(d.statements.begin(), d.statements.end(), rng);
    CHECK(writeDumpString(docs) == a);
    CHECK(asSet(graphFromDocs(readDumpString(a))) == asSet(g));
    CHECK(graphFromDocs(docsFromGraph(g)).statements().size() == g.size());
  }
}

TEST_CASE("strings with quotes, escapes and non-ASCII text round-trip") {
  std::vector<Statement> ss{st(timBl, EntityId::property(1), DataValue{"say \"hi\"\n\\ é世", Datatype::String}),
                            st(timBl, EntityId::property(2), DataValue{"", Datatype::Unknown}),
                            st(timBl, EntityId::property(3), DataValue{"51.5,-0.1", Datatype::Coordinate})};
  WikibaseGraph g(ss);
  auto text = writeDumpString(docsFromGraph(g));
  CHECK(lines(text) == 1);
  CHECK(asSet(graphFromDocs(readDumpString(text))) == asSet(g));
}

TEST_CASE("bad lines are skipped and counted, or fail fast") {
  std::string text =
      "{\"id\":\"Q1\",\"claims\":{}}\n"
      "not json\n"
      "{\"id\":\"Q2\",\"claims\":{\"Q9\":[]}}\n"
      "{\"id\":\"Q3\",\"type\":\"property\"}\n"
      "{\"id\":\"Q4\",\"claims\":{\"P1\":[{\"value\":{\"literal\":\"x\"}}]}}\n";
  std::istringstream in(text);
  DumpReader r(in);
  std::vector<EntityDocument> docs;
  EntityDocument d;
  while (r.next(d)) docs.push_back(d);
  CHECK(docs.size() == 2);
  CHECK(r.errors() == 3);
  CHECK(r.errorSamples().size() == 3);
  CHECK(docs[1].statements[0].value() == Value{DataValue{"x", Datatype::String}});

  std::istringstream in2(text);
  DumpReader strict(in2, {DumpFormat::Wbjl, ErrorPolicy::FailFast});
  CHECK(strict.next(d));
  try {
    strict.next(d);
    FAIL("expected an error");
  } catch (const DumpError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("gzip input is detected") {
  auto plain = readFile(dataPath("example4.wbjl"));
  std::istringstream in(gzip(plain));
  CHECK(asSet(graphFromDocs(readDump(in))) == asSet(example4()));

  // Concatenated members and output larger than one inflate buffer.
  std::string big;
  for (int i = 0; i < 2000; ++i) big += plain;
  std::istringstream in2(gzip(big) + gzip(plain));
  DumpReader r(in2);
  EntityDocument d;
  std::size_t n = 0;
  while (r.next(d)) ++n;
  CHECK(n == 19 * 2001);
  CHECK(r.errors() == 0);
}

TEST_CASE("duplicate document ids are unioned") {
  std::vector<EntityDocument> docs{{timBl, {timInstance()}}, {timBl, {timBirthDate()}}, {London, {}}};
  std::size_t dup = 0;
  auto g = graphFromDocs(docs, &dup);
  CHECK(dup == 1);
  CHECK(g.size() == 2);
  CHECK(docsFromGraph(WikibaseGraph{}).empty());
  CHECK_THROWS_AS(graphFromDocs({{London, {timInstance()}}}), std::invalid_argument);
}

TEST_CASE("wikidata json lines") {
  std::string line = R"({"type":"item","id":"Q80","labels":{},"claims":{
    "P31":[{"mainsnak":{"snaktype":"value","property":"P31","datavalue":{"value":{"entity-type":"item","numeric-id":5,"id":"Q5"},"type":"wikibase-entityid"}},"type":"statement","rank":"normal"}],
    "P569":[{"mainsnak":{"snaktype":"value","property":"P569","datavalue":{"value":{"time":"+1955-06-08T00:00:00Z","precision":11},"type":"time"}},"rank":"normal"}],
    "P108":[{"mainsnak":{"snaktype":"value","property":"P108","datavalue":{"value":{"entity-type":"item","numeric-id":42944},"type":"wikibase-entityid"}},
             "qualifiers":{"P580":[{"snaktype":"value","property":"P580","datavalue":{"value":{"time":"+1984-00-00T00:00:00Z","precision":9},"type":"time"}}],
                           "P582":[{"snaktype":"somevalue","property":"P582"}]}}],
    "P1082":[{"mainsnak":{"snaktype":"value","datavalue":{"value":{"amount":"+8982000","unit":"1"},"type":"quantity"}}}],
    "P625":[{"mainsnak":{"snaktype":"value","datavalue":{"value":{"latitude":51.5,"longitude":-0.125},"type":"globecoordinate"}}}],
    "P1448":[{"mainsnak":{"snaktype":"value","datavalue":{"value":{"text":"Tim","language":"en"},"type":"monolingualtext"}}}],
    "P18":[{"mainsnak":{"snaktype":"value","datavalue":{"value":"x.jpg","type":"string"}}}],
    "P9":[{"mainsnak":{"snaktype":"novalue"}}]}})";
  // Multi-line JSON is not a dump line; flatten it.
  std::erase(line, '\n');
  EntityDocument d;
  REQUIRE(parseDocumentLine(line + ",", DumpFormat::WikidataJson, d));
  WikibaseGraph g(d.statements);
  CHECK(g.contains(timInstance()));
  CHECK(g.contains(st(timBl, birthDate, DataValue{"1955-06-08", Datatype::Date})));
  CHECK(g.contains(st(timBl, employer, CERN, {{start, year("1984")}})));
  CHECK(g.contains(st(timBl, EntityId::property(1082), DataValue{"8982000", Datatype::Integer})));
  CHECK(g.contains(st(timBl, EntityId::property(625), DataValue{"51.5,-0.125", Datatype::Coordinate})));
  CHECK(g.contains(st(timBl, EntityId::property(1448), DataValue{"Tim", Datatype::String})));
  CHECK(g.contains(st(timBl, EntityId::property(18), DataValue{"x.jpg", Datatype::String})));
  CHECK(g.size() == 7);

  CHECK_FALSE(parseDocumentLine(R"({"type":"lexeme","id":"L1"})", DumpFormat::WikidataJson, d));
  CHECK(dumpFormatFromName("wikidata-json") == DumpFormat::WikidataJson);
  CHECK_THROWS(dumpFormatFromName("rdf"));
}

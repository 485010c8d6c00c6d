// Serial against parallel runs of the three parallel kernels on synthetic
// dumps. Arg 0 is serial, any other value is the thread count.

#include <benchmark/benchmark.h>

#include <sstream>

#include "synthetic_dump.hpp"
#include "wsub/conformance.hpp"
#include "wsub/dumpio.hpp"
#include "wsub/shexmatch.hpp"
#include "wsub/wshex_parser.hpp"
#include "wsub/wshex_pregel.hpp"

using namespace wsub;

namespace {

const char* kResearchers = R"(prefix wde: <http://www.wikidata.org/entity/>
start = @<Researcher>
<Researcher> { wde:P31 @<Human> ; wde:P569 @<Date> ? ; wde:P19 @<Place> ; wde:P108 @<Org> * }
<Place> { wde:P17 @<Country> }
<Country> { }
<Org> { }
<Date> xsd:date
<Human> [ wde:Q5 ]
)";

ExecOptions execOf(const benchmark::State& st) {
  if (st.range(0) == 0) return {Exec::Serial, 1};
  return {Exec::Parallel, static_cast<int>(st.range(0))};
}

const std::string& dumpText(std::size_t n) {
  static std::map<std::size_t, std::string> cache;
  auto& s = cache[n];
  if (s.empty()) {
    std::ostringstream out;
    synth::writeDump(out, n);
    s = out.str();
  }
  return s;
}

const WikibaseGraph& graph(std::size_t n) {
  static std::map<std::size_t, WikibaseGraph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, graphFromDocs(readDumpString(dumpText(n)))).first;
  return it->second;
}

const WShExSchema& schema() {
  static const WShExSchema s = parseSchema(kResearchers);
  return s;
}

void BM_MaximalAssignment(benchmark::State& st) {
  const auto& g = graph(20000);
  for (auto _ : st) benchmark::DoNotOptimize(maximalAssignment(g, schema(), execOf(st)));
  st.SetItemsProcessed(st.iterations() * g.size());
}

void BM_ShexMatchStream(benchmark::State& st) {
  const auto& text = dumpText(50000);
  auto erased = eraseRefs(schema());
  StreamOptions opts;
  opts.exec = execOf(st);
  for (auto _ : st) {
    std::istringstream in(text);
    DumpReader r(in);
    std::ostringstream out;
    benchmark::DoNotOptimize(shexMatchSubset(r, out, erased, opts));
  }
  st.SetItemsProcessed(st.iterations() * 50000);
}

void BM_PregelValidate(benchmark::State& st) {
  const auto& g = graph(20000);
  PregelRunOptions opts;
  opts.exec = execOf(st);
  for (auto _ : st) benchmark::DoNotOptimize(pregelValidate(g, schema(), *schema().start(), opts));
  st.SetItemsProcessed(st.iterations() * g.size());
}

}  // namespace

BENCHMARK(BM_MaximalAssignment)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShexMatchStream)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PregelValidate)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// wsub: schema validation and subsetting over line-delimited entity dumps.

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>

#include "wsub/conformance.hpp"
#include "wsub/dumpio.hpp"
#include "wsub/shexmatch.hpp"
#include "wsub/slurp.hpp"
#include "wsub/subsets.hpp"
#include "wsub/wshex_parser.hpp"
#include "wsub/wshex_pregel.hpp"

using namespace wsub;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInput = 1, kSchema = 2, kBudget = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string schemaPath, input = "-", output = "-", start, ids, matchers;
  std::string mode, engine = "recursive", format = "wbjl", literalDatatype = "year";
  std::string summaryPath, tracePath;
  bool failFast = false, visited = false, allShapes = false, fullQualifiers = false;
  int workers = 0;
  std::size_t maxSupersteps = 0;
};

std::string readText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WShExSchema loadSchema(const std::string& path) {
  if (path.empty()) throw InputError("--schema is required");
  return parseSchema(readText(path));
}

LabelId startLabel(const WShExSchema& s, const Config& c) {
  if (!c.start.empty()) return s.label(c.start);
  if (s.start()) return *s.start();
  throw SchemaError("no start label: pass --start or declare start in the schema");
}

ExecOptions execOf(const Config& c) {
  if (c.workers == 1) return {Exec::Serial, 1};
  return {Exec::Parallel, c.workers};
}

ReadOptions readOptionsOf(const Config& c) {
  ReadOptions o;
  try {
    o.format = dumpFormatFromName(c.format);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  o.policy = c.failFast ? ErrorPolicy::FailFast : ErrorPolicy::Skip;
  return o;
}

// Owns the stream behind an input or output path, `-` meaning stdio.
class Input {
public:
  explicit Input(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw InputError("cannot open " + path);
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw InputError("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

WikibaseGraph loadGraph(const Config& c, json& summary) {
  Input in(c.input);
  DumpReader r(in.get(), readOptionsOf(c));
  std::vector<EntityDocument> docs;
  EntityDocument d;
  while (r.next(d)) docs.push_back(std::move(d));
  summary["entitiesRead"] = r.documents();
  summary["skippedLines"] = r.errors();
  for (const auto& e : r.errorSamples()) spdlog::warn("skipped: {}", e);
  std::size_t dups = 0;
  auto g = graphFromDocs(docs, &dups);
  if (dups) spdlog::warn("{} repeated entity ids merged", dups);
  spdlog::info("loaded {} statements over {} nodes", g.size(), g.nodes().size());
  return g;
}

void writeGraph(const WikibaseGraph& g, const Config& c, json& summary) {
  Output out(c.output);
  writeDump(out.get(), docsFromGraph(g));
  summary["statementsEmitted"] = g.size();
}

json pregelStats(const PregelResult& r) {
  json steps = json::array();
  for (std::size_t k = 0; k < r.stats.steps.size(); ++k) {
    json s;
    s["step"] = k + 1;
    s["messages"] = r.stats.steps[k].messages;
    s["activated"] = r.stats.steps[k].activated;
    if (!r.histograms.empty()) {
      const auto& h = r.histograms[std::min(k + 1, r.histograms.size() - 1)];
      for (const auto& [kind, n] : h) s[kindName(kind)] = n;
    }
    steps.push_back(std::move(s));
  }
  json out;
  out["supersteps"] = r.stats.supersteps;
  out["settledAfterLoop"] = r.settledAfterLoop;
  out["unknownTransitions"] = r.unknownTransitions;
  out["steps"] = std::move(steps);
  return out;
}

PregelRunOptions pregelOptionsOf(const Config& c) {
  PregelRunOptions o;
  o.exec = execOf(c);
  if (c.maxSupersteps) o.maxSupersteps = c.maxSupersteps;
  o.recordLog = !c.tracePath.empty();
  return o;
}

void writeTrace(const PregelResult& r, const WShExSchema& s, const Config& c) {
  if (c.tracePath.empty()) return;
  Output out(c.tracePath);
  std::size_t at = 0;
  auto lines = superstepLines(r);
  for (std::size_t step = 1; step <= lines.size(); ++step) {
    for (; at < r.log.size() && r.log[at].step == step; ++at) out.get() << traceLine(r.log[at], s) << '\n';
    out.get() << lines[step - 1] << '\n';
  }
}

int parseSchemaCmd(const std::string& path) {
  auto s = loadSchema(path);
  std::cout << describe(s);
  return kOk;
}

int validateCmd(const Config& c, json& summary) {
  auto s = loadSchema(c.schemaPath);
  auto g = loadGraph(c, summary);
  Output out(c.output);
  std::size_t ok = 0, lines = 0;
  summary["engine"] = c.engine;
  if (c.engine == "recursive") {
    auto tau = maximalAssignment(g, s, execOf(c));
    std::optional<LabelId> only;
    if (!c.start.empty()) only = s.label(c.start);
    for (const auto& n : g.nodes())
      for (LabelId l = 0; l < s.size(); ++l) {
        if (only && l != *only) continue;
        bool in = tau.contains(n, l);
        ok += in;
        ++lines;
        out.get() << n.str() << '\t' << s.name(l) << '\t' << (in ? "Ok" : "Failed") << '\n';
      }
  } else if (c.engine == "pregel") {
    auto r = pregelValidate(g, s, startLabel(s, c), pregelOptionsOf(c));
    for (const auto& [n, m] : r.statuses)
      for (const auto& [l, st] : m) {
        ok += st.kind == Status::Kind::Ok;
        ++lines;
        out.get() << n.str() << '\t' << s.name(l) << '\t' << kindName(st.kind) << '\n';
      }
    summary["pregel"] = pregelStats(r);
    writeTrace(r, s, c);
  } else {
    throw InputError("unknown engine " + c.engine);
  }
  summary["pairsReported"] = lines;
  summary["pairsOk"] = ok;
  return kOk;
}

int subsetCmd(const Config& c, json& summary) {
  summary["mode"] = c.mode;
  if (c.mode == "entities" || c.mode == "match") {
    std::function<bool(const Statement&)> keep;
    if (c.mode == "entities") {
      if (c.ids.empty()) throw InputError("--ids is required in entities mode");
      std::set<EntityId> ids;
      try {
        ids = parseIdList(c.ids);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      keep = EntityFilter(ids);
    } else {
      if (c.matchers.empty()) throw InputError("--matchers is required in match mode");
      Datatype lit = datatypeFromName(c.literalDatatype);
      if (lit == Datatype::Unknown) throw InputError("unknown literal datatype " + c.literalDatatype);
      auto ms = parseMatchers(readText(c.matchers), lit);
      keep = [ms](const Statement& s) { return matchAny(ms, s); };
    }
    Input in(c.input);
    Output out(c.output);
    DumpReader r(in.get(), readOptionsOf(c));
    auto st = filterDump(r, out.get(), keep);
    summary["entitiesRead"] = st.entitiesRead;
    summary["entitiesMatched"] = st.entitiesMatched;
    summary["statementsEmitted"] = st.statementsEmitted;
    summary["skippedLines"] = r.errors();
    return kOk;
  }

  auto s = loadSchema(c.schemaPath);
  if (c.mode == "shex-match") {
    auto erased = eraseRefs(s);
    Input in(c.input);
    Output out(c.output);
    DumpReader r(in.get(), readOptionsOf(c));
    StreamOptions so;
    so.exec = execOf(c);
    auto st = shexMatchSubset(r, out.get(), erased, so);
    summary["entitiesRead"] = st.entitiesRead;
    summary["entitiesMatched"] = st.entitiesMatched;
    summary["statementsEmitted"] = st.statementsEmitted;
    summary["skippedLines"] = r.errors();
    json per;
    for (const auto& [l, n] : st.perLabel) per[s.name(l)] = n;
    summary["perLabel"] = per;
    return kOk;
  }
  if (c.mode == "slurp") {
    LabelId start = startLabel(s, c);
    auto g = loadGraph(c, summary);
    SlurpOptions so;
    so.fullQualifiers = c.fullQualifiers;
    so.visited = c.visited;
    so.exec = execOf(c);
    auto sub = slurpSubset(g, s, start, so, c.allShapes);
    summary["entitiesMatched"] = sub.conformingRoots;
    writeGraph(sub.graph(), c, summary);
    return kOk;
  }
  if (c.mode == "pregel") {
    LabelId start = startLabel(s, c);
    auto g = loadGraph(c, summary);
    auto sub = pregelSubset(g, s, start, pregelOptionsOf(c));
    std::set<EntityId> okNodes;
    for (const auto& [n, l] : sub.run.okPairs()) okNodes.insert(n);
    summary["entitiesMatched"] = okNodes.size();
    summary["pregel"] = pregelStats(sub.run);
    writeTrace(sub.run, s, c);
    writeGraph(sub.graph, c, summary);
    return kOk;
  }
  throw InputError("unknown mode " + c.mode);
}

void setupLogging() {
  auto logger = spdlog::stderr_logger_mt("wsub");
  logger->set_pattern("wsub: %l: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("WSUB_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

void writeSummary(const Config& c, json summary, double seconds) {
  if (c.summaryPath.empty()) return;
  summary["wallSeconds"] = seconds;
  for (const char* k : {"entitiesRead", "entitiesMatched", "statementsEmitted"})
    if (!summary.contains(k)) summary[k] = 0;
  Output out(c.summaryPath);
  out.get() << summary.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  setupLogging();
  CLI::App app{"Validation and subsetting of wikibase entity dumps"};
  app.require_subcommand(1);
  Config c;
  std::string schemaArg;

  auto* ps = app.add_subcommand("parse-schema", "Parse a schema and print its desugared form");
  ps->add_option("schema", schemaArg, "Schema file")->required();

  auto common = [&c](CLI::App* sub) {
    sub->add_option("--schema", c.schemaPath, "Schema file");
    sub->add_option("-i,--input", c.input, "Input dump, - for stdin (gzip detected)");
    sub->add_option("-o,--output", c.output, "Output file, - for stdout");
    sub->add_option("--start", c.start, "Start label, overriding the schema's");
    sub->add_option("--format", c.format, "Input format: wbjl or wikidata-json");
    sub->add_flag("--fail-fast", c.failFast, "Stop at the first malformed line");
    sub->add_option("--workers", c.workers, "Worker threads, 0 for all cores, 1 for serial");
    sub->add_option("--max-supersteps", c.maxSupersteps, "Superstep budget of the pregel engine");
    sub->add_option("--trace", c.tracePath, "Write pregel message trace to this file");
    sub->add_option("--summary", c.summaryPath, "Write a JSON run summary to this file, - for stdout");
  };

  auto* val = app.add_subcommand("validate", "Report node/label statuses");
  common(val);
  val->add_option("--engine", c.engine, "recursive or pregel")->check(CLI::IsMember({"recursive", "pregel"}));

  auto* sub = app.add_subcommand("subset", "Extract a subset as a dump");
  common(sub);
  sub->add_option("--mode", c.mode, "entities, match, shex-match, slurp or pregel")
      ->required()
      ->check(CLI::IsMember({"entities", "match", "shex-match", "slurp", "pregel"}));
  sub->add_option("--ids", c.ids, "Comma separated ids for entities mode");
  sub->add_option("--matchers", c.matchers, "Matcher file for match mode");
  sub->add_option("--literal-datatype", c.literalDatatype, "Datatype of bare numbers in matchers");
  sub->add_flag("--visited", c.visited, "Slurp everything the check looked at");
  sub->add_flag("--all-shapes", c.allShapes, "Slurp roots of every label");
  sub->add_flag("--full-qualifiers", c.fullQualifiers, "Keep all qualifiers of slurped statements");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  json summary;
  auto t0 = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    if (*ps) {
      code = parseSchemaCmd(schemaArg);
    } else if (*val) {
      summary["command"] = "validate";
      code = validateCmd(c, summary);
    } else {
      summary["command"] = "subset";
      code = subsetCmd(c, summary);
    }
  } catch (const SchemaError& e) {
    spdlog::error("schema error: {}", e.what());
    return kSchema;
  } catch (const BudgetExceeded& e) {
    spdlog::error("{}", e.what());
    return kBudget;
  } catch (const DumpError& e) {
    spdlog::error("input {}", e.what());
    return kInput;
  } catch (const MatcherParseError& e) {
    spdlog::error("matchers {}", e.what());
    return kInput;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInput;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kInput;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  writeSummary(c, summary, secs);
  return code;
}

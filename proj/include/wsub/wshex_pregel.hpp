#pragma once

// WShEx validation and subsetting on the vertex machine. Each vertex
// carries its full outgoing statement list; statements with entity values
// also become edges. Data-valued statements are settled inside checkLocal,
// entity neighbours through messages.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsub/conformance.hpp"
#include "wsub/pschema.hpp"

namespace wsub {

struct VertexPayload {
  EntityId id;
  std::vector<Statement> statements;
};

struct EdgePayload {
  EntityId property;
  std::vector<Qualifier> qualifiers;
};

using WVertex = ShapedVertex<VertexPayload>;
using WPregelGraph = PregelGraph<WVertex, EdgePayload>;

/// One edge per statement with an entity value, parallel statements
/// included. Vertices follow g.nodes().
WPregelGraph buildPregelGraph(const WikibaseGraph& g);

class WShExPSchema {
public:
  /// Throws SchemaError when a qualifier spec refers to a label that is not
  /// a pure node constraint.
  explicit WShExPSchema(const WShExSchema& schema);

  const WShExSchema& schema() const { return *schema_; }

  LocalResult checkLocal(LabelId l, const VertexPayload& v) const;
  NeighsResult checkNeighs(LabelId l, const VertexPayload& v, const DepSet& oks, const DepSet& fs) const;

  /// Bag form of the neighbour check: okBag against the expression of l's
  /// entity constraints, failed must be empty for closed shapes.
  NeighsResult checkNeighs(LabelId l, const Bag<std::pair<EntityId, LabelId>>& okBag,
                           const std::set<std::pair<EntityId, LabelId>>& failed) const;

  /// (property, label) of the labelled triple constraints a neighbour can
  /// satisfy, through AND, alternatives and node references.
  const TripleConstraints& tripleConstraints(LabelId l) const { return tc_.at(l); }

  /// Exact check of v against l with refOk deciding dependencies on
  /// non-node-constraint labels.
  bool conformsWith(LabelId l, const VertexPayload& v, const std::function<bool(const Dep&)>& refOk,
                    Witness* w = nullptr) const;

  PSchemaParams<VertexPayload, EdgePayload> params() const;

private:
  // A shape's leaves with the data-only ones erased from its expression;
  // the extra symbol `erased` absorbs statements that may use them.
  struct Relaxed {
    std::vector<const TripleExpr*> leaves;
    std::vector<bool> dataOnly;
    std::set<EntityId> preds;
    Rbe<std::size_t> rbe = Rbe<std::size_t>::empty();
    std::size_t erased = 0;
  };

  bool entityLabel(LabelId l) const;
  void collect(const ShapeExpr& se, TripleConstraints& out, std::set<LabelId>& seen) const;
  void compile(const ShapeExpr& se);
  EvalContext contextFor(const VertexPayload& v, const std::function<bool(const Dep&)>& refOk) const;
  bool localHolds(const VertexPayload& v, const ShapeExpr& se, const EvalContext& ctx) const;

  const WShExSchema* schema_;
  Evaluator ev_;
  EvalContext plain_;
  std::vector<TripleConstraints> tc_;
  std::map<const TripleExpr*, Relaxed> relaxed_;
};

enum class CyclePolicy {
  GreatestFixpoint,  // unresolved labels hold unless they fail while all of them are assumed
  Pessimistic,       // unresolved deps count as failed
};

/// Settles one vertex after the loop under the pessimistic policy: Pending
/// labels are checked with no neighbours, WaitingFor ones with their
/// unanswered deps failed.
WVertex checkRemaining(const WShExPSchema& ps, const WVertex& v);

struct PregelRunOptions {
  std::optional<std::size_t> maxSupersteps;  // default |V|*|L|+2
  ExecOptions exec;
  CyclePolicy cycles = CyclePolicy::GreatestFixpoint;
  bool recordLog = false;
};

struct LoggedMsg {
  std::size_t step;
  EntityId to;
  LabelId label;
  Msg msg;
};

using StatusHistogram = std::map<Status::Kind, std::size_t>;

struct PregelResult {
  std::map<EntityId, std::map<LabelId, Status>> statuses;  // Undefined omitted
  PregelStats stats;
  std::vector<StatusHistogram> histograms;  // [0] after the initial pass, [k] after superstep k
  std::vector<LoggedMsg> log;
  std::size_t unknownTransitions = 0;
  std::size_t settledAfterLoop = 0;

  Status::Kind kind(const EntityId& n, LabelId l) const;
  bool ok(const EntityId& n, LabelId l) const { return kind(n, l) == Status::Kind::Ok; }
  std::set<std::pair<EntityId, LabelId>> okPairs() const;
};

PregelResult pregelValidate(const WikibaseGraph& g, const WShExSchema& schema, LabelId start,
                            const PregelRunOptions& opts = {});

struct PregelSubset {
  WikibaseGraph graph;
  PregelResult run;
};

/// Statements used by a derivation of each Ok node@label pair.
PregelSubset pregelSubset(const WikibaseGraph& g, const WShExSchema& schema, LabelId start,
                          const PregelRunOptions& opts = {});

/// Machine-readable diagnostics:
///   msg <step> <to> <label> <message>
///   step <k> messages=<m> activated=<a> Ok=<n> Failed=<n> Pending=<n> WaitingFor=<n>
std::string traceLine(const LoggedMsg& m, const WShExSchema& schema);
std::vector<std::string> superstepLines(const PregelResult& r);

}  // namespace wsub

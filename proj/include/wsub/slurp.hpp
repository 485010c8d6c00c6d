#pragma once

// Validation that also collects the part of the graph its derivation used.

#include <map>
#include <set>
#include <vector>

#include "wsub/conformance.hpp"

namespace wsub {

struct Slurp {
  std::set<Value> nodes;
  std::set<Statement> statements;

  void merge(const Slurp& other);
};

struct SlurpResult {
  bool conforms = false;
  Slurp slurped;  // meaningful only when conforms
};

struct SlurpOptions {
  /// Keep every qualifier of a slurped statement instead of only the pairs
  /// its qualifier spec consumed.
  bool fullQualifiers = false;
  /// Collect everything the check looked at, including statements and
  /// references of failed alternatives.
  bool visited = false;
  ExecOptions exec;
};

/// Memoized slurps of node@label pairs under a fixed assignment. A pair's
/// own contribution comes from one deterministic witness; following the
/// references it took gives the full slurp, so cycles are visited once.
class Slurper {
public:
  Slurper(const WikibaseGraph& g, const WShExSchema& schema, const ShapeAssignment& tau, SlurpOptions opts = {});

  /// Precomputes the contributions of every pair in tau.
  void precompute();

  /// Slurp of n against se. For label references in tau whose own
  /// definition does not hold under tau, only the node is collected.
  SlurpResult slurp(const Value& n, const ShapeExpr& se);
  SlurpResult slurpLabel(const Value& n, LabelId l);

private:
  using Key = std::pair<Value, LabelId>;
  struct Contribution {
    bool ok = false;
    Slurp own;
    std::vector<Key> refs;
  };

  Contribution compute(const Value& n, const ShapeExpr& se) const;
  Contribution fromWitness(const Value& n, const Witness& w) const;
  void visit(const Value& n, const ShapeExpr& se, Contribution& c) const;
  const Contribution& pair(const Value& n, LabelId l);
  void close(std::vector<Key> frontier, Slurp& out);

  const WikibaseGraph& g_;
  const WShExSchema& schema_;
  const ShapeAssignment& tau_;
  SlurpOptions opts_;
  Evaluator ev_;
  EvalContext ctx_;
  std::map<Key, Contribution> memo_;
};

SlurpResult conformsSlurp(const WikibaseGraph& g, const Value& n, const ShapeAssignment& tau, const ShapeExpr& se,
                          const WShExSchema& schema, const SlurpOptions& opts = {});

struct SlurpSubset {
  Slurp slurp;
  std::size_t conformingRoots = 0;
  WikibaseGraph graph() const;
};

/// Union of the slurps of every graph node conforming to start (or to any
/// label with allShapes), under the maximal assignment.
SlurpSubset slurpSubset(const WikibaseGraph& g, const WShExSchema& schema, LabelId start,
                        const SlurpOptions& opts = {}, bool allShapes = false);
SlurpSubset slurpSubset(const WikibaseGraph& g, const WShExSchema& schema, const ShapeAssignment& tauMax,
                        LabelId start, const SlurpOptions& opts = {}, bool allShapes = false);

}  // namespace wsub

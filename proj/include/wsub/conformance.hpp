#pragma once

// Conformance of nodes to shape expressions, with optional derivation
// witnesses, and the maximal valid shape assignment.

#include <functional>
#include <memory>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsub/parallel.hpp"
#include "wsub/rbe.hpp"
#include "wsub/wgraph.hpp"
#include "wsub/wshex.hpp"

namespace wsub {

class ShapeAssignment {
public:
  using Pair = std::pair<EntityId, LabelId>;

  ShapeAssignment() = default;
  explicit ShapeAssignment(std::set<Pair> pairs) : pairs_(std::move(pairs)) {}

  bool contains(const EntityId& n, LabelId l) const { return pairs_.count({n, l}) > 0; }
  void insert(const EntityId& n, LabelId l) { pairs_.insert({n, l}); }
  void erase(const EntityId& n, LabelId l) { pairs_.erase({n, l}); }
  const std::set<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  bool operator==(const ShapeAssignment&) const = default;

private:
  std::set<Pair> pairs_;
};

struct QualifierUse {
  Qualifier qualifier;
  std::optional<LabelId> valueRef;
};

struct TripleUse {
  const Statement* statement = nullptr;
  std::optional<LabelId> valueRef;
  std::vector<QualifierUse> qualifiers;  // pairs consumed by the qualifier spec
};

/// One successful derivation of n against a shape expression, reduced to
/// what the slurp rules need.
struct Witness {
  bool cond = false;              // some node constraint held on n
  std::vector<LabelId> nodeRefs;  // node-level references taken
  std::vector<TripleUse> triples;
};

struct EvalContext {
  /// Outgoing statements of an entity.
  std::function<std::span<const Statement>(const EntityId&)> neighs;
  /// Decides y@l for an entity value y found under property p (statement
  /// or qualifier property). Data values never reach this callback.
  std::function<bool(const EntityId& p, const EntityId& y, LabelId l)> entityRef;
  /// Decides n@l for a node-level reference to l. When empty the
  /// definition of l is expanded in place.
  std::function<bool(const EntityId& n, LabelId l)> nodeRef;
};

/// Chooses, for each item, one leaf among its candidates so that the bag of
/// chosen leaves matches rbe. Items with identical candidate sets are
/// grouped and only their counts are distributed. On success chosen[i] is
/// the leaf of item i.
bool assignLeaves(const std::vector<std::vector<std::size_t>>& candidates, const Rbe<std::size_t>& rbe,
                  std::vector<std::size_t>* chosen);

class Evaluator {
public:
  explicit Evaluator(const WShExSchema& schema);

  const WShExSchema& schema() const { return *schema_; }

  bool conforms(const Value& n, const ShapeExpr& se, const EvalContext& ctx, Witness* w = nullptr) const;
  bool conformsLabel(const Value& n, LabelId l, const EvalContext& ctx, Witness* w = nullptr) const {
    return conforms(n, schema_->delta(l), ctx, w);
  }

  /// Value check of a triple or qualifier constraint.
  bool valueConforms(const EntityId& p, const Value& y, const std::optional<LabelId>& ref,
                     const EvalContext& ctx) const;

  /// Qualifier-spec check of one statement; on success uses lists the
  /// consumed pairs.
  bool qualifiersConform(const Statement& s, const QualifierSpec& qs, const EvalContext& ctx,
                         std::vector<QualifierUse>* uses = nullptr) const;

  /// Triple-expression check over an explicit statement set.
  bool triplesConform(std::span<const Statement* const> ts, const TripleExpr& te, const EvalContext& ctx,
                      std::vector<TripleUse>* uses = nullptr) const;

private:
  struct CompiledTe {
    std::vector<const TripleExpr*> leaves;
    Rbe<std::size_t> rbe = Rbe<std::size_t>::empty();
    std::set<EntityId> preds;
  };
  struct CompiledPs {
    std::vector<const PropertySpec*> leaves;
    Rbe<std::size_t> rbe = Rbe<std::size_t>::empty();
    std::set<EntityId> props;
  };

  const CompiledTe& compiled(const TripleExpr& te, std::unique_ptr<CompiledTe>& scratch) const;
  const CompiledPs& compiled(const PropertySpec& ps, std::unique_ptr<CompiledPs>& scratch) const;
  void compileShape(const ShapeExpr& se);
  void compileTe(const TripleExpr& te);

  bool evalShape(const Value& n, bool closed, const TripleExpr& te, const EvalContext& ctx, Witness* w) const;

  const WShExSchema* schema_;
  std::unordered_map<const TripleExpr*, CompiledTe> teCache_;
  std::unordered_map<const PropertySpec*, CompiledPs> psCache_;
};

/// Context answering references from an assignment over graph g.
EvalContext assignmentContext(const WikibaseGraph& g, const ShapeAssignment& tau);

/// G, n, tau |= se.
bool conforms(const WikibaseGraph& g, const Value& n, const ShapeAssignment& tau, const ShapeExpr& se,
              const WShExSchema& schema);

/// Greatest valid assignment over g's nodes, by downward refinement from
/// the full candidate set.
ShapeAssignment maximalAssignment(const WikibaseGraph& g, const WShExSchema& schema, const ExecOptions& opts = {});

bool validateNode(const WikibaseGraph& g, const EntityId& n, LabelId l, const WShExSchema& schema,
                  const ShapeAssignment& tauMax);
bool validateNode(const WikibaseGraph& g, const EntityId& n, const std::string& label, const WShExSchema& schema);

}  // namespace wsub

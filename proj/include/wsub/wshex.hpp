#pragma once

// WShEx abstract syntax: node constraints, shape expressions, triple
// expressions and qualifier specifiers, plus the schema container.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wsub/rbe.hpp"
#include "wsub/wgraph.hpp"

namespace wsub {

using LabelId = std::size_t;

struct NodeConstraint {
  enum class Kind { AnyValue, ValueSet, DatatypeIs };

  Kind kind = Kind::AnyValue;
  std::vector<Value> values;       // ValueSet, sorted and unique
  std::vector<Datatype> accepted;  // DatatypeIs
  std::string datatypeName;        // DatatypeIs, as written (e.g. "xsd:date")

  static NodeConstraint any();
  static NodeConstraint valueSet(std::vector<Value> values);
  static NodeConstraint datatype(std::string name, std::vector<Datatype> accepted);

  bool test(const Value& v) const;
};

/// ps ::= ps,ps | ps|ps | ps* | empty | p:@l
struct PropertySpec {
  enum class Kind { EachOf, OneOf, Star, Empty, Constraint };

  Kind kind = Kind::Empty;
  std::vector<PropertySpec> children;
  EntityId property;
  std::optional<LabelId> valueRef;  // nullopt: any value

  static PropertySpec empty() { return {}; }
  static PropertySpec constraint(EntityId p, std::optional<LabelId> ref);
  static PropertySpec eachOf(PropertySpec a, PropertySpec b);
  static PropertySpec oneOf(PropertySpec a, PropertySpec b);
  static PropertySpec star(PropertySpec a);
};

struct QualifierSpec {
  bool closed = false;
  PropertySpec spec;
};

/// te ::= te;te | te|te | te* | empty | p @l qs
struct TripleExpr {
  enum class Kind { EachOf, OneOf, Star, Empty, Constraint };

  Kind kind = Kind::Empty;
  std::vector<TripleExpr> children;
  EntityId property;
  std::optional<LabelId> valueRef;  // nullopt: any value
  QualifierSpec quals;

  static TripleExpr empty() { return {}; }
  static TripleExpr constraint(EntityId p, std::optional<LabelId> ref, QualifierSpec qs = {});
  static TripleExpr eachOf(TripleExpr a, TripleExpr b);
  static TripleExpr oneOf(TripleExpr a, TripleExpr b);
  static TripleExpr star(TripleExpr a);
};

struct ShapeExpr {
  enum class Kind { Cond, And, Ref, Shape };

  Kind kind = Kind::Cond;
  NodeConstraint cond;
  std::vector<ShapeExpr> children;  // And: two operands
  LabelId ref = 0;
  bool closed = false;
  TripleExpr te;

  static ShapeExpr condition(NodeConstraint c);
  static ShapeExpr conj(ShapeExpr a, ShapeExpr b);
  static ShapeExpr reference(LabelId l);
  static ShapeExpr shape(TripleExpr te, bool closed = false);
};

TripleExpr desugar(const TripleExpr& te, const Cardinality& c);
PropertySpec desugar(const PropertySpec& ps, const Cardinality& c);

std::set<EntityId> predsOf(const TripleExpr& te);
std::set<EntityId> propsOf(const PropertySpec& ps);

class SchemaError : public std::runtime_error {
public:
  SchemaError(const std::string& msg, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_, column_;
};

class WShExSchema {
public:
  /// Declares a label with a placeholder definition; returns its id.
  LabelId addLabel(const std::string& name);
  void define(LabelId l, ShapeExpr se);
  void setStart(std::optional<LabelId> l) { start_ = l; }
  void setPrefix(const std::string& name, const std::string& iri) { prefixes_[name] = iri; }

  /// Checks the schema invariants and caches derived facts. Throws
  /// SchemaError on dangling references or Shape-free reference cycles.
  void finalize();

  std::size_t size() const { return names_.size(); }
  const std::string& name(LabelId l) const { return names_.at(l); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<LabelId> find(const std::string& name) const;
  LabelId label(const std::string& name) const;  // throws SchemaError

  const ShapeExpr& delta(LabelId l) const { return delta_.at(l); }
  ShapeExpr& mutableDelta(LabelId l) { return delta_.at(l); }
  std::optional<LabelId> start() const { return start_; }
  const std::map<std::string, std::string>& prefixes() const { return prefixes_; }

  /// True when δ(l), followed through references, contains no Shape.
  bool condOnly(LabelId l) const { return condOnly_.at(l); }

private:
  std::vector<std::string> names_;
  std::map<std::string, LabelId> index_;
  std::vector<ShapeExpr> delta_;
  std::vector<bool> defined_;
  std::vector<bool> condOnly_;
  std::optional<LabelId> start_;
  std::map<std::string, std::string> prefixes_;
};

/// Human-readable dump of a schema, one label per line.
std::string describe(const WShExSchema& schema);
std::string describe(const WShExSchema& schema, const ShapeExpr& se);
std::string describe(const WShExSchema& schema, const TripleExpr& te);

}  // namespace wsub

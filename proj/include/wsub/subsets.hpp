#pragma once

// Entity-generated and matching-generated subgraphs. Every extraction here
// is a per-statement predicate, so the same filters run over a dump stream.

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wsub/wgraph.hpp"

namespace wsub {

struct Matcher {
  enum class Kind : std::uint8_t { SubjectIs, PropertyIs, ValueIs, QualifierIs, QualifiedPropIs, QualifiedValueIs };

  Kind kind = Kind::SubjectIs;
  EntityId entity;  // subject or property argument
  Value value;      // value argument

  static Matcher subjectIs(EntityId e) { return {Kind::SubjectIs, e, {}}; }
  static Matcher propertyIs(EntityId p);
  static Matcher valueIs(Value v) { return {Kind::ValueIs, {}, std::move(v)}; }
  static Matcher qualifierIs(EntityId p, Value v);
  static Matcher qualifiedPropIs(EntityId p);
  static Matcher qualifiedValueIs(Value v) { return {Kind::QualifiedValueIs, {}, std::move(v)}; }

  std::string str() const;

  auto operator<=>(const Matcher&) const = default;
};

using MatchExpression = std::set<Matcher>;

bool matchStatement(const Matcher& m, const Statement& s);
bool matchAny(const MatchExpression& ms, const Statement& s);

WikibaseGraph matchingSubgraph(const WikibaseGraph& g, const MatchExpression& ms);
/// Throws std::invalid_argument when an id is not an item.
WikibaseGraph itemSubgraph(const WikibaseGraph& g, const std::set<EntityId>& qs);
/// Throws std::invalid_argument when an id is not a property.
WikibaseGraph propertySubgraph(const WikibaseGraph& g, const std::set<EntityId>& ps);
WikibaseGraph entitySubgraph(const WikibaseGraph& g, const std::set<EntityId>& es);

/// Statement predicate of the entity-generated subgraph, usable on a stream.
class EntityFilter {
public:
  explicit EntityFilter(const std::set<EntityId>& es);
  bool operator()(const Statement& s) const;

private:
  std::set<EntityId> items_, props_;
};

class MatcherParseError : public std::runtime_error {
public:
  MatcherParseError(const std::string& msg, std::size_t line);
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// One `name(arg[,arg])` per line, `#` comments. Arguments: Q<n>/P<n>,
/// "text" (optionally "text"^^datatype), bare numbers. Bare integers get
/// literalDatatype, numbers with a point are decimals.
MatchExpression parseMatchers(std::string_view text, Datatype literalDatatype = Datatype::Year);

/// Comma separated entity ids, e.g. "Q80,P17".
std::set<EntityId> parseIdList(std::string_view text);

}  // namespace wsub

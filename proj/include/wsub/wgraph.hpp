#pragma once

// In-memory wikibase graph: entities, data values and qualified statements.

#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wsub {

enum class EntityKind : std::uint8_t { Item, Property };

/// Identifier of an item (Q<n>) or a property (P<n>).
struct EntityId {
  EntityKind kind = EntityKind::Item;
  std::uint64_t num = 0;

  static EntityId item(std::uint64_t n);
  static EntityId property(std::uint64_t n);
  /// Parses "Q42" / "P31". Throws std::invalid_argument on anything else.
  static EntityId parse(std::string_view text);
  static bool tryParse(std::string_view text, EntityId& out);

  bool isItem() const { return kind == EntityKind::Item; }
  bool isProperty() const { return kind == EntityKind::Property; }
  std::string str() const;

  auto operator<=>(const EntityId&) const = default;
};

enum class Datatype : std::uint8_t { String, Integer, Decimal, Date, Year, Coordinate, Unknown };

std::string_view datatypeName(Datatype d);
/// Unrecognized names map to Datatype::Unknown.
Datatype datatypeFromName(std::string_view name);

struct DataValue {
  std::string lexical;
  Datatype datatype = Datatype::String;

  auto operator<=>(const DataValue&) const = default;
};

using Value = std::variant<EntityId, DataValue>;

inline bool isEntity(const Value& v) { return std::holds_alternative<EntityId>(v); }
inline const EntityId* asEntity(const Value& v) { return std::get_if<EntityId>(&v); }
inline const DataValue* asData(const Value& v) { return std::get_if<DataValue>(&v); }
std::string valueStr(const Value& v);

struct Qualifier {
  EntityId property;
  Value value;

  auto operator<=>(const Qualifier&) const = default;
};

/// One element of the statement relation: subject, property, value and a
/// finite set of qualifier pairs. Qualifiers are kept sorted and unique so
/// that equality is set equality.
class Statement {
public:
  Statement() = default;
  Statement(EntityId subject, EntityId property, Value value, std::vector<Qualifier> qualifiers = {});

  const EntityId& subject() const { return subject_; }
  const EntityId& property() const { return property_; }
  const Value& value() const { return value_; }
  std::span<const Qualifier> qualifiers() const { return qualifiers_; }

  /// Same subject/property/value with a different qualifier set.
  Statement withQualifiers(std::vector<Qualifier> qualifiers) const;
  bool hasQualifier(const EntityId& property, const Value& value) const;

  std::string str() const;

  auto operator<=>(const Statement&) const = default;

private:
  EntityId subject_;
  EntityId property_;
  Value value_;
  std::vector<Qualifier> qualifiers_;
};

struct InducedSets {
  std::set<EntityId> items;
  std::set<EntityId> properties;
  std::set<DataValue> dataValues;

  bool operator==(const InducedSets&) const = default;
};

InducedSets inducedSets(std::span<const Statement> statements);

/// Immutable after construction. Statements are stored sorted by
/// (subject, property, value, qualifiers) with exact duplicates removed, so
/// each subject's neighbourhood is a contiguous range.
class WikibaseGraph {
public:
  WikibaseGraph() = default;
  explicit WikibaseGraph(std::vector<Statement> statements);

  std::span<const Statement> statements() const { return statements_; }
  std::size_t size() const { return statements_.size(); }
  bool empty() const { return statements_.empty(); }

  const std::set<EntityId>& items() const { return induced_.items; }
  const std::set<EntityId>& properties() const { return induced_.properties; }
  const std::set<DataValue>& dataValues() const { return induced_.dataValues; }
  const InducedSets& induced() const { return induced_; }

  /// Entities occurring as a subject, an entity value or an entity qualifier
  /// value. These are the vertices that shape assignments range over.
  const std::vector<EntityId>& nodes() const { return nodes_; }

  /// Statements whose subject is n; empty when n does not occur.
  std::span<const Statement> neighs(const EntityId& n) const;
  bool contains(const Statement& s) const;

private:
  std::vector<Statement> statements_;
  InducedSets induced_;
  std::vector<EntityId> nodes_;
};

std::vector<Statement> neighs(const EntityId& n, const WikibaseGraph& g);
bool isSubgraph(const WikibaseGraph& sub, const WikibaseGraph& super);

}  // namespace wsub

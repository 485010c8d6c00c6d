#include "wsub/wgraph.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace wsub {

EntityId EntityId::item(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("entity number must be positive");
  return {EntityKind::Item, n};
}

EntityId EntityId::property(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("entity number must be positive");
  return {EntityKind::Property, n};
}

bool EntityId::tryParse(std::string_view text, EntityId& out) {
  if (text.size() < 2) return false;
  EntityKind kind;
  if (text[0] == 'Q')
    kind = EntityKind::Item;
  else if (text[0] == 'P')
    kind = EntityKind::Property;
  else
    return false;
  std::uint64_t n = 0;
  const char* first = text.data() + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  if (ec != std::errc() || ptr != last || n == 0) return false;
  out = {kind, n};
  return true;
}

EntityId EntityId::parse(std::string_view text) {
  EntityId id;
  if (!tryParse(text, id)) throw std::invalid_argument("not an entity id: " + std::string(text));
  return id;
}

std::string EntityId::str() const { return (kind == EntityKind::Item ? "Q" : "P") + std::to_string(num); }

std::string_view datatypeName(Datatype d) {
  switch (d) {
    case Datatype::String: return "string";
    case Datatype::Integer: return "integer";
    case Datatype::Decimal: return "decimal";
    case Datatype::Date: return "date";
    case Datatype::Year: return "year";
    case Datatype::Coordinate: return "coordinate";
    case Datatype::Unknown: return "unknown";
  }
  return "unknown";
}

Datatype datatypeFromName(std::string_view name) {
  if (name == "string") return Datatype::String;
  if (name == "integer") return Datatype::Integer;
  if (name == "decimal") return Datatype::Decimal;
  if (name == "date") return Datatype::Date;
  if (name == "year") return Datatype::Year;
  if (name == "coordinate") return Datatype::Coordinate;
  return Datatype::Unknown;
}

std::string valueStr(const Value& v) {
  if (auto e = asEntity(v)) return e->str();
  const auto& d = std::get<DataValue>(v);
  return d.lexical + "^^" + std::string(datatypeName(d.datatype));
}

Statement::Statement(EntityId subject, EntityId property, Value value, std::vector<Qualifier> qualifiers)
    : subject_(subject), property_(property), value_(std::move(value)), qualifiers_(std::move(qualifiers)) {
  if (!property_.isProperty()) throw std::invalid_argument("statement property must be a property id");
  for (const auto& q : qualifiers_)
    if (!q.property.isProperty()) throw std::invalid_argument("qualifier property must be a property id");
  std::sort(qualifiers_.begin(), qualifiers_.end());
  qualifiers_.erase(std::unique(qualifiers_.begin(), qualifiers_.end()), qualifiers_.end());
}

Statement Statement::withQualifiers(std::vector<Qualifier> qualifiers) const {
  return Statement(subject_, property_, value_, std::move(qualifiers));
}

bool Statement::hasQualifier(const EntityId& property, const Value& value) const {
  Qualifier q{property, value};
  return std::binary_search(qualifiers_.begin(), qualifiers_.end(), q);
}

std::string Statement::str() const {
  std::string out = "(" + subject_.str() + ", " + property_.str() + ", " + valueStr(value_) + ", {";
  for (std::size_t i = 0; i < qualifiers_.size(); ++i) {
    if (i) out += ", ";
    out += qualifiers_[i].property.str() + ":" + valueStr(qualifiers_[i].value);
  }
  return out + "})";
}

namespace {

void addValue(InducedSets& out, const Value& v) {
  if (auto e = asEntity(v)) {
    (e->isItem() ? out.items : out.properties).insert(*e);
  } else {
    out.dataValues.insert(std::get<DataValue>(v));
  }
}

}  // namespace

InducedSets inducedSets(std::span<const Statement> statements) {
  InducedSets out;
  for (const auto& s : statements) {
    addValue(out, Value{s.subject()});
    out.properties.insert(s.property());
    addValue(out, s.value());
    for (const auto& q : s.qualifiers()) {
      out.properties.insert(q.property);
      addValue(out, q.value);
    }
  }
  return out;
}

WikibaseGraph::WikibaseGraph(std::vector<Statement> statements) : statements_(std::move(statements)) {
  std::sort(statements_.begin(), statements_.end());
  statements_.erase(std::unique(statements_.begin(), statements_.end()), statements_.end());
  induced_ = inducedSets(statements_);

  std::set<EntityId> nodes;
  for (const auto& s : statements_) {
    nodes.insert(s.subject());
    if (auto e = asEntity(s.value())) nodes.insert(*e);
    for (const auto& q : s.qualifiers())
      if (auto e = asEntity(q.value)) nodes.insert(*e);
  }
  nodes_.assign(nodes.begin(), nodes.end());
}

std::span<const Statement> WikibaseGraph::neighs(const EntityId& n) const {
  auto lo = std::lower_bound(statements_.begin(), statements_.end(), n,
                             [](const Statement& s, const EntityId& id) { return s.subject() < id; });
  auto hi = std::upper_bound(lo, statements_.end(), n,
                             [](const EntityId& id, const Statement& s) { return id < s.subject(); });
  return {lo, hi};
}

bool WikibaseGraph::contains(const Statement& s) const {
  return std::binary_search(statements_.begin(), statements_.end(), s);
}

std::vector<Statement> neighs(const EntityId& n, const WikibaseGraph& g) {
  auto span = g.neighs(n);
  return {span.begin(), span.end()};
}

bool isSubgraph(const WikibaseGraph& sub, const WikibaseGraph& super) {
  return std::includes(super.statements().begin(), super.statements().end(), sub.statements().begin(),
                       sub.statements().end());
}

}  // namespace wsub

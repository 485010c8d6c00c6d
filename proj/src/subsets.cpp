#include "wsub/subsets.hpp"

#include <algorithm>
#include <cctype>

namespace wsub {

namespace {

EntityId requireProperty(const EntityId& p) {
  if (!p.isProperty()) throw std::invalid_argument("expected a property id, got " + p.str());
  return p;
}

template <class Pred>
WikibaseGraph filterGraph(const WikibaseGraph& g, Pred pred) {
  std::vector<Statement> out;
  for (const auto& s : g.statements())
    if (pred(s)) out.push_back(s);
  return WikibaseGraph(std::move(out));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Value in matcher-file syntax.
std::string literal(const Value& v) {
  if (auto e = asEntity(v)) return e->str();
  const auto& d = *asData(v);
  std::string out = "\"";
  for (char c : d.lexical) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"^^" + std::string(datatypeName(d.datatype));
}

}  // namespace

Matcher Matcher::propertyIs(EntityId p) { return {Kind::PropertyIs, requireProperty(p), {}}; }
Matcher Matcher::qualifierIs(EntityId p, Value v) { return {Kind::QualifierIs, requireProperty(p), std::move(v)}; }
Matcher Matcher::qualifiedPropIs(EntityId p) { return {Kind::QualifiedPropIs, requireProperty(p), {}}; }

std::string Matcher::str() const {
  switch (kind) {
    case Kind::SubjectIs: return "subject(" + entity.str() + ")";
    case Kind::PropertyIs: return "property(" + entity.str() + ")";
    case Kind::ValueIs: return "value(" + literal(value) + ")";
    case Kind::QualifierIs: return "qualifier(" + entity.str() + "," + literal(value) + ")";
    case Kind::QualifiedPropIs: return "qualifiedProp(" + entity.str() + ")";
    case Kind::QualifiedValueIs: return "qualifiedValue(" + literal(value) + ")";
  }
  return "?";
}

bool matchStatement(const Matcher& m, const Statement& s) {
  auto qs = s.qualifiers();
  switch (m.kind) {
    case Matcher::Kind::SubjectIs: return s.subject() == m.entity;
    case Matcher::Kind::PropertyIs: return s.property() == m.entity;
    case Matcher::Kind::ValueIs: return s.value() == m.value;
    case Matcher::Kind::QualifierIs: return s.hasQualifier(m.entity, m.value);
    case Matcher::Kind::QualifiedPropIs:
      return std::any_of(qs.begin(), qs.end(), [&](const Qualifier& q) { return q.property == m.entity; });
    case Matcher::Kind::QualifiedValueIs:
      return std::any_of(qs.begin(), qs.end(), [&](const Qualifier& q) { return q.value == m.value; });
  }
  return false;
}

bool matchAny(const MatchExpression& ms, const Statement& s) {
  return std::any_of(ms.begin(), ms.end(), [&](const Matcher& m) { return matchStatement(m, s); });
}

WikibaseGraph matchingSubgraph(const WikibaseGraph& g, const MatchExpression& ms) {
  return filterGraph(g, [&](const Statement& s) { return matchAny(ms, s); });
}

WikibaseGraph itemSubgraph(const WikibaseGraph& g, const std::set<EntityId>& qs) {
  for (const auto& q : qs)
    if (!q.isItem()) throw std::invalid_argument("expected an item id, got " + q.str());
  return filterGraph(g, EntityFilter(qs));
}

WikibaseGraph propertySubgraph(const WikibaseGraph& g, const std::set<EntityId>& ps) {
  for (const auto& p : ps) requireProperty(p);
  return filterGraph(g, EntityFilter(ps));
}

WikibaseGraph entitySubgraph(const WikibaseGraph& g, const std::set<EntityId>& es) {
  return filterGraph(g, EntityFilter(es));
}

EntityFilter::EntityFilter(const std::set<EntityId>& es) {
  for (const auto& e : es) (e.isItem() ? items_ : props_).insert(e);
}

bool EntityFilter::operator()(const Statement& s) const {
  if (items_.count(s.subject())) return true;
  if (auto v = asEntity(s.value()); v && items_.count(*v)) return true;
  if (props_.count(s.property())) return true;
  for (const auto& q : s.qualifiers()) {
    if (props_.count(q.property)) return true;
    if (auto v = asEntity(q.value); v && items_.count(*v)) return true;
  }
  return false;
}

MatcherParseError::MatcherParseError(const std::string& msg, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

// Splits "a, "b,c"" at top-level commas.
std::vector<std::string_view> splitArgs(std::string_view s, std::size_t line) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && quoted) {
      ++i;
    } else if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == ',' && !quoted) {
      out.push_back(trim(s.substr(begin, i - begin)));
      begin = i + 1;
    }
  }
  if (quoted) throw MatcherParseError("unterminated string", line);
  out.push_back(trim(s.substr(begin)));
  return out;
}

Value parseValue(std::string_view a, Datatype literal, std::size_t line) {
  if (a.empty()) throw MatcherParseError("empty argument", line);
  EntityId e;
  if (EntityId::tryParse(a, e)) return e;
  if (a.front() == '"') {
    std::string text;
    std::size_t i = 1;
    for (; i < a.size() && a[i] != '"'; ++i) {
      if (a[i] == '\\' && i + 1 < a.size()) ++i;
      text += a[i];
    }
    if (i >= a.size()) throw MatcherParseError("unterminated string", line);
    auto rest = a.substr(i + 1);
    if (rest.empty()) return DataValue{text, Datatype::String};
    if (rest.substr(0, 2) != "^^") throw MatcherParseError("unexpected text after string", line);
    auto dt = datatypeFromName(rest.substr(2));
    if (dt == Datatype::Unknown && rest.substr(2) != "unknown")
      throw MatcherParseError("unknown datatype " + std::string(rest.substr(2)), line);
    return DataValue{text, dt};
  }
  bool digits = true, point = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char c = a[i];
    if (c == '.' && !point) point = true;
    else if (c == '-' && i == 0 && a.size() > 1) continue;
    else if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
  }
  if (!digits) throw MatcherParseError("cannot parse value '" + std::string(a) + "'", line);
  return DataValue{std::string(a), point ? Datatype::Decimal : literal};
}

EntityId parseEntity(std::string_view a, std::size_t line) {
  EntityId e;
  if (!EntityId::tryParse(a, e)) throw MatcherParseError("expected an entity id, got '" + std::string(a) + "'", line);
  return e;
}

EntityId parseProperty(std::string_view a, std::size_t line) {
  EntityId p = parseEntity(a, line);
  if (!p.isProperty()) throw MatcherParseError("expected a property id, got " + p.str(), line);
  return p;
}

}  // namespace

MatchExpression parseMatchers(std::string_view text, Datatype literal) {
  MatchExpression out;
  std::size_t lineNo = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineNo;

    // Strip a comment that is not inside a string.
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '\\' && quoted) {
        ++i;
        continue;
      }
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) {
        raw = raw.substr(0, i);
        break;
      }
    }
    auto line = trim(raw);
    if (line.empty()) continue;

    auto open = line.find('(');
    if (open == std::string_view::npos || line.back() != ')') throw MatcherParseError("expected name(args)", lineNo);
    auto name = trim(line.substr(0, open));
    auto args = splitArgs(line.substr(open + 1, line.size() - open - 2), lineNo);
    auto want = [&](std::size_t n) {
      if (args.size() != n)
        throw MatcherParseError(std::string(name) + " takes " + std::to_string(n) + " argument(s)", lineNo);
    };

    if (name == "subject") {
      want(1);
      out.insert(Matcher::subjectIs(parseEntity(args[0], lineNo)));
    } else if (name == "property") {
      want(1);
      out.insert(Matcher::propertyIs(parseProperty(args[0], lineNo)));
    } else if (name == "value") {
      want(1);
      out.insert(Matcher::valueIs(parseValue(args[0], literal, lineNo)));
    } else if (name == "qualifier") {
      want(2);
      out.insert(Matcher::qualifierIs(parseProperty(args[0], lineNo), parseValue(args[1], literal, lineNo)));
    } else if (name == "qualifiedProp") {
      want(1);
      out.insert(Matcher::qualifiedPropIs(parseProperty(args[0], lineNo)));
    } else if (name == "qualifiedValue") {
      want(1);
      out.insert(Matcher::qualifiedValueIs(parseValue(args[0], literal, lineNo)));
    } else {
      throw MatcherParseError("unknown matcher '" + std::string(name) + "'", lineNo);
    }
  }
  return out;
}

std::set<EntityId> parseIdList(std::string_view text) {
  std::set<EntityId> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto part = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (!part.empty()) out.insert(EntityId::parse(part));
  }
  return out;
}

}  // namespace wsub

#include "wsub/dumpio.hpp"

#include <zlib.h>

#include <algorithm>
#include <map>
#include <json.hpp>
#include <sstream>
#include <streambuf>

namespace wsub {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

DumpFormat dumpFormatFromName(std::string_view name) {
  if (name == "wbjl") return DumpFormat::Wbjl;
  if (name == "wikidata-json") return DumpFormat::WikidataJson;
  throw std::invalid_argument("unknown dump format '" + std::string(name) + "'");
}

DumpError::DumpError(const std::string& msg, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}

// Streambuf inflating gzip members read from another stream.
class DumpReader::Inflater : public std::streambuf {
public:
  explicit Inflater(std::istream& src) : src_(src), in_(1 << 16), out_(1 << 16) {
    z_ = {};
    if (inflateInit2(&z_, 15 + 16) != Z_OK) throw std::runtime_error("zlib init failed");
    setg(out_.data(), out_.data(), out_.data());
  }
  ~Inflater() override { inflateEnd(&z_); }

  std::istream stream{this};

protected:
  int_type underflow() override {
    if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
    while (true) {
      if (z_.avail_in == 0 && !pending_) {
        src_.read(in_.data(), static_cast<std::streamsize>(in_.size()));
        auto n = src_.gcount();
        if (n <= 0) return traits_type::eof();
        z_.next_in = reinterpret_cast<Bytef*>(in_.data());
        z_.avail_in = static_cast<uInt>(n);
      }
      z_.next_out = reinterpret_cast<Bytef*>(out_.data());
      z_.avail_out = static_cast<uInt>(out_.size());
      int rc = inflate(&z_, Z_NO_FLUSH);
      pending_ = z_.avail_out == 0;  // more output may be buffered inside zlib
      if (rc == Z_STREAM_END) {
        // Concatenated members continue with a fresh header.
        inflateReset(&z_);
      } else if (rc != Z_OK && rc != Z_BUF_ERROR) {
        throw std::runtime_error(std::string("gzip: ") + (z_.msg ? z_.msg : "corrupt input"));
      }
      std::size_t produced = out_.size() - z_.avail_out;
      if (produced > 0) {
        setg(out_.data(), out_.data(), out_.data() + produced);
        return traits_type::to_int_type(*gptr());
      }
    }
  }

private:
  std::istream& src_;
  std::vector<char> in_, out_;
  z_stream z_;
  bool pending_ = false;
};

namespace {

EntityId propertyKey(const std::string& key) {
  EntityId p = EntityId::parse(key);
  if (!p.isProperty()) throw std::invalid_argument("claim key " + key + " is not a property id");
  return p;
}

Value readWbjlValue(const json& v) {
  if (auto it = v.find("entity"); it != v.end()) return EntityId::parse(it->get<std::string>());
  DataValue d;
  d.lexical = v.at("literal").get<std::string>();
  d.datatype = v.contains("datatype") ? datatypeFromName(v.at("datatype").get<std::string>()) : Datatype::String;
  return d;
}

void readWbjl(const json& j, EntityDocument& doc) {
  auto claims = j.find("claims");
  if (claims == j.end()) return;
  if (!claims->is_object()) throw std::invalid_argument("claims must be an object");
  for (const auto& [pid, arr] : claims->items()) {
    EntityId p = propertyKey(pid);
    for (const auto& st : arr) {
      std::vector<Qualifier> qs;
      if (auto q = st.find("qualifiers"); q != st.end())
        for (const auto& [qpid, qarr] : q->items()) {
          EntityId qp = propertyKey(qpid);
          for (const auto& qv : qarr) qs.push_back({qp, readWbjlValue(qv)});
        }
      doc.statements.emplace_back(doc.id, p, readWbjlValue(st.at("value")), std::move(qs));
    }
  }
}

std::string stripPlus(std::string s) {
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  return s;
}

// Maps a Wikidata snak to a value; false for somevalue/novalue snaks.
bool readWikidataSnak(const json& snak, Value& out) {
  if (snak.value("snaktype", "value") != "value") return false;
  auto dv = snak.find("datavalue");
  if (dv == snak.end()) return false;
  const std::string type = dv->value("type", "");
  const json& v = dv->at("value");
  if (type == "wikibase-entityid") {
    EntityId e;
    std::string id = v.value("id", "");
    if (id.empty() && v.contains("numeric-id")) {
      std::string et = v.value("entity-type", "item");
      id = (et == "property" ? "P" : et == "item" ? "Q" : "?") + std::to_string(v.at("numeric-id").get<long long>());
    }
    if (EntityId::tryParse(id, e)) {
      out = e;
      return true;
    }
    out = DataValue{id, Datatype::Unknown};  // lexemes, forms and senses
    return true;
  }
  if (type == "string") {
    out = DataValue{v.get<std::string>(), Datatype::String};
    return true;
  }
  if (type == "monolingualtext") {
    out = DataValue{v.value("text", ""), Datatype::String};
    return true;
  }
  if (type == "time") {
    // "+1955-06-08T00:00:00Z"; precision 9 is a year, 10 a month, 11+ a day.
    std::string t = v.value("time", "");
    int precision = v.value("precision", 11);
    bool negative = !t.empty() && t.front() == '-';
    if (!t.empty() && (t.front() == '+' || t.front() == '-')) t.erase(0, 1);
    auto dash = t.find('-');
    std::string yearPart = t.substr(0, dash);
    yearPart.erase(0, std::min(yearPart.find_first_not_of('0'), yearPart.size() - 1));
    if (negative) yearPart = "-" + yearPart;
    if (precision <= 9 || dash == std::string::npos) {
      out = DataValue{yearPart, Datatype::Year};
    } else {
      std::string rest = t.substr(dash, precision == 10 ? 3 : 6);
      out = DataValue{yearPart + rest, Datatype::Date};
    }
    return true;
  }
  if (type == "quantity") {
    std::string amount = stripPlus(v.value("amount", ""));
    out = DataValue{amount, amount.find('.') == std::string::npos ? Datatype::Integer : Datatype::Decimal};
    return true;
  }
  if (type == "globecoordinate") {
    std::ostringstream ss;
    ss << v.value("latitude", 0.0) << "," << v.value("longitude", 0.0);
    out = DataValue{ss.str(), Datatype::Coordinate};
    return true;
  }
  out = DataValue{v.dump(), Datatype::Unknown};
  return true;
}

void readWikidata(const json& j, EntityDocument& doc) {
  auto claims = j.find("claims");
  if (claims == j.end() || !claims->is_object()) return;
  for (const auto& [pid, arr] : claims->items()) {
    EntityId p = propertyKey(pid);
    for (const auto& st : arr) {
      Value v;
      if (!st.contains("mainsnak") || !readWikidataSnak(st.at("mainsnak"), v)) continue;
      std::vector<Qualifier> qs;
      if (auto q = st.find("qualifiers"); q != st.end() && q->is_object())
        for (const auto& [qpid, qarr] : q->items()) {
          EntityId qp = propertyKey(qpid);
          for (const auto& snak : qarr) {
            Value qv;
            if (readWikidataSnak(snak, qv)) qs.push_back({qp, std::move(qv)});
          }
        }
      doc.statements.emplace_back(doc.id, p, std::move(v), std::move(qs));
    }
  }
}

std::string_view trimLine(std::string_view s) {
  auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

bool parseDocumentLine(std::string_view raw, DumpFormat format, EntityDocument& out, std::size_t lineNo) {
  auto line = trimLine(raw);
  if (!line.empty() && line.back() == ',') line.remove_suffix(1);
  line = trimLine(line);
  if (line.empty() || line == "[" || line == "]") return false;

  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DumpError(std::string("invalid JSON: ") + e.what(), lineNo);
  }
  if (!j.is_object()) throw DumpError("expected a JSON object", lineNo);

  try {
    std::string type = j.value("type", "");
    if (format == DumpFormat::WikidataJson && type != "item" && type != "property") return false;
    EntityDocument doc;
    doc.id = EntityId::parse(j.at("id").get<std::string>());
    if (!type.empty() && type != doc.entityType())
      throw DumpError("type '" + type + "' does not match id " + doc.id.str(), lineNo);
    if (format == DumpFormat::Wbjl)
      readWbjl(j, doc);
    else
      readWikidata(j, doc);
    out = std::move(doc);
    return true;
  } catch (const DumpError&) {
    throw;
  } catch (const std::exception& e) {
    throw DumpError(e.what(), lineNo);
  }
}

DumpReader::DumpReader(std::istream& in, ReadOptions opts) : stream_(&in), opts_(opts) {
  int c0 = in.peek();
  if (c0 == 0x1f) {
    in.get();
    int c1 = in.peek();
    in.unget();
    if (c1 == 0x8b) {
      inflater_ = std::make_unique<Inflater>(in);
      stream_ = &inflater_->stream;
    }
  }
}

DumpReader::~DumpReader() = default;

bool DumpReader::next(EntityDocument& doc) {
  while (std::getline(*stream_, buf_)) {
    ++line_;
    try {
      if (!parseDocumentLine(buf_, opts_.format, doc, line_)) continue;
    } catch (const DumpError& e) {
      if (opts_.policy == ErrorPolicy::FailFast) throw;
      ++errors_;
      if (samples_.size() < 10) samples_.push_back(e.what());
      continue;
    }
    ++documents_;
    return true;
  }
  return false;
}

std::vector<EntityDocument> readDump(std::istream& in, ReadOptions opts) {
  DumpReader r(in, opts);
  std::vector<EntityDocument> out;
  EntityDocument d;
  while (r.next(d)) out.push_back(std::move(d));
  return out;
}

std::vector<EntityDocument> readDumpString(std::string_view text, ReadOptions opts) {
  std::istringstream in{std::string(text)};
  return readDump(in, opts);
}

namespace {

ojson valueJson(const Value& v) {
  ojson o = ojson::object();
  if (auto e = asEntity(v)) {
    o["entity"] = e->str();
  } else {
    const auto& d = *asData(v);
    o["literal"] = d.lexical;
    o["datatype"] = std::string(datatypeName(d.datatype));
  }
  return o;
}

}  // namespace

std::string documentLine(const EntityDocument& doc) {
  std::vector<const Statement*> sorted;
  for (const auto& s : doc.statements) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const Statement* a, const Statement* b) {
    if (a->property() != b->property()) return a->property() < b->property();
    return *a < *b;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a == *b; }), sorted.end());

  ojson claims = ojson::object();
  for (const Statement* s : sorted) {
    ojson st = ojson::object();
    st["value"] = valueJson(s->value());
    if (!s->qualifiers().empty()) {
      ojson qs = ojson::object();
      for (const auto& q : s->qualifiers()) {  // already sorted by property
        auto& arr = qs[q.property.str()];
        if (arr.is_null()) arr = ojson::array();
        arr.push_back(valueJson(q.value));
      }
      st["qualifiers"] = std::move(qs);
    }
    auto& arr = claims[s->property().str()];
    if (arr.is_null()) arr = ojson::array();
    arr.push_back(std::move(st));
  }

  ojson o = ojson::object();
  o["type"] = std::string(doc.entityType());
  o["id"] = doc.id.str();
  o["claims"] = std::move(claims);
  return o.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

void writeDocument(std::ostream& out, const EntityDocument& doc) { out << documentLine(doc) << '\n'; }

void writeDump(std::ostream& out, const std::vector<EntityDocument>& docs) {
  for (const auto& d : docs) writeDocument(out, d);
}

std::string writeDumpString(const std::vector<EntityDocument>& docs) {
  std::ostringstream ss;
  writeDump(ss, docs);
  return ss.str();
}

StreamStats filterDump(DumpReader& in, std::ostream& out, const std::function<bool(const Statement&)>& keep) {
  StreamStats st;
  EntityDocument doc;
  while (in.next(doc)) {
    ++st.entitiesRead;
    std::erase_if(doc.statements, [&](const Statement& s) { return !keep(s); });
    if (doc.statements.empty()) continue;
    ++st.entitiesMatched;
    st.statementsEmitted += doc.statements.size();
    writeDocument(out, doc);
  }
  return st;
}

WikibaseGraph graphFromDocs(const std::vector<EntityDocument>& docs, std::size_t* duplicates) {
  std::vector<Statement> all;
  std::set<EntityId> seen;
  std::size_t dup = 0;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) ++dup;
    for (const auto& s : d.statements) {
      if (s.subject() != d.id) throw std::invalid_argument("statement subject differs from document id " + d.id.str());
      all.push_back(s);
    }
  }
  if (duplicates) *duplicates = dup;
  return WikibaseGraph(std::move(all));
}

std::vector<EntityDocument> docsFromGraph(const WikibaseGraph& g) {
  std::vector<EntityDocument> out;
  for (const auto& s : g.statements()) {
    if (out.empty() || out.back().id != s.subject()) out.push_back({s.subject(), {}});
    out.back().statements.push_back(s);
  }
  return out;
}

}  // namespace wsub

#include "wsub/wshex_parser.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

namespace wsub {

std::vector<Datatype> xsdAccepted(std::string_view local) {
  if (local == "date") return {Datatype::Date, Datatype::Year};
  if (local == "dateTime") return {Datatype::Date};
  if (local == "gYear") return {Datatype::Year};
  if (local == "string") return {Datatype::String};
  if (local == "integer") return {Datatype::Integer};
  if (local == "decimal") return {Datatype::Decimal};
  return {};
}

namespace {

constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

enum class Tok { End, Iri, Name, Number, String, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 0, col = 0;
  std::size_t begin = 0, end = 0;  // byte offsets, for adjacency of {{ }} [[ ]]
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skipSpace();
      Token t;
      t.line = line_;
      t.col = col_;
      t.begin = pos_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        t.end = pos_;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (c == '<') {
        advance();
        std::string iri;
        while (pos_ < src_.size() && src_[pos_] != '>') {
          if (src_[pos_] == '\n') fail("unterminated IRI", t);
          iri += src_[pos_];
          advance();
        }
        if (pos_ >= src_.size()) fail("unterminated IRI", t);
        advance();
        t.kind = Tok::Iri;
        t.text = iri;
      } else if (c == '"') {
        advance();
        std::string s;
        while (true) {
          if (pos_ >= src_.size() || src_[pos_] == '\n') fail("unterminated string", t);
          char d = src_[pos_];
          advance();
          if (d == '"') break;
          if (d == '\\') {
            if (pos_ >= src_.size()) fail("unterminated string", t);
            char e = src_[pos_];
            advance();
            switch (e) {
              case 'n': s += '\n'; break;
              case 't': s += '\t'; break;
              case 'r': s += '\r'; break;
              default: s += e; break;
            }
          } else {
            s += d;
          }
        }
        t.kind = Tok::String;
        t.text = s;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '-' || c == '+') && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::string num(1, c);
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          num += src_[pos_];
          advance();
        }
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
          num += '.';
          advance();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            num += src_[pos_];
            advance();
          }
        }
        t.kind = Tok::Number;
        t.text = num;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':') {
        std::string name;
        while (pos_ < src_.size()) {
          char d = src_[pos_];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '-' || d == ':') {
            name += d;
            advance();
          } else {
            break;
          }
        }
        t.kind = Tok::Name;
        t.text = name;
      } else if (c == '^' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '^') {
        advance();
        advance();
        t.kind = Tok::Punct;
        t.text = "^^";
      } else if (std::string_view("{}[]();|,*+?.@=").find(c) != std::string_view::npos) {
        advance();
        t.kind = Tok::Punct;
        t.text = std::string(1, c);
      } else {
        fail(std::string("unexpected character '") + c + "'", t);
      }
      t.end = pos_;
      out.push_back(std::move(t));
    }
  }

private:
  [[noreturn]] void fail(const std::string& msg, const Token& t) { throw SchemaError(msg, t.line, t.col); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skipSpace() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

bool trailingId(std::string_view s, EntityId& out) {
  std::size_t i = s.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
  if (i == 0 || i == s.size()) return false;
  char k = s[i - 1];
  if (k != 'P' && k != 'Q') return false;
  if (i >= 2 && std::isalnum(static_cast<unsigned char>(s[i - 2]))) return false;
  return EntityId::tryParse(s.substr(i - 1), out);
}

class Parser {
public:
  Parser(std::vector<Token> toks, const ParseOptions& opts) : toks_(std::move(toks)), opts_(opts) {}

  WShExSchema run() {
    while (!at(Tok::End)) {
      if (isWord("prefix") && peek(1).kind == Tok::Name && endsWithColon(peek(1).text)) {
        next();
        std::string p = next().text;
        p.pop_back();
        const Token& iri = expect(Tok::Iri, "prefix IRI");
        schema_.setPrefix(p, iri.text);
      } else if (isWord("start") && peekPunct(1, "=")) {
        const Token& kw = next();
        next();
        if (startSeen_) throw SchemaError("duplicate start declaration", kw.line, kw.col);
        startSeen_ = true;
        expectPunct("@");
        start_ = labelRef(true);
      } else {
        declaration();
      }
    }
    for (const auto& [id, tok] : firstUse_)
      if (!declared_[id]) throw SchemaError("undefined shape label " + schema_.name(id), tok.line, tok.col);
    if (start_) schema_.setStart(*start_);
    schema_.finalize();
    return std::move(schema_);
  }

private:
  // --- token helpers

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool atPunct(std::string_view p) const { return peekPunct(0, p); }
  bool peekPunct(std::size_t k, std::string_view p) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }
  bool isWord(std::string_view w) const {
    if (!at(Tok::Name)) return false;
    const auto& t = peek().text;
    if (t.size() != w.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(t[i])) != w[i]) return false;
    return true;
  }
  bool isKeyword(std::string_view w) const { return at(Tok::Name) && peek().text == w; }
  // Two adjacent punctuation tokens, e.g. "{{".
  bool atDouble(std::string_view p) const {
    return peekPunct(0, p) && peekPunct(1, p) && peek(1).begin == peek(0).end;
  }
  static bool endsWithColon(const std::string& s) { return !s.empty() && s.back() == ':'; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw SchemaError(msg, t.line, t.col); }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }

  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return next();
  }
  void expectPunct(std::string_view p) {
    if (!atPunct(p)) fail("expected '" + std::string(p) + "'");
    next();
  }
  void expectDouble(std::string_view p) {
    if (!atDouble(p)) fail("expected '" + std::string(p) + std::string(p) + "'");
    next();
    next();
  }

  // --- names

  // Expands prefix:local. An undeclared empty prefix yields just the local
  // name; other undeclared prefixes keep the text as written.
  std::string expand(const std::string& pname) const {
    auto c = pname.find(':');
    if (c == std::string::npos) return pname;
    std::string prefix = pname.substr(0, c);
    std::string local = pname.substr(c + 1);
    auto it = schema_.prefixes().find(prefix);
    if (it != schema_.prefixes().end()) return it->second + local;
    if (prefix == "xsd") return std::string(kXsd) + local;
    if (prefix.empty()) return local;
    return pname;
  }

  bool resolveEntity(const Token& t, EntityId& out) const {
    std::vector<std::string> keys{t.text};
    if (t.kind == Tok::Name) {
      auto c = t.text.find(':');
      if (c != std::string::npos) keys.push_back(t.text.substr(c + 1));
      keys.push_back(expand(t.text));
    }
    for (const auto& k : keys) {
      auto it = opts_.aliases.find(k);
      if (it != opts_.aliases.end()) {
        out = it->second;
        return true;
      }
    }
    if (t.kind == Tok::Name && t.text.find(':') == std::string::npos) return EntityId::tryParse(t.text, out);
    std::string full = t.kind == Tok::Name ? expand(t.text) : t.text;
    return trailingId(full, out);
  }

  EntityId property() {
    const Token& t = peek();
    if (t.kind != Tok::Name && t.kind != Tok::Iri) fail("expected a property");
    next();
    EntityId id;
    if (!resolveEntity(t, id)) fail("cannot resolve property '" + t.text + "'", t);
    if (!id.isProperty()) fail("'" + t.text + "' is not a property", t);
    return id;
  }

  LabelId labelRef(bool isUse) {
    const Token& t = peek();
    std::string name;
    if (t.kind == Tok::Iri)
      name = t.text;
    else if (t.kind == Tok::Name && t.text.find(':') != std::string::npos)
      name = expand(t.text);
    else
      fail("expected a shape label");
    next();
    auto id = schema_.find(name);
    if (!id) {
      id = schema_.addLabel(name);
      declared_.push_back(false);
    }
    if (isUse && !firstUse_.count(*id)) firstUse_[*id] = t;
    return *id;
  }

  // --- declarations

  void declaration() {
    const Token& t = peek();
    LabelId l = labelRef(false);
    if (declared_[l]) fail("duplicate shape label " + schema_.name(l), t);
    declared_[l] = true;
    schema_.define(l, shapeExpr());
  }

  ShapeExpr shapeExpr() {
    ShapeExpr se = shapeAtom();
    while (isKeyword("AND") || isKeyword("and")) {
      next();
      se = ShapeExpr::conj(std::move(se), shapeAtom());
    }
    return se;
  }

  ShapeExpr shapeAtom() {
    if (atPunct("@")) {
      next();
      return ShapeExpr::reference(labelRef(true));
    }
    if (atPunct("(")) {
      next();
      ShapeExpr se = shapeExpr();
      expectPunct(")");
      return se;
    }
    bool closed = false;
    if (isKeyword("CLOSED")) {
      next();
      closed = true;
      if (!atPunct("{")) fail("expected '{' after CLOSED");
    }
    if (atPunct("{")) {
      next();
      TripleExpr te = TripleExpr::empty();
      if (!atPunct("}")) te = tripleExpr();
      expectPunct("}");
      return ShapeExpr::shape(std::move(te), closed);
    }
    if (atPunct("[")) return ShapeExpr::condition(valueSet());
    if (atPunct(".")) {
      next();
      return ShapeExpr::condition(NodeConstraint::any());
    }
    if (at(Tok::Name) || at(Tok::Iri)) return ShapeExpr::condition(datatype());
    fail("expected a shape expression");
  }

  NodeConstraint datatype() {
    const Token& t = next();
    std::string full = t.kind == Tok::Name ? expand(t.text) : t.text;
    if (full.rfind(kXsd, 0) != 0) fail("unsupported node constraint '" + t.text + "'", t);
    auto acc = xsdAccepted(std::string_view(full).substr(kXsd.size()));
    if (acc.empty()) fail("unsupported datatype '" + t.text + "'", t);
    return NodeConstraint::datatype(t.text, std::move(acc));
  }

  NodeConstraint valueSet() {
    const Token& open = next();
    std::vector<Value> vals;
    while (!atPunct("]")) {
      if (at(Tok::End)) fail("unterminated value set", open);
      vals.push_back(value());
    }
    next();
    if (vals.empty()) fail("empty value set", open);
    return NodeConstraint::valueSet(std::move(vals));
  }

  Value value() {
    const Token& t = peek();
    if (t.kind == Tok::String) {
      next();
      if (atPunct("^^")) {
        next();
        const Token& dt = peek();
        if (dt.kind != Tok::Name && dt.kind != Tok::Iri) fail("expected a datatype after ^^");
        next();
        std::string full = dt.kind == Tok::Name ? expand(dt.text) : dt.text;
        Datatype d = Datatype::Unknown;
        if (full.rfind(kXsd, 0) == 0) {
          auto local = std::string_view(full).substr(kXsd.size());
          if (local == "date" || local == "dateTime") d = Datatype::Date;
          else if (local == "gYear") d = Datatype::Year;
          else if (local == "string") d = Datatype::String;
          else if (local == "integer") d = Datatype::Integer;
          else if (local == "decimal") d = Datatype::Decimal;
        }
        return DataValue{t.text, d};
      }
      if (atPunct("@")) {  // language tag, dropped
        next();
        expect(Tok::Name, "language tag");
      }
      return DataValue{t.text, Datatype::String};
    }
    if (t.kind == Tok::Number) {
      next();
      if (t.text.find('.') != std::string::npos) return DataValue{t.text, Datatype::Decimal};
      return DataValue{t.text, opts_.literalDatatype};
    }
    if (t.kind == Tok::Name || t.kind == Tok::Iri) {
      next();
      EntityId id;
      if (!resolveEntity(t, id)) fail("cannot resolve value '" + t.text + "'", t);
      return id;
    }
    fail("expected a value");
  }

  // --- triple expressions

  TripleExpr tripleExpr() {
    TripleExpr te = eachOf();
    while (atPunct("|")) {
      next();
      te = TripleExpr::oneOf(std::move(te), eachOf());
    }
    return te;
  }

  bool endsGroup() const { return atPunct("}") || atPunct(")") || atPunct("|"); }

  TripleExpr eachOf() {
    TripleExpr te = unaryTriple();
    while (atPunct(";")) {
      next();
      if (endsGroup()) break;
      te = TripleExpr::eachOf(std::move(te), unaryTriple());
    }
    return te;
  }

  TripleExpr unaryTriple() {
    if (atPunct("(")) {
      next();
      TripleExpr te = tripleExpr();
      expectPunct(")");
      if (auto c = cardinality()) te = desugar(te, *c);
      return te;
    }
    EntityId p = property();
    std::optional<LabelId> ref = valueExpr();
    auto card = cardinality();
    QualifierSpec qs;
    if (atDouble("{")) {
      next();
      next();
      qs.closed = false;
      if (!atPunct("}")) qs.spec = propertySpec();
      expectDouble("}");
    } else if (atDouble("[")) {
      next();
      next();
      qs.closed = true;
      if (!atPunct("]")) qs.spec = propertySpec();
      expectDouble("]");
    }
    if (!card) card = cardinality();
    TripleExpr te = TripleExpr::constraint(p, ref, std::move(qs));
    if (card) te = desugar(te, *card);
    return te;
  }

  std::optional<LabelId> valueExpr() {
    if (atPunct("@")) {
      next();
      return labelRef(true);
    }
    if (atPunct(".")) {
      next();
      return std::nullopt;
    }
    fail("expected '@<label>' or '.'");
  }

  std::optional<Cardinality> cardinality() {
    const Token& t = peek();
    if (atPunct("?")) return next(), Cardinality::optional();
    if (atPunct("*")) return next(), Cardinality::star();
    if (atPunct("+")) return next(), Cardinality::plus();
    if (atPunct("{") && peek(1).kind == Tok::Number) {
      next();
      Cardinality c;
      c.min = number();
      if (atPunct(",")) {
        next();
        if (atPunct("}"))
          c.max = std::nullopt;
        else
          c.max = number();
      } else {
        c.max = c.min;
      }
      expectPunct("}");
      if (!c.valid()) fail("invalid cardinality: max < min", t);
      return c;
    }
    return std::nullopt;
  }

  std::size_t number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail("expected a number");
    next();
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), n);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail("invalid cardinality bound", t);
    return n;
  }

  // --- qualifier specifiers

  PropertySpec propertySpec() {
    PropertySpec ps = psEachOf();
    while (atPunct("|")) {
      next();
      ps = PropertySpec::oneOf(std::move(ps), psEachOf());
    }
    return ps;
  }

  PropertySpec psEachOf() {
    PropertySpec ps = psUnary();
    while (atPunct(",")) {
      next();
      ps = PropertySpec::eachOf(std::move(ps), psUnary());
    }
    return ps;
  }

  PropertySpec psUnary() {
    if (atPunct("(")) {
      next();
      PropertySpec ps = propertySpec();
      expectPunct(")");
      if (auto c = cardinality()) ps = desugar(ps, *c);
      return ps;
    }
    EntityId p = property();
    std::optional<LabelId> ref = valueExpr();
    PropertySpec ps = PropertySpec::constraint(p, ref);
    if (auto c = cardinality()) ps = desugar(ps, *c);
    return ps;
  }

  std::vector<Token> toks_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  WShExSchema schema_;
  std::vector<bool> declared_;
  std::map<LabelId, Token> firstUse_;
  std::optional<LabelId> start_;
  bool startSeen_ = false;
};

}  // namespace

WShExSchema parseSchema(std::string_view text, const ParseOptions& options) {
  Lexer lex(text);
  Parser p(lex.run(), options);
  return p.run();
}

}  // namespace wsub

#include "wsub/wshex.hpp"

#include <algorithm>
#include <functional>

namespace wsub {

NodeConstraint NodeConstraint::any() { return {}; }

NodeConstraint NodeConstraint::valueSet(std::vector<Value> values) {
  if (values.empty()) throw SchemaError("empty value set");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  NodeConstraint c;
  c.kind = Kind::ValueSet;
  c.values = std::move(values);
  return c;
}

NodeConstraint NodeConstraint::datatype(std::string name, std::vector<Datatype> accepted) {
  NodeConstraint c;
  c.kind = Kind::DatatypeIs;
  c.datatypeName = std::move(name);
  c.accepted = std::move(accepted);
  return c;
}

bool NodeConstraint::test(const Value& v) const {
  switch (kind) {
    case Kind::AnyValue: return true;
    case Kind::ValueSet: return std::binary_search(values.begin(), values.end(), v);
    case Kind::DatatypeIs: {
      auto d = asData(v);
      return d && std::find(accepted.begin(), accepted.end(), d->datatype) != accepted.end();
    }
  }
  return false;
}

PropertySpec PropertySpec::constraint(EntityId p, std::optional<LabelId> ref) {
  PropertySpec ps;
  ps.kind = Kind::Constraint;
  ps.property = p;
  ps.valueRef = ref;
  return ps;
}

PropertySpec PropertySpec::eachOf(PropertySpec a, PropertySpec b) {
  PropertySpec ps;
  ps.kind = Kind::EachOf;
  ps.children = {std::move(a), std::move(b)};
  return ps;
}

PropertySpec PropertySpec::oneOf(PropertySpec a, PropertySpec b) {
  PropertySpec ps;
  ps.kind = Kind::OneOf;
  ps.children = {std::move(a), std::move(b)};
  return ps;
}

PropertySpec PropertySpec::star(PropertySpec a) {
  PropertySpec ps;
  ps.kind = Kind::Star;
  ps.children = {std::move(a)};
  return ps;
}

TripleExpr TripleExpr::constraint(EntityId p, std::optional<LabelId> ref, QualifierSpec qs) {
  TripleExpr te;
  te.kind = Kind::Constraint;
  te.property = p;
  te.valueRef = ref;
  te.quals = std::move(qs);
  return te;
}

TripleExpr TripleExpr::eachOf(TripleExpr a, TripleExpr b) {
  TripleExpr te;
  te.kind = Kind::EachOf;
  te.children = {std::move(a), std::move(b)};
  return te;
}

TripleExpr TripleExpr::oneOf(TripleExpr a, TripleExpr b) {
  TripleExpr te;
  te.kind = Kind::OneOf;
  te.children = {std::move(a), std::move(b)};
  return te;
}

TripleExpr TripleExpr::star(TripleExpr a) {
  TripleExpr te;
  te.kind = Kind::Star;
  te.children = {std::move(a)};
  return te;
}

ShapeExpr ShapeExpr::condition(NodeConstraint c) {
  ShapeExpr se;
  se.kind = Kind::Cond;
  se.cond = std::move(c);
  return se;
}

ShapeExpr ShapeExpr::conj(ShapeExpr a, ShapeExpr b) {
  ShapeExpr se;
  se.kind = Kind::And;
  se.children = {std::move(a), std::move(b)};
  return se;
}

ShapeExpr ShapeExpr::reference(LabelId l) {
  ShapeExpr se;
  se.kind = Kind::Ref;
  se.ref = l;
  return se;
}

ShapeExpr ShapeExpr::shape(TripleExpr te, bool closed) {
  ShapeExpr se;
  se.kind = Kind::Shape;
  se.closed = closed;
  se.te = std::move(te);
  return se;
}

TripleExpr desugar(const TripleExpr& te, const Cardinality& c) {
  return desugarWith(
      te, c, [] { return TripleExpr::empty(); }, TripleExpr::oneOf, TripleExpr::eachOf, TripleExpr::star);
}

PropertySpec desugar(const PropertySpec& ps, const Cardinality& c) {
  return desugarWith(
      ps, c, [] { return PropertySpec::empty(); }, PropertySpec::oneOf, PropertySpec::eachOf, PropertySpec::star);
}

namespace {

template <class T>
void collectProps(const T& e, std::set<EntityId>& out) {
  if (e.kind == T::Kind::Constraint) out.insert(e.property);
  for (const auto& c : e.children) collectProps(c, out);
}

}  // namespace

std::set<EntityId> predsOf(const TripleExpr& te) {
  std::set<EntityId> out;
  collectProps(te, out);
  return out;
}

std::set<EntityId> propsOf(const PropertySpec& ps) {
  std::set<EntityId> out;
  collectProps(ps, out);
  return out;
}

SchemaError::SchemaError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(line ? msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)
                              : msg),
      line_(line),
      column_(column) {}

LabelId WShExSchema::addLabel(const std::string& name) {
  if (name.empty()) throw SchemaError("empty shape label");
  if (index_.count(name)) throw SchemaError("duplicate shape label " + name);
  LabelId id = names_.size();
  names_.push_back(name);
  index_[name] = id;
  delta_.push_back(ShapeExpr::shape(TripleExpr::empty()));
  defined_.push_back(false);
  return id;
}

void WShExSchema::define(LabelId l, ShapeExpr se) {
  delta_.at(l) = std::move(se);
  defined_.at(l) = true;
}

std::optional<LabelId> WShExSchema::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelId WShExSchema::label(const std::string& name) const {
  auto l = find(name);
  if (!l) throw SchemaError("unknown shape label " + name);
  return *l;
}

namespace {

void checkRefs(const WShExSchema& s, const PropertySpec& ps) {
  if (ps.valueRef && *ps.valueRef >= s.size()) throw SchemaError("undefined label reference");
  for (const auto& c : ps.children) checkRefs(s, c);
}

void checkRefs(const WShExSchema& s, const TripleExpr& te) {
  if (te.valueRef && *te.valueRef >= s.size()) throw SchemaError("undefined label reference");
  checkRefs(s, te.quals.spec);
  for (const auto& c : te.children) checkRefs(s, c);
}

void checkRefs(const WShExSchema& s, const ShapeExpr& se) {
  if (se.kind == ShapeExpr::Kind::Ref && se.ref >= s.size()) throw SchemaError("undefined label reference");
  if (se.kind == ShapeExpr::Kind::Shape) checkRefs(s, se.te);
  for (const auto& c : se.children) checkRefs(s, c);
}

// Node-level references and whether a Shape occurs outside them.
void nodeRefs(const ShapeExpr& se, std::vector<LabelId>& refs, bool& hasShape) {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: break;
    case ShapeExpr::Kind::Ref: refs.push_back(se.ref); break;
    case ShapeExpr::Kind::Shape: hasShape = true; break;
    case ShapeExpr::Kind::And:
      for (const auto& c : se.children) nodeRefs(c, refs, hasShape);
      break;
  }
}

}  // namespace

void WShExSchema::finalize() {
  const std::size_t n = names_.size();
  for (LabelId l = 0; l < n; ++l) checkRefs(*this, delta_[l]);
  if (start_ && *start_ >= n) throw SchemaError("start label is not defined");

  std::vector<std::vector<LabelId>> refs(n);
  std::vector<bool> hasShape(n, false);
  for (LabelId l = 0; l < n; ++l) {
    bool hs = false;
    nodeRefs(delta_[l], refs[l], hs);
    hasShape[l] = hs;
  }

  // A reference cycle through node-level references only never reaches a
  // neighbourhood and so never terminates.
  std::vector<int> state(n, 0);
  std::function<void(LabelId)> visit = [&](LabelId l) {
    state[l] = 1;
    for (LabelId r : refs[l]) {
      if (state[r] == 1) throw SchemaError("reference cycle without a shape through label " + names_[r]);
      if (state[r] == 0) visit(r);
    }
    state[l] = 2;
  };
  for (LabelId l = 0; l < n; ++l)
    if (state[l] == 0) visit(l);

  condOnly_.assign(n, false);
  std::vector<bool> done(n, false);
  std::function<bool(LabelId)> cond = [&](LabelId l) -> bool {
    if (done[l]) return condOnly_[l];
    bool r = !hasShape[l];
    for (LabelId x : refs[l]) r = cond(x) && r;
    done[l] = true;
    condOnly_[l] = r;
    return r;
  };
  for (LabelId l = 0; l < n; ++l) cond(l);
}

namespace {

std::string refStr(const WShExSchema& s, const std::optional<LabelId>& r) {
  return r ? "@<" + s.name(*r) + ">" : std::string(".");
}

std::string describePs(const WShExSchema& s, const PropertySpec& ps) {
  switch (ps.kind) {
    case PropertySpec::Kind::Empty: return "()";
    case PropertySpec::Kind::Constraint: return ps.property.str() + " " + refStr(s, ps.valueRef);
    case PropertySpec::Kind::Star: return "(" + describePs(s, ps.children[0]) + ")*";
    case PropertySpec::Kind::EachOf:
      return "(" + describePs(s, ps.children[0]) + " , " + describePs(s, ps.children[1]) + ")";
    case PropertySpec::Kind::OneOf:
      return "(" + describePs(s, ps.children[0]) + " | " + describePs(s, ps.children[1]) + ")";
  }
  return {};
}

std::string describeCond(const NodeConstraint& c) {
  switch (c.kind) {
    case NodeConstraint::Kind::AnyValue: return ".";
    case NodeConstraint::Kind::DatatypeIs: return c.datatypeName;
    case NodeConstraint::Kind::ValueSet: {
      std::string out = "[";
      for (const auto& v : c.values) out += " " + valueStr(v);
      return out + " ]";
    }
  }
  return {};
}

}  // namespace

std::string describe(const WShExSchema& s, const TripleExpr& te) {
  switch (te.kind) {
    case TripleExpr::Kind::Empty: return "()";
    case TripleExpr::Kind::Constraint: {
      std::string out = te.property.str() + " " + refStr(s, te.valueRef);
      const auto& q = te.quals;
      if (q.closed || q.spec.kind != PropertySpec::Kind::Empty)
        out += q.closed ? " [[ " + describePs(s, q.spec) + " ]]" : " {{ " + describePs(s, q.spec) + " }}";
      return out;
    }
    case TripleExpr::Kind::Star: return "(" + describe(s, te.children[0]) + ")*";
    case TripleExpr::Kind::EachOf:
      return "(" + describe(s, te.children[0]) + " ; " + describe(s, te.children[1]) + ")";
    case TripleExpr::Kind::OneOf:
      return "(" + describe(s, te.children[0]) + " | " + describe(s, te.children[1]) + ")";
  }
  return {};
}

std::string describe(const WShExSchema& s, const ShapeExpr& se) {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: return describeCond(se.cond);
    case ShapeExpr::Kind::Ref: return "@<" + s.name(se.ref) + ">";
    case ShapeExpr::Kind::And: return describe(s, se.children[0]) + " AND " + describe(s, se.children[1]);
    case ShapeExpr::Kind::Shape: return std::string(se.closed ? "CLOSED " : "") + "{ " + describe(s, se.te) + " }";
  }
  return {};
}

std::string describe(const WShExSchema& s) {
  std::string out;
  for (const auto& [p, iri] : s.prefixes()) out += "prefix " + p + ": <" + iri + ">\n";
  if (s.start()) out += "start = @<" + s.name(*s.start()) + ">\n";
  for (LabelId l = 0; l < s.size(); ++l) out += "<" + s.name(l) + "> " + describe(s, s.delta(l)) + "\n";
  return out;
}

}  // namespace wsub

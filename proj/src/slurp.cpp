#include "wsub/slurp.hpp"

namespace wsub {

void Slurp::merge(const Slurp& other) {
  nodes.insert(other.nodes.begin(), other.nodes.end());
  statements.insert(other.statements.begin(), other.statements.end());
}

WikibaseGraph SlurpSubset::graph() const {
  return WikibaseGraph(std::vector<Statement>(slurp.statements.begin(), slurp.statements.end()));
}

namespace {

void leavesOf(const TripleExpr& te, std::vector<const TripleExpr*>& out) {
  if (te.kind == TripleExpr::Kind::Constraint) out.push_back(&te);
  for (const auto& c : te.children) leavesOf(c, out);
}

void leavesOf(const PropertySpec& ps, std::vector<const PropertySpec*>& out) {
  if (ps.kind == PropertySpec::Kind::Constraint) out.push_back(&ps);
  for (const auto& c : ps.children) leavesOf(c, out);
}

}  // namespace

Slurper::Slurper(const WikibaseGraph& g, const WShExSchema& schema, const ShapeAssignment& tau, SlurpOptions opts)
    : g_(g), schema_(schema), tau_(tau), opts_(opts), ev_(schema), ctx_(assignmentContext(g, tau)) {}

Slurper::Contribution Slurper::fromWitness(const Value& n, const Witness& w) const {
  Contribution c;
  c.ok = true;
  c.own.nodes.insert(n);
  for (LabelId l : w.nodeRefs) c.refs.push_back({n, l});
  for (const auto& u : w.triples) {
    const Statement& s = *u.statement;
    c.own.nodes.insert(s.subject());
    c.own.nodes.insert(s.value());
    if (u.valueRef) c.refs.push_back({s.value(), *u.valueRef});
    std::vector<Qualifier> kept;
    for (const auto& q : u.qualifiers) {
      kept.push_back(q.qualifier);
      if (q.valueRef) c.refs.push_back({q.qualifier.value, *q.valueRef});
    }
    for (const auto& q : opts_.fullQualifiers ? std::vector<Qualifier>(s.qualifiers().begin(), s.qualifiers().end())
                                              : kept)
      c.own.nodes.insert(q.value);
    c.own.statements.insert(opts_.fullQualifiers ? s : s.withQualifiers(std::move(kept)));
  }
  return c;
}

void Slurper::visit(const Value& n, const ShapeExpr& se, Contribution& c) const {
  c.own.nodes.insert(n);
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: return;
    case ShapeExpr::Kind::And:
      for (const auto& ch : se.children) visit(n, ch, c);
      return;
    case ShapeExpr::Kind::Ref: c.refs.push_back({n, se.ref}); return;
    case ShapeExpr::Kind::Shape: break;
  }
  auto e = asEntity(n);
  if (!e) return;
  std::vector<const TripleExpr*> leaves;
  leavesOf(se.te, leaves);
  auto preds = predsOf(se.te);
  for (const auto& s : g_.neighs(*e)) {
    if (!se.closed && !preds.count(s.property())) continue;
    c.own.statements.insert(s);
    c.own.nodes.insert(s.value());
    for (const auto& q : s.qualifiers()) c.own.nodes.insert(q.value);
    for (const TripleExpr* leaf : leaves) {
      if (leaf->property != s.property()) continue;
      if (leaf->valueRef) c.refs.push_back({s.value(), *leaf->valueRef});
      std::vector<const PropertySpec*> qleaves;
      leavesOf(leaf->quals.spec, qleaves);
      for (const auto& q : s.qualifiers())
        for (const PropertySpec* ql : qleaves)
          if (ql->property == q.property && ql->valueRef) c.refs.push_back({q.value, *ql->valueRef});
    }
  }
}

Slurper::Contribution Slurper::compute(const Value& n, const ShapeExpr& se) const {
  if (opts_.visited) {
    Contribution c;
    c.ok = ev_.conforms(n, se, ctx_);
    visit(n, se, c);
    return c;
  }
  Witness w;
  if (!ev_.conforms(n, se, ctx_, &w)) return {};
  return fromWitness(n, w);
}

const Slurper::Contribution& Slurper::pair(const Value& n, LabelId l) {
  Key key{n, l};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Contribution c;
  auto e = asEntity(n);
  if (opts_.visited || !e || tau_.contains(*e, l)) {
    c = compute(n, schema_.delta(l));
    if (!c.ok && !opts_.visited) {
      // Assumed by tau without a derivation of its own: keep just the node.
      c = Contribution{};
      c.own.nodes.insert(n);
    }
    c.ok = true;
  }
  return memo_.emplace(std::move(key), std::move(c)).first->second;
}

void Slurper::precompute() {
  std::vector<Key> keys;
  for (const auto& [n, l] : tau_.pairs())
    if (!memo_.count({n, l})) keys.push_back({n, l});
  std::vector<Contribution> out(keys.size());
  forEachIndex(keys.size(), opts_.exec, [&](std::size_t i) {
    out[i] = compute(keys[i].first, schema_.delta(keys[i].second));
    if (!out[i].ok && !opts_.visited) {
      out[i] = Contribution{};
      out[i].own.nodes.insert(keys[i].first);
    }
    out[i].ok = true;
  });
  for (std::size_t i = 0; i < keys.size(); ++i) memo_.emplace(std::move(keys[i]), std::move(out[i]));
}

void Slurper::close(std::vector<Key> frontier, Slurp& out) {
  std::set<Key> seen(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    Key k = std::move(frontier.back());
    frontier.pop_back();
    const Contribution& c = pair(k.first, k.second);
    if (!c.ok) continue;
    out.merge(c.own);
    for (const auto& r : c.refs)
      if (seen.insert(r).second) frontier.push_back(r);
  }
}

SlurpResult Slurper::slurp(const Value& n, const ShapeExpr& se) {
  Contribution c = compute(n, se);
  if (!c.ok) return {};
  SlurpResult r;
  r.conforms = true;
  r.slurped = std::move(c.own);
  close(std::move(c.refs), r.slurped);
  return r;
}

SlurpResult Slurper::slurpLabel(const Value& n, LabelId l) { return slurp(n, ShapeExpr::reference(l)); }

SlurpResult conformsSlurp(const WikibaseGraph& g, const Value& n, const ShapeAssignment& tau, const ShapeExpr& se,
                          const WShExSchema& schema, const SlurpOptions& opts) {
  Slurper s(g, schema, tau, opts);
  return s.slurp(n, se);
}

SlurpSubset slurpSubset(const WikibaseGraph& g, const WShExSchema& schema, LabelId start, const SlurpOptions& opts,
                        bool allShapes) {
  auto tau = maximalAssignment(g, schema, opts.exec);
  return slurpSubset(g, schema, tau, start, opts, allShapes);
}

SlurpSubset slurpSubset(const WikibaseGraph& g, const WShExSchema& schema, const ShapeAssignment& tauMax,
                        LabelId start, const SlurpOptions& opts, bool allShapes) {
  if (start >= schema.size()) throw SchemaError("unknown start label");
  Slurper s(g, schema, tauMax, opts);
  if (opts.exec.exec == Exec::Parallel) s.precompute();
  SlurpSubset out;
  for (const auto& n : g.nodes()) {
    for (LabelId l = 0; l < schema.size(); ++l) {
      if (!allShapes && l != start) continue;
      if (!tauMax.contains(n, l)) continue;
      auto r = s.slurpLabel(n, l);
      if (!r.conforms) continue;
      ++out.conformingRoots;
      out.slurp.merge(r.slurped);
    }
  }
  return out;
}

}  // namespace wsub

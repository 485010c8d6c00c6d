#include "wsub/conformance.hpp"

#include <algorithm>
#include <map>

namespace wsub {

bool assignLeaves(const std::vector<std::vector<std::size_t>>& candidates, const Rbe<std::size_t>& rbe,
                  std::vector<std::size_t>* chosen) {
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> byCands;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].empty()) return false;
    byCands[candidates[i]].push_back(i);
  }
  struct Group {
    const std::vector<std::size_t>* leaves;
    const std::vector<std::size_t>* items;
  };
  std::vector<Group> groups;
  for (const auto& [c, items] : byCands) groups.push_back({&c, &items});

  typename Rbe<std::size_t>::Matcher match(rbe);
  std::map<std::size_t, std::size_t> counts;
  // split[g][k]: how many items of group g go to its k-th leaf.
  std::vector<std::vector<std::size_t>> split(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) split[g].assign(groups[g].leaves->size(), 0);

  std::function<bool(std::size_t, std::size_t, std::size_t)> dfs = [&](std::size_t g, std::size_t k,
                                                                      std::size_t left) -> bool {
    if (g == groups.size()) {
      Bag<std::size_t> bag;
      for (const auto& [leaf, n] : counts) bag.add(leaf, n);
      return match(bag);
    }
    const auto& leaves = *groups[g].leaves;
    if (k + 1 == leaves.size()) {
      split[g][k] = left;
      counts[leaves[k]] += left;
      bool ok = dfs(g + 1, 0, g + 1 < groups.size() ? groups[g + 1].items->size() : 0);
      counts[leaves[k]] -= left;
      return ok;
    }
    for (std::size_t take = left + 1; take-- > 0;) {
      split[g][k] = take;
      counts[leaves[k]] += take;
      bool ok = dfs(g, k + 1, left - take);
      counts[leaves[k]] -= take;
      if (ok) return true;
    }
    return false;
  };

  bool ok = dfs(0, 0, groups.empty() ? 0 : groups[0].items->size());
  if (ok && chosen) {
    chosen->assign(candidates.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::size_t at = 0;
      for (std::size_t k = 0; k < groups[g].leaves->size(); ++k)
        for (std::size_t t = 0; t < split[g][k]; ++t) (*chosen)[(*groups[g].items)[at++]] = (*groups[g].leaves)[k];
    }
  }
  return ok;
}

namespace {

template <class T>
Rbe<std::size_t> buildRbe(const T& e, std::vector<const T*>& leaves) {
  using K = typename T::Kind;
  switch (e.kind) {
    case K::Empty: return Rbe<std::size_t>::empty();
    case K::Constraint:
      leaves.push_back(&e);
      return Rbe<std::size_t>::symbol(leaves.size() - 1);
    case K::Star: return Rbe<std::size_t>::star(buildRbe(e.children[0], leaves));
    case K::EachOf:
    case K::OneOf: {
      Rbe<std::size_t> out = buildRbe(e.children[0], leaves);
      for (std::size_t i = 1; i < e.children.size(); ++i) {
        auto r = buildRbe(e.children[i], leaves);
        out = e.kind == K::EachOf ? Rbe<std::size_t>::seq(out, r) : Rbe<std::size_t>::orElse(out, r);
      }
      return out;
    }
  }
  return Rbe<std::size_t>::empty();
}

}  // namespace

Evaluator::Evaluator(const WShExSchema& schema) : schema_(&schema) {
  for (LabelId l = 0; l < schema.size(); ++l) compileShape(schema.delta(l));
}

void Evaluator::compileShape(const ShapeExpr& se) {
  if (se.kind == ShapeExpr::Kind::Shape) {
    CompiledTe c;
    c.rbe = buildRbe(se.te, c.leaves);
    c.preds = predsOf(se.te);
    for (const TripleExpr* leaf : c.leaves) compileTe(*leaf);
    teCache_.emplace(&se.te, std::move(c));
  }
  for (const auto& ch : se.children) compileShape(ch);
}

void Evaluator::compileTe(const TripleExpr& leaf) {
  const PropertySpec& ps = leaf.quals.spec;
  CompiledPs c;
  c.rbe = buildRbe(ps, c.leaves);
  c.props = propsOf(ps);
  psCache_.emplace(&ps, std::move(c));
}

const Evaluator::CompiledTe& Evaluator::compiled(const TripleExpr& te, std::unique_ptr<CompiledTe>& scratch) const {
  if (auto it = teCache_.find(&te); it != teCache_.end()) return it->second;
  scratch = std::make_unique<CompiledTe>();
  scratch->rbe = buildRbe(te, scratch->leaves);
  scratch->preds = predsOf(te);
  return *scratch;
}

const Evaluator::CompiledPs& Evaluator::compiled(const PropertySpec& ps, std::unique_ptr<CompiledPs>& scratch) const {
  if (auto it = psCache_.find(&ps); it != psCache_.end()) return it->second;
  scratch = std::make_unique<CompiledPs>();
  scratch->rbe = buildRbe(ps, scratch->leaves);
  scratch->props = propsOf(ps);
  return *scratch;
}

bool Evaluator::valueConforms(const EntityId& p, const Value& y, const std::optional<LabelId>& ref,
                              const EvalContext& ctx) const {
  if (!ref) return true;
  if (auto e = asEntity(y)) {
    if (ctx.entityRef) return ctx.entityRef(p, *e, *ref);
    return conformsLabel(y, *ref, ctx);
  }
  // Data values have no neighbourhood; their definition is evaluated in place.
  return conformsLabel(y, *ref, ctx);
}

bool Evaluator::qualifiersConform(const Statement& s, const QualifierSpec& qs, const EvalContext& ctx,
                                  std::vector<QualifierUse>* uses) const {
  std::unique_ptr<CompiledPs> scratch;
  const CompiledPs& c = compiled(qs.spec, scratch);

  std::vector<const Qualifier*> items;
  for (const auto& q : s.qualifiers())
    if (qs.closed || c.props.count(q.property)) items.push_back(&q);

  std::vector<std::vector<std::size_t>> cands(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < c.leaves.size(); ++j) {
      const PropertySpec& leaf = *c.leaves[j];
      if (leaf.property == items[i]->property && valueConforms(leaf.property, items[i]->value, leaf.valueRef, ctx))
        cands[i].push_back(j);
    }
    if (cands[i].empty()) return false;
  }
  std::vector<std::size_t> chosen;
  if (!assignLeaves(cands, c.rbe, uses ? &chosen : nullptr)) return false;
  if (uses) {
    uses->clear();
    for (std::size_t i = 0; i < items.size(); ++i) uses->push_back({*items[i], c.leaves[chosen[i]]->valueRef});
  }
  return true;
}

bool Evaluator::triplesConform(std::span<const Statement* const> ts, const TripleExpr& te, const EvalContext& ctx,
                               std::vector<TripleUse>* uses) const {
  std::unique_ptr<CompiledTe> scratch;
  const CompiledTe& c = compiled(te, scratch);

  std::vector<std::vector<std::size_t>> cands(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Statement& s = *ts[i];
    for (std::size_t j = 0; j < c.leaves.size(); ++j) {
      const TripleExpr& leaf = *c.leaves[j];
      if (leaf.property != s.property()) continue;
      if (!valueConforms(leaf.property, s.value(), leaf.valueRef, ctx)) continue;
      if (!qualifiersConform(s, leaf.quals, ctx)) continue;
      cands[i].push_back(j);
    }
    if (cands[i].empty()) return false;
  }
  std::vector<std::size_t> chosen;
  if (!assignLeaves(cands, c.rbe, uses ? &chosen : nullptr)) return false;
  if (uses) {
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const TripleExpr& leaf = *c.leaves[chosen[i]];
      TripleUse u;
      u.statement = ts[i];
      u.valueRef = leaf.valueRef;
      qualifiersConform(*ts[i], leaf.quals, ctx, &u.qualifiers);
      uses->push_back(std::move(u));
    }
  }
  return true;
}

bool Evaluator::evalShape(const Value& n, bool closed, const TripleExpr& te, const EvalContext& ctx,
                          Witness* w) const {
  std::unique_ptr<CompiledTe> scratch;
  const CompiledTe& c = compiled(te, scratch);
  std::vector<const Statement*> ts;
  if (auto e = asEntity(n)) {
    for (const auto& s : ctx.neighs(*e))
      if (closed || c.preds.count(s.property())) ts.push_back(&s);
  }
  return triplesConform(ts, te, ctx, w ? &w->triples : nullptr);
}

bool Evaluator::conforms(const Value& n, const ShapeExpr& se, const EvalContext& ctx, Witness* w) const {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: {
      bool r = se.cond.test(n);
      if (r && w) w->cond = true;
      return r;
    }
    case ShapeExpr::Kind::And:
      for (const auto& c : se.children)
        if (!conforms(n, c, ctx, w)) return false;
      return true;
    case ShapeExpr::Kind::Ref: {
      auto e = asEntity(n);
      if (e && ctx.nodeRef) {
        bool r = ctx.nodeRef(*e, se.ref);
        if (r && w) w->nodeRefs.push_back(se.ref);
        return r;
      }
      return conforms(n, schema_->delta(se.ref), ctx, w);
    }
    case ShapeExpr::Kind::Shape: return evalShape(n, se.closed, se.te, ctx, w);
  }
  return false;
}

EvalContext assignmentContext(const WikibaseGraph& g, const ShapeAssignment& tau) {
  EvalContext ctx;
  ctx.neighs = [&g](const EntityId& n) { return g.neighs(n); };
  ctx.entityRef = [&tau](const EntityId&, const EntityId& y, LabelId l) { return tau.contains(y, l); };
  ctx.nodeRef = [&tau](const EntityId& n, LabelId l) { return tau.contains(n, l); };
  return ctx;
}

bool conforms(const WikibaseGraph& g, const Value& n, const ShapeAssignment& tau, const ShapeExpr& se,
              const WShExSchema& schema) {
  Evaluator ev(schema);
  return ev.conforms(n, se, assignmentContext(g, tau));
}

ShapeAssignment maximalAssignment(const WikibaseGraph& g, const WShExSchema& schema, const ExecOptions& opts) {
  const auto& nodes = g.nodes();
  const std::size_t N = nodes.size();
  const std::size_t L = schema.size();
  if (N == 0 || L == 0) return {};

  auto indexOf = [&nodes](const EntityId& e) -> std::optional<std::size_t> {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), e);
    if (it == nodes.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  };

  // Who must be re-checked when node m loses a label: m itself and every
  // node with a statement or qualifier whose value is m.
  std::vector<std::vector<std::size_t>> referrers(N);
  for (std::size_t i = 0; i < N; ++i) {
    for (const auto& s : g.neighs(nodes[i])) {
      if (auto e = asEntity(s.value()))
        if (auto j = indexOf(*e)) referrers[*j].push_back(i);
      for (const auto& q : s.qualifiers())
        if (auto e = asEntity(q.value))
          if (auto j = indexOf(*e)) referrers[*j].push_back(i);
    }
  }
  for (auto& r : referrers) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }

  std::vector<char> alive(N * L, 1);
  Evaluator ev(schema);
  EvalContext ctx;
  ctx.neighs = [&g](const EntityId& n) { return g.neighs(n); };
  auto lookup = [&](const EntityId& y, LabelId l) {
    auto j = indexOf(y);
    return j && alive[*j * L + l];
  };
  ctx.entityRef = [&](const EntityId&, const EntityId& y, LabelId l) { return lookup(y, l); };
  ctx.nodeRef = lookup;

  std::vector<std::size_t> dirty(N * L);
  for (std::size_t i = 0; i < N * L; ++i) dirty[i] = i;

  while (!dirty.empty()) {
    std::vector<char> fails(dirty.size(), 0);
    forEachIndex(dirty.size(), opts, [&](std::size_t k) {
      std::size_t pair = dirty[k];
      fails[k] = !ev.conformsLabel(nodes[pair / L], pair % L, ctx);
    });
    std::vector<char> touched(N, 0);
    bool any = false;
    for (std::size_t k = 0; k < dirty.size(); ++k) {
      if (!fails[k]) continue;
      any = true;
      std::size_t pair = dirty[k];
      alive[pair] = 0;
      std::size_t m = pair / L;
      touched[m] = 1;
      for (std::size_t r : referrers[m]) touched[r] = 1;
    }
    if (!any) break;
    dirty.clear();
    for (std::size_t i = 0; i < N; ++i)
      if (touched[i])
        for (LabelId l = 0; l < L; ++l)
          if (alive[i * L + l]) dirty.push_back(i * L + l);
  }

  ShapeAssignment out;
  for (std::size_t i = 0; i < N; ++i)
    for (LabelId l = 0; l < L; ++l)
      if (alive[i * L + l]) out.insert(nodes[i], l);
  return out;
}

bool validateNode(const WikibaseGraph& g, const EntityId& n, LabelId l, const WShExSchema& schema,
                  const ShapeAssignment& tauMax) {
  if (l >= schema.size()) throw SchemaError("unknown shape label");
  if (std::binary_search(g.nodes().begin(), g.nodes().end(), n)) return tauMax.contains(n, l);
  // Not a graph node: empty neighbourhood, so only its own definition matters.
  Evaluator ev(schema);
  EvalContext ctx = assignmentContext(g, tauMax);
  ctx.nodeRef = nullptr;
  return ev.conformsLabel(n, l, ctx);
}

bool validateNode(const WikibaseGraph& g, const EntityId& n, const std::string& label, const WShExSchema& schema) {
  LabelId l = schema.label(label);
  return validateNode(g, n, l, schema, maximalAssignment(g, schema));
}

}  // namespace wsub

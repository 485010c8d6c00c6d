#include "wsub/wshex_pregel.hpp"

#include <algorithm>

namespace wsub {

WPregelGraph buildPregelGraph(const WikibaseGraph& g) {
  const auto& nodes = g.nodes();
  WPregelGraph pg;
  pg.vertices.reserve(nodes.size());
  for (const auto& n : nodes) {
    auto ns = g.neighs(n);
    pg.vertices.push_back({VertexPayload{n, std::vector<Statement>(ns.begin(), ns.end())}, {}});
  }
  auto indexOf = [&nodes](const EntityId& e) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), e) - nodes.begin());
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& s : pg.vertices[i].value.statements) {
      auto e = asEntity(s.value());
      if (!e) continue;
      pg.edges.push_back({i, indexOf(*e),
                          EdgePayload{s.property(), std::vector<Qualifier>(s.qualifiers().begin(), s.qualifiers().end())}});
    }
  }
  return pg;
}

namespace {

void checkQualifierRefs(const WShExSchema& s, const PropertySpec& ps) {
  if (ps.kind == PropertySpec::Kind::Constraint && ps.valueRef && !s.condOnly(*ps.valueRef))
    throw SchemaError("qualifier value reference @<" + s.name(*ps.valueRef) +
                      "> is not a node constraint; the pregel engine cannot follow it");
  for (const auto& c : ps.children) checkQualifierRefs(s, c);
}

void checkQualifierRefs(const WShExSchema& s, const TripleExpr& te) {
  if (te.kind == TripleExpr::Kind::Constraint) checkQualifierRefs(s, te.quals.spec);
  for (const auto& c : te.children) checkQualifierRefs(s, c);
}

void checkQualifierRefs(const WShExSchema& s, const ShapeExpr& se) {
  if (se.kind == ShapeExpr::Kind::Shape) checkQualifierRefs(s, se.te);
  for (const auto& c : se.children) checkQualifierRefs(s, c);
}

bool mayAcceptEntity(const WShExSchema& s, const ShapeExpr& se) {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond:
      switch (se.cond.kind) {
        case NodeConstraint::Kind::AnyValue: return true;
        case NodeConstraint::Kind::ValueSet:
          return std::any_of(se.cond.values.begin(), se.cond.values.end(), [](const Value& v) { return isEntity(v); });
        case NodeConstraint::Kind::DatatypeIs: return false;
      }
      return true;
    case ShapeExpr::Kind::And:
      return std::all_of(se.children.begin(), se.children.end(),
                         [&](const ShapeExpr& c) { return mayAcceptEntity(s, c); });
    case ShapeExpr::Kind::Ref: return mayAcceptEntity(s, s.delta(se.ref));
    case ShapeExpr::Kind::Shape: return true;
  }
  return true;
}

}  // namespace

WShExPSchema::WShExPSchema(const WShExSchema& schema) : schema_(&schema), ev_(schema) {
  for (LabelId l = 0; l < schema.size(); ++l) checkQualifierRefs(schema, schema.delta(l));
  plain_.neighs = [](const EntityId&) { return std::span<const Statement>{}; };
  tc_.resize(schema.size());
  for (LabelId l = 0; l < schema.size(); ++l) {
    std::set<LabelId> seen{l};
    collect(schema.delta(l), tc_[l], seen);
    compile(schema.delta(l));
  }
}

namespace {

Rbe<std::size_t> relaxedRbe(const TripleExpr& te, std::vector<const TripleExpr*>& leaves, std::vector<bool>& dataOnly,
                            const std::function<bool(const TripleExpr&)>& isDataOnly) {
  using K = TripleExpr::Kind;
  switch (te.kind) {
    case K::Empty: return Rbe<std::size_t>::empty();
    case K::Constraint: {
      leaves.push_back(&te);
      bool d = isDataOnly(te);
      dataOnly.push_back(d);
      return d ? Rbe<std::size_t>::empty() : Rbe<std::size_t>::symbol(leaves.size() - 1);
    }
    case K::Star: return Rbe<std::size_t>::star(relaxedRbe(te.children[0], leaves, dataOnly, isDataOnly));
    case K::EachOf:
    case K::OneOf: {
      auto out = relaxedRbe(te.children[0], leaves, dataOnly, isDataOnly);
      for (std::size_t i = 1; i < te.children.size(); ++i) {
        auto r = relaxedRbe(te.children[i], leaves, dataOnly, isDataOnly);
        out = te.kind == K::EachOf ? Rbe<std::size_t>::seq(out, r) : Rbe<std::size_t>::orElse(out, r);
      }
      return out;
    }
  }
  return Rbe<std::size_t>::empty();
}

}  // namespace

void WShExPSchema::compile(const ShapeExpr& se) {
  for (const auto& c : se.children) compile(c);
  if (se.kind != ShapeExpr::Kind::Shape || relaxed_.count(&se.te)) return;
  Relaxed r;
  r.rbe = relaxedRbe(se.te, r.leaves, r.dataOnly,
                     [this](const TripleExpr& leaf) { return leaf.valueRef && !entityLabel(*leaf.valueRef); });
  r.erased = r.leaves.size();
  r.rbe = Rbe<std::size_t>::seq(r.rbe, Rbe<std::size_t>::star(Rbe<std::size_t>::symbol(r.erased)));
  r.preds = predsOf(se.te);
  relaxed_.emplace(&se.te, std::move(r));
}

EvalContext WShExPSchema::contextFor(const VertexPayload& v, const std::function<bool(const Dep&)>& refOk) const {
  EvalContext ctx;
  ctx.neighs = [&v](const EntityId& x) {
    return x == v.id ? std::span<const Statement>(v.statements) : std::span<const Statement>{};
  };
  ctx.entityRef = [this, &refOk](const EntityId& p, const EntityId& y, LabelId l2) {
    // Node constraints depend on the value alone.
    if (schema_->condOnly(l2)) return ev_.conformsLabel(y, l2, plain_);
    // No message is ever sent for these: no entity can satisfy them.
    if (!entityLabel(l2)) return false;
    return refOk(Dep{y, p, l2});
  };
  return ctx;
}

// Necessary condition with every neighbour assumed to conform: each
// statement needs a candidate leaf, and the statements that can only go to
// entity-capable leaves must fit the expression with data-only leaves
// erased. Missing data-valued statements are left to the neighbour check.
bool WShExPSchema::localHolds(const VertexPayload& v, const ShapeExpr& se, const EvalContext& ctx) const {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: return se.cond.test(v.id);
    case ShapeExpr::Kind::And:
      for (const auto& c : se.children)
        if (!localHolds(v, c, ctx)) return false;
      return true;
    case ShapeExpr::Kind::Ref: return localHolds(v, schema_->delta(se.ref), ctx);
    case ShapeExpr::Kind::Shape: break;
  }
  const Relaxed& r = relaxed_.at(&se.te);
  std::vector<std::vector<std::size_t>> cands;
  for (const auto& s : v.statements) {
    if (!se.closed && !r.preds.count(s.property())) continue;
    std::vector<std::size_t> c;
    bool erasable = false;
    for (std::size_t j = 0; j < r.leaves.size(); ++j) {
      const TripleExpr& leaf = *r.leaves[j];
      if (leaf.property != s.property()) continue;
      if (!ev_.valueConforms(leaf.property, s.value(), leaf.valueRef, ctx)) continue;
      if (!ev_.qualifiersConform(s, leaf.quals, ctx)) continue;
      if (r.dataOnly[j])
        erasable = true;
      else
        c.push_back(j);
    }
    if (erasable) c.push_back(r.erased);
    if (c.empty()) return false;
    cands.push_back(std::move(c));
  }
  return assignLeaves(cands, r.rbe, nullptr);
}

bool WShExPSchema::entityLabel(LabelId l) const { return mayAcceptEntity(*schema_, schema_->delta(l)); }

void WShExPSchema::collect(const ShapeExpr& se, TripleConstraints& out, std::set<LabelId>& seen) const {
  switch (se.kind) {
    case ShapeExpr::Kind::Cond: return;
    case ShapeExpr::Kind::And:
      for (const auto& c : se.children) collect(c, out, seen);
      return;
    case ShapeExpr::Kind::Ref:
      if (seen.insert(se.ref).second) collect(schema_->delta(se.ref), out, seen);
      return;
    case ShapeExpr::Kind::Shape: break;
  }
  std::vector<const TripleExpr*> stack{&se.te};
  while (!stack.empty()) {
    const TripleExpr* te = stack.back();
    stack.pop_back();
    if (te->kind == TripleExpr::Kind::Constraint && te->valueRef && entityLabel(*te->valueRef))
      out.insert({te->property, *te->valueRef});
    for (const auto& c : te->children) stack.push_back(&c);
  }
}

bool WShExPSchema::conformsWith(LabelId l, const VertexPayload& v, const std::function<bool(const Dep&)>& refOk,
                                Witness* w) const {
  return ev_.conformsLabel(v.id, l, contextFor(v, refOk), w);
}

LocalResult WShExPSchema::checkLocal(LabelId l, const VertexPayload& v) const {
  LocalResult r;
  const std::function<bool(const Dep&)> any = [](const Dep&) { return true; };
  const auto& tc = tc_[l];
  // Without entity constraints nothing is assumed and the full check is exact.
  bool holds = tc.empty() ? conformsWith(l, v, any) : localHolds(v, schema_->delta(l), contextFor(v, any));
  if (!holds) {
    r.kind = LocalResult::Kind::Failed;
    r.reason = "local check of <" + schema_->name(l) + "> fails";
    return r;
  }
  if (tc.empty()) return r;
  r.kind = LocalResult::Kind::Pending;
  for (const auto& [p, l2] : tc) r.labels.insert(l2);
  return r;
}

NeighsResult WShExPSchema::checkNeighs(LabelId l, const VertexPayload& v, const DepSet& oks, const DepSet&) const {
  if (conformsWith(l, v, [&oks](const Dep& d) { return oks.count(d) > 0; })) return {true, {}};
  return {false, "neighbours do not satisfy <" + schema_->name(l) + ">"};
}

namespace {

using PL = std::pair<EntityId, LabelId>;

Rbe<PL> entityRbe(const TripleExpr& te, const std::function<bool(LabelId)>& entityLabel) {
  using K = TripleExpr::Kind;
  switch (te.kind) {
    case K::Empty: return Rbe<PL>::empty();
    case K::Constraint:
      if (te.valueRef && entityLabel(*te.valueRef)) return Rbe<PL>::symbol({te.property, *te.valueRef});
      return Rbe<PL>::empty();
    case K::Star: return Rbe<PL>::star(entityRbe(te.children[0], entityLabel));
    case K::EachOf:
    case K::OneOf: {
      Rbe<PL> out = entityRbe(te.children[0], entityLabel);
      for (std::size_t i = 1; i < te.children.size(); ++i) {
        auto r = entityRbe(te.children[i], entityLabel);
        out = te.kind == K::EachOf ? Rbe<PL>::seq(out, r) : Rbe<PL>::orElse(out, r);
      }
      return out;
    }
  }
  return Rbe<PL>::empty();
}

}  // namespace

NeighsResult WShExPSchema::checkNeighs(LabelId l, const Bag<PL>& okBag, const std::set<PL>& failed) const {
  std::function<bool(const ShapeExpr&)> check = [&](const ShapeExpr& se) -> bool {
    switch (se.kind) {
      case ShapeExpr::Kind::Cond: return true;
      case ShapeExpr::Kind::And:
        return std::all_of(se.children.begin(), se.children.end(), check);
      case ShapeExpr::Kind::Ref: return check(schema_->delta(se.ref));
      case ShapeExpr::Kind::Shape: {
        auto rbe = entityRbe(se.te, [this](LabelId x) { return entityLabel(x); });
        // Symbols outside this shape belong to other conjuncts.
        Bag<PL> mine;
        for (const auto& [s, c] : okBag.entries())
          if (rbe.alphabet().count(s)) mine.add(s, c);
        if (!matches(mine, rbe)) return false;
        return !se.closed || failed.empty();
      }
    }
    return false;
  };
  if (check(schema_->delta(l))) return {true, {}};
  return {false, "neighbours do not satisfy <" + schema_->name(l) + ">"};
}

PSchemaParams<VertexPayload, EdgePayload> WShExPSchema::params() const {
  PSchemaParams<VertexPayload, EdgePayload> p;
  p.checkLocal = [this](LabelId l, const VertexPayload& v) { return checkLocal(l, v); };
  p.checkNeighs = [this](LabelId l, const VertexPayload& v, const DepSet& oks, const DepSet& fs) {
    return checkNeighs(l, v, oks, fs);
  };
  p.tripleConstraints = [this](LabelId l) -> const TripleConstraints& { return tripleConstraints(l); };
  p.cnvEdge = [](const EdgePayload& e) { return e.property; };
  p.nodeOf = [](const VertexPayload& v) { return v.id; };
  return p;
}

WVertex checkRemaining(const WShExPSchema& ps, const WVertex& v) {
  WVertex out = v;
  for (auto& [l, s] : out.statusMap) {
    NeighsResult r;
    if (s.kind == Status::Kind::Pending) {
      r = ps.checkNeighs(l, v.value, {}, {});
    } else if (s.kind == Status::Kind::WaitingFor) {
      DepSet fs = s.fs;
      for (const auto& d : s.ds)
        if (!s.oks.count(d)) fs.insert(d);
      r = ps.checkNeighs(l, v.value, s.oks, fs);
    } else {
      continue;
    }
    s = r.ok ? Status::ok() : Status::failed(r.reason);
  }
  return out;
}

Status::Kind PregelResult::kind(const EntityId& n, LabelId l) const {
  auto it = statuses.find(n);
  if (it == statuses.end()) return Status::Kind::Undefined;
  auto jt = it->second.find(l);
  return jt == it->second.end() ? Status::Kind::Undefined : jt->second.kind;
}

std::set<std::pair<EntityId, LabelId>> PregelResult::okPairs() const {
  std::set<std::pair<EntityId, LabelId>> out;
  for (const auto& [n, m] : statuses)
    for (const auto& [l, s] : m)
      if (s.kind == Status::Kind::Ok) out.insert({n, l});
  return out;
}

namespace {

StatusHistogram histogram(const WPregelGraph& g) {
  StatusHistogram h;
  for (const auto& v : g.vertices)
    for (const auto& [l, s] : v.statusMap) ++h[s.kind];
  return h;
}

// Greatest fixpoint over the labels the loop left open: assume them all,
// drop the ones failing under the assumption until nothing changes.
std::size_t settleOpen(const WShExPSchema& ps, WPregelGraph& g, const ExecOptions& exec) {
  const std::size_t V = g.vertices.size();
  std::vector<EntityId> ids(V);
  for (std::size_t i = 0; i < V; ++i) ids[i] = g.vertices[i].value.id;
  auto indexOf = [&ids](const EntityId& e) -> std::optional<std::size_t> {
    auto it = std::lower_bound(ids.begin(), ids.end(), e);
    if (it == ids.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - ids.begin());
  };

  std::vector<std::pair<std::size_t, LabelId>> open;
  std::set<std::pair<std::size_t, LabelId>> assumed;
  for (std::size_t i = 0; i < V; ++i)
    for (const auto& [l, s] : g.vertices[i].statusMap)
      if (!s.decided()) {
        open.push_back({i, l});
        assumed.insert({i, l});
      }
  if (open.empty()) return 0;

  auto holds = [&](const Dep& d) {
    auto j = indexOf(d.node);
    if (!j) return false;
    return g.vertices[*j].status(d.label).kind == Status::Kind::Ok || assumed.count({*j, d.label}) > 0;
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::pair<std::size_t, LabelId>> live(assumed.begin(), assumed.end());
    std::vector<char> fails(live.size(), 0);
    forEachIndex(live.size(), exec, [&](std::size_t k) {
      fails[k] = !ps.conformsWith(live[k].second, g.vertices[live[k].first].value, holds);
    });
    for (std::size_t k = 0; k < live.size(); ++k)
      if (fails[k]) {
        assumed.erase(live[k]);
        changed = true;
      }
  }
  for (const auto& [i, l] : open)
    g.vertices[i].statusMap[l] = assumed.count({i, l}) ? Status::ok() : Status::failed("unsupported by neighbours");
  return open.size();
}

}  // namespace

PregelResult pregelValidate(const WikibaseGraph& g, const WShExSchema& schema, LabelId start,
                            const PregelRunOptions& opts) {
  if (start >= schema.size()) throw SchemaError("unknown start label");
  WShExPSchema ps(schema);
  auto params = ps.params();
  WPregelGraph pg = buildPregelGraph(g);

  PregelResult res;
  PregelOptions po;
  po.exec = opts.exec;
  po.maxIterations = opts.maxSupersteps ? *opts.maxSupersteps : pg.vertices.size() * schema.size() + 2;

  std::atomic<std::size_t> unknown{0};
  auto observe = [&](std::size_t step, const Outbox<MsgMap>& out) {
    res.histograms.push_back(histogram(pg));
    if (!opts.recordLog) return;
    for (const auto& [d, mm] : out)
      for (const auto& [l, m] : mm) res.log.push_back({step, pg.vertices[d].value.id, l, m});
  };
  res.stats = runPregel(
      pg, MsgMap{{start, Msg::validateMsg()}},
      [&](std::size_t, const WVertex& v, const MsgMap& m) { return vProg(params, v, m, &unknown); },
      [&](const Triplet<WVertex, EdgePayload>& t) { return sendMsg(params, t); }, mergeMsgMap, po,
      std::function<void(std::size_t, const Outbox<MsgMap>&)>(observe));
  res.unknownTransitions = unknown.load();

  if (opts.cycles == CyclePolicy::Pessimistic) {
    for (auto& v : pg.vertices) {
      for (const auto& [l, s] : v.statusMap)
        if (!s.decided()) ++res.settledAfterLoop;
      v = checkRemaining(ps, v);
    }
  } else {
    res.settledAfterLoop = settleOpen(ps, pg, opts.exec);
  }

  for (const auto& v : pg.vertices)
    if (!v.statusMap.empty()) res.statuses[v.value.id] = v.statusMap;
  return res;
}

PregelSubset pregelSubset(const WikibaseGraph& g, const WShExSchema& schema, LabelId start,
                          const PregelRunOptions& opts) {
  PregelSubset out;
  out.run = pregelValidate(g, schema, start, opts);
  WShExPSchema ps(schema);
  const auto& run = out.run;
  auto holds = [&run](const Dep& d) { return run.ok(d.node, d.label); };

  std::vector<std::pair<EntityId, LabelId>> pairs;
  for (const auto& p : run.okPairs()) pairs.push_back(p);
  std::vector<std::vector<Statement>> used(pairs.size());
  forEachIndex(pairs.size(), opts.exec, [&](std::size_t k) {
    const auto& [n, l] = pairs[k];
    auto ns = g.neighs(n);
    VertexPayload v{n, std::vector<Statement>(ns.begin(), ns.end())};
    Witness w;
    if (!ps.conformsWith(l, v, holds, &w)) return;
    for (const auto& u : w.triples) used[k].push_back(*u.statement);
  });
  std::vector<Statement> all;
  for (auto& u : used) all.insert(all.end(), u.begin(), u.end());
  out.graph = WikibaseGraph(std::move(all));
  return out;
}

std::string traceLine(const LoggedMsg& m, const WShExSchema& schema) {
  auto name = [&schema](LabelId l) { return schema.name(l); };
  return "msg " + std::to_string(m.step) + " " + m.to.str() + " " + schema.name(m.label) + " " + msgStr(m.msg, name);
}

std::vector<std::string> superstepLines(const PregelResult& r) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < r.stats.steps.size(); ++k) {
    const auto& st = r.stats.steps[k];
    std::string line = "step " + std::to_string(k + 1) + " messages=" + std::to_string(st.messages) +
                       " activated=" + std::to_string(st.activated);
    // Observed before the next round, so it is the state after this one.
    if (!r.histograms.empty()) {
      const auto& h = r.histograms[std::min(k + 1, r.histograms.size() - 1)];
      for (auto kind : {Status::Kind::Ok, Status::Kind::Failed, Status::Kind::Pending, Status::Kind::WaitingFor}) {
        auto it = h.find(kind);
        line += std::string(" ") + kindName(kind) + "=" + std::to_string(it == h.end() ? 0 : it->second);
      }
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace wsub

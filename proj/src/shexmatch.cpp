#include "wsub/shexmatch.hpp"

#include <algorithm>

namespace wsub {

namespace {

void erase(PropertySpec& ps) {
  ps.valueRef.reset();
  for (auto& c : ps.children) erase(c);
}

void erase(TripleExpr& te) {
  te.valueRef.reset();
  erase(te.quals.spec);
  for (auto& c : te.children) erase(c);
}

void erase(ShapeExpr& se) {
  if (se.kind == ShapeExpr::Kind::Shape) erase(se.te);
  for (auto& c : se.children) erase(c);
}

}  // namespace

WShExSchema eraseRefs(const WShExSchema& schema) {
  WShExSchema out = schema;
  for (LabelId l = 0; l < out.size(); ++l) erase(out.mutableDelta(l));
  return out;
}

ShexMatcher::ShexMatcher(const WShExSchema& erased) : schema_(&erased), ev_(erased) {}

std::optional<NodeMatch> ShexMatcher::match(const EntityId& n, std::span<const Statement> neighs) const {
  EvalContext ctx;
  ctx.neighs = [&](const EntityId& x) { return x == n ? neighs : std::span<const Statement>{}; };
  for (LabelId l = 0; l < schema_->size(); ++l) {
    Witness w;
    if (!ev_.conformsLabel(n, l, ctx, &w)) continue;
    NodeMatch m{l, {}};
    for (const auto& u : w.triples) m.consumed.push_back(*u.statement);
    std::sort(m.consumed.begin(), m.consumed.end());
    m.consumed.erase(std::unique(m.consumed.begin(), m.consumed.end()), m.consumed.end());
    return m;
  }
  return std::nullopt;
}

std::optional<NodeMatch> nodeMatch(const WikibaseGraph& g, const EntityId& n, const WShExSchema& erased) {
  return ShexMatcher(erased).match(n, g.neighs(n));
}

ShexMatchStats shexMatchSubset(DumpReader& in, std::ostream& out, const WShExSchema& erased,
                               const StreamOptions& opts) {
  ShexMatcher matcher(erased);
  ShexMatchStats st;
  std::vector<EntityDocument> batch;
  std::vector<std::optional<NodeMatch>> results;
  const std::size_t size = std::max<std::size_t>(opts.batch, 1);

  auto flush = [&] {
    results.assign(batch.size(), std::nullopt);
    forEachIndex(batch.size(), opts.exec, [&](std::size_t i) {
      auto& d = batch[i];
      std::sort(d.statements.begin(), d.statements.end());
      d.statements.erase(std::unique(d.statements.begin(), d.statements.end()), d.statements.end());
      results[i] = matcher.match(d.id, d.statements);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!results[i]) continue;
      ++st.entitiesMatched;
      ++st.perLabel[results[i]->label];
      if (st.matched.size() < opts.matchedLimit)
        st.matched.push_back(batch[i].id);
      else
        st.matchedTruncated = true;
      if (results[i]->consumed.empty()) continue;
      st.statementsEmitted += results[i]->consumed.size();
      writeDocument(out, EntityDocument{batch[i].id, std::move(results[i]->consumed)});
    }
    batch.clear();
  };

  EntityDocument d;
  while (in.next(d)) {
    ++st.entitiesRead;
    batch.push_back(std::move(d));
    if (batch.size() >= size) flush();
  }
  flush();
  return st;
}

}  // namespace wsub

#include "oracle/naive_conformance.hpp"

#include <map>
#include <vector>

namespace oracle {

using namespace wsub;

namespace {

struct Naive {
  const WikibaseGraph& g;
  const Tau& tau;
  const WShExSchema& schema;

  bool valueRef(const Value& y, const std::optional<LabelId>& l) {
    if (!l) return true;
    if (auto e = asEntity(y)) return tau.count({*e, *l}) > 0;
    return shape(y, schema.delta(*l));
  }

  // Qualifier rules over a subset of the pairs.
  bool ps(const std::vector<Qualifier>& qs, unsigned mask, const PropertySpec& p) {
    switch (p.kind) {
      case PropertySpec::Kind::Empty: return mask == 0;
      case PropertySpec::Kind::Constraint: {
        if (mask == 0 || (mask & (mask - 1))) return false;
        unsigned i = __builtin_ctz(mask);
        return qs[i].property == p.property && valueRef(qs[i].value, p.valueRef);
      }
      case PropertySpec::Kind::OneOf: return ps(qs, mask, p.children[0]) || ps(qs, mask, p.children[1]);
      case PropertySpec::Kind::EachOf:
        for (unsigned sub = mask;; sub = (sub - 1) & mask) {
          if (ps(qs, sub, p.children[0]) && ps(qs, mask & ~sub, p.children[1])) return true;
          if (sub == 0) return false;
        }
      case PropertySpec::Kind::Star:
        if (mask == 0) return true;
        for (unsigned sub = mask; sub != 0; sub = (sub - 1) & mask)
          if (ps(qs, sub, p.children[0]) && ps(qs, mask & ~sub, p)) return true;
        return false;
    }
    return false;
  }

  bool qualSpec(const Statement& s, const QualifierSpec& q) {
    std::vector<Qualifier> items;
    auto props = propsOf(q.spec);
    for (const auto& x : s.qualifiers())
      if (q.closed || props.count(x.property)) items.push_back(x);
    return ps(items, (1u << items.size()) - 1, q.spec);
  }

  std::map<std::pair<unsigned, const TripleExpr*>, bool> memo;

  bool te(const std::vector<const Statement*>& ts, unsigned mask, const TripleExpr& t) {
    auto key = std::make_pair(mask, &t);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool r = teStep(ts, mask, t);
    memo[key] = r;
    return r;
  }

  bool teStep(const std::vector<const Statement*>& ts, unsigned mask, const TripleExpr& t) {
    switch (t.kind) {
      case TripleExpr::Kind::Empty: return mask == 0;
      case TripleExpr::Kind::Constraint: {
        if (mask == 0 || (mask & (mask - 1))) return false;
        const Statement& s = *ts[__builtin_ctz(mask)];
        return s.property() == t.property && valueRef(s.value(), t.valueRef) && qualSpec(s, t.quals);
      }
      case TripleExpr::Kind::OneOf: return te(ts, mask, t.children[0]) || te(ts, mask, t.children[1]);
      case TripleExpr::Kind::EachOf:
        for (unsigned sub = mask;; sub = (sub - 1) & mask) {
          if (te(ts, sub, t.children[0]) && te(ts, mask & ~sub, t.children[1])) return true;
          if (sub == 0) return false;
        }
      case TripleExpr::Kind::Star:
        if (mask == 0) return true;
        for (unsigned sub = mask; sub != 0; sub = (sub - 1) & mask)
          if (te(ts, sub, t.children[0]) && te(ts, mask & ~sub, t)) return true;
        return false;
    }
    return false;
  }

  bool shape(const Value& n, const ShapeExpr& se) {
    switch (se.kind) {
      case ShapeExpr::Kind::Cond: return se.cond.test(n);
      case ShapeExpr::Kind::And: return shape(n, se.children[0]) && shape(n, se.children[1]);
      case ShapeExpr::Kind::Ref:
        if (auto e = asEntity(n)) return tau.count({*e, se.ref}) > 0;
        return shape(n, schema.delta(se.ref));
      case ShapeExpr::Kind::Shape: {
        std::vector<const Statement*> ts;
        auto preds = predsOf(se.te);
        if (auto e = asEntity(n))
          for (const auto& s : g.neighs(*e))
            if (se.closed || preds.count(s.property())) ts.push_back(&s);
        Naive inner{g, tau, schema, {}};
        return inner.te(ts, (1u << ts.size()) - 1, se.te);
      }
    }
    return false;
  }
};

}  // namespace

bool naiveConforms(const WikibaseGraph& g, const Value& n, const Tau& tau, const ShapeExpr& se,
                   const WShExSchema& schema) {
  Naive nv{g, tau, schema, {}};
  return nv.shape(n, se);
}

bool bruteForceMaximal(const WikibaseGraph& g, const WShExSchema& schema, std::size_t maxFree, Tau& out) {
  Tau none, full;
  for (const auto& n : g.nodes())
    for (LabelId l = 0; l < schema.size(); ++l) full.insert({n, l});

  // Monotonicity: a pair that holds under the empty assignment holds under
  // every assignment, and one that fails under the full assignment fails
  // under every assignment. Only the rest needs enumeration.
  Tau fixedIn;
  std::vector<std::pair<EntityId, LabelId>> freePairs;
  for (const auto& p : full) {
    bool lo = naiveConforms(g, p.first, none, schema.delta(p.second), schema);
    bool hi = naiveConforms(g, p.first, full, schema.delta(p.second), schema);
    if (lo)
      fixedIn.insert(p);
    else if (hi)
      freePairs.push_back(p);
  }
  if (freePairs.size() > maxFree) return false;

  out = fixedIn;
  const std::size_t k = freePairs.size();
  for (unsigned long subset = 0; subset < (1ul << k); ++subset) {
    Tau tau = fixedIn;
    for (std::size_t i = 0; i < k; ++i)
      if (subset & (1ul << i)) tau.insert(freePairs[i]);
    bool valid = true;
    for (std::size_t i = 0; i < k && valid; ++i)
      if (subset & (1ul << i))
        valid = naiveConforms(g, freePairs[i].first, tau, schema.delta(freePairs[i].second), schema);
    if (valid)
      for (std::size_t i = 0; i < k; ++i)
        if (subset & (1ul << i)) out.insert(freePairs[i]);
  }
  return true;
}

}  // namespace oracle

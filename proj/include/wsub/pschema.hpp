#pragma once

// Generic vertex machine for schema validation on top of runPregel. A
// vertex keeps one status per shape label; labels move through
// Undefined -> Pending -> WaitingFor -> Ok | Failed as Validate, WaitFor and
// Checked messages arrive.

#include <atomic>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "wsub/pregel.hpp"
#include "wsub/wgraph.hpp"
#include "wsub/wshex.hpp"

namespace wsub {

/// A neighbour a label waits on: node reached through property, checked
/// against label.
struct Dep {
  EntityId node;
  EntityId property;
  LabelId label = 0;

  auto operator<=>(const Dep&) const = default;
};

using DepSet = std::set<Dep>;

struct Status {
  enum class Kind { Undefined, Ok, Failed, Pending, WaitingFor };

  Kind kind = Kind::Undefined;
  std::string reason;   // Failed
  DepSet ds, oks, fs;   // WaitingFor

  static Status ok() { return {Kind::Ok, {}, {}, {}, {}}; }
  static Status failed(std::string why) { return {Kind::Failed, std::move(why), {}, {}, {}}; }
  static Status pending() { return {Kind::Pending, {}, {}, {}, {}}; }
  static Status waitingFor(DepSet ds, DepSet oks = {}, DepSet fs = {}) {
    return {Kind::WaitingFor, {}, std::move(ds), std::move(oks), std::move(fs)};
  }

  bool decided() const { return kind == Kind::Ok || kind == Kind::Failed; }
  bool operator==(const Status&) const = default;
};

const char* kindName(Status::Kind k);

/// All four message forms share one representation: a bare Validate is
/// {validate}, WaitFor(ds) is {ds}, Checked(oks, fs) is {oks, fs}, anything
/// else is a combination produced by merging.
struct Msg {
  bool validate = false;
  DepSet ds, oks, fs;

  static Msg validateMsg() { return {true, {}, {}, {}}; }
  static Msg waitFor(DepSet ds) { return {false, std::move(ds), {}, {}}; }
  static Msg checked(DepSet oks, DepSet fs) { return {false, {}, std::move(oks), std::move(fs)}; }

  bool empty() const { return !validate && ds.empty() && oks.empty() && fs.empty(); }
  bool operator==(const Msg&) const = default;
  bool operator<(const Msg& o) const {
    return std::tie(validate, ds, oks, fs) < std::tie(o.validate, o.ds, o.oks, o.fs);
  }
};

Msg mergeMsg(const Msg& a, const Msg& b);

using MsgMap = std::map<LabelId, Msg>;

/// Label-wise mergeMsg; labels present on one side are copied.
MsgMap mergeMsgMap(const MsgMap& a, const MsgMap& b);

/// `Validate`, `WaitFor{..}`, `Checked{..}{..}` or `Combined(..)`, with deps
/// written (node,property,label).
std::string msgStr(const Msg& m, const std::function<std::string(LabelId)>& labelName);
std::string depStr(const Dep& d, const std::function<std::string(LabelId)>& labelName);

template <class Payload>
struct ShapedVertex {
  Payload value;
  std::map<LabelId, Status> statusMap;  // absent: Undefined

  const Status& status(LabelId l) const {
    static const Status undefined;
    auto it = statusMap.find(l);
    return it == statusMap.end() ? undefined : it->second;
  }
};

struct LocalResult {
  enum class Kind { Ok, Failed, Pending };
  Kind kind = Kind::Ok;
  std::string reason;         // Failed
  std::set<LabelId> labels;   // Pending: labels the neighbours must satisfy
};

struct NeighsResult {
  bool ok = false;
  std::string reason;
};

using TripleConstraints = std::set<std::pair<EntityId, LabelId>>;

/// The schema-specific part of the machine. checkNeighs receives the
/// vertex payload as well as the settled deps so that an instantiation can
/// recheck the full neighbourhood.
template <class Payload, class Edge>
struct PSchemaParams {
  std::function<LocalResult(LabelId, const Payload&)> checkLocal;
  std::function<NeighsResult(LabelId, const Payload&, const DepSet& oks, const DepSet& fs)> checkNeighs;
  std::function<const TripleConstraints&(LabelId)> tripleConstraints;
  std::function<EntityId(const Edge&)> cnvEdge;
  /// Node identity of a payload, used to build deps.
  std::function<EntityId(const Payload&)> nodeOf;
};

/// Transition table of the vertex program. Parts of a combined message are
/// applied in the order validate, waitFor, checked. Transitions outside the
/// table leave the status alone and bump unknown when given.
template <class Payload, class Edge>
ShapedVertex<Payload> vProg(const PSchemaParams<Payload, Edge>& ps, const ShapedVertex<Payload>& v, const MsgMap& msgs,
                            std::atomic<std::size_t>* unknown = nullptr) {
  using K = Status::Kind;
  ShapedVertex<Payload> out = v;
  auto odd = [&] {
    if (unknown) ++*unknown;
  };
  for (const auto& [l, m] : msgs) {
    Status s = out.status(l);
    if (m.validate) {
      if (s.kind == K::Undefined || s.kind == K::Pending) {
        LocalResult r = ps.checkLocal(l, out.value);
        switch (r.kind) {
          case LocalResult::Kind::Ok: s = Status::ok(); break;
          case LocalResult::Kind::Failed: s = Status::failed(r.reason); break;
          case LocalResult::Kind::Pending: s = Status::pending(); break;
        }
      }
    }
    if (!m.ds.empty()) {
      if (s.kind == K::Pending)
        s = Status::waitingFor(m.ds);
      else
        odd();
    }
    if (!m.oks.empty() || !m.fs.empty()) {
      if (s.kind == K::WaitingFor) {
        s.oks.insert(m.oks.begin(), m.oks.end());
        s.fs.insert(m.fs.begin(), m.fs.end());
        bool complete = true;
        for (const auto& d : s.ds)
          if (!s.oks.count(d) && !s.fs.count(d)) {
            complete = false;
            break;
          }
        if (complete) {
          NeighsResult r = ps.checkNeighs(l, out.value, s.oks, s.fs);
          s = r.ok ? Status::ok() : Status::failed(r.reason);
        }
      } else {
        odd();
      }
    }
    if (s.kind == K::Undefined)
      out.statusMap.erase(l);
    else
      out.statusMap[l] = std::move(s);
  }
  return out;
}

/// Messages of one triplet: a Pending source asks its neighbour to validate
/// and records the wait; a waiting source collects settled neighbours.
template <class Payload, class Edge>
Outbox<MsgMap> sendMsg(const PSchemaParams<Payload, Edge>& ps,
                       const Triplet<ShapedVertex<Payload>, Edge>& t) {
  using K = Status::Kind;
  Outbox<MsgMap> out;
  const EntityId p = ps.cnvEdge(t.data);
  const EntityId target = ps.nodeOf(t.dst.value);
  for (const auto& [l, s] : t.src.statusMap) {
    if (s.kind == K::Pending) {
      for (const auto& [q, l2] : ps.tripleConstraints(l)) {
        if (q != p) continue;
        out.push_back({t.srcId, MsgMap{{l, Msg::waitFor({Dep{target, p, l2}})}}});
        out.push_back({t.dstId, MsgMap{{l2, Msg::validateMsg()}}});
      }
    } else if (s.kind == K::WaitingFor) {
      for (const auto& d : s.ds) {
        if (d.node != target || d.property != p || s.oks.count(d) || s.fs.count(d)) continue;
        const Status& there = t.dst.status(d.label);
        if (there.kind == K::Ok)
          out.push_back({t.srcId, MsgMap{{l, Msg::checked({d}, {})}}});
        else if (there.kind == K::Failed)
          out.push_back({t.srcId, MsgMap{{l, Msg::checked({}, {d})}}});
      }
    }
  }
  return out;
}

}  // namespace wsub

#pragma once

// Single-process bulk synchronous vertex programs in the GraphX style: an
// initial message to every vertex, then supersteps of send, merge and apply
// until a round produces no messages.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsub/parallel.hpp"

namespace wsub {

template <class VD, class ED>
struct PregelGraph {
  struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    ED data;
  };
  std::vector<VD> vertices;
  std::vector<Edge> edges;
};

template <class VD, class ED>
struct Triplet {
  std::size_t srcId;
  const VD& src;
  const ED& data;
  std::size_t dstId;
  const VD& dst;
};

template <class M>
using Outbox = std::vector<std::pair<std::size_t, M>>;

struct SuperstepStats {
  std::size_t messages = 0;   // before merging
  std::size_t activated = 0;  // vertices that received something
};

struct PregelStats {
  std::size_t supersteps = 0;  // message rounds, the final empty one included
  std::vector<SuperstepStats> steps;
};

class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(std::size_t budget)
      : std::runtime_error("superstep budget of " + std::to_string(budget) + " exceeded"), budget_(budget) {}
  std::size_t budget() const { return budget_; }

private:
  std::size_t budget_;
};

struct PregelOptions {
  std::size_t maxIterations = 0;  // 0: unbounded
  ExecOptions exec;
};

/// Runs the program to quiescence. vprog(id, vertex, msg) returns the new
/// vertex, send(triplet) the messages of one edge, merge combines two
/// messages for the same vertex. The parallel path computes edges and
/// vertices concurrently; messages are delivered in edge order and reduced
/// per destination in that order, so any associative merge gives the same
/// result as the serial path. observe, when set, sees each round's
/// unmerged messages.
template <class VD, class ED, class M, class VProg, class Send, class Merge>
PregelStats runPregel(PregelGraph<VD, ED>& g, const M& initial, VProg&& vprog, Send&& send, Merge&& merge,
                      const PregelOptions& opts = {},
                      const std::function<void(std::size_t, const Outbox<M>&)>& observe = {}) {
  const std::size_t V = g.vertices.size();
  const std::size_t E = g.edges.size();
  forEachIndex(V, opts.exec, [&](std::size_t i) { g.vertices[i] = vprog(i, g.vertices[i], initial); });

  PregelStats stats;
  std::vector<Outbox<M>> perEdge(E);
  for (std::size_t step = 1;; ++step) {
    if (opts.maxIterations && step > opts.maxIterations) throw BudgetExceeded(opts.maxIterations);

    forEachIndex(E, opts.exec, [&](std::size_t e) {
      const auto& ed = g.edges[e];
      perEdge[e] = send(Triplet<VD, ED>{ed.src, g.vertices[ed.src], ed.data, ed.dst, g.vertices[ed.dst]});
    });
    Outbox<M> out;
    for (auto& box : perEdge) {
      for (auto& m : box) out.push_back(std::move(m));
      box.clear();
    }
    stats.supersteps = step;
    stats.steps.push_back({out.size(), 0});
    if (observe) observe(step, out);
    if (out.empty()) break;

    // Stable bucket by destination.
    std::vector<std::size_t> start(V + 1, 0);
    for (const auto& [d, m] : out) ++start[d + 1];
    for (std::size_t i = 0; i < V; ++i) start[i + 1] += start[i];
    std::vector<std::size_t> order(out.size());
    {
      std::vector<std::size_t> at(start.begin(), start.end() - 1);
      for (std::size_t k = 0; k < out.size(); ++k) order[at[out[k].first]++] = k;
    }
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < V; ++i)
      if (start[i + 1] > start[i]) active.push_back(i);
    stats.steps.back().activated = active.size();

    forEachIndex(active.size(), opts.exec, [&](std::size_t a) {
      std::size_t d = active[a];
      std::optional<M> acc;
      for (std::size_t k = start[d]; k < start[d + 1]; ++k) {
        M& m = out[order[k]].second;
        acc = acc ? merge(*acc, m) : std::move(m);
      }
      g.vertices[d] = vprog(d, g.vertices[d], *acc);
    });
  }
  return stats;
}

}  // namespace wsub

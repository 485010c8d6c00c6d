#pragma once

// Reference-erased matching: each entity is checked against the shapes
// using only its own neighbourhood, so a dump is filtered in one pass.

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "wsub/conformance.hpp"
#include "wsub/dumpio.hpp"
#include "wsub/parallel.hpp"

namespace wsub {

/// Value references of triple and qualifier constraints become "any value".
/// Node-level references and constraints are kept.
WShExSchema eraseRefs(const WShExSchema& schema);

struct NodeMatch {
  LabelId label;
  std::vector<Statement> consumed;  // sorted; empty for node-constraint matches
};

/// Expects an erased schema. Labels are tried in declaration order and the
/// first match wins.
class ShexMatcher {
public:
  explicit ShexMatcher(const WShExSchema& erased);

  std::optional<NodeMatch> match(const EntityId& n, std::span<const Statement> neighs) const;
  const WShExSchema& schema() const { return *schema_; }

private:
  const WShExSchema* schema_;
  Evaluator ev_;
};

std::optional<NodeMatch> nodeMatch(const WikibaseGraph& g, const EntityId& n, const WShExSchema& erased);

struct ShexMatchStats {
  std::size_t entitiesRead = 0;
  std::size_t entitiesMatched = 0;
  std::size_t statementsEmitted = 0;
  std::map<LabelId, std::size_t> perLabel;
  std::vector<EntityId> matched;  // in stream order, up to matchedLimit
  bool matchedTruncated = false;
};

struct StreamOptions {
  ExecOptions exec;
  std::size_t batch = 4096;         // documents evaluated together
  std::size_t matchedLimit = 10000;  // ids kept in ShexMatchStats::matched
};

/// Writes, for every matching entity, the statements its match consumed.
/// Output order follows the input.
ShexMatchStats shexMatchSubset(DumpReader& in, std::ostream& out, const WShExSchema& erased,
                               const StreamOptions& opts = {});

}  // namespace wsub

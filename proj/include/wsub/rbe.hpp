#pragma once

// Bags over an ordered alphabet and regular bag expressions
// (epsilon | a | e|e | e;e | e*) with an exact membership test.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wsub {

template <class Sym>
class Bag {
public:
  using Entry = std::pair<Sym, std::size_t>;

  Bag() = default;
  Bag(std::initializer_list<Entry> entries) {
    for (const auto& [s, c] : entries) add(s, c);
  }

  void add(const Sym& s, std::size_t n = 1) {
    if (n == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, const Sym& k) { return e.first < k; });
    if (it != entries_.end() && !(s < it->first))
      it->second += n;
    else
      entries_.insert(it, Entry{s, n});
  }

  std::size_t count(const Sym& s) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                               [](const Entry& e, const Sym& k) { return e.first < k; });
    return (it != entries_.end() && !(s < it->first)) ? it->second : 0;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second;
    return n;
  }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool operator==(const Bag&) const = default;
  bool operator<(const Bag& o) const { return entries_ < o.entries_; }

private:
  std::vector<Entry> entries_;  // sorted by symbol, counts > 0
};

template <class Sym>
Bag<Sym> bagUnion(const Bag<Sym>& a, const Bag<Sym>& b) {
  Bag<Sym> out = a;
  for (const auto& [s, c] : b.entries()) out.add(s, c);
  return out;
}

struct Cardinality {
  std::size_t min = 1;
  std::optional<std::size_t> max = 1;  // nullopt = unbounded

  static Cardinality exactlyOne() { return {1, 1}; }
  static Cardinality optional() { return {0, 1}; }
  static Cardinality star() { return {0, std::nullopt}; }
  static Cardinality plus() { return {1, std::nullopt}; }

  bool valid() const { return !max || *max >= min; }
  bool operator==(const Cardinality&) const = default;
};

/// Rewrites e{m,n} with the algebra's own constructors: m mandatory copies,
/// then n-m optional copies, or a trailing star when unbounded.
template <class E, class MkEmpty, class MkOr, class MkSeq, class MkStar>
E desugarWith(const E& e, const Cardinality& c, MkEmpty mkEmpty, MkOr mkOr, MkSeq mkSeq, MkStar mkStar) {
  if (!c.valid()) throw std::invalid_argument("cardinality max < min");
  if (c == Cardinality::exactlyOne()) return e;
  if (c.min == 0 && c.max == std::optional<std::size_t>(1)) return mkOr(e, mkEmpty());
  if (c.min == 1 && !c.max) return mkSeq(e, mkStar(e));
  if (c.min == 0 && !c.max) return mkStar(e);

  std::vector<E> parts;
  for (std::size_t i = 0; i < c.min; ++i) parts.push_back(e);
  if (c.max) {
    for (std::size_t i = c.min; i < *c.max; ++i) parts.push_back(mkOr(e, mkEmpty()));
  } else {
    parts.push_back(mkStar(e));
  }
  if (parts.empty()) return mkEmpty();
  E out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = mkSeq(out, parts[i]);
  return out;
}

template <class Sym>
class Rbe {
public:
  enum class Kind { Empty, Symbol, Or, Seq, Star };

  static Rbe empty() { return finish(make(Kind::Empty)); }
  static Rbe symbol(Sym s) {
    auto n = make(Kind::Symbol);
    n->sym = std::move(s);
    return finish(n);
  }
  static Rbe orElse(Rbe a, Rbe b) { return binary(Kind::Or, std::move(a), std::move(b)); }
  static Rbe seq(Rbe a, Rbe b) { return binary(Kind::Seq, std::move(a), std::move(b)); }
  static Rbe star(Rbe a) {
    auto n = make(Kind::Star);
    n->left = std::move(a.node_);
    return finish(n);
  }
  static Rbe desugar(const Rbe& e, const Cardinality& c) {
    return desugarWith(
        e, c, [] { return empty(); }, [](Rbe a, Rbe b) { return orElse(a, b); },
        [](Rbe a, Rbe b) { return seq(a, b); }, [](Rbe a) { return star(a); });
  }

  Kind kind() const { return node_->kind; }
  const Sym& sym() const { return *node_->sym; }
  Rbe left() const { return Rbe(node_->left); }
  Rbe right() const { return Rbe(node_->right); }
  bool nullable() const { return node_->nullable; }
  const std::set<Sym>& alphabet() const { return node_->alphabet; }

  std::size_t depth() const {
    switch (kind()) {
      case Kind::Empty:
      case Kind::Symbol: return 1;
      case Kind::Star: return 1 + left().depth();
      default: return 1 + std::max(left().depth(), right().depth());
    }
  }

  template <class Show>
  std::string str(Show show) const {
    switch (kind()) {
      case Kind::Empty: return "()";
      case Kind::Symbol: return show(sym());
      case Kind::Or: return "(" + left().str(show) + " | " + right().str(show) + ")";
      case Kind::Seq: return "(" + left().str(show) + " ; " + right().str(show) + ")";
      case Kind::Star: return left().str(show) + "*";
    }
    return {};
  }

private:
  struct Node {
    Kind kind;
    std::optional<Sym> sym;
    std::shared_ptr<const Node> left, right;
    bool nullable = false;
    std::size_t minSize = 0;
    std::optional<std::size_t> maxSize = 0;
    std::set<Sym> alphabet;
  };

  explicit Rbe(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> make(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
  }

  static Rbe binary(Kind k, Rbe a, Rbe b) {
    auto n = make(k);
    n->left = std::move(a.node_);
    n->right = std::move(b.node_);
    return finish(n);
  }

  static Rbe finish(std::shared_ptr<Node> n) {
    const Node* l = n->left.get();
    const Node* r = n->right.get();
    switch (n->kind) {
      case Kind::Empty:
        n->nullable = true;
        break;
      case Kind::Symbol:
        n->minSize = 1;
        n->maxSize = 1;
        n->alphabet.insert(*n->sym);
        break;
      case Kind::Or:
        n->nullable = l->nullable || r->nullable;
        n->minSize = std::min(l->minSize, r->minSize);
        n->maxSize = (l->maxSize && r->maxSize) ? std::optional(std::max(*l->maxSize, *r->maxSize)) : std::nullopt;
        break;
      case Kind::Seq:
        n->nullable = l->nullable && r->nullable;
        n->minSize = l->minSize + r->minSize;
        n->maxSize = (l->maxSize && r->maxSize) ? std::optional(*l->maxSize + *r->maxSize) : std::nullopt;
        break;
      case Kind::Star:
        n->nullable = true;
        n->minSize = 0;
        n->maxSize = (l->maxSize && *l->maxSize == 0) ? std::optional<std::size_t>(0) : std::nullopt;
        break;
    }
    if (l) n->alphabet.insert(l->alphabet.begin(), l->alphabet.end());
    if (r) n->alphabet.insert(r->alphabet.begin(), r->alphabet.end());
    return Rbe(std::shared_ptr<const Node>(std::move(n)));
  }

  std::shared_ptr<const Node> node_;

public:
  /// Membership test for one expression. Backtracks over bag partitions,
  /// memoized on (node, residual bag); the memo lives as long as the object
  /// so repeated queries against the same expression share it.
  class Matcher {
  public:
    explicit Matcher(const Rbe& e) : root_(e.node_) {}
    bool operator()(const Bag<Sym>& w) { return run(root_.get(), w); }

  private:
    bool run(const Node* e, const Bag<Sym>& w) {
      if (w.size() < e->minSize) return false;
      if (e->maxSize && w.size() > *e->maxSize) return false;
      for (const auto& [s, c] : w.entries())
        if (!e->alphabet.count(s)) return false;
      if (w.empty()) return e->nullable;

      auto key = std::make_pair(e, w);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
      bool r = step(e, w);
      memo_.emplace(std::move(key), r);
      return r;
    }

    bool step(const Node* e, const Bag<Sym>& w) {
      switch (e->kind) {
        case Kind::Empty: return false;  // w non-empty here
        case Kind::Symbol: return w.entries().size() == 1 && w.entries()[0].second == 1;
        case Kind::Or: return run(e->left.get(), w) || run(e->right.get(), w);
        case Kind::Seq: return splits(w, false, [&](const Bag<Sym>& a, const Bag<Sym>& b) {
            return run(e->left.get(), a) && run(e->right.get(), b);
          });
        case Kind::Star:
          // One chunk always holds an occurrence of the least symbol, and
          // empty chunks are never required, so this split is canonical.
          return splits(w, true, [&](const Bag<Sym>& a, const Bag<Sym>& b) {
            return run(e->left.get(), a) && run(e, b);
          });
      }
      return false;
    }

    template <class F>
    bool splits(const Bag<Sym>& w, bool takeFirst, F&& f) {
      const auto& es = w.entries();
      std::vector<std::size_t> pick(es.size(), 0);
      if (takeFirst) pick[0] = 1;
      while (true) {
        Bag<Sym> a, b;
        for (std::size_t i = 0; i < es.size(); ++i) {
          a.add(es[i].first, pick[i]);
          b.add(es[i].first, es[i].second - pick[i]);
        }
        if (f(a, b)) return true;
        std::size_t i = 0;
        for (; i < es.size(); ++i) {
          if (pick[i] < es[i].second) {
            ++pick[i];
            break;
          }
          pick[i] = (takeFirst && i == 0) ? 1 : 0;
        }
        if (i == es.size()) return false;
      }
    }

    std::shared_ptr<const Node> root_;
    std::map<std::pair<const Node*, Bag<Sym>>, bool> memo_;
  };
};

template <class Sym>
bool matches(const Bag<Sym>& w, const Rbe<Sym>& e) {
  typename Rbe<Sym>::Matcher m(e);
  return m(w);
}

}  // namespace wsub

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "oracle/rbe_oracle.hpp"
#include "random_graphs.hpp"
#include "wsub/rbe.hpp"

using namespace wsub;
using R = Rbe<int>;
using B = Bag<int>;

TEST_CASE("bag union") {
  B w{{0, 2}, {1, 1}};
  CHECK(bagUnion(B{}, w) == w);
  CHECK(bagUnion(B{{0, 1}}, w) == B{{0, 3}, {1, 1}});
  CHECK(bagUnion(w, B{}).size() == 3);
  B z;
  z.add(2, 0);
  CHECK(z.empty());
}

TEST_CASE("bag union sizes add up") {
  std::mt19937 rng(1);
  for (int i = 0; i < 200; ++i) {
    B a, b;
    std::size_t sa = 0, sb = 0;
    for (int s = 0; s < 4; ++s) {
      std::size_t x = rng() % 4, y = rng() % 4;
      a.add(s, x);
      b.add(s, y);
      sa += x;
      sb += y;
    }
    CHECK(bagUnion(a, b).size() == sa + sb);
  }
}

TEST_CASE("basic membership") {
  CHECK(matches(B{}, R::empty()));
  CHECK_FALSE(matches(B{{0, 1}}, R::empty()));
  CHECK(matches(B{{0, 1}}, R::symbol(0)));
  CHECK_FALSE(matches(B{{0, 2}}, R::symbol(0)));
  CHECK(matches(B{}, R::star(R::symbol(0))));
  CHECK(matches(B{{0, 5}}, R::star(R::symbol(0))));
  CHECK_FALSE(matches(B{{0, 1}, {1, 1}}, R::star(R::symbol(0))));
  CHECK(matches(B{{0, 2}, {1, 2}}, R::star(R::seq(R::symbol(0), R::symbol(1)))));
  CHECK_FALSE(matches(B{{0, 2}, {1, 1}}, R::star(R::seq(R::symbol(0), R::symbol(1)))));
  // Star over a nullable body still terminates.
  CHECK(matches(B{{0, 3}}, R::star(R::orElse(R::symbol(0), R::empty()))));
  CHECK(matches(B{{0, 3}}, R::star(R::star(R::symbol(0)))));
}

TEST_CASE("researcher neighbourhood bag") {
  using S = std::pair<std::string, std::string>;
  auto e = Rbe<S>::seq(Rbe<S>::symbol({"instanceOf", "H"}),
                       Rbe<S>::seq(Rbe<S>::symbol({"birthDate", "D"}), Rbe<S>::symbol({"birthPlace", "P"})));
  Bag<S> w{{{"instanceOf", "H"}, 1}, {{"birthDate", "D"}, 1}, {{"birthPlace", "P"}, 1}};
  CHECK(matches(w, e));
  Bag<S> w2{{{"instanceOf", "H"}, 1}, {{"birthPlace", "P"}, 1}};
  CHECK_FALSE(matches(w2, e));
}

TEST_CASE("cardinality desugaring") {
  auto a = R::symbol(0);
  auto opt = R::desugar(a, Cardinality::optional());
  CHECK(opt.kind() == R::Kind::Or);
  CHECK(opt.right().kind() == R::Kind::Empty);
  auto plus = R::desugar(a, Cardinality::plus());
  CHECK(plus.kind() == R::Kind::Seq);
  CHECK(plus.right().kind() == R::Kind::Star);
  CHECK_THROWS(R::desugar(a, Cardinality{3, 2}));

  for (std::size_t m = 0; m <= 3; ++m) {
    for (std::size_t n = m; n <= 4; ++n) {
      auto e = R::desugar(a, Cardinality{m, n});
      for (std::size_t k = 0; k <= 6; ++k) CHECK(matches(B{{0, k}}, e) == (k >= m && k <= n));
    }
    auto e = R::desugar(a, Cardinality{m, std::nullopt});
    for (std::size_t k = 0; k <= 6; ++k) CHECK(matches(B{{0, k}}, e) == (k >= m));
  }
}

TEST_CASE("star accepts the empty bag for any body") {
  std::mt19937 rng(2);
  for (int i = 0; i < 100; ++i) CHECK(matches(B{}, R::star(rg::randomRbe(rng, 3, 4))));
}

TEST_CASE("or is disjunction and seq is sound") {
  std::mt19937 rng(3);
  auto bags = oracle::allBags(3, 4);
  for (int i = 0; i < 40; ++i) {
    auto e1 = rg::randomRbe(rng, 3, 3), e2 = rg::randomRbe(rng, 3, 3);
    for (const auto& w : bags) CHECK(matches(w, R::orElse(e1, e2)) == (matches(w, e1) || matches(w, e2)));
    for (std::size_t a = 0; a < bags.size(); a += 7)
      for (std::size_t b = 0; b < bags.size(); b += 5)
        if (matches(bags[a], e1) && matches(bags[b], e2)) CHECK(matches(bagUnion(bags[a], bags[b]), R::seq(e1, e2)));
  }
}

TEST_CASE("matcher agrees with the language oracle") {
  std::mt19937 rng(4);
  auto bags = oracle::allBags(3, 6);
  for (int i = 0; i < 30; ++i) {
    auto e = rg::randomRbe(rng, 3, 4);
    auto lang = oracle::language(e, 6);
    R::Matcher m(e);
    for (const auto& w : bags) CHECK(m(w) == (lang.count(w) > 0));
  }
}

TEST_CASE("partition enumeration agrees with the language oracle") {
  std::mt19937 rng(9);
  auto bags = oracle::allBags(3, 5);
  for (int i = 0; i < 20; ++i) {
    auto e = rg::randomRbe(rng, 3, 3);
    auto lang = oracle::language(e, 5);
    for (const auto& w : bags) CHECK(oracle::partitionMatches(e, w) == (lang.count(w) > 0));
  }
  Bag<int> ab{{0, 1}, {1, 1}};
  CHECK(oracle::partitionMatches(R::seq(R::symbol(0), R::symbol(1)), ab));
  CHECK_FALSE(oracle::partitionMatches(R::symbol(0), ab));
}

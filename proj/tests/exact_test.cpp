#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "resk/exact.hpp"
#include "resk/gadgets.hpp"

using namespace resk;

namespace {

// All minimum hitting sets by enumeration, as sorted item lists.
std::vector<std::vector<std::size_t>> brute_minimum(std::size_t n, const std::vector<std::vector<std::size_t>>& sets) {
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<std::vector<std::size_t>> found;
    oracle::subsets(n, k, [&](std::uint64_t bits) {
      bool all = std::all_of(sets.begin(), sets.end(), [&](const auto& s) {
        return std::any_of(s.begin(), s.end(), [&](std::size_t i) { return bits >> i & 1; });
      });
      if (all) {
        std::vector<std::size_t> sol;
        for (std::size_t i = 0; i < n; ++i)
          if (bits >> i & 1) sol.push_back(i);
        found.push_back(sol);
      }
      return false;
    });
    if (!found.empty()) return found;
  }
  return {};
}

}  // namespace

TEST(HittingSet, SmallCases) {
  HittingSet a(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(a.solve(), (std::vector<std::size_t>{0, 1}));
  HittingSet b(2, {{0}, {}});
  EXPECT_FALSE(b.feasible());
  EXPECT_FALSE(b.solve());
  HittingSet c(4, {});
  EXPECT_EQ(c.solve(), (std::vector<std::size_t>{}));
  HittingSet d(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_FALSE(d.solve(1));
  EXPECT_FALSE(d.within(1));
  ASSERT_TRUE(d.within(2));
  EXPECT_EQ(d.within(2)->size(), 2u);
}

TEST(HittingSet, MatchesEnumerationAndTieBreak) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 400; ++trial) {
    std::size_t n = 4 + rng() % 9;
    std::size_t m = 1 + rng() % 14;
    std::vector<std::vector<std::size_t>> sets(m);
    for (auto& s : sets) {
      std::size_t k = 1 + rng() % 3;
      for (std::size_t i = 0; i < k; ++i) s.push_back(rng() % n);
    }
    auto all = brute_minimum(n, sets);
    HittingSet hs(n, sets);
    auto sol = hs.solve();
    ASSERT_TRUE(sol);
    EXPECT_EQ(*sol, *std::min_element(all.begin(), all.end())) << "trial " << trial;
    auto w = hs.within(all[0].size());
    ASSERT_TRUE(w);
    EXPECT_EQ(w->size(), all[0].size());
    if (!all[0].empty()) {
      EXPECT_FALSE(hs.within(all[0].size() - 1));
    }
  }
}

TEST(HittingSet, NodeLimit) {
  // A long odd cycle of pairs needs real branching.
  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t i = 0; i < 41; ++i) sets.push_back({i, (i + 1) % 41});
  for (std::size_t i = 0; i < 41; ++i) sets.push_back({i, (i + 7) % 41, (i + 19) % 41});
  HittingSet hs(41, sets, 5);
  EXPECT_THROW(hs.solve(), LimitExceeded);
}

TEST(ExactResilience, MatchesOracleOnHardQueries) {
  for (const char* text : {"q :- R(x,y), S(y,z), T(z,x)", "q :- A(x), B(y), C(z), W^x(x,y,z)",
                           "q :- A(x), R(x,y), S(y,z), T(z,x)", "q :- R(x,y), S(y,z), T(z,x)\nfds:\nx -> z"}) {
    Query q = parse_query(text);
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
      std::mt19937_64 rng(seed);
      Database db = oracle::random_database(q, rng, 8, 4);
      auto expect = oracle::resilience(q, db);
      if (!expect) {
        EXPECT_THROW(exact_resilience(q, db), Error);
        continue;
      }
      auto r = exact_resilience(q, db);
      EXPECT_EQ(r.k, *expect) << text << " seed " << seed;
      EXPECT_FALSE(oracle::holds(q, db, r.gamma));
      auto b = exact_resilience(q, db, *expect);
      EXPECT_TRUE(*b.within_budget);
      if (*expect > 0) {
        auto c = exact_resilience(q, db, *expect - 1);
        EXPECT_FALSE(*c.within_budget);
        EXPECT_EQ(c.k, *expect);
      }
    }
  }
}

TEST(ExactResponsibility, MatchesOracle) {
  for (const char* text : {"q :- A(x), R(x,y), S(y,z), T(z,x)", "q :- R(x,y), S(y,z), T(z,x)",
                           "q :- A(x), B(y), C(z), W^x(x,y,z)"}) {
    Query q = parse_query(text);
    for (std::uint64_t seed = 1; seed <= 80; ++seed) {
      std::mt19937_64 rng(seed);
      Database db = oracle::random_database(q, rng, 7, 4);
      for (const auto& c : causes(q, enumerate_witnesses(q, db))) {
        auto expect = oracle::responsibility(q, db, c);
        ASSERT_TRUE(expect);
        if (!*expect) {
          EXPECT_THROW(exact_responsibility(q, db, c), Error);
          continue;
        }
        auto r = exact_responsibility(q, db, c);
        ASSERT_TRUE(r);
        EXPECT_EQ(r->k, **expect) << text << " seed " << seed << " " << db.render(c);
      }
      // Wildcards, including patterns matching nothing in a witness.
      for (const auto& a : q.atoms)
        for (const auto& t : db.relation(a.relation).tuples) {
          auto tau = oracle::random_pattern({a.relation, t}, rng);
          auto expect = oracle::responsibility(q, db, tau);
          if (expect && !*expect) continue;
          auto r = exact_wildcard_responsibility(q, db, tau);
          ASSERT_EQ(r.has_value(), expect.has_value());
          if (r) {
            EXPECT_EQ(r->k, **expect) << text << " seed " << seed << " " << render(db, tau);
          }
        }
    }
  }
}

TEST(ExactResponsibility, UnknownRelation) {
  Query q = triangle_query();
  Database db;
  EXPECT_THROW(exact_wildcard_responsibility(q, db, WildcardTuple{"Z", {}}), Error);
}

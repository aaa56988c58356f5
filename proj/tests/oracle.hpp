#pragma once

// Test-side reference implementations. Nothing here calls the library's
// join engine, flow code or hitting-set search.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "resk/database.hpp"
#include "resk/query.hpp"

namespace oracle {

using resk::Database;
using resk::Query;
using resk::TupleRef;

// Witnesses as lists of (relation, tuple), one per atom, by plain
// backtracking over the atoms in query order.
inline std::vector<std::vector<TupleRef>> witnesses(const Query& q, const Database& db,
                                                    const std::set<TupleRef>& removed = {}) {
  std::vector<std::vector<TupleRef>> out;
  std::map<std::string, resk::Value> bound;
  std::vector<TupleRef> current;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == q.atoms.size()) {
      out.push_back(current);
      return;
    }
    const auto& a = q.atoms[i];
    if (!db.has(a.relation)) return;
    for (const auto& t : db.relation(a.relation).tuples) {
      TupleRef ref{a.relation, t};
      if (removed.count(ref)) continue;
      auto saved = bound;
      bool ok = true;
      for (std::size_t p = 0; p < a.terms.size() && ok; ++p) {
        const auto& term = a.terms[p];
        if (!term.variable) {
          ok = db.render(t[p]) == term.text;
        } else if (auto it = bound.find(term.text); it != bound.end()) {
          ok = it->second == t[p];
        } else {
          bound[term.text] = t[p];
        }
      }
      if (ok) {
        current.push_back(ref);
        rec(i + 1);
        current.pop_back();
      }
      bound = saved;
    }
  };
  rec(0);
  return out;
}

inline bool holds(const Query& q, const Database& db, const std::set<TupleRef>& removed = {}) {
  return !witnesses(q, db, removed).empty();
}

// Endogenous tuples in some witness, and each witness as a bitmask over them.
struct Masks {
  std::vector<TupleRef> items;
  std::vector<std::uint64_t> witness;
};

inline Masks masks(const Query& q, const std::vector<std::vector<TupleRef>>& ws) {
  Masks m;
  std::set<TupleRef> all;
  for (const auto& w : ws)
    for (std::size_t i = 0; i < w.size(); ++i)
      if (q.atoms[i].endogenous) all.insert(w[i]);
  m.items.assign(all.begin(), all.end());
  if (m.items.size() > 64) throw resk::Error("oracle limited to 64 candidate tuples");
  for (const auto& w : ws) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (q.atoms[i].endogenous)
        bits |= std::uint64_t{1} << (std::lower_bound(m.items.begin(), m.items.end(), w[i]) - m.items.begin());
    m.witness.push_back(bits);
  }
  return m;
}

// Calls visit on every subset of {0..n-1} of size k as a bitmask; stops when
// visit returns true.
inline bool subsets(std::size_t n, std::size_t k, const std::function<bool(std::uint64_t)>& visit) {
  std::function<bool(std::size_t, std::size_t, std::uint64_t)> rec = [&](std::size_t from, std::size_t left,
                                                                          std::uint64_t bits) {
    if (left == 0) return visit(bits);
    for (std::size_t i = from; i + left <= n; ++i)
      if (rec(i + 1, left - 1, bits | (std::uint64_t{1} << i))) return true;
    return false;
  };
  return rec(0, k, 0);
}

// Smallest number of endogenous deletions making q false; none if impossible.
inline std::optional<std::size_t> resilience(const Query& q, const Database& db, std::size_t max_k = 64) {
  auto ws = witnesses(q, db);
  if (ws.empty()) return 0;
  auto m = masks(q, ws);
  for (auto w : m.witness)
    if (!w) return std::nullopt;
  for (std::size_t k = 1; k <= std::min(max_k, m.items.size()); ++k) {
    bool found = subsets(m.items.size(), k, [&](std::uint64_t g) {
      for (auto w : m.witness)
        if (!(w & g)) return false;
      return true;
    });
    if (found) return k;
  }
  return std::nullopt;
}

// Responsibility of the tuples matching the pattern, by the definition:
// smallest Γ with q true after deleting Γ and false after also deleting the
// matched tuples. Outer none: the pattern meets no witness. Inner none: no Γ
// exists.
inline std::optional<std::optional<std::size_t>> responsibility(const Query& q, const Database& db,
                                                                 const resk::WildcardTuple& tau) {
  auto ws = witnesses(q, db);
  auto pos = q.find(tau.relation);
  std::vector<bool> meets(ws.size());
  bool any = false;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    meets[i] = tau.matches(ws[i][*pos]);
    any = any || meets[i];
  }
  if (!any) return std::nullopt;
  auto m = masks(q, ws);
  // Γ never needs a matched tuple.
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < m.items.size(); ++i)
    if (!tau.matches(m.items[i])) free.push_back(i);
  for (std::size_t k = 0; k <= free.size(); ++k) {
    bool found = subsets(free.size(), k, [&](std::uint64_t sel) {
      std::uint64_t g = 0;
      for (std::size_t i = 0; i < free.size(); ++i)
        if (sel >> i & 1) g |= std::uint64_t{1} << free[i];
      bool survives = false, killed = true;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        if (m.witness[i] & g) continue;
        survives = true;
        if (!meets[i]) killed = false;
      }
      return survives && killed;
    });
    if (found) return std::optional<std::size_t>(k);
  }
  return std::optional<std::size_t>();
}

inline std::optional<std::optional<std::size_t>> responsibility(const Query& q, const Database& db,
                                                                 const TupleRef& t) {
  return responsibility(q, db, resk::WildcardTuple::exact(t));
}

// Random database: per relation up to max_tuples tuples over a domain of
// `domain` constants, after planting a few random witnesses. FDs X -> y are
// imposed on every atom containing X and y through a random function, which
// makes them hold on every witness.
template <class Rng>
Database random_database(const Query& q, Rng& rng, std::size_t max_tuples = 12, std::size_t domain = 6) {
  Database db;
  std::uniform_int_distribution<std::size_t> value(0, domain - 1), count(1, max_tuples), planted(0, 3);
  std::map<std::pair<std::size_t, std::vector<std::string>>, std::string> fd_value;
  // Fixes a row for the FDs; false if it does not settle.
  auto settle = [&](const resk::Atom& a, std::vector<std::string>& row) {
    for (int round = 0; round < 8; ++round) {
      bool changed = false;
      for (std::size_t f = 0; f < q.fds.size(); ++f) {
        const auto& fd = q.fds[f];
        auto col = [&](const std::string& v) -> std::optional<std::size_t> {
          for (std::size_t p = 0; p < a.terms.size(); ++p)
            if (a.terms[p].variable && a.terms[p].text == v) return p;
          return std::nullopt;
        };
        auto dep = col(fd.dependent);
        if (!dep) continue;
        std::vector<std::string> key;
        bool all = true;
        for (const auto& d : fd.determinants) {
          auto c = col(d);
          if (!c) {
            all = false;
            break;
          }
          key.push_back(row[*c]);
        }
        if (!all) continue;
        auto [it, fresh] = fd_value.emplace(std::make_pair(f, key), std::to_string(value(rng)));
        if (row[*dep] != it->second) {
          row[*dep] = it->second;
          changed = true;
        }
      }
      if (!changed) return true;
    }
    return false;  // cyclic dependencies; the row may violate them
  };
  std::map<std::string, std::size_t> budget;
  for (const auto& a : q.atoms) {
    db.add_relation(a.relation, a.terms.size(), a.endogenous);
    budget[a.relation] = count(rng);
  }
  for (std::size_t w = planted(rng); w > 0; --w) {
    std::map<std::string, std::string> assignment;
    for (const auto& v : q.variables()) assignment[v] = std::to_string(value(rng));
    for (const auto& a : q.atoms) {
      if (budget[a.relation] == 0) continue;
      std::vector<std::string> row;
      for (const auto& t : a.terms) row.push_back(t.variable ? assignment[t.text] : t.text);
      if (settle(a, row)) {
        db.insert(a.relation, row);
        --budget[a.relation];
      }
    }
  }
  for (const auto& a : q.atoms) {
    for (std::size_t i = 0; i < budget[a.relation]; ++i) {
      std::vector<std::string> row;
      for (std::size_t p = 0; p < a.terms.size(); ++p) row.push_back(std::to_string(value(rng)));
      // Later positions of a repeated variable copy the first.
      for (std::size_t p = 0; p < a.terms.size(); ++p)
        for (std::size_t r = 0; r < p; ++r)
          if (a.terms[p].variable && a.terms[r].variable && a.terms[p].text == a.terms[r].text) row[p] = row[r];
      if (settle(a, row)) db.insert(a.relation, row);
    }
  }
  return db;
}

// Random pattern over a tuple of the relation: each position is kept or
// replaced by a wildcard.
template <class Rng>
resk::WildcardTuple random_pattern(const TupleRef& base, Rng& rng) {
  resk::WildcardTuple w{base.relation, {}};
  std::bernoulli_distribution wild(0.4);
  for (auto v : base.values) w.pattern.push_back(wild(rng) ? std::nullopt : std::optional<resk::Value>(v));
  return w;
}

}  // namespace oracle

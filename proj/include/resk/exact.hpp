#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "database.hpp"
#include "engine.hpp"
#include "query.hpp"

namespace resk {

struct ExactLimits {
  std::size_t max_witnesses = default_witness_cap();
  std::size_t max_nodes = 10'000'000;
};

struct ExactResult {
  std::size_t k = 0;
  ContingencySet gamma;
  // Set only for budgeted calls: whether some Γ with |Γ| <= budget exists.
  // When false, k is budget + 1 (a lower bound) and gamma is empty.
  std::optional<bool> within_budget;
};

// Minimum hitting set by branch and bound. Items are 0..n-1 and their
// numbering is the tie-breaking order: among minimum solutions the one whose
// sorted item sequence is lexicographically smallest is returned.
class HittingSet {
 public:
  HittingSet(std::size_t items, std::vector<std::vector<std::size_t>> sets, std::size_t max_nodes = 10'000'000)
      : n_(items), max_nodes_(max_nodes) {
    for (auto& s : sets) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    // Drop supersets: hitting the subset hits them too.
    for (std::size_t i = 0; i < sets.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < sets_.size() && !redundant; ++j)
        redundant = std::includes(sets[i].begin(), sets[i].end(), sets_[j].begin(), sets_[j].end());
      if (!redundant) sets_.push_back(sets[i]);
    }
    in_.assign(n_, {});
    for (std::size_t s = 0; s < sets_.size(); ++s)
      for (auto i : sets_[s]) in_[i].push_back(s);
    // Packing visits sets made of rarely shared items first.
    std::vector<std::size_t> weight(sets_.size(), 0);
    for (std::size_t s = 0; s < sets_.size(); ++s)
      for (auto i : sets_[s]) weight[s] += in_[i].size();
    order_.resize(sets_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return sets_[a].size() != sets_[b].size() ? sets_[a].size() < sets_[b].size() : weight[a] < weight[b];
    });
  }

  bool feasible() const {
    return std::none_of(sets_.begin(), sets_.end(), [](const auto& s) { return s.empty(); });
  }

  // Minimum solution of size at most `bound` (unbounded if absent), or none.
  std::optional<std::vector<std::size_t>> solve(std::optional<std::size_t> bound = std::nullopt) {
    if (!feasible()) return std::nullopt;
    reset();
    best_ = bound ? *bound + 1 : n_ + 1;
    found_ = false;
    auto g = greedy();
    if (g.size() < best_) {
      best_ = g.size();
      best_set_ = g;
      found_ = true;
    }
    reset();
    branch(0);
    if (!found_) return std::nullopt;
    return lex_min(best_);
  }

  // Any solution of size at most `bound`, stopping at the first one found.
  std::optional<std::vector<std::size_t>> within(std::size_t bound) {
    if (!feasible()) return std::nullopt;
    if (auto g = greedy(); g.size() <= bound) return g;
    reset();
    best_ = bound + 1;
    found_ = false;
    stop_at_first_ = true;
    branch(0);
    stop_at_first_ = false;
    if (!found_) return std::nullopt;
    return best_set_;
  }

  std::size_t nodes() const { return nodes_; }

 private:
  void reset() {
    hit_.assign(sets_.size(), 0);
    banned_.assign(n_, false);
    chosen_.clear();
    nodes_ = 0;
  }

  // Repeatedly takes the item hitting the most uncovered sets.
  std::vector<std::size_t> greedy() {
    reset();
    for (;;) {
      std::size_t pick = SIZE_MAX, most = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t c = std::count_if(in_[i].begin(), in_[i].end(), [&](std::size_t s) { return !hit_[s]; });
        if (c > most) {
          most = c;
          pick = i;
        }
      }
      if (pick == SIZE_MAX) break;
      choose(pick);
    }
    return chosen_;
  }

  void tick() {
    if (++nodes_ > max_nodes_)
      throw LimitExceeded("branch-node cap of " + std::to_string(max_nodes_) + " exceeded; instance too large");
  }

  void choose(std::size_t i) {
    chosen_.push_back(i);
    for (auto s : in_[i]) ++hit_[s];
  }

  void unchoose(std::size_t i) {
    chosen_.pop_back();
    for (auto s : in_[i]) --hit_[s];
  }

  // Disjoint uncovered sets over allowed items (items >= from, not banned);
  // each needs its own item. Returns SIZE_MAX if some set cannot be hit.
  std::size_t packing(std::size_t from) {
    std::size_t count = 0;
    ++stamp_;
    mark_.resize(n_, 0);
    for (auto s : order_) {
      if (hit_[s]) continue;
      bool any = false, clash = false;
      for (auto i : sets_[s]) {
        if (i < from || banned_[i]) continue;
        any = true;
        if (mark_[i] == stamp_) clash = true;
      }
      if (!any) return SIZE_MAX;
      if (clash) continue;
      for (auto i : sets_[s])
        if (i >= from && !banned_[i]) mark_[i] = stamp_;
      ++count;
    }
    return count;
  }

  // Bans every allowed item whose uncovered sets all contain another allowed
  // item (ties broken by id): some optimum avoids it. Returns the new bans.
  std::vector<std::size_t> dominated() {
    std::vector<std::size_t> out;
    std::vector<std::size_t> li, lj;
    auto live = [&](std::size_t i, std::vector<std::size_t>& l) {
      l.clear();
      for (auto s : in_[i])
        if (!hit_[s]) l.push_back(s);
    };
    for (std::size_t i = 0; i < n_; ++i) {
      if (banned_[i]) continue;
      live(i, li);
      bool drop = li.empty();
      if (!drop)
        for (auto j : sets_[li.front()]) {
          if (j == i || banned_[j]) continue;
          live(j, lj);
          if (std::includes(lj.begin(), lj.end(), li.begin(), li.end()) && (lj.size() > li.size() || j < i)) {
            drop = true;
            break;
          }
        }
      if (drop) {
        banned_[i] = true;
        out.push_back(i);
      }
    }
    return out;
  }

  void branch(std::size_t depth) {
    tick();
    if (found_ && stop_at_first_) return;
    std::size_t lb = packing(0);
    if (lb == SIZE_MAX || depth + lb >= best_) return;
    auto reduced = dominated();
    // Uncovered set with the fewest allowed items.
    std::size_t pick = SIZE_MAX, fewest = SIZE_MAX;
    for (std::size_t s = 0; s < sets_.size(); ++s) {
      if (hit_[s]) continue;
      std::size_t c = 0;
      for (auto i : sets_[s]) c += !banned_[i];
      if (c < fewest) {
        fewest = c;
        pick = s;
      }
    }
    if (pick == SIZE_MAX) {
      best_ = depth;
      best_set_ = chosen_;
      found_ = true;
    } else if (fewest > 0) {
      // Items hitting more uncovered sets first.
      std::vector<std::pair<std::size_t, std::size_t>> cand;
      for (auto i : sets_[pick])
        if (!banned_[i])
          cand.push_back({std::count_if(in_[i].begin(), in_[i].end(), [&](std::size_t s) { return !hit_[s]; }), i});
      std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
      });
      std::vector<std::size_t> tried;
      for (auto [_, i] : cand) {
        choose(i);
        branch(depth + 1);
        unchoose(i);
        if (found_ && stop_at_first_) break;
        banned_[i] = true;
        tried.push_back(i);
      }
      for (auto i : tried) banned_[i] = false;
    }
    for (auto i : reduced) banned_[i] = false;
  }

  // Lexicographically smallest sorted solution of size k (k is optimal).
  std::vector<std::size_t> lex_min(std::size_t k) {
    reset();
    std::vector<std::size_t> out;
    std::function<bool(std::size_t)> rec = [&](std::size_t from) -> bool {
      tick();
      if (std::all_of(hit_.begin(), hit_.end(), [](int h) { return h > 0; })) {
        out = chosen_;
        return true;
      }
      if (chosen_.size() >= k) return false;
      for (std::size_t c = from; c < n_; ++c) {
        bool useful = std::any_of(in_[c].begin(), in_[c].end(), [&](std::size_t s) { return !hit_[s]; });
        if (!useful) continue;
        choose(c);
        std::size_t lb = packing(c + 1);
        if (lb != SIZE_MAX && chosen_.size() + lb <= k && rec(c + 1)) return true;
        unchoose(c);
        // Some uncovered set has no item left beyond c: no later start works.
        if (packing(c + 1) == SIZE_MAX) return false;
      }
      return false;
    };
    if (!rec(0)) throw Error("hitting set tie-breaking failed to reproduce the optimum");
    return out;
  }

  std::size_t n_;
  std::size_t max_nodes_;
  std::vector<std::vector<std::size_t>> sets_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> order_;
  std::vector<int> hit_;
  std::vector<bool> banned_;
  std::vector<std::size_t> chosen_;
  std::vector<unsigned> mark_;
  unsigned stamp_ = 0;
  std::size_t best_ = 0;
  std::vector<std::size_t> best_set_;
  bool found_ = false;
  bool stop_at_first_ = false;
  std::size_t nodes_ = 0;
};

namespace detail {

inline Database without(const Database& db, const std::set<TupleRef>& g) {
  Database out = db;
  for (const auto& t : g)
    if (out.has(t.relation)) out.relation(t.relation).tuples.erase(t.values);
  return out;
}

// Endogenous tuples of the witnesses, numbered in TupleRef order.
struct ItemTable {
  std::vector<TupleRef> items;
  std::map<TupleRef, std::size_t> id;
  std::vector<std::vector<std::size_t>> per_witness;

  ItemTable(const Query& q, const std::vector<Witness>& ws) {
    std::set<TupleRef> all;
    for (const auto& w : ws)
      for (std::size_t i = 0; i < q.atoms.size(); ++i)
        if (q.atoms[i].endogenous) all.insert({q.atoms[i].relation, w.tuples[i]});
    items.assign(all.begin(), all.end());
    for (std::size_t i = 0; i < items.size(); ++i) id[items[i]] = i;
    for (const auto& w : ws) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < q.atoms.size(); ++i)
        if (q.atoms[i].endogenous) s.push_back(id.at({q.atoms[i].relation, w.tuples[i]}));
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      per_witness.push_back(std::move(s));
    }
  }

  ContingencySet to_set(const std::vector<std::size_t>& ids) const {
    ContingencySet out;
    for (auto i : ids) out.insert(items[i]);
    return out;
  }
};

}  // namespace detail

// Minimum Γ of endogenous tuples hitting every witness. With a budget the
// search stops at the first Γ within it.
inline ExactResult exact_resilience(const Query& q, const Database& db, std::optional<std::size_t> budget = {},
                                    const ExactLimits& limits = {}) {
  auto ws = enumerate_witnesses(q, db, limits.max_witnesses);
  ExactResult out;
  if (ws.empty()) {
    if (budget) out.within_budget = true;
    return out;
  }
  detail::ItemTable table(q, ws);
  for (const auto& s : table.per_witness)
    if (s.empty()) throw Error("query cannot be falsified: some witness has no endogenous tuple");
  HittingSet hs(table.items.size(), table.per_witness, limits.max_nodes);
  std::optional<std::vector<std::size_t>> sol;
  if (budget) {
    sol = hs.within(*budget);
    out.within_budget = sol.has_value();
    if (!sol) {
      out.k = *budget + 1;
      return out;
    }
  } else {
    sol = hs.solve();
  }
  out.gamma = table.to_set(*sol);
  out.k = out.gamma.size();
  if (evaluate(q, detail::without(db, out.gamma))) throw Error("exact resilience produced a Γ that leaves q true");
  return out;
}

// Minimum over witnesses w meeting <tau> of the minimum Γ, disjoint from w and
// <tau>, hitting every witness that avoids <tau>. None if <tau> meets no
// witness.
inline std::optional<ExactResult> exact_wildcard_responsibility(const Query& q, const Database& db,
                                                                const WildcardTuple& tau,
                                                                const ExactLimits& limits = {}) {
  auto pos = q.find(tau.relation);
  if (!pos) throw Error("relation " + tau.relation + " is not in the query");
  auto ws = enumerate_witnesses(q, db, limits.max_witnesses);
  detail::ItemTable table(q, ws);
  std::vector<std::size_t> meet, avoid;
  for (std::size_t i = 0; i < ws.size(); ++i) (tau.matches(ws[i].tuples[*pos]) ? meet : avoid).push_back(i);
  if (meet.empty()) return std::nullopt;

  std::set<std::vector<std::size_t>> groups;
  for (auto i : meet) groups.insert(table.per_witness[i]);
  std::optional<std::vector<std::size_t>> best;
  for (const auto& forbidden : groups) {
    std::vector<std::vector<std::size_t>> sets;
    bool possible = true;
    for (auto i : avoid) {
      std::vector<std::size_t> s;
      for (auto it : table.per_witness[i])
        if (!std::binary_search(forbidden.begin(), forbidden.end(), it)) s.push_back(it);
      if (s.empty()) possible = false;
      sets.push_back(std::move(s));
    }
    if (!possible) continue;
    HittingSet hs(table.items.size(), std::move(sets), limits.max_nodes);
    std::optional<std::size_t> bound;
    if (best) bound = best->size();
    auto sol = hs.solve(bound);
    if (!sol) continue;
    if (!best || sol->size() < best->size() || (sol->size() == best->size() && *sol < *best)) best = sol;
  }
  if (!best) throw Error("no contingency set exists for " + render(db, tau));

  ExactResult out;
  out.gamma = table.to_set(*best);
  out.k = out.gamma.size();
  std::set<TupleRef> with_tau(out.gamma.begin(), out.gamma.end());
  for (const auto& t : tau.expand(db)) with_tau.insert(t);
  if (!evaluate(q, detail::without(db, out.gamma)) || evaluate(q, detail::without(db, with_tau)))
    throw Error("exact responsibility produced an invalid contingency set");
  return out;
}

inline std::optional<ExactResult> exact_responsibility(const Query& q, const Database& db, const TupleRef& t,
                                                       const ExactLimits& limits = {}) {
  return exact_wildcard_responsibility(q, db, WildcardTuple::exact(t), limits);
}

}  // namespace resk

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypergraph.hpp"
#include "query.hpp"
#include "structure.hpp"

namespace resk {

struct LinearOrder {
  std::vector<std::string> atoms;

  bool operator==(const LinearOrder&) const = default;
};

// Every variable's atoms form a contiguous block of the order, and the order
// lists each atom of q exactly once.
inline bool is_contiguous(const Query& q, const LinearOrder& order) {
  if (order.atoms.size() != q.atoms.size()) return false;
  std::set<std::string> seen(order.atoms.begin(), order.atoms.end());
  if (seen.size() != q.atoms.size()) return false;
  for (const auto& v : q.variables()) {
    int first = -1, last = -1, count = 0;
    for (std::size_t i = 0; i < order.atoms.size(); ++i)
      if (q.atom(order.atoms[i]).has_var(v)) {
        if (first < 0) first = static_cast<int>(i);
        last = static_cast<int>(i);
        ++count;
      }
    if (count != last - first + 1) return false;
  }
  return true;
}

// Some order in which every variable spans a contiguous block, if any.
inline std::optional<LinearOrder> is_linear(const Query& q) {
  std::size_t n = q.atoms.size();
  std::vector<std::set<std::string>> vs;
  for (const auto& a : q.atoms) vs.push_back(a.var_set());
  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  std::set<std::string> closed;  // variables whose block has ended
  std::function<bool()> rec = [&]() -> bool {
    if (order.size() == n) return true;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      bool ok = std::none_of(vs[i].begin(), vs[i].end(), [&](const std::string& v) { return closed.count(v); });
      if (!ok) continue;
      std::vector<std::string> newly;
      if (!order.empty())
        for (const auto& v : vs[order.back()])
          if (!vs[i].count(v)) newly.push_back(v);
      for (const auto& v : newly) closed.insert(v);
      used[i] = true;
      order.push_back(i);
      if (rec()) return true;
      order.pop_back();
      used[i] = false;
      for (const auto& v : newly) closed.erase(v);
    }
    return false;
  };
  if (!rec()) return std::nullopt;
  LinearOrder out;
  for (auto i : order) out.atoms.push_back(q.atoms[i].relation);
  return out;
}

// Adds a variable to an exogenous atom.
inline Query dissociate(const Query& q, const std::string& atom, const std::string& var) {
  Query out = q;
  Atom& a = out.atom(atom);
  if (a.endogenous) throw Error("cannot dissociate endogenous atom " + atom);
  if (a.has_var(var)) throw Error("variable " + var + " already occurs in " + atom);
  auto vars = q.variables();
  if (std::find(vars.begin(), vars.end(), var) == vars.end()) throw Error("unknown variable " + var);
  a.sources = base_atoms(a);
  a.terms.push_back(Term::var(var));
  return out;
}

struct Linearized {
  Query query;
  LinearOrder order;
};

namespace detail {

// Orders of the endogenous atoms consistent with the cut test and with
// contiguity of their variables, in deterministic order. The callback
// returns true to stop.
inline void endogenous_orders(const Query& q, const std::function<bool(const std::vector<std::string>&)>& visit) {
  DualHypergraph h(q);
  std::vector<std::string> endo;
  for (const auto& a : q.atoms)
    if (a.endogenous) endo.push_back(a.relation);
  std::sort(endo.begin(), endo.end());
  if (endo.size() <= 1) {
    visit(endo);
    return;
  }
  std::map<std::string, std::set<std::string>> vars;
  for (const auto& e : endo) vars[e] = q.atom(e).var_set();
  // linked[x][l][j]: x reaches l while avoiding var(j)
  std::map<std::string, std::map<std::string, std::map<std::string, bool>>> linked;
  for (const auto& x : endo)
    for (const auto& l : endo)
      for (const auto& j : endo)
        if (x != l && x != j && l != j) linked[x][l][j] = connected_avoiding(h, x, l, vars[j]);

  auto contiguous = [&](const std::vector<std::string>& ord) {
    std::set<std::string> all;
    for (const auto& a : ord) all.insert(vars[a].begin(), vars[a].end());
    for (const auto& v : all) {
      int first = -1, last = -1, count = 0;
      for (std::size_t i = 0; i < ord.size(); ++i)
        if (vars[ord[i]].count(v)) {
          if (first < 0) first = static_cast<int>(i);
          last = static_cast<int>(i);
          ++count;
        }
      if (count != last - first + 1) return false;
    }
    return true;
  };

  std::vector<std::string> ord{endo[0], endo[1]};
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t next) {
    if (stop) return;
    if (next == endo.size()) {
      stop = visit(ord);
      return;
    }
    const std::string& x = endo[next];
    for (std::size_t p = 0; p <= ord.size() && !stop; ++p) {
      bool ok = true;
      // Placing x before position p: atoms at index < p are on its left.
      for (std::size_t j = 0; j < ord.size() && ok; ++j)
        for (std::size_t l = 0; l < ord.size() && ok; ++l) {
          if (l == j) continue;
          bool x_left_of_j = p <= j;
          bool l_left_of_j = l < j;
          if (linked[x][ord[l]][ord[j]] && x_left_of_j != l_left_of_j) ok = false;
        }
      for (std::size_t l = 0; l < p && ok; ++l)
        for (std::size_t m = p; m < ord.size() && ok; ++m)
          if (linked[ord[l]][ord[m]][x]) ok = false;
      if (!ok) continue;
      ord.insert(ord.begin() + p, x);
      if (contiguous(ord)) rec(next + 1);
      ord.erase(ord.begin() + p);
    }
  };
  if (contiguous(ord)) rec(2);
}

}  // namespace detail

// Places the endogenous atoms in a linear order and dissociates the
// exogenous atoms into one merged atom per gap between them.
inline Linearized linearize_triad_free(const Query& q) {
  if (auto t = find_triad(q))
    throw Error("query has the triad {" + t->atoms[0] + "," + t->atoms[1] + "," + t->atoms[2] + "}");
  auto all_vars = q.variables();
  std::set<std::string> endo_vars;
  for (const auto& a : q.atoms)
    if (a.endogenous)
      for (const auto& v : a.vars()) endo_vars.insert(v);

  // Exogenous atoms linked by variables no endogenous atom has.
  std::vector<std::size_t> exo;
  for (std::size_t i = 0; i < q.atoms.size(); ++i)
    if (!q.atoms[i].endogenous) exo.push_back(i);
  std::vector<std::size_t> parent(exo.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < exo.size(); ++i)
    for (std::size_t j = i + 1; j < exo.size(); ++j)
      for (const auto& v : q.atoms[exo[i]].vars())
        if (!endo_vars.count(v) && q.atoms[exo[j]].has_var(v)) parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> clusters;
  {
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < exo.size(); ++i) {
      auto r = find(i);
      if (!slot.count(r)) {
        slot[r] = clusters.size();
        clusters.emplace_back();
      }
      clusters[slot[r]].push_back(exo[i]);
    }
  }

  std::optional<Linearized> result;
  detail::endogenous_orders(q, [&](const std::vector<std::string>& endo) {
    std::size_t n = endo.size();
    // Gaps 0..n; gap g lies between endo[g-1] and endo[g].
    std::vector<std::vector<std::size_t>> at_gap(n + 1);
    for (const auto& c : clusters) {
      std::size_t lo = 0, hi = n;
      for (auto ai : c)
        for (const auto& v : q.atoms[ai].vars()) {
          if (!endo_vars.count(v)) continue;
          std::size_t a = n, b = 0;
          for (std::size_t i = 0; i < n; ++i)
            if (q.atom(endo[i]).has_var(v)) {
              a = std::min(a, i);
              b = std::max(b, i);
            }
          lo = std::max(lo, a);      // gap index a == before endo[a]
          hi = std::min(hi, b + 1);  // gap index b+1 == after endo[b]
        }
      if (lo > hi) return false;
      std::size_t g = lo;
      for (std::size_t cand = lo; cand <= hi; ++cand)
        if (cand >= 1 && cand + 1 <= n) {
          g = cand;
          break;
        }
      at_gap[g].insert(at_gap[g].end(), c.begin(), c.end());
    }
    Linearized lin;
    lin.query = q;
    lin.query.atoms.clear();
    auto push_gap = [&](std::size_t g) {
      if (at_gap[g].empty()) return;
      std::sort(at_gap[g].begin(), at_gap[g].end());
      std::set<std::string> vs;
      if (g >= 1) {
        auto s = q.atom(endo[g - 1]).var_set();
        vs.insert(s.begin(), s.end());
      }
      if (g < n) {
        auto s = q.atom(endo[g]).var_set();
        vs.insert(s.begin(), s.end());
      }
      Atom ex;
      ex.relation = q.atoms[at_gap[g].front()].relation;
      ex.endogenous = false;
      for (auto ai : at_gap[g]) {
        auto s = q.atoms[ai].var_set();
        vs.insert(s.begin(), s.end());
        for (auto& b : base_atoms(q.atoms[ai])) ex.sources.push_back(b);
      }
      for (const auto& v : all_vars)
        if (vs.count(v)) ex.terms.push_back(Term::var(v));
      lin.order.atoms.push_back(ex.relation);
      lin.query.atoms.push_back(std::move(ex));
    };
    for (std::size_t i = 0; i < n; ++i) {
      push_gap(i);
      lin.query.atoms.push_back(q.atom(endo[i]));
      lin.order.atoms.push_back(endo[i]);
    }
    push_gap(n);
    if (!is_contiguous(lin.query, lin.order)) return false;
    result = std::move(lin);
    return true;
  });
  if (!result) throw Error("no linear placement found for a triad-free query");
  return *result;
}

}  // namespace resk

#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hypergraph.hpp"
#include "query.hpp"

namespace resk {

struct Triad {
  std::array<std::string, 3> atoms;

  bool operator==(const Triad&) const = default;
};

// Base atoms an atom stands for (itself unless it was rewritten).
inline std::vector<Atom> base_atoms(const Atom& a) {
  if (!a.sources.empty()) return a.sources;
  Atom b = a;
  b.sources.clear();
  return {b};
}

inline bool is_triad(const Query& q, const DualHypergraph& h, const std::string& a, const std::string& b,
                     const std::string& c) {
  return connected_avoiding(h, a, b, q.atom(c).var_set()) && connected_avoiding(h, b, c, q.atom(a).var_set()) &&
         connected_avoiding(h, a, c, q.atom(b).var_set());
}

// First triad over endogenous triples in atom order.
inline std::optional<Triad> find_triad(const Query& q) {
  DualHypergraph h(q);
  std::vector<std::string> endo;
  for (const auto& a : q.atoms)
    if (a.endogenous) endo.push_back(a.relation);
  for (std::size_t i = 0; i < endo.size(); ++i)
    for (std::size_t j = i + 1; j < endo.size(); ++j)
      for (std::size_t k = j + 1; k < endo.size(); ++k)
        if (is_triad(q, h, endo[i], endo[j], endo[k])) return Triad{{endo[i], endo[j], endo[k]}};
  return std::nullopt;
}

inline bool strict_subset(const std::set<std::string>& a, const std::set<std::string>& b) {
  return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Marks exogenous every endogenous atom whose variables strictly contain
// those of another endogenous atom.
inline Query apply_domination(const Query& q) {
  Query out = q;
  for (int round = 0;; ++round) {
    std::vector<std::size_t> mark;
    for (std::size_t b = 0; b < out.atoms.size(); ++b) {
      if (!out.atoms[b].endogenous) continue;
      auto vb = out.atoms[b].var_set();
      for (std::size_t a = 0; a < out.atoms.size(); ++a)
        if (a != b && out.atoms[a].endogenous && strict_subset(out.atoms[a].var_set(), vb)) {
          mark.push_back(b);
          break;
        }
    }
    if (mark.empty()) break;
    if (round > 0) throw Error("domination did not converge in one pass");
    for (auto b : mark) out.atoms[b].endogenous = false;
  }
  return out;
}

// Variables w of the atom that cannot reach another endogenous atom without
// using an edge in var(atom) - {w}.
inline std::set<std::string> solitary_vars(const Query& q, const std::string& atom) {
  DualHypergraph h(q);
  std::size_t f = h.atom_index(atom);
  auto fv = q.atom(atom).var_set();
  std::set<std::string> out;
  for (const auto& w : fv) {
    auto banned = fv;
    banned.erase(w);
    auto ban = h.ban(banned);
    auto wi = h.var_index(w);
    std::vector<std::size_t> start;
    for (auto a : h.edge(wi))
      if (a != f) start.push_back(a);
    auto seen = h.reach(start, ban);
    bool reaches = false;
    for (std::size_t a = 0; a < seen.size(); ++a)
      if (seen[a] && a != f && h.endogenous(a)) reaches = true;
    if (!reaches) out.insert(w);
  }
  return out;
}

// Every non-solitary variable of the atom lies in an endogenous atom whose
// variables are a strict subset of the atom's.
inline bool fully_dominated(const Query& q, const std::string& atom) {
  const Atom& f = q.atom(atom);
  auto fv = f.var_set();
  auto sol = solitary_vars(q, atom);
  for (const auto& y : fv) {
    if (sol.count(y)) continue;
    bool covered = false;
    for (const auto& a : q.atoms)
      if (a.relation != atom && a.endogenous && a.has_var(y) && strict_subset(a.var_set(), fv)) covered = true;
    if (!covered) return false;
  }
  return true;
}

// Fixpoint over endogenous atoms in sorted-name order. The target atom, when
// given, is never marked during the fixpoint and is checked once at the end.
inline Query apply_full_domination(const Query& q, const std::optional<std::string>& target = std::nullopt) {
  Query out = q;
  std::vector<std::string> names;
  for (const auto& a : out.atoms) names.push_back(a.relation);
  std::sort(names.begin(), names.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& n : names) {
      Atom& a = out.atom(n);
      if (!a.endogenous || (target && n == *target)) continue;
      if (fully_dominated(out, n)) {
        a.endogenous = false;
        changed = true;
      }
    }
  }
  if (target && out.atom(*target).endogenous && fully_dominated(out, *target)) out.atom(*target).endogenous = false;
  return out;
}

inline std::set<std::string> fd_closure(std::set<std::string> vars, const std::vector<FunctionalDependency>& fds) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& fd : fds)
      if (!vars.count(fd.dependent) &&
          std::includes(vars.begin(), vars.end(), fd.determinants.begin(), fd.determinants.end())) {
        vars.insert(fd.dependent);
        changed = true;
      }
  }
  return vars;
}

// Merges atoms with identical variable sets into one atom standing for all
// their base atoms. The merged atom is named after its first endogenous
// member and is endogenous if any member is.
inline Query merge_identical_atoms(const Query& q) {
  Query out = q;
  out.atoms.clear();
  std::vector<bool> used(q.atoms.size(), false);
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> group{i};
    for (std::size_t j = i + 1; j < q.atoms.size(); ++j)
      if (!used[j] && q.atoms[j].var_set() == q.atoms[i].var_set()) group.push_back(j);
    for (auto g : group) used[g] = true;
    if (group.size() == 1) {
      out.atoms.push_back(q.atoms[i]);
      continue;
    }
    std::size_t lead = group.front();
    for (auto g : group)
      if (q.atoms[g].endogenous) {
        lead = g;
        break;
      }
    Atom m = q.atoms[lead];
    m.sources.clear();
    for (auto g : group) {
      m.endogenous = m.endogenous || q.atoms[g].endogenous;
      for (auto& b : base_atoms(q.atoms[g])) m.sources.push_back(b);
    }
    out.atoms.push_back(std::move(m));
  }
  return out;
}

// Each atom's variables become their FD closure within var(q); atoms whose
// closures coincide are merged.
inline Query induced_rewrite_closure(const Query& q) {
  Query out = q;
  auto order = q.variables();
  for (auto& c : out.atoms) {
    auto cl = fd_closure(c.var_set(), q.fds);
    if (cl.size() == c.var_set().size()) continue;
    auto base = base_atoms(c);
    for (const auto& v : order)
      if (cl.count(v) && !c.has_var(v)) c.terms.push_back(Term::var(v));
    c.sources = std::move(base);
  }
  return merge_identical_atoms(out);
}

}  // namespace resk

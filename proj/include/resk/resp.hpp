#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "classify.hpp"
#include "database.hpp"
#include "engine.hpp"
#include "exact.hpp"
#include "flow.hpp"
#include "hypergraph.hpp"
#include "linearize.hpp"
#include "query.hpp"
#include "structure.hpp"

namespace resk {

enum class Method { flow, exact };

inline std::string to_string(Method m) { return m == Method::flow ? "flow" : "exact"; }

struct SolveResult {
  std::size_t k = 0;
  ContingencySet gamma;
  Method method = Method::flow;
};

struct MaxRespSet {
  std::size_t k = 0;
  std::set<TupleRef> members;
  // A contingency set of size k-1 for every member.
  std::map<TupleRef, ContingencySet> contingency;
};

namespace detail {

inline bool smaller(const ContingencySet& a, const ContingencySet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline void verify_endogenous(const Query& q, const ContingencySet& g) {
  for (const auto& t : g) {
    auto pos = q.find(t.relation);
    if (!pos || !q.atoms[*pos].endogenous) throw Error("contingency set contains a non-endogenous tuple");
  }
}

inline SolveResult component_resilience(const Query& comp, const Database& db, const ExactLimits& limits) {
  Query nf = normal_form(comp, Problem::resilience);
  if (find_triad(nf)) {
    auto r = exact_resilience(comp, db, std::nullopt, limits);
    return {r.k, r.gamma, Method::exact};
  }
  auto lin = linearize_triad_free(nf);
  auto sk = build_skeleton(lin.query, lin.order, db, limits.max_witnesses);
  auto mc = min_cut(resilience_network(sk));
  if (!mc.bounded) throw Error("query cannot be falsified: some witness has no endogenous tuple");
  return {mc.cut.size(), mc.cut, Method::flow};
}

}  // namespace detail

// Minimum set of endogenous tuples whose deletion makes q false.
inline SolveResult solve_resilience(const Query& q, const Database& db, const ExactLimits& limits = {}) {
  SolveResult out;
  bool hard = false;
  std::vector<Query> comps = split_components(q);
  for (const auto& c : comps) hard = hard || find_triad(normal_form(c, Problem::resilience)).has_value();
  out.method = hard ? Method::exact : Method::flow;
  if (!evaluate(q, db)) return out;
  std::optional<SolveResult> best;
  for (const auto& c : comps) {
    // Every witness of a component with an endogenous atom can be hit.
    if (c.endogenous_count() == 0) continue;
    std::optional<SolveResult> r = detail::component_resilience(c, db, limits);
    if (!best || detail::smaller(r->gamma, best->gamma)) best = r;
  }
  if (!best) throw Error("query cannot be falsified: some witness has no endogenous tuple");
  out.k = best->k;
  out.gamma = best->gamma;
  detail::verify_endogenous(q, out.gamma);
  if (evaluate(q, detail::without(db, out.gamma))) throw Error("resilience produced a Γ that leaves q true");
  return out;
}

// Minimum contingency set for the tuples matched by tau; none when tau meets
// no witness.
inline std::optional<SolveResult> solve_responsibility(const Query& q, const Database& db, const WildcardTuple& tau,
                                                       const ExactLimits& limits = {}) {
  if (!q.find(tau.relation)) throw Error("relation " + tau.relation + " is not in the query");
  if (q.atom(tau.relation).terms.size() != tau.pattern.size())
    throw Error("tuple arity does not match relation " + tau.relation);
  Query comp;
  for (auto& c : split_components(q))
    if (c.find(tau.relation)) comp = c;
  if (!evaluate(q, db)) return std::nullopt;

  Query nf = normal_form(comp, Problem::responsibility, tau.relation);
  std::string target;
  for (const auto& a : nf.atoms)
    for (const auto& b : base_atoms(a))
      if (b.relation == tau.relation) target = a.relation;

  SolveResult out;
  if (find_triad(nf)) {
    auto r = exact_wildcard_responsibility(comp, db, tau, limits);
    if (!r) return std::nullopt;
    out = {r->k, r->gamma, Method::exact};
  } else {
    out.method = Method::flow;
    auto lin = linearize_triad_free(nf);
    auto sk = build_skeleton(lin.query, lin.order, db, limits.max_witnesses);
    std::size_t pos = *sk.base.find(tau.relation);

    // The target was marked exogenous by full domination: every tuple agreeing
    // with w on the non-solitary variables must be deleted.
    bool trick = comp.atom(tau.relation).endogenous && !nf.atom(target).endogenous;
    std::vector<std::size_t> nonsolitary;
    if (trick) {
      auto vars = sk.base.variables();
      auto sol = solitary_vars(nf, target);
      for (const auto& v : nf.atom(target).vars())
        if (!sol.count(v))
          nonsolitary.push_back(static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin()));
    }
    auto key = [&](const Witness& w) {
      Tuple k;
      for (auto v : nonsolitary) k.push_back(w.assignment[v]);
      return k;
    };
    std::map<Tuple, std::set<TupleRef>> forced;
    if (trick)
      for (const auto& w : sk.witnesses)
        if (!tau.matches(w.tuples[pos])) forced[key(w)].insert({tau.relation, w.tuples[pos]});

    std::optional<ContingencySet> best;
    bool meets = false;
    for (std::size_t i = 0; i < sk.witnesses.size(); ++i) {
      if (!tau.matches(sk.witnesses[i].tuples[pos])) continue;
      meets = true;
      std::set<TupleRef> removed;
      if (trick) removed = forced[key(sk.witnesses[i])];
      auto mc = min_cut(wildcard_network(sk, i, tau, removed));
      if (!mc.bounded) continue;
      ContingencySet g = mc.cut;
      g.insert(removed.begin(), removed.end());
      if (!best || detail::smaller(g, *best)) best = std::move(g);
    }
    if (!meets) return std::nullopt;
    if (!best) throw Error("no contingency set exists for " + render(db, tau));
    out.gamma = std::move(*best);
    out.k = out.gamma.size();
  }

  detail::verify_endogenous(q, out.gamma);
  std::set<TupleRef> with_tau(out.gamma.begin(), out.gamma.end());
  for (const auto& t : tau.expand(db)) with_tau.insert(t);
  if (!evaluate(q, detail::without(db, out.gamma)) || evaluate(q, detail::without(db, with_tau)))
    throw Error("responsibility produced an invalid contingency set");
  return out;
}

inline std::optional<SolveResult> solve_responsibility(const Query& q, const Database& db, const TupleRef& t,
                                                       const ExactLimits& limits = {}) {
  return solve_responsibility(q, db, WildcardTuple::exact(t), limits);
}

// Tuples of maximum responsibility, found through resilience alone.
inline MaxRespSet max_responsibility_set(const Query& q, const Database& db, const ExactLimits& limits = {}) {
  auto ws = enumerate_witnesses(q, db, limits.max_witnesses);
  if (ws.empty()) throw Error("query is false in the database");
  auto res = solve_resilience(q, db, limits);
  MaxRespSet out;
  out.k = res.k;
  for (const auto& g : res.gamma) {
    out.members.insert(g);
    ContingencySet rest = res.gamma;
    rest.erase(g);
    out.contingency[g] = rest;
  }
  for (const auto& c : causes(q, ws)) {
    if (out.members.count(c)) continue;
    auto r = solve_resilience(q, detail::without(db, {c}), limits);
    if (r.k + 1 != out.k) continue;
    out.members.insert(c);
    out.contingency[c] = r.gamma;
    for (const auto& g : r.gamma) {
      out.members.insert(g);
      if (!out.contingency.count(g)) {
        ContingencySet rest = r.gamma;
        rest.erase(g);
        rest.insert(c);
        out.contingency[g] = rest;
      }
    }
  }
  return out;
}

}  // namespace resk

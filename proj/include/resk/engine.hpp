#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "database.hpp"
#include "query.hpp"

namespace resk {

inline constexpr std::size_t kDefaultWitnessCap = 1'000'000;

// RESK_WITNESS_CAP overrides the default cap.
inline std::size_t default_witness_cap() {
  if (const char* env = std::getenv("RESK_WITNESS_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultWitnessCap;
}

struct TupleHash {
  std::size_t operator()(const Tuple& t) const {
    std::size_t h = t.size();
    for (Value v : t) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct Witness {
  // Indexed like Query::variables().
  std::vector<Value> assignment;
  // Indexed like Query::atoms.
  std::vector<Tuple> tuples;

  bool operator==(const Witness&) const = default;
};

inline std::vector<TupleRef> witness_tuples(const Query& q, const Witness& w) {
  std::vector<TupleRef> out;
  for (std::size_t i = 0; i < q.atoms.size(); ++i) out.push_back({q.atoms[i].relation, w.tuples[i]});
  return out;
}

namespace detail {

struct JoinStep {
  std::size_t atom;
  std::vector<std::size_t> key_pos;  // positions already bound
  std::vector<std::size_t> key_var;
  std::vector<std::size_t> bind_pos;  // positions binding a fresh variable
  std::vector<std::size_t> bind_var;
  std::unordered_map<Tuple, std::vector<const Tuple*>, TupleHash> index;
};

}  // namespace detail

// Complete, duplicate-free witness list. Atoms are joined in query order,
// except that an atom sharing a variable with the ones already joined is
// preferred over a disconnected one.
inline std::vector<Witness> enumerate_witnesses(const Query& q, const Database& db,
                                                std::size_t cap = default_witness_cap(),
                                                bool first_only = false) {
  auto vars = q.variables();
  std::unordered_map<std::string, std::size_t> var_id;
  for (std::size_t i = 0; i < vars.size(); ++i) var_id[vars[i]] = i;
  for (const auto& a : q.atoms)
    if (a.has_constants()) throw Error("atom " + a.relation + " has constants; normalize constants first");

  std::vector<detail::JoinStep> steps;
  std::vector<bool> bound(vars.size(), false), done(q.atoms.size(), false);
  for (std::size_t n = 0; n < q.atoms.size(); ++n) {
    std::size_t pick = q.atoms.size();
    for (std::size_t i = 0; i < q.atoms.size() && pick == q.atoms.size(); ++i)
      if (!done[i])
        for (const auto& t : q.atoms[i].terms)
          if (bound[var_id[t.text]]) {
            pick = i;
            break;
          }
    if (pick == q.atoms.size())
      for (std::size_t i = 0; i < q.atoms.size(); ++i)
        if (!done[i]) {
          pick = i;
          break;
        }
    done[pick] = true;
    detail::JoinStep s;
    s.atom = pick;
    const Atom& a = q.atoms[pick];
    for (std::size_t p = 0; p < a.terms.size(); ++p) {
      std::size_t v = var_id[a.terms[p].text];
      if (bound[v]) {
        s.key_pos.push_back(p);
        s.key_var.push_back(v);
      } else {
        s.bind_pos.push_back(p);
        s.bind_var.push_back(v);
      }
    }
    for (auto v : s.bind_var) bound[v] = true;
    // Repeated variables inside the atom: later occurrences become key
    // positions checked against the first occurrence of the same tuple.
    std::vector<std::pair<std::size_t, std::size_t>> inner;
    {
      std::vector<std::size_t> bp, bv;
      std::unordered_map<std::size_t, std::size_t> seen;
      for (std::size_t k = 0; k < s.bind_pos.size(); ++k) {
        if (auto it = seen.find(s.bind_var[k]); it != seen.end()) {
          inner.emplace_back(it->second, s.bind_pos[k]);
        } else {
          seen[s.bind_var[k]] = s.bind_pos[k];
          bp.push_back(s.bind_pos[k]);
          bv.push_back(s.bind_var[k]);
        }
      }
      s.bind_pos = std::move(bp);
      s.bind_var = std::move(bv);
    }
    if (!db.has(a.relation)) throw Error("database has no relation " + a.relation);
    const Relation& r = db.relation(a.relation);
    if (r.arity != a.terms.size()) throw Error("arity mismatch for relation " + a.relation);
    for (const auto& t : r.tuples) {
      bool ok = true;
      for (auto [x, y] : inner) ok = ok && t[x] == t[y];
      if (!ok) continue;
      Tuple key;
      for (auto p : s.key_pos) key.push_back(t[p]);
      s.index[key].push_back(&t);
    }
    steps.push_back(std::move(s));
  }

  std::vector<Witness> out;
  std::vector<Value> assign(vars.size(), 0);
  std::vector<const Tuple*> chosen(q.atoms.size(), nullptr);
  std::function<bool(std::size_t)> rec = [&](std::size_t depth) -> bool {
    if (depth == steps.size()) {
      if (out.size() >= cap)
        throw LimitExceeded("witness cap of " + std::to_string(cap) + " exceeded; instance too large for exact methods");
      Witness w;
      w.assignment = assign;
      for (auto* t : chosen) w.tuples.push_back(*t);
      out.push_back(std::move(w));
      return first_only;
    }
    auto& s = steps[depth];
    Tuple key;
    for (auto v : s.key_var) key.push_back(assign[v]);
    auto it = s.index.find(key);
    if (it == s.index.end()) return false;
    for (const Tuple* t : it->second) {
      for (std::size_t k = 0; k < s.bind_pos.size(); ++k) assign[s.bind_var[k]] = (*t)[s.bind_pos[k]];
      chosen[s.atom] = t;
      if (rec(depth + 1)) return true;
    }
    return false;
  };
  if (!q.atoms.empty()) rec(0);
  return out;
}

inline bool evaluate(const Query& q, const Database& db) { return !enumerate_witnesses(q, db, SIZE_MAX, true).empty(); }

// D − Γ. Every member must be a present endogenous tuple.
inline Database apply_deletions(const Database& db, const ContingencySet& g) {
  Database out = db;
  for (const auto& t : g) {
    if (!db.has(t.relation)) throw Error("contingency tuple of unknown relation " + t.relation);
    if (!db.is_endogenous(t.relation)) throw Error("contingency tuple " + db.render(t) + " is exogenous");
    if (!out.relation(t.relation).tuples.erase(t.values))
      throw Error("contingency tuple " + db.render(t) + " is not in the database");
  }
  return out;
}

// Tuples of endogenous atoms occurring in at least one witness.
inline std::set<TupleRef> causes(const Query& q, const std::vector<Witness>& ws) {
  std::set<TupleRef> out;
  for (const auto& w : ws)
    for (std::size_t i = 0; i < q.atoms.size(); ++i)
      if (q.atoms[i].endogenous) out.insert({q.atoms[i].relation, w.tuples[i]});
  return out;
}

}  // namespace resk

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypergraph.hpp"
#include "linearize.hpp"
#include "query.hpp"
#include "structure.hpp"

namespace resk {

enum class Problem { resilience, responsibility };
enum class Verdict { ptime, np_complete };

inline std::string to_string(Problem p) { return p == Problem::resilience ? "resilience" : "responsibility"; }
inline std::string to_string(Verdict v) { return v == Verdict::ptime ? "ptime" : "np_complete"; }

inline Problem parse_problem(const std::string& s) {
  if (s == "resilience" || s == "res") return Problem::resilience;
  if (s == "responsibility" || s == "rsp") return Problem::responsibility;
  throw Error("unknown problem " + s);
}

// Closure under induced rewrites, then domination (resilience) or full
// domination (responsibility, optionally with a target atom).
inline Query normal_form(const Query& q, Problem p, const std::optional<std::string>& target = std::nullopt) {
  Query closed = induced_rewrite_closure(q);
  if (p == Problem::resilience) return apply_domination(closed);
  std::optional<std::string> t;
  if (target)
    for (const auto& a : closed.atoms)
      for (const auto& b : base_atoms(a))
        if (b.relation == *target) t = a.relation;
  return apply_full_domination(closed, t);
}

struct ComponentClassification {
  Query normalized;
  std::optional<Triad> triad;
  std::optional<Linearized> linear;
};

struct Classification {
  Problem problem = Problem::resilience;
  Verdict verdict = Verdict::ptime;
  std::optional<Triad> triad;
  // Concatenated linear orders of the components when ptime.
  std::vector<std::string> linear_order;
  Query normalized_query;
  std::vector<ComponentClassification> components;
};

inline Classification classify(const Query& q, Problem p) {
  Classification out;
  out.problem = p;
  out.normalized_query.name = q.name;
  for (const auto& comp : split_components(q)) {
    ComponentClassification c;
    c.normalized = normal_form(comp, p);
    c.triad = find_triad(c.normalized);
    if (!c.triad)
      c.linear = linearize_triad_free(c.normalized);
    else if (!out.triad)
      out.triad = c.triad;
    for (const auto& a : c.normalized.atoms) out.normalized_query.atoms.push_back(a);
    for (const auto& fd : c.normalized.fds) out.normalized_query.fds.push_back(fd);
    out.components.push_back(std::move(c));
  }
  out.verdict = out.triad ? Verdict::np_complete : Verdict::ptime;
  if (!out.triad)
    for (const auto& c : out.components)
      for (const auto& a : c.linear->order.atoms) out.linear_order.push_back(a);
  return out;
}

}  // namespace resk

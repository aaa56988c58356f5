#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "query.hpp"

namespace resk {

// Atoms are vertices; each variable is the hyperedge of atoms containing it.
class DualHypergraph {
 public:
  DualHypergraph() = default;

  explicit DualHypergraph(const Query& q) {
    vars_ = q.variables();
    for (std::size_t v = 0; v < vars_.size(); ++v) var_index_[vars_[v]] = v;
    edges_.resize(vars_.size());
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
      atoms_.push_back(q.atoms[i].relation);
      atom_index_[q.atoms[i].relation] = i;
      endogenous_.push_back(q.atoms[i].endogenous);
      std::vector<std::size_t> vs;
      for (const auto& v : q.atoms[i].vars()) {
        vs.push_back(var_index_[v]);
        edges_[var_index_[v]].push_back(i);
      }
      atom_vars_.push_back(std::move(vs));
    }
  }

  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::vector<std::string>& variables() const { return vars_; }
  bool endogenous(std::size_t atom) const { return endogenous_[atom]; }

  std::size_t atom_index(const std::string& name) const {
    auto it = atom_index_.find(name);
    if (it == atom_index_.end()) throw Error("unknown atom " + name);
    return it->second;
  }

  std::size_t var_index(const std::string& name) const {
    auto it = var_index_.find(name);
    if (it == var_index_.end()) throw Error("unknown variable " + name);
    return it->second;
  }

  const std::vector<std::size_t>& atom_vars(std::size_t atom) const { return atom_vars_[atom]; }
  const std::vector<std::size_t>& edge(std::size_t var) const { return edges_[var]; }

  std::map<std::string, std::set<std::string>> hyperedges() const {
    std::map<std::string, std::set<std::string>> out;
    for (std::size_t v = 0; v < vars_.size(); ++v)
      for (auto a : edges_[v]) out[vars_[v]].insert(atoms_[a]);
    return out;
  }

  // Atoms reachable from the given ones through hyperedges not in banned.
  std::vector<bool> reach(const std::vector<std::size_t>& start, const std::vector<bool>& banned) const {
    std::vector<bool> seen(atoms_.size(), false), used(vars_.size(), false);
    std::deque<std::size_t> todo;
    for (auto s : start)
      if (!seen[s]) {
        seen[s] = true;
        todo.push_back(s);
      }
    while (!todo.empty()) {
      auto a = todo.front();
      todo.pop_front();
      for (auto v : atom_vars_[a]) {
        if (banned[v] || used[v]) continue;
        used[v] = true;
        for (auto b : edges_[v])
          if (!seen[b]) {
            seen[b] = true;
            todo.push_back(b);
          }
      }
    }
    return seen;
  }

  std::vector<bool> ban(const std::set<std::string>& vars) const {
    std::vector<bool> out(vars_.size(), false);
    for (const auto& v : vars)
      if (auto it = var_index_.find(v); it != var_index_.end()) out[it->second] = true;
    return out;
  }

 private:
  std::vector<std::string> atoms_;
  std::vector<bool> endogenous_;
  std::vector<std::string> vars_;
  std::map<std::string, std::size_t> atom_index_;
  std::map<std::string, std::size_t> var_index_;
  std::vector<std::vector<std::size_t>> atom_vars_;
  std::vector<std::vector<std::size_t>> edges_;
};

inline DualHypergraph build_hypergraph(const Query& q) { return DualHypergraph(q); }

// True iff a path from one atom to the other uses no banned variable.
inline bool connected_avoiding(const DualHypergraph& h, const std::string& from, const std::string& to,
                               const std::set<std::string>& banned) {
  auto a = h.atom_index(from), b = h.atom_index(to);
  if (a == b) throw Error("connected_avoiding needs two distinct atoms");
  return h.reach({a}, h.ban(banned))[b];
}

inline std::vector<std::set<std::string>> components(const DualHypergraph& h) {
  std::vector<std::set<std::string>> out;
  std::vector<bool> done(h.atoms().size(), false), none(h.variables().size(), false);
  for (std::size_t i = 0; i < h.atoms().size(); ++i) {
    if (done[i]) continue;
    auto seen = h.reach({i}, none);
    std::set<std::string> comp;
    for (std::size_t j = 0; j < seen.size(); ++j)
      if (seen[j]) {
        done[j] = true;
        comp.insert(h.atoms()[j]);
      }
    out.push_back(std::move(comp));
  }
  return out;
}

// Connected components as separate queries; atoms keep their order and each
// FD goes to the component holding its variables.
inline std::vector<Query> split_components(const Query& q) {
  auto comps = components(DualHypergraph(q));
  std::vector<Query> out;
  for (const auto& c : comps) {
    Query part;
    part.name = q.name;
    for (const auto& a : q.atoms)
      if (c.count(a.relation)) part.atoms.push_back(a);
    auto vars = part.variables();
    std::set<std::string> vs(vars.begin(), vars.end());
    for (const auto& h : q.head)
      if (vs.count(h)) part.head.push_back(h);
    for (const auto& fd : q.fds) {
      if (!vs.count(fd.dependent)) continue;
      // Determinants from other components act as constants here.
      FunctionalDependency f{{}, fd.dependent};
      for (const auto& d : fd.determinants)
        if (vs.count(d)) f.determinants.insert(d);
      if (std::find(part.fds.begin(), part.fds.end(), f) == part.fds.end()) part.fds.push_back(f);
    }
    out.push_back(std::move(part));
  }
  return out;
}

inline std::string to_dot(const DualHypergraph& h) {
  std::string out = "graph H {\n";
  for (std::size_t i = 0; i < h.atoms().size(); ++i)
    out += "  \"" + h.atoms()[i] + "\" [shape=box" + (h.endogenous(i) ? "" : ", style=dashed") + "];\n";
  for (std::size_t v = 0; v < h.variables().size(); ++v) {
    out += "  \"" + h.variables()[v] + "\" [shape=point, xlabel=\"" + h.variables()[v] + "\"];\n";
    for (auto a : h.edge(v)) out += "  \"" + h.variables()[v] + "\" -- \"" + h.atoms()[a] + "\";\n";
  }
  return out + "}\n";
}

}  // namespace resk

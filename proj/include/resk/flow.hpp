#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "database.hpp"
#include "engine.hpp"
#include "linearize.hpp"
#include "query.hpp"
#include "structure.hpp"

namespace resk {

struct FlowEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::int64_t capacity = 0;
  TupleRef label;
};

// Layered network: node 0 is s, node 1 is t, layer[v] is the interface
// index of node v (0 for s, number of slots for t).
struct FlowNetwork {
  std::size_t source = 0;
  std::size_t sink = 1;
  std::vector<std::size_t> layer{0, 0};
  std::vector<FlowEdge> edges;
  std::int64_t infinity = 1;

  std::size_t node_count() const { return layer.size(); }
};

struct MinCut {
  std::int64_t value = 0;
  ContingencySet cut;
  // False when every cut needs an infinite edge.
  bool bounded = true;
};

namespace detail {

class Dinic {
 public:
  explicit Dinic(std::size_t n) : adj_(n), level_(n), it_(n) {}

  std::size_t add(std::size_t u, std::size_t v, std::int64_t c) {
    adj_[u].push_back(arcs_.size());
    arcs_.push_back({v, c});
    adj_[v].push_back(arcs_.size());
    arcs_.push_back({u, 0});
    return arcs_.size() - 2;
  }

  std::int64_t run(std::size_t s, std::size_t t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) total += f;
    }
    return total;
  }

  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<std::size_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (auto a : adj_[u])
        if (arcs_[a].cap > 0 && !seen[arcs_[a].to]) {
          seen[arcs_[a].to] = true;
          q.push_back(arcs_[a].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<std::size_t> q{s};
    level_[s] = 0;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (auto a : adj_[u])
        if (arcs_[a].cap > 0 && level_[arcs_[a].to] < 0) {
          level_[arcs_[a].to] = level_[u] + 1;
          q.push_back(arcs_[a].to);
        }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t u, std::size_t t, std::int64_t f) {
    if (u == t) return f;
    for (auto& i = it_[u]; i < adj_[u].size(); ++i) {
      auto a = adj_[u][i];
      auto v = arcs_[a].to;
      if (arcs_[a].cap <= 0 || level_[v] != level_[u] + 1) continue;
      if (std::int64_t d = dfs(v, t, std::min(f, arcs_[a].cap))) {
        arcs_[a].cap -= d;
        arcs_[a ^ 1].cap += d;
        return d;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace detail

// Max flow, then the edges leaving the residual s-side. The cut's capacity
// is checked against the flow value.
inline MinCut min_cut(const FlowNetwork& n) {
  detail::Dinic d(n.node_count());
  for (const auto& e : n.edges) d.add(e.from, e.to, e.capacity);
  std::int64_t flow = d.run(n.source, n.sink);
  auto side = d.reachable(n.source);
  MinCut out;
  std::int64_t capacity = 0;
  for (const auto& e : n.edges)
    if (side[e.from] && !side[e.to] && e.capacity > 0) {
      capacity += e.capacity;
      if (e.capacity >= n.infinity)
        out.bounded = false;
      else
        out.cut.insert(e.label);
    }
  if (capacity != flow) throw Error("min cut capacity differs from max flow value");
  out.value = flow;
  if (flow >= n.infinity) out.bounded = false;
  return out;
}

// Witness-level FD check over a list of witnesses of q.
inline void check_fds(const Query& q, const std::vector<Witness>& ws) {
  auto vars = q.variables();
  auto index = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
  };
  for (const auto& fd : q.fds) {
    std::vector<std::size_t> det;
    for (const auto& v : fd.determinants) det.push_back(index(v));
    std::size_t dep = index(fd.dependent);
    if (dep >= vars.size()) continue;
    std::map<Tuple, Value> seen;
    for (const auto& w : ws) {
      Tuple key;
      for (auto d : det) key.push_back(w.assignment[d]);
      auto [it, fresh] = seen.emplace(key, w.assignment[dep]);
      if (!fresh && it->second != w.assignment[dep])
        throw Error("database violates the functional dependency " + to_string(fd));
    }
  }
}

// The base query a rewritten query stands for, atoms in slot order.
inline Query base_query(const Query& q, const LinearOrder& order) {
  Query base;
  base.name = q.name;
  base.fds = q.fds;
  for (const auto& name : order.atoms)
    for (auto& b : base_atoms(q.atom(name))) base.atoms.push_back(b);
  return base;
}

// Topology shared by the resilience and responsibility networks: one edge per
// (slot, projection of a witness onto the slot's variables).
struct NetworkSkeleton {
  Query base;
  std::vector<Witness> witnesses;
  FlowNetwork network;
  std::vector<bool> endogenous;                 // per edge
  std::vector<std::vector<TupleRef>> sources;   // per edge: base tuples
  std::vector<std::vector<std::size_t>> paths;  // per witness: edge per slot

  std::int64_t endogenous_edges() const { return std::count(endogenous.begin(), endogenous.end(), true); }
};

inline NetworkSkeleton build_skeleton(const Query& q, const LinearOrder& order, const Database& db,
                                      std::size_t cap = default_witness_cap()) {
  if (!is_contiguous(q, order)) throw Error("order is not linear for the query");
  NetworkSkeleton sk;
  sk.base = base_query(q, order);
  sk.witnesses = enumerate_witnesses(sk.base, db, cap);
  check_fds(sk.base, sk.witnesses);
  auto vars = sk.base.variables();
  auto index = [&](const std::string& v) {
    return static_cast<std::size_t>(std::find(vars.begin(), vars.end(), v) - vars.begin());
  };
  std::size_t r = order.atoms.size();
  std::vector<std::vector<std::size_t>> slot_vars(r), iface(r);
  std::vector<std::vector<std::size_t>> slot_base(r);  // base atom indices per slot
  std::vector<std::size_t> label_base(r);
  std::size_t next_base = 0;
  for (std::size_t p = 0; p < r; ++p) {
    const Atom& a = q.atom(order.atoms[p]);
    for (const auto& v : a.vars()) slot_vars[p].push_back(index(v));
    auto bs = base_atoms(a);
    label_base[p] = next_base;
    bool found = false;
    for (std::size_t k = 0; k < bs.size(); ++k) {
      if (!found && bs[k].relation == a.relation) {
        label_base[p] = next_base + k;
        found = true;
      }
    }
    if (!found && a.endogenous)
      for (std::size_t k = 0; k < bs.size(); ++k)
        if (bs[k].endogenous) {
          label_base[p] = next_base + k;
          break;
        }
    for (std::size_t k = 0; k < bs.size(); ++k) slot_base[p].push_back(next_base + k);
    next_base += bs.size();
  }
  for (std::size_t p = 0; p + 1 < r; ++p) {
    const Atom& a = q.atom(order.atoms[p]);
    const Atom& b = q.atom(order.atoms[p + 1]);
    for (const auto& v : vars)
      if (a.has_var(v) && b.has_var(v)) iface[p].push_back(index(v));
  }

  FlowNetwork& net = sk.network;
  net.layer = {0, r};
  std::map<std::pair<std::size_t, Tuple>, std::size_t> nodes, edges;
  auto node = [&](std::size_t p, const Witness& w) -> std::size_t {
    Tuple key;
    for (auto v : iface[p]) key.push_back(w.assignment[v]);
    auto [it, fresh] = nodes.emplace(std::make_pair(p, key), net.layer.size());
    if (fresh) net.layer.push_back(p + 1);
    return it->second;
  };
  for (const auto& w : sk.witnesses) {
    std::vector<std::size_t> path;
    for (std::size_t p = 0; p < r; ++p) {
      Tuple key;
      for (auto v : slot_vars[p]) key.push_back(w.assignment[v]);
      auto [it, fresh] = edges.emplace(std::make_pair(p, key), net.edges.size());
      if (fresh) {
        FlowEdge e;
        e.from = p == 0 ? net.source : node(p - 1, w);
        e.to = p + 1 == r ? net.sink : node(p, w);
        auto lb = label_base[p];
        e.label = {sk.base.atoms[lb].relation, w.tuples[lb]};
        std::vector<TupleRef> src;
        for (auto b : slot_base[p]) src.push_back({sk.base.atoms[b].relation, w.tuples[b]});
        net.edges.push_back(std::move(e));
        sk.sources.push_back(std::move(src));
        sk.endogenous.push_back(q.atom(order.atoms[p]).endogenous);
      }
      path.push_back(it->second);
    }
    sk.paths.push_back(std::move(path));
  }
  net.infinity = sk.endogenous_edges() + 1;
  return sk;
}

// Endogenous edges capacity 1, exogenous edges infinite.
inline FlowNetwork resilience_network(const NetworkSkeleton& sk) {
  FlowNetwork n = sk.network;
  for (std::size_t e = 0; e < n.edges.size(); ++e) n.edges[e].capacity = sk.endogenous[e] ? 1 : n.infinity;
  return n;
}

// Edges with a source tuple in <tau> or in `removed` get capacity 0, edges of
// the witness and exogenous edges are infinite, the rest capacity 1.
inline FlowNetwork wildcard_network(const NetworkSkeleton& sk, std::size_t witness, const WildcardTuple& tau,
                                    const std::set<TupleRef>& removed = {}) {
  FlowNetwork n = sk.network;
  std::vector<bool> on_w(n.edges.size(), false);
  for (auto e : sk.paths.at(witness)) on_w[e] = true;
  bool hits = false;
  for (std::size_t e = 0; e < n.edges.size(); ++e) {
    bool zero = false;
    for (const auto& s : sk.sources[e]) zero = zero || tau.matches(s) || removed.count(s);
    if (zero && on_w[e]) hits = hits || std::any_of(sk.sources[e].begin(), sk.sources[e].end(),
                                                    [&](const TupleRef& s) { return tau.matches(s); });
    if (zero)
      n.edges[e].capacity = 0;
    else if (on_w[e] || !sk.endogenous[e])
      n.edges[e].capacity = n.infinity;
    else
      n.edges[e].capacity = 1;
  }
  if (!hits) throw Error("witness is disjoint from the wildcard tuple");
  return n;
}

inline FlowNetwork build_resilience_network(const Query& q, const LinearOrder& order, const Database& db) {
  return resilience_network(build_skeleton(q, order, db));
}

namespace detail {

inline std::size_t witness_index(const NetworkSkeleton& sk, const Witness& w) {
  for (std::size_t i = 0; i < sk.witnesses.size(); ++i)
    if (sk.witnesses[i].tuples == w.tuples) return i;
  throw Error("not a witness of the query");
}

}  // namespace detail

// w is a witness of base_query(q, order).
inline FlowNetwork build_responsibility_network(const Query& q, const LinearOrder& order, const Database& db,
                                                const Witness& w, const TupleRef& d) {
  auto sk = build_skeleton(q, order, db);
  auto i = detail::witness_index(sk, w);
  auto ts = witness_tuples(sk.base, sk.witnesses[i]);
  if (std::find(ts.begin(), ts.end(), d) == ts.end()) throw Error("tuple is not part of the witness");
  return wildcard_network(sk, i, WildcardTuple::exact(d));
}

inline FlowNetwork build_wildcard_network(const Query& q, const LinearOrder& order, const Database& db,
                                          const Witness& w, const WildcardTuple& tau) {
  auto sk = build_skeleton(q, order, db);
  return wildcard_network(sk, detail::witness_index(sk, w), tau);
}

inline std::string to_dot(const FlowNetwork& n, const Database& db) {
  std::string out = "digraph N {\n  rankdir=LR;\n";
  for (std::size_t e = 0; e < n.edges.size(); ++e) {
    const auto& ed = n.edges[e];
    std::string cap = ed.capacity >= n.infinity ? "inf" : std::to_string(ed.capacity);
    out += "  n" + std::to_string(ed.from) + " -> n" + std::to_string(ed.to) + " [label=\"" + db.render(ed.label) +
           " / " + cap + "\"];\n";
  }
  return out + "}\n";
}

}  // namespace resk

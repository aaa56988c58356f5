#pragma once

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "database.hpp"
#include "engine.hpp"
#include "hypergraph.hpp"
#include "query.hpp"
#include "structure.hpp"

namespace resk {

struct Literal {
  int var = 1;  // 1-based
  bool positive = true;

  bool operator==(const Literal&) const = default;
};

struct Cnf3 {
  int n = 0;
  std::vector<std::array<Literal, 3>> clauses;

  std::size_t m() const { return clauses.size(); }

  // assignment[i] is the value of variable i+1.
  bool satisfied_by(const std::vector<bool>& assignment) const {
    for (const auto& c : clauses)
      if (std::none_of(c.begin(), c.end(),
                       [&](const Literal& l) { return assignment[l.var - 1] == l.positive; }))
        return false;
    return true;
  }

  // First satisfying assignment in binary counting order.
  std::optional<std::vector<bool>> solve() const {
    if (n > 24) throw Error("formula too large for enumeration");
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      std::vector<bool> a(n);
      for (int i = 0; i < n; ++i) a[i] = (bits >> i) & 1;
      if (satisfied_by(a)) return a;
    }
    return std::nullopt;
  }

  void validate() const {
    if (n < 1) throw Error("formula needs at least one variable");
    for (const auto& c : clauses)
      for (const auto& l : c)
        if (l.var < 1 || l.var > n) throw Error("literal out of range");
  }
};

inline bool distinct_variables(const std::array<Literal, 3>& c) {
  return c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var;
}

inline Cnf3 parse_dimacs(std::istream& in) {
  Cnf3 f;
  bool header = false;
  std::vector<Literal> pending;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c" || tok[0] == 'c' || tok == "%") continue;
    if (tok == "p") {
      std::string kind;
      std::size_t m = 0;
      if (!(ls >> kind >> f.n >> m) || kind != "cnf") throw Error("bad DIMACS header: " + line);
      header = true;
      continue;
    }
    if (!header) throw Error("DIMACS clause before header");
    ls.clear();
    ls.str(line);
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (pending.size() != 3) throw Error("clause does not have exactly 3 literals");
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
      } else {
        pending.push_back({static_cast<int>(std::labs(lit)), lit > 0});
      }
    }
  }
  if (!header) throw Error("missing DIMACS header");
  if (!pending.empty()) throw Error("unterminated DIMACS clause");
  f.validate();
  return f;
}

inline std::string to_dimacs(const Cnf3& f) {
  std::ostringstream out;
  out << "p cnf " << f.n << " " << f.m() << "\n";
  for (const auto& c : f.clauses) {
    for (const auto& l : c) out << (l.positive ? l.var : -l.var) << " ";
    out << "0\n";
  }
  return out.str();
}

// Clauses over three distinct variables (n >= 3) with random signs.
template <class Rng>
Cnf3 random_cnf3(int n, int m, Rng& rng) {
  if (n < 3) throw Error("need at least 3 variables for distinct-variable clauses");
  Cnf3 f;
  f.n = n;
  std::vector<int> vars(n);
  std::iota(vars.begin(), vars.end(), 1);
  std::bernoulli_distribution sign(0.5);
  for (int j = 0; j < m; ++j) {
    std::shuffle(vars.begin(), vars.end(), rng);
    f.clauses.push_back({Literal{vars[0], sign(rng)}, Literal{vars[1], sign(rng)}, Literal{vars[2], sign(rng)}});
  }
  return f;
}

inline Query triangle_query() { return parse_query("q :- R(x,y), S(y,z), T(z,x)"); }
inline Query rats_query() { return parse_query("q :- A(x), R(x,y), S(y,z), T(z,x)"); }

struct TriangleInstance {
  Database db;
  std::size_t k = 0;
  // Solid edges per variable (index i for variable i+1) by label.
  std::vector<std::vector<TupleRef>> positive, negative;
  std::vector<TupleRef> sad;
};

// One circular gadget per variable; clause triangles are formed by
// identifying endpoints of the literals' edges on odd segments.
inline TriangleInstance gen_triangle_instance(const Cnf3& psi) {
  psi.validate();
  for (const auto& c : psi.clauses)
    if (!distinct_variables(c)) throw Error("clause with a repeated variable is not supported by the triangle gadget");
  const int n = psi.n;
  const int m = static_cast<int>(psi.m());
  const int len = 4 * std::max(m, 1);

  // Node ids: (variable, kind, j) with kind 0=a, 1=b, 2=c and j in 1..len.
  auto id = [&](int v, int kind, int j) { return ((v - 1) * 3 + kind) * len + (j - 1); };
  std::vector<int> parent(n * 3 * len);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto unite = [&](int x, int y) {
    x = find(x);
    y = find(y);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  };
  auto next = [&](int j) { return j % len + 1; };

  struct Edge {
    char rel;
    int from, to;
  };
  for (int ci = 0; ci < m; ++ci) {
    const auto& c = psi.clauses[ci];
    int j1 = 4 * ci + 1, j2 = 4 * ci + 2, j3 = 4 * ci + 3;
    Edge r = c[0].positive ? Edge{'R', id(c[0].var, 0, j1), id(c[0].var, 1, j1)}
                           : Edge{'R', id(c[0].var, 0, j2), id(c[0].var, 1, j2)};
    Edge s = c[1].positive ? Edge{'S', id(c[1].var, 1, j2), id(c[1].var, 2, j2)}
                           : Edge{'S', id(c[1].var, 1, j1), id(c[1].var, 2, j1)};
    Edge t = c[2].positive ? Edge{'T', id(c[2].var, 2, j1), id(c[2].var, 0, j2)}
                           : Edge{'T', id(c[2].var, 2, j2), id(c[2].var, 0, j3)};
    unite(r.to, s.from);
    unite(s.to, t.from);
    unite(t.to, r.from);
  }

  TriangleInstance out;
  out.db.add_relation("R", 2, true);
  out.db.add_relation("S", 2, true);
  out.db.add_relation("T", 2, true);
  const char* kinds = "abc";
  auto name = [&](int node) {
    int rep = find(node);
    int j = rep % len + 1, kind = (rep / len) % 3, v = rep / len / 3 + 1;
    return "v" + std::to_string(v) + "." + kinds[kind] + std::to_string(j);
  };
  auto add = [&](char rel, int from, int to) {
    std::string r(1, rel);
    std::vector<std::string> vals{name(from), name(to)};
    out.db.insert(r, vals);
    return out.db.tuple(r, vals);
  };
  out.positive.resize(n);
  out.negative.resize(n);
  for (int v = 1; v <= n; ++v)
    for (int j = 1; j <= len; ++j) {
      bool odd = j % 2 == 1;
      auto r = add('R', id(v, 0, j), id(v, 1, j));
      auto s = add('S', id(v, 1, j), id(v, 2, j));
      auto t = add('T', id(v, 2, j), id(v, 0, next(j)));
      (odd ? out.positive : out.negative)[v - 1].push_back(r);
      (odd ? out.negative : out.positive)[v - 1].push_back(s);
      (odd ? out.positive : out.negative)[v - 1].push_back(t);
      out.sad.push_back(add('T', id(v, 2, j), id(v, 0, j)));
      out.sad.push_back(add('R', id(v, 0, next(j)), id(v, 1, j)));
      out.sad.push_back(add('S', id(v, 1, next(j)), id(v, 2, j)));
    }
  out.k = static_cast<std::size_t>(6 * m * n);
  return out;
}

// Deletes the solid edges labeled with the literal each variable makes true.
inline ContingencySet triangle_assignment_gamma(const TriangleInstance& inst, const std::vector<bool>& assignment) {
  ContingencySet g;
  for (std::size_t i = 0; i < inst.positive.size(); ++i) {
    const auto& edges = assignment.at(i) ? inst.positive[i] : inst.negative[i];
    g.insert(edges.begin(), edges.end());
  }
  return g;
}

struct RatsInstance {
  Database db;
  TupleRef s0;
  std::size_t k = 0;
  std::size_t t = 0;
  bool faithful = true;
  // Per variable, the tuples removed when it is true or false.
  std::vector<ContingencySet> if_true, if_false;
  // Per clause, the elements by assignment of the clause's distinct variables.
  struct ClauseElement {
    std::map<int, bool> assignment;
    TupleRef a;
  };
  std::vector<std::vector<ClauseElement>> clause_elements;
};

// Variable gadgets hang off the anchor a0; each clause gets one element per
// satisfying assignment of its variables, wired to one matching edge per
// variable. t defaults to 8m.
inline RatsInstance gen_rats_instance(const Cnf3& psi, std::optional<std::size_t> t_override = std::nullopt) {
  psi.validate();
  const std::size_t m = psi.m();
  RatsInstance out;
  out.t = t_override ? *t_override : 8 * std::max<std::size_t>(m, 1);
  out.faithful = out.t == 8 * std::max<std::size_t>(m, 1);
  const std::size_t t = out.t;
  Database& db = out.db;
  for (auto [r, a] : {std::pair{"A", 1}, {"R", 2}, {"S", 2}, {"T", 2}}) db.add_relation(r, a, true);
  auto put = [&](const std::string& rel, std::vector<std::string> vals) {
    db.insert(rel, vals);
    return db.tuple(rel, vals);
  };
  put("A", {"a0"});
  put("R", {"a0", "b0"});
  put("T", {"c0", "a0"});
  out.s0 = put("S", {"b0", "c0"});

  auto b = [](int l, std::size_t j) { return "v" + std::to_string(l) + ".b" + std::to_string(j); };
  auto c = [](int l, std::size_t j) { return "v" + std::to_string(l) + ".c" + std::to_string(j); };
  out.if_true.resize(psi.n);
  out.if_false.resize(psi.n);
  for (int l = 1; l <= psi.n; ++l) {
    for (std::size_t j = 1; j <= 2 * t; ++j) {
      auto r = put("R", {"a0", b(l, j)});
      auto tt = put("T", {c(l, j), "a0"});
      if (j <= t) {
        out.if_false[l - 1].insert(r);
        out.if_true[l - 1].insert(tt);
      }
    }
    for (std::size_t j = 1; j <= t; ++j)
      for (std::size_t j2 = 1; j2 <= t; ++j2) put("S", {b(l, j), c(l, j2)});
    for (std::size_t j = 1; j <= t; ++j) {
      out.if_true[l - 1].insert(put("S", {b(l, j), c(l, t + j)}));
      out.if_false[l - 1].insert(put("S", {b(l, t + j), c(l, j)}));
    }
  }

  // Next unused matching index per (variable, polarity).
  std::map<std::pair<int, bool>, std::size_t> used;
  std::size_t k = 2 * t * static_cast<std::size_t>(psi.n);
  for (std::size_t s = 0; s < m; ++s) {
    const auto& cl = psi.clauses[s];
    std::vector<int> vars;
    for (const auto& lit : cl)
      if (std::find(vars.begin(), vars.end(), lit.var) == vars.end()) vars.push_back(lit.var);
    std::vector<RatsInstance::ClauseElement> elems;
    for (std::uint32_t bits = 0; bits < (1u << vars.size()); ++bits) {
      std::map<int, bool> asg;
      for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = (bits >> i) & 1;
      if (std::none_of(cl.begin(), cl.end(), [&](const Literal& lit) { return asg[lit.var] == lit.positive; }))
        continue;
      std::string a = "s" + std::to_string(s + 1) + ".a" + std::to_string(elems.size() + 1);
      RatsInstance::ClauseElement e{asg, put("A", {a})};
      for (int v : vars) {
        bool val = asg[v];
        std::size_t j = ++used[{v, val}];
        if (j > t) throw Error("matching too small for the clause elements; increase t");
        // true: v-matching edge (b_j, c_{t+j}); false: (b_{t+j}, c_j)
        put("R", {a, val ? b(v, j) : b(v, t + j)});
        put("T", {val ? c(v, t + j) : c(v, j), a});
      }
      elems.push_back(std::move(e));
    }
    k += elems.size() - 1;
    out.clause_elements.push_back(std::move(elems));
  }
  out.k = k;
  return out;
}

// Contingency set for s0 induced by an assignment: each variable's gadget
// cover plus the A-tuples of the clause elements it does not match.
inline ContingencySet rats_assignment_gamma(const RatsInstance& inst, const std::vector<bool>& assignment) {
  ContingencySet g;
  for (std::size_t i = 0; i < inst.if_true.size(); ++i) {
    const auto& part = assignment.at(i) ? inst.if_true[i] : inst.if_false[i];
    g.insert(part.begin(), part.end());
  }
  for (const auto& elems : inst.clause_elements)
    for (const auto& e : elems) {
      bool chosen = std::all_of(e.assignment.begin(), e.assignment.end(),
                                [&](const auto& kv) { return assignment.at(kv.first - 1) == kv.second; });
      if (!chosen) g.insert(e.a);
    }
  return g;
}

// Database for q whose witnesses correspond one-to-one to the triangles of
// d_tri (a database over R(x,y), S(y,z), T(z,x)).
inline Database embed_triangle(const Query& q, const Triad& triad, const Database& d_tri) {
  DualHypergraph h(q);
  for (const auto& a : triad.atoms) {
    auto pos = q.find(a);
    if (!pos || !q.atoms[*pos].endogenous) throw Error("triad atom " + a + " is not an endogenous atom of the query");
  }
  if (!is_triad(q, h, triad.atoms[0], triad.atoms[1], triad.atoms[2])) throw Error("not a triad of the query");
  for (const auto& r : {"R", "S", "T"})
    if (!d_tri.has(r) || d_tri.relation(r).arity != 2) throw Error("triangle database needs binary R, S and T");

  const Atom& s0 = q.atom(triad.atoms[0]);
  const Atom& s1 = q.atom(triad.atoms[1]);
  const Atom& s2 = q.atom(triad.atoms[2]);
  // Value of each variable given the triangle corners.
  auto value = [&](const std::string& v, const std::string& a, const std::string& b, const std::string& c) {
    bool i0 = s0.has_var(v), i1 = s1.has_var(v), i2 = s2.has_var(v);
    if (i0 && i1 && i2) return std::string("*");
    if (i0 && i1) return b;
    if (i1 && i2) return c;
    if (i2 && i0) return a;
    if (i0) return a + "|" + b;
    if (i1) return b + "|" + c;
    if (i2) return c + "|" + a;
    return a + "|" + b + "|" + c;
  };

  Database out;
  for (const auto& atom : q.atoms) out.add_relation(atom.relation, atom.terms.size(), atom.endogenous);
  auto row = [&](const Atom& atom, const std::string& a, const std::string& b, const std::string& c) {
    std::vector<std::string> vals;
    for (const auto& term : atom.terms) vals.push_back(term.variable ? value(term.text, a, b, c) : term.text);
    out.insert(atom.relation, vals);
  };
  const std::string none = "?";
  auto name = [&](Value v) { return d_tri.render(v); };
  for (const auto& t : d_tri.relation("R").tuples) row(s0, name(t[0]), name(t[1]), none);
  for (const auto& t : d_tri.relation("S").tuples) row(s1, none, name(t[0]), name(t[1]));
  for (const auto& t : d_tri.relation("T").tuples) row(s2, name(t[1]), none, name(t[0]));
  auto triangles = enumerate_witnesses(triangle_query(), d_tri);
  std::set<std::string> in_triad(triad.atoms.begin(), triad.atoms.end());
  for (const auto& w : triangles) {
    // Variables of triangle_query() in order x, y, z.
    std::string a = name(w.assignment[0]), b = name(w.assignment[1]), c = name(w.assignment[2]);
    for (const auto& atom : q.atoms)
      if (!in_triad.count(atom.relation)) row(atom, a, b, c);
  }
  return out;
}

}  // namespace resk

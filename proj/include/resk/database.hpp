#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "query.hpp"

namespace resk {

using Tuple = std::vector<Value>;

// Append-only string interning shared by a database and its derived copies.
class Dictionary {
 public:
  Value intern(std::string_view s) {
    auto it = ids_.find(std::string(s));
    if (it != ids_.end()) return it->second;
    Value v = static_cast<Value>(names_.size());
    names_.emplace_back(s);
    ids_.emplace(names_.back(), v);
    return v;
  }

  Value find(std::string_view s) const {
    auto it = ids_.find(std::string(s));
    return it == ids_.end() ? kNoValue : it->second;
  }

  const std::string& name(Value v) const {
    if (v >= names_.size()) throw Error("unknown value id " + std::to_string(v));
    return names_[v];
  }

  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, Value> ids_;
  std::vector<std::string> names_;
};

struct TupleRef {
  std::string relation;
  Tuple values;

  auto operator<=>(const TupleRef&) const = default;
  bool operator==(const TupleRef&) const = default;
};

using ContingencySet = std::set<TupleRef>;

struct Relation {
  std::size_t arity = 0;
  bool endogenous = true;
  std::set<Tuple> tuples;
};

class Database {
 public:
  Database() : dict_(std::make_shared<Dictionary>()) {}
  explicit Database(std::shared_ptr<Dictionary> dict) : dict_(std::move(dict)) {}

  Dictionary& dict() { return *dict_; }
  const Dictionary& dict() const { return *dict_; }
  const std::shared_ptr<Dictionary>& shared_dict() const { return dict_; }

  Relation& add_relation(const std::string& name, std::size_t arity, bool endogenous) {
    auto [it, fresh] = relations_.try_emplace(name);
    if (!fresh && it->second.arity != arity)
      throw Error("relation " + name + " redeclared with arity " + std::to_string(arity));
    it->second.arity = arity;
    it->second.endogenous = endogenous;
    return it->second;
  }

  void remove_relation(const std::string& name) { relations_.erase(name); }

  bool has(std::string_view name) const { return relations_.count(std::string(name)) > 0; }

  const Relation& relation(std::string_view name) const {
    auto it = relations_.find(std::string(name));
    if (it == relations_.end()) throw Error("unknown relation " + std::string(name));
    return it->second;
  }

  Relation& relation(std::string_view name) {
    auto it = relations_.find(std::string(name));
    if (it == relations_.end()) throw Error("unknown relation " + std::string(name));
    return it->second;
  }

  const std::map<std::string, Relation>& relations() const { return relations_; }

  bool insert(const std::string& rel, Tuple t) {
    Relation& r = relation(rel);
    if (t.size() != r.arity)
      throw Error("arity mismatch for " + rel + ": got " + std::to_string(t.size()) + ", expected " +
                  std::to_string(r.arity));
    return r.tuples.insert(std::move(t)).second;
  }

  bool insert(const std::string& rel, const std::vector<std::string>& values) {
    Tuple t;
    for (const auto& v : values) t.push_back(dict_->intern(v));
    return insert(rel, std::move(t));
  }

  bool contains(const TupleRef& t) const {
    auto it = relations_.find(t.relation);
    return it != relations_.end() && it->second.tuples.count(t.values) > 0;
  }

  bool is_endogenous(std::string_view rel) const { return relation(rel).endogenous; }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, r] : relations_) n += r.tuples.size();
    return n;
  }

  std::size_t endogenous_size() const {
    std::size_t n = 0;
    for (const auto& [_, r] : relations_)
      if (r.endogenous) n += r.tuples.size();
    return n;
  }

  std::set<Value> domain() const {
    std::set<Value> out;
    for (const auto& [_, r] : relations_)
      for (const auto& t : r.tuples) out.insert(t.begin(), t.end());
    return out;
  }

  Value value(std::string_view s) const { return dict_->find(s); }
  Value intern(std::string_view s) { return dict_->intern(s); }

  std::string render(Value v) const { return dict_->name(v); }

  std::string render(const TupleRef& t) const {
    std::string out = t.relation + "(";
    for (std::size_t i = 0; i < t.values.size(); ++i) out += (i ? "," : "") + render(t.values[i]);
    return out + ")";
  }

  TupleRef tuple(const std::string& rel, const std::vector<std::string>& values) const {
    TupleRef t{rel, {}};
    for (const auto& v : values) t.values.push_back(dict_->find(v));
    return t;
  }

 private:
  std::shared_ptr<Dictionary> dict_;
  std::map<std::string, Relation> relations_;
};

// Relation-name pattern with per-position constant or wildcard.
struct WildcardTuple {
  std::string relation;
  std::vector<std::optional<Value>> pattern;

  bool matches(const TupleRef& t) const { return t.relation == relation && matches(t.values); }

  bool matches(const Tuple& t) const {
    if (t.size() != pattern.size()) return false;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (pattern[i] && *pattern[i] != t[i]) return false;
    return true;
  }

  std::size_t wildcards() const {
    return std::count_if(pattern.begin(), pattern.end(), [](const auto& p) { return !p; });
  }

  static WildcardTuple exact(const TupleRef& t) {
    WildcardTuple w{t.relation, {}};
    for (Value v : t.values) w.pattern.emplace_back(v);
    return w;
  }

  std::optional<TupleRef> as_tuple() const {
    if (wildcards() != 0) return std::nullopt;
    TupleRef t{relation, {}};
    for (const auto& p : pattern) t.values.push_back(*p);
    return t;
  }

  // Matched set within a database.
  std::vector<TupleRef> expand(const Database& db) const {
    std::vector<TupleRef> out;
    if (!db.has(relation)) return out;
    for (const auto& t : db.relation(relation).tuples)
      if (matches(t)) out.push_back({relation, t});
    return out;
  }
};

inline std::string render(const Database& db, const WildcardTuple& w) {
  std::string out = w.relation + "(";
  for (std::size_t i = 0; i < w.pattern.size(); ++i) {
    out += i ? "," : "";
    if (!w.pattern[i])
      out += "*";
    else if (*w.pattern[i] == kNoValue)
      out += "?";
    else
      out += db.render(*w.pattern[i]);
  }
  return out + ")";
}

// Parses "S(3,5,7)" or "S(*,5,7)". Constants unknown to the database match
// nothing.
inline WildcardTuple parse_tuple(std::string_view text, const Database& db) {
  detail::Lexer lx(text);
  WildcardTuple w;
  w.relation = lx.identifier();
  lx.expect("(");
  do {
    if (lx.accept("*")) {
      w.pattern.emplace_back(std::nullopt);
      continue;
    }
    Term t = lx.term();
    w.pattern.emplace_back(db.value(t.text));
  } while (lx.accept(","));
  lx.expect(")");
  if (!lx.at_end()) lx.fail("unexpected input after tuple");
  if (db.has(w.relation) && db.relation(w.relation).arity != w.pattern.size())
    throw Error("tuple " + std::string(text) + " does not match the arity of " + w.relation);
  return w;
}

// Comma-separated rows, optional double quotes with "" as the escape.
inline std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, was_quoted = false;
    auto finish = [&] {
      if (!was_quoted) {
        auto b = field.find_first_not_of(" \t");
        auto e = field.find_last_not_of(" \t");
        field = b == std::string::npos ? std::string() : field.substr(b, e - b + 1);
      }
      row.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = was_quoted = true;
        field.clear();
      } else if (c == ',') {
        finish();
      } else if (!was_quoted) {
        field += c;
      }
    }
    if (quoted) throw Error("unterminated quote in CSV row: " + line);
    finish();
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_csv(std::ostream& out, const Database& db, const std::string& rel) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n ") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& t : db.relation(rel).tuples) {
    for (std::size_t i = 0; i < t.size(); ++i) out << (i ? "," : "") << field(db.render(t[i]));
    out << "\n";
  }
}

inline void save_database(const Database& db, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, _] : db.relations()) {
    std::ofstream out(dir / (name + ".csv"));
    if (!out) throw Error("cannot write " + (dir / (name + ".csv")).string());
    write_csv(out, db, name);
  }
}

// Loads <relation>.csv for every atom of q (including atoms merged into
// others). Duplicate rows are dropped and reported through warnings.
inline Database load_database(const Query& q, const std::filesystem::path& dir,
                              std::vector<std::string>* warnings = nullptr) {
  Database db;
  auto load = [&](const Atom& a) {
    auto file = dir / (a.relation + ".csv");
    std::ifstream in(file);
    if (!in) throw Error("missing relation file " + file.string());
    db.add_relation(a.relation, a.terms.size(), a.endogenous);
    auto rows = read_csv(in);
    std::size_t line = 0;
    for (const auto& row : rows) {
      ++line;
      if (row.size() != a.terms.size())
        throw Error(file.string() + ": row " + std::to_string(line) + " has " + std::to_string(row.size()) +
                    " columns, expected " + std::to_string(a.terms.size()));
      if (!db.insert(a.relation, row) && warnings)
        warnings->push_back(file.string() + ": duplicate row " + std::to_string(line) + " ignored");
    }
  };
  for (const auto& a : q.atoms) {
    load(a);
    for (const auto& m : a.merged) load(m);
  }
  return db;
}

namespace detail {

inline void select_into(const AtomSelection& sel, const Database& src, Database& dst, bool endogenous,
                        std::map<TupleRef, TupleRef>* origin) {
  if (!src.has(sel.from)) throw Error("constant of unknown relation " + sel.from);
  const Relation& r = src.relation(sel.from);
  for (const auto& [pos, _] : sel.equals)
    if (pos >= r.arity) throw Error("constant at unknown position " + std::to_string(pos) + " of " + sel.from);
  for (const auto& [a, b] : sel.same)
    if (std::max(a, b) >= r.arity) throw Error("unknown position in " + sel.from);
  dst.add_relation(sel.to, sel.keep.size(), endogenous);
  std::vector<std::pair<std::size_t, Value>> eq;
  for (const auto& [pos, text] : sel.equals) eq.emplace_back(pos, src.value(text));
  for (const auto& t : r.tuples) {
    bool ok = std::all_of(eq.begin(), eq.end(), [&](const auto& e) { return t[e.first] == e.second; }) &&
              std::all_of(sel.same.begin(), sel.same.end(), [&](const auto& s) { return t[s.first] == t[s.second]; });
    if (!ok) continue;
    Tuple p;
    for (auto k : sel.keep) p.push_back(t[k]);
    if (origin) origin->emplace(TupleRef{sel.to, p}, TupleRef{sel.from, t});
    dst.relation(sel.to).tuples.insert(std::move(p));
  }
}

}  // namespace detail

// Drops head variables (binding them to output values when given) and
// removes constants and repeated variables by selection and projection.
inline std::pair<Query, Database> normalize_constants(const Query& q, const Database& db,
                                                      const std::optional<std::vector<std::string>>& output = {},
                                                      std::map<TupleRef, TupleRef>* origin = nullptr) {
  Query bound = q;
  if (output)
    bound = bind_head(q, *output);
  else
    bound.head.clear();
  auto [out, plan] = drop_constants(bound);
  Database res(db.shared_dict());
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    const Atom& a = out.atoms[i];
    detail::select_into(plan[i], db, res, a.endogenous, origin);
    for (const auto& m : a.merged) {
      AtomSelection same{m.relation, m.relation, {}, {}, {}};
      for (std::size_t k = 0; k < m.terms.size(); ++k) same.keep.push_back(k);
      detail::select_into(same, db, res, m.endogenous, nullptr);
    }
  }
  return {std::move(out), std::move(res)};
}

// Replaces each merged atom's relation by the intersection with its merged
// members (columns aligned by variable) and drops the member relations.
inline Database materialize_merges(const Query& q, const Database& db) {
  Database out = db;
  for (const auto& a : q.atoms) {
    if (a.merged.empty()) continue;
    auto vars = a.vars();
    Relation& lead = out.relation(a.relation);
    for (const auto& m : a.merged) {
      const Relation& other = db.relation(m.relation);
      std::vector<std::size_t> col;
      for (const auto& t : m.terms) col.push_back(std::find(vars.begin(), vars.end(), t.text) - vars.begin());
      std::set<Tuple> keep;
      for (const auto& t : lead.tuples) {
        Tuple r;
        for (auto c : col) r.push_back(t[c]);
        if (other.tuples.count(r)) keep.insert(t);
      }
      lead.tuples = std::move(keep);
      out.remove_relation(m.relation);
    }
    lead.endogenous = a.endogenous;
  }
  return out;
}

// A Boolean, constant-free, merged query together with its database, ready
// for the solvers.
struct Prepared {
  Query query;
  Database db;
  // Rewritten tuple (e.g. R'(3)) to the tuple it was selected from.
  std::map<TupleRef, TupleRef> origin;

  TupleRef original(const TupleRef& t) const {
    auto it = origin.find(t);
    return it == origin.end() ? t : it->second;
  }
};

inline Prepared prepare(const Query& parsed, const Database& raw,
                        const std::optional<std::vector<std::string>>& output = {}) {
  Prepared p;
  auto [q1, db1] = normalize_constants(parsed, raw, output, &p.origin);
  for (auto it = p.origin.begin(); it != p.origin.end();)
    it = it->first == it->second ? p.origin.erase(it) : std::next(it);
  p.query = normalize(q1);
  p.db = materialize_merges(p.query, db1);
  return p;
}

}  // namespace resk

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common.hpp"

namespace resk {

struct Term {
  bool variable = true;
  std::string text;

  static Term var(std::string name) { return {true, std::move(name)}; }
  static Term constant(std::string value) { return {false, std::move(value)}; }

  bool operator==(const Term&) const = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> terms;
  bool endogenous = true;
  // Atoms folded into this one by normalize (identical variable set); their
  // relations are intersected with this one when the database is prepared.
  std::vector<Atom> merged;
  // Base atoms this atom stands for after closure or dissociation; empty
  // means the atom is itself a base atom.
  std::vector<Atom> sources;

  // Distinct variables in order of first occurrence.
  std::vector<std::string> vars() const {
    std::vector<std::string> out;
    for (const auto& t : terms)
      if (t.variable && std::find(out.begin(), out.end(), t.text) == out.end()) out.push_back(t.text);
    return out;
  }

  std::set<std::string> var_set() const {
    std::set<std::string> out;
    for (const auto& t : terms)
      if (t.variable) out.insert(t.text);
    return out;
  }

  bool has_var(std::string_view v) const {
    return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.variable && t.text == v; });
  }

  bool has_constants() const {
    return std::any_of(terms.begin(), terms.end(), [](const Term& t) { return !t.variable; });
  }

  bool has_repeated_vars() const {
    auto n = std::count_if(terms.begin(), terms.end(), [](const Term& t) { return t.variable; });
    return vars().size() != static_cast<std::size_t>(n);
  }

  bool operator==(const Atom&) const = default;
};

struct FunctionalDependency {
  std::set<std::string> determinants;
  std::string dependent;

  bool operator==(const FunctionalDependency&) const = default;
  auto operator<=>(const FunctionalDependency&) const = default;
};

struct Query {
  std::string name = "q";
  std::vector<std::string> head;
  std::vector<Atom> atoms;
  std::vector<FunctionalDependency> fds;

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    for (const auto& a : atoms)
      for (const auto& v : a.vars())
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
  }

  std::optional<std::size_t> find(std::string_view relation) const {
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (atoms[i].relation == relation) return i;
    return std::nullopt;
  }

  const Atom& atom(std::string_view relation) const {
    auto i = find(relation);
    if (!i) throw Error("unknown atom " + std::string(relation));
    return atoms[*i];
  }

  Atom& atom(std::string_view relation) {
    auto i = find(relation);
    if (!i) throw Error("unknown atom " + std::string(relation));
    return atoms[*i];
  }

  std::size_t endogenous_count() const {
    return std::count_if(atoms.begin(), atoms.end(), [](const Atom& a) { return a.endogenous; });
  }

  bool operator==(const Query&) const = default;
};

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text, std::size_t first_line = 1) : s_(text), line_(first_line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, col_); }

  void skip_space() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= s_.size();
  }

  char peek() {
    skip_space();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    for (std::size_t i = 0; i < tok.size(); ++i) advance();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  std::string identifier() {
    skip_space();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected identifier");
    std::string out;
    while (pos_ < s_.size() && ident_char(s_[pos_])) {
      out += s_[pos_];
      advance();
    }
    return out;
  }

  Term term() {
    skip_space();
    if (pos_ >= s_.size()) fail("expected term");
    char c = s_[pos_];
    if (c == '"' || c == '\'') return Term::constant(quoted(c));
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      std::string out(1, c);
      advance();
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        out += s_[pos_];
        advance();
      }
      if (out == "-") fail("expected digits after '-'");
      return Term::constant(out);
    }
    return Term::var(identifier());
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string quoted(char q) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated string");
      char c = s_[pos_];
      advance();
      if (c == q) break;
      if (c == '\\') {
        if (pos_ >= s_.size()) fail("unterminated string");
        c = s_[pos_];
        advance();
      }
      out += c;
    }
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t col_ = 1;
};

inline bool is_integer(std::string_view s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !Lexer::ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), Lexer::ident_char);
}

}  // namespace detail

inline std::string to_string(const Term& t) {
  if (t.variable || detail::is_integer(t.text)) return t.text;
  std::string out = "\"";
  for (char c : t.text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string to_string(const Atom& a) {
  std::string out = a.relation + (a.endogenous ? "" : "^x") + "(";
  for (std::size_t i = 0; i < a.terms.size(); ++i) out += (i ? "," : "") + to_string(a.terms[i]);
  return out + ")";
}

inline std::string to_string(const FunctionalDependency& fd) {
  std::string out;
  for (const auto& v : fd.determinants) out += v + " ";
  return out + "-> " + fd.dependent;
}

inline std::string to_string(const Query& q) {
  std::string out = q.name;
  if (!q.head.empty()) {
    out += "(";
    for (std::size_t i = 0; i < q.head.size(); ++i) out += (i ? "," : "") + q.head[i];
    out += ")";
  }
  out += " :- ";
  for (std::size_t i = 0; i < q.atoms.size(); ++i) out += (i ? ", " : "") + to_string(q.atoms[i]);
  if (!q.fds.empty()) {
    out += "\nfds:";
    for (const auto& fd : q.fds) out += "\n" + to_string(fd);
  }
  return out;
}

inline Query parse_query(std::string_view text) {
  // Split off the FD section: a line whose first token is "fds:".
  std::string_view rule = text;
  std::string_view fd_part;
  std::size_t fd_first_line = 0;
  {
    std::size_t pos = 0, line = 1;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view l = text.substr(pos, end - pos);
      std::size_t b = l.find_first_not_of(" \t\r");
      if (b != std::string_view::npos && l.substr(b, 4) == "fds:") {
        rule = text.substr(0, pos);
        fd_part = text.substr(pos + b + 4);
        fd_first_line = line;
        break;
      }
      pos = end + 1;
      ++line;
    }
  }

  Query q;
  detail::Lexer lx(rule);
  q.name = lx.identifier();
  if (lx.accept("(")) {
    if (!lx.accept(")")) {
      do {
        std::string v = lx.identifier();
        if (std::find(q.head.begin(), q.head.end(), v) != q.head.end()) lx.fail("repeated head variable " + v);
        q.head.push_back(v);
      } while (lx.accept(","));
      lx.expect(")");
    }
  }
  lx.expect(":-");
  do {
    Atom a;
    a.relation = lx.identifier();
    if (lx.accept("^")) {
      std::string mark = lx.identifier();
      if (mark != "x") lx.fail("unknown atom marker ^" + mark);
      a.endogenous = false;
    }
    lx.expect("(");
    do a.terms.push_back(lx.term());
    while (lx.accept(","));
    lx.expect(")");
    if (q.find(a.relation)) lx.fail("self-join not supported: relation " + a.relation + " repeated");
    q.atoms.push_back(std::move(a));
  } while (lx.accept(","));
  lx.accept(".");
  if (!lx.at_end()) lx.fail("unexpected input");

  auto vars = q.variables();
  auto known = [&](const std::string& v) { return std::find(vars.begin(), vars.end(), v) != vars.end(); };
  for (const auto& h : q.head)
    if (!known(h)) throw ParseError("head variable " + h + " occurs in no atom", 1, 1);

  if (!fd_part.empty()) {
    std::size_t line = fd_first_line;
    std::size_t pos = 0;
    while (pos <= fd_part.size()) {
      std::size_t end = fd_part.find('\n', pos);
      if (end == std::string_view::npos) end = fd_part.size();
      std::string l(fd_part.substr(pos, end - pos));
      if (auto h = l.find('#'); h != std::string::npos) l.erase(h);
      std::replace(l.begin(), l.end(), ',', ' ');
      std::istringstream in(l);
      std::vector<std::string> toks;
      for (std::string tok; in >> tok;) toks.push_back(tok);
      if (!toks.empty()) {
        auto arrow = std::find(toks.begin(), toks.end(), "->");
        if (arrow == toks.end() || arrow + 2 != toks.end())
          throw ParseError("functional dependency must read 'v1 v2 -> u'", line, 1);
        FunctionalDependency fd;
        for (auto it = toks.begin(); it != arrow; ++it) {
          if (!known(*it)) throw ParseError("FD variable " + *it + " occurs in no atom", line, 1);
          fd.determinants.insert(*it);
        }
        fd.dependent = toks.back();
        if (!known(fd.dependent)) throw ParseError("FD variable " + fd.dependent + " occurs in no atom", line, 1);
        if (fd.determinants.count(fd.dependent))
          throw ParseError("FD dependent " + fd.dependent + " is among its determinants", line, 1);
        if (std::find(q.fds.begin(), q.fds.end(), fd) == q.fds.end()) q.fds.push_back(std::move(fd));
      }
      pos = end + 1;
      ++line;
    }
  }
  return q;
}

// Per-atom description of the selection/projection that removes constants
// and repeated variables.
struct AtomSelection {
  std::string from;                                         // original relation
  std::string to;                                           // rewritten relation
  std::vector<std::size_t> keep;                            // projected positions
  std::vector<std::pair<std::size_t, std::string>> equals;  // position == constant
  std::vector<std::pair<std::size_t, std::size_t>> same;    // position == position
  bool identity() const { return from == to && equals.empty() && same.empty(); }
};

// Replaces head variables by the given constants and drops the head.
inline Query bind_head(const Query& q, const std::vector<std::string>& values) {
  if (values.size() != q.head.size())
    throw Error("output tuple has " + std::to_string(values.size()) + " values, head has " +
                std::to_string(q.head.size()));
  Query out = q;
  for (auto& a : out.atoms)
    for (auto& t : a.terms)
      for (std::size_t i = 0; i < q.head.size(); ++i)
        if (t.variable && t.text == q.head[i]) t = Term::constant(values[i]);
  std::vector<FunctionalDependency> fds;
  auto vars = out.variables();
  for (const auto& fd : out.fds) {
    FunctionalDependency f;
    for (const auto& v : fd.determinants)
      if (std::find(vars.begin(), vars.end(), v) != vars.end()) f.determinants.insert(v);
    if (std::find(vars.begin(), vars.end(), fd.dependent) != vars.end()) {
      f.dependent = fd.dependent;
      fds.push_back(f);
    }
  }
  out.fds = std::move(fds);
  out.head.clear();
  return out;
}

// Rewrites atoms with constants or repeated variables into constant-free,
// duplicate-free atoms named R', R'', ... and drops the head.
inline std::pair<Query, std::vector<AtomSelection>> drop_constants(const Query& q) {
  Query out = q;
  out.head.clear();
  std::set<std::string> names;
  for (const auto& a : q.atoms) names.insert(a.relation);
  std::vector<AtomSelection> plan;
  for (auto& a : out.atoms) {
    AtomSelection sel;
    sel.from = sel.to = a.relation;
    std::map<std::string, std::size_t> first;
    std::vector<Term> terms;
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
      const Term& t = a.terms[i];
      if (!t.variable) {
        sel.equals.emplace_back(i, t.text);
      } else if (auto it = first.find(t.text); it != first.end()) {
        sel.same.emplace_back(it->second, i);
      } else {
        first[t.text] = i;
        sel.keep.push_back(i);
        terms.push_back(t);
      }
    }
    if (!sel.equals.empty() || !sel.same.empty()) {
      std::string name = a.relation + "'";
      while (names.count(name)) name += "'";
      names.insert(name);
      sel.to = name;
      a.relation = name;
      a.terms = std::move(terms);
    }
    plan.push_back(std::move(sel));
  }
  return {std::move(out), std::move(plan)};
}

// Merges atoms with identical variable sets. The merged atom takes the name
// and column order of its first endogenous member and is endogenous if any
// member is. Atoms with constants are left alone.
inline Query normalize(const Query& q) {
  Query out;
  out.name = q.name;
  out.head = q.head;
  out.fds = q.fds;
  std::vector<bool> used(q.atoms.size(), false);
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> group{i};
    if (!q.atoms[i].has_constants()) {
      for (std::size_t j = i + 1; j < q.atoms.size(); ++j)
        if (!used[j] && !q.atoms[j].has_constants() && q.atoms[j].var_set() == q.atoms[i].var_set())
          group.push_back(j);
    }
    for (auto g : group) used[g] = true;
    std::size_t lead = group.front();
    for (auto g : group)
      if (q.atoms[g].endogenous) {
        lead = g;
        break;
      }
    Atom a = q.atoms[lead];
    for (auto g : group) {
      if (g == lead) continue;
      Atom m = q.atoms[g];
      a.endogenous = a.endogenous || m.endogenous;
      auto nested = std::move(m.merged);
      m.merged.clear();
      a.merged.push_back(std::move(m));
      for (auto& n : nested) a.merged.push_back(std::move(n));
    }
    out.atoms.push_back(std::move(a));
  }
  return out;
}

}  // namespace resk

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "resk/resk.hpp"

using json = nlohmann::json;
using namespace resk;

namespace {

// Domain failure with a machine-readable code (exit 1).
struct Failure {
  std::string code;
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& s) {
  std::istringstream in(s);
  auto rows = read_csv(in);
  return rows.empty() ? std::vector<std::string>{} : rows.front();
}

json tuples(const Database& db, const ContingencySet& g) {
  json out = json::array();
  for (const auto& t : g) out.push_back(db.render(t));
  return out;
}

struct Options {
  std::string format = "json";
  std::string query_file, db_dir, output, tuple, problem = "resilience", kind = "triangle", cnf_file, out_dir;
  std::optional<std::size_t> t;
  std::optional<int> random_n, random_m;
  std::uint64_t seed = 1;
  bool exact = false;
};

Query load_query(const Options& o) { return parse_query(read_file(o.query_file)); }

Prepared load(const Options& o, std::vector<std::string>& warnings) {
  Query q = load_query(o);
  Database raw = load_database(q, o.db_dir, &warnings);
  std::optional<std::vector<std::string>> out;
  if (!o.output.empty()) out = split_csv(o.output);
  return prepare(q, raw, out);
}

json run_classify(const Options& o) {
  Query q = load_query(o);
  auto c = classify(q, parse_problem(o.problem));
  json j{{"problem", to_string(c.problem)}, {"verdict", to_string(c.verdict)},
         {"normalized_query", to_string(c.normalized_query)}};
  if (c.triad)
    j["triad"] = {c.triad->atoms[0], c.triad->atoms[1], c.triad->atoms[2]};
  else
    j["linear_order"] = c.linear_order;
  return j;
}

json result_json(const Prepared& p, const SolveResult& r) {
  json j{{"k", r.k}, {"contingency", tuples(p.db, r.gamma)}, {"method", to_string(r.method)}};
  if (!p.origin.empty()) {
    ContingencySet orig;
    for (const auto& t : r.gamma) orig.insert(p.original(t));
    j["contingency_original"] = tuples(p.db, orig);
  }
  return j;
}

json run_resilience(const Options& o) {
  std::vector<std::string> warnings;
  auto p = load(o, warnings);
  SolveResult r;
  if (o.exact) {
    auto e = exact_resilience(p.query, p.db);
    r = {e.k, e.gamma, Method::exact};
  } else {
    r = solve_resilience(p.query, p.db);
  }
  json j = result_json(p, r);
  j["query_true"] = evaluate(p.query, p.db);
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

json run_responsibility(const Options& o) {
  std::vector<std::string> warnings;
  auto p = load(o, warnings);
  auto tau = parse_tuple(o.tuple, p.db);
  std::optional<SolveResult> r;
  if (o.exact) {
    if (auto e = exact_wildcard_responsibility(p.query, p.db, tau)) r = SolveResult{e->k, e->gamma, Method::exact};
  } else {
    r = solve_responsibility(p.query, p.db, tau);
  }
  if (!r) throw Failure{"not_a_cause", render(p.db, tau) + " occurs in no witness"};
  json j = result_json(p, *r);
  j["tuple"] = render(p.db, tau);
  j["score"] = 1.0 / (1.0 + static_cast<double>(r->k));
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

json run_max_resp_set(const Options& o) {
  std::vector<std::string> warnings;
  auto p = load(o, warnings);
  auto s = max_responsibility_set(p.query, p.db);
  json members = json::array();
  for (const auto& m : s.members)
    members.push_back({{"tuple", p.db.render(m)}, {"contingency", tuples(p.db, s.contingency.at(m))}});
  json j{{"k", s.k}, {"score", 1.0 / static_cast<double>(s.k)}, {"members", members}};
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

json run_closure(const Options& o) {
  Query q = load_query(o);
  Query c = induced_rewrite_closure(q);
  return {{"closure", to_string(c)}, {"changed", !(c == q)}};
}

json run_linearize(const Options& o) {
  Query q = load_query(o);
  json j = json::array();
  for (const auto& comp : split_components(q)) {
    Query nf = normal_form(comp, parse_problem(o.problem));
    if (auto t = find_triad(nf))
      throw Failure{"triad", "query has the triad {" + t->atoms[0] + "," + t->atoms[1] + "," + t->atoms[2] + "}"};
    auto lin = linearize_triad_free(nf);
    Query ordered = lin.query;
    ordered.atoms.clear();
    for (const auto& a : lin.order.atoms) ordered.atoms.push_back(lin.query.atom(a));
    j.push_back({{"query", to_string(ordered)}, {"order", lin.order.atoms}});
  }
  return {{"components", j}};
}

json run_gen_gadget(const Options& o) {
  Cnf3 psi;
  if (!o.cnf_file.empty()) {
    std::istringstream in(read_file(o.cnf_file));
    psi = parse_dimacs(in);
  } else if (o.random_n && o.random_m) {
    std::mt19937_64 rng(o.seed);
    psi = random_cnf3(*o.random_n, *o.random_m, rng);
  } else {
    throw CLI::ValidationError("need --cnf or --random-n and --random-m");
  }
  json j{{"kind", o.kind}, {"n", psi.n}, {"m", psi.m()}, {"cnf", to_dimacs(psi)}};
  Database db;
  Query q;
  if (o.kind == "triangle") {
    auto inst = gen_triangle_instance(psi);
    db = inst.db;
    q = triangle_query();
    j["k"] = inst.k;
  } else if (o.kind == "rats") {
    auto inst = gen_rats_instance(psi, o.t);
    db = inst.db;
    q = rats_query();
    j["k"] = inst.k;
    j["t"] = inst.t;
    j["faithful"] = inst.faithful;
    j["tuple"] = db.render(inst.s0);
  } else {
    throw CLI::ValidationError("--kind must be triangle or rats");
  }
  j["query"] = to_string(q);
  j["tuples"] = db.size();
  if (!o.out_dir.empty()) {
    save_database(db, o.out_dir);
    std::ofstream(std::filesystem::path(o.out_dir) / "query.q") << to_string(q) << "\n";
    j["out"] = o.out_dir;
  }
  return j;
}

json run_witnesses(const Options& o) {
  std::vector<std::string> warnings;
  auto p = load(o, warnings);
  auto ws = enumerate_witnesses(p.query, p.db);
  auto vars = p.query.variables();
  json list = json::array();
  for (const auto& w : ws) {
    json a = json::object();
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = p.db.render(w.assignment[i]);
    json ts = json::array();
    for (const auto& t : witness_tuples(p.query, w)) ts.push_back(p.db.render(t));
    list.push_back({{"assignment", a}, {"tuples", ts}});
  }
  return {{"count", ws.size()}, {"query", to_string(p.query)}, {"witnesses", list}};
}

void print_text(const json& j, int indent = 0) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string pad(indent, ' ');
    if (it->is_object() || (it->is_array() && !it->empty() && !(*it)[0].is_primitive())) {
      std::cout << pad << it.key() << ":\n";
      if (it->is_object())
        print_text(*it, indent + 2);
      else
        for (const auto& e : *it) {
          if (e.is_object())
            print_text(e, indent + 2);
          else
            std::cout << pad << "  " << e.dump() << "\n";
          std::cout << "\n";
        }
    } else if (it->is_string()) {
      std::cout << pad << it.key() << ": " << it->get<std::string>() << "\n";
    } else {
      std::cout << pad << it.key() << ": " << it->dump() << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resilience and responsibility for self-join-free conjunctive queries", "resk"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));

  auto query_opt = [&](CLI::App* s) { s->add_option("-q,--query", o.query_file, "query file")->required(); };
  auto db_opts = [&](CLI::App* s) {
    query_opt(s);
    s->add_option("-d,--db", o.db_dir, "directory of <relation>.csv files")->required();
    s->add_option("--output", o.output, "output tuple binding the head variables, e.g. 1,9");
  };
  auto problem_opt = [&](CLI::App* s) {
    s->add_option("--problem", o.problem, "resilience or responsibility")
        ->check(CLI::IsMember({"resilience", "responsibility", "res", "rsp"}));
  };

  auto* classify_cmd = app.add_subcommand("classify", "decide PTIME or NP-complete");
  query_opt(classify_cmd);
  problem_opt(classify_cmd);

  auto* res_cmd = app.add_subcommand("resilience", "minimum deletions falsifying the query");
  db_opts(res_cmd);
  res_cmd->add_flag("--exact", o.exact, "force the exact solver");

  auto* rsp_cmd = app.add_subcommand("responsibility", "responsibility of a tuple or wildcard tuple");
  db_opts(rsp_cmd);
  rsp_cmd->add_option("--tuple", o.tuple, "e.g. S(3,5,7) or S(*,5,7)")->required();
  rsp_cmd->add_flag("--exact", o.exact, "force the exact solver");

  auto* max_cmd = app.add_subcommand("max-resp-set", "tuples of maximum responsibility");
  db_opts(max_cmd);

  auto* closure_cmd = app.add_subcommand("closure", "closure under functional dependencies");
  query_opt(closure_cmd);

  auto* lin_cmd = app.add_subcommand("linearize", "linear order of the normalized query");
  query_opt(lin_cmd);
  problem_opt(lin_cmd);

  auto* gen_cmd = app.add_subcommand("gen-gadget", "hardness gadget database from a 3CNF formula");
  gen_cmd->add_option("--kind", o.kind, "triangle or rats")->check(CLI::IsMember({"triangle", "rats"}));
  gen_cmd->add_option("--cnf", o.cnf_file, "DIMACS file");
  gen_cmd->add_option("--random-n", o.random_n, "random formula: variables");
  gen_cmd->add_option("--random-m", o.random_m, "random formula: clauses");
  gen_cmd->add_option("--seed", o.seed, "seed for --random-n/--random-m");
  gen_cmd->add_option("--t", o.t, "rats matching size (default 8m)");
  gen_cmd->add_option("--out", o.out_dir, "write CSV files and query.q here");

  auto* wit_cmd = app.add_subcommand("witnesses", "enumerate witnesses");
  db_opts(wit_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  json out;
  int code = 0;
  try {
    if (*classify_cmd) out = run_classify(o);
    if (*res_cmd) out = run_resilience(o);
    if (*rsp_cmd) out = run_responsibility(o);
    if (*max_cmd) out = run_max_resp_set(o);
    if (*closure_cmd) out = run_closure(o);
    if (*lin_cmd) out = run_linearize(o);
    if (*gen_cmd) out = run_gen_gadget(o);
    if (*wit_cmd) out = run_witnesses(o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Failure& f) {
    out = {{"error", f.code}, {"message", f.message}};
    code = 1;
  } catch (const LimitExceeded& e) {
    out = {{"error", "limit_exceeded"}, {"message", e.what()}};
    code = 1;
  } catch (const ParseError& e) {
    out = {{"error", "parse_error"}, {"message", e.what()}};
    code = 1;
  } catch (const Error& e) {
    out = {{"error", "domain_error"}, {"message", e.what()}};
    code = 1;
  }
  if (o.format == "json")
    std::cout << out.dump(2) << "\n";
  else
    print_text(out);
  return code;
}

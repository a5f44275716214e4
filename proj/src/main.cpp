// Command-line front end: build gallery structures, run property checks on
// table files, and emit JSON reports.
//
// Exit codes: 0 = all requested checks pass/true, 1 = a check is false
// (the witness is in the JSON), 2 = usage, I/O or precondition error.
// Diagnostics go to standard error; standard output carries only the JSON
// report (or, for `build`, the table/module text).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdq/gallery.hpp"
#include "sdq/loops.hpp"
#include "sdq/magma.hpp"
#include "sdq/modules.hpp"
#include "sdq/subalgebra.hpp"
#include "sdq/ternary.hpp"

namespace {

using nlohmann::json;
using namespace sdq;

struct CheckRow {
  std::string name;
  std::string status;
  std::string witness;
};

struct Report {
  std::string artifact;
  std::vector<CheckRow> checks;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  void add(std::string name, bool ok, std::string witness,
           const char* yes = "true", const char* no = "false") {
    checks.push_back({std::move(name), ok ? yes : no, std::move(witness)});
  }
  bool all_ok() const {
    for (const CheckRow& c : checks)
      if (c.status != "true" && c.status != "pass") return false;
    return true;
  }
  void print() const {
    json out;
    out["artifact"] = artifact;
    out["checks"] = json::array();
    for (const CheckRow& c : checks)
      out["checks"].push_back(
          {{"name", c.name}, {"status", c.status}, {"witness", c.witness}});
    out["elapsed_ms"] = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::cout << out.dump(2) << "\n";
  }
};

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string read_source(const std::string& arg) {
  if (arg == "-") return read_stream(std::cin);
  std::ifstream f(arg);
  if (!f) throw std::runtime_error("cannot open file '" + arg + "'");
  return read_stream(f);
}

// Builtin table names resolve before file paths; a file with the same name
// needs a "./" prefix.
std::optional<Magma> builtin_table(const std::string& name) {
  if (name == "d1") return build_d1();
  if (name == "d1-pointed") return build_d1_pointed();
  if (name == "d2") return build_d2();
  if (name == "c-star") return build_loop(1);
  if (name == "c-box") return build_loop(2);
  if (name == "c-nabla1") return build_nabla(1);
  if (name == "c-nabla2") return build_nabla(2);
  if (name == "example-810vi") return build_example_810vi();
  return std::nullopt;
}

Magma load_table(const std::string& arg) {
  if (std::optional<Magma> b = builtin_table(arg)) return *std::move(b);
  return Magma::load(read_source(arg));
}

std::string subset_line(const SubSet& s) {
  std::ostringstream w;
  w << "#";
  const std::vector<elem>& e = s.elements();
  for (size_t i = 0; i < e.size(); ++i) w << (i ? "," : "") << e[i];
  return w.str();
}

std::string assignment_line(const Magma& m, const IdentityResult& r) {
  std::ostringstream w;
  for (size_t i = 0; i < r.assignment.size(); ++i)
    w << (i ? ", " : "") << m.label(r.assignment[i]);
  w << " -> " << m.label(r.lhs_value) << " != " << m.label(r.rhs_value);
  return w.str();
}

std::vector<elem> parse_indices(const std::string& text, elem n) {
  std::vector<elem> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size() || v < 0 || v >= long(n))
      throw std::runtime_error("bad element index '" + tok + "'");
    out.push_back(elem(v));
  }
  if (out.empty()) throw std::runtime_error("no generator indices given");
  return out;
}

int run_check(const std::string& target, const std::string& props,
              int threads) {
  Magma m = load_table(target);
  Report rep;
  rep.artifact = target;
  std::stringstream ss(props);
  std::string prop;
  auto identity_check = [&](const std::string& name, const Identity& id) {
    IdentityResult r = check_identity(m, id, threads);
    rep.add(name, r.holds, r.holds ? "" : assignment_line(m, r));
  };
  while (std::getline(ss, prop, ',')) {
    if (prop.empty()) continue;
    if (prop == "quasigroup") {
      LatinCheck lc = is_latin(m);
      rep.add("quasigroup", lc.ok, lc.ok ? "" : lc.describe());
    } else if (prop == "idempotent") {
      identity_check(prop, identities::idempotent());
    } else if (prop == "commutative") {
      identity_check(prop, identities::commutative());
    } else if (prop == "key-symmetric") {
      identity_check(prop, identities::key_symmetric());
    } else if (prop == "left-distributive") {
      identity_check(prop, identities::left_distributive());
    } else if (prop == "right-distributive") {
      identity_check(prop, identities::right_distributive());
    } else if (prop == "distributive") {
      identity_check("left-distributive", identities::left_distributive());
      identity_check("right-distributive", identities::right_distributive());
    } else if (prop == "medial") {
      identity_check(prop, identities::medial());
    } else if (prop == "ch") {
      identity_check(prop, identities::ch_law());
    } else if (prop == "associative") {
      identity_check(prop, identities::associative());
    } else {
      throw std::runtime_error("unknown property '" + prop + "'");
    }
  }
  rep.print();
  return rep.all_ok() ? 0 : 1;
}

int run_normal(const std::string& target, const std::string& gens) {
  Magma m = load_table(target);
  Report rep;
  rep.artifact = target;
  SubSet p = closure(m, parse_indices(gens, m.size()));
  rep.add("subquasigroup", true, subset_line(p));
  NormalityResult nr = is_normal(m, p);
  rep.add("normal", nr.normal,
          nr.normal ? "the congruence block equals the subquasigroup"
                    : "congruence block " + subset_line(nr.block) +
                          " properly contains the subquasigroup");
  rep.print();
  return rep.all_ok() ? 0 : 1;
}

int run_hamiltonian(const std::string& target, elem base, size_t budget) {
  Magma m = load_table(target);
  if (base < 0 || base >= m.size())
    throw std::runtime_error("--base out of range");
  Report rep;
  rep.artifact = target;
  HamiltonianResult h =
      is_hamiltonian(m, HamiltonianStrategy::automatic, base, budget);
  std::ostringstream w;
  w << "strategy="
    << (h.used == HamiltonianStrategy::two_generated ? "two-generated"
                                                     : "exhaustive")
    << "; subquasigroups checked=" << h.subquasigroups_checked;
  if (!h.hamiltonian && h.offender)
    w << "; non-normal subquasigroup " << subset_line(*h.offender);
  rep.add("hamiltonian", h.hamiltonian, w.str());
  rep.print();
  return rep.all_ok() ? 0 : 1;
}

int run_subs(const std::string& target, size_t budget) {
  Magma m = load_table(target);
  Report rep;
  rep.artifact = target;
  SubFamily fam = all_subquasigroups(m, budget);
  rep.add("complete", fam.complete,
          "subquasigroups found=" + std::to_string(fam.subs.size()));
  for (size_t i = 0; i < fam.subs.size(); ++i)
    rep.add("sub[" + std::to_string(i) + "]", true,
            subset_line(fam.subs[i]));
  rep.print();
  return rep.all_ok() ? 0 : 1;
}

std::string map_line(const std::vector<elem>& f) {
  std::ostringstream w;
  for (size_t i = 0; i < f.size(); ++i) w << (i ? "," : "") << f[i];
  return w.str();
}

int run_iso(const std::string& a_arg, const std::string& b_arg, bool anti,
            uint64_t budget, int threads) {
  Report rep;
  rep.artifact = a_arg + "|" + b_arg;
  // Two module files, or two quasigroup tables. Module text starts with
  // "p k0 k1 ..."; table text starts with the order. We decide by trying
  // the module parser first for plain files, builtins are always tables.
  std::optional<FiniteModule> am, bm;
  if (!builtin_table(a_arg) && !builtin_table(b_arg)) {
    try {
      am = FiniteModule::load(read_source(a_arg));
      bm = FiniteModule::load(read_source(b_arg));
    } catch (const MagmaError&) {
      am.reset();
      bm.reset();
    }
  }
  if (am && bm) {
    if (anti)
      throw std::runtime_error(
          "--anti applies to quasigroup tables, not module files");
    ModuleIso r = module_iso(*am, *bm, budget);
    std::ostringstream w;
    w << "nodes=" << r.nodes << "; complete=" << (r.complete ? "yes" : "no");
    if (r.map) w << "; map=" << map_line(*r.map);
    rep.add("module-isomorphism", r.map.has_value(), w.str());
    rep.print();
    return rep.all_ok() ? 0 : 1;
  }
  // Table route: compare the distributive quasigroups through their
  // quasimodules at base point 0 (any base point gives the same verdict).
  Magma a = load_table(a_arg), b = load_table(b_arg);
  Quasimodule qa = quasimodule_of_distributive(a, 0);
  Quasimodule qb = quasimodule_of_distributive(b, 0);
  QmHomResult r = quasimodule_hom_search(
      qa, qb, anti ? QmHomMode::anti : QmHomMode::iso, true, budget);
  (void)threads;
  std::ostringstream w;
  w << "nodes=" << r.nodes << "; complete=" << (r.complete ? "yes" : "no");
  if (r.map) w << "; map=" << map_line(*r.map);
  rep.add(anti ? "anti-isomorphism" : "isomorphism", r.map.has_value(),
          w.str());
  rep.print();
  return rep.all_ok() ? 0 : 1;
}

int run_socle(const std::string& file, const std::string& ideal_csv) {
  FiniteModule m = FiniteModule::load(read_source(file));
  Report rep;
  rep.artifact = file;
  std::vector<std::string> ideal;
  if (!ideal_csv.empty()) {
    std::stringstream ss(ideal_csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) ideal.push_back(tok);
  }
  std::vector<SubSet> chain =
      ideal.empty() ? socle_series(m) : socle_series(m, ideal);
  for (size_t k = 0; k < chain.size(); ++k)
    rep.add("S_" + std::to_string(k + 1), true,
            "size=" + std::to_string(chain[k].size()) + "; " +
                subset_line(chain[k]));
  if (ideal.empty()) {
    SubSet j = jacobson_radical(m);
    rep.add("radical", true,
            "size=" + std::to_string(j.size()) + "; " + subset_line(j));
  }
  rep.print();
  return 0;
}

int run_verify_paper(const std::string& suite, int threads) {
  GalleryReport g = verify_paper(suite, threads);
  Report rep;
  rep.artifact = "verify-paper";
  for (const GalleryRow& r : g.rows)
    rep.checks.push_back({r.claim, r.status, r.witness});
  rep.print();
  return g.all_pass() ? 0 : 1;
}

int run_build(const std::string& name, const std::string& out_file,
              int64_t p, int m, bool shifted) {
  std::string text;
  if (name == "pm") {
    if (p <= 0 || m <= 0)
      throw std::runtime_error("build pm requires --p and --m");
    text = make_pm(p, m, shifted).save();
  } else if (std::optional<Magma> b = builtin_table(name)) {
    text = b->save();
  } else {
    throw std::runtime_error("unknown build name '" + name + "'");
  }
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_file);
    if (!f) throw std::runtime_error("cannot write '" + out_file + "'");
    f << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Finite self-distributive quasigroups, commutative Moufang loops and "
      "quasimodules: builders and verifiers"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "cap on internal parallelism")
      ->capture_default_str();

  auto* b = app.add_subcommand("build", "emit a builtin table or module");
  std::string b_name, b_out;
  int64_t b_p = 0;
  int b_m = 0;
  bool b_shifted = false;
  b->add_option("name", b_name,
                "d1 | d1-pointed | d2 | c-star | c-box | c-nabla1 | "
                "c-nabla2 | pm | example-810vi")
      ->required();
  b->add_option("-o,--output", b_out, "output file (default stdout)");
  b->add_option("--p", b_p, "prime (pm only)");
  b->add_option("--m", b_m, "length (pm only)");
  b->add_flag("--shifted", b_shifted, "shifted x action (pm only)");

  auto* c = app.add_subcommand("check", "check properties of a table");
  std::string c_target, c_props;
  c->add_option("table", c_target, "builtin name, file, or - for stdin")
      ->required();
  c->add_option("--props", c_props,
                "comma list: quasigroup, idempotent, commutative, "
                "key-symmetric, left-distributive, right-distributive, "
                "distributive, medial, ch, associative")
      ->required();

  auto* n = app.add_subcommand("normal",
                               "normality of the subquasigroup generated by "
                               "--gens");
  std::string n_target, n_gens;
  n->add_option("table", n_target, "builtin name, file, or -")->required();
  n->add_option("--gens", n_gens, "comma list of element indices")
      ->required();

  auto* h = app.add_subcommand("hamiltonian",
                               "is every subquasigroup normal?");
  std::string h_target;
  elem h_base = 0;
  size_t h_budget = 100000;
  h->add_option("table", h_target, "builtin name, file, or -")->required();
  h->add_option("--base", h_base, "base point for the two-generated sweep")
      ->capture_default_str();
  h->add_option("--budget", h_budget, "subalgebra budget")
      ->capture_default_str();

  auto* s = app.add_subcommand("subs", "enumerate all subquasigroups");
  std::string s_target;
  size_t s_budget = 100000;
  s->add_option("table", s_target, "builtin name, file, or -")->required();
  s->add_option("--budget", s_budget, "subalgebra budget")
      ->capture_default_str();

  auto* i = app.add_subcommand(
      "iso",
      "isomorphism search: two module files, or two distributive quasigroup "
      "tables (compared through their quasimodules at base point 0)");
  std::string i_a, i_b;
  bool i_anti = false;
  uint64_t i_budget = 5000000;
  i->add_option("a", i_a, "module file / table / builtin")->required();
  i->add_option("b", i_b, "module file / table / builtin")->required();
  i->add_flag("--anti", i_anti, "search for an anti-isomorphism (tables)");
  i->add_option("--budget", i_budget, "node budget")->capture_default_str();

  auto* so = app.add_subcommand("socle", "socle series and radical of a "
                                         "module file");
  std::string so_file, so_ideal;
  so->add_option("module", so_file, "module file or -")->required();
  so->add_option("--ideal", so_ideal,
                 "comma list of action names (default: the declared ideal; "
                 "the name p means multiplication by p)");

  auto* v = app.add_subcommand("verify-paper", "run the claim suite");
  std::string v_suite = "all";
  v->add_option("--suite", v_suite, "section3 | section11 | section12 | all")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*b) return run_build(b_name, b_out, b_p, b_m, b_shifted);
    if (*c) return run_check(c_target, c_props, threads);
    if (*n) return run_normal(n_target, n_gens);
    if (*h) return run_hamiltonian(h_target, h_base, h_budget);
    if (*s) return run_subs(s_target, s_budget);
    if (*i) return run_iso(i_a, i_b, i_anti, i_budget, threads);
    if (*so) return run_socle(so_file, so_ideal);
    if (*v) return run_verify_paper(v_suite, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coup/coup.hpp"

using namespace coup;
using namespace coup::syntax;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2 };

struct Budgets {
  std::size_t trace = 32;
  std::size_t depth = 256;
  std::size_t unfold = kDefaultUnfoldBudget;
};

// COUP_DEFAULT_BUDGETS="trace=32,depth=256,unfold=64"; any subset of keys.
Budgets env_budgets() {
  Budgets b;
  const char* env = std::getenv("COUP_DEFAULT_BUDGETS");
  if (!env) return b;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("COUP_DEFAULT_BUDGETS", "expected key=value, got '" + item + "'");
    std::string key = item.substr(0, eq);
    std::size_t value = 0;
    try {
      value = std::stoul(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("COUP_DEFAULT_BUDGETS", "bad number in '" + item + "'");
    }
    if (key == "trace") b.trace = value;
    else if (key == "depth") b.depth = value;
    else if (key == "unfold") b.unfold = value;
    else throw CLI::ValidationError("COUP_DEFAULT_BUDGETS", "unknown key '" + key + "'");
  }
  return b;
}

struct Options {
  std::string theory, text, cert;
  std::string fragment;
  bool allow_fix = false;
  bool json = false;
  bool autoclose = false;
  std::optional<std::size_t> depth, trace_limit, unfold_budget;
  std::string trace_out, cert_out;
};

struct Loaded {
  TheoryDocument doc;
  Program program;
  Logic logic;
};

Loaded load(const Options& o) {
  Loaded l;
  l.doc = parse_theory(read_file(o.theory), ParseOptions{o.autoclose});
  l.program = l.doc.program();
  l.logic = l.doc.logic;
  if (!o.fragment.empty()) {
    auto f = parse_fragment(o.fragment);
    if (!f) throw CLI::ValidationError("--fragment", "unknown fragment '" + o.fragment + "'");
    l.logic.fragment = *f;
  }
  if (o.allow_fix) l.logic.allow_fix = true;
  return l;
}

SearchConfig search_config(const Options& o) {
  Budgets b = env_budgets();
  SearchConfig cfg;
  cfg.trace_limit = o.trace_limit.value_or(b.trace);
  cfg.depth_limit = o.depth.value_or(b.depth);
  cfg.unfold_budget = o.unfold_budget.value_or(b.unfold);
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string show(const Term& t, const Program& p) { return print_term(t, {&p.sig, &p.definitions}); }
std::string show(const Formula& f, const Program& p) { return print_formula(f, {&p.sig, &p.definitions}); }

std::string format_trace(const DerivationTrace& tr, const Program& p) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const auto& s = tr.steps[i];
    out << "step " << i << ": select " << show(s.selected, p);
    if (s.clause) {
      out << "  clause " << *s.clause << "  head " << show(s.head, p) << "  {";
      bool first = true;
      for (const auto& [v, t] : s.subst) {
        out << (first ? "" : ", ") << v << " := " << show(t, p);
        first = false;
      }
      out << "}";
    }
    out << "\n  goals:";
    for (const auto& g : s.goals) out << " " << show(g, p) << ";";
    out << "\n";
  }
  out << "verdict: " << verdict_name(tr.verdict);
  if (tr.verdict == TraceVerdict::LoopFound)
    out << " (step " << tr.loop_to << " meets step " << tr.loop_from << " on " << show(tr.loop_atom, p) << ")";
  out << "\n";
  return out.str();
}

json trace_json(const DerivationTrace& tr, const Program& p) {
  json steps = json::array();
  for (const auto& s : tr.steps) {
    json j{{"selected", show(s.selected, p)}};
    if (s.clause) {
      j["clause"] = *s.clause;
      j["head"] = show(s.head, p);
      json sub = json::object();
      for (const auto& [v, t] : s.subst) sub[v] = show(t, p);
      j["subst"] = sub;
    }
    json goals = json::array();
    for (const auto& g : s.goals) goals.push_back(show(g, p));
    j["goals"] = goals;
    steps.push_back(j);
  }
  json out{{"verdict", verdict_name(tr.verdict)}, {"steps", steps}};
  if (tr.verdict == TraceVerdict::LoopFound) {
    out["loop"] = {{"from", tr.loop_from}, {"to", tr.loop_to}, {"atom", show(tr.loop_atom, p)}};
  }
  return out;
}

int cmd_classify(const Options& o) {
  Loaded l = load(o);
  Formula f = parse_goal(o.text, l.program.sig, l.program.definitions);
  json frags = json::object();
  std::ostringstream text;
  text << show(f, l.program) << "\n";
  for (Fragment fr : kAllFragments) {
    Logic lg{fr, l.logic.allow_fix};
    bool clause = is_program_clause(lg, l.program.sig, f), goal = is_goal(lg, l.program.sig, f),
         core = is_core(lg, l.program.sig, f);
    frags[fragment_name(fr)] = {{"clause", clause}, {"goal", goal}, {"core", core}};
    text << "  " << lg.name() << ": clause=" << (clause ? "yes" : "no") << " goal=" << (goal ? "yes" : "no")
         << " core=" << (core ? "yes" : "no") << "\n";
  }
  auto minimal = minimal_core_fragment(l.program.sig, f, l.logic.allow_fix);
  text << "minimal core fragment: " << (minimal ? fragment_name(*minimal) : std::string("none")) << "\n";
  if (o.json) {
    std::cout << json{{"formula", show(f, l.program)},
                      {"fragments", frags},
                      {"minimal_core", minimal ? json(fragment_name(*minimal)) : json(nullptr)}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << text.str();
  }
  return kOk;
}

int cmd_trace(const Options& o) {
  Loaded l = load(o);
  Formula g = parse_goal(o.text, l.program.sig, l.program.definitions);
  SearchConfig cfg = search_config(o);
  DerivationTrace tr = sld_trace(l.program, g, cfg.trace_limit, cfg.unfold_budget);
  if (!o.trace_out.empty()) write_file(o.trace_out, format_trace(tr, l.program));
  if (o.json) std::cout << trace_json(tr, l.program).dump(2) << "\n";
  else std::cout << format_trace(tr, l.program);
  return tr.verdict == TraceVerdict::FiniteFailure ? kNegative : kOk;
}

int cmd_model(const Options& o) {
  Loaded l = load(o);
  OracleConfig oc;
  Budgets b = env_budgets();
  oc.unfold_budget = o.unfold_budget.value_or(b.unfold);
  auto atoms = enumerate_model(l.program, o.depth.value_or(3), oc);
  if (o.json) {
    json arr = json::array();
    for (const auto& a : atoms) arr.push_back(show(a, l.program));
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& a : atoms) std::cout << show(a, l.program) << "\n";
  }
  return kOk;
}

int cmd_member(const Options& o) {
  Loaded l = load(o);
  Formula a = parse_goal(o.text, l.program.sig, l.program.definitions);
  if (!a.is(FormulaKind::Atom)) throw CLI::ValidationError("ATOM", "expected a ground atom");
  OracleConfig oc;
  Budgets b = env_budgets();
  oc.unfold_budget = o.unfold_budget.value_or(b.unfold);
  if (o.depth) oc.depth_budget = *o.depth;
  MembershipVerdict v = gfp_member(l.program, a, oc);
  if (o.json) std::cout << json{{"atom", show(a, l.program)}, {"verdict", verdict_name(v)}}.dump(2) << "\n";
  else std::cout << verdict_name(v) << "\n";
  return v.is_in() ? kOk : kNegative;
}

std::string cert_stem(const Options& o) {
  std::string stem = o.cert_out;
  if (stem.empty()) stem = std::filesystem::path(o.theory).stem().string();
  if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".cert") stem.resize(stem.size() - 5);
  return stem;
}

int cmd_prove(const Options& o) {
  Loaded l = load(o);
  Formula g = parse_goal(o.text, l.program.sig, l.program.definitions);
  SearchConfig cfg = search_config(o);
  ProveLog log;
  auto r = prove(l.logic, l.program, g, cfg, &log);

  if (!o.trace_out.empty()) {
    std::ostringstream t;
    for (const auto& tr : log.traces) t << format_trace(tr, l.program) << "\n";
    for (const auto& a : log.attempts)
      t << "candidate " << show(a.candidate.formula, l.program) << " [" << provenance_name(a.candidate.provenance)
        << "]: " << (a.invariant_proved ? (a.corollary_proved ? "proved, corollary proved" : "proved") : "not proved")
        << "\n";
    write_file(o.trace_out, t.str());
  }

  if (!r) {
    if (o.json) std::cout << json{{"found", false}, {"logic", l.logic.name()}}.dump(2) << "\n";
    else std::cout << "no invariant found in " << l.logic.name() << "\n";
    return kNegative;
  }

  std::string stem = cert_stem(o);
  std::vector<std::string> paths;
  paths.push_back(stem + ".invariant.cert");
  write_file(paths.back(), print_certificate(Certificate{{}, r->invariant_proof}, l.program));
  if (r->corollary_proof) {
    paths.push_back(stem + ".corollary.cert");
    Program base = l.program;
    base.logic = l.logic;
    write_file(paths.back(), print_certificate(Certificate{{r->invariant_proof}, *r->corollary_proof}, base));
  }

  const auto& inv = r->invariant;
  std::string frag = fragment_name(inv.fragment) + (inv.uses_fix ? "+fix" : "");
  if (o.json) {
    std::cout << json{{"found", true},
                      {"logic", l.logic.name()},
                      {"invariant", show(inv.formula, l.program)},
                      {"provenance", provenance_name(inv.provenance)},
                      {"fragment", frag},
                      {"certificates", paths},
                      {"nodes_expanded", r->stats.nodes_expanded},
                      {"elapsed_ms", r->stats.elapsed_ms}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "invariant: " << show(inv.formula, l.program) << "\n"
              << "provenance: " << provenance_name(inv.provenance) << "\n"
              << "fragment: " << frag << "\n";
    for (const auto& pth : paths) std::cout << "certificate: " << pth << "\n";
  }
  return kOk;
}

int cmd_check(const Options& o) {
  Loaded l = load(o);
  Program base = l.program;
  base.logic = l.logic;
  Certificate c = parse_certificate(read_file(o.cert), base);
  CheckOptions co;
  co.unfold_budget = o.unfold_budget.value_or(env_budgets().unfold);
  CheckReport rep = check_certificate(base, c, co);
  std::string where;
  if (rep.first_error) {
    where = "/";
    for (std::size_t i : rep.first_error->path) where += std::to_string(i) + "/";
  }
  if (o.json) {
    json j{{"accepted", rep.accepted}, {"nodes", rep.nodes}};
    if (rep.first_error)
      j["error"] = {{"code", error_name(rep.first_error->code)}, {"path", where}, {"detail", rep.first_error->detail}};
    std::cout << j.dump(2) << "\n";
  } else if (rep.accepted) {
    std::cout << "accepted\n";
  } else {
    std::cout << "rejected: " << error_name(rep.first_error->code) << " at " << where << ": "
              << rep.first_error->detail << "\n";
  }
  return rep.accepted ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coup: coinductive uniform proofs for Horn clause theories"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--fragment", o.fragment, "co-fohc, co-fohh, co-hohc or co-hohh (default: the theory's)");
    sub->add_flag("--allow-fix", o.allow_fix, "admit fixpoint terms");
    sub->add_flag("--json", o.json, "machine-readable output");
    sub->add_flag("--autoclose", o.autoclose, "universally close capitalized free names in clauses");
    sub->add_option("--unfold-budget", o.unfold_budget, "fixpoint unfoldings per fixpoint term");
  };
  auto search = [&](CLI::App* sub) {
    sub->add_option("--depth", o.depth, "rule applications per proof attempt");
    sub->add_option("--trace-limit", o.trace_limit, "resolution steps per trace");
    sub->add_option("--trace-out", o.trace_out, "write a readable trace log here");
  };

  auto* classify = app.add_subcommand("classify", "fragment membership of a closed formula");
  classify->add_option("theory", o.theory)->required();
  classify->add_option("formula", o.text)->required();
  common(classify);

  auto* trace = app.add_subcommand("trace", "leftmost SLD trace with loop detection");
  trace->add_option("theory", o.theory)->required();
  trace->add_option("goal", o.text)->required();
  common(trace);
  search(trace);

  auto* model = app.add_subcommand("model", "ground atoms of the greatest Herbrand model up to a term depth");
  model->add_option("theory", o.theory)->required();
  model->add_option("--depth", o.depth, "term depth (default 3)");
  common(model);

  auto* member = app.add_subcommand("member", "gfp membership of a ground atom: In, Out or Unknown");
  member->add_option("theory", o.theory)->required();
  member->add_option("atom", o.text)->required();
  member->add_option("--depth", o.depth, "resolution depth budget");
  common(member);

  auto* provec = app.add_subcommand("prove", "find a coinductive invariant and prove the goal from it");
  provec->add_option("theory", o.theory)->required();
  provec->add_option("goal", o.text)->required();
  provec->add_option("--cert-out", o.cert_out, "certificate path stem (default: the theory's name)");
  common(provec);
  search(provec);

  auto* check = app.add_subcommand("check", "check a certificate against a theory");
  check->add_option("theory", o.theory)->required();
  check->add_option("certificate", o.cert)->required();
  common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify) return cmd_classify(o);
    if (*trace) return cmd_trace(o);
    if (*model) return cmd_model(o);
    if (*member) return cmd_member(o);
    if (*provec) return cmd_prove(o);
    if (*check) return cmd_check(o);
  } catch (const SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

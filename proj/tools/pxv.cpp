// Command-line front end: explore litmus programs, enumerate post-crash
// memories, check crash invariants, validate proof outlines, and run the
// proof-rule falsification suite.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pxv/explore.hpp"
#include "pxv/outline.hpp"
#include "pxv/parser.hpp"
#include "pxv/rules.hpp"
#include "pxv/step.hpp"
#include "pxv/views.hpp"

using nlohmann::json;
using namespace pxv;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonArgs {
  std::string file;
  std::uint32_t max_steps = 10000;
  bool strict_cas = false;
  std::string format = "text";
};

ExploreOptions explore_opts(const CommonArgs& a) {
  ExploreOptions o;
  o.max_steps = a.max_steps;
  o.step.strict_cas_read = a.strict_cas;
  return o;
}

json valuation_json(const RegValuation& v, const Declarations& d) {
  json j = json::object();
  for (const auto& [r, val] : v) j[d.registers.at(r).name] = val;
  return j;
}

json nvm_json(const NvmMap& nvm, const Declarations& d) {
  json j = json::object();
  for (LocId l = 0; l < nvm.size(); ++l) j[d.location_name(l)] = nvm[l];
  return j;
}

json state_json(const MachineState& s, const Declarations& d,
                const std::vector<std::string>* labels = nullptr) {
  json j;
  j["dump"] = dump(s, d, labels);
  json mem = json::array();
  for (const auto& m : s.mem) mem.push_back({{"loc", d.location_name(m.loc)}, {"val", m.val}});
  j["memory"] = mem;
  json pcs = json::object();
  for (ThreadId t = 0; t < s.pc.size(); ++t)
    pcs[std::to_string(d.thread_name(t))] = s.pc[t];
  j["pc"] = pcs;
  return j;
}

std::vector<RegId> all_registers(const Declarations& d) {
  std::vector<RegId> regs(d.registers.size());
  for (RegId r = 0; r < regs.size(); ++r) regs[r] = r;
  return regs;
}

int cmd_run(const CommonArgs& a) {
  const LitmusFile f = parse_litmus(read_file(a.file));
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), explore_opts(a));
  const auto regs = all_registers(f.init.decls);
  const auto outs = outcomes(g, f.init.decls, regs);

  bool outcome_reachable = false;
  if (f.outcome)
    for (const MachineState& s : final_states(g))
      if (f.outcome->eval(s, f.init.decls)) outcome_reachable = true;

  if (a.format == "json") {
    json j;
    j["command"] = "run";
    j["states"] = g.states.size();
    j["truncated"] = g.truncated;
    j["outcomes"] = json::array();
    for (const auto& v : outs) j["outcomes"].push_back(valuation_json(v, f.init.decls));
    if (f.outcome) {
      j["outcome_query"] = f.outcome->to_string(f.init.decls);
      j["outcome_reachable"] = outcome_reachable;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "explored " << g.states.size() << " states"
              << (g.truncated ? " (truncated)" : "") << "\n";
    std::cout << "terminal register outcomes (" << outs.size() << "):\n";
    for (const auto& v : outs) {
      std::cout << "  ";
      for (std::size_t i = 0; i < v.size(); ++i)
        std::cout << (i ? " " : "") << f.init.decls.registers.at(v[i].first).name << "="
                  << v[i].second;
      std::cout << "\n";
    }
    if (f.outcome)
      std::cout << "outcome query '" << f.outcome->to_string(f.init.decls)
                << "' reachable: " << (outcome_reachable ? "yes" : "no") << "\n";
  }
  return kExitPass;
}

int cmd_crash(const CommonArgs& a) {
  const LitmusFile f = parse_litmus(read_file(a.file));
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), explore_opts(a));
  const auto nvms = crash_reachable_nvms(g);

  if (a.format == "json") {
    json j;
    j["command"] = "crash";
    j["states"] = g.states.size();
    j["truncated"] = g.truncated;
    j["nvms"] = json::array();
    for (const auto& nvm : nvms) j["nvms"].push_back(nvm_json(nvm, f.init.decls));
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "crash-reachable non-volatile memories (" << nvms.size() << "):\n";
    for (const auto& nvm : nvms) std::cout << "  " << nvm_to_string(nvm, f.init.decls) << "\n";
  }
  return kExitPass;
}

int cmd_check_invariant(const CommonArgs& a) {
  const LitmusFile f = parse_litmus(read_file(a.file));
  if (!f.invariant) {
    std::cerr << "error: the file has no crash-invariant section\n";
    return kExitUsage;
  }
  const ReachGraph g = explore(f.program, initial_state(f.init, f.program), explore_opts(a));
  const InvariantVerdict v = check_crash_invariant(g, *f.invariant, f.init.decls);

  if (a.format == "json") {
    json j;
    j["command"] = "check-invariant";
    j["invariant"] = f.invariant->to_string(f.init.decls);
    j["states"] = g.states.size();
    j["truncated"] = g.truncated;
    j["ok"] = v.ok;
    if (!v.ok) {
      j["counterexample"]["nvm"] = nvm_json(*v.nvm, f.init.decls);
      j["counterexample"]["state"] =
          state_json(g.states[*v.state_index], f.init.decls, &f.program.label_names);
      json trace = json::array();
      for (std::uint32_t si : g.trace_to(*v.state_index))
        trace.push_back(state_json(g.states[si], f.init.decls, &f.program.label_names));
      j["counterexample"]["trace"] = trace;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "crash invariant: " << f.invariant->to_string(f.init.decls) << "\n";
    if (v.ok) {
      std::cout << "PASS: holds at every reachable state (" << g.states.size() << " states"
                << (g.truncated ? ", truncated" : "") << ")\n";
    } else {
      const auto* labels = &f.program.label_names;
      std::cout << "FAIL: possible post-crash memory " << nvm_to_string(*v.nvm, f.init.decls)
                << " violates the invariant\nat state:\n"
                << dump(g.states[*v.state_index], f.init.decls, labels)
                << "trace from the initial state (" << g.trace_to(*v.state_index).size()
                << " states):\n";
      for (std::uint32_t si : g.trace_to(*v.state_index))
        std::cout << "--\n" << dump(g.states[si], f.init.decls, labels);
    }
  }
  return v.ok ? kExitPass : kExitFailure;
}

const char* verdict_str(ConditionResult::Verdict v) {
  switch (v) {
    case ConditionResult::Verdict::Pass: return "pass";
    case ConditionResult::Verdict::Fail: return "FAIL";
    case ConditionResult::Verdict::Bounded: return "pass (bounded)";
    case ConditionResult::Verdict::Skipped: return "skipped";
  }
  return "?";
}

int cmd_check_outline(const CommonArgs& a, const std::string& universe,
                      std::uint32_t trials, std::uint64_t seed) {
  const LitmusFile f = parse_litmus(read_file(a.file));
  if (!f.outline) {
    std::cerr << "error: the file has no outline block\n";
    return kExitUsage;
  }
  CheckOptions opts;
  opts.universe = universe == "generated" ? Universe::Kind::Generated
                                          : Universe::Kind::Reachable;
  opts.explore = explore_opts(a);
  opts.gen_states = trials;
  opts.gen.seed = seed;
  const ValidityReport rep = check_outline(f.program, *f.outline, f.init, opts);

  auto emit = [&](const char* name, const ConditionResult& r) {
    if (a.format != "json") {
      std::cout << "  " << name << ": " << verdict_str(r.verdict) << "\n";
      if (r.verdict == ConditionResult::Verdict::Fail && !r.detail.empty())
        std::cout << "    " << r.detail << "\n";
    }
  };

  if (a.format == "json") {
    json j;
    j["command"] = "check-outline";
    j["universe"] = universe;
    j["note"] = rep.note;
    auto cond = [&](const ConditionResult& r) {
      json c;
      c["verdict"] = verdict_str(r.verdict);
      if (!r.detail.empty()) c["detail"] = r.detail;
      return c;
    };
    j["initialisation"] = cond(rep.initialisation);
    j["finalisation"] = cond(rep.finalisation);
    j["local_correctness"] = cond(rep.local_correctness);
    j["stability"] = cond(rep.stability);
    j["persistence"] = cond(rep.persistence);
    j["persistence_witnesses"] = json::array();
    for (ThreadId t : rep.persistence_witnesses)
      j["persistence_witnesses"].push_back(f.init.decls.thread_name(t));
    j["annotation_coverage"] = cond(rep.annotation_coverage);
    j["final_conclusion"] = cond(rep.final_conclusion);
    j["crash_conclusion"] = cond(rep.crash_conclusion);
    j["pass"] = rep.pass();
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "outline validity (" << universe << " universe):\n";
    emit("initialisation", rep.initialisation);
    emit("finalisation", rep.finalisation);
    emit("local correctness", rep.local_correctness);
    emit("stability", rep.stability);
    emit("persistence", rep.persistence);
    if (!rep.persistence_witnesses.empty()) {
      std::cout << "  persistence witnesses: threads";
      for (ThreadId t : rep.persistence_witnesses)
        std::cout << " " << f.init.decls.thread_name(t);
      std::cout << "\n";
    }
    emit("annotation coverage", rep.annotation_coverage);
    emit("final-state conclusion", rep.final_conclusion);
    emit("crash conclusion", rep.crash_conclusion);
    std::cout << "note: " << rep.note << "\n";
    std::cout << (rep.pass() ? "PASS" : "FAIL") << "\n";
  }
  return rep.pass() ? kExitPass : kExitFailure;
}

int cmd_test_rules(std::uint32_t trials, std::uint64_t seed, bool mutants,
                   std::uint32_t extra_writes, Value max_value, const std::string& format) {
  const InitSpec spec = default_rule_spec();
  GenBounds b;
  b.seed = seed;
  b.max_extra_writes = extra_writes;
  b.max_value = max_value;

  const auto& rules = mutants ? mutant_catalogue() : catalogue();
  bool all_ok = true;
  json jrules = json::array();
  for (const RuleSpec& r : rules) {
    const RuleVerdict v = test_rule(r, spec, b, trials);
    const bool ok = mutants ? v.falsified.has_value() : !v.falsified.has_value();
    all_ok = all_ok && ok;
    if (format == "json") {
      json jr;
      jr["rule"] = v.name;
      jr["display"] = r.display;
      jr["instantiations"] = v.instantiations;
      jr["falsified"] = v.falsified.has_value();
      if (v.falsified) {
        jr["counterexample"]["instantiation"] = v.falsified->instantiation;
        jr["counterexample"]["state"] = state_json(v.falsified->state, spec.decls);
        jr["counterexample"]["post_state"] = state_json(v.falsified->post_state, spec.decls);
      }
      jr["ok"] = ok;
      jrules.push_back(jr);
    } else {
      std::cout << (ok ? "pass" : "FAIL") << "  " << v.name << "  (" << v.instantiations
                << " instantiations)";
      if (v.falsified) std::cout << "  falsified at " << v.falsified->instantiation;
      std::cout << "\n";
      if (!ok && v.falsified)
        std::cout << "  pre-state:\n" << dump(v.falsified->state, spec.decls);
    }
  }
  if (format == "json") {
    json j;
    j["command"] = "test-rules";
    j["mode"] = mutants ? "mutants" : "rules";
    j["trials"] = trials;
    j["rules"] = jrules;
    j["pass"] = all_ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (all_ok ? "PASS" : "FAIL") << " (" << rules.size() << " "
              << (mutants ? "mutants" : "rules") << ", " << trials << " states each)\n";
  }
  return all_ok ? kExitPass : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"checker for view-based persistent x86-TSO litmus tests and proof outlines"};
  app.require_subcommand(1);

  CommonArgs run_args, crash_args, inv_args, outline_args;
  std::string outline_universe = "reachable";
  std::uint32_t outline_trials = 500;
  std::uint64_t outline_seed = 0;
  std::uint32_t rules_trials = 1000;
  std::uint64_t rules_seed = 0;
  bool rules_mutants = false;
  std::uint32_t rules_extra = 6;
  Value rules_maxval = 3;
  std::string rules_format = "text";

  auto add_common = [](CLI::App* cmd, CommonArgs& a, bool with_file = true) {
    if (with_file) cmd->add_option("file", a.file, "litmus file")->required();
    cmd->add_option("--max-steps", a.max_steps, "bound on transitions per path");
    cmd->add_flag("--strict-cas-read", a.strict_cas,
                  "failing CAS reads only observable timestamps");
    cmd->add_option("--format", a.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
  };

  auto* run = app.add_subcommand("run", "explore and print terminal register outcomes");
  add_common(run, run_args);
  auto* crash = app.add_subcommand("crash", "print all crash-reachable memories");
  add_common(crash, crash_args);
  auto* inv = app.add_subcommand("check-invariant",
                                 "check the crash invariant at every reachable state");
  add_common(inv, inv_args);
  auto* outl = app.add_subcommand("check-outline", "check proof-outline validity");
  add_common(outl, outline_args);
  outl->add_option("--universe", outline_universe, "reachable|generated")
      ->check(CLI::IsMember({"reachable", "generated"}));
  outl->add_option("--trials", outline_trials, "generated states (generated universe)");
  outl->add_option("--seed", outline_seed, "generator seed");
  auto* rules = app.add_subcommand("test-rules", "falsification-test the rule catalogue");
  rules->add_option("--trials", rules_trials, "generated states per rule");
  rules->add_option("--seed", rules_seed, "generator seed");
  rules->add_flag("--mutants", rules_mutants, "test the broken variants instead");
  rules->add_option("--max-extra-writes", rules_extra, "extra random writes per state");
  rules->add_option("--max-value", rules_maxval, "largest generated/instantiated value");
  rules->add_option("--format", rules_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (crash->parsed()) return cmd_crash(crash_args);
    if (inv->parsed()) return cmd_check_invariant(inv_args);
    if (outl->parsed())
      return cmd_check_outline(outline_args, outline_universe, outline_trials, outline_seed);
    if (rules->parsed())
      return cmd_test_rules(rules_trials, rules_seed, rules_mutants, rules_extra,
                            rules_maxval, rules_format);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

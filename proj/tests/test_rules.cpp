#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "pxv/rules.hpp"

using namespace pxv;

namespace {

const RuleSpec& rule_named(const std::string& name) {
  for (const RuleSpec& r : catalogue())
    if (r.name == name) return r;
  throw std::runtime_error("no such rule: " + name);
}

}  // namespace

TEST_CASE("the catalogue covers every table row exactly once") {
  const auto& rules = catalogue();
  CHECK(rules.size() == 59);
  std::set<std::string> names;
  for (const RuleSpec& r : rules) names.insert(r.name);
  CHECK(names.size() == rules.size());
  for (const char* expected :
       {"LP1", "LP2", "LP3", "SP1", "SP2", "SP3", "SP4", "SP5", "SP6", "SP7",
        "FP1", "FP2", "FP3", "OP", "SFP", "LS1", "LS2", "LS3", "LS4", "LS5",
        "LS6", "LS7", "WS1", "WS2", "WS3", "WS4", "WS5", "WS6", "WS7", "WS8",
        "WS9", "FS1", "FS2", "FS3", "FS4", "FS5", "FS6", "SFS1", "SFS2", "OS1",
        "OS2", "OS3", "CP1", "CP2", "CP3", "CP4", "CP5", "SP8", "SP9", "CS1",
        "CS2", "CS3", "CS4", "MFP1", "MFP2", "MFS1", "MFS2", "MFS3", "MFS4"})
    CHECK(names.contains(expected));
}

TEST_CASE("single rules hold on quick runs") {
  const InitSpec spec = default_rule_spec();
  GenBounds b;
  for (const char* name : {"SP1", "LP1", "FP3", "CP5", "OP", "MFP1", "SFP"}) {
    const RuleVerdict v = test_rule(rule_named(name), spec, b, 100);
    CAPTURE(name);
    if (v.falsified) CAPTURE(v.falsified->instantiation);
    CHECK_FALSE(v.falsified.has_value());
    CHECK(v.instantiations > 0);
  }
}

TEST_CASE("verdicts are deterministic in the seed") {
  const InitSpec spec = default_rule_spec();
  GenBounds b;
  b.seed = 7;
  const RuleVerdict v1 = test_rule(rule_named("LP2"), spec, b, 50);
  const RuleVerdict v2 = test_rule(rule_named("LP2"), spec, b, 50);
  CHECK(v1.instantiations == v2.instantiations);
  CHECK(v1.falsified.has_value() == v2.falsified.has_value());
}

TEST_CASE("the full catalogue passes a reduced budget") {
  const InitSpec spec = default_rule_spec();
  GenBounds b;
  for (const RuleSpec& r : catalogue()) {
    const RuleVerdict v = test_rule(r, spec, b, 150);
    CAPTURE(r.name);
    if (v.falsified) {
      CAPTURE(v.falsified->instantiation);
      CAPTURE(dump(v.falsified->state, spec.decls));
    }
    CHECK_FALSE(v.falsified.has_value());
  }
}

TEST_CASE("every mutant is falsified") {
  const InitSpec spec = default_rule_spec();
  GenBounds b;
  CHECK(mutant_catalogue().size() >= 5);
  for (const RuleSpec& r : mutant_catalogue()) {
    const RuleVerdict v = test_rule(r, spec, b, 300);
    CAPTURE(r.name);
    CHECK(v.falsified.has_value());
  }
}

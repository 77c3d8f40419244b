// Acceptance run: one PASS/FAIL line per criterion.
//
// usage: acceptance [path-to-pbisim-cli]
// With the CLI path, exit codes of the command-line checks are verified too.

#include "pbisim/axioms.hpp"
#include "pbisim/equivalence.hpp"
#include "pbisim/harness.hpp"
#include "pbisim/parser.hpp"
#include "pbisim/prover.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pbisim;

namespace {

std::string cli;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int run_cli(const std::string& args) {
  std::string cmd = "'" + cli + "' " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

const std::string kPQ = "(D(b.D(0)) +[1/2] D(c.D(0)))";

// Runs a suite in batches until `want` trials with a true premise are seen.
Report until(const std::string& suite, std::size_t want, GenConfig cfg, std::size_t limit) {
  Report total;
  total.suite = suite;
  std::size_t counted = 0;
  while (counted < want && total.trials < limit) {
    std::size_t batch = want - counted;
    Report r = run_property_suite(suite, batch, cfg);
    total.trials += r.trials;
    total.passed += r.passed;
    total.skipped += r.skipped;
    for (auto& f : r.failures) total.failures.push_back(f);
    for (auto& [k, v] : r.counts) total.counts[k] += v;
    counted = total.trials - total.skipped;
    cfg.seed += batch;
  }
  return total;
}

void describe(Outcome& o, const Report& r) {
  o.detail << " " << r.suite << ": trials=" << r.trials << " failures=" << r.failures.size()
           << " vacuous=" << r.skipped;
  for (auto& f : r.failures) {
    o.detail << "\n    seed " << f.seed << " expected " << f.expected << " got " << f.got;
    for (auto& t : f.input_terms) o.detail << "\n      " << t;
  }
}

// Strong bisimilarity preserves the mass on each set of enabled actions.
std::map<std::set<Action>, Rational> enabled_profile(const Distribution& mu) {
  std::map<std::set<Action>, Rational> out;
  for (auto& [e, r] : mu.entries()) out[actions_of(e)] += r;
  return out;
}

void criterion1(Outcome& o) {
  std::string s = "a.(D(tau." + kPQ + ") +[3/4] D(tau." + kPQ + "))";
  std::string t = "a." + kPQ;
  std::string u = "a.(D(tau." + kPQ + ") +[1/3] " + kPQ + ")";
  for (auto& [x, y] : {std::pair{s, t}, {t, u}, {s, u}}) {
    o.require(rooted_branching_equiv_states(parse_nd(x), parse_nd(y)).equivalent, "rooted " + x + " ~ " + y);
    if (!cli.empty())
      o.require(run_cli("check --rel rooted-branching --left " + quote(x) + " --right " + quote(y)) == 0,
                "cli exit 0");
  }
  o.require(!strong_equiv(parse_p("D(" + s + ")"), parse_p("D(" + t + ")")).equivalent, "strong s != t");
  if (!cli.empty()) o.require(run_cli("check --rel strong --left " + quote(s) + " --right " + quote(t)) == 1, "cli exit 1");
  // independent view: the a-successors enable different actions
  auto step = [](const std::string& x) { return nd_transitions(parse_nd(x), Action("a")).at(0).target; };
  o.require(enabled_profile(step(s)) != enabled_profile(step(t)), "enabled-action profiles differ");
  o.detail << " rooted 0/0/0, strong 1";
}

void criterion2(Outcome& o) {
  std::string x = "D(tau.D(a.D(0)) + c.D(b.D(0)) + tau.D(d.D(0)))";
  PTerm e1 = parse_p("D(tau.(D(tau." + x + " + c.D(b.D(0)) + tau.D(d.D(0))) +[1/2] D(tau.(" + x + " +[1/2] D(0)))))");
  PTerm e6 = parse_p("D(tau.(" + x + " +[3/4] D(0)))");
  BranchingEngine en;
  auto res = prove_equal(e1, e6, &en);
  auto* tr = std::get_if<ProofTrace>(&res);
  o.require(tr != nullptr, "trace produced");
  if (!tr) return;
  std::map<std::string, int> m;
  for (auto& s : tr->steps) m[axiom_name(s.axiom)]++;
  for (const char* r : {"BP", "SBP2", "P1", "P2", "P3"}) o.require(m[r] > 0, std::string("uses ") + r);
  bool replayed = false;
  try {
    replayed = replay(*tr, true, &en) == Term(e6);
  } catch (const std::exception& e) {
    o.detail << " replay error: " << e.what();
  }
  o.require(replayed, "replay");
  o.detail << " steps=" << tr->steps.size() << " rules:";
  for (auto& [k, v] : m) o.detail << " " << k << "=" << v;
}

void criterion3(Outcome& o) {
  std::string p = "D(tau.D(a.D(0))) +[1/2] D(b.D(0))", q = "D(a.D(0)) +[1/2] D(b.D(0))";
  o.require(!rooted_branching_equiv(parse_p(p), parse_p(q)).equivalent, "rooted fails");
  o.require(branching_equiv(parse_p(p), parse_p(q)).equivalent, "branching holds");
  o.require(brute_force_branching(den(parse_p(p)), den(parse_p(q))).equivalent, "oracle agrees on branching");
  if (!cli.empty()) {
    o.require(run_cli("check --rel rooted-branching --left " + quote(p) + " --right " + quote(q)) == 1, "cli exit 1");
    o.require(run_cli("check --rel branching --left " + quote(p) + " --right " + quote(q)) == 0, "cli exit 0");
  }
  o.detail << " rooted no, branching yes";
}

void criterion4(Outcome& o) {
  std::string p = "D(b.D(0))", q = "D(c.D(0))";
  NdTerm e = parse_nd("a.(" + p + " +[1/2] " + q + ") + a.(" + p + " +[1/3] " + q + ")");
  auto poly = transition_polytope(Distribution::dirac(e), Action("a"));
  Distribution target = den(parse_p(p + " +[5/12] " + q));
  o.require(polytope_contains(poly, target), "member");
  std::vector<std::vector<NdTerm>> cs;
  for (auto& x : derivatives(PTerm::dirac(e))) cs.push_back({x});
  Partition part(cs);
  Signature sig = signature(target, part);
  o.require(sig.at(part.class_of(parse_nd("b.D(0)"))) == Rational(5, 12), "5/12 on the class of P");
  o.require(polytope_matches_signature(poly, part, sig), "signature matched");
  o.detail << " den(P +[5/12] Q) reachable";
}

void criterion5(Outcome& o) {
  o.require(sqsubseteq(parse_nd("b.D(0)"), parse_p("D(a.D(0) + b.D(0)) +[1/2] D(b.D(0))")), "first fixture");
  o.require(sqsubseteq(parse_nd("a.(D(d.D(0)) +[1/3] D(0))"), parse_p("D(b.D(0) + a.D(d.D(0))) +[1/3] D(c.D(b.D(0)) + a.D(0))")),
            "second fixture");
  std::string bq = "b.D(c.D(0)) + tau.D(d.D(0))";
  o.require(sqsubseteq(parse_nd("tau.(D(" + bq + ") +[1/2] D(d.D(0)))"), parse_p("D(" + bq + ")")), "third fixture");
  o.require(!sqsubseteq(parse_nd("a.D(0)"), parse_p("D(b.D(0))")), "negative fixture");
  o.detail << " 3 true, 1 false";
}

void suite_criterion(Outcome& o, const std::string& suite, std::size_t trials, std::uint64_t seed, unsigned mc) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.max_complexity = mc;
  Report r = run_property_suite(suite, trials, cfg);
  o.require(r.failures.empty(), "no failures");
  describe(o, r);
}

void criterion6(Outcome& o) {
  GenConfig cfg;
  cfg.seed = 6000;
  cfg.max_complexity = 10;
  Report r = run_property_suite("derived", 100, cfg);
  o.require(r.failures.empty(), "no failures");
  o.require(r.skipped == 0, "every seed instantiated");
  for (int v = 1; v <= 3; ++v) o.require(r.counts["variant " + std::to_string(v)] > 0, "variant covered");
  describe(o, r);
}

void criterion7(Outcome& o) {
  GenConfig cfg;
  cfg.seed = 7000;
  cfg.max_complexity = 12;
  Report r = run_property_suite("soundness", 1000, cfg);
  o.require(r.failures.empty(), "no failures");
  o.require(r.skipped == 0, "every trial applied an axiom");
  for (const char* a : {"A1", "A2", "A3", "A4", "P1", "P2", "P3", "C", "BP", "G"})
    o.require(r.counts[a] > 0, std::string("applied ") + a);
  describe(o, r);
  o.detail << " per axiom:";
  for (auto& [k, v] : r.counts) o.detail << " " << k << "=" << v;
}

void criterion8(Outcome& o) {
  std::uint64_t seed = 8000;
  for (const char* s : {"congruence", "stuttering", "cancellativity", "inclusion", "cc", "concrete"}) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 10;
    Report r = run_property_suite(s, 500, cfg);
    o.require(r.failures.empty(), std::string(s) + " failures");
    if (std::string(s) == "cancellativity") o.require(r.counts["r=1"] > 0, "r = 1 included");
    describe(o, r);
    seed += 1000;
  }
}

void criterion9(Outcome& o) {
  GenConfig cfg;
  cfg.seed = 9000;
  cfg.max_complexity = 7;
  Report r = until("oracle", 500, cfg, 2000);
  o.require(r.failures.empty(), "no disagreements");
  o.require(r.trials - r.skipped >= 500, "500 in-bound pairs");
  describe(o, r);
  o.detail << " equivalent=" << r.counts["equivalent"];
}

void criterion10(Outcome& o) {
  GenConfig cfg;
  cfg.seed = 10000;
  cfg.max_complexity = 14;
  Report r = until("completeness", 200, cfg, 1000);
  o.require(r.failures.empty(), "no failures");
  o.require(r.trials - r.skipped >= 200, "200 equivalent pairs");
  describe(o, r);
  o.detail << " not-strong=" << r.counts["not strong"] << " steps=" << r.counts["steps"];
}

void criterion11(Outcome& o) {
  GenConfig cfg;
  cfg.seed = 11000;
  cfg.max_complexity = 12;
  Report r = run_property_suite("concretize", 200, cfg);
  o.require(r.failures.empty(), "no failures");
  o.require(r.skipped == 0, "all terms checked");
  describe(o, r);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cli = argv[1];
  std::vector<std::function<void(Outcome&)>> checks{criterion1, criterion2, criterion3, criterion4,
                                                     criterion5, criterion6, criterion7, criterion8,
                                                     criterion9, criterion10, criterion11};
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      checks[i](o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    if (!o.ok) ++failed;
    std::cout << "criterion " << (i + 1) << ": " << (o.ok ? "PASS" : "FAIL") << " (" << ms << " ms)"
              << o.detail.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

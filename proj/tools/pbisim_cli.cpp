// pbisim: check, prove, normalize, concretize, lts, fuzz.
//
// Exit codes: 0 equivalent / success, 1 not equivalent or failing suite,
// 2 usage or parse error, 3 rewrite budget exhausted.

#include "pbisim/axioms.hpp"
#include "pbisim/dot.hpp"
#include "pbisim/equivalence.hpp"
#include "pbisim/harness.hpp"
#include "pbisim/json_io.hpp"
#include "pbisim/parser.hpp"
#include "pbisim/prover.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace pbisim;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_arg(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw UsageError("cannot read " + arg.substr(1));
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

// Non-deterministic input is read as its Dirac embedding.
PTerm read_process(const std::string& arg) {
  auto v = parse_any(read_arg(arg));
  if (auto* e = std::get_if<NdTerm>(&v)) return PTerm::dirac(*e);
  return std::get<PTerm>(v);
}

void print_verdict(const Verdict& v, bool as_json) {
  if (as_json) {
    std::cout << verdict_json(v) << "\n";
    return;
  }
  std::cout << (v.equivalent ? "equivalent" : "not equivalent") << " (" << v.relation << ")\n";
  if (v.witness) {
    auto side = [](const NamedSignature& s) {
      std::string out = "{";
      bool first = true;
      for (auto& [k, r] : s) {
        out += (first ? "" : ", ") + k + " -> " + r.fraction();
        first = false;
      }
      return out + "}";
    };
    std::cout << "  left:  " << side(v.witness->left) << "\n  right: " << side(v.witness->right) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence checking and equational proofs for probabilistic processes"};
  app.require_subcommand(1, 1);

  std::string rel = "rooted-branching", left, right, form = "p", term, suite, alpha = "a";
  bool json_out = false, dot = false, trace_out = false;
  std::size_t trials = 100, budget = 100000;
  std::uint64_t seed = 0;
  unsigned max_complexity = 8;

  auto* check = app.add_subcommand("check", "Decide an equivalence");
  check->add_option("--rel", rel)->check(CLI::IsMember({"strong", "branching", "rooted-branching"}));
  check->add_option("--left", left, "term or @file")->required();
  check->add_option("--right", right, "term or @file")->required();
  check->add_flag("--json", json_out);

  auto* prove = app.add_subcommand("prove", "Derive left = right from the axioms");
  prove->add_option("--left", left, "term or @file")->required();
  prove->add_option("--right", right, "term or @file")->required();
  prove->add_option("--budget", budget, "rewrite step budget");
  prove->add_flag("--json", json_out);

  auto* norm = app.add_subcommand("normalize", "Print a normal form");
  norm->add_option("--form", form)->check(CLI::IsMember({"nd", "p", "concrete"}));
  norm->add_option("term", term, "term or @file")->required();

  auto* conc = app.add_subcommand("concretize", "Remove inert and partially inert steps under a prefix");
  conc->add_option("term", term, "term or @file")->required();
  conc->add_option("--alpha", alpha, "prefix action");
  conc->add_flag("--trace", trace_out, "print the proof steps as JSON lines");

  auto* lts = app.add_subcommand("lts", "Print the transition graph");
  lts->add_flag("--dot", dot)->required();
  lts->add_option("term", term, "term or @file")->required();

  auto* fuzz = app.add_subcommand("fuzz", "Run a property suite");
  fuzz->add_option("--suite", suite)->required();
  fuzz->add_option("--trials", trials);
  fuzz->add_option("--seed", seed);
  fuzz->add_option("--max-complexity", max_complexity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      PTerm p = read_process(left), q = read_process(right);
      Verdict v = rel == "strong"      ? strong_equiv(p, q)
                  : rel == "branching" ? branching_equiv(p, q)
                                       : rooted_branching_equiv(p, q);
      print_verdict(v, json_out);
      return v.equivalent ? 0 : 1;
    }
    if (*prove) {
      PTerm p = read_process(left), q = read_process(right);
      ProverOptions opt;
      opt.budget = budget;
      BranchingEngine en;
      auto res = prove_equal(p, q, &en, opt);
      if (auto* t = std::get_if<ProofTrace>(&res)) {
        for (auto& line : trace_json_lines(*t)) std::cout << line << "\n";
        return 0;
      }
      print_verdict(std::get<Verdict>(res), json_out);
      return 1;
    }
    if (*norm) {
      std::string text = read_arg(term);
      if (form == "nd") {
        std::cout << normalize_nd(parse_nd(text)).first.str() << "\n";
      } else if (form == "p") {
        std::cout << normalize_p(read_process(term)).first.str() << "\n";
      } else {
        PTerm body = concretize(read_process(term)).end.nd().body();
        std::cout << normalize_p(body).first.str() << "\n";
      }
      return 0;
    }
    if (*conc) {
      auto v = parse_any(read_arg(term));
      ProofTrace t = std::holds_alternative<NdTerm>(v) ? concretize_nd(std::get<NdTerm>(v), Action(alpha))
                                                       : concretize(std::get<PTerm>(v), Action(alpha));
      if (trace_out) {
        for (auto& line : trace_json_lines(t)) std::cout << line << "\n";
      } else {
        std::cout << t.end.str() << "\n";
      }
      return 0;
    }
    if (*lts) {
      std::cout << lts_dot(read_process(term));
      return 0;
    }
    if (*fuzz) {
      GenConfig cfg;
      cfg.seed = seed;
      cfg.max_complexity = max_complexity;
      Report r = run_property_suite(suite, trials, cfg);
      std::cout << report_json(r) << "\n";
      return r.failures.empty() ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const UnknownSuite& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const FragmentError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 2;
}

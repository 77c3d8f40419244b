#pragma once

#include "pbisim/axioms.hpp"
#include "pbisim/equivalence.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbisim {

class BoundExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class UnknownSuite : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct GenConfig {
  std::uint64_t seed = 0;
  unsigned max_complexity = 8;
  std::vector<Action> alphabet{Action("a"), Action("b"), Action("c")};
  Rational tau_bias{1, 2};
  unsigned weight_denominator_bound = 4;
};

// Recursive generators; complexity of the result never exceeds the bound.
class TermGen {
public:
  explicit TermGen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}
  NdTerm nd(unsigned budget);
  PTerm p(unsigned budget);
  Rational weight();
  Action action();
  std::mt19937_64& rng() { return rng_; }
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }
  bool chance(const Rational& r);

private:
  GenConfig cfg_;
  std::mt19937_64 rng_;
};

NdTerm gen_nd(const GenConfig& cfg);
PTerm gen_p(const GenConfig& cfg);

// Exhaustive guess-and-check over the joint derivative set. A guess picks the
// stable states, partitions them, and settles every other state onto a weak
// closure vertex over stable states. It is accepted if the class-mass vectors
// of mu and nu agree and every transition is matched, through a weak move that
// keeps the vector followed by a partial step, by each state with the same
// vector and by the settled distribution.
Verdict brute_force_branching(const Distribution& mu, const Distribution& nu, std::size_t state_bound = 5);

// A random instance of the axiom that applies somewhere in t, in either
// direction; side conditions are checked before returning.
std::optional<RewriteStep> random_axiom_step(const Term& t, AxiomId id, TermGen& gen, BranchingEngine& engine);
// Up to `steps` random sound rewrites.
Term random_equivalent(const Term& t, unsigned steps, TermGen& gen, BranchingEngine& engine);

struct Failure {
  std::uint64_t seed = 0;
  std::vector<std::string> input_terms;
  std::string expected, got;
};

struct Report {
  std::string suite;
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;  // premise false or bound exceeded
  std::vector<Failure> failures;
  std::map<std::string, std::size_t> counts;
};

std::vector<std::string> suite_names();
Report run_property_suite(const std::string& name, std::size_t trials, const GenConfig& cfg);

}  // namespace pbisim

#pragma once

#include "pbisim/axioms.hpp"

#include <cstddef>
#include <stdexcept>
#include <variant>

namespace pbisim {

class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An internal invariant of the prover failed; indicates a bug.
class ProverError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct ProverOptions {
  std::size_t budget = 100000;  // primitive rewrite steps
  bool check_side = false;      // verify side conditions while building
};

// Rewrites to the canonical representative of the rooted class.
std::pair<PTerm, ProofTrace> canonical_form(const PTerm& p, BranchingEngine* engine = nullptr,
                                            const ProverOptions& opt = {});

// A trace from p to q when they are rooted branching bisimilar, otherwise
// the verdict explaining why not.
std::variant<ProofTrace, Verdict> prove_equal(const PTerm& p, const PTerm& q, BranchingEngine* engine = nullptr,
                                              const ProverOptions& opt = {});

// alpha.p rewritten to alpha.p' where every state reachable in p' is concrete.
ProofTrace concretize(const PTerm& p, const Action& alpha = Action("a"), BranchingEngine* engine = nullptr,
                      const ProverOptions& opt = {});

// Same for the non-deterministic fragment (every prefix body a Dirac),
// using only A1-A4 and B: alpha.D(e) rewritten to alpha.D(e') with e' concrete.
ProofTrace concretize_nd(const NdTerm& e, const Action& alpha = Action("a"), BranchingEngine* engine = nullptr,
                         const ProverOptions& opt = {});

}  // namespace pbisim

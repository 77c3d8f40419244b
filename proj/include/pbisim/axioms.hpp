#pragma once

#include "pbisim/equivalence.hpp"
#include "pbisim/term.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pbisim {

enum class AxiomId { A1, A2, A3, A4, B, P1, P2, P3, C, BP, G, SBP1, SBP2, SBP3 };
enum class Direction { LR, RL };

std::string axiom_name(AxiomId id);
std::optional<AxiomId> axiom_from_name(const std::string& name);
inline Direction flip(Direction d) { return d == Direction::LR ? Direction::RL : Direction::LR; }

// Child-index path. Prefix: 0 = body. Sum, PChoice: 0 left, 1 right. Dirac: 0.
using Position = std::vector<int>;

// Metavariable bindings: E, F, G are NdTerms; P, Q, R are PTerms;
// alpha the action; r, s the weights.
struct Substitution {
  std::map<std::string, NdTerm> nd;
  std::map<std::string, PTerm> p;
  std::optional<Action> alpha;
  std::map<std::string, Rational> num;
};

struct RewriteStep {
  AxiomId axiom = AxiomId::A1;
  Position position;
  Direction direction = Direction::LR;
  Substitution subst;
  std::optional<std::string> witness;
};

struct ProofTrace {
  Term start;
  std::vector<RewriteStep> steps;
  Term end;
};

class PositionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};
class SubstitutionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};
class SideConditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};
class FragmentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Left and right instance of an axiom under a substitution.
std::pair<Term, Term> instantiate(AxiomId id, const Substitution& s);

Term subterm_at(const Term& t, const Position& pos);
Term replace_at(const Term& t, const Position& pos, const Term& replacement);

// Rewrites the subterm at the position from one side to the other. With
// check_side, the semantic side condition of BP, G and SBP1 is verified.
Term apply_axiom(const Term& t, const RewriteStep& step, bool check_side = true, BranchingEngine* engine = nullptr);

// Folds the steps over start; throws if any step fails or the end differs.
Term replay(const ProofTrace& trace, bool check_side = true, BranchingEngine* engine = nullptr);

std::vector<RewriteStep> reversed(const std::vector<RewriteStep>& steps);
ProofTrace reversed(const ProofTrace& trace);

// Flatten, sort, dedupe, drop 0 (A1-A4); recursive into prefix bodies.
std::pair<NdTerm, ProofTrace> normalize_nd(const NdTerm& e);
// Flatten to a right-nested choice, sort and merge components (P1-P3);
// components are normalized with normalize_nd.
std::pair<PTerm, ProofTrace> normalize_p(const PTerm& p);
Decomposition flat_decomposition(const PTerm& p);

// Top-level list only, steps relative to the term itself.
std::vector<RewriteStep> shallow_normalize_nd(const NdTerm& e, NdTerm& out);
std::vector<RewriteStep> shallow_normalize_p(const PTerm& p, PTerm& out);

// Derived laws expanded into primitive steps.
//   1: a.D(E + tau.P) = a.P   if E sqsubseteq P
//   2: a.(D(tau.P) +[r] R) = a.(P +[r] R)
//   3: a.D(tau.P) = a.P
std::pair<NdTerm, ProofTrace> derived_simple_bp(int variant, const NdTerm& t, BranchingEngine* engine = nullptr);

}  // namespace pbisim

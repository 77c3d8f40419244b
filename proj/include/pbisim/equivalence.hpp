#pragma once

#include "pbisim/semantics.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace pbisim {

class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Class masses keyed by a printable class name.
using NamedSignature = std::map<std::string, Rational>;

struct Witness {
  std::vector<std::string> action_path;
  NamedSignature left, right;
};

struct Verdict {
  bool equivalent = true;
  std::string relation;
  std::optional<Witness> witness;
};

// Stabilized class masses. Keys are ids of classes that contain a stable
// state; a stable state of class C has vector {C: 1}.
using SigVec = std::map<std::size_t, Rational>;

// Incremental branching classifier. States are classified bottom-up in
// order of complexity: every transition leads to strictly smaller terms,
// so a state's targets are always classified before the state itself.
// Results are intrinsic to the terms, so one engine may serve many queries.
class BranchingEngine {
public:
  void add(const NdTerm& e);
  void add(const Distribution& mu);

  std::size_t class_of(const NdTerm& e);
  const SigVec& sig(const NdTerm& e);
  SigVec sig(const Distribution& mu);
  bool is_stable(const NdTerm& e);
  // Targets of e's inert tau-transitions, in transition order.
  const std::vector<Distribution>& inert_targets(const NdTerm& e);
  bool is_inert(const NdTerm& e, const Distribution& target);
  bool equiv(const Distribution& mu, const Distribution& nu) { return sig(mu) == sig(nu); }
  bool equiv(const NdTerm& e, const NdTerm& f) { return class_of(e) == class_of(f); }

  // Weight-minimal stable distribution reachable through inert steps.
  const Distribution& stab(const NdTerm& e);
  Distribution stab(const Distribution& mu);

  std::string class_name(std::size_t c) const;
  NamedSignature named(const SigVec& s) const;
  std::size_t class_count() const { return classes_.size(); }

  // Does some rho => rho_bar -(a)-> nu' via inert steps reach sig*(nu') = target?
  bool weak_match(const Distribution& rho, const Action& a, const SigVec& target);
  // Does the combined a-step of delta(g) (with stay counted as stay_sig
  // when a is tau) hit the target vector?
  bool direct_match(const NdTerm& g, const Action& a, const SigVec& target, const SigVec* stay_sig);

  std::size_t states_classified() const { return states_.size(); }

private:
  struct StateInfo {
    bool stable = true;
    std::size_t cls = 0;
    SigVec sig;
    std::vector<Distribution> inert;
    std::optional<Distribution> stab;
  };
  struct ClassInfo {
    std::vector<NdTerm> members;
    std::optional<NdTerm> stable_rep;
    SigVec sig;
    std::set<Action> visible;
    bool has_tau = false;
  };

  StateInfo& info(const NdTerm& e);
  void classify(const NdTerm& e);
  bool transfers(const NdTerm& from, const NdTerm& to, const SigVec& hyp);

  std::unordered_map<const detail::Node*, StateInfo> states_;
  std::vector<ClassInfo> classes_;
  std::map<SigVec, std::size_t> by_sig_;
};

// Branching classes over a universe, backed by the engine that computed them.
class BranchingPartition {
public:
  BranchingPartition(std::shared_ptr<BranchingEngine> engine, const std::set<NdTerm>& universe);
  const Partition& partition() const { return partition_; }
  BranchingEngine& engine() const { return *engine_; }
  std::shared_ptr<BranchingEngine> engine_ptr() const { return engine_; }

private:
  std::shared_ptr<BranchingEngine> engine_;
  Partition partition_;
};

// Closes roots under derivatives; strong classes by iterated refinement.
Partition strong_partition(const std::set<NdTerm>& roots);
Verdict strong_equiv(const Distribution& mu, const Distribution& nu);
Verdict strong_equiv(const PTerm& p, const PTerm& q);

BranchingPartition branching_partition(const std::set<NdTerm>& roots,
                                       std::shared_ptr<BranchingEngine> engine = nullptr);
Verdict branching_equiv(const Distribution& mu, const Distribution& nu, BranchingEngine* engine = nullptr);
Verdict branching_equiv(const PTerm& p, const PTerm& q, BranchingEngine* engine = nullptr);

Verdict rooted_branching_equiv_states(const NdTerm& e, const NdTerm& f, BranchingEngine* engine = nullptr);
Verdict rooted_branching_equiv(const PTerm& p, const PTerm& q, BranchingEngine* engine = nullptr);
// Rooted classes over the derivatives of the roots.
Partition rooted_partition(const std::set<NdTerm>& roots, BranchingEngine& engine);

struct Inertness {
  enum Kind { Inert, PartiallyInert, Neither } kind = Neither;
  Rational r;  // mass of the part equivalent to the source; 1 when inert
};
Inertness inertness(const NdTerm& e, const StateTransition& t, const BranchingPartition& p);
Inertness inertness(const NdTerm& e, const StateTransition& t, BranchingEngine& engine);

bool is_concrete(const PTerm& p, BranchingEngine* engine = nullptr);
bool is_concrete(const NdTerm& e, BranchingEngine* engine = nullptr);
bool is_rigid(const NdTerm& e, BranchingEngine* engine = nullptr);

bool sqsubseteq(const NdTerm& e, const PTerm& p, BranchingEngine* engine = nullptr);

}  // namespace pbisim

#pragma once

#include "pbisim/distribution.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace pbisim {

struct StateTransition {
  NdTerm source;
  Action action;
  Distribution target;
  friend bool operator==(const StateTransition&, const StateTransition&) = default;
};

// Sorted by (action, target), duplicates removed.
std::vector<StateTransition> nd_transitions(const NdTerm& e);
std::vector<StateTransition> nd_transitions(const NdTerm& e, const Action& a);
std::set<Action> actions_of(const NdTerm& e);

// Generator form of { mu' : mu -a-> mu' } (combined transitions).
struct TransitionPolytope {
  Action action;
  std::map<NdTerm, std::vector<Distribution>> generators;
  std::map<NdTerm, Rational> source_masses;
  bool empty = false;
};

TransitionPolytope transition_polytope(const Distribution& mu, const Action& a);
// Like transition_polytope for tau, but each state may also stay put.
TransitionPolytope partial_tau_successors(const Distribution& mu);
// Partial step -(a)->: partial tau successors for tau, plain polytope otherwise.
TransitionPolytope partial_polytope(const Distribution& mu, const Action& a);

bool polytope_contains(const TransitionPolytope& poly, const Distribution& nu);

class Partition {
public:
  Partition() = default;
  explicit Partition(std::vector<std::vector<NdTerm>> classes);

  const std::vector<std::vector<NdTerm>>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  bool contains(const NdTerm& e) const { return index_.count(e) != 0; }
  // Throws std::out_of_range for states outside the universe.
  std::size_t class_of(const NdTerm& e) const;
  std::set<NdTerm> universe() const;
  std::set<NdTerm> class_set(std::size_t c) const;

private:
  std::vector<std::vector<NdTerm>> classes_;
  std::map<NdTerm, std::size_t> index_;
};

using Signature = std::map<std::size_t, Rational>;

Signature signature(const Distribution& mu, const Partition& p);

// Some member of the polytope has exactly the given class masses.
bool polytope_matches_signature(const TransitionPolytope& poly, const Partition& p, const Signature& target);

struct WeakClosure {
  Distribution source;
  std::vector<Distribution> generators;
};

WeakClosure weak_closure(const Distribution& mu);
bool weak_closure_contains(const WeakClosure& wc, const Distribution& nu);

// Independent route for mu => nu: a flow over tau-transitions of the
// derivative set, decided by one LP.
bool weak_reachable(const Distribution& mu, const Distribution& nu);

class BranchingPartition;
// Weight-minimal stable member of the weak closure with the same
// stabilized class masses; ties broken by distribution order.
Distribution stabilize(const Distribution& mu, const BranchingPartition& p);

}  // namespace pbisim

#pragma once

#include "pbisim/term.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pbisim {

class WeightSumError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};
class MismatchError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Finite-support probability distribution over NdTerm. Masses are
// positive and sum to 1; entries are kept in term order.
class Distribution {
public:
  using Map = std::map<NdTerm, Rational>;

  Distribution() : m_{{NdTerm(), Rational(1)}} {}
  static Distribution dirac(const NdTerm& e);
  // Drops zero entries, merges nothing (map keys are unique). Throws
  // WeightSumError if masses are negative or do not sum to 1.
  static Distribution from_map(Map m);

  const Map& entries() const { return m_; }
  Rational operator[](const NdTerm& e) const;
  std::vector<NdTerm> support() const;
  std::size_t size() const { return m_.size(); }
  bool is_dirac() const { return m_.size() == 1; }

  // r*this + (1-r)*other, r in [0,1].
  Distribution mix(const Rational& r, const Distribution& other) const;

  std::string str() const;  // {E -> p, ...}

  friend bool operator==(const Distribution& a, const Distribution& b) { return a.m_ == b.m_; }
  friend std::strong_ordering operator<=>(const Distribution& a, const Distribution& b);

private:
  Map m_;
};

// Weighted parts; repeats and zero weights allowed.
struct Decomposition {
  std::vector<std::pair<Rational, Distribution>> parts;
};

Distribution den(const PTerm& p);
Distribution convex_sum(const Decomposition& d);

struct JointCell {
  Rational weight;
  Distribution cell;
};
// rows follow d1, columns follow d2.
std::vector<std::vector<JointCell>> joint_refinement(const Decomposition& d1, const Decomposition& d2);

std::uint64_t complexity(const NdTerm& e);
std::uint64_t complexity(const PTerm& p);
Rational weight(const Distribution& mu);

std::set<NdTerm> derivatives(const PTerm& p);
std::set<NdTerm> derivatives(const NdTerm& e);
// Union of derivatives of every support state.
std::set<NdTerm> derivatives(const Distribution& mu);

Rational class_mass(const Distribution& mu, const std::set<NdTerm>& s);

}  // namespace pbisim

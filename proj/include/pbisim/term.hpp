#pragma once

#include "pbisim/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pbisim {

// Action name; "tau" is the silent action and cannot be a visible name.
class Action {
public:
  Action() : name_("tau") {}
  explicit Action(std::string name) : name_(std::move(name)) {}
  static Action tau() { return Action(); }

  const std::string& name() const { return name_; }
  bool is_tau() const { return name_ == "tau"; }

  friend bool operator==(const Action& a, const Action& b) { return a.name_ == b.name_; }
  friend auto operator<=>(const Action& a, const Action& b) { return a.name_ <=> b.name_; }

private:
  std::string name_;
};

enum class Tag : std::uint8_t { Zero = 0, Prefix = 1, Sum = 2, Dirac = 3, PChoice = 4 };

namespace detail {
struct Node;
}

class PTerm;

// Terms are hash-consed: structurally equal terms share one node, so
// equality is pointer comparison. Nodes live for the whole process.
class NdTerm {
public:
  NdTerm();  // 0
  static NdTerm zero();
  static NdTerm prefix(const Action& a, const PTerm& body);
  static NdTerm sum(const NdTerm& l, const NdTerm& r);

  Tag tag() const;
  bool is_zero() const { return tag() == Tag::Zero; }
  bool is_prefix() const { return tag() == Tag::Prefix; }
  bool is_sum() const { return tag() == Tag::Sum; }
  const Action& action() const;  // Prefix only
  PTerm body() const;            // Prefix only
  NdTerm left() const;           // Sum only
  NdTerm right() const;          // Sum only

  std::uint64_t complexity() const;
  std::size_t hash() const;
  std::string str() const;
  const detail::Node* node() const { return n_; }

  friend bool operator==(const NdTerm& a, const NdTerm& b) { return a.n_ == b.n_; }
  friend std::strong_ordering operator<=>(const NdTerm& a, const NdTerm& b);

private:
  friend class PTerm;
  friend struct Term;
  explicit NdTerm(const detail::Node* n) : n_(n) {}
  const detail::Node* n_;
};

class PTerm {
public:
  PTerm();  // D(0)
  static PTerm dirac(const NdTerm& e);
  // Throws std::invalid_argument unless 0 < r < 1.
  static PTerm choice(const PTerm& l, const Rational& r, const PTerm& rr);

  Tag tag() const;
  bool is_dirac() const { return tag() == Tag::Dirac; }
  bool is_choice() const { return tag() == Tag::PChoice; }
  NdTerm inner() const;  // Dirac only
  PTerm left() const;    // PChoice only
  PTerm right() const;   // PChoice only
  const Rational& weight() const;

  std::uint64_t complexity() const;
  std::size_t hash() const;
  std::string str() const;
  const detail::Node* node() const { return n_; }

  friend bool operator==(const PTerm& a, const PTerm& b) { return a.n_ == b.n_; }
  friend std::strong_ordering operator<=>(const PTerm& a, const PTerm& b);

private:
  friend class NdTerm;
  friend struct Term;
  explicit PTerm(const detail::Node* n) : n_(n) {}
  const detail::Node* n_;
};

// Either sort; used where an operation accepts both.
struct Term {
  Term(const NdTerm& e) : n(e.node()) {}
  Term(const PTerm& p) : n(p.node()) {}
  bool is_nd() const;
  NdTerm nd() const { return NdTerm(n); }
  PTerm p() const { return PTerm(n); }
  std::string str() const;
  std::uint64_t complexity() const;
  friend bool operator==(const Term& a, const Term& b) { return a.n == b.n; }
  const detail::Node* n;
};

// Total order: constructor tag, then action name, then children left to right.
std::strong_ordering compare_nodes(const detail::Node* a, const detail::Node* b);

// Helpers for building sums and choices from lists.
NdTerm sum_of(const std::vector<NdTerm>& summands);  // right-nested; empty -> 0
std::vector<NdTerm> summands(const NdTerm& e);       // flattened, in order; 0 for 0
std::size_t interned_node_count();

}  // namespace pbisim

template <>
struct std::hash<pbisim::NdTerm> {
  std::size_t operator()(const pbisim::NdTerm& t) const { return t.hash(); }
};
template <>
struct std::hash<pbisim::PTerm> {
  std::size_t operator()(const pbisim::PTerm& t) const { return t.hash(); }
};

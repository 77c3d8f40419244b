#pragma once

#include "pbisim/axioms.hpp"

namespace pbisim::detail {

inline Position concat(const Position& a, const Position& b) {
  Position out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Path to element i of a right-nested list of n elements.
inline Position list_pos(std::size_t i, std::size_t n) {
  Position p(i, 1);
  if (i + 1 < n) p.push_back(0);
  return p;
}

// Path to the node whose left child is element i (i < n-1).
inline Position spine_pos(std::size_t i) { return Position(i, 1); }

// Accumulates steps while tracking the rewritten term.
struct Builder {
  Term cur;
  std::vector<RewriteStep> steps;
  BranchingEngine* engine = nullptr;
  bool check = false;

  explicit Builder(Term t, BranchingEngine* en = nullptr, bool chk = false) : cur(t), engine(en), check(chk) {}

  void step(RewriteStep s) {
    cur = apply_axiom(cur, s, check, engine);
    steps.push_back(std::move(s));
  }

  void step(AxiomId id, Position pos, Direction d, Substitution sub, std::optional<std::string> witness = {}) {
    RewriteStep s;
    s.axiom = id;
    s.position = std::move(pos);
    s.direction = d;
    s.subst = std::move(sub);
    s.witness = std::move(witness);
    step(std::move(s));
  }

  // Local steps computed on the subterm at `at`; `result` is where they end.
  void splice(const std::vector<RewriteStep>& local, const Position& at, const Term& result) {
    for (const auto& s : local) {
      RewriteStep c = s;
      c.position = concat(at, s.position);
      steps.push_back(std::move(c));
    }
    cur = replace_at(cur, at, result);
  }

  NdTerm nd() const { return cur.nd(); }
  PTerm p() const { return cur.p(); }
};

inline Substitution sub_nd(std::initializer_list<std::pair<const char*, NdTerm>> xs) {
  Substitution s;
  for (auto& [k, v] : xs) s.nd.emplace(k, v);
  return s;
}

}  // namespace pbisim::detail

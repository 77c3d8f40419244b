#pragma once

#include "pbisim/rational.hpp"

#include <map>
#include <optional>
#include <vector>

namespace pbisim {

// Equality system A x = b over nonnegative variables, built row by row.
class LinearSystem {
public:
  explicit LinearSystem(std::size_t vars = 0) : vars_(vars) {}

  std::size_t add_var() { return vars_++; }
  std::size_t vars() const { return vars_; }
  std::size_t rows() const { return rows_.size(); }

  // sum coeff[j] x_j = rhs
  void add_row(std::map<std::size_t, Rational> coeff, Rational rhs);

  // Exact two-phase simplex with Bland's rule. Returns a vertex solution
  // or nullopt when infeasible.
  std::optional<std::vector<Rational>> solve() const;
  bool feasible() const { return solve().has_value(); }

private:
  std::size_t vars_;
  std::vector<std::map<std::size_t, Rational>> rows_;
  std::vector<Rational> rhs_;
};

// Convex-combination membership: is target a convex combination of the
// given points (all of the same dimension)? Returns the weights if so.
std::optional<std::vector<Rational>> convex_weights(const std::vector<std::vector<Rational>>& points,
                                                    const std::vector<Rational>& target);

}  // namespace pbisim

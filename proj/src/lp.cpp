#include "pbisim/lp.hpp"

#include <gmpxx.h>

#include <stdexcept>

namespace pbisim {

void LinearSystem::add_row(std::map<std::size_t, Rational> coeff, Rational rhs) {
  for (auto it = coeff.begin(); it != coeff.end();) {
    if (it->first >= vars_) throw std::out_of_range("variable index out of range");
    it = it->second.is_zero() ? coeff.erase(it) : std::next(it);
  }
  rows_.push_back(std::move(coeff));
  rhs_.push_back(std::move(rhs));
}

namespace {

// Dense tableau; column n+m is the right-hand side.
struct Tableau {
  std::size_t m, cols;
  std::vector<std::vector<mpq_class>> t;
  std::vector<std::size_t> basis;

  mpq_class& at(std::size_t r, std::size_t c) { return t[r][c]; }

  void pivot(std::size_t r, std::size_t c) {
    mpq_class inv = 1 / t[r][c];
    for (auto& v : t[r])
      if (sgn(v) != 0) v *= inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r) continue;
      mpq_class f = t[i][c];
      if (sgn(f) == 0) continue;
      for (std::size_t j = 0; j < cols; ++j)
        if (sgn(t[r][j]) != 0) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }
};

}  // namespace

std::optional<std::vector<Rational>> LinearSystem::solve() const {
  const std::size_t n = vars_, m = rows_.size();
  if (m == 0) return std::vector<Rational>(n);
  // Columns: x_0..x_{n-1}, artificials a_0..a_{m-1}, rhs. Objective row m.
  Tableau tb;
  tb.m = m;
  tb.cols = n + m + 1;
  tb.t.assign(m + 1, std::vector<mpq_class>(tb.cols));
  tb.basis.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool flip = rhs_[i].sign() < 0;
    for (auto& [j, v] : rows_[i]) tb.at(i, j) = flip ? mpq_class(-v.raw()) : v.raw();
    tb.at(i, n + i) = 1;
    tb.at(i, n + m) = flip ? mpq_class(-rhs_[i].raw()) : rhs_[i].raw();
    tb.basis[i] = n + i;
  }
  // Phase-1 objective: minimize sum of artificials. Reduced costs row holds
  // -(sum of rows) on structural columns.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < tb.cols; ++j)
      if (j < n || j == n + m) tb.at(m, j) -= tb.at(i, j);

  while (true) {
    std::size_t enter = tb.cols;
    for (std::size_t j = 0; j < n + m; ++j)
      if (sgn(tb.at(m, j)) < 0) {
        enter = j;
        break;
      }
    if (enter == tb.cols) break;
    std::size_t leave = m;
    mpq_class best;
    for (std::size_t i = 0; i < m; ++i) {
      if (sgn(tb.at(i, enter)) <= 0) continue;
      mpq_class ratio = tb.at(i, n + m) / tb.at(i, enter);
      if (leave == m || ratio < best || (ratio == best && tb.basis[i] < tb.basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == m) break;  // unbounded cannot happen in phase 1
    tb.pivot(leave, enter);
  }
  if (sgn(tb.at(m, n + m)) != 0) return std::nullopt;
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < m; ++i)
    if (tb.basis[i] < n) x[tb.basis[i]] = Rational(tb.at(i, n + m));
  return x;
}

std::optional<std::vector<Rational>> convex_weights(const std::vector<std::vector<Rational>>& points,
                                                    const std::vector<Rational>& target) {
  LinearSystem ls(points.size());
  for (std::size_t d = 0; d < target.size(); ++d) {
    std::map<std::size_t, Rational> row;
    for (std::size_t k = 0; k < points.size(); ++k) row[k] = points[k][d];
    ls.add_row(std::move(row), target[d]);
  }
  std::map<std::size_t, Rational> ones;
  for (std::size_t k = 0; k < points.size(); ++k) ones[k] = Rational(1);
  ls.add_row(std::move(ones), Rational(1));
  return ls.solve();
}

}  // namespace pbisim

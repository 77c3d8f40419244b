#include "pbisim/distribution.hpp"

#include <functional>

namespace pbisim {

Distribution Distribution::dirac(const NdTerm& e) {
  Distribution d;
  d.m_.clear();
  d.m_.emplace(e, Rational(1));
  return d;
}

Distribution Distribution::from_map(Map m) {
  Rational total;
  for (auto it = m.begin(); it != m.end();) {
    if (it->second.sign() < 0) throw WeightSumError("negative mass on " + it->first.str());
    if (it->second.is_zero()) {
      it = m.erase(it);
    } else {
      total += it->second;
      ++it;
    }
  }
  if (!total.is_one()) throw WeightSumError("masses sum to " + total.str() + ", not 1");
  Distribution d;
  d.m_ = std::move(m);
  return d;
}

Rational Distribution::operator[](const NdTerm& e) const {
  auto it = m_.find(e);
  return it == m_.end() ? Rational() : it->second;
}

std::vector<NdTerm> Distribution::support() const {
  std::vector<NdTerm> out;
  out.reserve(m_.size());
  for (auto& [e, _] : m_) out.push_back(e);
  return out;
}

Distribution Distribution::mix(const Rational& r, const Distribution& other) const {
  Map m;
  Rational s = Rational(1) - r;
  if (!r.is_zero())
    for (auto& [e, p] : m_) m[e] += r * p;
  if (!s.is_zero())
    for (auto& [e, p] : other.m_) m[e] += s * p;
  return from_map(std::move(m));
}

std::string Distribution::str() const {
  std::string s = "{";
  bool first = true;
  for (auto& [e, p] : m_) {
    if (!first) s += ", ";
    first = false;
    s += e.str() + " -> " + p.str();
  }
  return s + "}";
}

std::strong_ordering operator<=>(const Distribution& a, const Distribution& b) {
  auto ia = a.m_.begin(), ib = b.m_.begin();
  for (; ia != a.m_.end() && ib != b.m_.end(); ++ia, ++ib) {
    auto c = ia->first <=> ib->first;
    if (c != 0) return c;
    c = ia->second <=> ib->second;
    if (c != 0) return c;
  }
  if (ia == a.m_.end() && ib == b.m_.end()) return std::strong_ordering::equal;
  return ia == a.m_.end() ? std::strong_ordering::less : std::strong_ordering::greater;
}

static void den_into(const PTerm& p, const Rational& scale, Distribution::Map& m) {
  if (p.is_dirac()) {
    m[p.inner()] += scale;
    return;
  }
  den_into(p.left(), scale * p.weight(), m);
  den_into(p.right(), scale * (Rational(1) - p.weight()), m);
}

Distribution den(const PTerm& p) {
  Distribution::Map m;
  den_into(p, Rational(1), m);
  return Distribution::from_map(std::move(m));
}

Distribution convex_sum(const Decomposition& d) {
  Rational total;
  Distribution::Map m;
  for (auto& [w, mu] : d.parts) {
    if (w.sign() < 0) throw WeightSumError("negative weight " + w.str());
    total += w;
    if (w.is_zero()) continue;
    for (auto& [e, p] : mu.entries()) m[e] += w * p;
  }
  if (!total.is_one()) throw WeightSumError("weights sum to " + total.str() + ", not 1");
  return Distribution::from_map(std::move(m));
}

std::vector<std::vector<JointCell>> joint_refinement(const Decomposition& d1, const Decomposition& d2) {
  Distribution xi = convex_sum(d1);
  if (!(xi == convex_sum(d2))) throw MismatchError("decompositions recompose to different distributions");
  // r_ij = sum_E p_i mu_i(E) q_j nu_j(E) / xi(E)
  // rho_ij(E) = p_i mu_i(E) q_j nu_j(E) / (xi(E) r_ij)
  std::vector<std::vector<JointCell>> out(d1.parts.size());
  for (std::size_t i = 0; i < d1.parts.size(); ++i) {
    auto& [p, mu] = d1.parts[i];
    for (std::size_t j = 0; j < d2.parts.size(); ++j) {
      auto& [q, nu] = d2.parts[j];
      Distribution::Map m;
      Rational r;
      if (!p.is_zero() && !q.is_zero()) {
        for (auto& [e, pm] : mu.entries()) {
          Rational qn = nu[e];
          if (qn.is_zero()) continue;
          Rational v = p * pm * q * qn / xi[e];
          m[e] = v;
          r += v;
        }
      }
      if (r.is_zero()) {
        out[i].push_back({Rational(), Distribution::dirac(NdTerm())});
      } else {
        for (auto& [e, v] : m) v /= r;
        out[i].push_back({r, Distribution::from_map(std::move(m))});
      }
    }
  }
  return out;
}

std::uint64_t complexity(const NdTerm& e) { return e.complexity(); }
std::uint64_t complexity(const PTerm& p) { return p.complexity(); }

Rational weight(const Distribution& mu) {
  Rational w;
  for (auto& [e, p] : mu.entries()) w += p * Rational(static_cast<long>(e.complexity()));
  return w;
}

static void der_nd(const NdTerm& e, std::set<NdTerm>& out);

static void der_p(const PTerm& p, std::set<NdTerm>& out) {
  if (p.is_dirac()) {
    der_nd(p.inner(), out);
  } else {
    der_p(p.left(), out);
    der_p(p.right(), out);
  }
}

// der(D(E)) = {E} plus der(P) for every prefix alpha.P that is a summand of E.
static void der_nd(const NdTerm& e, std::set<NdTerm>& out) {
  if (!out.insert(e).second) return;
  for (const NdTerm& s : summands(e))
    if (s.is_prefix()) der_p(s.body(), out);
}

std::set<NdTerm> derivatives(const PTerm& p) {
  std::set<NdTerm> out;
  der_p(p, out);
  return out;
}

std::set<NdTerm> derivatives(const NdTerm& e) {
  std::set<NdTerm> out;
  der_nd(e, out);
  return out;
}

std::set<NdTerm> derivatives(const Distribution& mu) {
  std::set<NdTerm> out;
  for (auto& [e, _] : mu.entries()) der_nd(e, out);
  return out;
}

Rational class_mass(const Distribution& mu, const std::set<NdTerm>& s) {
  Rational m;
  for (auto& [e, p] : mu.entries())
    if (s.count(e)) m += p;
  return m;
}

}  // namespace pbisim

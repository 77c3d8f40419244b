#include "pbisim/semantics.hpp"

#include "pbisim/equivalence.hpp"
#include "pbisim/lp.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace pbisim {

namespace {

struct TransitionCache {
  std::mutex mu;
  std::unordered_map<const detail::Node*, std::vector<StateTransition>> map;
};

TransitionCache& cache() {
  static TransitionCache* c = new TransitionCache();
  return *c;
}

void collect(const NdTerm& src, const NdTerm& e, std::vector<StateTransition>& out) {
  switch (e.tag()) {
    case Tag::Zero: break;
    case Tag::Prefix: out.push_back({src, e.action(), den(e.body())}); break;
    case Tag::Sum:
      collect(src, e.left(), out);
      collect(src, e.right(), out);
      break;
    default: break;
  }
}

}  // namespace

std::vector<StateTransition> nd_transitions(const NdTerm& e) {
  auto& c = cache();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.map.find(e.node());
    if (it != c.map.end()) return it->second;
  }
  std::vector<StateTransition> out;
  collect(e, e, out);
  std::sort(out.begin(), out.end(), [](const StateTransition& a, const StateTransition& b) {
    if (a.action != b.action) return a.action < b.action;
    return a.target < b.target;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::lock_guard<std::mutex> lock(c.mu);
  c.map.emplace(e.node(), out);
  return out;
}

std::vector<StateTransition> nd_transitions(const NdTerm& e, const Action& a) {
  std::vector<StateTransition> out;
  for (auto& t : nd_transitions(e))
    if (t.action == a) out.push_back(t);
  return out;
}

std::set<Action> actions_of(const NdTerm& e) {
  std::set<Action> out;
  for (auto& t : nd_transitions(e)) out.insert(t.action);
  return out;
}

TransitionPolytope transition_polytope(const Distribution& mu, const Action& a) {
  TransitionPolytope poly;
  poly.action = a;
  for (auto& [e, p] : mu.entries()) {
    poly.source_masses[e] = p;
    auto& gens = poly.generators[e];
    for (auto& t : nd_transitions(e, a)) gens.push_back(t.target);
    if (gens.empty()) poly.empty = true;
  }
  return poly;
}

TransitionPolytope partial_tau_successors(const Distribution& mu) {
  TransitionPolytope poly;
  poly.action = Action::tau();
  for (auto& [e, p] : mu.entries()) {
    poly.source_masses[e] = p;
    auto& gens = poly.generators[e];
    gens.push_back(Distribution::dirac(e));
    for (auto& t : nd_transitions(e, Action::tau())) gens.push_back(t.target);
  }
  return poly;
}

TransitionPolytope partial_polytope(const Distribution& mu, const Action& a) {
  return a.is_tau() ? partial_tau_successors(mu) : transition_polytope(mu, a);
}

namespace {

// Variables lambda_{E,k}: mass of E sent along its k-th generator.
struct PolyLp {
  LinearSystem ls;
  std::vector<std::pair<std::size_t, const Distribution*>> var_gen;

  explicit PolyLp(const TransitionPolytope& poly) {
    for (auto& [e, gens] : poly.generators) {
      std::map<std::size_t, Rational> row;
      for (auto& g : gens) {
        std::size_t v = ls.add_var();
        var_gen.push_back({v, &g});
        row[v] = Rational(1);
      }
      ls.add_row(std::move(row), poly.source_masses.at(e));
    }
  }
};

}  // namespace

bool polytope_contains(const TransitionPolytope& poly, const Distribution& nu) {
  if (poly.empty) return false;
  PolyLp lp(poly);
  std::set<NdTerm> states;
  for (auto& [v, g] : lp.var_gen)
    for (auto& [e, _] : g->entries()) states.insert(e);
  for (auto& [e, _] : nu.entries())
    if (!states.count(e)) return false;
  for (auto& s : states) {
    std::map<std::size_t, Rational> row;
    for (auto& [v, g] : lp.var_gen) {
      Rational m = (*g)[s];
      if (!m.is_zero()) row[v] = m;
    }
    lp.ls.add_row(std::move(row), nu[s]);
  }
  return lp.ls.feasible();
}

Partition::Partition(std::vector<std::vector<NdTerm>> classes) : classes_(std::move(classes)) {
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (classes_[c].empty()) throw std::invalid_argument("empty class");
    for (auto& e : classes_[c])
      if (!index_.emplace(e, c).second) throw std::invalid_argument("classes overlap at " + e.str());
  }
}

std::size_t Partition::class_of(const NdTerm& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) throw std::out_of_range("state outside partition: " + e.str());
  return it->second;
}

std::set<NdTerm> Partition::universe() const {
  std::set<NdTerm> out;
  for (auto& [e, _] : index_) out.insert(e);
  return out;
}

std::set<NdTerm> Partition::class_set(std::size_t c) const {
  return std::set<NdTerm>(classes_.at(c).begin(), classes_.at(c).end());
}

Signature signature(const Distribution& mu, const Partition& p) {
  Signature s;
  for (auto& [e, m] : mu.entries()) s[p.class_of(e)] += m;
  return s;
}

bool polytope_matches_signature(const TransitionPolytope& poly, const Partition& p, const Signature& target) {
  if (poly.empty) return false;
  PolyLp lp(poly);
  std::map<std::size_t, std::map<std::size_t, Rational>> rows;
  for (auto& [v, g] : lp.var_gen)
    for (auto& [e, m] : g->entries()) rows[p.class_of(e)][v] += m;
  for (auto& [c, _] : target) rows[c];
  for (auto& [c, row] : rows) {
    auto it = target.find(c);
    lp.ls.add_row(std::move(row), it == target.end() ? Rational() : it->second);
  }
  return lp.ls.feasible();
}

namespace {

void vertices_of(const Distribution& g, std::vector<Distribution>& out) {
  std::vector<std::pair<Rational, std::vector<Distribution>>> choices;
  for (auto& [e, p] : g.entries()) {
    std::vector<Distribution> opts{Distribution::dirac(e)};
    for (auto& t : nd_transitions(e, Action::tau())) opts.push_back(t.target);
    choices.push_back({p, std::move(opts)});
  }
  std::vector<std::size_t> idx(choices.size(), 0);
  while (true) {
    Distribution::Map m;
    for (std::size_t i = 0; i < choices.size(); ++i)
      for (auto& [e, q] : choices[i].second[idx[i]].entries()) m[e] += choices[i].first * q;
    out.push_back(Distribution::from_map(std::move(m)));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == choices[i].second.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
}

bool in_hull(const std::vector<Distribution>& gens, std::size_t skip, const Distribution& nu) {
  std::set<NdTerm> states;
  for (std::size_t k = 0; k < gens.size(); ++k)
    if (k != skip)
      for (auto& [e, _] : gens[k].entries()) states.insert(e);
  for (auto& [e, _] : nu.entries())
    if (!states.count(e)) return false;
  LinearSystem ls;
  std::vector<std::size_t> var(gens.size());
  std::map<std::size_t, Rational> ones;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    if (k == skip) continue;
    var[k] = ls.add_var();
    ones[var[k]] = Rational(1);
  }
  if (ones.empty()) return false;
  ls.add_row(std::move(ones), Rational(1));
  for (auto& s : states) {
    std::map<std::size_t, Rational> row;
    for (std::size_t k = 0; k < gens.size(); ++k)
      if (k != skip) {
        Rational m = gens[k][s];
        if (!m.is_zero()) row[var[k]] = m;
      }
    ls.add_row(std::move(row), nu[s]);
  }
  return ls.feasible();
}

}  // namespace

WeakClosure weak_closure(const Distribution& mu) {
  std::set<Distribution> seen{mu};
  std::vector<Distribution> frontier{mu};
  while (!frontier.empty()) {
    std::vector<Distribution> next;
    for (auto& g : frontier) {
      std::vector<Distribution> vs;
      vertices_of(g, vs);
      for (auto& v : vs)
        if (seen.insert(v).second) next.push_back(v);
    }
    frontier = std::move(next);
  }
  std::vector<Distribution> gens(seen.begin(), seen.end());
  // Drop generators inside the hull of the others; the source always stays.
  for (std::size_t k = gens.size(); k-- > 0;) {
    if (gens[k] == mu) continue;
    if (in_hull(gens, k, gens[k])) gens.erase(gens.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return WeakClosure{mu, std::move(gens)};
}

bool weak_closure_contains(const WeakClosure& wc, const Distribution& nu) {
  return in_hull(wc.generators, wc.generators.size(), nu);
}

bool weak_reachable(const Distribution& mu, const Distribution& nu) {
  std::set<NdTerm> states = derivatives(mu);
  for (auto& [e, _] : nu.entries())
    if (!states.count(e)) return false;
  LinearSystem ls;
  // per state: sum of outflow + stop = mu(G) + inflow; stop = nu(G)
  std::map<NdTerm, std::map<std::size_t, Rational>> balance;
  for (auto& g : states) {
    for (auto& t : nd_transitions(g, Action::tau())) {
      std::size_t f = ls.add_var();
      balance[g][f] += Rational(1);
      for (auto& [h, m] : t.target.entries()) balance[h][f] -= m;
    }
  }
  for (auto& g : states) ls.add_row(balance[g], mu[g] - nu[g]);
  return ls.feasible();
}

}  // namespace pbisim

#include "pbisim/equivalence.hpp"

#include "pbisim/lp.hpp"

#include <algorithm>
#include <functional>

namespace pbisim {

namespace {

void accumulate(SigVec& acc, const SigVec& s, const Rational& w) {
  for (auto& [k, v] : s) {
    Rational& slot = acc[k];
    slot += w * v;
    if (slot.is_zero()) acc.erase(k);
  }
}

std::set<std::size_t> keys_of(const std::vector<const SigVec*>& sigs) {
  std::set<std::size_t> out;
  for (auto* s : sigs)
    for (auto& [k, _] : *s) out.insert(k);
  return out;
}

Rational get(const SigVec& s, std::size_t k) {
  auto it = s.find(k);
  return it == s.end() ? Rational() : it->second;
}

}  // namespace

void BranchingEngine::add(const NdTerm& e) {
  if (states_.count(e.node())) return;
  for (auto& t : nd_transitions(e))
    for (auto& [g, _] : t.target.entries()) add(g);
  classify(e);
}

void BranchingEngine::add(const Distribution& mu) {
  for (auto& [e, _] : mu.entries()) add(e);
}

BranchingEngine::StateInfo& BranchingEngine::info(const NdTerm& e) {
  add(e);
  return states_.at(e.node());
}

std::size_t BranchingEngine::class_of(const NdTerm& e) { return info(e).cls; }
const SigVec& BranchingEngine::sig(const NdTerm& e) { return info(e).sig; }
bool BranchingEngine::is_stable(const NdTerm& e) { return info(e).stable; }
const std::vector<Distribution>& BranchingEngine::inert_targets(const NdTerm& e) { return info(e).inert; }

SigVec BranchingEngine::sig(const Distribution& mu) {
  SigVec out;
  for (auto& [e, m] : mu.entries()) accumulate(out, sig(e), m);
  return out;
}

bool BranchingEngine::is_inert(const NdTerm& e, const Distribution& target) {
  auto& in = info(e).inert;
  return std::find(in.begin(), in.end(), target) != in.end();
}

bool BranchingEngine::weak_match(const Distribution& rho, const Action& a, const SigVec& target) {
  add(rho);
  // States reachable from the support through inert steps.
  std::vector<NdTerm> states;
  std::set<NdTerm> seen;
  std::vector<NdTerm> stack;
  for (auto& [g, _] : rho.entries()) stack.push_back(g);
  while (!stack.empty()) {
    NdTerm g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) continue;
    states.push_back(g);
    for (auto& t : info(g).inert)
      for (auto& [h, _] : t.entries()) stack.push_back(h);
  }

  LinearSystem ls;
  std::map<NdTerm, std::map<std::size_t, Rational>> balance;
  std::vector<std::pair<std::size_t, SigVec>> exits;  // var, sig of where it lands
  for (auto& g : states) {
    for (auto& t : info(g).inert) {
      std::size_t f = ls.add_var();
      balance[g][f] += Rational(1);
      for (auto& [h, m] : t.entries()) balance[h][f] -= m;
    }
    for (auto& u : nd_transitions(g, a)) {
      std::size_t v = ls.add_var();
      balance[g][v] += Rational(1);
      exits.push_back({v, sig(u.target)});
    }
    if (a.is_tau()) {
      std::size_t k = ls.add_var();
      balance[g][k] += Rational(1);
      exits.push_back({k, sig(g)});
    }
  }
  if (exits.empty()) return false;
  for (auto& g : states) ls.add_row(balance[g], rho[g]);
  std::vector<const SigVec*> all{&target};
  for (auto& [_, s] : exits) all.push_back(&s);
  for (std::size_t key : keys_of(all)) {
    std::map<std::size_t, Rational> row;
    for (auto& [v, s] : exits) {
      Rational c = get(s, key);
      if (!c.is_zero()) row[v] = c;
    }
    ls.add_row(std::move(row), get(target, key));
  }
  return ls.feasible();
}

bool BranchingEngine::direct_match(const NdTerm& g, const Action& a, const SigVec& target, const SigVec* stay_sig) {
  std::vector<SigVec> gens;
  for (auto& u : nd_transitions(g, a)) gens.push_back(sig(u.target));
  if (stay_sig) gens.push_back(*stay_sig);
  if (gens.empty()) return false;
  LinearSystem ls(gens.size());
  std::map<std::size_t, Rational> ones;
  for (std::size_t k = 0; k < gens.size(); ++k) ones[k] = Rational(1);
  ls.add_row(std::move(ones), Rational(1));
  std::vector<const SigVec*> all{&target};
  for (auto& s : gens) all.push_back(&s);
  for (std::size_t key : keys_of(all)) {
    std::map<std::size_t, Rational> row;
    for (std::size_t k = 0; k < gens.size(); ++k) {
      Rational c = get(gens[k], key);
      if (!c.is_zero()) row[k] = c;
    }
    ls.add_row(std::move(row), get(target, key));
  }
  return ls.feasible();
}

bool BranchingEngine::transfers(const NdTerm& from, const NdTerm& to, const SigVec& hyp) {
  for (auto& u : nd_transitions(from)) {
    if (!direct_match(to, u.action, sig(u.target), u.action.is_tau() ? &hyp : nullptr)) return false;
  }
  return true;
}

void BranchingEngine::classify(const NdTerm& e) {
  auto trans = nd_transitions(e);
  StateInfo si;
  for (auto& t : trans) {
    if (!t.action.is_tau()) continue;
    bool ok = true;
    for (auto& u : trans) {
      if (u.action.is_tau() && u.target == t.target) continue;
      if (!weak_match(t.target, u.action, sig(u.target))) {
        ok = false;
        break;
      }
    }
    if (ok) si.inert.push_back(t.target);
  }

  if (!si.inert.empty()) {
    si.stable = false;
    si.sig = sig(si.inert.front());
    auto it = by_sig_.find(si.sig);
    if (it != by_sig_.end()) {
      si.cls = it->second;
    } else {
      si.cls = classes_.size();
      ClassInfo ci;
      ci.sig = si.sig;
      classes_.push_back(std::move(ci));
      by_sig_[si.sig] = si.cls;
    }
    classes_[si.cls].members.push_back(e);
    states_.emplace(e.node(), std::move(si));
    return;
  }

  std::set<Action> visible;
  bool has_tau = false;
  for (auto& t : trans) {
    if (t.action.is_tau())
      has_tau = true;
    else
      visible.insert(t.action);
  }
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    if (!classes_[c].stable_rep || classes_[c].has_tau != has_tau || classes_[c].visible != visible) continue;
    NdTerm rep = *classes_[c].stable_rep;
    SigVec hyp{{c, Rational(1)}};
    if (transfers(e, rep, hyp) && transfers(rep, e, hyp)) {
      si.cls = c;
      si.sig = hyp;
      classes_[c].members.push_back(e);
      states_.emplace(e.node(), std::move(si));
      return;
    }
  }
  si.cls = classes_.size();
  si.sig = SigVec{{si.cls, Rational(1)}};
  ClassInfo ci;
  ci.members.push_back(e);
  ci.stable_rep = e;
  ci.sig = si.sig;
  ci.visible = visible;
  ci.has_tau = has_tau;
  classes_.push_back(std::move(ci));
  by_sig_[si.sig] = si.cls;
  states_.emplace(e.node(), std::move(si));
}

const Distribution& BranchingEngine::stab(const NdTerm& e) {
  StateInfo& si = info(e);
  if (si.stab) return *si.stab;
  if (si.stable) {
    si.stab = Distribution::dirac(e);
    return *si.stab;
  }
  std::optional<Distribution> best;
  Rational best_w;
  auto inert = si.inert;
  for (auto& rho : inert) {
    Distribution cand = stab(rho);
    Rational w = weight(cand);
    if (!best || w < best_w || (w == best_w && cand < *best)) {
      best = cand;
      best_w = w;
    }
  }
  StateInfo& again = states_.at(e.node());
  again.stab = *best;
  return *again.stab;
}

Distribution BranchingEngine::stab(const Distribution& mu) {
  Distribution::Map m;
  for (auto& [e, p] : mu.entries())
    for (auto& [g, q] : stab(e).entries()) m[g] += p * q;
  return Distribution::from_map(std::move(m));
}

std::string BranchingEngine::class_name(std::size_t c) const {
  const ClassInfo& ci = classes_.at(c);
  std::optional<NdTerm> best;
  for (auto& m : ci.members) {
    auto it = states_.find(m.node());
    if (ci.stable_rep && !it->second.stable) continue;
    if (!best || m < *best) best = m;
  }
  return best->str();
}

NamedSignature BranchingEngine::named(const SigVec& s) const {
  NamedSignature out;
  for (auto& [k, v] : s) out[class_name(k)] += v;
  return out;
}

BranchingPartition::BranchingPartition(std::shared_ptr<BranchingEngine> engine, const std::set<NdTerm>& universe)
    : engine_(std::move(engine)) {
  std::map<std::size_t, std::vector<NdTerm>> groups;
  for (auto& e : universe) groups[engine_->class_of(e)].push_back(e);
  std::vector<std::vector<NdTerm>> classes;
  for (auto& [_, members] : groups) classes.push_back(std::move(members));
  partition_ = Partition(std::move(classes));
}

Distribution stabilize(const Distribution& mu, const BranchingPartition& p) { return p.engine().stab(mu); }

// ---------------------------------------------------------------- strong

namespace {

std::set<NdTerm> closure(const std::set<NdTerm>& roots) {
  std::set<NdTerm> out;
  for (auto& r : roots)
    for (auto& d : derivatives(r)) out.insert(d);
  return out;
}

bool strong_transfers(const NdTerm& from, const NdTerm& to, const Partition& p) {
  for (auto& u : nd_transitions(from)) {
    TransitionPolytope poly = transition_polytope(Distribution::dirac(to), u.action);
    if (!polytope_matches_signature(poly, p, signature(u.target, p))) return false;
  }
  return true;
}

template <class Same>
std::vector<std::vector<NdTerm>> group(const std::vector<NdTerm>& members, Same same) {
  std::vector<std::vector<NdTerm>> groups;
  for (auto& e : members) {
    bool placed = false;
    for (auto& g : groups)
      if (same(e, g.front())) {
        g.push_back(e);
        placed = true;
        break;
      }
    if (!placed) groups.push_back({e});
  }
  return groups;
}

std::string class_label(const Partition& p, std::size_t c) { return p.classes()[c].front().str(); }

NamedSignature named_signature(const Distribution& mu, const Partition& p) {
  NamedSignature out;
  for (auto& [c, m] : signature(mu, p)) out[class_label(p, c)] += m;
  return out;
}

}  // namespace

Partition strong_partition(const std::set<NdTerm>& roots) {
  std::set<NdTerm> u = closure(roots);
  Partition p({std::vector<NdTerm>(u.begin(), u.end())});
  while (true) {
    std::vector<std::vector<NdTerm>> next;
    for (auto& cls : p.classes()) {
      auto groups = group(cls, [&](const NdTerm& a, const NdTerm& b) {
        return actions_of(a) == actions_of(b) && strong_transfers(a, b, p) && strong_transfers(b, a, p);
      });
      for (auto& g : groups) next.push_back(std::move(g));
    }
    bool stable = next.size() == p.size();
    p = Partition(std::move(next));
    if (stable) return p;
  }
}

Verdict strong_equiv(const Distribution& mu, const Distribution& nu) {
  std::set<NdTerm> roots;
  for (auto& [e, _] : mu.entries()) roots.insert(e);
  for (auto& [e, _] : nu.entries()) roots.insert(e);
  Partition p = strong_partition(roots);
  Verdict v;
  v.relation = "strong";
  v.equivalent = signature(mu, p) == signature(nu, p);
  if (!v.equivalent) v.witness = Witness{{}, named_signature(mu, p), named_signature(nu, p)};
  return v;
}

Verdict strong_equiv(const PTerm& p, const PTerm& q) { return strong_equiv(den(p), den(q)); }

// ------------------------------------------------------------- branching

BranchingPartition branching_partition(const std::set<NdTerm>& roots, std::shared_ptr<BranchingEngine> engine) {
  if (!engine) engine = std::make_shared<BranchingEngine>();
  std::set<NdTerm> u = closure(roots);
  for (auto& e : u) engine->add(e);
  return BranchingPartition(engine, u);
}

Verdict branching_equiv(const Distribution& mu, const Distribution& nu, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  SigVec a = en.sig(mu), b = en.sig(nu);
  Verdict v;
  v.relation = "branching";
  v.equivalent = a == b;
  if (!v.equivalent) v.witness = Witness{{}, en.named(a), en.named(b)};
  return v;
}

Verdict branching_equiv(const PTerm& p, const PTerm& q, BranchingEngine* engine) {
  return branching_equiv(den(p), den(q), engine);
}

// ---------------------------------------------------------------- rooted

namespace {

// First transition of `from` that `to` cannot match with a full step.
std::optional<StateTransition> rooted_refuter(const NdTerm& from, const NdTerm& to, BranchingEngine& en) {
  for (auto& u : nd_transitions(from))
    if (!en.direct_match(to, u.action, en.sig(u.target), nullptr)) return u;
  return std::nullopt;
}

}  // namespace

Verdict rooted_branching_equiv_states(const NdTerm& e, const NdTerm& f, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  Verdict v;
  v.relation = "rooted-branching";
  for (int side = 0; side < 2; ++side) {
    const NdTerm& a = side == 0 ? e : f;
    const NdTerm& b = side == 0 ? f : e;
    auto bad = rooted_refuter(a, b, en);
    if (!bad) continue;
    v.equivalent = false;
    Witness w;
    w.action_path = {bad->action.name()};
    NamedSignature mine = en.named(en.sig(bad->target));
    NamedSignature other;
    auto theirs = nd_transitions(b, bad->action);
    if (!theirs.empty()) other = en.named(en.sig(theirs.front().target));
    w.left = side == 0 ? mine : other;
    w.right = side == 0 ? other : mine;
    v.witness = std::move(w);
    return v;
  }
  return v;
}

Partition rooted_partition(const std::set<NdTerm>& roots, BranchingEngine& en) {
  std::set<NdTerm> u = closure(roots);
  std::vector<NdTerm> all(u.begin(), u.end());
  auto groups = group(all, [&](const NdTerm& a, const NdTerm& b) {
    return actions_of(a) == actions_of(b) && !rooted_refuter(a, b, en) && !rooted_refuter(b, a, en);
  });
  return Partition(std::move(groups));
}

Verdict rooted_branching_equiv(const PTerm& p, const PTerm& q, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  Distribution mu = den(p), nu = den(q);
  std::set<NdTerm> roots;
  for (auto& [e, _] : mu.entries()) roots.insert(e);
  for (auto& [e, _] : nu.entries()) roots.insert(e);
  // Only support states matter for the class masses.
  std::vector<NdTerm> all(roots.begin(), roots.end());
  auto groups = group(all, [&](const NdTerm& a, const NdTerm& b) {
    return actions_of(a) == actions_of(b) && !rooted_refuter(a, b, en) && !rooted_refuter(b, a, en);
  });
  Partition part(std::move(groups));
  Verdict v;
  v.relation = "rooted-branching";
  v.equivalent = signature(mu, part) == signature(nu, part);
  if (!v.equivalent) v.witness = Witness{{}, named_signature(mu, part), named_signature(nu, part)};
  return v;
}

// ------------------------------------------------------------- inertness

Inertness inertness(const NdTerm& e, const StateTransition& t, BranchingEngine& en) {
  if (!(t.source == e) || !t.action.is_tau()) throw ArgumentError("not a tau-transition of " + e.str());
  auto taus = nd_transitions(e, Action::tau());
  if (std::find(taus.begin(), taus.end(), t) == taus.end()) throw ArgumentError("not a tau-transition of " + e.str());
  Inertness out;
  const SigVec& mine = en.sig(e);
  if (en.sig(t.target) == mine) {
    out.kind = Inertness::Inert;
    out.r = Rational(1);
    return out;
  }
  std::size_t c = en.class_of(e);
  Rational r;
  for (auto& [g, m] : t.target.entries())
    if (en.class_of(g) == c) r += m;
  if (r.sign() > 0) {
    out.kind = Inertness::PartiallyInert;
    out.r = r;
  }
  return out;
}

Inertness inertness(const NdTerm& e, const StateTransition& t, const BranchingPartition& p) {
  return inertness(e, t, p.engine());
}

bool is_concrete(const PTerm& p, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  for (auto& d : derivatives(p))
    for (auto& t : nd_transitions(d, Action::tau()))
      if (inertness(d, t, en).kind != Inertness::Neither) return false;
  return true;
}

bool is_concrete(const NdTerm& e, BranchingEngine* engine) { return is_concrete(PTerm::dirac(e), engine); }

bool is_rigid(const NdTerm& e, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  for (auto& t : nd_transitions(e, Action::tau()))
    if (inertness(e, t, en).kind == Inertness::Inert) return false;
  return true;
}

// --------------------------------------------------------------- sqsubseteq

bool sqsubseteq(const NdTerm& e, const PTerm& p, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  Distribution mu = den(p);
  en.add(mu);
  for (auto& u : nd_transitions(e)) {
    SigVec target = en.sig(u.target);
    // Split each support state's mass over its a-transitions (or a stay, for tau).
    LinearSystem ls;
    std::vector<std::pair<std::size_t, SigVec>> exits;
    bool stuck = false;
    for (auto& [g, m] : mu.entries()) {
      std::map<std::size_t, Rational> row;
      for (auto& w : nd_transitions(g, u.action)) {
        std::size_t v = ls.add_var();
        row[v] = Rational(1);
        exits.push_back({v, en.sig(w.target)});
      }
      if (u.action.is_tau()) {
        std::size_t v = ls.add_var();
        row[v] = Rational(1);
        exits.push_back({v, en.sig(g)});
      }
      if (row.empty()) {
        stuck = true;
        break;
      }
      ls.add_row(std::move(row), m);
    }
    if (stuck) return false;
    std::vector<const SigVec*> all{&target};
    for (auto& [_, s] : exits) all.push_back(&s);
    for (std::size_t key : keys_of(all)) {
      std::map<std::size_t, Rational> row;
      for (auto& [v, s] : exits) {
        Rational c = get(s, key);
        if (!c.is_zero()) row[v] = c;
      }
      ls.add_row(std::move(row), get(target, key));
    }
    if (!ls.feasible()) return false;
  }
  return true;
}

}  // namespace pbisim

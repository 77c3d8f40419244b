#include "pbisim/harness.hpp"

#include "pbisim/lp.hpp"
#include "pbisim/prover.hpp"
#include "pbisim/semantics.hpp"

#include <algorithm>
#include <functional>

namespace pbisim {

// ------------------------------------------------------------- generation

bool TermGen::chance(const Rational& r) {
  if (r.sign() <= 0) return false;
  if (r >= Rational(1)) return true;
  std::uint64_t d = r.den().get_ui(), n = r.num().get_ui();
  return below(d) < n;
}

Rational TermGen::weight() {
  long d = 2 + static_cast<long>(below(std::max(1u, cfg_.weight_denominator_bound - 1)));
  long n = 1 + static_cast<long>(below(static_cast<std::uint64_t>(d - 1)));
  return Rational(n, d);
}

Action TermGen::action() {
  if (chance(cfg_.tau_bias) || cfg_.alphabet.empty()) return Action::tau();
  return cfg_.alphabet[below(cfg_.alphabet.size())];
}

NdTerm TermGen::nd(unsigned budget) {
  if (budget < 2) return NdTerm::zero();
  std::uint64_t k = below(10);
  if (k == 0) return NdTerm::zero();
  if (k >= 6 && budget >= 4) {
    unsigned b1 = 2 + static_cast<unsigned>(below(budget - 3));
    NdTerm l = nd(b1);
    if (below(6) == 0 && 2 * l.complexity() <= budget) return NdTerm::sum(l, l);
    return NdTerm::sum(l, nd(budget - b1));
  }
  Action a = action();
  return NdTerm::prefix(a, p(budget - 1));
}

PTerm TermGen::p(unsigned budget) {
  if (budget < 1) budget = 1;
  if (budget >= 4 && below(5) < 2) {
    unsigned b1 = 2 + static_cast<unsigned>(below(budget - 3));
    PTerm l = p(b1);
    if (below(6) == 0 && 2 * l.complexity() <= budget) return PTerm::choice(l, weight(), l);
    return PTerm::choice(l, weight(), p(budget - b1));
  }
  return PTerm::dirac(nd(budget - 1));
}

NdTerm gen_nd(const GenConfig& cfg) {
  TermGen g(cfg);
  return g.nd(cfg.max_complexity);
}

PTerm gen_p(const GenConfig& cfg) {
  TermGen g(cfg);
  return g.p(std::max(1u, cfg.max_complexity));
}

// ------------------------------------------------------- brute-force oracle

namespace {

using Vec = std::vector<Rational>;

// A guess: stable states split into classes, and for every other state a
// stable distribution it settles to. vec(x) is the class-mass vector of
// x's guess; related distributions are those with equal vectors.
struct Guess {
  std::size_t k = 0;
  std::map<NdTerm, Vec> vec;
  std::map<NdTerm, Distribution> settle;  // unstable states only

  Vec of(const Distribution& mu) const {
    Vec out(k);
    for (auto& [x, m] : mu.entries()) {
      const Vec& v = vec.at(x);
      for (std::size_t c = 0; c < k; ++c) out[c] += m * v[c];
    }
    return out;
  }
};

class Oracle {
public:
  explicit Oracle(std::vector<NdTerm> states) : states_(std::move(states)) {}

  const std::vector<Distribution>& closure(const Distribution& mu) {
    auto it = closures_.find(mu);
    if (it == closures_.end()) it = closures_.emplace(mu, weak_closure(mu).generators).first;
    return it->second;
  }

  // Is there nu_bar in the weak closure of rho with vector `stay` that takes
  // a partial a-step to a distribution with vector `target`?
  bool match(const Distribution& rho, const Action& a, const Vec& stay, const Vec& target, const Guess& g) {
    LinearSystem ls;
    std::map<std::size_t, Rational> sum_row;
    std::vector<std::map<std::size_t, Rational>> stay_rows(g.k), target_rows(g.k);
    for (const auto& gen : closure(rho)) {
      std::size_t l = ls.add_var();
      sum_row[l] = Rational(1);
      Vec gv = g.of(gen);
      for (std::size_t c = 0; c < g.k; ++c)
        if (!gv[c].is_zero()) stay_rows[c][l] = gv[c];
      for (auto& [x, m] : gen.entries()) {
        std::map<std::size_t, Rational> row;
        row[l] = -m;
        std::vector<Distribution> options;
        for (auto& tr : nd_transitions(x, a)) options.push_back(tr.target);
        if (a.is_tau()) options.push_back(Distribution::dirac(x));
        for (auto& o : options) {
          std::size_t y = ls.add_var();
          row[y] = Rational(1);
          Vec ov = g.of(o);
          for (std::size_t c = 0; c < g.k; ++c)
            if (!ov[c].is_zero()) target_rows[c][y] += ov[c];
        }
        ls.add_row(row, Rational(0));
      }
    }
    ls.add_row(sum_row, Rational(1));
    for (std::size_t c = 0; c < g.k; ++c) ls.add_row(stay_rows[c], stay[c]);
    for (std::size_t c = 0; c < g.k; ++c) ls.add_row(target_rows[c], target[c]);
    return ls.feasible();
  }

  // Every transition of every state is matched by each state with the same
  // vector, and by the distribution an unstable state settles to.
  bool transfers(const Guess& g) {
    for (auto& s : states_) {
      const Vec& vs = g.vec.at(s);
      std::vector<Distribution> partners;
      for (auto& t : states_)
        if (!(t == s) && g.vec.at(t) == vs) partners.push_back(Distribution::dirac(t));
      if (auto it = g.settle.find(s); it != g.settle.end()) partners.push_back(it->second);
      for (auto& tr : nd_transitions(s)) {
        Vec target = g.of(tr.target);
        for (auto& rho : partners)
          if (!match(rho, tr.action, vs, target, g)) return false;
      }
    }
    return true;
  }

private:
  std::vector<NdTerm> states_;
  std::map<Distribution, std::vector<Distribution>> closures_;
};

// Restricted growth strings enumerate the set partitions of n items.
bool next_partition(std::vector<std::size_t>& rgs) {
  for (std::size_t i = rgs.size(); i-- > 1;) {
    std::size_t m = *std::max_element(rgs.begin(), rgs.begin() + static_cast<std::ptrdiff_t>(i));
    if (rgs[i] <= m) {
      ++rgs[i];
      std::fill(rgs.begin() + static_cast<std::ptrdiff_t>(i) + 1, rgs.end(), 0);
      return true;
    }
  }
  return false;
}

}  // namespace

Verdict brute_force_branching(const Distribution& mu, const Distribution& nu, std::size_t state_bound) {
  std::set<NdTerm> u = derivatives(mu);
  for (auto& e : derivatives(nu)) u.insert(e);
  if (u.size() > state_bound)
    throw BoundExceeded(std::to_string(u.size()) + " derivative states exceed the bound of " +
                        std::to_string(state_bound));
  std::vector<NdTerm> states(u.begin(), u.end());
  const std::size_t n = states.size();
  Oracle oracle(states);

  Verdict v;
  v.relation = "branching";
  v.equivalent = false;

  // States without a tau-step are always stable.
  std::size_t forced = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (nd_transitions(states[i], Action::tau()).empty()) forced |= std::size_t(1) << i;

  for (std::size_t mask = (std::size_t(1) << n); mask-- > 0;) {
    if ((mask & forced) != forced) continue;
    std::vector<NdTerm> stable, rest;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? stable : rest).push_back(states[i]);
    std::set<NdTerm> stable_set(stable.begin(), stable.end());
    std::vector<std::size_t> rgs(stable.size(), 0);
    do {
      Guess g;
      g.k = stable.empty() ? 0 : *std::max_element(rgs.begin(), rgs.end()) + 1;
      std::map<NdTerm, std::size_t> label;
      for (std::size_t i = 0; i < stable.size(); ++i) {
        label.emplace(stable[i], rgs[i]);
        Vec unit(g.k);
        unit[rgs[i]] = Rational(1);
        g.vec.emplace(stable[i], unit);
      }
      // Settling candidates: closure vertices supported on stable states,
      // one per distinct class-mass vector.
      std::vector<std::vector<std::pair<Distribution, Vec>>> options;
      bool possible = true;
      for (auto& x : rest) {
        std::vector<std::pair<Distribution, Vec>> opts;
        for (auto& gen : oracle.closure(Distribution::dirac(x))) {
          bool inside = true;
          for (auto& [y, m] : gen.entries()) inside = inside && stable_set.count(y);
          if (!inside) continue;
          Vec cm(g.k);
          for (auto& [y, m] : gen.entries()) cm[label.at(y)] += m;
          if (std::none_of(opts.begin(), opts.end(), [&](auto& o) { return o.second == cm; }))
            opts.emplace_back(gen, cm);
        }
        if (opts.empty()) possible = false;
        options.push_back(std::move(opts));
      }
      if (!possible) continue;
      std::vector<std::size_t> pick(rest.size(), 0);
      for (;;) {
        Guess h = g;
        for (std::size_t i = 0; i < rest.size(); ++i) {
          h.vec[rest[i]] = options[i][pick[i]].second;
          h.settle.emplace(rest[i], options[i][pick[i]].first);
        }
        if (h.of(mu) == h.of(nu) && oracle.transfers(h)) {
          v.equivalent = true;
          return v;
        }
        std::size_t i = 0;
        while (i < rest.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == rest.size()) break;
      }
    } while (next_partition(rgs));
  }
  return v;
}

// ----------------------------------------------------- random axiom steps

namespace {

Tag tag_of(const Term& t) { return t.is_nd() ? t.nd().tag() : t.p().tag(); }

void collect(const Term& t, Position& at, std::vector<std::pair<Position, Term>>& out) {
  out.emplace_back(at, t);
  auto down = [&](int i, const Term& c) {
    at.push_back(i);
    collect(c, at, out);
    at.pop_back();
  };
  switch (tag_of(t)) {
    case Tag::Zero: break;
    case Tag::Prefix: down(0, t.nd().body()); break;
    case Tag::Sum:
      down(0, t.nd().left());
      down(1, t.nd().right());
      break;
    case Tag::Dirac: down(0, t.p().inner()); break;
    case Tag::PChoice:
      down(0, t.p().left());
      down(1, t.p().right());
      break;
  }
}

struct Cand {
  Direction d;
  Substitution s;
};

Substitution nd3(const NdTerm& e, const NdTerm& f, const NdTerm& g) {
  Substitution s;
  s.nd.emplace("E", e);
  s.nd.emplace("F", f);
  s.nd.emplace("G", g);
  return s;
}
Substitution nd2(const NdTerm& e, const NdTerm& f) {
  Substitution s;
  s.nd.emplace("E", e);
  s.nd.emplace("F", f);
  return s;
}
Substitution nd1(const NdTerm& e) {
  Substitution s;
  s.nd.emplace("E", e);
  return s;
}

std::vector<NdTerm> summand_pool(const PTerm& p) {
  std::vector<NdTerm> out{NdTerm::zero()};
  Distribution mu = den(p);
  for (auto& [g, _] : mu.entries())
    for (auto& h : summands(g))
      if (!h.is_zero()) out.push_back(h);
  return out;
}

std::vector<Cand> candidates(AxiomId id, const Term& sub, TermGen& gen, BranchingEngine& en) {
  std::vector<Cand> out;
  const bool nd = sub.is_nd();
  const Tag tg = tag_of(sub);
  switch (id) {
    case AxiomId::A1:
      if (tg == Tag::Sum) out.push_back({Direction::LR, nd2(sub.nd().left(), sub.nd().right())});
      break;
    case AxiomId::A2:
      if (tg == Tag::Sum) {
        NdTerm e = sub.nd();
        if (e.left().is_sum()) out.push_back({Direction::LR, nd3(e.left().left(), e.left().right(), e.right())});
        if (e.right().is_sum()) out.push_back({Direction::RL, nd3(e.left(), e.right().left(), e.right().right())});
      }
      break;
    case AxiomId::A3:
      if (tg == Tag::Sum && sub.nd().left() == sub.nd().right()) out.push_back({Direction::LR, nd1(sub.nd().left())});
      if (nd) out.push_back({Direction::RL, nd1(sub.nd())});
      break;
    case AxiomId::A4:
      if (tg == Tag::Sum && sub.nd().right().is_zero()) out.push_back({Direction::LR, nd1(sub.nd().left())});
      if (nd) out.push_back({Direction::RL, nd1(sub.nd())});
      break;
    case AxiomId::P1:
      if (tg == Tag::PChoice) {
        Substitution s;
        s.p.emplace("P", sub.p().left());
        s.p.emplace("Q", sub.p().right());
        s.num.emplace("r", sub.p().weight());
        out.push_back({Direction::LR, s});
      }
      break;
    case AxiomId::P2:
      if (tg == Tag::PChoice) {
        PTerm p = sub.p();
        if (p.right().is_choice()) {
          Substitution s;
          s.p.emplace("P", p.left());
          s.p.emplace("Q", p.right().left());
          s.p.emplace("R", p.right().right());
          s.num.emplace("r", p.weight());
          s.num.emplace("s", p.right().weight());
          out.push_back({Direction::LR, s});
        }
        if (p.left().is_choice()) {
          Rational rbar = p.left().weight(), sbar = p.weight();
          Rational r = rbar * sbar;
          Rational t = Rational(1) - (Rational(1) - sbar) / (Rational(1) - r);
          Substitution s;
          s.p.emplace("P", p.left().left());
          s.p.emplace("Q", p.left().right());
          s.p.emplace("R", p.right());
          s.num.emplace("r", r);
          s.num.emplace("s", t);
          out.push_back({Direction::RL, s});
        }
      }
      break;
    case AxiomId::P3:
      if (tg == Tag::PChoice && sub.p().left() == sub.p().right()) {
        Substitution s;
        s.p.emplace("P", sub.p().left());
        s.num.emplace("r", sub.p().weight());
        out.push_back({Direction::LR, s});
      }
      if (!nd) {
        Substitution s;
        s.p.emplace("P", sub.p());
        s.num.emplace("r", gen.weight());
        out.push_back({Direction::RL, s});
      }
      break;
    case AxiomId::C:
      if (tg == Tag::Sum) {
        NdTerm e = sub.nd();
        if (e.left().is_prefix() && e.right().is_prefix() && e.left().action() == e.right().action()) {
          Substitution s;
          s.alpha = e.left().action();
          s.p.emplace("P", e.left().body());
          s.p.emplace("Q", e.right().body());
          s.num.emplace("r", gen.weight());
          out.push_back({Direction::LR, s});
        }
        if (e.left().is_prefix() && e.right().is_sum()) {
          NdTerm mid = e.right().left(), q = e.right().right();
          if (mid.is_prefix() && q.is_prefix() && mid.action() == e.left().action() && q.action() == mid.action() &&
              mid.body().is_choice() && mid.body().left() == e.left().body() && mid.body().right() == q.body()) {
            Substitution s;
            s.alpha = mid.action();
            s.p.emplace("P", e.left().body());
            s.p.emplace("Q", q.body());
            s.num.emplace("r", mid.body().weight());
            out.push_back({Direction::RL, s});
          }
        }
      }
      break;
    case AxiomId::BP:
      if (tg == Tag::Prefix && sub.nd().body().is_choice()) {
        NdTerm e = sub.nd();
        PTerm body = e.body();
        // left to right
        if (body.left().is_dirac() && body.left().inner().is_sum()) {
          NdTerm in = body.left().inner();
          if (in.right().is_prefix() && in.right().action().is_tau() && sqsubseteq(in.left(), in.right().body(), &en)) {
            Substitution s;
            s.alpha = e.action();
            s.nd.emplace("E", in.left());
            s.p.emplace("P", in.right().body());
            s.p.emplace("Q", body.right());
            s.num.emplace("r", body.weight());
            out.push_back({Direction::LR, s});
          }
        }
        auto pool = summand_pool(body.left());
        NdTerm pick = pool[gen.below(pool.size())];
        if (sqsubseteq(pick, body.left(), &en)) {
          Substitution s;
          s.alpha = e.action();
          s.nd.emplace("E", pick);
          s.p.emplace("P", body.left());
          s.p.emplace("Q", body.right());
          s.num.emplace("r", body.weight());
          out.push_back({Direction::RL, s});
        }
      }
      break;
    case AxiomId::G:
      if (tg == Tag::Prefix && sub.nd().body().is_choice() && sub.nd().body().left().is_dirac()) {
        NdTerm e = sub.nd();
        PTerm body = e.body();
        NdTerm in = body.left().inner();
        if (in.is_sum() && sqsubseteq(in.left(), PTerm::dirac(in.right()), &en)) {
          Substitution s;
          s.alpha = e.action();
          s.nd.emplace("E", in.left());
          s.nd.emplace("F", in.right());
          s.p.emplace("Q", body.right());
          s.num.emplace("r", body.weight());
          out.push_back({Direction::LR, s});
        }
        auto pool = summands(in);
        pool.push_back(NdTerm::zero());
        // tau.(D(F) +r Q) where tau.Q is a summand of F: partially inert
        for (auto& h : summands(in))
          if (h.is_prefix() && h.action().is_tau())
            pool.push_back(NdTerm::prefix(Action::tau(), PTerm::choice(PTerm::dirac(in), gen.weight(), h.body())));
        NdTerm pick = pool[gen.below(pool.size())];
        if (sqsubseteq(pick, PTerm::dirac(in), &en)) {
          Substitution s;
          s.alpha = e.action();
          s.nd.emplace("E", pick);
          s.nd.emplace("F", in);
          s.p.emplace("Q", body.right());
          s.num.emplace("r", body.weight());
          out.push_back({Direction::RL, s});
        }
      }
      break;
    case AxiomId::SBP1:
    case AxiomId::SBP2:
    case AxiomId::SBP3:
    case AxiomId::B: break;
  }
  return out;
}

}  // namespace

std::optional<RewriteStep> random_axiom_step(const Term& t, AxiomId id, TermGen& gen, BranchingEngine& engine) {
  std::vector<std::pair<Position, Term>> subs;
  Position at;
  collect(t, at, subs);
  std::shuffle(subs.begin(), subs.end(), gen.rng());
  for (auto& [pos, sub] : subs) {
    auto cs = candidates(id, sub, gen, engine);
    if (cs.empty()) continue;
    auto& c = cs[gen.below(cs.size())];
    RewriteStep st;
    st.axiom = id;
    st.position = pos;
    st.direction = c.d;
    st.subst = c.s;
    try {
      apply_axiom(t, st, true, &engine);
    } catch (const std::exception&) {
      continue;
    }
    return st;
  }
  return std::nullopt;
}

namespace {

const AxiomId kSound[] = {AxiomId::A1, AxiomId::A2, AxiomId::A3, AxiomId::A4, AxiomId::P1,
                          AxiomId::P2, AxiomId::P3, AxiomId::C,  AxiomId::BP, AxiomId::G};

}  // namespace

Term random_equivalent(const Term& t, unsigned steps, TermGen& gen, BranchingEngine& engine) {
  Term cur = t;
  for (unsigned k = 0; k < steps; ++k) {
    // the semantic axioms are drawn more often than the structural ones
    static const AxiomId bias[] = {AxiomId::BP, AxiomId::G, AxiomId::C, AxiomId::P3, AxiomId::BP, AxiomId::G};
    AxiomId id = gen.below(2) ? bias[gen.below(std::size(bias))] : kSound[gen.below(std::size(kSound))];
    if (auto st = random_axiom_step(cur, id, gen, engine)) cur = apply_axiom(cur, *st, false, &engine);
  }
  return cur;
}

// -------------------------------------------------------------- suites

namespace {

struct Case {
  std::vector<Term> terms;
  std::vector<Rational> nums;
  std::vector<std::size_t> ints;
};

// nullopt: pass; otherwise (expected, got). `vacuous` is set when the
// premise of the implication does not hold.
using Outcome = std::optional<std::pair<std::string, std::string>>;
using Property = std::function<Outcome(const Case&, BranchingEngine&, bool& vacuous, Report&)>;
using Maker = std::function<std::optional<Case>(TermGen&, BranchingEngine&, std::size_t trial)>;

struct Suite {
  Maker make;
  Property prop;
};

bool br(const PTerm& p, const PTerm& q, BranchingEngine& en) { return branching_equiv(p, q, &en).equivalent; }
bool br(const Distribution& p, const Distribution& q, BranchingEngine& en) {
  return branching_equiv(p, q, &en).equivalent;
}
bool rb(const PTerm& p, const PTerm& q, BranchingEngine& en) { return rooted_branching_equiv(p, q, &en).equivalent; }
bool rbs(const NdTerm& e, const NdTerm& f, BranchingEngine& en) {
  return rooted_branching_equiv_states(e, f, &en).equivalent;
}
bool st(const PTerm& p, const PTerm& q) { return strong_equiv(p, q).equivalent; }

std::string b2s(bool b) { return b ? "true" : "false"; }
Outcome fail(const std::string& what, bool expected) { return std::make_pair(what + "=" + b2s(expected), what + "=" + b2s(!expected)); }

std::size_t joint_states(const PTerm& p, const PTerm& q) {
  std::set<NdTerm> u = derivatives(p);
  for (auto& e : derivatives(q)) u.insert(e);
  return u.size();
}

// A partner term: usually a random sound rewrite, sometimes unrelated.
// Replaces one random subterm by a small fresh one of the same sort.
Term mutate(const Term& t, TermGen& gen) {
  std::vector<std::pair<Position, Term>> subs;
  Position at;
  collect(t, at, subs);
  auto& [pos, sub] = subs[gen.below(subs.size())];
  Term fresh = sub.is_nd() ? Term(gen.nd(3)) : Term(gen.p(3));
  return replace_at(t, pos, fresh);
}

// A partner term: usually a random sound rewrite, sometimes a near miss
// or an unrelated term.
PTerm partner(const PTerm& p, TermGen& gen, BranchingEngine& en, unsigned budget) {
  std::uint64_t k = gen.below(8);
  if (k == 0) return gen.p(budget);
  Term q = random_equivalent(p, 2 + static_cast<unsigned>(gen.below(6)), gen, en);
  if (k <= 2) q = mutate(q, gen);
  return q.p();
}

PTerm concrete_body(const PTerm& p, BranchingEngine& en) {
  ProverOptions opt;
  return concretize(p, Action("a"), &en, opt).end.nd().body();
}

std::map<std::string, Suite> registry(const GenConfig& cfg) {
  const unsigned mc = std::max(1u, cfg.max_complexity);
  std::map<std::string, Suite> r;

  r["congruence"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        PTerm p1 = g.p(mc), p2 = g.p(mc);
        return Case{{p1, partner(p1, g, en, mc), p2, partner(p2, g, en, mc), g.nd(mc)}, {g.weight()}, {}};
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report&) -> Outcome {
        PTerm p1 = c.terms[0].p(), q1 = c.terms[1].p(), p2 = c.terms[2].p(), q2 = c.terms[3].p();
        NdTerm e = c.terms[4].nd();
        const Rational& r = c.nums[0];
        PTerm pc = PTerm::choice(p1, r, p2), qc = PTerm::choice(q1, r, q2);
        NdTerm ap = NdTerm::sum(NdTerm::prefix(Action("a"), p1), e), aq = NdTerm::sum(NdTerm::prefix(Action("a"), q1), e);
        vac = true;
        if (br(p1, q1, en)) {
          vac = false;
          if (!rbs(NdTerm::prefix(Action("a"), p1), NdTerm::prefix(Action("a"), q1), en))
            return fail("rooted(a.P1, a.Q1)", true);
          if (br(p2, q2, en) && !br(pc, qc, en)) return fail("branching(P1+rP2, Q1+rQ2)", true);
        }
        if (rb(p1, q1, en)) {
          vac = false;
          if (rb(p2, q2, en) && !rb(pc, qc, en)) return fail("rooted(P1+rP2, Q1+rQ2)", true);
          if (!rbs(ap, aq, en)) return fail("rooted(a.P1+E, a.Q1+E)", true);
        }
        if (st(p1, q1)) {
          vac = false;
          if (st(p2, q2) && !st(pc, qc)) return fail("strong(P1+rP2, Q1+rQ2)", true);
          if (!st(PTerm::dirac(ap), PTerm::dirac(aq))) return fail("strong(a.P1+E, a.Q1+E)", true);
        }
        return std::nullopt;
      }};

  r["soundness"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t trial) -> std::optional<Case> {
        AxiomId id = kSound[trial % std::size(kSound)];
        for (int attempt = 0; attempt < 60; ++attempt) {
          PTerm p = g.p(mc);
          if (id == AxiomId::C || id == AxiomId::A3) p = random_equivalent(p, 2, g, en).p();
          if (auto s = random_axiom_step(p, id, g, en)) {
            Term after = apply_axiom(p, *s, true, &en);
            return Case{{p, after}, {}, {static_cast<std::size_t>(id)}};
          }
        }
        return std::nullopt;
      },
      [](const Case& c, BranchingEngine& en, bool&, Report& rep) -> Outcome {
        auto id = static_cast<AxiomId>(c.ints[0]);
        rep.counts[axiom_name(id)]++;
        PTerm a = c.terms[0].p(), b = c.terms[1].p();
        if (!rb(a, b, en)) return fail("rooted(before, after)", true);
        bool uncond = id != AxiomId::BP && id != AxiomId::G;
        if (uncond && !st(a, b)) return fail("strong(before, after)", true);
        return std::nullopt;
      }};

  r["stuttering"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        PTerm p = random_equivalent(g.p(mc), 3, g, en).p();
        return Case{{p}, {g.weight()}, {g.below(1000), g.below(1000), g.below(2)}};
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report&) -> Outcome {
        Distribution mu = den(c.terms[0].p());
        auto g1 = weak_closure(mu).generators;
        Distribution bar = g1[c.ints[0] % g1.size()];
        if (c.ints[2]) bar = bar.mix(c.nums[0], g1[c.ints[1] % g1.size()]);
        auto g2 = weak_closure(bar).generators;
        Distribution nu = g2[c.ints[1] % g2.size()];
        vac = !br(mu, nu, en);
        if (!vac && !br(mu, bar, en)) return fail("branching(mu, mu_bar)", true);
        return std::nullopt;
      }};

  r["cancellativity"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t trial) -> std::optional<Case> {
        PTerm m = g.p(mc), n = g.p(mc);
        PTerm n2 = random_equivalent(n, 1 + static_cast<unsigned>(g.below(4)), g, en).p();
        PTerm m2 = partner(m, g, en, mc);
        Rational r = trial % 5 == 0 ? Rational(1) : g.weight();
        return Case{{m, n, m2, n2}, {r}, {}};
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report& rep) -> Outcome {
        Distribution m = den(c.terms[0].p()), n = den(c.terms[1].p()), m2 = den(c.terms[2].p()),
                     n2 = den(c.terms[3].p());
        const Rational& r = c.nums[0];
        if (r.is_one()) rep.counts["r=1"]++;
        vac = !(br(m.mix(r, n), m2.mix(r, n2), en) && br(n, n2, en));
        if (!vac && !br(m, m2, en)) return fail("branching(mu, mu')", true);
        return std::nullopt;
      }};

  r["inclusion"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        PTerm p = g.p(mc);
        return Case{{p, partner(p, g, en, mc)}, {}, {}};
      },
      [](const Case& c, BranchingEngine& en, bool&, Report& rep) -> Outcome {
        PTerm p = c.terms[0].p(), q = c.terms[1].p();
        bool s = st(p, q), r = rb(p, q, en), b = br(p, q, en);
        if (s) rep.counts["strong"]++;
        if (r) rep.counts["rooted"]++;
        if (b) rep.counts["branching"]++;
        if (s && !r) return fail("strong implies rooted", true);
        if (r && !b) return fail("rooted implies branching", true);
        return std::nullopt;
      }};

  r["cc"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        PTerm p1 = concrete_body(g.p(mc), en), p2 = concrete_body(g.p(mc), en);
        return Case{{p1, p2}, {g.weight(), g.weight()}, {g.below(1000)}};
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report&) -> Outcome {
        PTerm p1 = c.terms[0].p(), p2 = c.terms[1].p();
        vac = !(is_concrete(p1, &en) && is_concrete(p2, &en));
        if (vac) return std::nullopt;
        PTerm pc = PTerm::choice(p1, c.nums[0], p2);
        if (!is_concrete(pc, &en)) return fail("concrete(P1 +r P2)", true);
        // parts of a decomposition of a concrete distribution
        for (const auto& part : {den(p1), den(p2)})
          for (auto& [x, _] : part.entries())
            if (!is_concrete(x, &en)) return fail("concrete(support of part)", true);
        // over rigid states a weak move to an equivalent distribution is the identity
        Distribution mu = den(pc);
        auto gens = weak_closure(mu).generators;
        for (auto& g : gens) {
          for (const auto& cand : {g, mu.mix(c.nums[1], g)})
            if (!(cand == mu) && br(cand, mu, en)) return fail("stationary(mu)", true);
        }
        return std::nullopt;
      }};

  r["concrete"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        PTerm p = g.p(mc);
        PTerm q = partner(p, g, en, mc);
        return Case{{concrete_body(p, en), concrete_body(q, en)}, {}, {}};
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report& rep) -> Outcome {
        PTerm p = c.terms[0].p(), q = c.terms[1].p();
        vac = !(is_concrete(p, &en) && is_concrete(q, &en));
        if (vac) return std::nullopt;
        bool b = br(p, q, en), s = st(p, q);
        if (b) rep.counts["equivalent"]++;
        if (b != s) return fail("branching == strong", true);
        return std::nullopt;
      }};

  r["oracle"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        unsigned small = std::min(mc, 7u);
        for (int attempt = 0; attempt < 200; ++attempt) {
          PTerm p = g.p(small);
          PTerm q = partner(p, g, en, small);
          if (joint_states(p, q) <= 5) return Case{{p, q}, {}, {}};
        }
        return std::nullopt;
      },
      [](const Case& c, BranchingEngine& en, bool&, Report& rep) -> Outcome {
        PTerm p = c.terms[0].p(), q = c.terms[1].p();
        bool fast = br(p, q, en);
        bool slow = brute_force_branching(den(p), den(q), 5).equivalent;
        if (fast) rep.counts["equivalent"]++;
        if (fast != slow) return std::make_pair("oracle=" + b2s(slow), "checker=" + b2s(fast));
        return std::nullopt;
      }};

  r["completeness"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        for (int attempt = 0; attempt < 50; ++attempt) {
          PTerm p = g.p(mc);
          PTerm q = random_equivalent(p, 2 + static_cast<unsigned>(g.below(8)), g, en).p();
          if (joint_states(p, q) <= 40) return Case{{p, q}, {}, {}};
        }
        return std::nullopt;
      },
      [](const Case& c, BranchingEngine& en, bool& vac, Report& rep) -> Outcome {
        PTerm p = c.terms[0].p(), q = c.terms[1].p();
        vac = !rb(p, q, en);
        if (vac) return std::nullopt;
        if (!st(p, q)) rep.counts["not strong"]++;
        try {
          auto res = prove_equal(p, q, &en);
          auto* tr = std::get_if<ProofTrace>(&res);
          if (!tr) return std::make_pair(std::string("trace"), std::string("refutation"));
          rep.counts["steps"] += tr->steps.size();
          for (auto& s : tr->steps) rep.counts[axiom_name(s.axiom)]++;
          replay(*tr, true, &en);
        } catch (const std::exception& e) {
          return std::make_pair(std::string("replayable trace"), std::string(e.what()));
        }
        return std::nullopt;
      }};

  r["concretize"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t) -> std::optional<Case> {
        return Case{{random_equivalent(g.p(mc), 3, g, en)}, {}, {}};
      },
      [](const Case& c, BranchingEngine& en, bool&, Report&) -> Outcome {
        PTerm p = c.terms[0].p();
        try {
          ProofTrace tr = concretize(p, Action("a"), &en);
          replay(tr, true, &en);
          NdTerm end = tr.end.nd();
          if (!is_concrete(end.body(), &en)) return fail("concrete(output)", true);
          if (!rbs(tr.start.nd(), end, en)) return fail("rooted(a.P, a.P')", true);
        } catch (const std::exception& e) {
          return std::make_pair(std::string("concretized"), std::string(e.what()));
        }
        return std::nullopt;
      }};

  r["derived"] = {
      [mc](TermGen& g, BranchingEngine& en, std::size_t trial) -> std::optional<Case> {
        std::size_t v = 1 + trial % 3;
        Action a = g.action();
        PTerm p = g.p(std::max(1u, mc / 2));
        NdTerm t;
        if (v == 1) {
          auto pool = summand_pool(p);
          NdTerm e = pool[g.below(pool.size())];
          if (!sqsubseteq(e, p, &en)) e = NdTerm::zero();
          t = NdTerm::prefix(a, PTerm::dirac(NdTerm::sum(e, NdTerm::prefix(Action::tau(), p))));
        } else if (v == 2) {
          t = NdTerm::prefix(a, PTerm::choice(PTerm::dirac(NdTerm::prefix(Action::tau(), p)), g.weight(),
                                               g.p(std::max(1u, mc / 2))));
        } else {
          t = NdTerm::prefix(a, PTerm::dirac(NdTerm::prefix(Action::tau(), p)));
        }
        return Case{{t}, {}, {v}};
      },
      [](const Case& c, BranchingEngine& en, bool&, Report& rep) -> Outcome {
        NdTerm t = c.terms[0].nd();
        std::size_t v = c.ints[0];
        rep.counts["variant " + std::to_string(v)]++;
        try {
          auto [end, tr] = derived_simple_bp(static_cast<int>(v), t, &en);
          replay(tr, true, &en);
          if (!rbs(t, end, en)) return fail("rooted(lhs, rhs)", true);
        } catch (const std::exception& e) {
          return std::make_pair(std::string("replayable trace"), std::string(e.what()));
        }
        return std::nullopt;
      }};

  return r;
}

// Replacement candidates for a subterm, smaller and of the same sort.
std::vector<Term> smaller(const Term& t) {
  std::vector<Term> out;
  switch (tag_of(t)) {
    case Tag::Zero: break;
    case Tag::Prefix: out.push_back(NdTerm::zero()); break;
    case Tag::Sum:
      out.push_back(t.nd().left());
      out.push_back(t.nd().right());
      break;
    case Tag::Dirac:
      if (!t.p().inner().is_zero()) out.push_back(PTerm());
      break;
    case Tag::PChoice:
      out.push_back(t.p().left());
      out.push_back(t.p().right());
      break;
  }
  return out;
}

Case shrink(Case c, const Property& prop, BranchingEngine& en) {
  auto still_fails = [&](const Case& x) {
    try {
      bool vac = false;
      Report scratch;
      return prop(x, en, vac, scratch).has_value();
    } catch (const std::exception&) {
      return false;
    }
  };
  for (int round = 0; round < 200; ++round) {
    bool progress = false;
    for (std::size_t i = 0; i < c.terms.size() && !progress; ++i) {
      std::vector<std::pair<Position, Term>> subs;
      Position at;
      collect(c.terms[i], at, subs);
      for (auto& [pos, sub] : subs) {
        for (auto& rep : smaller(sub)) {
          Case y = c;
          y.terms[i] = replace_at(c.terms[i], pos, rep);
          if (still_fails(y)) {
            c = std::move(y);
            progress = true;
            break;
          }
        }
        if (progress) break;
      }
    }
    if (!progress) break;
  }
  return c;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (auto& [k, _] : registry(GenConfig{})) out.push_back(k);
  return out;
}

Report run_property_suite(const std::string& name, std::size_t trials, const GenConfig& cfg) {
  auto reg = registry(cfg);
  auto it = reg.find(name);
  if (it == reg.end()) throw UnknownSuite("unknown suite '" + name + "'");
  const Suite& suite = it->second;
  Report rep;
  rep.suite = name;
  rep.trials = trials;
  BranchingEngine en;
  for (std::size_t i = 0; i < trials; ++i) {
    GenConfig c = cfg;
    c.seed = cfg.seed + i;
    TermGen gen(c);
    std::optional<Case> cs;
    Outcome out;
    bool vac = false;
    try {
      cs = suite.make(gen, en, i);
      if (!cs) {
        ++rep.skipped;
        continue;
      }
      out = suite.prop(*cs, en, vac, rep);
    } catch (const BoundExceeded&) {
      ++rep.skipped;
      continue;
    } catch (const std::exception& e) {
      out = std::make_pair(std::string("no error"), std::string(e.what()));
    }
    if (!out) {
      if (vac) ++rep.skipped;
      ++rep.passed;
      continue;
    }
    Failure f;
    f.seed = c.seed;
    f.expected = out->first;
    f.got = out->second;
    Case small = cs ? shrink(*cs, suite.prop, en) : Case{};
    for (auto& t : small.terms) f.input_terms.push_back(t.str());
    rep.failures.push_back(std::move(f));
  }
  return rep;
}

}  // namespace pbisim

#include "pbisim/prover.hpp"

#include "builder.hpp"
#include "pbisim/lp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pbisim {

using detail::Builder;
using detail::concat;
using detail::list_pos;

namespace {

using Steps = std::vector<RewriteStep>;
using Weighted = std::vector<std::pair<PTerm, Rational>>;

// Components of a right-nested choice with their absolute weights.
Weighted components(const PTerm& p) {
  Weighted out;
  Rational left(1);
  PTerm cur = p;
  while (cur.is_choice()) {
    Rational w = left * cur.weight();
    out.emplace_back(cur.left(), w);
    left -= w;
    cur = cur.right();
  }
  out.emplace_back(cur, left);
  return out;
}

PTerm chain(const Weighted& xs, std::size_t from = 0) {
  if (from + 1 == xs.size()) return xs[from].first;
  Rational rest;
  for (std::size_t k = from; k < xs.size(); ++k) rest += xs[k].second;
  return PTerm::choice(xs[from].first, xs[from].second / rest, chain(xs, from + 1));
}

bool tau_prefix(const NdTerm& e) { return e.is_prefix() && e.action().is_tau(); }

struct Sub {
  Substitution s;
  Sub& a(const Action& x) {
    s.alpha = x;
    return *this;
  }
  Sub& e(const char* k, const NdTerm& v) {
    s.nd.emplace(k, v);
    return *this;
  }
  Sub& p(const char* k, const PTerm& v) {
    s.p.emplace(k, v);
    return *this;
  }
  Sub& r(const char* k, const Rational& v) {
    s.num.emplace(k, v);
    return *this;
  }
};

class Prover {
public:
  Prover(BranchingEngine& en, const ProverOptions& opt) : en_(en), opt_(opt) {}

  PTerm canon_p(const PTerm& p, Steps& out) {
    Builder b = builder(p);
    shallow_p(b, {});
    std::size_t n = components(b.p()).size();
    for (std::size_t i = 0; i < n; ++i) {
      Position at = concat(list_pos(i, n), {0});
      Steps st;
      NdTerm r = canon_e(subterm_at(b.cur, at).nd(), st);
      b.splice(st, at, r);
    }
    shallow_p(b, {});
    out = std::move(b.steps);
    return b.p();
  }

  NdTerm canon_e(const NdTerm& e, Steps& out) {
    if (auto it = memo_e_.find(e); it != memo_e_.end()) {
      out = it->second.second;
      return it->second.first;
    }
    Builder b = builder(e);
    shallow_nd(b, {});
    auto xs = summands(b.nd());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!xs[i].is_prefix()) continue;
      Position at = list_pos(i, xs.size());
      Steps st;
      NdTerm r = canon_b(xs[i], st);
      b.splice(st, at, r);
    }
    shallow_nd(b, {});
    while (remove_one_redundant(b)) shallow_nd(b, {});
    NdTerm res = b.nd();
    memo_e_.emplace(e, std::make_pair(res, b.steps));
    out = std::move(b.steps);
    return res;
  }

  // x = alpha.P; the body is made concrete.
  NdTerm canon_b(const NdTerm& x, Steps& out) {
    if (auto it = memo_b_.find(x); it != memo_b_.end()) {
      out = it->second.second;
      return it->second.first;
    }
    Builder b = builder(x);
    for (;;) {
      shallow_p(b, {0});
      std::size_t n = components(b.nd().body()).size();
      for (std::size_t i = 0; i < n; ++i) {
        Position at = concat(concat({0}, list_pos(i, n)), {0});
        Steps st;
        NdTerm r = canon_e(subterm_at(b.cur, at).nd(), st);
        b.splice(st, at, r);
      }
      shallow_p(b, {0});
      if (!strip_one(b)) break;
    }
    NdTerm res = b.nd();
    memo_b_.emplace(x, std::make_pair(res, b.steps));
    out = std::move(b.steps);
    return res;
  }

  // Non-deterministic fragment.
  NdTerm canon_nd_e(const NdTerm& e, Steps& out) {
    if (auto it = memo_nd_.find(e); it != memo_nd_.end()) {
      out = it->second.second;
      return it->second.first;
    }
    Builder b = builder(e);
    shallow_nd(b, {});
    auto xs = summands(b.nd());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!xs[i].is_prefix()) continue;
      Steps st;
      NdTerm r = canon_nd_b(xs[i], st);
      b.splice(st, list_pos(i, xs.size()), r);
    }
    shallow_nd(b, {});
    NdTerm res = b.nd();
    memo_nd_.emplace(e, std::make_pair(res, b.steps));
    out = std::move(b.steps);
    return res;
  }

  NdTerm canon_nd_b(const NdTerm& x, Steps& out) {
    Builder b = builder(x);
    const Action a = x.action();
    for (;;) {
      Steps st;
      NdTerm f = canon_nd_e(subterm_at(b.cur, {0, 0}).nd(), st);
      b.splice(st, {0, 0}, f);
      auto xs = summands(f);
      const SigVec& mine = en_.sig(f);
      std::size_t k = xs.size();
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (tau_prefix(xs[j]) && en_.sig(den(xs[j].body())) == mine) {
          k = j;
          break;
        }
      if (k == xs.size()) break;
      NdTerm e0 = xs[k].body().inner();
      std::vector<NdTerm> h;
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (j != k) h.push_back(xs[j]);
      NdTerm hsum = sum_of(h);
      arrange_nd(b, {0, 0}, NdTerm::sum(hsum, xs[k]));
      arrange_nd(b, {0, 0, 1, 0, 0}, NdTerm::sum(e0, hsum));
      st_(b, AxiomId::B, {}, Direction::LR, Sub().a(a).e("E", e0).e("F", hsum).s);
      shallow_nd(b, {0, 0});
    }
    out = std::move(b.steps);
    return b.nd();
  }

private:
  Builder builder(const Term& t) { return Builder(t, &en_, opt_.check_side); }

  void tick(std::size_t n) {
    used_ += n;
    if (used_ > opt_.budget) throw BudgetExceeded("rewrite budget of " + std::to_string(opt_.budget) + " steps exhausted");
  }

  void st_(Builder& b, AxiomId id, Position pos, Direction d, Substitution s) {
    tick(1);
    b.step(id, std::move(pos), d, std::move(s));
  }

  void shallow_nd(Builder& b, const Position& at) {
    NdTerm out;
    auto s = shallow_normalize_nd(subterm_at(b.cur, at).nd(), out);
    tick(s.size());
    b.splice(s, at, out);
  }

  void shallow_p(Builder& b, const Position& at) {
    PTerm out;
    auto s = shallow_normalize_p(subterm_at(b.cur, at).p(), out);
    tick(s.size());
    b.splice(s, at, out);
  }

  // Rewrites the shallow-normal subterm at `at` into the arrangement `target`.
  void arrange_nd(Builder& b, const Position& at, const NdTerm& target) {
    NdTerm here = subterm_at(b.cur, at).nd(), out;
    auto s = shallow_normalize_nd(target, out);
    if (!(out == here)) throw ProverError("cannot arrange " + here.str() + " as " + target.str());
    tick(s.size());
    b.splice(reversed(s), at, target);
  }

  void arrange_p(Builder& b, const Position& at, const PTerm& target) {
    PTerm here = subterm_at(b.cur, at).p(), out;
    auto s = shallow_normalize_p(target, out);
    if (!(out == here)) throw ProverError("cannot arrange " + here.str() + " as " + target.str());
    tick(s.size());
    b.splice(reversed(s), at, target);
  }

  // Removes one inert or partially inert tau-summand from a component of
  // the body of the prefix at the root. Returns false if none is left.
  bool strip_one(Builder& b) {
    const Action a = b.nd().action();
    Weighted cs = components(b.nd().body());
    const std::size_t n = cs.size();
    for (std::size_t i = 0; i < n; ++i) {
      NdTerm ei = cs[i].first.inner();
      auto xs = summands(ei);
      const SigVec& mine = en_.sig(ei);
      std::size_t inert = xs.size(), partial = xs.size();
      for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!tau_prefix(xs[k])) continue;
        Distribution mu = den(xs[k].body());
        if (en_.sig(mu) == mine) {
          inert = k;
          break;
        }
        if (partial == xs.size() && xs.size() > 1) {
          Rational r;
          for (auto& [g, m] : mu.entries())
            if (en_.class_of(g) == en_.class_of(ei)) r += m;
          if (r > Rational(0) && r < Rational(1)) partial = k;
        }
      }
      std::size_t k = inert != xs.size() ? inert : partial;
      if (k == xs.size()) continue;

      PTerm pbar = xs[k].body();
      std::vector<NdTerm> h;
      for (std::size_t j = 0; j < xs.size(); ++j)
        if (j != k) h.push_back(xs[j]);
      NdTerm hsum = sum_of(h);
      Weighted rest;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) rest.push_back(cs[j]);
      const Rational& p = cs[i].second;

      if (inert != xs.size()) {
        if (n == 1) {
          if (h.empty()) {
            st_(b, AxiomId::SBP3, {}, Direction::LR, Sub().a(a).p("P", pbar).s);
          } else {
            arrange_nd(b, {0, 0}, NdTerm::sum(hsum, xs[k]));
            st_(b, AxiomId::SBP1, {}, Direction::LR, Sub().a(a).e("E", hsum).p("P", pbar).s);
          }
        } else {
          PTerm r = chain(rest);
          arrange_p(b, {0}, PTerm::choice(cs[i].first, p, r));
          if (h.empty()) {
            st_(b, AxiomId::SBP2, {}, Direction::LR, Sub().a(a).p("P", pbar).p("R", r).r("r", p).s);
          } else {
            arrange_nd(b, {0, 0, 0}, NdTerm::sum(hsum, xs[k]));
            st_(b, AxiomId::BP, {}, Direction::LR,
                Sub().a(a).e("E", hsum).p("P", pbar).p("Q", r).r("r", p).s);
          }
        }
        return true;
      }

      NdTerm drop = xs[k];
      if (n == 1) {
        const Rational half(1, 2);
        arrange_nd(b, {0, 0}, NdTerm::sum(drop, hsum));
        PTerm d = b.nd().body(), dh = PTerm::dirac(hsum);
        st_(b, AxiomId::P3, {0}, Direction::RL, Sub().p("P", d).r("r", half).s);
        st_(b, AxiomId::G, {}, Direction::LR, Sub().a(a).e("E", drop).e("F", hsum).p("Q", d).r("r", half).s);
        st_(b, AxiomId::P1, {0}, Direction::LR, Sub().p("P", dh).p("Q", d).r("r", half).s);
        st_(b, AxiomId::G, {}, Direction::LR, Sub().a(a).e("E", drop).e("F", hsum).p("Q", dh).r("r", half).s);
        st_(b, AxiomId::P3, {0}, Direction::LR, Sub().p("P", dh).r("r", half).s);
      } else {
        PTerm r = chain(rest);
        arrange_p(b, {0}, PTerm::choice(cs[i].first, p, r));
        arrange_nd(b, {0, 0, 0}, NdTerm::sum(drop, hsum));
        st_(b, AxiomId::G, {}, Direction::LR, Sub().a(a).e("E", drop).e("F", hsum).p("Q", r).r("r", p).s);
      }
      return true;
    }
    return false;
  }

  // Finds a summand alpha.R whose target is a convex combination of the
  // other alpha-targets and removes it with C.
  bool remove_one_redundant(Builder& b) {
    auto xs = summands(b.nd());
    std::map<Action, std::vector<std::size_t>> by_action;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i].is_prefix()) by_action[xs[i].action()].push_back(i);
    for (auto& [a, idx] : by_action) {
      if (idx.size() < 2) continue;
      std::vector<SigVec> sigs;
      std::set<std::size_t> keys;
      for (std::size_t i : idx) {
        sigs.push_back(en_.sig(den(xs[i].body())));
        for (auto& [c, _] : sigs.back()) keys.insert(c);
      }
      auto vec = [&](const SigVec& s) {
        std::vector<Rational> v;
        for (std::size_t c : keys) {
          auto it = s.find(c);
          v.push_back(it == s.end() ? Rational(0) : it->second);
        }
        return v;
      };
      for (std::size_t j = 0; j < idx.size(); ++j) {
        std::vector<std::vector<Rational>> pts;
        std::vector<std::size_t> others;
        for (std::size_t k = 0; k < idx.size(); ++k)
          if (k != j) {
            pts.push_back(vec(sigs[k]));
            others.push_back(idx[k]);
          }
        auto w = convex_weights(pts, vec(sigs[j]));
        if (!w) continue;
        std::vector<std::pair<NdTerm, Rational>> qs;
        for (std::size_t k = 0; k < others.size(); ++k)
          if ((*w)[k] > Rational(0)) qs.emplace_back(xs[others[k]], (*w)[k]);
        remove_summand(b, a, xs, idx[j], qs);
        return true;
      }
    }
    return false;
  }

  void remove_summand(Builder& b, const Action& a, const std::vector<NdTerm>& xs, std::size_t j,
                      const std::vector<std::pair<NdTerm, Rational>>& qs) {
    const NdTerm whole = b.nd();
    if (qs.size() < 2) throw ProverError("duplicate canonical summand " + xs[j].str());
    std::vector<NdTerm> rest0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (i != j) rest0.push_back(xs[i]);
    const NdTerm without = sum_of(rest0);

    Builder f = builder(without);
    auto present = [&](const NdTerm& t) {
      auto ys = summands(f.nd());
      return std::find(ys.begin(), ys.end(), t) != ys.end();
    };
    // Sum(Sum(x, y), rest) or Sum(x, y) when nothing else is left.
    auto arrange_pair = [&](const NdTerm& pair, const std::vector<NdTerm>& parts) -> Position {
      auto ys = summands(f.nd());
      std::vector<NdTerm> others;
      for (auto& y : ys)
        if (std::find(parts.begin(), parts.end(), y) == parts.end()) others.push_back(y);
      if (others.empty()) {
        arrange_nd(f, {}, pair);
        return {};
      }
      arrange_nd(f, {}, NdTerm::sum(pair, sum_of(others)));
      return {0};
    };

    const std::size_t q = qs.size();
    std::vector<PTerm> m{qs[0].first.body()};
    std::vector<bool> added(q, false);
    Rational cum = qs[0].second;
    for (std::size_t l = 1; l < q; ++l) {
      Rational t = cum / (cum + qs[l].second);
      PTerm ql = qs[l].first.body();
      m.push_back(PTerm::choice(m[l - 1], t, ql));
      cum += qs[l].second;
      NdTerm am = NdTerm::prefix(a, m[l - 1]), aq = qs[l].first;
      if (present(NdTerm::prefix(a, m[l]))) continue;
      Position at = arrange_pair(NdTerm::sum(am, aq), {am, aq});
      st_(f, AxiomId::C, at, Direction::LR, Sub().a(a).p("P", m[l - 1]).p("Q", ql).r("r", t).s);
      shallow_nd(f, {});
      added[l] = true;
    }
    {
      NdTerm last = NdTerm::prefix(a, m[q - 1]);
      auto ys = summands(f.nd());
      auto it = std::find(ys.begin(), ys.end(), last);
      if (it == ys.end()) throw ProverError("lost combined summand " + last.str());
      Steps st;
      NdTerm r = canon_b(last, st);
      if (!(r == xs[j])) throw ProverError("combined summand " + r.str() + " differs from " + xs[j].str());
      f.splice(st, list_pos(static_cast<std::size_t>(it - ys.begin()), ys.size()), r);
      shallow_nd(f, {});
    }
    for (std::size_t l = q - 1; l-- > 1;) {
      if (!added[l]) continue;
      NdTerm prev = NdTerm::prefix(a, m[l - 1]), mid = NdTerm::prefix(a, m[l]), aq = qs[l].first;
      Position at = arrange_pair(NdTerm::sum(prev, NdTerm::sum(mid, aq)), {prev, mid, aq});
      st_(f, AxiomId::C, at, Direction::RL, Sub().a(a).p("P", m[l - 1]).p("Q", m[l].right()).r("r", m[l].weight()).s);
      shallow_nd(f, {});
    }
    if (!(f.nd() == whole)) throw ProverError("redundancy removal ends in " + f.nd().str());
    tick(f.steps.size());
    b.splice(reversed(f.steps), {}, without);
  }

  BranchingEngine& en_;
  ProverOptions opt_;
  std::size_t used_ = 0;
  std::map<NdTerm, std::pair<NdTerm, Steps>> memo_e_, memo_b_, memo_nd_;
};

void check_fragment(const NdTerm& e, std::set<NdTerm>& seen);

void check_fragment(const PTerm& p, std::set<NdTerm>& seen) {
  if (p.is_choice()) {
    check_fragment(p.left(), seen);
    check_fragment(p.right(), seen);
  } else {
    check_fragment(p.inner(), seen);
  }
}

void check_fragment(const NdTerm& e, std::set<NdTerm>& seen) {
  if (!seen.insert(e).second) return;
  if (e.is_sum()) {
    check_fragment(e.left(), seen);
    check_fragment(e.right(), seen);
  } else if (e.is_prefix()) {
    if (!e.body().is_dirac()) throw FragmentError("prefix with probabilistic body: " + e.str());
    check_fragment(e.body(), seen);
  }
}

}  // namespace

std::pair<PTerm, ProofTrace> canonical_form(const PTerm& p, BranchingEngine* engine, const ProverOptions& opt) {
  BranchingEngine local;
  Prover pr(engine ? *engine : local, opt);
  Steps st;
  PTerm c = pr.canon_p(p, st);
  return {c, ProofTrace{p, std::move(st), c}};
}

std::variant<ProofTrace, Verdict> prove_equal(const PTerm& p, const PTerm& q, BranchingEngine* engine,
                                              const ProverOptions& opt) {
  BranchingEngine local;
  BranchingEngine& en = engine ? *engine : local;
  Verdict v = rooted_branching_equiv(p, q, &en);
  if (!v.equivalent) return v;
  Prover pr(en, opt);
  Steps sp, sq;
  PTerm cp = pr.canon_p(p, sp);
  PTerm cq = pr.canon_p(q, sq);
  if (!(cp == cq)) throw ProverError("canonical forms differ: " + cp.str() + " vs " + cq.str());
  auto back = reversed(sq);
  sp.insert(sp.end(), back.begin(), back.end());
  return ProofTrace{p, std::move(sp), q};
}

ProofTrace concretize(const PTerm& p, const Action& alpha, BranchingEngine* engine, const ProverOptions& opt) {
  BranchingEngine local;
  Prover pr(engine ? *engine : local, opt);
  NdTerm start = NdTerm::prefix(alpha, p);
  Steps st;
  NdTerm end = pr.canon_b(start, st);
  return ProofTrace{start, std::move(st), end};
}

ProofTrace concretize_nd(const NdTerm& e, const Action& alpha, BranchingEngine* engine, const ProverOptions& opt) {
  std::set<NdTerm> seen;
  check_fragment(e, seen);
  BranchingEngine local;
  Prover pr(engine ? *engine : local, opt);
  NdTerm start = NdTerm::prefix(alpha, PTerm::dirac(e));
  Steps st;
  NdTerm end = pr.canon_nd_b(start, st);
  return ProofTrace{start, std::move(st), end};
}

}  // namespace pbisim

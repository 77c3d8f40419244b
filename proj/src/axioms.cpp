#include "pbisim/axioms.hpp"

#include "builder.hpp"

#include <algorithm>

namespace pbisim {

using detail::Builder;
using detail::concat;
using detail::spine_pos;

namespace {

const std::pair<AxiomId, const char*> kNames[] = {
    {AxiomId::A1, "A1"}, {AxiomId::A2, "A2"},     {AxiomId::A3, "A3"},     {AxiomId::A4, "A4"},   {AxiomId::B, "B"},
    {AxiomId::P1, "P1"}, {AxiomId::P2, "P2"},     {AxiomId::P3, "P3"},     {AxiomId::C, "C"},     {AxiomId::BP, "BP"},
    {AxiomId::G, "G"},   {AxiomId::SBP1, "SBP1"}, {AxiomId::SBP2, "SBP2"}, {AxiomId::SBP3, "SBP3"},
};

const NdTerm& nd(const Substitution& s, const char* k) {
  auto it = s.nd.find(k);
  if (it == s.nd.end()) throw SubstitutionError(std::string("missing term variable ") + k);
  return it->second;
}
const PTerm& pv(const Substitution& s, const char* k) {
  auto it = s.p.find(k);
  if (it == s.p.end()) throw SubstitutionError(std::string("missing process variable ") + k);
  return it->second;
}
const Rational& num(const Substitution& s, const char* k) {
  auto it = s.num.find(k);
  if (it == s.num.end()) throw SubstitutionError(std::string("missing weight ") + k);
  return it->second;
}
const Action& act(const Substitution& s) {
  if (!s.alpha) throw SubstitutionError("missing action alpha");
  return *s.alpha;
}

PTerm choice(const PTerm& l, const Rational& r, const PTerm& rr) {
  try {
    return PTerm::choice(l, r, rr);
  } catch (const std::invalid_argument& e) {
    throw SubstitutionError(e.what());
  }
}

NdTerm sum(const NdTerm& a, const NdTerm& b) { return NdTerm::sum(a, b); }
NdTerm pre(const Action& a, const PTerm& p) { return NdTerm::prefix(a, p); }
PTerm dirac(const NdTerm& e) { return PTerm::dirac(e); }
NdTerm tau(const PTerm& p) { return NdTerm::prefix(Action::tau(), p); }

}  // namespace

std::string axiom_name(AxiomId id) {
  for (auto& [k, v] : kNames)
    if (k == id) return v;
  return "?";
}

std::optional<AxiomId> axiom_from_name(const std::string& name) {
  for (auto& [k, v] : kNames)
    if (name == v) return k;
  return std::nullopt;
}

std::pair<Term, Term> instantiate(AxiomId id, const Substitution& s) {
  switch (id) {
    case AxiomId::A1: return {sum(nd(s, "E"), nd(s, "F")), sum(nd(s, "F"), nd(s, "E"))};
    case AxiomId::A2:
      return {sum(sum(nd(s, "E"), nd(s, "F")), nd(s, "G")), sum(nd(s, "E"), sum(nd(s, "F"), nd(s, "G")))};
    case AxiomId::A3: return {sum(nd(s, "E"), nd(s, "E")), nd(s, "E")};
    case AxiomId::A4: return {sum(nd(s, "E"), NdTerm::zero()), nd(s, "E")};
    case AxiomId::B: {
      const Action& a = act(s);
      NdTerm ef = sum(nd(s, "E"), nd(s, "F"));
      return {pre(a, dirac(sum(nd(s, "F"), tau(dirac(ef))))), pre(a, dirac(ef))};
    }
    case AxiomId::P1: {
      const Rational& r = num(s, "r");
      return {choice(pv(s, "P"), r, pv(s, "Q")), choice(pv(s, "Q"), Rational(1) - r, pv(s, "P"))};
    }
    case AxiomId::P2: {
      const Rational& r = num(s, "r");
      const Rational& t = num(s, "s");
      Rational sbar = Rational(1) - (Rational(1) - r) * (Rational(1) - t);
      Rational rbar = r / sbar;
      return {choice(pv(s, "P"), r, choice(pv(s, "Q"), t, pv(s, "R"))),
              choice(choice(pv(s, "P"), rbar, pv(s, "Q")), sbar, pv(s, "R"))};
    }
    case AxiomId::P3: return {choice(pv(s, "P"), num(s, "r"), pv(s, "P")), pv(s, "P")};
    case AxiomId::C: {
      const Action& a = act(s);
      NdTerm ap = pre(a, pv(s, "P")), aq = pre(a, pv(s, "Q"));
      return {sum(ap, aq), sum(ap, sum(pre(a, choice(pv(s, "P"), num(s, "r"), pv(s, "Q"))), aq))};
    }
    case AxiomId::BP: {
      const Action& a = act(s);
      const Rational& r = num(s, "r");
      return {pre(a, choice(dirac(sum(nd(s, "E"), tau(pv(s, "P")))), r, pv(s, "Q"))),
              pre(a, choice(pv(s, "P"), r, pv(s, "Q")))};
    }
    case AxiomId::G: {
      const Action& a = act(s);
      const Rational& r = num(s, "r");
      return {pre(a, choice(dirac(sum(nd(s, "E"), nd(s, "F"))), r, pv(s, "Q"))),
              pre(a, choice(dirac(nd(s, "F")), r, pv(s, "Q")))};
    }
    case AxiomId::SBP1: {
      const Action& a = act(s);
      return {pre(a, dirac(sum(nd(s, "E"), tau(pv(s, "P"))))), pre(a, pv(s, "P"))};
    }
    case AxiomId::SBP2: {
      const Action& a = act(s);
      const Rational& r = num(s, "r");
      return {pre(a, choice(dirac(tau(pv(s, "P"))), r, pv(s, "R"))), pre(a, choice(pv(s, "P"), r, pv(s, "R")))};
    }
    case AxiomId::SBP3: {
      const Action& a = act(s);
      return {pre(a, dirac(tau(pv(s, "P")))), pre(a, pv(s, "P"))};
    }
  }
  throw SubstitutionError("unknown axiom");
}

namespace {

Term child(const Term& t, int i, const Position& pos) {
  Tag tag = t.is_nd() ? t.nd().tag() : t.p().tag();
  switch (tag) {
    case Tag::Zero: break;
    case Tag::Prefix:
      if (i == 0) return t.nd().body();
      break;
    case Tag::Sum:
      if (i == 0) return t.nd().left();
      if (i == 1) return t.nd().right();
      break;
    case Tag::Dirac:
      if (i == 0) return t.p().inner();
      break;
    case Tag::PChoice:
      if (i == 0) return t.p().left();
      if (i == 1) return t.p().right();
      break;
  }
  std::string where;
  for (int k : pos) where += std::to_string(k) + ".";
  throw PositionError("no child " + std::to_string(i) + " at position [" + where + "] of " + t.str());
}

Term with_child(const Term& t, int i, const Term& c) {
  auto need_nd = [&](const Term& x) {
    if (!x.is_nd()) throw SubstitutionError("sort mismatch: expected a non-deterministic term");
    return x.nd();
  };
  auto need_p = [&](const Term& x) {
    if (x.is_nd()) throw SubstitutionError("sort mismatch: expected a probabilistic term");
    return x.p();
  };
  Tag tag = t.is_nd() ? t.nd().tag() : t.p().tag();
  switch (tag) {
    case Tag::Prefix: return NdTerm::prefix(t.nd().action(), need_p(c));
    case Tag::Sum: return i == 0 ? NdTerm::sum(need_nd(c), t.nd().right()) : NdTerm::sum(t.nd().left(), need_nd(c));
    case Tag::Dirac: return PTerm::dirac(need_nd(c));
    case Tag::PChoice:
      return i == 0 ? PTerm::choice(need_p(c), t.p().weight(), t.p().right())
                    : PTerm::choice(t.p().left(), t.p().weight(), need_p(c));
    default: break;
  }
  throw PositionError("cannot descend into " + t.str());
}

}  // namespace

Term subterm_at(const Term& t, const Position& pos) {
  Term cur = t;
  for (int i : pos) cur = child(cur, i, pos);
  return cur;
}

Term replace_at(const Term& t, const Position& pos, const Term& replacement) {
  if (pos.empty()) return replacement;
  std::vector<Term> path{t};
  for (std::size_t k = 0; k + 1 < pos.size(); ++k) path.push_back(child(path.back(), pos[k], pos));
  child(path.back(), pos.back(), pos);  // validates the last index
  Term acc = replacement;
  for (std::size_t k = pos.size(); k-- > 0;) acc = with_child(path[k], pos[k], acc);
  return acc;
}

Term apply_axiom(const Term& t, const RewriteStep& step, bool check_side, BranchingEngine* engine) {
  auto [lhs, rhs] = instantiate(step.axiom, step.subst);
  const Term& from = step.direction == Direction::LR ? lhs : rhs;
  const Term& to = step.direction == Direction::LR ? rhs : lhs;
  Term here = subterm_at(t, step.position);
  if (!(here == from))
    throw SubstitutionError(axiom_name(step.axiom) + ": instance " + from.str() + " does not match " + here.str());
  if (check_side) {
    const Substitution& s = step.subst;
    bool ok = true;
    std::string what;
    switch (step.axiom) {
      case AxiomId::BP:
      case AxiomId::SBP1:
        ok = sqsubseteq(nd(s, "E"), pv(s, "P"), engine);
        what = nd(s, "E").str() + " [= " + pv(s, "P").str();
        break;
      case AxiomId::G:
        ok = sqsubseteq(nd(s, "E"), PTerm::dirac(nd(s, "F")), engine);
        what = nd(s, "E").str() + " [= D(" + nd(s, "F").str() + ")";
        break;
      default: break;
    }
    if (!ok) throw SideConditionError(axiom_name(step.axiom) + " side condition fails: " + what);
  }
  return replace_at(t, step.position, to);
}

Term replay(const ProofTrace& trace, bool check_side, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine* en = engine ? engine : &local;
  Term cur = trace.start;
  for (const auto& s : trace.steps) cur = apply_axiom(cur, s, check_side, en);
  if (!(cur == trace.end)) throw SubstitutionError("trace ends in " + cur.str() + ", expected " + trace.end.str());
  return cur;
}

std::vector<RewriteStep> reversed(const std::vector<RewriteStep>& steps) {
  std::vector<RewriteStep> out(steps.rbegin(), steps.rend());
  for (auto& s : out) s.direction = flip(s.direction);
  return out;
}

ProofTrace reversed(const ProofTrace& t) { return ProofTrace{t.end, reversed(t.steps), t.start}; }

// ------------------------------------------------------------ normalization

namespace {

Substitution S3(const NdTerm& e, const NdTerm& f, const NdTerm& g) {
  Substitution s;
  s.nd.emplace("E", e);
  s.nd.emplace("F", f);
  s.nd.emplace("G", g);
  return s;
}
Substitution S2(const NdTerm& e, const NdTerm& f) {
  Substitution s;
  s.nd.emplace("E", e);
  s.nd.emplace("F", f);
  return s;
}
Substitution S1(const NdTerm& e) {
  Substitution s;
  s.nd.emplace("E", e);
  return s;
}
Substitution SP(const PTerm& p, const Rational& r, const PTerm& q) {
  Substitution s;
  s.p.emplace("P", p);
  s.p.emplace("Q", q);
  s.num.emplace("r", r);
  return s;
}
Substitution SP3(const PTerm& p, const Rational& r) {
  Substitution s;
  s.p.emplace("P", p);
  s.num.emplace("r", r);
  return s;
}
Substitution SP2(const PTerm& p, const PTerm& q, const PTerm& rr, const Rational& r, const Rational& t) {
  Substitution s;
  s.p.emplace("P", p);
  s.p.emplace("Q", q);
  s.p.emplace("R", rr);
  s.num.emplace("r", r);
  s.num.emplace("s", t);
  return s;
}

NdTerm list_node(const NdTerm& root, std::size_t i) {
  NdTerm cur = root;
  for (std::size_t k = 0; k < i; ++k) cur = cur.right();
  return cur;
}
PTerm list_node(const PTerm& root, std::size_t i) {
  PTerm cur = root;
  for (std::size_t k = 0; k < i; ++k) cur = cur.right();
  return cur;
}

// Swap elements i and i+1 of a flat sum.
void swap_nd(Builder& b, std::size_t i) {
  NdTerm node = list_node(b.nd(), i);
  Position at = spine_pos(i);
  if (!node.right().is_sum()) {
    b.step(AxiomId::A1, at, Direction::LR, S2(node.left(), node.right()));
    return;
  }
  NdTerm x = node.left(), y = node.right().left(), rest = node.right().right();
  b.step(AxiomId::A2, at, Direction::RL, S3(x, y, rest));
  b.step(AxiomId::A1, concat(at, {0}), Direction::LR, S2(x, y));
  b.step(AxiomId::A2, at, Direction::LR, S3(y, x, rest));
}

// P2 parameters (r, s) of the right-nested side for a left-nested (rbar, sbar).
std::pair<Rational, Rational> p2_right(const Rational& rbar, const Rational& sbar) {
  Rational r = rbar * sbar;
  Rational s = Rational(1) - (Rational(1) - sbar) / (Rational(1) - r);
  return {r, s};
}

void swap_p(Builder& b, std::size_t i) {
  PTerm node = list_node(b.p(), i);
  Position at = spine_pos(i);
  if (!node.right().is_choice()) {
    b.step(AxiomId::P1, at, Direction::LR, SP(node.left(), node.weight(), node.right()));
    return;
  }
  PTerm x = node.left(), y = node.right().left(), rest = node.right().right();
  Rational r = node.weight(), s = node.right().weight();
  b.step(AxiomId::P2, at, Direction::LR, SP2(x, y, rest, r, s));
  PTerm grouped = subterm_at(b.cur, at).p();
  Rational rbar = grouped.left().weight(), sbar = grouped.weight();
  b.step(AxiomId::P1, concat(at, {0}), Direction::LR, SP(x, rbar, y));
  auto [r2, s2] = p2_right(Rational(1) - rbar, sbar);
  b.step(AxiomId::P2, at, Direction::RL, SP2(y, x, rest, r2, s2));
}

}  // namespace

std::vector<RewriteStep> shallow_normalize_nd(const NdTerm& e, NdTerm& out) {
  Builder b(e);
  // flatten the spine
  for (bool again = true; again;) {
    again = false;
    NdTerm node = b.nd();
    Position at;
    while (node.is_sum()) {
      if (node.left().is_sum()) {
        b.step(AxiomId::A2, at, Direction::LR, S3(node.left().left(), node.left().right(), node.right()));
        again = true;
        break;
      }
      at.push_back(1);
      node = node.right();
    }
  }
  std::vector<NdTerm> xs = summands(b.nd());
  // bubble sort
  for (std::size_t pass = 0; pass < xs.size(); ++pass) {
    bool swapped = false;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (xs[i + 1] < xs[i]) {
        swap_nd(b, i);
        std::swap(xs[i], xs[i + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  // dedupe neighbours
  for (std::size_t i = 0; i + 1 < xs.size();) {
    if (!(xs[i] == xs[i + 1])) {
      ++i;
      continue;
    }
    Position at = spine_pos(i);
    if (i + 2 == xs.size()) {
      b.step(AxiomId::A3, at, Direction::LR, S1(xs[i]));
    } else {
      NdTerm rest = list_node(b.nd(), i + 2);
      b.step(AxiomId::A2, at, Direction::RL, S3(xs[i], xs[i], rest));
      b.step(AxiomId::A3, concat(at, {0}), Direction::LR, S1(xs[i]));
    }
    xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(i));
  }
  // 0 sorts first; drop it unless alone
  if (xs.size() >= 2 && xs.front().is_zero()) {
    NdTerm rest = b.nd().right();
    b.step(AxiomId::A1, {}, Direction::LR, S2(NdTerm::zero(), rest));
    b.step(AxiomId::A4, {}, Direction::LR, S1(rest));
  }
  out = b.nd();
  return b.steps;
}

std::vector<RewriteStep> shallow_normalize_p(const PTerm& p, PTerm& out) {
  Builder b(p);
  for (bool again = true; again;) {
    again = false;
    PTerm node = b.p();
    Position at;
    while (node.is_choice()) {
      if (node.left().is_choice()) {
        auto [r, s] = p2_right(node.left().weight(), node.weight());
        b.step(AxiomId::P2, at, Direction::RL, SP2(node.left().left(), node.left().right(), node.right(), r, s));
        again = true;
        break;
      }
      at.push_back(1);
      node = node.right();
    }
  }
  auto comps = [&] {
    std::vector<PTerm> cs;
    PTerm cur = b.p();
    while (cur.is_choice()) {
      cs.push_back(cur.left());
      cur = cur.right();
    }
    cs.push_back(cur);
    return cs;
  };
  std::vector<PTerm> xs = comps();
  for (std::size_t pass = 0; pass < xs.size(); ++pass) {
    bool swapped = false;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      if (xs[i + 1] < xs[i]) {
        swap_p(b, i);
        std::swap(xs[i], xs[i + 1]);
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  for (std::size_t i = 0; i + 1 < xs.size();) {
    if (!(xs[i] == xs[i + 1])) {
      ++i;
      continue;
    }
    Position at = spine_pos(i);
    PTerm node = list_node(b.p(), i);
    if (i + 2 == xs.size()) {
      b.step(AxiomId::P3, at, Direction::LR, SP3(xs[i], node.weight()));
    } else {
      PTerm rest = node.right().right();
      b.step(AxiomId::P2, at, Direction::LR, SP2(xs[i], xs[i], rest, node.weight(), node.right().weight()));
      PTerm grouped = subterm_at(b.cur, at).p();
      b.step(AxiomId::P3, concat(at, {0}), Direction::LR, SP3(xs[i], grouped.left().weight()));
    }
    xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(i));
  }
  out = b.p();
  return b.steps;
}

namespace {

std::vector<RewriteStep> deep_nd(const NdTerm& e, NdTerm& out);

std::vector<RewriteStep> deep_p(const PTerm& p, PTerm& out) {
  Builder b(p);
  PTerm flat;
  {
    auto st = shallow_normalize_p(p, flat);
    b.splice(st, {}, flat);
  }
  std::size_t n = 1;
  for (PTerm c = flat; c.is_choice(); c = c.right()) ++n;
  for (std::size_t i = 0; i < n; ++i) {
    Position at = concat(detail::list_pos(i, n), {0});
    NdTerm inner = subterm_at(b.cur, at).nd(), res;
    auto st = deep_nd(inner, res);
    b.splice(st, at, res);
  }
  PTerm fin;
  {
    auto st = shallow_normalize_p(b.p(), fin);
    b.splice(st, {}, fin);
  }
  out = fin;
  return b.steps;
}

std::vector<RewriteStep> deep_nd(const NdTerm& e, NdTerm& out) {
  Builder b(e);
  NdTerm flat;
  {
    auto st = shallow_normalize_nd(e, flat);
    b.splice(st, {}, flat);
  }
  auto xs = summands(flat);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].is_prefix()) continue;
    Position at = concat(detail::list_pos(i, xs.size()), {0});
    PTerm res;
    auto st = deep_p(xs[i].body(), res);
    b.splice(st, at, res);
  }
  NdTerm fin;
  {
    auto st = shallow_normalize_nd(b.nd(), fin);
    b.splice(st, {}, fin);
  }
  out = fin;
  return b.steps;
}

}  // namespace

std::pair<NdTerm, ProofTrace> normalize_nd(const NdTerm& e) {
  NdTerm out;
  auto steps = deep_nd(e, out);
  return {out, ProofTrace{e, std::move(steps), out}};
}

std::pair<PTerm, ProofTrace> normalize_p(const PTerm& p) {
  PTerm out;
  auto steps = deep_p(p, out);
  return {out, ProofTrace{p, std::move(steps), out}};
}

Decomposition flat_decomposition(const PTerm& p) {
  PTerm n = normalize_p(p).first;
  Decomposition d;
  Rational left(1);
  PTerm cur = n;
  while (cur.is_choice()) {
    Rational w = left * cur.weight();
    d.parts.push_back({w, Distribution::dirac(cur.left().inner())});
    left -= w;
    cur = cur.right();
  }
  d.parts.push_back({left, Distribution::dirac(cur.inner())});
  return d;
}

// ------------------------------------------------------- derived laws

namespace {

Substitution with_alpha(Substitution s, const Action& a) {
  s.alpha = a;
  return s;
}

// a.(D(tau.P) +[r] R) -> a.(P +[r] R) at the root of b.
void chain_ii(Builder& b) {
  NdTerm t = b.nd();
  PTerm body = t.body();
  NdTerm tp = body.left().inner();
  PTerm P = tp.body(), R = body.right();
  b.step(AxiomId::A4, {0, 0, 0}, Direction::RL, S1(tp));
  b.step(AxiomId::A1, {0, 0, 0}, Direction::LR, S2(tp, NdTerm::zero()));
  Substitution s;
  s.alpha = t.action();
  s.nd.emplace("E", NdTerm::zero());
  s.p.emplace("P", P);
  s.p.emplace("Q", R);
  s.num.emplace("r", body.weight());
  b.step(AxiomId::BP, {}, Direction::LR, s);
}

// a.(D(E + tau.P) +[r] Q) -> a.(P +[r] Q)
void bp_at_root(Builder& b) {
  NdTerm t = b.nd();
  PTerm body = t.body();
  NdTerm inner = body.left().inner();
  Substitution s;
  s.alpha = t.action();
  s.nd.emplace("E", inner.left());
  s.p.emplace("P", inner.right().body());
  s.p.emplace("Q", body.right());
  s.num.emplace("r", body.weight());
  b.step(AxiomId::BP, {}, Direction::LR, s);
}

bool is_tau_prefix(const NdTerm& e) { return e.is_prefix() && e.action().is_tau(); }

}  // namespace

std::pair<NdTerm, ProofTrace> derived_simple_bp(int variant, const NdTerm& t, BranchingEngine* engine) {
  BranchingEngine local;
  BranchingEngine* en = engine ? engine : &local;
  Builder b(t, en, true);
  const Rational half(1, 2);
  if (!t.is_prefix()) throw ShapeError("expected a prefix term, got " + t.str());
  PTerm body = t.body();
  switch (variant) {
    case 1: {
      if (!body.is_dirac() || !body.inner().is_sum() || !is_tau_prefix(body.inner().right()))
        throw ShapeError("expected a.D(E + tau.P), got " + t.str());
      NdTerm e = body.inner().left();
      PTerm P = body.inner().right().body();
      if (!sqsubseteq(e, P, en)) throw SideConditionError("side condition fails: " + e.str() + " [= " + P.str());
      b.step(AxiomId::P3, {0}, Direction::RL, SP3(body, half));
      bp_at_root(b);
      b.step(AxiomId::P1, {0}, Direction::LR, SP(P, half, body));
      bp_at_root(b);
      b.step(AxiomId::P3, {0}, Direction::LR, SP3(P, half));
      break;
    }
    case 2: {
      if (!body.is_choice() || !body.left().is_dirac() || !is_tau_prefix(body.left().inner()))
        throw ShapeError("expected a.(D(tau.P) +[r] R), got " + t.str());
      chain_ii(b);
      break;
    }
    case 3: {
      if (!body.is_dirac() || !is_tau_prefix(body.inner())) throw ShapeError("expected a.D(tau.P), got " + t.str());
      PTerm P = body.inner().body();
      b.step(AxiomId::P3, {0}, Direction::RL, SP3(body, half));
      chain_ii(b);
      b.step(AxiomId::P1, {0}, Direction::LR, SP(P, half, body));
      chain_ii(b);
      b.step(AxiomId::P3, {0}, Direction::LR, SP3(P, half));
      break;
    }
    default: throw ShapeError("variant must be 1, 2 or 3");
  }
  NdTerm end = b.nd();
  return {end, ProofTrace{t, std::move(b.steps), end}};
}

}  // namespace pbisim

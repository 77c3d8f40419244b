#include "common.hpp"
#include "doctest.h"

#include "pbisim/equivalence.hpp"
#include "pbisim/harness.hpp"

using namespace pbisim;
using namespace testutil;

namespace {

const std::string kP = "D(b.D(0))", kQ = "D(c.D(0))", kPQ = "(D(b.D(0)) +[1/2] D(c.D(0)))";

bool strong(const std::string& a, const std::string& b) { return strong_equiv(P(a), P(b)).equivalent; }
bool branching(const std::string& a, const std::string& b) { return branching_equiv(P(a), P(b)).equivalent; }
bool rooted(const std::string& a, const std::string& b) { return rooted_branching_equiv(P(a), P(b)).equivalent; }

StateTransition find_tau(const NdTerm& e, const Distribution& target) {
  for (auto& t : nd_transitions(e, Action::tau()))
    if (t.target == target) return t;
  FAIL("no such transition");
  return {};
}

}  // namespace

TEST_CASE("strong partition") {
  Partition p = strong_partition({N("a.D(0) + a.D(0)"), N("a.D(0)")});
  CHECK(p.class_of(N("a.D(0) + a.D(0)")) == p.class_of(N("a.D(0)")));
  Partition q = strong_partition({N("a.D(0)"), N("b.D(0)")});
  CHECK(q.class_of(N("a.D(0)")) != q.class_of(N("b.D(0)")));
  NdTerm combined = N("a.(" + kP + " +[1/2] " + kQ + ") + a.(" + kP + " +[1/3] " + kQ + ")");
  NdTerm with_mix = N("a.(" + kP + " +[1/2] " + kQ + ") + a.(" + kP + " +[5/12] " + kQ + ") + a.(" + kP + " +[1/3] " +
                      kQ + ")");
  Partition c = strong_partition({combined, with_mix});
  CHECK(c.class_of(combined) == c.class_of(with_mix));
}

TEST_CASE("strong equivalence") {
  CHECK(strong("D(a.D(0))", "D(a.D(0))"));
  Verdict v = strong_equiv(P("D(a.D(0)) +[1/2] D(b.D(0))"), P("D(0)"));
  CHECK_FALSE(v.equivalent);
  CHECK(v.witness.has_value());
  CHECK(v.relation == "strong");
  CHECK(strong(kP + " +[1/2] " + kP, kP));
}

TEST_CASE("branching equivalence") {
  auto bp = branching_partition({N("tau.D(a.D(0))"), N("a.D(0)")});
  CHECK(bp.partition().class_of(N("tau.D(a.D(0))")) == bp.partition().class_of(N("a.D(0)")));
  auto cp = branching_partition({N("0 + b.D(0)"), N("tau.D(0) + b.D(0)")});
  CHECK(cp.partition().class_of(N("0 + b.D(0)")) != cp.partition().class_of(N("tau.D(0) + b.D(0)")));

  CHECK(branching("D(tau." + kPQ + ")", kPQ));
  CHECK_FALSE(branching("D(a.D(0))", "D(b.D(0))"));

  std::string s = "D(a.(D(tau." + kPQ + ") +[3/4] D(tau." + kPQ + ")))";
  std::string t = "D(a." + kPQ + ")";
  std::string u = "D(a.(D(tau." + kPQ + ") +[1/3] " + kPQ + "))";
  for (auto& [x, y] : {std::pair{s, t}, {t, u}, {s, u}}) {
    CHECK(branching(x, y));
    CHECK(rooted(x, y));
  }
  CHECK_FALSE(strong(s, t));
}

TEST_CASE("nested inert steps are identified") {
  std::string x = "D(tau.D(a.D(0)) + c.D(b.D(0)) + tau.D(d.D(0)))";
  NdTerm e1 = N("tau.(D(tau." + x + " + c.D(b.D(0)) + tau.D(d.D(0))) +[1/2] D(tau.(" + x + " +[1/2] D(0))))");
  NdTerm e6 = N("tau.(" + x + " +[3/4] D(0))");
  auto bp = branching_partition({e1, e6});
  CHECK(bp.partition().class_of(e1) == bp.partition().class_of(e6));
  CHECK(rooted_branching_equiv_states(e1, e6).equivalent);
}

TEST_CASE("rooted branching") {
  CHECK(rooted_branching_equiv_states(N("a.D(0)"), N("a.D(0)")).equivalent);
  NdTerm l = N("a.(D(tau." + kPQ + ") +[3/4] D(tau." + kPQ + "))"), r = N("a." + kPQ);
  CHECK(rooted_branching_equiv_states(l, r).equivalent);
  CHECK_FALSE(rooted_branching_equiv_states(N("0 + b.D(0)"), N("tau.D(0) + b.D(0)")).equivalent);

  std::string p = "D(tau.D(a.D(0))) +[1/2] D(b.D(0))", q = "D(a.D(0)) +[1/2] D(b.D(0))";
  Verdict v = rooted_branching_equiv(P(p), P(q));
  CHECK_FALSE(v.equivalent);
  CHECK(v.witness.has_value());
  CHECK(branching(p, q));
  CHECK(brute_force_branching(den(P(p)), den(P(q))).equivalent);
  CHECK(rooted(p, p));
}

TEST_CASE("inertness") {
  BranchingEngine en;
  NdTerm src = N("tau." + kPQ);
  auto inert = inertness(src, find_tau(src, den(P(kPQ))), en);
  CHECK(inert.kind == Inertness::Inert);
  CHECK(inert.r == 1);

  NdTerm e = N("a.D(0)");
  NdTerm self = NdTerm::sum(e, N("tau.D(a.D(0))"));
  CHECK(inertness(self, find_tau(self, Distribution::dirac(e)), en).kind == Inertness::Inert);

  std::string bq = "D(b.D(c.D(0)) + tau.D(d.D(0)))", q = "D(d.D(0))";
  NdTerm typical = N("tau.(" + bq + " +[1/3] " + q + ") + b.D(c.D(0)) + tau.D(d.D(0))");
  auto part = inertness(typical, find_tau(typical, den(P(bq + " +[1/3] " + q))), en);
  CHECK(part.kind == Inertness::PartiallyInert);
  CHECK(part.r == R(1, 3));

  NdTerm plain = N("tau.D(0) + b.D(0)");
  CHECK(inertness(plain, find_tau(plain, Distribution::dirac(N("0"))), en).kind == Inertness::Neither);

  StateTransition visible{e, Action("a"), Distribution::dirac(N("0"))};
  CHECK_THROWS_AS(inertness(e, visible, en), ArgumentError);
  StateTransition foreign{e, Action::tau(), Distribution::dirac(N("0"))};
  CHECK_THROWS_AS(inertness(e, foreign, en), ArgumentError);

  auto bp = branching_partition({src});
  CHECK(inertness(src, find_tau(src, den(P(kPQ))), bp).kind == Inertness::Inert);
}

TEST_CASE("concreteness and rigidity") {
  CHECK(is_concrete(P("D(0)")));
  CHECK_FALSE(is_concrete(P("D(tau.D(a.D(0)))")));
  CHECK(is_concrete(P("D(tau.D(a.D(0)) + b.D(0))")));
  // the tau leads somewhere not equivalent to the source
  CHECK_FALSE(brute_force_branching(den(P("D(a.D(0))")), den(P("D(tau.D(a.D(0)) + b.D(0))"))).equivalent);
  CHECK_FALSE(is_rigid(N("tau.D(a.D(0))")));
  CHECK(is_rigid(N("tau.D(a.D(0)) + b.D(0)")));
  std::string bq = "D(b.D(c.D(0)) + tau.D(d.D(0)))";
  NdTerm typical = N("tau.(" + bq + " +[1/2] D(d.D(0))) + b.D(c.D(0)) + tau.D(d.D(0))");
  CHECK(is_rigid(typical));
  CHECK_FALSE(is_concrete(typical));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 12;
    PTerm p = gen_p(cfg);
    if (is_concrete(p))
      for (auto& e : derivatives(p)) CHECK(is_rigid(e));
  }
}

TEST_CASE("sqsubseteq fixtures") {
  CHECK(sqsubseteq(N("b.D(0)"), P("D(a.D(0) + b.D(0)) +[1/2] D(b.D(0))")));
  std::string p1 = "D(d.D(0))", p2 = "D(0)", r = "D(0)", s = "D(b.D(0))";
  CHECK(sqsubseteq(N("a.(" + p1 + " +[1/3] " + p2 + ")"),
                   P("D(b." + r + " + a." + p1 + ") +[1/3] D(c." + s + " + a." + p2 + ")")));
  std::string bq = "b.D(c.D(0)) + tau.D(d.D(0))";
  CHECK(sqsubseteq(N("tau.(D(" + bq + ") +[1/2] D(d.D(0)))"), P("D(" + bq + ")")));
  CHECK_FALSE(sqsubseteq(N("a.D(0)"), P("D(b.D(0))")));
  CHECK(sqsubseteq(N("0"), P("D(0)")));
}

TEST_CASE("deciders are equivalence relations") {
  BranchingEngine en;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 9;
    TermGen g(cfg);
    PTerm a = g.p(9);
    PTerm b = random_equivalent(a, 3, g, en).p();
    PTerm c = seed % 3 == 0 ? g.p(9) : random_equivalent(b, 3, g, en).p();
    using Fn = std::function<bool(const PTerm&, const PTerm&)>;
    std::vector<Fn> rels{[](auto& x, auto& y) { return strong_equiv(x, y).equivalent; },
                         [&](auto& x, auto& y) { return branching_equiv(x, y, &en).equivalent; },
                         [&](auto& x, auto& y) { return rooted_branching_equiv(x, y, &en).equivalent; }};
    for (auto& rel : rels) {
      CHECK(rel(a, a));
      CHECK(rel(a, b) == rel(b, a));
      if (rel(a, b) && rel(b, c)) CHECK(rel(a, c));
    }
  }
}

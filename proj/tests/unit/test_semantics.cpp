#include "common.hpp"
#include "doctest.h"

#include "pbisim/equivalence.hpp"
#include "pbisim/harness.hpp"
#include "pbisim/semantics.hpp"

using namespace pbisim;
using namespace testutil;

namespace {

const std::string kP = "D(b.D(0))", kQ = "D(c.D(0))";

Partition discrete(const std::set<NdTerm>& u) {
  std::vector<std::vector<NdTerm>> cs;
  for (auto& e : u) cs.push_back({e});
  return Partition(cs);
}

}  // namespace

TEST_CASE("nd_transitions") {
  CHECK(nd_transitions(N("0")).empty());
  auto t = nd_transitions(N("a.D(0)"));
  REQUIRE(t.size() == 1);
  CHECK(t[0].action == Action("a"));
  CHECK(t[0].target == Distribution::dirac(N("0")));
  auto u = nd_transitions(N("a.D(0) + tau.D(0)"));
  CHECK(u.size() == 2);
  CHECK(nd_transitions(N("a.D(0) + a.D(0)")).size() == 1);
  CHECK(actions_of(N("a.D(0) + tau.D(0)")) == std::set<Action>{Action("a"), Action::tau()});
}

TEST_CASE("combined transitions reach the 5/12 mixture") {
  NdTerm e = N("a.(" + kP + " +[1/2] " + kQ + ") + a.(" + kP + " +[1/3] " + kQ + ")");
  Distribution mu = Distribution::dirac(e);
  Distribution target = den(P(kP + " +[5/12] " + kQ));
  // half of each summand's target
  Distribution by_hand = den(P(kP + " +[1/2] " + kQ)).mix(R(1, 2), den(P(kP + " +[1/3] " + kQ)));
  CHECK(by_hand == target);

  auto poly = transition_polytope(mu, Action("a"));
  CHECK_FALSE(poly.empty);
  CHECK(polytope_contains(poly, target));
  CHECK_FALSE(polytope_contains(poly, den(P(kP + " +[3/4] " + kQ))));

  Partition part = discrete(derivatives(PTerm::dirac(e)));
  CHECK(polytope_matches_signature(poly, part, signature(target, part)));
  CHECK(signature(target, part).at(part.class_of(N("b.D(0)"))) == R(5, 12));

  CHECK(transition_polytope(Distribution::dirac(N("0")), Action("a")).empty);
  CHECK(transition_polytope(Distribution::dirac(N("a.D(0)")), Action("b")).empty);
}

TEST_CASE("polytope_matches_signature") {
  auto poly = transition_polytope(Distribution::dirac(N("a.D(0)")), Action("a"));
  Partition part = discrete({N("a.D(0)"), N("0")});
  CHECK(polytope_matches_signature(poly, part, {{part.class_of(N("0")), R(1)}}));
  CHECK_FALSE(polytope_matches_signature(poly, part, {{part.class_of(N("a.D(0)")), R(1)}}));
}

TEST_CASE("partial tau successors") {
  std::string pq = "(" + kP + " +[1/2] " + kQ + ")";
  Distribution src = Distribution::dirac(N("tau." + pq));
  auto poly = partial_tau_successors(src);
  CHECK(polytope_contains(poly, den(P(pq))));
  CHECK(polytope_contains(poly, src));
  CHECK(polytope_contains(poly, src.mix(R(1, 3), den(P(pq)))));

  auto zero = partial_tau_successors(Distribution::dirac(N("0")));
  CHECK(polytope_contains(zero, Distribution::dirac(N("0"))));
  CHECK_FALSE(polytope_contains(zero, Distribution::dirac(N("a.D(0)"))));

  Distribution mixed = src.mix(R(1, 3), den(P(pq)));
  CHECK(polytope_contains(partial_tau_successors(mixed), den(P(pq))));

  CHECK(polytope_contains(partial_polytope(src, Action::tau()), src));
  CHECK_FALSE(polytope_contains(partial_polytope(Distribution::dirac(N("a.D(0)")), Action("a")),
                                Distribution::dirac(N("a.D(0)"))));
}

TEST_CASE("weak closure") {
  CHECK(weak_closure(Distribution::dirac(N("0"))).generators == std::vector<Distribution>{Distribution::dirac(N("0"))});
  CHECK(weak_closure(Distribution::dirac(N("a.D(0)"))).generators.size() == 1);

  std::string p = "(" + kP + " +[1/2] " + kQ + ")";
  Distribution a = Distribution::dirac(N("tau.D(tau." + p + ")"));
  Distribution b = Distribution::dirac(N("tau." + p));
  Distribution mu = convex_sum({{{R(1, 2), a}, {R(1, 3), b}, {R(1, 6), den(P(p))}}});
  auto wc = weak_closure(mu);
  CHECK(weak_closure_contains(wc, den(P(p))));
  CHECK(weak_closure_contains(wc, mu));
  CHECK(weak_reachable(mu, den(P(p))));
  CHECK_FALSE(weak_closure_contains(wc, Distribution::dirac(N("b.D(0)"))));
}

TEST_CASE("weak closure and flow reachability agree") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 10;
    TermGen g(cfg);
    Distribution mu = den(g.p(10));
    auto wc = weak_closure(mu);
    CHECK(weak_closure_contains(wc, mu));
    std::vector<Distribution> cands = wc.generators;
    for (std::size_t i = 0; i + 1 < wc.generators.size(); ++i)
      cands.push_back(wc.generators[i].mix(g.weight(), wc.generators[i + 1]));
    cands.push_back(den(g.p(10)));
    for (auto& g2 : weak_closure(wc.generators.back()).generators) cands.push_back(g2);
    for (auto& a : wc.generators)
      for (auto& t : nd_transitions(a.entries().begin()->first, Action::tau()))
        cands.push_back(a.mix(R(1, 2), t.target));
    for (auto& nu : cands) CHECK(weak_closure_contains(wc, nu) == weak_reachable(mu, nu));
  }
}

TEST_CASE("transitions decrease weight") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 14;
    PTerm p = gen_p(cfg);
    for (auto& e : derivatives(p))
      for (auto& t : nd_transitions(e)) CHECK(weight(t.target) < Rational(static_cast<long>(complexity(e))));
    Distribution mu = den(p);
    for (auto& nu : weak_closure(mu).generators) CHECK(weight(nu) <= weight(mu));
  }
}

TEST_CASE("stabilize") {
  auto check_case = [](const std::string& term, const std::string& expected) {
    Distribution mu = den(P(term));
    BranchingPartition bp = branching_partition(derivatives(P(term)));
    Distribution got = stabilize(mu, bp);
    CHECK(got == den(P(expected)));
    CHECK(stabilize(got, bp) == got);
  };
  check_case("D(tau.D(a.D(0)))", "D(a.D(0))");
  check_case("D(0)", "D(0)");
  check_case("D(a.D(0))", "D(a.D(0))");

  SUBCASE("enumerated closure agrees") {
    // Minimal weight among equivalent vertices of the closure.
    Distribution mu = den(P("D(tau.D(a.D(0)))"));
    auto en = std::make_shared<BranchingEngine>();
    BranchingPartition bp = branching_partition(derivatives(P("D(tau.D(a.D(0)))")), en);
    std::optional<Distribution> best;
    for (auto& g : weak_closure(mu).generators)
      if (en->equiv(g, mu) && (!best || weight(g) < weight(*best))) best = g;
    REQUIRE(best);
    CHECK(*best == stabilize(mu, bp));
  }

  SUBCASE("fixed point on random terms") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      cfg.max_complexity = 10;
      PTerm p = gen_p(cfg);
      BranchingPartition bp = branching_partition(derivatives(p));
      Distribution s = stabilize(den(p), bp);
      CHECK(stabilize(s, bp) == s);
      CHECK(weak_reachable(den(p), s));
      CHECK(bp.engine().equiv(s, den(p)));
    }
  }
}

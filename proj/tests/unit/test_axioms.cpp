#include "common.hpp"
#include "doctest.h"

#include "pbisim/axioms.hpp"
#include "pbisim/harness.hpp"
#include "pbisim/prover.hpp"

using namespace pbisim;
using namespace testutil;

namespace {

RewriteStep step(AxiomId id, Substitution s, Position pos = {}, Direction d = Direction::LR) {
  RewriteStep st;
  st.axiom = id;
  st.subst = std::move(s);
  st.position = std::move(pos);
  st.direction = d;
  return st;
}

}  // namespace

TEST_CASE("axiom names round trip") {
  for (int i = 0; i <= static_cast<int>(AxiomId::SBP3); ++i) {
    auto id = static_cast<AxiomId>(i);
    CHECK(axiom_from_name(axiom_name(id)) == id);
  }
  CHECK_FALSE(axiom_from_name("Z9").has_value());
}

TEST_CASE("P2 re-weighting") {
  Substitution s;
  s.p["P"] = P("D(a.D(0))");
  s.p["Q"] = P("D(b.D(0))");
  s.p["R"] = P("D(c.D(0))");
  s.num["r"] = R(1, 2);
  s.num["s"] = R(1, 2);
  auto [l, r] = instantiate(AxiomId::P2, s);
  CHECK(den(l.p()) == den(r.p()));
}

TEST_CASE("every axiom instance is sound") {
  // Unconditional axioms under arbitrary substitutions.
  Substitution s;
  s.alpha = Action("a");
  s.nd["E"] = N("b.D(0)");
  s.nd["F"] = N("tau.D(c.D(0))");
  s.nd["G"] = N("0");
  s.p["P"] = P("D(b.D(0))");
  s.p["Q"] = P("D(c.D(0)) +[1/4] D(0)");
  s.p["R"] = P("D(d.D(0))");
  s.num["r"] = R(1, 3);
  s.num["s"] = R(2, 5);
  for (AxiomId id : {AxiomId::A1, AxiomId::A2, AxiomId::A3, AxiomId::A4, AxiomId::P1, AxiomId::P2, AxiomId::P3,
                     AxiomId::C, AxiomId::B, AxiomId::SBP2, AxiomId::SBP3}) {
    auto [l, r] = instantiate(id, s);
    PTerm lp = l.is_nd() ? PTerm::dirac(l.nd()) : l.p();
    PTerm rp = r.is_nd() ? PTerm::dirac(r.nd()) : r.p();
    CHECK_MESSAGE(rooted_branching_equiv(lp, rp).equivalent, axiom_name(id));
  }
}

TEST_CASE("normalize_nd") {
  CHECK(normalize_nd(N("0 + b.D(0)")).first == N("b.D(0)"));
  CHECK(normalize_nd(N("a.D(0) + a.D(0)")).first == N("a.D(0)"));
  CHECK(normalize_nd(N("b.D(0) + a.D(0)")).first == N("a.D(0) + b.D(0)"));
  CHECK(normalize_nd(N("0 + 0")).first == N("0"));
  auto [e, tr] = normalize_nd(N("(c.D(0) + 0) + (a.D(b.D(0) + a.D(0)) + c.D(0))"));
  CHECK(e == N("a.D(a.D(0) + b.D(0)) + c.D(0)"));
  CHECK(replay(tr) == Term(e));
}

TEST_CASE("normalize_p") {
  CHECK(normalize_p(P("D(0) +[1/2] D(0)")).first == P("D(0)"));
  auto d = flat_decomposition(P("D(0) +[1/2] D(0)"));
  REQUIRE(d.parts.size() == 1);
  CHECK(d.parts[0].first == 1);

  PTerm nested = P("(D(a.D(0)) +[1/2] D(b.D(0))) +[1/2] D(c.D(0))");
  auto [flat, tr] = normalize_p(nested);
  CHECK(replay(tr) == Term(flat));
  auto parts = flat_decomposition(nested);
  REQUIRE(parts.parts.size() == 3);
  std::map<NdTerm, Rational> w;
  for (auto& [r, mu] : parts.parts) w[mu.entries().begin()->first] = r;
  CHECK(w[N("a.D(0)")] == R(1, 4));
  CHECK(w[N("b.D(0)")] == R(1, 4));
  CHECK(w[N("c.D(0)")] == R(1, 2));
  CHECK(convex_sum(parts) == den(nested));

  auto [swapped, tr2] = normalize_p(P("D(b.D(0)) +[1/3] D(a.D(0))"));
  CHECK(swapped == P("D(a.D(0)) +[2/3] D(b.D(0))"));
  CHECK(tr2.steps.at(0).axiom == AxiomId::P1);
}

TEST_CASE("normalization is idempotent and replayable") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 14;
    PTerm p = gen_p(cfg);
    auto [n, tr] = normalize_p(p);
    CHECK(normalize_p(n).first == n);
    CHECK(normalize_p(n).second.steps.empty());
    CHECK(replay(tr) == Term(n));
    CHECK(den(n) == convex_sum(flat_decomposition(p)));
    NdTerm e = gen_nd(cfg);
    auto [m, tr2] = normalize_nd(e);
    CHECK(normalize_nd(m).first == m);
    CHECK(replay(tr2) == Term(m));
  }
}

TEST_CASE("apply_axiom: BP worked example") {
  std::string pp = "D(a.D(0) + b.D(0)) +[1/2] D(b.D(0))";
  Substitution s;
  s.alpha = Action("a");
  s.nd["E"] = N("b.D(0)");
  s.p["P"] = P(pp);
  s.p["Q"] = P("D(c.D(0))");
  s.num["r"] = R(1, 3);
  NdTerm before = N("a.(D(b.D(0) + tau.(" + pp + ")) +[1/3] D(c.D(0)))");
  Term after = apply_axiom(before, step(AxiomId::BP, s));
  CHECK(after == Term(N("a.((" + pp + ") +[1/3] D(c.D(0)))")));
  CHECK(apply_axiom(after, step(AxiomId::BP, s, {}, Direction::RL)) == Term(before));
  CHECK(rooted_branching_equiv_states(before, after.nd()).equivalent);
}

TEST_CASE("apply_axiom: C with weight 5/12") {
  Substitution s;
  s.alpha = Action("a");
  s.p["P"] = P("D(b.D(0))");
  s.p["Q"] = P("D(c.D(0))");
  s.num["r"] = R(5, 12);
  Term after = apply_axiom(N("a.D(b.D(0)) + a.D(c.D(0))"), step(AxiomId::C, s));
  CHECK(after == Term(N("a.D(b.D(0)) + (a.(D(b.D(0)) +[5/12] D(c.D(0))) + a.D(c.D(0)))")));
  CHECK(strong_equiv(P("D(a.D(b.D(0)) + a.D(c.D(0)))"), PTerm::dirac(after.nd())).equivalent);
}

TEST_CASE("apply_axiom: G") {
  Substitution s;
  s.alpha = Action("a");
  s.nd["E"] = N("b.D(0)");
  s.nd["F"] = N("b.D(0) + tau.D(0)");
  s.p["Q"] = P("D(c.D(0))");
  s.num["r"] = R(1, 2);
  Term after = apply_axiom(N("a.(D(b.D(0) + (b.D(0) + tau.D(0))) +[1/2] D(c.D(0)))"), step(AxiomId::G, s));
  CHECK(after == Term(N("a.(D(b.D(0) + tau.D(0)) +[1/2] D(c.D(0)))")));
}

TEST_CASE("apply_axiom at a position and errors") {
  Substitution s;
  s.nd["E"] = N("b.D(0)");
  s.nd["F"] = N("a.D(0)");
  NdTerm t = N("c.D(b.D(0) + a.D(0))");
  CHECK(apply_axiom(t, step(AxiomId::A1, s, {0, 0})) == Term(N("c.D(a.D(0) + b.D(0))")));
  CHECK_THROWS_AS(apply_axiom(t, step(AxiomId::A1, s, {0, 0, 0, 0, 0, 0})), PositionError);
  CHECK_THROWS_AS(apply_axiom(t, step(AxiomId::A1, s, {1})), PositionError);
  CHECK_THROWS_AS(apply_axiom(t, step(AxiomId::A1, s, {})), SubstitutionError);
  Substitution missing;
  CHECK_THROWS_AS(apply_axiom(t, step(AxiomId::A1, missing, {0, 0})), SubstitutionError);

  Substitution bad;
  bad.alpha = Action("a");
  bad.nd["E"] = N("c.D(0)");
  bad.p["P"] = P("D(b.D(0))");
  bad.p["Q"] = P("D(0)");
  bad.num["r"] = R(1, 2);
  NdTerm before = N("a.(D(c.D(0) + tau.D(b.D(0))) +[1/2] D(0))");
  CHECK_THROWS_AS(apply_axiom(before, step(AxiomId::BP, bad)), SideConditionError);
  CHECK_NOTHROW(apply_axiom(before, step(AxiomId::BP, bad), false));

  ProofTrace tr{before, {step(AxiomId::BP, bad)}, N("a.(D(b.D(0)) +[1/2] D(0))")};
  CHECK_THROWS_AS(replay(tr), SideConditionError);
}

TEST_CASE("reversed traces replay backwards") {
  auto [n, tr] = normalize_p(P("(D(c.D(0)) +[1/3] D(b.D(0) + a.D(0))) +[1/2] D(c.D(0))"));
  ProofTrace back = reversed(tr);
  CHECK(back.start == tr.end);
  CHECK(back.end == tr.start);
  CHECK(replay(back) == tr.start);
}

TEST_CASE("derived simple BP laws") {
  auto [e3, t3] = derived_simple_bp(3, N("a.D(tau.D(b.D(0)))"));
  CHECK(e3 == N("a.D(b.D(0))"));
  CHECK(replay(t3) == Term(e3));

  std::string pr = "D(b.D(0)) +[1/2] D(c.D(0))";
  auto [e2, t2] = derived_simple_bp(2, N("a.(D(tau.(" + pr + ")) +[1/3] D(d.D(0)))"));
  CHECK(e2 == N("a.((" + pr + ") +[1/3] D(d.D(0)))"));
  CHECK(replay(t2) == Term(e2));

  auto [e1, t1] = derived_simple_bp(1, N("a.D(b.D(0) + tau.(D(b.D(0)) +[1/2] D(c.D(0) + b.D(0))))"));
  CHECK(e1 == N("a.(D(b.D(0)) +[1/2] D(c.D(0) + b.D(0)))"));
  CHECK(replay(t1) == Term(e1));

  // a trivial guard reduces the first law to the third
  auto [e0, t0] = derived_simple_bp(1, N("a.D(0 + tau.D(b.D(0)))"));
  CHECK(e0 == e3);

  CHECK_THROWS_AS(derived_simple_bp(3, N("a.D(b.D(0))")), ShapeError);
  CHECK_THROWS_AS(derived_simple_bp(1, N("a.D(c.D(0) + tau.D(b.D(0)))")), SideConditionError);
}

TEST_CASE("concretize_nd") {
  BranchingEngine en;
  auto check_case = [&](const std::string& in, const std::string& out) {
    ProofTrace tr = concretize_nd(N(in), Action("a"), &en);
    CHECK(tr.start == Term(N("a.D(" + in + ")")));
    CHECK(tr.end == Term(N("a.D(" + out + ")")));
    CHECK(replay(tr, true, &en) == tr.end);
    for (auto& s : tr.steps) {
      bool allowed = s.axiom == AxiomId::A1 || s.axiom == AxiomId::A2 || s.axiom == AxiomId::A3 ||
                     s.axiom == AxiomId::A4 || s.axiom == AxiomId::B;
      CHECK(allowed);
    }
    CHECK(is_concrete(N(out), &en));
    CHECK(branching_equiv(P("D(" + in + ")"), P("D(" + out + ")"), &en).equivalent);
  };
  check_case("tau.D(0) + b.D(0)", "b.D(0) + tau.D(0)");
  check_case("a.D(tau.D(0))", "a.D(0)");
  check_case("0", "0");
  check_case("tau.D(b.D(0)) + b.D(0)", "b.D(0)");
  check_case("b.D(0) + tau.D(b.D(0) + c.D(0))", "b.D(0) + c.D(0)");
  CHECK_THROWS_AS(concretize_nd(N("a.(D(0) +[1/2] D(b.D(0)))")), FragmentError);
}

TEST_CASE("concretize") {
  BranchingEngine en;
  auto body = [&](const std::string& in) {
    ProofTrace tr = concretize(P(in), Action("a"), &en);
    CHECK(replay(tr, true, &en) == tr.end);
    return tr.end.nd().body();
  };
  CHECK(body("D(tau.D(a.D(0)))") == P("D(a.D(0))"));
  CHECK(body("D(0)") == P("D(0)"));
  std::string bq = "b.D(c.D(0)) + tau.D(d.D(0))";
  CHECK(body("D(tau.(D(" + bq + ") +[1/2] D(d.D(0))) + " + bq + ")") == P("D(" + bq + ")"));

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    cfg.max_complexity = 12;
    PTerm p = gen_p(cfg);
    PTerm c = body(p.str());
    CHECK(is_concrete(c, &en));
    CHECK(normalize_p(body(c.str())).first == normalize_p(c).first);
  }
}

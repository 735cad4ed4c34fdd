#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "pargus/gr1.hpp"
#include "oracle.hpp"
#include "testutil.hpp"

using namespace pargus;
using namespace testutil;

namespace {
std::string slurp_first(std::initializer_list<const char*> paths) {
  for (const char* p : paths) {
    std::ifstream f(p);
    if (f.good()) {
      std::ostringstream os;
      os << f.rdbuf();
      return os.str();
    }
  }
  REQUIRE(false);
  return "";
}

ParamSpec intro_spec() {
  return parse_spec(slurp_first({"benchmarks/intro_example.spec", "../benchmarks/intro_example.spec",
                                 "../../benchmarks/intro_example.spec"}),
                    "intro_example");
}

// compares a symbolic state predicate against an explicit set, state for state
void check_matches(const ExplicitGr1& oracle, const Term& pred, const std::vector<bool>& want) {
  const auto& states = oracle.states();
  for (size_t s = 0; s < states.size(); ++s) {
    INFO("state ", s);
    CHECK(evaluate(pred, states[s]).as_bool() == want[s]);
  }
}
}  // namespace

TEST_CASE("coax basics on the intro example at (0,2)") {
  SolverSession session;
  ConcreteSpec c = instantiate(intro_spec(), {{"min", 0}, {"max", 2}});
  Gr1Solver solver(c, session);
  ExplicitGr1 oracle(c, -2, 4, -1, 1);

  CHECK(solver.coax(mk_false()).is_false());

  Term all = solver.coax(mk_true());
  check_matches(oracle, all, oracle.coax(std::vector<bool>(oracle.states().size(), true)));
  auto sc = intro_spec().scope();
  CHECK(session.equivalent(all, parse_term("0 <= x && x <= 2", intro_spec().scope())));

  Term goal = parse_term("x = 0", intro_spec().scope());
  Term pre_goal = solver.coax(instantiate_params(goal, c.origin));
  check_matches(oracle, pre_goal, oracle.coax(oracle.satisfying(goal)));
}

TEST_CASE("fixpoint reproduces the paper's invariants") {
  SolverSession session;
  ParamSpec spec = intro_spec();
  auto sc = spec.scope();

  ConcreteSpec c02 = instantiate(spec, {{"min", 0}, {"max", 2}});
  Gr1Solver s02(c02, session);
  auto r02 = s02.solve_fixpoint();
  REQUIRE(r02.status == FixpointStatus::Realizable);
  CHECK(session.equivalent(r02.iterates.inv, parse_term("0 <= x && x <= 2", sc)));

  // state-for-state against the explicit oracle over x in [-2,4], d in [-1,1]
  ExplicitGr1 oracle(c02, -2, 4, -1, 1);
  check_matches(oracle, r02.iterates.inv, oracle.winning_region());

  ConcreteSpec c13 = instantiate(spec, {{"min", 1}, {"max", 3}});
  Gr1Solver s13(c13, session);
  auto r13 = s13.solve_fixpoint();
  REQUIRE(r13.status == FixpointStatus::Realizable);
  CHECK(session.equivalent(r13.iterates.inv, parse_term("1 <= x && x <= 3", sc)));
}

TEST_CASE("iterate chain is monotone and topped by inv") {
  SolverSession session;
  ConcreteSpec c = instantiate(intro_spec(), {{"min", 0}, {"max", 2}});
  Gr1Solver solver(c, session);
  auto r = solver.solve_fixpoint();
  REQUIRE(r.status == FixpointStatus::Realizable);
  const auto& it = r.iterates;
  for (size_t j = 0; j < it.mY.size(); ++j) {
    for (int rr = 0; rr + 1 <= it.maxr[j]; ++rr)
      CHECK(session.valid(mk_implies(it.mY[j][rr], it.mY[j][rr + 1])));
    CHECK(session.equivalent(it.mY[j][it.maxr[j]], it.inv));
  }
}

TEST_CASE("unsatisfiable guarantee is unrealizable") {
  SolverSession session;
  ParamSpec spec = intro_spec();
  spec.justice_guarantees.push_back(mk_false());
  ConcreteSpec c = instantiate(spec, {{"min", 0}, {"max", 2}});
  auto r = solve_fixpoint(c, session);
  CHECK(r.status == FixpointStatus::Unrealizable);
}

TEST_CASE("wp") {
  SolverSession session;
  ConcreteSpec c = instantiate(intro_spec(), {{"min", 0}, {"max", 2}});
  Gr1Solver solver(c, session);
  auto sc = intro_spec().scope();

  // S = true: wp = env_trans -> guard
  Term w1 = solver.wp(mk_true(), c.actions[1]);
  CHECK(session.equivalent(w1, mk_implies(c.env_trans, c.actions[1].guard)));

  // S = (x = 0), stay action x' = x + d: wp = env_trans -> (g && x + d = 0)
  Term w2 = solver.wp(parse_term("x = 0", sc), c.actions[1]);
  CHECK(session.equivalent(
      w2, mk_implies(c.env_trans, mk_and(c.actions[1].guard, parse_term("x + d = 0", sc)))));
}

TEST_CASE("extracted strategy matches the paper at (0,2)") {
  SolverSession session;
  ConcreteSpec c = instantiate(intro_spec(), {{"min", 0}, {"max", 2}});
  Gr1Solver solver(c, session);
  auto r = solver.solve_fixpoint();
  REQUIRE(r.status == FixpointStatus::Realizable);
  ConcreteSystem sys = solver.extract_strategy(r.iterates);
  REQUIRE(sys.substrategies.size() == 2);
  REQUIRE(sys.substrategies[0].size() == 3);

  auto sc = intro_spec().scope();
  // substrategy j only ever executes at states where its goal is not already
  // satisfied (the counter advances first otherwise), so guards are compared
  // under that execution context
  Term ctx1 = conj({sys.inv, c.env_trans, mk_not(c.justice_guarantees[0])});
  // substrategy 1 (targeting x = min): move-left guard x + d >= 1, stay guard
  // x + d < 1, move-right never needed
  Term left = sys.substrategies[0][0].guard;
  Term stay = sys.substrategies[0][1].guard;
  Term right = sys.substrategies[0][2].guard;
  CHECK(session.equivalent(left, parse_term("x + d >= 1", sc), ctx1));
  CHECK(session.equivalent(stay, parse_term("x + d < 1", sc), mk_and(ctx1, mk_not(left))));
  CHECK(session.equivalent(right, mk_false(), ctx1));

  // guards are mutually exclusive by construction
  CHECK(session.check_sat(mk_and(left, stay)).unsat());

  // deadlock freedom at the states where substrategy j executes
  for (size_t j = 0; j < sys.substrategies.size(); ++j) {
    Terms guards;
    for (const auto& a : sys.substrategies[j]) guards.push_back(a.guard);
    SatResult dead = session.check_sat(
        conj({sys.inv, mk_not(sys.justice_guarantees[j]), c.env_trans, mk_not(disj(guards))}));
    CHECK(dead.unsat());
  }

  // strategy containment: gamma && inv -> spec guard
  for (size_t j = 0; j < sys.substrategies.size(); ++j)
    for (size_t a = 0; a < sys.substrategies[j].size(); ++a)
      CHECK(session.valid(
          mk_implies(mk_and(sys.substrategies[j][a].guard, sys.inv), c.actions[a].guard)));

  // updates are preserved positionally
  for (size_t j = 0; j < sys.substrategies.size(); ++j)
    for (size_t a = 0; a < sys.substrategies[j].size(); ++a)
      CHECK(sys.substrategies[j][a].updates == c.actions[a].updates);
}

TEST_CASE("single guarantee wraps the counter") {
  SolverSession session;
  ParamSpec spec = parse_spec(
      "state x: int init 0;\n"
      "input s: int;\n"
      "envtrans 0 <= s && s <= 1;\n"
      "action true |-> x := x;\n"
      "guarantee G 0 <= x && x <= 1;\n"
      "guarantee GF x = 0;\n");
  ConcreteSpec c = instantiate(spec, {});
  Gr1Solver solver(c, session);
  auto r = solver.solve_fixpoint();
  REQUIRE(r.status == FixpointStatus::Realizable);
  ConcreteSystem sys = solver.extract_strategy(r.iterates);
  CHECK(sys.n() == 1);
}

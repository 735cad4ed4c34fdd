#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pargus/lin.hpp"
#include "testutil.hpp"

using namespace pargus;
using namespace testutil;

namespace {

// Enumerate all valuations of the given int variables over [lo, hi].
template <class Fn>
void enumerate_box(const std::vector<VarRef>& vs, int lo, int hi, Valuation& v, size_t i, Fn&& fn) {
  if (i == vs.size()) {
    fn(v);
    return;
  }
  if (vs[i].sort.is_bool()) {
    for (bool b : {false, true}) {
      v[VarKey(vs[i])] = Value::of_bool(b);
      enumerate_box(vs, lo, hi, v, i + 1, fn);
    }
    return;
  }
  for (int x = lo; x <= hi; ++x) {
    v[VarKey(vs[i])] = Value::of_int(x);
    enumerate_box(vs, lo, hi, v, i + 1, fn);
  }
}

bool brute_sat(const Term& t, int lo, int hi) {
  auto vset = vars(t);
  std::vector<VarRef> vs(vset.begin(), vset.end());
  bool found = false;
  Valuation v;
  enumerate_box(vs, lo, hi, v, 0, [&](const Valuation& val) {
    if (!found && evaluate(t, val).as_bool()) found = true;
  });
  return found;
}

Term bound_box(const std::vector<VarRef>& vs, int lo, int hi) {
  Terms cs;
  for (const auto& v : vs) {
    cs.push_back(mk_ge(mk_var(v), mk_int(lo)));
    cs.push_back(mk_le(mk_var(v), mk_int(hi)));
  }
  return conj(std::move(cs));
}

}  // namespace

TEST_CASE("sat on simple examples") {
  VarRef x = ivar("x"), y = ivar("y");
  lin::Solver s;
  auto r1 = s.solve(mk_and(mk_gt(mk_var(x), mk_int(0)), mk_lt(mk_var(x), mk_int(0))));
  CHECK(r1.kind == lin::SolveResult::Unsat);

  Term t2 = mk_and(mk_eq(mk_var(x), mk_int(5)), mk_eq(mk_var(y), mk_var(x)));
  auto r2 = s.solve(t2);
  REQUIRE(r2.kind == lin::SolveResult::Sat);
  CHECK(r2.model.at(VarKey(y)).as_int() == 5);
  CHECK(evaluate(t2, r2.model).as_bool());
}

TEST_CASE("sat with non-unit coefficients and divisibility reasoning") {
  VarRef x = ivar("x"), y = ivar("y");
  lin::Solver s;
  // 2x = 5 has no integer solution
  auto r = s.solve(mk_eq(mk_mul(Rat(2), mk_var(x)), mk_int(5)));
  CHECK(r.kind == lin::SolveResult::Unsat);
  // 2x = y && 7 <= y <= 8 forces y = 8
  Term t = conj({mk_eq(mk_mul(Rat(2), mk_var(x)), mk_var(y)), mk_ge(mk_var(y), mk_int(7)),
                 mk_le(mk_var(y), mk_int(8))});
  auto r2 = s.solve(t);
  REQUIRE(r2.kind == lin::SolveResult::Sat);
  CHECK(r2.model.at(VarKey(y)).as_int() == 8);
  // 3x - 3y = 1 infeasible
  Term t3 = mk_eq(mk_sub(mk_mul(Rat(3), mk_var(x)), mk_mul(Rat(3), mk_var(y))), mk_int(1));
  CHECK(s.solve(t3).kind == lin::SolveResult::Unsat);
}

TEST_CASE("sat with reals") {
  VarRef r = rvar("r"), x = ivar("x");
  lin::Solver s;
  // x < r < x + 1 is satisfiable over reals
  Term t = mk_and(mk_lt(mk_var(x), mk_var(r)), mk_lt(mk_var(r), mk_add(mk_var(x), mk_int(1))));
  auto res = s.solve(t);
  REQUIRE(res.kind == lin::SolveResult::Sat);
  CHECK(evaluate(t, res.model).as_bool());
  // 2r = 1 with r real
  auto res2 = s.solve(mk_eq(mk_mul(Rat(2), mk_var(r)), mk_int(1)));
  REQUIRE(res2.kind == lin::SolveResult::Sat);
  CHECK(res2.model.at(VarKey(r)).as_rat() == Rat(1, 2));
  // floor: floor(r) = 2 && r >= 2.5 is fine; with r < 2 contradictory
  Term fl = mk_eq(mk_floor(mk_var(r)), mk_int(2));
  auto res3 = s.solve(mk_and(fl, mk_ge(mk_var(r), mk_real(Rat(5, 2)))));
  REQUIRE(res3.kind == lin::SolveResult::Sat);
  CHECK(evaluate(mk_and(fl, mk_ge(mk_var(r), mk_real(Rat(5, 2)))), res3.model).as_bool());
  CHECK(s.solve(mk_and(fl, mk_lt(mk_var(r), mk_int(2)))).kind == lin::SolveResult::Unsat);
}

TEST_CASE("random sat agreement with box enumeration") {
  RandomTerms gen(2024);
  lin::Solver solver;
  int sat_n = 0, unsat_n = 0;
  for (int i = 0; i < 400; ++i) {
    Term body = gen.boolean(3);
    auto vset = vars(body);
    std::vector<VarRef> vs(vset.begin(), vset.end());
    Term t = vs.empty() ? body : mk_and(bound_box(vs, -3, 3), body);
    auto r = solver.solve(t);
    bool brute = brute_sat(t, -3, 3);
    REQUIRE(r.kind != lin::SolveResult::Unknown);
    if (r.kind == lin::SolveResult::Sat) {
      ++sat_n;
      Valuation m = r.model;
      for (const auto& v : vars(t))
        if (!m.count(VarKey(v)))
          m[VarKey(v)] = v.sort.is_bool() ? Value::of_bool(false) : Value::of_int(0);
      CHECK(evaluate(t, m).as_bool());
      CHECK(brute);
    } else {
      ++unsat_n;
      CHECK(!brute);
    }
  }
  CHECK(sat_n > 50);
  CHECK(unsat_n > 50);
}

TEST_CASE("qe one-point and trivial cases") {
  VarRef x = ivar("x"), y = ivar("y");
  Term q = mk_exists({x}, mk_and(mk_eq(mk_var(x), mk_int(5)), mk_eq(mk_var(y), mk_var(x))));
  Term r = lin::qe(q);
  CHECK(!has_var_class(r, VarClass::Hole));
  for (i64 yv = -8; yv <= 8; ++yv) {
    Valuation v{{VarKey(y), Value::of_int(yv)}};
    CHECK(evaluate(r, v).as_bool() == (yv == 5));
  }
  // quantifier-free input passes through
  Term qf = mk_le(mk_var(y), mk_int(3));
  CHECK(lin::qe(qf) == qf);
}

TEST_CASE("qe with divisibility: exists x. 2x = y") {
  VarRef x = ivar("x"), y = ivar("y");
  Term q = mk_exists({x}, mk_eq(mk_mul(Rat(2), mk_var(x)), mk_var(y)));
  Term r = lin::qe(q);
  for (i64 yv = -6; yv <= 6; ++yv) {
    Valuation v{{VarKey(y), Value::of_int(yv)}};
    CHECK(evaluate(r, v).as_bool() == (yv % 2 == 0));
  }
  // the emitted divisibility pattern round-trips through the solver
  lin::Solver s;
  Term odd = mk_and(r, mk_eq(mk_var(y), mk_int(3)));
  CHECK(s.solve(odd).kind == lin::SolveResult::Unsat);
  Term even = mk_and(r, mk_eq(mk_var(y), mk_int(4)));
  CHECK(s.solve(even).kind == lin::SolveResult::Sat);
}

TEST_CASE("qe over reals") {
  VarRef r = rvar("r");
  VarRef a = ivar("a");
  // exists r. a < r && r < a + 1  (true for all integer a over the reals)
  Term q = mk_exists({r}, mk_and(mk_lt(mk_var(a), mk_var(r)), mk_lt(mk_var(r), mk_add(mk_var(a), mk_int(1)))));
  Term out = lin::qe(q);
  for (i64 av = -4; av <= 4; ++av) {
    Valuation v{{VarKey(a), Value::of_int(av)}};
    CHECK(evaluate(out, v).as_bool());
  }
  // forall r. r <= a  is false for every a
  Term q2 = mk_forall({r}, mk_le(mk_var(r), mk_var(a)));
  Term out2 = lin::qe(q2);
  for (i64 av = -4; av <= 4; ++av) {
    Valuation v{{VarKey(a), Value::of_int(av)}};
    CHECK(!evaluate(out2, v).as_bool());
  }
}

TEST_CASE("qe bounded-domain agreement on random formulas") {
  // 100 random quantified formulas over 5-value boxes ([-2,2])
  std::vector<VarRef> pool{ivar("x"), ivar("y"), ivar("z")};
  RandomTerms gen(31337, pool);
  int checked = 0;
  for (int round = 0; round < 100; ++round) {
    Term body = gen.linear_bool(3);
    // choose a nonempty subset to quantify
    std::vector<VarRef> bound, free;
    for (const auto& v : pool) (gen.ri(0, 1) ? bound : free).push_back(v);
    if (bound.empty()) bound.push_back(pool[gen.ri(0, 2)]);
    bool universal = gen.ri(0, 1) == 1;
    Term boxed = universal ? mk_implies(bound_box(bound, -2, 2), body)
                           : mk_and(bound_box(bound, -2, 2), body);
    Term q = universal ? mk_forall(bound, boxed) : mk_exists(bound, boxed);
    Term elim = lin::qe(q);
    CHECK(vars(elim).size() <= free.size() + 0);

    Valuation fv;
    enumerate_box(free, -2, 2, fv, 0, [&](const Valuation& outer) {
      // brute-force the quantifier over the box
      bool truth = universal;
      Valuation inner = outer;
      enumerate_box(bound, -2, 2, inner, 0, [&](const Valuation& full) {
        bool b = evaluate(boxed, full).as_bool();
        if (universal) truth = truth && b;
        else truth = truth || b;
      });
      Valuation restricted = outer;
      CHECK(evaluate(elim, restricted).as_bool() == truth);
      ++checked;
    });
  }
  CHECK(checked > 0);
}

TEST_CASE("lifting of ite and abs in queries") {
  VarRef x = ivar("x"), b = bvar("b");
  lin::Solver s;
  Term t = mk_eq(mk_ite(mk_var(b), mk_var(x), mk_neg(mk_var(x))), mk_int(4));
  auto r = s.solve(mk_and(t, mk_lt(mk_var(x), mk_int(0))));
  REQUIRE(r.kind == lin::SolveResult::Sat);
  Valuation m = r.model;
  CHECK(evaluate(mk_and(t, mk_lt(mk_var(x), mk_int(0))), m).as_bool());

  Term abs_t = mk_and(mk_eq(mk_abs(mk_sub(mk_var(x), mk_int(3))), mk_int(2)), mk_lt(mk_var(x), mk_int(3)));
  auto r2 = s.solve(abs_t);
  REQUIRE(r2.kind == lin::SolveResult::Sat);
  CHECK(r2.model.at(VarKey(x)).as_int() == 1);
}

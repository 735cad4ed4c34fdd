#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pargus/antiunify.hpp"
#include "pargus/normalize.hpp"
#include "pargus/term_parser.hpp"
#include "testutil.hpp"

using namespace pargus;
using namespace testutil;

namespace {
VarScope xy_scope() { return scope_of({ivar("x"), ivar("y"), ivar("a"), ivar("z")}); }

// substitution tuples per hole, for minimality checks
std::map<std::string, Terms> tuples_of(const AntiUnifyResult& r) {
  std::map<std::string, Terms> m;
  for (const auto& s : r.substitutions)
    for (const auto& [h, t] : s.map) m[h].push_back(t);
  return m;
}
}  // namespace

TEST_CASE("golden example") {
  auto sc = xy_scope();
  Term e1 = parse_term("x <= 1 && y <= 1", sc);
  Term e2 = parse_term("x <= 2 && y <= 2", sc);
  auto r = anti_unify({e1, e2});

  VarRef h{"h1", VarClass::Hole, int_sort()};
  Term expected = mk_and(mk_le(parse_term("x", sc), mk_var(h)), mk_le(parse_term("y", sc), mk_var(h)));
  CHECK(r.generalizer == expected);
  REQUIRE(r.substitutions.size() == 2);
  CHECK(r.substitutions[0].map.size() == 1);
  CHECK(r.substitutions[0].map.at("h1") == mk_int(1));
  CHECK(r.substitutions[1].map.at("h1") == mk_int(2));
}

TEST_CASE("identical inputs give empty substitutions") {
  auto sc = xy_scope();
  Term e = parse_term("x + 1 <= y", sc);
  auto r = anti_unify({e, e});
  CHECK(r.generalizer == e);
  CHECK(r.substitutions[0].empty());
  CHECK(r.substitutions[1].empty());
}

TEST_CASE("interval labels from the generalization tree") {
  auto sc = xy_scope();
  Term e1 = parse_term("a >= 2 && a <= 4", sc);
  Term e2 = parse_term("a >= 1 && a <= 3", sc);
  auto r = anti_unify({e1, e2});
  VarRef h1{"h1", VarClass::Hole, int_sort()}, h2{"h2", VarClass::Hole, int_sort()};
  Term expected = mk_and(mk_ge(parse_term("a", sc), mk_var(h1)), mk_le(parse_term("a", sc), mk_var(h2)));
  CHECK(r.generalizer == expected);
  CHECK(r.substitutions[0].map.at("h1") == mk_int(2));
  CHECK(r.substitutions[0].map.at("h2") == mk_int(4));
  CHECK(r.substitutions[1].map.at("h1") == mk_int(1));
  CHECK(r.substitutions[1].map.at("h2") == mk_int(3));
}

TEST_CASE("multiplication constants stay opaque") {
  auto sc = xy_scope();
  // 9x vs 10x must not generalize to h*x
  Term e1 = parse_term("9 * x <= 1", sc);
  Term e2 = parse_term("10 * x <= 1", sc);
  auto r = anti_unify({e1, e2});
  // the whole left side becomes one hole
  CHECK(r.generalizer.op() == Op::Le);
  CHECK(r.generalizer.kid(0).op() == Op::Var);
  CHECK(r.generalizer.kid(0).var().cls == VarClass::Hole);
}

TEST_CASE("reconstruction and hole minimality on random pairs") {
  RandomTerms gen(909);
  for (int i = 0; i < 500; ++i) {
    Term a = gen.boolean(3), b = gen.boolean(3);
    auto r = anti_unify({a, b});
    CHECK(substitute(r.generalizer, r.substitutions[0]) == a);
    CHECK(substitute(r.generalizer, r.substitutions[1]) == b);
    // minimality: no two holes share the same tuple
    auto tuples = tuples_of(r);
    std::set<std::string> keys;
    for (const auto& [h, ts] : tuples) {
      std::string key;
      for (const auto& t : ts) key += to_string(t) + "|";
      CHECK(keys.insert(key).second);
    }
  }
}

TEST_CASE("multi-way sets and permutation invariance") {
  auto sc = xy_scope();
  Terms es{parse_term("a >= 2 && a <= 4", sc), parse_term("a >= 1 && a <= 3", sc),
           parse_term("a >= 0 && a <= 9", sc)};
  auto r = anti_unify(es);
  for (size_t k = 0; k < es.size(); ++k) CHECK(substitute(r.generalizer, r.substitutions[k]) == es[k]);

  Terms perm{es[2], es[0], es[1]};
  auto rp = anti_unify(perm);
  // same generalizer up to hole renaming: here names coincide because both
  // assign h1,h2 in first-occurrence order
  CHECK(rp.generalizer == r.generalizer);
  CHECK(rp.substitutions[1].map == r.substitutions[0].map);
}

TEST_CASE("generalization recovered from instantiations") {
  auto sc = xy_scope();
  RandomTerms gen(117);
  VarRef h1{"h1", VarClass::Hole, int_sort()}, h2{"h2", VarClass::Hole, int_sort()};
  for (int i = 0; i < 100; ++i) {
    // plant a generalizer with two holes, instantiate with distinct ground pairs
    Term g = mk_and(mk_le(mk_var(ivar("x")), mk_var(h1)),
                    mk_or(mk_ge(mk_var(ivar("y")), mk_var(h2)), mk_le(mk_var(ivar("x")), mk_var(h2))));
    i64 a1 = gen.ri(-9, 9), a2 = gen.ri(-9, 9), b1 = gen.ri(-9, 9), b2 = gen.ri(-9, 9);
    if (a1 == b1 || a2 == b2 || a1 == a2 || b1 == b2) continue;  // keep tuples distinct
    Substitution s1, s2;
    s1.map = {{"h1", mk_int(a1)}, {"h2", mk_int(a2)}};
    s2.map = {{"h1", mk_int(b1)}, {"h2", mk_int(b2)}};
    auto r = anti_unify({substitute(g, s1), substitute(g, s2)});
    CHECK(r.generalizer == g);
  }
}

TEST_CASE("single input") {
  auto sc = xy_scope();
  Term e = parse_term("x <= 1", sc);
  auto r = anti_unify({e});
  CHECK(r.generalizer == e);
  CHECK(r.substitutions.size() == 1);
  CHECK(r.substitutions[0].empty());
}

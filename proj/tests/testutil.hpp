#pragma once

#include <random>

#include "pargus/normalize.hpp"
#include "pargus/term.hpp"
#include "pargus/term_parser.hpp"

namespace testutil {

using namespace pargus;

inline VarRef ivar(const std::string& n, VarClass c = VarClass::State) { return VarRef{n, c, int_sort()}; }
inline VarRef rvar(const std::string& n, VarClass c = VarClass::State) { return VarRef{n, c, real_sort()}; }
inline VarRef bvar(const std::string& n, VarClass c = VarClass::State) { return VarRef{n, c, bool_sort()}; }

inline VarScope scope_of(std::vector<VarRef> vs) {
  VarScope s;
  for (auto& v : vs) s.add(v);
  return s;
}

// Random term generators over a small pool of integer/bool variables.
class RandomTerms {
 public:
  explicit RandomTerms(uint64_t seed, std::vector<VarRef> ints = {}, std::vector<VarRef> bools = {})
      : rng_(seed), ints_(std::move(ints)), bools_(std::move(bools)) {
    if (ints_.empty()) ints_ = {ivar("x"), ivar("y"), ivar("z")};
  }

  std::mt19937_64& rng() { return rng_; }

  Term num(int depth) {
    int pick = ri(0, depth <= 0 ? 1 : 7);
    switch (pick) {
      case 0: return mk_int(ri(-6, 6));
      case 1: return mk_var(ints_[ri(0, int(ints_.size()) - 1)]);
      case 2: return mk_add(num(depth - 1), num(depth - 1));
      case 3: return mk_sub(num(depth - 1), num(depth - 1));
      case 4: return mk_neg(num(depth - 1));
      case 5: return mk_mul(Rat(ri(-10, 10)), num(depth - 1));
      case 6: return mk_abs(num(depth - 1));
      default: return mk_ite(boolean(depth - 1), num(depth - 1), num(depth - 1));
    }
  }

  Term atom(int depth) {
    int pick = ri(0, 4);
    Term a = num(depth), b = num(depth);
    switch (pick) {
      case 0: return mk_le(a, b);
      case 1: return mk_lt(a, b);
      case 2: return mk_ge(a, b);
      case 3: return mk_gt(a, b);
      default: return mk_eq(a, b);
    }
  }

  Term boolean(int depth) {
    if (depth <= 0 || ri(0, 3) == 0) {
      if (!bools_.empty() && ri(0, 2) == 0) return mk_var(bools_[ri(0, int(bools_.size()) - 1)]);
      return atom(std::max(0, depth));
    }
    switch (ri(0, 3)) {
      case 0: return mk_and(boolean(depth - 1), boolean(depth - 1));
      case 1: return mk_or(boolean(depth - 1), boolean(depth - 1));
      case 2: return mk_not(boolean(depth - 1));
      default: return mk_implies(boolean(depth - 1), boolean(depth - 1));
    }
  }

  // linear-only numeric term (no ite/abs), for quantifier elimination tests
  Term linear_num(int depth) {
    int pick = ri(0, depth <= 0 ? 1 : 4);
    switch (pick) {
      case 0: return mk_int(ri(-6, 6));
      case 1: return mk_var(ints_[ri(0, int(ints_.size()) - 1)]);
      case 2: return mk_add(linear_num(depth - 1), linear_num(depth - 1));
      case 3: return mk_sub(linear_num(depth - 1), linear_num(depth - 1));
      default: return mk_mul(Rat(ri(-3, 3)), linear_num(depth - 1));
    }
  }
  Term linear_bool(int depth) {
    if (depth <= 0 || ri(0, 3) == 0) {
      Term a = linear_num(1), b = linear_num(1);
      switch (ri(0, 4)) {
        case 0: return mk_le(a, b);
        case 1: return mk_lt(a, b);
        case 2: return mk_ge(a, b);
        case 3: return mk_gt(a, b);
        default: return mk_eq(a, b);
      }
    }
    switch (ri(0, 3)) {
      case 0: return mk_and(linear_bool(depth - 1), linear_bool(depth - 1));
      case 1: return mk_or(linear_bool(depth - 1), linear_bool(depth - 1));
      case 2: return mk_not(linear_bool(depth - 1));
      default: return mk_implies(linear_bool(depth - 1), linear_bool(depth - 1));
    }
  }

  Valuation random_valuation(const std::set<VarRef>& vs, int lo = -8, int hi = 8) {
    Valuation v;
    for (const auto& var : vs) {
      if (var.sort.is_bool()) v.emplace(VarKey(var), Value::of_bool(ri(0, 1) == 1));
      else if (var.sort.is_int()) v.emplace(VarKey(var), Value::of_int(ri(lo, hi)));
      else v.emplace(VarKey(var), Value::of_real(Rat(ri(2 * lo, 2 * hi), 2)));
    }
    return v;
  }

  int ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
  std::vector<VarRef> ints_;
  std::vector<VarRef> bools_;
};

}  // namespace testutil

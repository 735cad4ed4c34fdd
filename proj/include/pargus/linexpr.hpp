#pragma once

#include <map>
#include <optional>

#include "pargus/term.hpp"

namespace pargus {

// Linear form sum(coeff_i * var_i) + constant with exact rational coefficients.
struct LinExpr {
  std::map<VarRef, Rat> coeffs;
  Rat k;

  bool is_const() const { return coeffs.empty(); }
  bool all_int_vars() const {
    for (const auto& [v, c] : coeffs)
      if (!v.sort.is_int()) return false;
    return true;
  }
  void add_var(const VarRef& v, Rat c) {
    auto it = coeffs.find(v);
    if (it == coeffs.end()) {
      if (!c.is_zero()) coeffs.emplace(v, c);
      return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) coeffs.erase(it);
  }
  void add(const LinExpr& o, Rat scale) {
    for (const auto& [v, c] : o.coeffs) add_var(v, c * scale);
    k = k + o.k * scale;
  }
  LinExpr scaled(Rat s) const {
    LinExpr r;
    for (const auto& [v, c] : coeffs) {
      Rat cs = c * s;
      if (!cs.is_zero()) r.coeffs.emplace(v, cs);
    }
    r.k = k * s;
    return r;
  }
  LinExpr negated() const { return scaled(Rat(-1)); }

  Rat coeff(const VarRef& v) const {
    auto it = coeffs.find(v);
    return it == coeffs.end() ? Rat(0) : it->second;
  }
  LinExpr without(const VarRef& v) const {
    LinExpr r = *this;
    r.coeffs.erase(v);
    return r;
  }
  // lcm of coefficient denominators (and k's denominator)
  i64 den_lcm() const {
    i64 l = k.den;
    for (const auto& [v, c] : coeffs) l = checked_i64(i128(l) / std::gcd(l, c.den) * c.den, "den lcm");
    return l;
  }
  i64 coeff_gcd() const {  // over integer coefficients; 0 if none
    i64 g = 0;
    for (const auto& [v, c] : coeffs) {
      PARGUS_CHECK(c.is_int(), "coeff_gcd on non-integer coefficients");
      g = std::gcd(g, c.num < 0 ? -c.num : c.num);
    }
    return g;
  }
  Rat eval(const Valuation& val) const {
    Rat r = k;
    for (const auto& [v, c] : coeffs) {
      auto it = val.find(VarKey(v));
      if (it == val.end()) throw Error("unassigned variable " + v.display() + " in linear form");
      r = r + c * it->second.as_rat();
    }
    return r;
  }
  friend bool operator==(const LinExpr& a, const LinExpr& b) { return a.k == b.k && a.coeffs == b.coeffs; }
  friend bool operator<(const LinExpr& a, const LinExpr& b) {
    if (!(a.k == b.k)) return a.k < b.k;
    auto ai = a.coeffs.begin(), bi = b.coeffs.begin();
    for (; ai != a.coeffs.end() && bi != b.coeffs.end(); ++ai, ++bi) {
      if (!(ai->first == bi->first)) return ai->first < bi->first;
      if (!(ai->second == bi->second)) return ai->second < bi->second;
    }
    return a.coeffs.size() < b.coeffs.size();
  }
};

// Extracts the linear form of a term made of constants, variables, +, -,
// unary - and constant multiplication. Returns nullopt if the term contains
// ite/abs/floor or boolean structure.
inline std::optional<LinExpr> linear_of(const Term& t) {
  switch (t.op()) {
    case Op::Const:
      if (!t.sort().is_numeric()) return std::nullopt;
      return LinExpr{{}, t.cval().q};
    case Op::Var: {
      LinExpr e;
      e.add_var(t.var(), Rat(1));
      return e;
    }
    case Op::Neg: {
      auto a = linear_of(t.kid(0));
      if (!a) return std::nullopt;
      return a->negated();
    }
    case Op::MulConst: {
      auto a = linear_of(t.kid(0));
      if (!a) return std::nullopt;
      return a->scaled(t.factor());
    }
    case Op::Add: {
      LinExpr e;
      for (const auto& kid : t.kids()) {
        auto a = linear_of(kid);
        if (!a) return std::nullopt;
        e.add(*a, Rat(1));
      }
      return e;
    }
    case Op::Sub: {
      auto a = linear_of(t.kid(0));
      auto b = linear_of(t.kid(1));
      if (!a || !b) return std::nullopt;
      a->add(*b, Rat(-1));
      return a;
    }
    default: return std::nullopt;
  }
}

// Builds the canonical term for one signed linear part: |c| * v unrolled to
// repeated addition when |c| <= k_mult, kept as a multiplication otherwise.
inline Term linear_part(const VarRef& v, Rat abs_c, int k_mult) {
  Term var = mk_var(v);
  if (abs_c == Rat(1)) return var;
  if (abs_c.is_int() && v.sort.is_int() && abs_c.num <= k_mult) {
    Terms reps(static_cast<size_t>(abs_c.num), var);
    return sum(std::move(reps));
  }
  return mk_mul(abs_c, var);
}

// Canonical rendering of a linear form: variables in declaration order
// (positive parts first, negative subtracted), constant last.
inline Term emit_linear(const LinExpr& e, int k_mult) {
  std::vector<std::pair<VarRef, Rat>> pos, neg;
  for (const auto& [v, c] : e.coeffs) (c.sign() > 0 ? pos : neg).emplace_back(v, c.abs());
  auto num_const = [](Rat q) { return q.is_int() ? mk_int(q.num) : mk_real(q); };
  if (pos.empty() && neg.empty()) return num_const(e.k);

  Term acc;
  if (!pos.empty()) {
    Terms parts;
    for (const auto& [v, c] : pos) parts.push_back(linear_part(v, c, k_mult));
    if (e.k.sign() > 0) parts.push_back(num_const(e.k));
    acc = sum(std::move(parts));
  } else {
    acc = mk_neg(linear_part(neg[0].first, neg[0].second, k_mult));
    neg.erase(neg.begin());
    if (e.k.sign() > 0) acc = mk_add(acc, num_const(e.k));
  }
  for (const auto& [v, c] : neg) acc = mk_sub(acc, linear_part(v, c, k_mult));
  if (e.k.sign() < 0) acc = mk_sub(acc, num_const(-e.k));
  return acc;
}

}  // namespace pargus

#pragma once

#include <functional>

#include "pargus/linexpr.hpp"
#include "pargus/term.hpp"

namespace pargus {

constexpr int kDefaultMultUnroll = 8;

namespace detail {

inline Term norm(const Term& t, int k_mult);

inline Term num_const_term(Rat q, bool real) { return (real || !q.is_int()) ? mk_real(q) : mk_int(q.num); }

// Canonical comparison from a linear form: variable part on the left with a
// positive leading coefficient, constant on the right. Integer atoms are
// tightened (strict dropped, gcd division); atoms with a real variable keep
// strictness and are scaled to a unit leading coefficient.
inline Term emit_cmp(Op op, LinExpr lhs, int k_mult) {
  // represent as  lhs' <op> 0  with op in {Le, Lt, Eq}
  if (op == Op::Ge) { op = Op::Le; lhs = lhs.negated(); }
  else if (op == Op::Gt) { op = Op::Lt; lhs = lhs.negated(); }

  if (lhs.is_const()) {
    bool v = op == Op::Le ? lhs.k <= Rat(0) : op == Op::Lt ? lhs.k < Rat(0) : lhs.k.is_zero();
    return mk_bool(v);
  }

  Rat k = lhs.k;
  LinExpr varpart = lhs;
  varpart.k = Rat(0);

  bool int_atom = varpart.all_int_vars();
  if (int_atom) {
    i64 scale = varpart.den_lcm();
    if (k.den != 1) scale = checked_i64(i128(scale) / std::gcd(scale, k.den) * k.den, "atom scale");
    varpart = varpart.scaled(Rat(scale));
    k = k * Rat(scale);
    // now integral; tighten
    Rat rhs = -k;  // varpart <op> rhs
    if (op == Op::Lt) { op = Op::Le; rhs = rhs - Rat(1); }
    i64 g = varpart.coeff_gcd();
    if (g > 1) {
      varpart = varpart.scaled(Rat(1, g));
      if (op == Op::Le) rhs = (rhs / Rat(g)).floor();
      else {  // Eq
        if (!(rhs / Rat(g)).is_int()) return mk_false();
        rhs = rhs / Rat(g);
      }
    }
    // orient: leading coefficient positive
    Op out = op;
    if (varpart.coeffs.begin()->second.sign() < 0) {
      varpart = varpart.negated();
      rhs = -rhs;
      if (out == Op::Le) out = Op::Ge;
    }
    return mk_cmp(out, emit_linear(varpart, k_mult), mk_int(rhs.num));
  }

  // real (or mixed) atom: scale so the leading coefficient is +/-1
  Rat lead = varpart.coeffs.begin()->second;
  varpart = varpart.scaled(Rat(1) / lead.abs());
  Rat rhs = -k / lead.abs();
  Op out = op;
  if (lead.sign() < 0) {
    varpart = varpart.negated();
    rhs = -rhs;
    out = op == Op::Le ? Op::Ge : op == Op::Lt ? Op::Gt : Op::Eq;
  }
  return mk_cmp(out, emit_linear(varpart, k_mult), num_const_term(rhs, true));
}

inline Op flip_cmp(Op op) {
  switch (op) {
    case Op::Le: return Op::Gt;
    case Op::Lt: return Op::Ge;
    case Op::Ge: return Op::Lt;
    case Op::Gt: return Op::Le;
    default: PARGUS_CHECK(false, "flip_cmp");
  }
  return op;
}

inline Term norm_cmp(Op op, const Term& a, const Term& b, int k_mult) {
  if (op == Op::Eq && a.sort().is_bool()) {
    // boolean equality: fold constants, sort operands
    if (a.is_const() && b.is_const()) return mk_bool(a.cval().b == b.cval().b);
    if (a.is_const()) return a.cval().b ? b : norm(mk_not(b), k_mult);
    if (b.is_const()) return b.cval().b ? a : norm(mk_not(a), k_mult);
    if (a == b) return mk_true();
    return Term::cmp(a, b) <= 0 ? mk_eq(a, b) : mk_eq(b, a);
  }
  auto la = linear_of(a), lb = linear_of(b);
  if (la && lb) {
    la->add(*lb, Rat(-1));
    return emit_cmp(op, *la, k_mult);
  }
  // structural comparison (contains ite/abs/floor): orient >=,> to <=,<
  Term x = a, y = b;
  Op out = op;
  if (op == Op::Ge || op == Op::Gt) {
    std::swap(x, y);
    out = op == Op::Ge ? Op::Le : Op::Lt;
  }
  bool int_cmp = x.sort().is_int() && y.sort().is_int();
  if (out == Op::Lt && int_cmp) {
    out = Op::Le;
    y = norm(mk_sub(y, mk_int(1)), k_mult);
  }
  if (out == Op::Eq && x == y) return mk_true();
  return mk_cmp(out, x, y);
}

inline Term norm_arith(const Term& t, int k_mult) {
  if (auto l = linear_of(t)) {
    Term e = emit_linear(*l, k_mult);
    // keep declared sort when the linear form lost real-ness (e.g. 0.0*x dropped)
    if (t.sort().is_real() && e.sort().is_int()) {
      if (e.is_const()) return mk_real(e.cval().q);
    }
    return e;
  }
  return Term();  // not purely linear
}

inline Term norm(const Term& t, int k_mult) {
  switch (t.op()) {
    case Op::Const:
    case Op::Var:
      return t;

    case Op::MulConst:
    case Op::Neg:
    case Op::Add:
    case Op::Sub: {
      if (Term e = norm_arith(t, k_mult); !e.empty()) return e;
      Terms kids;
      for (const auto& k : t.kids()) kids.push_back(norm(k, k_mult));
      Term r = rebuild(t, std::move(kids));
      if (Term e = norm_arith(r, k_mult); !e.empty()) return e;
      if (r.op() == Op::Neg && r.kid(0).op() == Op::Neg) return r.kid(0).kid(0);
      return r;
    }

    case Op::Abs: {
      Term k = norm(t.kid(0), k_mult);
      if (k.is_const()) return num_const_term(k.cval().q.abs(), k.sort().is_real());
      if (k.op() == Op::Neg) k = k.kid(0);
      return mk_abs(k);
    }
    case Op::Floor: {
      Term k = norm(t.kid(0), k_mult);
      if (k.is_const()) return mk_int(k.cval().q.floor().num);
      if (k.sort().is_int()) return k;
      return mk_floor(k);
    }
    case Op::Ite: {
      Term c = norm(t.kid(0), k_mult);
      Term a = norm(t.kid(1), k_mult);
      Term b = norm(t.kid(2), k_mult);
      if (c.is_const()) return c.cval().b ? a : b;
      if (a == b) return a;
      return mk_ite(c, a, b);
    }

    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq:
      return norm_cmp(t.op(), norm(t.kid(0), k_mult), norm(t.kid(1), k_mult), k_mult);

    case Op::Not: {
      Term k = norm(t.kid(0), k_mult);
      if (k.is_const()) return mk_bool(!k.cval().b);
      if (k.op() == Op::Not) return k.kid(0);
      switch (k.op()) {
        case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt:
          return norm_cmp(flip_cmp(k.op()), k.kid(0), k.kid(1), k_mult);
        default: return mk_not(k);
      }
    }

    case Op::And: case Op::Or: {
      bool is_and = t.op() == Op::And;
      Terms flat;
      bool shorted = false;
      std::function<void(const Term&)> push = [&](const Term& raw) {
        if (shorted) return;
        Term k = norm(raw, k_mult);
        if (k.is_const()) {
          if (k.cval().b != is_and) shorted = true;  // false in and / true in or
          return;                                     // neutral element dropped
        }
        if (k.op() == t.op()) {
          for (const auto& kk : k.kids()) {
            if (shorted) return;
            // already normalized children of same op
            if (kk.is_const()) {
              if (kk.cval().b != is_and) shorted = true;
              continue;
            }
            flat.push_back(kk);
          }
          return;
        }
        flat.push_back(k);
      };
      for (const auto& k : t.kids()) push(k);
      if (shorted) return mk_bool(!is_and);
      std::sort(flat.begin(), flat.end(), [](const Term& a, const Term& b) { return Term::cmp(a, b) < 0; });
      flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
      if (flat.empty()) return mk_bool(is_and);
      if (flat.size() == 1) return flat[0];
      return mk_nary(t.op(), std::move(flat));
    }

    case Op::Implies: {
      Term a = norm(t.kid(0), k_mult);
      Term b = norm(t.kid(1), k_mult);
      if (a.is_const()) return a.cval().b ? b : mk_true();
      if (b.is_const()) return b.cval().b ? mk_true() : norm(mk_not(a), k_mult);
      if (a == b) return mk_true();
      return mk_implies(a, b);
    }

    case Op::Forall: case Op::Exists:
      return mk_quant(t.op(), t.binders(), norm(t.kid(0), k_mult));
  }
  throw Error("normalize: bad node");
}

}  // namespace detail

// Normal form: comparisons as non-strict <=,>=,= with the variable part on
// the left (integer strict bounds shifted by one), commutative arguments
// sorted by the term order, small integer multiplications unrolled to
// repeated addition. Idempotent.
inline Term normalize(const Term& t, int k_mult = kDefaultMultUnroll) {
  return detail::norm(t, k_mult);
}

}  // namespace pargus

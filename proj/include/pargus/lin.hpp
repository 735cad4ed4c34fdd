#pragma once

#include <functional>
#include <optional>

#include "pargus/linexpr.hpp"
#include "pargus/normalize.hpp"
#include "pargus/term.hpp"

// Decision procedures for quantifier-free linear integer/real/mixed
// arithmetic with Booleans: satisfiability with model extraction (DPLL over
// theory atoms, Fourier-Motzkin for reals, Cooper-style elimination for
// integers) and full quantifier elimination (Cooper / Loos-Weispfenning).

namespace pargus::lin {

// ---------------------------------------------------------------------------
// Atoms and formulas (negation normal form)
// ---------------------------------------------------------------------------

struct Atom {
  enum Kind { Le, Lt, Eq, Div } kind = Le;  // e <= 0 | e < 0 | e = 0 | m divides e
  LinExpr e;
  i64 modulus = 0;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.kind == b.kind && a.modulus == b.modulus && a.e == b.e;
  }
  bool has(const VarRef& v) const { return a_coeff(v) != Rat(0); }
  Rat a_coeff(const VarRef& v) const { return e.coeff(v); }
};

struct FNode;
using F = std::shared_ptr<const FNode>;

struct FNode {
  enum K { Tru, Fls, Atm, BLit, And, Or } k = Tru;
  Atom atom;         // Atm
  VarRef bvar;       // BLit
  bool positive = true;
  std::vector<F> kids;
};

inline F f_const(bool b) {
  auto n = std::make_shared<FNode>();
  n->k = b ? FNode::Tru : FNode::Fls;
  return n;
}
inline F f_atom(Atom a) {
  auto n = std::make_shared<FNode>();
  n->k = FNode::Atm;
  n->atom = std::move(a);
  return n;
}
inline F f_blit(VarRef v, bool pos) {
  auto n = std::make_shared<FNode>();
  n->k = FNode::BLit;
  n->bvar = std::move(v);
  n->positive = pos;
  return n;
}
inline F f_nary(FNode::K k, std::vector<F> kids) {
  bool is_and = k == FNode::And;
  std::vector<F> flat;
  for (auto& c : kids) {
    if (c->k == (is_and ? FNode::Tru : FNode::Fls)) continue;
    if (c->k == (is_and ? FNode::Fls : FNode::Tru)) return f_const(!is_and);
    if (c->k == k) {
      flat.insert(flat.end(), c->kids.begin(), c->kids.end());
      continue;
    }
    flat.push_back(c);
  }
  if (flat.empty()) return f_const(is_and);
  if (flat.size() == 1) return flat[0];
  auto n = std::make_shared<FNode>();
  n->k = k;
  n->kids = std::move(flat);
  return n;
}
inline F f_and(std::vector<F> kids) { return f_nary(FNode::And, std::move(kids)); }
inline F f_or(std::vector<F> kids) { return f_nary(FNode::Or, std::move(kids)); }

// Canonicalize an atom; may fold to a constant. Integer atoms are scaled to
// integer coefficients, strict bounds shifted, gcd-tightened.
inline F atom_norm(Atom a) {
  if (a.kind == Atom::Div) {
    PARGUS_CHECK(a.modulus > 0, "divisibility modulus");
    if (a.modulus == 1) return f_const(true);
    i64 m = a.modulus;
    LinExpr e;
    for (const auto& [v, c] : a.e.coeffs) {
      PARGUS_CHECK(c.is_int(), "divisibility over non-integer coefficients");
      i64 r = ((c.num % m) + m) % m;
      if (r) e.coeffs.emplace(v, Rat(r));
    }
    PARGUS_CHECK(a.e.k.is_int(), "divisibility over non-integer constant");
    e.k = Rat(((a.e.k.num % m) + m) % m);
    if (e.coeffs.empty()) return f_const(e.k.num % m == 0);
    a.e = e;
    return f_atom(a);
  }
  if (a.e.is_const()) {
    switch (a.kind) {
      case Atom::Le: return f_const(a.e.k <= Rat(0));
      case Atom::Lt: return f_const(a.e.k < Rat(0));
      default: return f_const(a.e.k.is_zero());
    }
  }
  // scale to integer coefficients
  i64 dl = a.e.den_lcm();
  if (dl != 1) a.e = a.e.scaled(Rat(dl));
  if (a.e.all_int_vars()) {
    if (a.kind == Atom::Lt) {  // e < 0  <=>  e + 1 <= 0 over the integers
      a.kind = Atom::Le;
      a.e.k = a.e.k + Rat(1);
    }
    i64 g = a.e.coeff_gcd();
    if (g > 1) {
      LinExpr t = a.e.scaled(Rat(1, g));
      if (a.kind == Atom::Le) {
        t.k = (a.e.k / Rat(g)).ceil();  // e <= 0 <=> e/g <= 0 with ceil on the constant
        a.e = t;
      } else {  // Eq
        if (!(a.e.k / Rat(g)).is_int()) return f_const(false);
        a.e = t;
      }
    }
  } else {
    i64 g = a.e.coeff_gcd();
    if (g > 1) a.e = a.e.scaled(Rat(1, g));
  }
  if (a.kind == Atom::Eq && a.e.coeffs.begin()->second.sign() < 0) a.e = a.e.negated();
  return f_atom(a);
}

inline F atom_negated(const Atom& a) {
  switch (a.kind) {
    case Atom::Le: return atom_norm(Atom{Atom::Lt, a.e.negated(), 0});
    case Atom::Lt: return atom_norm(Atom{Atom::Le, a.e.negated(), 0});
    case Atom::Eq: {
      std::vector<F> alt;
      alt.push_back(atom_norm(Atom{Atom::Lt, a.e, 0}));
      alt.push_back(atom_norm(Atom{Atom::Lt, a.e.negated(), 0}));
      return f_or(std::move(alt));
    }
    case Atom::Div: {
      std::vector<F> alt;
      for (i64 j = 1; j < a.modulus; ++j) {
        LinExpr e = a.e;
        e.k = e.k + Rat(j);
        alt.push_back(atom_norm(Atom{Atom::Div, e, a.modulus}));
      }
      return f_or(std::move(alt));
    }
  }
  throw Error("bad atom");
}

// ---------------------------------------------------------------------------
// Term -> formula conversion with ite/abs/floor lifting
// ---------------------------------------------------------------------------

class Lifter {
 public:
  // Numeric term as a set of (condition, linear form) cases.
  struct Case {
    F cond;
    LinExpr e;
  };

  F to_nnf(const Term& t, bool positive) {
    switch (t.op()) {
      case Op::Const: return f_const(t.cval().b == positive);
      case Op::Var:
        PARGUS_CHECK(t.sort().is_bool(), "boolean structure expected");
        if (t.var().cls == VarClass::Hole) throw Error("hole " + t.var().name + " in solver query");
        return f_blit(t.var(), positive);
      case Op::Not: return to_nnf(t.kid(0), !positive);
      case Op::And: case Op::Or: {
        bool want_and = (t.op() == Op::And) == positive;
        std::vector<F> kids;
        for (const auto& k : t.kids()) kids.push_back(to_nnf(k, positive));
        return want_and ? f_and(std::move(kids)) : f_or(std::move(kids));
      }
      case Op::Implies: {
        std::vector<F> kids{to_nnf(t.kid(0), !positive), to_nnf(t.kid(1), positive)};
        return positive ? f_or(std::move(kids)) : f_and(std::move(kids));
      }
      case Op::Ite: {
        if (t.sort().is_bool()) {
          F c = to_nnf(t.kid(0), true), nc = to_nnf(t.kid(0), false);
          F a = to_nnf(t.kid(1), positive), b = to_nnf(t.kid(2), positive);
          return f_or({f_and({c, a}), f_and({nc, b})});
        }
        break;
      }
      case Op::Eq:
        if (t.kid(0).sort().is_bool()) {
          F a = to_nnf(t.kid(0), true), na = to_nnf(t.kid(0), false);
          F b = to_nnf(t.kid(1), true), nb = to_nnf(t.kid(1), false);
          if (positive) return f_or({f_and({a, b}), f_and({na, nb})});
          return f_or({f_and({a, nb}), f_and({na, b})});
        }
        [[fallthrough]];
      case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt:
        return cmp_nnf(t, positive);
      case Op::Forall: case Op::Exists:
        throw Error("quantifier inside quantifier-free query");
      default: break;
    }
    throw Error("boolean structure expected, got: " + to_string(t));
  }

  F cmp_nnf(const Term& t, bool positive) {
    Op op = t.op();
    Term lhs = t.kid(0), rhs = t.kid(1);
    if (op == Op::Ge) { op = Op::Le; std::swap(lhs, rhs); }
    if (op == Op::Gt) { op = Op::Lt; std::swap(lhs, rhs); }
    // recognize the divisibility pattern  m*floor((1/m)*e) = e
    if (op == Op::Eq) {
      if (auto d = match_div(lhs, rhs)) return positive ? atom_norm(*d) : atom_negated(*d);
      if (auto d = match_div(rhs, lhs)) return positive ? atom_norm(*d) : atom_negated(*d);
    }
    std::vector<F> out;
    for (const auto& cl : cases(lhs)) {
      for (const auto& cr : cases(rhs)) {
        LinExpr e = cl.e;
        e.add(cr.e, Rat(-1));
        Atom::Kind k = op == Op::Le ? Atom::Le : op == Op::Lt ? Atom::Lt : Atom::Eq;
        F base = positive ? atom_norm(Atom{k, e, 0}) : atom_negated(Atom{k, e, 0});
        out.push_back(f_and({cl.cond, cr.cond, base}));
      }
    }
    return f_or(std::move(out));
  }

  std::vector<Case> cases(const Term& t) {
    if (auto l = linear_of(t)) return {Case{f_const(true), *l}};
    switch (t.op()) {
      case Op::Neg: {
        auto cs = cases(t.kid(0));
        for (auto& c : cs) c.e = c.e.negated();
        return cs;
      }
      case Op::MulConst: {
        auto cs = cases(t.kid(0));
        for (auto& c : cs) c.e = c.e.scaled(t.factor());
        return cs;
      }
      case Op::Add: {
        std::vector<Case> acc{Case{f_const(true), LinExpr{}}};
        for (const auto& k : t.kids()) acc = product(acc, cases(k), Rat(1));
        return acc;
      }
      case Op::Sub: {
        auto acc = cases(t.kid(0));
        return product(acc, cases(t.kid(1)), Rat(-1));
      }
      case Op::Ite: {
        F c = to_nnf(t.kid(0), true), nc = to_nnf(t.kid(0), false);
        std::vector<Case> out;
        for (auto& x : cases(t.kid(1))) out.push_back(Case{f_and({c, x.cond}), x.e});
        for (auto& x : cases(t.kid(2))) out.push_back(Case{f_and({nc, x.cond}), x.e});
        return out;
      }
      case Op::Abs: {
        std::vector<Case> out;
        for (auto& x : cases(t.kid(0))) {
          out.push_back(Case{f_and({x.cond, atom_norm(Atom{Atom::Le, x.e.negated(), 0})}), x.e});
          out.push_back(Case{f_and({x.cond, atom_norm(Atom{Atom::Lt, x.e, 0})}), x.e.negated()});
        }
        return out;
      }
      case Op::Floor: {
        if (t.kid(0).sort().is_int()) return cases(t.kid(0));
        std::vector<Case> out;
        for (auto& x : cases(t.kid(0))) {
          VarRef k = fresh_int();
          LinExpr ke;
          ke.add_var(k, Rat(1));
          // k <= e  and  e < k+1
          LinExpr low = ke;      // k - e <= 0
          low.add(x.e, Rat(-1));
          LinExpr high = x.e;    // e - k - 1 < 0
          high.add(ke, Rat(-1));
          high.k = high.k - Rat(1);
          F guard = f_and({x.cond, atom_norm(Atom{Atom::Le, low, 0}), atom_norm(Atom{Atom::Lt, high, 0})});
          out.push_back(Case{guard, ke});
        }
        return out;
      }
      default:
        throw Error("numeric term expected, got: " + to_string(t));
    }
  }

  int fresh_count() const { return fresh_; }

 private:
  int fresh_ = 0;
  VarRef fresh_int() { return VarRef{"!f" + std::to_string(fresh_++), VarClass::Input, int_sort()}; }

  static std::vector<Case> product(const std::vector<Case>& a, const std::vector<Case>& b, Rat scale) {
    std::vector<Case> out;
    for (const auto& x : a)
      for (const auto& y : b) {
        LinExpr e = x.e;
        e.add(y.e, scale);
        out.push_back(Case{f_and({x.cond, y.cond}), e});
      }
    return out;
  }

  static std::optional<Atom> match_div(const Term& a, const Term& b) {
    // a = m * floor((1/m) * e), b = e
    if (a.op() != Op::MulConst || !a.factor().is_int() || a.factor().num <= 1) return std::nullopt;
    i64 m = a.factor().num;
    const Term& fl = a.kid(0);
    if (fl.op() != Op::Floor) return std::nullopt;
    const Term& inner = fl.kid(0);
    if (inner.op() != Op::MulConst || inner.factor() != Rat(1, m)) return std::nullopt;
    auto le = linear_of(inner.kid(0));
    auto lb = linear_of(b);
    if (!le || !lb || !(*le == *lb)) return std::nullopt;
    if (!le->all_int_vars()) return std::nullopt;
    return Atom{Atom::Div, *le, m};
  }
};

// ---------------------------------------------------------------------------
// Atom/formula rendering back to terms
// ---------------------------------------------------------------------------

inline Term atom_to_term(const Atom& a) {
  if (a.kind == Atom::Div) {
    Term e = emit_linear(a.e, kDefaultMultUnroll);
    Term enc = mk_mul(Rat(a.modulus), mk_floor(mk_mul(Rat(1, a.modulus), e)));
    return mk_eq(enc, e);
  }
  LinExpr vp = a.e;
  Rat k = -vp.k;
  vp.k = Rat(0);
  Op op = a.kind == Atom::Le ? Op::Le : a.kind == Atom::Lt ? Op::Lt : Op::Eq;
  bool flip = !vp.coeffs.empty() && vp.coeffs.begin()->second.sign() < 0;
  if (flip) {
    vp = vp.negated();
    k = -k;
    op = op == Op::Le ? Op::Ge : op == Op::Lt ? Op::Gt : Op::Eq;
  }
  Term rhs = k.is_int() ? mk_int(k.num) : mk_real(k);
  return mk_cmp(op, emit_linear(vp, kDefaultMultUnroll), rhs);
}

inline Term formula_to_term(const F& f) {
  switch (f->k) {
    case FNode::Tru: return mk_true();
    case FNode::Fls: return mk_false();
    case FNode::Atm: return atom_to_term(f->atom);
    case FNode::BLit: {
      Term v = mk_var(f->bvar);
      return f->positive ? v : mk_not(v);
    }
    case FNode::And: case FNode::Or: {
      Terms kids;
      for (const auto& k : f->kids) kids.push_back(formula_to_term(k));
      return f->k == FNode::And ? conj(std::move(kids)) : disj(std::move(kids));
    }
  }
  throw Error("bad formula");
}

// ---------------------------------------------------------------------------
// Conjunction feasibility with model extraction
// ---------------------------------------------------------------------------

struct Literal {
  Atom atom;
  bool positive = true;
};

class Feasibility {
 public:
  // max branching nodes before giving up (reported as unknown)
  explicit Feasibility(i64 node_budget = 2'000'000) : budget_(node_budget) {}

  // result: 0 infeasible, 1 feasible (model filled), 2 budget exceeded.
  // With model == nullptr this runs a sound rational-relaxation check only
  // (cheap pruning; may report feasible for an integer-infeasible set).
  int check(const std::vector<Literal>& lits, Valuation* model) {
    std::vector<Atom> atoms;
    for (const auto& l : lits) {
      if (l.positive) {
        atoms.push_back(l.atom);
        continue;
      }
      F neg = atom_negated(l.atom);
      if (neg->k == FNode::Fls) return 0;
      if (neg->k == FNode::Tru) continue;
      if (neg->k == FNode::Atm) {
        atoms.push_back(neg->atom);
        continue;
      }
      if (!model) continue;  // relaxation: drop disjunctive negations
      // disjunctive negation (of Eq or Div): try each branch
      for (const auto& alt : neg->kids) {
        std::vector<Literal> rest;
        rest.push_back(Literal{alt->atom, true});
        for (const auto& l2 : lits)
          if (!(l2.atom == l.atom && l2.positive == l.positive)) rest.push_back(l2);
        int r = check(rest, model);
        if (r != 0) return r;
      }
      return 0;
    }
    if (!model) return fm_feasible(atoms) ? 1 : 0;
    nodes_ = 0;
    try {
      return solve(atoms, model) ? 1 : 0;
    } catch (const BudgetExceeded&) {
      return 2;
    }
  }

  // Rational relaxation: Fourier-Motzkin over all variables, divisibility
  // ignored. Infeasible here implies infeasible exactly.
  static bool fm_feasible(std::vector<Atom> atoms) {
    while (true) {
      std::vector<Atom> clean;
      for (auto& a : atoms) {
        if (a.kind == Atom::Div) continue;
        F f = atom_norm(a);
        if (f->k == FNode::Fls) return false;
        if (f->k == FNode::Tru) continue;
        clean.push_back(f->atom);
      }
      const VarRef* pick = nullptr;
      for (const auto& a : clean)
        if (!a.e.coeffs.empty()) { pick = &a.e.coeffs.begin()->first; break; }
      if (!pick) return true;
      VarRef v = *pick;
      // equality substitution
      bool substituted = false;
      for (size_t i = 0; i < clean.size() && !substituted; ++i) {
        if (clean[i].kind == Atom::Eq && clean[i].has(v)) {
          Rat c = clean[i].a_coeff(v);
          LinExpr rhs = clean[i].e.without(v).scaled(Rat(-1) / c);
          std::vector<Atom> next;
          for (size_t j = 0; j < clean.size(); ++j) {
            if (j == i) continue;
            next.push_back(subst_var(clean[j], v, rhs));
          }
          atoms = std::move(next);
          substituted = true;
        }
      }
      if (substituted) continue;
      std::vector<std::pair<LinExpr, bool>> lowers, uppers;
      std::vector<Atom> rest;
      for (const auto& a : clean) {
        Rat c = a.a_coeff(v);
        if (c.is_zero()) {
          rest.push_back(a);
          continue;
        }
        LinExpr bound = a.e.without(v).scaled(Rat(-1) / c);
        bool strict = a.kind == Atom::Lt;
        if (c.sign() > 0) uppers.emplace_back(bound, strict);
        else lowers.emplace_back(bound, strict);
      }
      for (const auto& [lo, ls] : lowers)
        for (const auto& [hi, hs] : uppers) {
          LinExpr diff = lo;
          diff.add(hi, Rat(-1));
          rest.push_back(Atom{(ls || hs) ? Atom::Lt : Atom::Le, diff, 0});
        }
      atoms = std::move(rest);
    }
  }

 private:
  struct BudgetExceeded {};
  i64 budget_;
  i64 nodes_ = 0;

  void tick() {
    if (++nodes_ > budget_) throw BudgetExceeded{};
  }

  static Rat eval_fill(const LinExpr& e, Valuation* m) {
    for (const auto& [v, c] : e.coeffs) {
      if (!m->count(VarKey(v)))
        (*m)[VarKey(v)] = v.sort.is_real() ? Value::of_real(Rat(0)) : Value::of_int(0);
    }
    return e.eval(*m);
  }

  static std::vector<VarRef> vars_of(const std::vector<Atom>& atoms, bool real) {
    std::set<VarRef> s;
    for (const auto& a : atoms)
      for (const auto& [v, c] : a.e.coeffs)
        if (v.sort.is_real() == real) s.insert(v);
    return {s.begin(), s.end()};
  }

  bool solve(std::vector<Atom> atoms, Valuation* model) {
    tick();
    // normalize all; fold ground atoms
    std::vector<Atom> clean;
    for (auto& a : atoms) {
      F f = atom_norm(a);
      if (f->k == FNode::Fls) return false;
      if (f->k == FNode::Tru) continue;
      clean.push_back(f->atom);
    }
    auto reals = vars_of(clean, true);
    if (!reals.empty()) return solve_real(std::move(clean), reals.front(), model);
    auto ints = vars_of(clean, false);
    if (ints.empty()) return true;  // all ground and true
    if (!fm_feasible(clean)) return false;  // rational relaxation prune
    return solve_int(std::move(clean), pick_int(clean, ints), model);
  }

  // Fourier-Motzkin elimination of one real variable.
  bool solve_real(std::vector<Atom> atoms, const VarRef& r, Valuation* model) {
    tick();
    // equality substitution if possible
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].kind == Atom::Eq && atoms[i].has(r)) {
        Rat c = atoms[i].a_coeff(r);
        LinExpr rhs = atoms[i].e.without(r).scaled(Rat(-1) / c);  // r = rhs
        std::vector<Atom> rest;
        for (size_t j = 0; j < atoms.size(); ++j) {
          if (j == i) continue;
          rest.push_back(subst_var(atoms[j], r, rhs));
        }
        if (!solve(rest, model)) return false;
        if (model) set_model(model, r, eval_fill(rhs, model));
        return true;
      }
    }
    std::vector<std::pair<LinExpr, bool>> lowers, uppers;  // (bound expr, strict)
    std::vector<Atom> rest;
    for (const auto& a : atoms) {
      Rat c = a.a_coeff(r);
      if (c.is_zero()) {
        rest.push_back(a);
        continue;
      }
      PARGUS_CHECK(a.kind != Atom::Div, "divisibility on a real variable");
      LinExpr bound = a.e.without(r).scaled(Rat(-1) / c);
      bool strict = a.kind == Atom::Lt;
      if (c.sign() > 0) uppers.emplace_back(bound, strict);   // r <= bound
      else lowers.emplace_back(bound, strict);                // r >= bound
    }
    for (const auto& [lo, ls] : lowers)
      for (const auto& [hi, hs] : uppers) {
        LinExpr diff = lo;  // lo <= hi  -> lo - hi <= 0
        diff.add(hi, Rat(-1));
        rest.push_back(Atom{(ls || hs) ? Atom::Lt : Atom::Le, diff, 0});
      }
    if (!solve(rest, model)) return false;
    if (model) {
      std::optional<Rat> lo, hi;
      bool lo_strict = false, hi_strict = false;
      for (const auto& [b, s] : lowers) {
        Rat v = eval_fill(b, model);
        if (!lo || v > *lo || (v == *lo && s)) { lo = v; lo_strict = s; }
      }
      for (const auto& [b, s] : uppers) {
        Rat v = eval_fill(b, model);
        if (!hi || v < *hi || (v == *hi && s)) { hi = v; hi_strict = s; }
      }
      Rat val(0);
      if (lo && hi) val = (!lo_strict && *lo == *hi) ? *lo : (*lo + *hi) * Rat(1, 2);
      else if (lo) val = lo_strict ? *lo + Rat(1) : *lo;
      else if (hi) val = hi_strict ? *hi - Rat(1) : *hi;
      set_model(model, r, val);
    }
    return true;
  }

  // Cooper-style elimination of one integer variable with case branching.
  VarRef pick_int(const std::vector<Atom>& atoms, const std::vector<VarRef>& ints) {
    // prefer a variable with a unit-coefficient equality, then fewest bounds
    for (const auto& v : ints)
      for (const auto& a : atoms)
        if (a.kind == Atom::Eq && a.a_coeff(v).abs() == Rat(1)) return v;
    VarRef best = ints.front();
    i64 best_cost = -1;
    for (const auto& v : ints) {
      i64 lo = 0, hi = 0;
      for (const auto& a : atoms) {
        if (!a.has(v) || a.kind == Atom::Div) continue;
        (a.a_coeff(v).sign() < 0 ? lo : hi) += (a.kind == Atom::Eq) ? 1 : 0;
        if (a.kind != Atom::Eq) (a.a_coeff(v).sign() < 0 ? lo : hi) += 1;
      }
      i64 cost = std::min(lo, hi);
      if (best_cost < 0 || cost < best_cost) { best_cost = cost; best = v; }
    }
    return best;
  }

  bool solve_int(std::vector<Atom> atoms, const VarRef& x, Valuation* model) {
    tick();
    // unit equality substitution
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].kind == Atom::Eq && atoms[i].a_coeff(x).abs() == Rat(1)) {
        Rat c = atoms[i].a_coeff(x);
        LinExpr rhs = atoms[i].e.without(x).scaled(Rat(-1) / c);
        std::vector<Atom> rest;
        for (size_t j = 0; j < atoms.size(); ++j) {
          if (j == i) continue;
          rest.push_back(subst_var(atoms[j], x, rhs));
        }
        if (!solve(rest, model)) return false;
        if (model) set_model(model, x, eval_fill(rhs, model));
        return true;
      }
    }
    // scale x's coefficient to +-lambda, switch to y = lambda*x
    i64 lambda = 1;
    for (const auto& a : atoms)
      if (a.has(x)) {
        Rat c = a.a_coeff(x);
        PARGUS_CHECK(c.is_int(), "non-integral coefficient on int var");
        i64 ac = c.num < 0 ? -c.num : c.num;
        lambda = checked_i64(i128(lambda) / std::gcd(lambda, ac) * ac, "cooper lambda");
      }
    VarRef y = x;  // reuse the same variable name for the scaled variable
    std::vector<Atom> scaled;
    for (const auto& a : atoms) {
      if (!a.has(x)) {
        scaled.push_back(a);
        continue;
      }
      Rat c = a.a_coeff(x);
      i64 mult = lambda / (c.num < 0 ? -c.num : c.num);
      Atom b = a;
      b.e = a.e.scaled(Rat(mult));
      if (a.kind == Atom::Div) b.modulus = checked_i64(i128(a.modulus) * mult, "div scale");
      scaled.push_back(b);
    }
    // collect bounds on y (coefficient is +-lambda now, treat as +-1 on y)
    std::vector<LinExpr> lowers, uppers;  // t <= y  /  y <= t  (non-strict after norm)
    std::vector<std::pair<i64, LinExpr>> divs;  // m | y + t
    std::vector<Atom> rest;
    for (const auto& a : scaled) {
      Rat c = a.a_coeff(y);
      if (c.is_zero()) {
        rest.push_back(a);
        continue;
      }
      PARGUS_CHECK(c.abs() == Rat(lambda), "cooper scaling");
      LinExpr t = a.e.without(y);
      if (a.kind == Atom::Div) {
        // m | (+-y + t); normalize sign so the y coefficient is +1
        LinExpr u = c.sign() > 0 ? t : t.negated();
        divs.emplace_back(a.modulus, u);
        continue;
      }
      PARGUS_CHECK(a.kind != Atom::Lt, "strict int atom after normalization");
      if (a.kind == Atom::Eq) {
        if (c.sign() > 0) { uppers.push_back(t.negated()); lowers.push_back(t.negated()); }
        else { uppers.push_back(t); lowers.push_back(t); }
        continue;
      }
      if (c.sign() > 0) uppers.push_back(t.negated());  // y + t' <= 0 -> y <= -t'
      else lowers.push_back(t);                          // -y + t <= 0 -> t <= y
    }
    // y = lambda * x must stay integral when divided back
    if (lambda > 1) divs.emplace_back(lambda, LinExpr{});
    i64 delta = 1;
    for (const auto& [m, u] : divs)
      delta = checked_i64(i128(delta) / std::gcd(delta, m) * m, "cooper delta");
    // branch: y = b + j for lower bounds b, j in [0, delta); or below all
    // uppers when no lower constrains y (then only divisibility matters)
    bool use_lower = lowers.size() <= uppers.size();
    const auto& bounds = use_lower ? lowers : uppers;
    for (i64 j = 0; j < delta; ++j) {
      if (bounds.empty()) {
        // unbounded in the chosen direction: fix residue j and drop bounds
        std::vector<Atom> sub = rest;
        bool ok = true;
        for (const auto& [m, u] : divs) {
          LinExpr e = u;
          e.k = e.k + Rat(use_lower ? j : -j);
          F g = atom_norm(Atom{Atom::Div, e, m});
          if (g->k == FNode::Fls) { ok = false; break; }
          if (g->k == FNode::Atm) sub.push_back(g->atom);
        }
        if (!ok) continue;
        // equalities on y were turned into bounds; with no bounds at all the
        // remaining system does not mention y
        if (!solve(sub, model)) continue;
        if (model) {
          // pick y below all uppers / above all lowers with the right residue
          i64 yval = use_lower ? 0 : 0;
          if (use_lower) {
            std::optional<Rat> cap;
            for (const auto& u : uppers) {
              Rat v = eval_fill(u, model);
              if (!cap || v < *cap) cap = v;
            }
            yval = cap ? cap->floor().num : 0;
          } else {
            std::optional<Rat> base;
            for (const auto& l : lowers) {
              Rat v = eval_fill(l, model);
              if (!base || v > *base) base = v;
            }
            yval = base ? base->ceil().num : 0;
          }
          adjust_residue(yval, j, delta, divs, model, use_lower);
          set_model(model, x, Rat(yval, lambda));
        }
        return true;
      }
      for (const auto& b : bounds) {
        tick();
        // y := b + j (lower side) or b - j (upper side)
        LinExpr yv = b;
        yv.k = yv.k + Rat(use_lower ? j : -j);
        std::vector<Atom> sub = rest;
        bool ok = true;
        auto add = [&](Atom a) {
          F g = atom_norm(a);
          if (g->k == FNode::Fls) { ok = false; return; }
          if (g->k == FNode::Atm) sub.push_back(g->atom);
        };
        for (const auto& lo : lowers) {  // lo <= yv
          LinExpr e = lo;
          e.add(yv, Rat(-1));
          add(Atom{Atom::Le, e, 0});
          if (!ok) break;
        }
        if (ok) for (const auto& up : uppers) {  // yv <= up
          LinExpr e = yv;
          e.add(up, Rat(-1));
          add(Atom{Atom::Le, e, 0});
          if (!ok) break;
        }
        if (ok) for (const auto& [m, u] : divs) {
          LinExpr e = yv;
          e.add(u, Rat(1));
          add(Atom{Atom::Div, e, m});
          if (!ok) break;
        }
        if (!ok) continue;
        if (solve(sub, model)) {
          if (model) set_model(model, x, eval_fill(yv, model) * Rat(1, lambda));
          return true;
        }
      }
    }
    return false;
  }

  void adjust_residue(i64& yval, i64 j, i64 delta, const std::vector<std::pair<i64, LinExpr>>& divs,
                      Valuation* model, bool downward) {
    // move yval in the unbounded direction until all divisibilities hold
    (void)j;
    for (i64 step = 0; step < delta; ++step) {
      bool ok = true;
      for (const auto& [m, u] : divs) {
        Rat v = Rat(yval) + eval_fill(u, model);
        if (!v.is_int() || ((v.num % m) + m) % m != 0) { ok = false; break; }
      }
      if (ok) return;
      yval += downward ? -1 : 1;
    }
    PARGUS_CHECK(divs.empty(), "residue adjustment failed");
  }

  static Atom subst_var(const Atom& a, const VarRef& v, const LinExpr& rep) {
    Rat c = a.a_coeff(v);
    if (c.is_zero()) return a;
    Atom b = a;
    b.e = a.e.without(v);
    b.e.add(rep, c);
    return b;
  }

  static void set_model(Valuation* m, const VarRef& v, Rat val) {
    if (v.sort.is_real()) (*m)[VarKey(v)] = Value::of_real(val);
    else {
      PARGUS_CHECK(val.is_int(), "non-integral model value for int var");
      (*m)[VarKey(v)] = Value::of_int(val.num);
    }
  }
};

// ---------------------------------------------------------------------------
// DPLL over the boolean structure
// ---------------------------------------------------------------------------

struct SolveResult {
  enum Kind { Sat, Unsat, Unknown } kind = Unknown;
  Valuation model;
  std::string reason;
};

class Solver {
 public:
  explicit Solver(i64 node_budget = 400'000) : budget_(node_budget) {}

  SolveResult solve(const Term& t) {
    Lifter lift;
    F f;
    try {
      f = lift.to_nnf(t, true);
    } catch (const Error& e) {
      return {SolveResult::Unknown, {}, e.what()};
    }
    return solve(f);
  }

  SolveResult solve(const F& f) {
    nodes_ = 0;
    trail_.clear();
    btrail_.clear();
    SolveResult r;
    try {
      if (rec(f, &r.model)) {
        for (const auto& [v, pos] : btrail_) r.model[VarKey(v)] = Value::of_bool(pos);
        r.kind = SolveResult::Sat;
      } else {
        r.kind = SolveResult::Unsat;
      }
    } catch (const Stop& s) {
      r.kind = SolveResult::Unknown;
      r.reason = s.reason;
    }
    return r;
  }

 private:
  struct Stop { std::string reason; };
  i64 budget_;
  i64 nodes_ = 0;
  std::vector<Literal> trail_;
  std::vector<std::pair<VarRef, bool>> btrail_;
  Feasibility feas_;

  void tick() {
    if (++nodes_ > budget_) throw Stop{"search budget exceeded"};
  }

  static const FNode* first_lit(const F& f) {
    switch (f->k) {
      case FNode::Atm: case FNode::BLit: return f.get();
      case FNode::And: case FNode::Or:
        for (const auto& k : f->kids)
          if (const FNode* r = first_lit(k)) return r;
        return nullptr;
      default: return nullptr;
    }
  }

  static F assign(const F& f, const FNode* lit, bool value) {
    switch (f->k) {
      case FNode::Tru: case FNode::Fls: return f;
      case FNode::Atm:
        if (lit->k == FNode::Atm && f->atom == lit->atom) return f_const(value);
        return f;
      case FNode::BLit:
        if (lit->k == FNode::BLit && f->bvar == lit->bvar)
          return f_const(f->positive == lit->positive ? value : !value);
        return f;
      case FNode::And: case FNode::Or: {
        std::vector<F> kids;
        kids.reserve(f->kids.size());
        for (const auto& k : f->kids) kids.push_back(assign(k, lit, value));
        return f_nary(f->k, std::move(kids));
      }
    }
    return f;
  }

  bool rec(const F& f, Valuation* model) {
    tick();
    if (f->k == FNode::Fls) return false;
    if (f->k == FNode::Tru) {
      Valuation m;
      int r = feas_.check(trail_, &m);
      if (r == 2) throw Stop{"theory budget exceeded"};
      if (r == 0) return false;
      *model = std::move(m);
      return true;
    }
    const FNode* lit = first_lit(f);
    PARGUS_CHECK(lit, "no literal in non-constant formula");
    for (bool value : {true, false}) {
      size_t tsz = trail_.size(), bsz = btrail_.size();
      bool theory_ok = true;
      if (lit->k == FNode::Atm) {
        trail_.push_back(Literal{lit->atom, lit->positive == value});
        int r = feas_.check(trail_, nullptr);
        if (r == 2) throw Stop{"theory budget exceeded"};
        theory_ok = r != 0;
      } else {
        btrail_.emplace_back(lit->bvar, lit->positive == value);
      }
      if (theory_ok && rec(assign(f, lit, value), model)) return true;
      trail_.resize(tsz);
      btrail_.resize(bsz);
    }
    return false;
  }
};

// ---------------------------------------------------------------------------
// Quantifier elimination
// ---------------------------------------------------------------------------

class Eliminator {
 public:
  explicit Eliminator(i64 size_budget = 4'000'000) : budget_(size_budget) {}

  // One quantifier block; returns an equivalent quantifier-free term.
  Term eliminate(const Term& quantified) {
    if (quantified.op() != Op::Forall && quantified.op() != Op::Exists) {
      PARGUS_CHECK(!has_quantifier(quantified), "nested quantifier block");
      return quantified;
    }
    bool universal = quantified.op() == Op::Forall;
    const Term& body = quantified.kid(0);
    PARGUS_CHECK(!has_quantifier(body), "nested quantifier block");
    Lifter lift;
    F f = lift.to_nnf(body, !universal);  // negate body for forall
    for (const auto& v : order_binders(quantified.binders())) f = eliminate_var(f, v);
    Term out = formula_to_term(f);
    if (universal) out = mk_not(out);
    return normalize(out);
  }

 private:
  i64 budget_;

  static bool has_quantifier(const Term& t) {
    if (t.op() == Op::Forall || t.op() == Op::Exists) return true;
    for (const auto& k : t.kids())
      if (has_quantifier(k)) return true;
    return false;
  }

  // bools first, then reals, then ints (each in declaration order)
  static std::vector<VarRef> order_binders(const std::vector<VarRef>& bs) {
    std::vector<VarRef> out;
    for (const auto& v : bs)
      if (v.sort.is_bool()) out.push_back(v);
    for (const auto& v : bs)
      if (v.sort.is_real()) out.push_back(v);
    for (const auto& v : bs)
      if (v.sort.is_int()) out.push_back(v);
    return out;
  }

  void check_size(const F& f) {
    if (size_of(f) > budget_) throw Error("quantifier elimination result too large");
  }
  static i64 size_of(const F& f) {
    i64 n = 1;
    for (const auto& k : f->kids) n += size_of(k);
    return n;
  }

  F eliminate_var(const F& f, const VarRef& v) {
    if (v.sort.is_bool()) {
      return f_or({substitute_bool(f, v, true), substitute_bool(f, v, false)});
    }
    F r = v.sort.is_real() ? lw(f, v) : cooper(f, v);
    check_size(r);
    return simplify(r);
  }

  static F substitute_bool(const F& f, const VarRef& v, bool val) {
    switch (f->k) {
      case FNode::BLit:
        if (f->bvar == v) return f_const(f->positive == val);
        return f;
      case FNode::And: case FNode::Or: {
        std::vector<F> kids;
        for (const auto& k : f->kids) kids.push_back(substitute_bool(k, v, val));
        return f_nary(f->k, std::move(kids));
      }
      default: return f;
    }
  }

  static F simplify(const F& f) {
    switch (f->k) {
      case FNode::And: case FNode::Or: {
        std::vector<F> kids;
        for (const auto& k : f->kids) kids.push_back(simplify(k));
        F r = f_nary(f->k, std::move(kids));
        if (r->k != FNode::And && r->k != FNode::Or) return r;
        // structural dedup
        std::vector<F> uniq;
        for (const auto& k : r->kids) {
          bool seen = false;
          for (const auto& u : uniq)
            if (feq(u, k)) { seen = true; break; }
          if (!seen) uniq.push_back(k);
        }
        return f_nary(r->k, std::move(uniq));
      }
      default: return f;
    }
  }
  static bool feq(const F& a, const F& b) {
    if (a->k != b->k) return false;
    switch (a->k) {
      case FNode::Tru: case FNode::Fls: return true;
      case FNode::Atm: return a->atom == b->atom;
      case FNode::BLit: return a->bvar == b->bvar && a->positive == b->positive;
      default:
        if (a->kids.size() != b->kids.size()) return false;
        for (size_t i = 0; i < a->kids.size(); ++i)
          if (!feq(a->kids[i], b->kids[i])) return false;
        return true;
    }
  }

  // --- virtual substitution for a real variable -------------------------

  struct VTerm {  // bound / bound + eps / -inf
    enum K { MinusInf, Plain, PlusEps } k = Plain;
    LinExpr e;
  };

  static F subst_virtual(const F& f, const VarRef& x, const VTerm& t) {
    switch (f->k) {
      case FNode::Tru: case FNode::Fls: case FNode::BLit: return f;
      case FNode::And: case FNode::Or: {
        std::vector<F> kids;
        for (const auto& k : f->kids) kids.push_back(subst_virtual(k, x, t));
        return f_nary(f->k, std::move(kids));
      }
      case FNode::Atm: {
        const Atom& a = f->atom;
        Rat c = a.e.coeff(x);
        if (c.is_zero()) return f;
        PARGUS_CHECK(a.kind != Atom::Div, "divisibility on real variable");
        LinExpr rest = a.e.without(x);
        // atom: c*x + rest (<=,<,=) 0; normalize to x (<=,<,=,>=,>) bound
        // where bound = -rest/c; direction flips when c < 0.
        LinExpr bound = rest.scaled(Rat(-1) / c);
        bool upper = c.sign() > 0;  // x <= bound / x < bound; else lower
        switch (t.k) {
          case VTerm::MinusInf:
            if (a.kind == Atom::Eq) return f_const(false);
            return f_const(upper);
          case VTerm::Plain: {
            LinExpr e = t.e;
            e.add(bound, Rat(-1));  // t - bound
            if (a.kind == Atom::Eq) return atom_norm(Atom{Atom::Eq, e, 0});
            if (upper) return atom_norm(Atom{a.kind, e, 0});          // t <=/< bound
            LinExpr ne = e.negated();
            return atom_norm(Atom{a.kind, ne, 0});                    // bound <=/< t
          }
          case VTerm::PlusEps: {
            LinExpr e = t.e;
            e.add(bound, Rat(-1));  // t - bound
            if (a.kind == Atom::Eq) return f_const(false);
            if (upper) return atom_norm(Atom{Atom::Lt, e, 0});        // t + eps <=/< bound <=> t < bound
            LinExpr ne = e.negated();
            return atom_norm(Atom{Atom::Le, ne, 0});                  // bound <=/< t + eps <=> bound <= t
          }
        }
        return f;
      }
    }
    return f;
  }

  F lw(const F& f, const VarRef& x) {
    std::vector<VTerm> tests{VTerm{VTerm::MinusInf, {}}};
    collect_lw_tests(f, x, tests);
    std::vector<F> out;
    for (const auto& t : tests) out.push_back(subst_virtual(f, x, t));
    return f_or(std::move(out));
  }

  static void collect_lw_tests(const F& f, const VarRef& x, std::vector<VTerm>& tests) {
    if (f->k == FNode::And || f->k == FNode::Or) {
      for (const auto& k : f->kids) collect_lw_tests(k, x, tests);
      return;
    }
    if (f->k != FNode::Atm) return;
    const Atom& a = f->atom;
    Rat c = a.e.coeff(x);
    if (c.is_zero()) return;
    LinExpr bound = a.e.without(x).scaled(Rat(-1) / c);
    bool upper = c.sign() > 0;
    if (a.kind == Atom::Eq) {
      tests.push_back(VTerm{VTerm::Plain, bound});
      return;
    }
    // lower bounds contribute: bound (for <=) or bound + eps (for <)
    if (!upper) tests.push_back(VTerm{a.kind == Atom::Le ? VTerm::Plain : VTerm::PlusEps, bound});
  }

  // --- Cooper elimination for an integer variable ------------------------

  F cooper(const F& f0, const VarRef& x) {
    // lambda = lcm of |coefficients| of x
    i64 lambda = 1;
    bool present = false;
    walk_atoms(f0, [&](const Atom& a) {
      Rat c = a.e.coeff(x);
      if (c.is_zero()) return;
      present = true;
      PARGUS_CHECK(c.is_int(), "non-integral coefficient on int var in QE");
      for (const auto& [v, cv] : a.e.coeffs)
        PARGUS_CHECK(v.sort.is_int(), "mixed real/int atom in integer elimination");
      i64 ac = c.num < 0 ? -c.num : c.num;
      lambda = checked_i64(i128(lambda) / std::gcd(lambda, ac) * ac, "qe lambda");
    });
    if (!present) return f0;
    // rewrite atoms so x's coefficient is exactly +-lambda (y = lambda x)
    F f = map_atoms(f0, [&](const Atom& a) -> F {
      Rat c = a.e.coeff(x);
      if (c.is_zero()) return f_atom(a);
      i64 mult = lambda / (c.num < 0 ? -c.num : c.num);
      Atom b = a;
      b.e = a.e.scaled(Rat(mult));
      if (a.kind == Atom::Div) b.modulus = checked_i64(i128(a.modulus) * mult, "qe div scale");
      return f_atom(b);
    });
    // collect bounds and divisibility moduli (on the scaled variable)
    std::vector<LinExpr> lowers, uppers;  // b < y   /  y < a (strict views)
    i64 delta = lambda;
    walk_atoms(f, [&](const Atom& a) {
      Rat c = a.e.coeff(x);
      if (c.is_zero()) return;
      if (a.kind == Atom::Div) {
        delta = checked_i64(i128(delta) / std::gcd(delta, a.modulus) * a.modulus, "qe delta");
        return;
      }
      // views: c = +-lambda; atom c*x + t (<=,<,=) 0
      LinExpr t = a.e.without(x);
      if (a.kind == Atom::Eq) {
        lowers.push_back(lower_from(t, c, true));
        uppers.push_back(upper_from(t, c, true));
        return;
      }
      bool strict = a.kind == Atom::Lt;
      if (c.sign() > 0) uppers.push_back(upper_from(t, c, !strict));
      else lowers.push_back(lower_from(t, c, !strict));
    });
    dedup(lowers);
    dedup(uppers);

    bool use_lower = lowers.size() <= uppers.size();
    const auto& bounds = use_lower ? lowers : uppers;
    std::vector<F> out;
    for (i64 j = 1; j <= delta; ++j) {
      out.push_back(subst_and_project(f, x, lambda, std::nullopt, use_lower ? j : -j, use_lower));
      for (const auto& b : bounds)
        out.push_back(subst_and_project(f, x, lambda, b, use_lower ? j : -j, use_lower));
    }
    return f_or(std::move(out));
  }

  // lower view: b < y where y = lambda*x; atom c*x + t with c = -lambda gives
  // t <= y (closed) -> lower bound t - 1 in strict form
  static LinExpr lower_from(const LinExpr& t, const Rat& c, bool closed) {
    LinExpr b = c.sign() < 0 ? t : t.negated();
    if (closed) b.k = b.k - Rat(1);
    return b;
  }
  static LinExpr upper_from(const LinExpr& t, const Rat& c, bool closed) {
    LinExpr b = c.sign() > 0 ? t.negated() : t;
    if (closed) b.k = b.k + Rat(1);
    return b;
  }
  static void dedup(std::vector<LinExpr>& v) {
    std::vector<LinExpr> out;
    for (const auto& e : v) {
      bool seen = false;
      for (const auto& o : out)
        if (o == e) { seen = true; break; }
      if (!seen) out.push_back(e);
    }
    v = std::move(out);
  }

  template <class Fn>
  static void walk_atoms(const F& f, Fn&& fn) {
    if (f->k == FNode::Atm) { fn(f->atom); return; }
    for (const auto& k : f->kids) walk_atoms(k, fn);
  }
  template <class Fn>
  static F map_atoms(const F& f, Fn&& fn) {
    switch (f->k) {
      case FNode::Atm: return fn(f->atom);
      case FNode::And: case FNode::Or: {
        std::vector<F> kids;
        for (const auto& k : f->kids) kids.push_back(map_atoms(k, fn));
        return f_nary(f->k, std::move(kids));
      }
      default: return f;
    }
  }

  // substitute y := bound + j (or the -inf / +inf projection when !bound),
  // where y = lambda*x appears in atoms with coefficient +-lambda. The value
  // substituted for y must be divisible by lambda for x to stay integral;
  // that guard is conjoined once at the top.
  static F subst_and_project(const F& f, const VarRef& x, i64 lambda,
                             const std::optional<LinExpr>& bound, i64 j, bool low_side) {
    F body = map_atoms(f, [&](const Atom& a) -> F {
      Rat c = a.e.coeff(x);
      if (c.is_zero()) return f_atom(a);
      int cs = c.sign();
      LinExpr t = a.e.without(x);
      if (!bound) {
        // projection at -inf (low_side) or +inf; y ~ j (mod delta)
        if (a.kind == Atom::Div) {
          LinExpr e = t;
          e.k = e.k + Rat(cs > 0 ? j : -j);
          return atom_norm(Atom{Atom::Div, e, a.modulus});
        }
        if (a.kind == Atom::Eq) return f_const(false);
        bool upper = cs > 0;  // y <=/< .. form
        // at -inf uppers true, lowers false; at +inf flipped
        bool val = low_side ? upper : !upper;
        return f_const(val);
      }
      // y := bound + j ; atom is  c*x + t  with  c = +-lambda, i.e. +-y + t
      LinExpr e = *bound;
      e.k = e.k + Rat(j);
      if (a.kind == Atom::Div) {
        LinExpr u = cs > 0 ? e : e.negated();
        u.add(t, Rat(1));
        return atom_norm(Atom{Atom::Div, u, a.modulus});
      }
      LinExpr u = e.scaled(Rat(cs));  // +-(bound + j)
      u.add(t, Rat(1));
      return atom_norm(Atom{a.kind, u, 0});
    });
    if (lambda > 1) {
      LinExpr yval;
      if (bound) {
        yval = *bound;
        yval.k = yval.k + Rat(j);
      } else {
        yval.k = Rat(j);
      }
      body = f_and({body, atom_norm(Atom{Atom::Div, yval, lambda})});
    }
    return body;
  }
};

inline Term qe(const Term& quantified) { return Eliminator().eliminate(quantified); }

}  // namespace pargus::lin

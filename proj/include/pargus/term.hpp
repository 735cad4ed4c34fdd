#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "pargus/basic.hpp"

namespace pargus {

// Node kinds of the expression language: linear integer/real/mixed arithmetic
// plus Booleans. Multiplication carries exactly one constant factor.
// Forall/Exists appear only as inputs to quantifier elimination.
enum class Op {
  Const,
  Var,
  MulConst,
  Neg,
  Add,
  Sub,
  Abs,
  Floor,
  Ite,
  Le,
  Lt,
  Ge,
  Gt,
  Eq,
  Not,
  And,
  Or,
  Implies,
  Forall,
  Exists,
};

// Rank for the deterministic term order. All comparison kinds share one rank
// so conjunctions of atoms sort by their variable part first; constants rank
// after variables so sums render as "x + d + 1".
inline int op_rank(Op op) {
  switch (op) {
    case Op::Var: return 0;
    case Op::MulConst: return 1;
    case Op::Neg: return 2;
    case Op::Add: return 3;
    case Op::Sub: return 4;
    case Op::Abs: return 5;
    case Op::Floor: return 6;
    case Op::Ite: return 7;
    case Op::Const: return 8;
    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq: return 9;
    case Op::Not: return 10;
    case Op::And: return 11;
    case Op::Or: return 12;
    case Op::Implies: return 13;
    case Op::Forall: return 14;
    case Op::Exists: return 15;
  }
  return 99;
}

class Term;
using Terms = std::vector<Term>;

namespace detail {
struct Node {
  Op op = Op::Const;
  Sort sort;
  size_t hash = 0;
  Value cval;            // Const
  VarRef var;            // Var
  Rat factor;            // MulConst
  std::vector<Term> kids;
  std::vector<VarRef> binders;  // Forall/Exists
};

inline Node node(Op op, Sort sort) {
  Node n;
  n.op = op;
  n.sort = sort;
  return n;
}
}  // namespace detail

class Term {
 public:
  Term() = default;  // empty handle; most APIs require a non-empty term

  bool empty() const { return !p_; }
  Op op() const { return p_->op; }
  Sort sort() const { return p_->sort; }
  size_t hash() const { return p_->hash; }
  const Value& cval() const { return p_->cval; }
  const VarRef& var() const { return p_->var; }
  const Rat& factor() const { return p_->factor; }
  const Terms& kids() const { return p_->kids; }
  const Term& kid(size_t i) const { return p_->kids[i]; }
  size_t arity() const { return p_->kids.size(); }
  const std::vector<VarRef>& binders() const { return p_->binders; }

  bool is_const() const { return p_->op == Op::Const; }
  bool is_var() const { return p_->op == Op::Var; }
  bool is_true() const { return is_const() && sort().is_bool() && cval().b; }
  bool is_false() const { return is_const() && sort().is_bool() && !cval().b; }

  static Term make(detail::Node n) {
    n.hash = compute_hash(n);
    Term t;
    t.p_ = std::make_shared<const detail::Node>(std::move(n));
    return t;
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.p_ == b.p_) return true;
    if (!a.p_ || !b.p_) return false;
    if (a.hash() != b.hash()) return false;
    return structurally_equal(a, b);
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

  // Total order: node kind rank, then payload/children, then constant value.
  // Deterministic; used for sorting commutative arguments and clustering keys.
  static int cmp(const Term& a, const Term& b) {
    if (a.p_ == b.p_) return 0;
    if (op_rank(a.op()) != op_rank(b.op())) return op_rank(a.op()) < op_rank(b.op()) ? -1 : 1;
    if (a.op() != b.op() && op_rank(a.op()) == 9) {
      // comparisons: order by children first, op kind as the tiebreak
      for (size_t i = 0; i < 2; ++i) {
        int c = cmp(a.kid(i), b.kid(i));
        if (c != 0) return c;
      }
      return static_cast<int>(a.op()) < static_cast<int>(b.op()) ? -1 : 1;
    }
    switch (a.op()) {
      case Op::Const: {
        if (a.sort().kind != b.sort().kind) return a.sort().kind < b.sort().kind ? -1 : 1;
        if (a.sort().is_bool()) {
          if (a.cval().b == b.cval().b) return 0;
          return !a.cval().b ? -1 : 1;
        }
        if (a.cval().q == b.cval().q) return 0;
        return a.cval().q < b.cval().q ? -1 : 1;
      }
      case Op::Var: {
        if (a.var() == b.var()) return 0;
        return a.var() < b.var() ? -1 : 1;
      }
      default: break;
    }
    if (a.op() == Op::MulConst && a.factor() != b.factor())
      return a.factor() < b.factor() ? -1 : 1;
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (size_t i = 0; i < a.arity(); ++i) {
      int c = cmp(a.kid(i), b.kid(i));
      if (c != 0) return c;
    }
    if (a.op() == Op::Forall || a.op() == Op::Exists) {
      if (a.binders() != b.binders()) return a.binders() < b.binders() ? -1 : 1;
    }
    return 0;
  }
  friend bool term_less(const Term& a, const Term& b) { return cmp(a, b) < 0; }

  size_t node_count() const {
    size_t n = 1;
    for (const auto& k : kids()) n += k.node_count();
    return n;
  }

 private:
  static size_t mix(size_t h, size_t v) { return h * 1000003u ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)); }
  static size_t compute_hash(const detail::Node& n) {
    size_t h = mix(size_t(n.op) + 1, size_t(n.sort.kind));
    switch (n.op) {
      case Op::Const:
        h = mix(h, n.cval.is_bool() ? size_t(n.cval.b) : size_t(n.cval.q.num) * 31 + size_t(n.cval.q.den));
        break;
      case Op::Var:
        h = mix(h, std::hash<std::string>{}(n.var.name));
        h = mix(h, size_t(n.var.cls));
        break;
      case Op::MulConst:
        h = mix(h, size_t(n.factor.num) * 31 + size_t(n.factor.den));
        break;
      default: break;
    }
    for (const auto& k : n.kids) h = mix(h, k.hash());
    for (const auto& b : n.binders) h = mix(h, std::hash<std::string>{}(b.name));
    return h;
  }
  static bool structurally_equal(const Term& a, const Term& b) {
    if (a.op() != b.op() || a.sort() != b.sort() || a.arity() != b.arity()) return false;
    switch (a.op()) {
      case Op::Const: return a.cval() == b.cval();
      case Op::Var: return a.var() == b.var();
      case Op::MulConst:
        if (a.factor() != b.factor()) return false;
        break;
      case Op::Forall:
      case Op::Exists:
        if (a.binders() != b.binders()) return false;
        break;
      default: break;
    }
    for (size_t i = 0; i < a.arity(); ++i)
      if (a.kid(i) != b.kid(i)) return false;
    return true;
  }

  std::shared_ptr<const detail::Node> p_;
};

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return Term::cmp(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// Constructors (sort-checked). Nonlinear products are unrepresentable: the
// only multiplication node is constant * term.
// ---------------------------------------------------------------------------

inline Term mk_bool(bool v) {
  detail::Node n = detail::node(Op::Const, bool_sort());
  n.cval = Value::of_bool(v);
  return Term::make(std::move(n));
}
inline Term mk_true() { return mk_bool(true); }
inline Term mk_false() { return mk_bool(false); }

inline Term mk_int(i64 v) {
  detail::Node n = detail::node(Op::Const, int_sort());
  n.cval = Value::of_int(v);
  return Term::make(std::move(n));
}
inline Term mk_real(Rat v) {
  detail::Node n = detail::node(Op::Const, real_sort());
  n.cval = Value::of_real(v);
  return Term::make(std::move(n));
}
inline Term mk_const(const Value& v) {
  switch (v.kind) {
    case SortKind::Bool: return mk_bool(v.b);
    case SortKind::Int: return mk_int(v.q.num);
    case SortKind::Real: return mk_real(v.q);
  }
  throw Error("bad value");
}

inline Term mk_var(const VarRef& v) {
  detail::Node n = detail::node(Op::Var, v.sort);
  n.var = v;
  return Term::make(std::move(n));
}

inline void require_numeric(const Term& t, const char* where) {
  if (!t.sort().is_numeric()) throw Error(std::string(where) + ": expected numeric operand");
}
inline void require_bool(const Term& t, const char* where) {
  if (!t.sort().is_bool()) throw Error(std::string(where) + ": expected boolean operand");
}

inline Term mk_mul(Rat c, const Term& t) {
  require_numeric(t, "mul");
  Sort s = (!c.is_int() || t.sort().is_real()) ? real_sort() : int_sort();
  detail::Node n = detail::node(Op::MulConst, s);
  n.factor = c;
  n.kids = {t};
  return Term::make(std::move(n));
}
inline Term mk_neg(const Term& t) {
  require_numeric(t, "neg");
  detail::Node n = detail::node(Op::Neg, t.sort());
  n.kids = {t};
  return Term::make(std::move(n));
}
inline Term mk_add(Terms kids) {
  PARGUS_CHECK(kids.size() >= 2, "add arity");
  Sort s = int_sort();
  for (auto& k : kids) {
    require_numeric(k, "add");
    s = join_numeric(s, k.sort());
  }
  detail::Node n = detail::node(Op::Add, s);
  n.kids = std::move(kids);
  return Term::make(std::move(n));
}
inline Term mk_add(const Term& a, const Term& b) { return mk_add(Terms{a, b}); }
inline Term mk_sub(const Term& a, const Term& b) {
  require_numeric(a, "sub");
  require_numeric(b, "sub");
  detail::Node n = detail::node(Op::Sub, join_numeric(a.sort(), b.sort()));
  n.kids = {a, b};
  return Term::make(std::move(n));
}
inline Term mk_abs(const Term& t) {
  require_numeric(t, "abs");
  detail::Node n = detail::node(Op::Abs, t.sort());
  n.kids = {t};
  return Term::make(std::move(n));
}
inline Term mk_floor(const Term& t) {
  require_numeric(t, "floor");
  detail::Node n = detail::node(Op::Floor, int_sort());
  n.kids = {t};
  return Term::make(std::move(n));
}
inline Term mk_ite(const Term& c, const Term& a, const Term& b) {
  require_bool(c, "ite");
  Sort s;
  if (a.sort().is_bool() || b.sort().is_bool()) {
    if (a.sort() != b.sort()) throw Error("ite: branch sorts incompatible");
    s = a.sort();
  } else {
    s = join_numeric(a.sort(), b.sort());
  }
  detail::Node n = detail::node(Op::Ite, s);
  n.kids = {c, a, b};
  return Term::make(std::move(n));
}

inline Term mk_cmp(Op op, const Term& a, const Term& b) {
  PARGUS_CHECK(op == Op::Le || op == Op::Lt || op == Op::Ge || op == Op::Gt || op == Op::Eq, "cmp op");
  if (op == Op::Eq && a.sort().is_bool() && b.sort().is_bool()) {
    detail::Node n = detail::node(Op::Eq, bool_sort());
    n.kids = {a, b};
    return Term::make(std::move(n));
  }
  require_numeric(a, "comparison");
  require_numeric(b, "comparison");
  detail::Node n = detail::node(op, bool_sort());
  n.kids = {a, b};
  return Term::make(std::move(n));
}
inline Term mk_le(const Term& a, const Term& b) { return mk_cmp(Op::Le, a, b); }
inline Term mk_lt(const Term& a, const Term& b) { return mk_cmp(Op::Lt, a, b); }
inline Term mk_ge(const Term& a, const Term& b) { return mk_cmp(Op::Ge, a, b); }
inline Term mk_gt(const Term& a, const Term& b) { return mk_cmp(Op::Gt, a, b); }
inline Term mk_eq(const Term& a, const Term& b) { return mk_cmp(Op::Eq, a, b); }

inline Term mk_not(const Term& t) {
  require_bool(t, "not");
  detail::Node n = detail::node(Op::Not, bool_sort());
  n.kids = {t};
  return Term::make(std::move(n));
}
inline Term mk_nary(Op op, Terms kids) {
  PARGUS_CHECK(op == Op::And || op == Op::Or, "nary op");
  PARGUS_CHECK(kids.size() >= 2, "nary arity");
  for (auto& k : kids) require_bool(k, "and/or");
  detail::Node n = detail::node(op, bool_sort());
  n.kids = std::move(kids);
  return Term::make(std::move(n));
}
inline Term mk_and(Terms kids) { return mk_nary(Op::And, std::move(kids)); }
inline Term mk_and(const Term& a, const Term& b) { return mk_and(Terms{a, b}); }
inline Term mk_or(Terms kids) { return mk_nary(Op::Or, std::move(kids)); }
inline Term mk_or(const Term& a, const Term& b) { return mk_or(Terms{a, b}); }
inline Term mk_implies(const Term& a, const Term& b) {
  require_bool(a, "implies");
  require_bool(b, "implies");
  detail::Node n = detail::node(Op::Implies, bool_sort());
  n.kids = {a, b};
  return Term::make(std::move(n));
}
inline Term mk_iff(const Term& a, const Term& b) { return mk_eq(a, b); }

inline Term mk_quant(Op op, std::vector<VarRef> binders, const Term& body) {
  PARGUS_CHECK(op == Op::Forall || op == Op::Exists, "quantifier op");
  require_bool(body, "quantifier body");
  PARGUS_CHECK(!binders.empty(), "empty binder list");
  detail::Node n = detail::node(op, bool_sort());
  n.binders = std::move(binders);
  n.kids = {body};
  return Term::make(std::move(n));
}
inline Term mk_forall(std::vector<VarRef> bs, const Term& body) { return mk_quant(Op::Forall, std::move(bs), body); }
inline Term mk_exists(std::vector<VarRef> bs, const Term& body) { return mk_quant(Op::Exists, std::move(bs), body); }

// Convenience folds: conjunction/disjunction of a possibly short list.
inline Term conj(Terms ts) {
  if (ts.empty()) return mk_true();
  if (ts.size() == 1) return ts[0];
  return mk_and(std::move(ts));
}
inline Term disj(Terms ts) {
  if (ts.empty()) return mk_false();
  if (ts.size() == 1) return ts[0];
  return mk_or(std::move(ts));
}
inline Term sum(Terms ts) {
  PARGUS_CHECK(!ts.empty(), "empty sum");
  if (ts.size() == 1) return ts[0];
  return mk_add(std::move(ts));
}

// ---------------------------------------------------------------------------
// Queries and rewrites
// ---------------------------------------------------------------------------

inline void collect_vars(const Term& t, std::set<VarRef>& out) {
  if (t.op() == Op::Var) out.insert(t.var());
  for (const auto& k : t.kids()) collect_vars(k, out);
}
inline std::set<VarRef> vars(const Term& t) {
  std::set<VarRef> s;
  collect_vars(t, s);
  return s;
}
inline bool has_var_class(const Term& t, VarClass c) {
  if (t.op() == Op::Var && t.var().cls == c) return true;
  for (const auto& k : t.kids())
    if (has_var_class(k, c)) return true;
  return false;
}
inline bool has_holes(const Term& t) { return has_var_class(t, VarClass::Hole); }

inline Term rebuild(const Term& t, Terms kids) {
  detail::Node n = detail::node(t.op(), t.sort());
  n.cval = t.cval();
  n.var = t.var();
  n.factor = t.factor();
  n.binders = t.binders();
  n.kids = std::move(kids);
  // Sort of some nodes depends on children; recompute for safety.
  switch (n.op) {
    case Op::MulConst: n.sort = (!n.factor.is_int() || n.kids[0].sort().is_real()) ? real_sort() : int_sort(); break;
    case Op::Neg: case Op::Abs: n.sort = n.kids[0].sort(); break;
    case Op::Add: case Op::Sub: {
      Sort s = int_sort();
      for (auto& k : n.kids) s = join_numeric(s, k.sort());
      n.sort = s;
      break;
    }
    case Op::Ite:
      n.sort = n.kids[1].sort().is_bool() ? n.kids[1].sort() : join_numeric(n.kids[1].sort(), n.kids[2].sort());
      break;
    default: break;
  }
  return Term::make(std::move(n));
}

// Simultaneous variable substitution (no re-substitution into inserted terms).
// Keys are (class, name); inserted terms must be sort-compatible (int may
// flow into a real position, not vice versa).
inline Term substitute_vars(const Term& t, const std::map<VarKey, Term>& sub) {
  if (sub.empty()) return t;
  if (t.op() == Op::Var) {
    auto it = sub.find(VarKey(t.var()));
    if (it == sub.end()) return t;
    const Term& rep = it->second;
    Sort want = t.sort(), got = rep.sort();
    if (want == got) return rep;
    if (want.is_real() && got.is_int()) return rep;
    throw Error("substitution sort mismatch for " + t.var().display() + ": " + want.str() + " vs " + got.str());
  }
  if (t.kids().empty()) return t;
  Terms kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const auto& k : t.kids()) {
    kids.push_back(substitute_vars(k, sub));
    if (kids.back() != k) changed = true;
  }
  if (!changed) return t;
  return rebuild(t, std::move(kids));
}

// Hole substitution. Domain must contain only Hole-class variables.
struct Substitution {
  std::map<std::string, Term> map;  // hole name -> replacement

  bool empty() const { return map.empty(); }
  friend bool operator==(const Substitution& a, const Substitution& b) { return a.map == b.map; }
};

inline Term substitute(const Term& t, const Substitution& s) {
  if (s.empty()) return t;
  std::map<VarKey, Term> sub;
  for (const auto& [name, rep] : s.map) sub.emplace(VarKey(VarClass::Hole, name), rep);
  return substitute_vars(t, sub);
}

// Parameter instantiation: every Parameter variable replaced by its value.
using ParamValuation = std::map<std::string, i64>;

inline Term instantiate_params(const Term& t, const ParamValuation& p) {
  if (t.op() == Op::Var && t.var().cls == VarClass::Parameter) {
    auto it = p.find(t.var().name);
    if (it == p.end()) throw Error("parameter " + t.var().name + " unassigned in valuation");
    return mk_int(it->second);
  }
  if (t.kids().empty()) return t;
  Terms kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const auto& k : t.kids()) {
    kids.push_back(instantiate_params(k, p));
    if (kids.back() != k) changed = true;
  }
  return changed ? rebuild(t, std::move(kids)) : t;
}

// Rename states to primed states (for post-state predicates).
inline Term prime_states(const Term& t) {
  if (t.op() == Op::Var && t.var().cls == VarClass::State) {
    VarRef v = t.var();
    v.cls = VarClass::PrimedState;
    return mk_var(v);
  }
  if (t.op() == Op::Var && t.var().cls == VarClass::Counter) {
    VarRef v = t.var();
    v.cls = VarClass::PrimedState;  // primed counter rides on the primed class
    return mk_var(v);
  }
  if (t.kids().empty()) return t;
  Terms kids;
  kids.reserve(t.arity());
  bool changed = false;
  for (const auto& k : t.kids()) {
    kids.push_back(prime_states(k));
    if (kids.back() != k) changed = true;
  }
  return changed ? rebuild(t, std::move(kids)) : t;
}

// ---------------------------------------------------------------------------
// Ground evaluation
// ---------------------------------------------------------------------------

using Valuation = std::map<VarKey, Value>;

inline Value evaluate(const Term& t, const Valuation& v);

inline Rat eval_num(const Term& t, const Valuation& v) {
  Value x = evaluate(t, v);
  PARGUS_CHECK(x.is_numeric(), "expected numeric value");
  return x.q;
}

inline Value evaluate(const Term& t, const Valuation& v) {
  switch (t.op()) {
    case Op::Const: return t.cval();
    case Op::Var: {
      if (t.var().cls == VarClass::Hole) throw Error("evaluate: hole " + t.var().name + " present");
      auto it = v.find(VarKey(t.var()));
      if (it == v.end()) throw Error("evaluate: variable " + t.var().display() + " unassigned");
      return it->second;
    }
    case Op::MulConst: {
      Rat r = t.factor() * eval_num(t.kid(0), v);
      return t.sort().is_int() ? Value::of_int(r.num) : Value::of_real(r);
    }
    case Op::Neg: {
      Rat r = -eval_num(t.kid(0), v);
      return t.sort().is_int() ? Value::of_int(r.num) : Value::of_real(r);
    }
    case Op::Add: {
      Rat r(0);
      for (const auto& k : t.kids()) r = r + eval_num(k, v);
      return t.sort().is_int() ? Value::of_int(r.num) : Value::of_real(r);
    }
    case Op::Sub: {
      Rat r = eval_num(t.kid(0), v) - eval_num(t.kid(1), v);
      return t.sort().is_int() ? Value::of_int(r.num) : Value::of_real(r);
    }
    case Op::Abs: {
      Rat r = eval_num(t.kid(0), v).abs();
      return t.sort().is_int() ? Value::of_int(r.num) : Value::of_real(r);
    }
    case Op::Floor: return Value::of_int(eval_num(t.kid(0), v).floor().num);
    case Op::Ite:
      return evaluate(t.kid(0), v).as_bool() ? evaluate(t.kid(1), v) : evaluate(t.kid(2), v);
    case Op::Le: return Value::of_bool(eval_num(t.kid(0), v) <= eval_num(t.kid(1), v));
    case Op::Lt: return Value::of_bool(eval_num(t.kid(0), v) < eval_num(t.kid(1), v));
    case Op::Ge: return Value::of_bool(eval_num(t.kid(0), v) >= eval_num(t.kid(1), v));
    case Op::Gt: return Value::of_bool(eval_num(t.kid(0), v) > eval_num(t.kid(1), v));
    case Op::Eq: {
      if (t.kid(0).sort().is_bool())
        return Value::of_bool(evaluate(t.kid(0), v).as_bool() == evaluate(t.kid(1), v).as_bool());
      return Value::of_bool(eval_num(t.kid(0), v) == eval_num(t.kid(1), v));
    }
    case Op::Not: return Value::of_bool(!evaluate(t.kid(0), v).as_bool());
    case Op::And: {
      for (const auto& k : t.kids())
        if (!evaluate(k, v).as_bool()) return Value::of_bool(false);
      return Value::of_bool(true);
    }
    case Op::Or: {
      for (const auto& k : t.kids())
        if (evaluate(k, v).as_bool()) return Value::of_bool(true);
      return Value::of_bool(false);
    }
    case Op::Implies:
      return Value::of_bool(!evaluate(t.kid(0), v).as_bool() || evaluate(t.kid(1), v).as_bool());
    case Op::Forall:
    case Op::Exists:
      throw Error("evaluate: quantifier present");
  }
  throw Error("evaluate: bad node");
}

// ---------------------------------------------------------------------------
// Printing. The printer emits the same concrete syntax the parser accepts.
// ---------------------------------------------------------------------------

namespace detail {
// precedence levels: implies 1, or 2, and 3, not 4, cmp 5, add 6, unary 7, mul 8
inline int prec(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq: return 5;
    case Op::Add: case Op::Sub: return 6;
    case Op::Neg: return 7;
    case Op::MulConst: return 8;
    default: return 9;
  }
}

inline void print_term(std::ostream& os, const Term& t, int parent_prec);

inline void print_wrapped(std::ostream& os, const Term& t, int parent_prec) {
  int p = prec(t.op());
  if (p < parent_prec) {
    os << '(';
    print_term(os, t, 0);
    os << ')';
  } else {
    print_term(os, t, p);
  }
}

inline void print_term(std::ostream& os, const Term& t, int parent_prec) {
  switch (t.op()) {
    case Op::Const:
      if (t.sort().is_bool()) {
        os << (t.cval().b ? "true" : "false");
      } else if (t.cval().q.num < 0) {
        if (parent_prec > 7) os << '(';
        os << t.cval().q.str();
        if (parent_prec > 7) os << ')';
      } else {
        os << t.cval().q.str();
      }
      return;
    case Op::Var: os << t.var().display(); return;
    case Op::MulConst:
      os << t.factor().str() << " * ";
      print_wrapped(os, t.kid(0), 9);
      return;
    case Op::Neg:
      os << '-';
      print_wrapped(os, t.kid(0), 8);
      return;
    case Op::Add: {
      for (size_t i = 0; i < t.arity(); ++i) {
        if (i) os << " + ";
        print_wrapped(os, t.kid(i), 6);
      }
      return;
    }
    case Op::Sub:
      print_wrapped(os, t.kid(0), 6);
      os << " - ";
      print_wrapped(os, t.kid(1), 7);
      return;
    case Op::Abs:
      os << "abs(";
      print_term(os, t.kid(0), 0);
      os << ')';
      return;
    case Op::Floor:
      os << "floor(";
      print_term(os, t.kid(0), 0);
      os << ')';
      return;
    case Op::Ite:
      os << "ite(";
      print_term(os, t.kid(0), 0);
      os << ", ";
      print_term(os, t.kid(1), 0);
      os << ", ";
      print_term(os, t.kid(2), 0);
      os << ')';
      return;
    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq: {
      const char* s = t.op() == Op::Le ? " <= " : t.op() == Op::Lt ? " < "
                    : t.op() == Op::Ge ? " >= " : t.op() == Op::Gt ? " > " : " = ";
      print_wrapped(os, t.kid(0), 6);
      os << s;
      print_wrapped(os, t.kid(1), 6);
      return;
    }
    case Op::Not:
      os << '!';
      print_wrapped(os, t.kid(0), 5);
      return;
    case Op::And: case Op::Or: {
      const char* s = t.op() == Op::And ? " && " : " || ";
      int p = prec(t.op());
      for (size_t i = 0; i < t.arity(); ++i) {
        if (i) os << s;
        print_wrapped(os, t.kid(i), p + 1);
      }
      return;
    }
    case Op::Implies:
      print_wrapped(os, t.kid(0), 2);
      os << " -> ";
      print_wrapped(os, t.kid(1), 1);
      return;
    case Op::Forall: case Op::Exists: {
      os << (t.op() == Op::Forall ? "forall " : "exists ");
      for (size_t i = 0; i < t.binders().size(); ++i) {
        if (i) os << ", ";
        os << t.binders()[i].display();
      }
      os << ". ";
      print_wrapped(os, t.kid(0), 1);
      return;
    }
  }
}
}  // namespace detail

inline std::string to_string(const Term& t) {
  if (t.empty()) return "<empty>";
  std::ostringstream os;
  detail::print_term(os, t, 0);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace pargus

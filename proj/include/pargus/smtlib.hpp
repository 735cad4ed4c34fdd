#pragma once

#include <istream>
#include <sstream>

#include "pargus/term.hpp"

// SMT-LIB2 text encoding: term printing for the client side, s-expression
// reading and term reconstruction for the server side.

namespace pargus::smtlib {

inline std::string sort_name(Sort s) {
  switch (s.kind) {
    case SortKind::Bool: return "Bool";
    case SortKind::Int: return "Int";
    case SortKind::Real: return "Real";
  }
  return "?";
}

inline bool simple_symbol(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '!' || c == '.' || c == '-' ||
          c == '@' || c == '$'))
      return false;
  return !std::isdigit(static_cast<unsigned char>(s[0]));
}

inline std::string symbol_of(const VarRef& v) {
  std::string name = v.display();  // primed states get a trailing quote
  if (simple_symbol(name)) return name;
  return "|" + name + "|";
}

namespace detail {

inline void print_rat(std::ostream& os, const Rat& q, bool as_real) {
  if (q.num < 0) {
    os << "(- ";
    print_rat(os, -q, as_real);
    os << ")";
    return;
  }
  if (q.den == 1) {
    os << q.num;
    if (as_real) os << ".0";
  } else {
    os << "(/ " << q.num << ".0 " << q.den << ".0)";
  }
}

// prints with explicit Int->Real coercions so the text is well-sorted
inline void print_term(std::ostream& os, const Term& t, bool want_real) {
  bool coerce = want_real && t.sort().is_int();
  if (coerce) os << "(to_real ";
  switch (t.op()) {
    case Op::Const:
      if (t.sort().is_bool()) os << (t.cval().b ? "true" : "false");
      else print_rat(os, t.cval().q, t.sort().is_real());
      break;
    case Op::Var:
      os << symbol_of(t.var());
      break;
    case Op::MulConst: {
      bool real = t.sort().is_real();
      os << "(* ";
      print_rat(os, t.factor(), real);
      os << ' ';
      print_term(os, t.kid(0), real);
      os << ')';
      break;
    }
    case Op::Neg:
      os << "(- ";
      print_term(os, t.kid(0), t.sort().is_real());
      os << ')';
      break;
    case Op::Add: case Op::Sub: {
      bool real = t.sort().is_real();
      os << (t.op() == Op::Add ? "(+" : "(-");
      for (const auto& k : t.kids()) {
        os << ' ';
        print_term(os, k, real);
      }
      os << ')';
      break;
    }
    case Op::Abs:
      os << "(abs ";
      print_term(os, t.kid(0), t.sort().is_real());
      os << ')';
      break;
    case Op::Floor:
      if (t.kid(0).sort().is_int()) {
        print_term(os, t.kid(0), false);
      } else {
        os << "(to_int ";
        print_term(os, t.kid(0), true);
        os << ')';
      }
      break;
    case Op::Ite:
      os << "(ite ";
      print_term(os, t.kid(0), false);
      os << ' ';
      print_term(os, t.kid(1), t.sort().is_real());
      os << ' ';
      print_term(os, t.kid(2), t.sort().is_real());
      os << ')';
      break;
    case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq: {
      const char* sym = t.op() == Op::Le ? "<=" : t.op() == Op::Lt ? "<"
                       : t.op() == Op::Ge ? ">=" : t.op() == Op::Gt ? ">" : "=";
      bool real = t.kid(0).sort().is_real() || t.kid(1).sort().is_real();
      os << '(' << sym << ' ';
      print_term(os, t.kid(0), real);
      os << ' ';
      print_term(os, t.kid(1), real);
      os << ')';
      break;
    }
    case Op::Not:
      os << "(not ";
      print_term(os, t.kid(0), false);
      os << ')';
      break;
    case Op::And: case Op::Or: {
      os << (t.op() == Op::And ? "(and" : "(or");
      for (const auto& k : t.kids()) {
        os << ' ';
        print_term(os, k, false);
      }
      os << ')';
      break;
    }
    case Op::Implies:
      os << "(=> ";
      print_term(os, t.kid(0), false);
      os << ' ';
      print_term(os, t.kid(1), false);
      os << ')';
      break;
    case Op::Forall: case Op::Exists: {
      os << (t.op() == Op::Forall ? "(forall (" : "(exists (");
      for (size_t i = 0; i < t.binders().size(); ++i) {
        if (i) os << ' ';
        os << '(' << symbol_of(t.binders()[i]) << ' ' << sort_name(t.binders()[i].sort) << ')';
      }
      os << ") ";
      print_term(os, t.kid(0), false);
      os << ')';
      break;
    }
  }
  if (coerce) os << ')';
}

}  // namespace detail

inline std::string to_smt2(const Term& t) {
  std::ostringstream os;
  detail::print_term(os, t, false);
  return os.str();
}

// ---------------------------------------------------------------------------
// S-expressions
// ---------------------------------------------------------------------------

struct SExpr {
  bool atom = true;
  std::string text;          // atom payload
  std::vector<SExpr> kids;   // list payload

  bool is(const std::string& s) const { return atom && text == s; }
  std::string str() const {
    if (atom) return text;
    std::string out = "(";
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) out += ' ';
      out += kids[i].str();
    }
    return out + ")";
  }
};

// Streaming reader: one complete s-expression per call.
class SReader {
 public:
  explicit SReader(std::istream& in) : in_(in) {}

  std::optional<SExpr> next() {
    skip_ws();
    if (!in_.good() || in_.peek() == EOF) return std::nullopt;
    return read();
  }

 private:
  std::istream& in_;

  void skip_ws() {
    while (in_.good()) {
      int c = in_.peek();
      if (c == EOF) return;
      if (std::isspace(c)) { in_.get(); continue; }
      if (c == ';') {
        while (in_.good() && in_.get() != '\n') {}
        continue;
      }
      return;
    }
  }

  SExpr read() {
    skip_ws();
    int c = in_.peek();
    if (c == '(') {
      in_.get();
      SExpr e;
      e.atom = false;
      while (true) {
        skip_ws();
        c = in_.peek();
        if (c == EOF) throw Error("unterminated s-expression");
        if (c == ')') {
          in_.get();
          return e;
        }
        e.kids.push_back(read());
      }
    }
    if (c == '|') {
      in_.get();
      SExpr e;
      while (true) {
        int d = in_.get();
        if (d == EOF) throw Error("unterminated quoted symbol");
        if (d == '|') break;
        e.text.push_back(char(d));
      }
      return e;
    }
    if (c == '"') {
      in_.get();
      SExpr e;
      e.text = "\"";
      while (true) {
        int d = in_.get();
        if (d == EOF) throw Error("unterminated string");
        if (d == '"') {
          if (in_.peek() == '"') { e.text.push_back('"'); in_.get(); continue; }
          break;
        }
        e.text.push_back(char(d));
      }
      e.text += "\"";
      return e;
    }
    SExpr e;
    while (in_.good()) {
      int d = in_.peek();
      if (d == EOF || std::isspace(d) || d == '(' || d == ')' || d == ';') break;
      e.text.push_back(char(in_.get()));
    }
    if (e.text.empty()) throw Error("empty token");
    return e;
  }
};

inline std::optional<SExpr> parse_sexpr(const std::string& s) {
  std::istringstream is(s);
  SReader r(is);
  return r.next();
}

// ---------------------------------------------------------------------------
// Server-side term reconstruction
// ---------------------------------------------------------------------------

inline bool numeral(const std::string& s, i64& out) {
  if (s.empty()) return false;
  size_t i = 0;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  out = std::stoll(s);
  return true;
}

inline std::optional<Rat> decimal(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) return std::nullopt;
  std::string w = s.substr(0, dot), f = s.substr(dot + 1);
  if (w.empty() || f.empty()) return std::nullopt;
  for (char c : w + f)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  i64 den = 1;
  for (size_t i = 0; i < f.size(); ++i) den = checked_i64(i128(den) * 10, "decimal");
  return Rat(checked_i64(i128(std::stoll(w)) * den + (f.empty() ? 0 : std::stoll(f)), "decimal"), den);
}

class TermBuilder {
 public:
  explicit TermBuilder(const std::map<std::string, VarRef>& syms) : syms_(syms) {}

  Term build(const SExpr& e) const {
    if (e.atom) return leaf(e.text);
    PARGUS_CHECK(!e.kids.empty(), "empty application");
    const SExpr& head = e.kids[0];
    if (!head.atom) throw Error("bad application head: " + e.str());
    const std::string& op = head.text;
    Terms args;
    for (size_t i = 1; i < e.kids.size(); ++i) args.push_back(build(e.kids[i]));

    auto need = [&](size_t n) {
      if (args.size() != n) throw Error("operator " + op + " expects " + std::to_string(n) + " arguments");
    };
    if (op == "not") { need(1); return mk_not(args[0]); }
    if (op == "and") return args.size() < 2 ? (args.empty() ? mk_true() : args[0]) : mk_and(std::move(args));
    if (op == "or") return args.size() < 2 ? (args.empty() ? mk_false() : args[0]) : mk_or(std::move(args));
    if (op == "=>") { need(2); return mk_implies(args[0], args[1]); }
    if (op == "ite") { need(3); return mk_ite(args[0], args[1], args[2]); }
    if (op == "=") { need(2); return mk_eq(args[0], args[1]); }
    if (op == "<=") { need(2); return mk_le(args[0], args[1]); }
    if (op == "<") { need(2); return mk_lt(args[0], args[1]); }
    if (op == ">=") { need(2); return mk_ge(args[0], args[1]); }
    if (op == ">") { need(2); return mk_gt(args[0], args[1]); }
    if (op == "+") {
      if (args.size() == 1) return args[0];
      return mk_add(std::move(args));
    }
    if (op == "-") {
      if (args.size() == 1) return neg_of(args[0]);
      if (args.size() == 2) return mk_sub(args[0], args[1]);
      Term acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) acc = mk_sub(acc, args[i]);
      return acc;
    }
    if (op == "*") {
      need(2);
      if (args[0].is_const()) return mk_mul(args[0].cval().q, args[1]);
      if (args[1].is_const()) return mk_mul(args[1].cval().q, args[0]);
      if (args[0].op() == Op::Neg && args[0].kid(0).is_const()) return mk_mul(-args[0].kid(0).cval().q, args[1]);
      throw Error("nonlinear multiplication");
    }
    if (op == "/") {
      need(2);
      if (args[1].is_const() && args[1].cval().q != Rat(0))
        return mk_mul(Rat(1) / args[1].cval().q, args[0]);
      throw Error("division by non-constant");
    }
    if (op == "abs") { need(1); return mk_abs(args[0]); }
    if (op == "to_int") { need(1); return mk_floor(args[0]); }
    if (op == "to_real") { need(1); return args[0]; }  // sorts are lenient internally
    if (op == "distinct") { need(2); return mk_not(mk_eq(args[0], args[1])); }
    throw Error("unsupported operator: " + op);
  }

 private:
  const std::map<std::string, VarRef>& syms_;

  static Term neg_of(const Term& t) {
    if (t.is_const() && t.sort().is_numeric())
      return t.sort().is_real() ? mk_real(-t.cval().q) : mk_int(-t.cval().q.num);
    return mk_neg(t);
  }

  Term leaf(const std::string& s) const {
    if (s == "true") return mk_true();
    if (s == "false") return mk_false();
    i64 n;
    if (numeral(s, n)) return mk_int(n);
    if (auto d = decimal(s)) return mk_real(*d);
    auto it = syms_.find(s);
    if (it == syms_.end()) throw Error("undeclared symbol: " + s);
    return mk_var(it->second);
  }
};

// Client-side model value parsing.
inline Value value_of(const SExpr& e, Sort sort) {
  if (e.atom) {
    if (e.text == "true") return Value::of_bool(true);
    if (e.text == "false") return Value::of_bool(false);
    i64 n;
    if (numeral(e.text, n)) return sort.is_real() ? Value::of_real(Rat(n)) : Value::of_int(n);
    if (auto d = decimal(e.text)) return sort.is_real() ? Value::of_real(*d) : Value::of_int(d->floor().num);
    throw Error("bad model value: " + e.text);
  }
  if (e.kids.size() == 2 && e.kids[0].is("-")) {
    Value v = value_of(e.kids[1], sort);
    return v.is_bool() ? v : (sort.is_real() ? Value::of_real(-v.q) : Value::of_int(-v.q.num));
  }
  if (e.kids.size() == 3 && e.kids[0].is("/")) {
    Value a = value_of(e.kids[1], real_sort()), b = value_of(e.kids[2], real_sort());
    Rat q = a.q / b.q;
    return sort.is_real() ? Value::of_real(q) : Value::of_int(q.num);
  }
  throw Error("bad model value: " + e.str());
}

}  // namespace pargus::smtlib

#pragma once

#include <cctype>
#include <optional>

#include "pargus/term.hpp"

namespace pargus {

// Declared-variable context for expression parsing.
struct VarScope {
  std::vector<VarRef> vars;
  bool allow_primed = false;

  void add(const VarRef& v) { vars.push_back(v); }
  std::optional<VarRef> find(const std::string& name) const {
    for (const auto& v : vars)
      if (v.name == name && v.cls != VarClass::PrimedState) return v;
    return std::nullopt;
  }
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, const VarScope& scope) : text_(text), scope_(scope) {}

  Term parse_full() {
    Term t = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return t;
  }

  Term parse_expr() { return parse_implies(); }

 private:
  std::string_view text_;
  const VarScope& scope_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos_, "syntax error: " + msg); }

  void skip_ws() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) { ++pos_; continue; }
      if (text_[pos_] == '#') {  // comment to end of line
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      // keyword tokens must not continue as identifier characters
      if (std::isalpha(static_cast<unsigned char>(tok[0]))) {
        size_t end = pos_ + tok.size();
        if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
          return false;
      }
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Term parse_implies() {
    Term lhs = parse_or();
    skip_ws();
    if (eat("->")) {
      Term rhs = parse_implies();
      if (!lhs.sort().is_bool() || !rhs.sort().is_bool()) fail("'->' needs boolean operands");
      return mk_implies(lhs, rhs);
    }
    return lhs;
  }
  Term parse_or() {
    Term t = parse_and();
    Terms kids{t};
    while (true) {
      skip_ws();
      if (text_.substr(pos_, 2) == "||") { pos_ += 2; kids.push_back(parse_and()); }
      else break;
    }
    if (kids.size() == 1) return t;
    for (auto& k : kids)
      if (!k.sort().is_bool()) fail("'||' needs boolean operands");
    return mk_or(std::move(kids));
  }
  Term parse_and() {
    Term t = parse_not();
    Terms kids{t};
    while (true) {
      skip_ws();
      if (text_.substr(pos_, 2) == "&&") { pos_ += 2; kids.push_back(parse_not()); }
      else break;
    }
    if (kids.size() == 1) return t;
    for (auto& k : kids)
      if (!k.sort().is_bool()) fail("'&&' needs boolean operands");
    return mk_and(std::move(kids));
  }
  Term parse_not() {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '!' && text_.substr(pos_, 2) != "!=") {
      ++pos_;
      Term t = parse_not();
      if (!t.sort().is_bool()) fail("'!' needs a boolean operand");
      return mk_not(t);
    }
    return parse_cmp();
  }
  Term parse_cmp() {
    Term lhs = parse_add();
    skip_ws();
    Op op;
    bool neq = false;
    if (eat("<=")) op = Op::Le;
    else if (eat(">=")) op = Op::Ge;
    else if (eat("!=")) { op = Op::Eq; neq = true; }
    else if (eat("==")) op = Op::Eq;
    else if (peek() == '<' && text_.substr(pos_, 2) != "<-") { ++pos_; op = Op::Lt; }
    else if (peek() == '>') { ++pos_; op = Op::Gt; }
    else if (peek() == '=' && text_.substr(pos_, 2) != "=>") { ++pos_; op = Op::Eq; }
    else return lhs;
    size_t at = pos_;
    Term rhs = parse_add();
    if (lhs.sort().is_bool() != rhs.sort().is_bool()) { pos_ = at; fail("sort mismatch in comparison"); }
    if (lhs.sort().is_bool() && op != Op::Eq) { pos_ = at; fail("ordering on boolean operands"); }
    Term c = mk_cmp(op, lhs, rhs);
    return neq ? mk_not(c) : c;
  }
  Term parse_add() {
    Term t = parse_mul();
    while (true) {
      skip_ws();
      if (text_.substr(pos_, 2) == "->") break;
      if (eat("+")) {
        Term r = parse_mul();
        check_numeric(t); check_numeric(r);
        t = (t.op() == Op::Add) ? append_add(t, r) : mk_add(t, r);
      } else if (peek() == '-') {
        ++pos_;
        Term r = parse_mul();
        check_numeric(t); check_numeric(r);
        t = mk_sub(t, r);
      } else break;
    }
    return t;
  }
  static Term append_add(const Term& a, const Term& b) {
    Terms kids = a.kids();
    kids.push_back(b);
    return mk_add(std::move(kids));
  }
  Term parse_mul() {
    Term t = parse_unary();
    while (true) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      Term r = parse_unary();
      std::optional<Rat> cl = const_of(t), cr = const_of(r);
      if (cl && cr) t = num_const(*cl * *cr, t.sort().is_real() || r.sort().is_real());
      else if (cl) t = mk_mul(*cl, r);
      else if (cr) t = mk_mul(*cr, t);
      else fail("nonlinear multiplication (one factor must be a constant)");
    }
    return t;
  }
  static std::optional<Rat> const_of(const Term& t) {
    if (t.is_const() && t.sort().is_numeric()) return t.cval().q;
    if (t.op() == Op::Neg && t.kid(0).is_const() && t.kid(0).sort().is_numeric()) return -t.kid(0).cval().q;
    return std::nullopt;
  }
  static Term num_const(Rat v, bool real) { return (real || !v.is_int()) ? mk_real(v) : mk_int(v.num); }
  Term parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      Term t = parse_unary();
      check_numeric(t);
      if (t.is_const()) return num_const(-t.cval().q, t.sort().is_real());
      return mk_neg(t);
    }
    return parse_primary();
  }
  void check_numeric(const Term& t) {
    if (!t.sort().is_numeric()) fail("expected a numeric operand");
  }

  Term parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Term t = parse_expr();
      if (!eat(")")) fail("expected ')'");
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Term parse_number() {
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    i64 whole = std::stoll(std::string(text_.substr(start, pos_ - start)));
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      size_t fs = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string frac(text_.substr(fs, pos_ - fs));
      i64 den = 1;
      for (size_t i = 0; i < frac.size(); ++i) den = checked_i64(i128(den) * 10, "decimal literal");
      return mk_real(Rat(checked_i64(i128(whole) * den + std::stoll(frac), "decimal literal"), den));
    }
    if (pos_ + 1 < text_.size() && text_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      size_t ds = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      i64 den = std::stoll(std::string(text_.substr(ds, pos_ - ds)));
      Rat q(whole, den);
      return q.is_int() ? mk_real(q) : mk_real(q);  // written form implies real sort
    }
    return mk_int(whole);
  }

  Term parse_ident() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "true") return mk_true();
    if (name == "false") return mk_false();
    if (name == "ite") {
      expect_lparen();
      Term a = parse_expr();
      expect_comma();
      Term b = parse_expr();
      expect_comma();
      Term cc = parse_expr();
      expect_rparen();
      if (!a.sort().is_bool()) { pos_ = start; fail("ite condition must be boolean"); }
      return mk_ite(a, b, cc);
    }
    if (name == "abs" || name == "floor") {
      expect_lparen();
      Term a = parse_expr();
      expect_rparen();
      if (!a.sort().is_numeric()) { pos_ = start; fail(name + " needs a numeric operand"); }
      return name == "abs" ? mk_abs(a) : mk_floor(a);
    }
    if (name == "forall" || name == "exists") {
      std::vector<VarRef> binders;
      while (true) {
        skip_ws();
        size_t bs = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
          ++pos_;
        std::string bname(text_.substr(bs, pos_ - bs));
        auto v = scope_.find(bname);
        if (!v) { pos_ = bs; fail("unknown variable '" + bname + "' in binder"); }
        binders.push_back(*v);
        if (!eat(",")) break;
      }
      if (!eat(".")) fail("expected '.' after binders");
      Term body = parse_implies();
      return mk_quant(name == "forall" ? Op::Forall : Op::Exists, std::move(binders), body);
    }
    bool primed = false;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      ++pos_;
      primed = true;
    }
    auto v = scope_.find(name);
    if (!v) { pos_ = start; fail("unknown variable '" + name + "'"); }
    if (primed) {
      if (!scope_.allow_primed) { pos_ = start; fail("primed variable '" + name + "'' not allowed here"); }
      if (v->cls != VarClass::State && v->cls != VarClass::Counter) {
        pos_ = start;
        fail("only state variables can be primed");
      }
      VarRef pv = *v;
      pv.cls = VarClass::PrimedState;
      return mk_var(pv);
    }
    return mk_var(*v);
  }

  void expect_lparen() { if (!eat("(")) fail("expected '('"); }
  void expect_rparen() { if (!eat(")")) fail("expected ')'"); }
  void expect_comma() { if (!eat(",")) fail("expected ','"); }
};

}  // namespace detail

// Parse an expression. Round-trips with to_string on well-sorted terms.
inline Term parse_term(std::string_view text, const VarScope& scope) {
  return detail::ExprParser(text, scope).parse_full();
}

}  // namespace pargus

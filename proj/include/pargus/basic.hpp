#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pargus {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : Error {
  ParseError(size_t offset, const std::string& what)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset(offset) {}
  size_t offset;
};

#define PARGUS_CHECK(cond, msg) \
  do {                          \
    if (!(cond)) throw ::pargus::Error(std::string("internal: ") + (msg)); \
  } while (0)

using i64 = long long;
using i128 = __int128;

inline i64 checked_i64(i128 v, const char* where) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw Error(std::string("integer overflow in ") + where);
  return static_cast<i64>(v);
}

// Exact rational on 64-bit numerator/denominator, 128-bit intermediates.
struct Rat {
  i64 num = 0;
  i64 den = 1;

  Rat() = default;
  Rat(i64 n) : num(n), den(1) {}
  Rat(i64 n, i64 d) : num(n), den(d) { norm(); }

  void norm() {
    if (den == 0) throw Error("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    i64 g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }
  static Rat make(i128 n, i128 d) {
    if (d == 0) throw Error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i128 a = n < 0 ? -n : n;
    i128 g = 1;
    { i128 x = a, y = d; while (y) { i128 t = x % y; x = y; y = t; } g = x ? x : 1; }
    return Rat(checked_i64(n / g, "rat"), checked_i64(d / g, "rat"));
  }

  bool is_int() const { return den == 1; }
  bool is_zero() const { return num == 0; }
  int sign() const { return num > 0 ? 1 : num < 0 ? -1 : 0; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(i128(a.num) * b.num, i128(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw Error("rational division by zero");
    return make(i128(a.num) * b.den, i128(a.den) * b.num);
  }
  Rat operator-() const { return Rat(-num, den); }

  friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return i128(a.num) * b.den < i128(b.num) * a.den; }
  friend bool operator<=(const Rat& a, const Rat& b) { return i128(a.num) * b.den <= i128(b.num) * a.den; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  Rat floor() const {
    if (den == 1) return *this;
    i64 q = num / den;
    if (num < 0 && num % den != 0) --q;
    return Rat(q);
  }
  Rat ceil() const { return -((-*this).floor()); }
  Rat abs() const { return num < 0 ? -*this : *this; }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

enum class SortKind { Bool, Int, Real };

struct Sort {
  SortKind kind = SortKind::Int;
  bool is_bool() const { return kind == SortKind::Bool; }
  bool is_int() const { return kind == SortKind::Int; }
  bool is_real() const { return kind == SortKind::Real; }
  bool is_numeric() const { return kind != SortKind::Bool; }
  friend bool operator==(Sort a, Sort b) { return a.kind == b.kind; }
  friend bool operator!=(Sort a, Sort b) { return a.kind != b.kind; }
  std::string str() const {
    switch (kind) {
      case SortKind::Bool: return "bool";
      case SortKind::Int: return "int";
      case SortKind::Real: return "real";
    }
    return "?";
  }
};

inline Sort bool_sort() { return {SortKind::Bool}; }
inline Sort int_sort() { return {SortKind::Int}; }
inline Sort real_sort() { return {SortKind::Real}; }

// Numeric join: int op real -> real.
inline Sort join_numeric(Sort a, Sort b) {
  PARGUS_CHECK(a.is_numeric() && b.is_numeric(), "numeric join on bool sort");
  return (a.is_real() || b.is_real()) ? real_sort() : int_sort();
}

enum class VarClass { Parameter, State, Input, Hole, Counter, PrimedState };

inline const char* var_class_name(VarClass c) {
  switch (c) {
    case VarClass::Parameter: return "parameter";
    case VarClass::State: return "state";
    case VarClass::Input: return "input";
    case VarClass::Hole: return "hole";
    case VarClass::Counter: return "counter";
    case VarClass::PrimedState: return "primed-state";
  }
  return "?";
}

struct VarRef {
  std::string name;
  VarClass cls = VarClass::State;
  Sort sort;

  friend bool operator==(const VarRef& a, const VarRef& b) {
    return a.cls == b.cls && a.name == b.name && a.sort == b.sort;
  }
  friend bool operator<(const VarRef& a, const VarRef& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    if (a.name != b.name) return a.name < b.name;
    return a.sort.kind < b.sort.kind;
  }
  std::string display() const { return cls == VarClass::PrimedState ? name + "'" : name; }
};

// Valuation key: class + name (sort is determined by the declaration).
struct VarKey {
  VarClass cls;
  std::string name;
  VarKey(VarClass c, std::string n) : cls(c), name(std::move(n)) {}
  VarKey(const VarRef& v) : cls(v.cls), name(v.name) {}
  friend bool operator<(const VarKey& a, const VarKey& b) {
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.name < b.name;
  }
  friend bool operator==(const VarKey& a, const VarKey& b) { return a.cls == b.cls && a.name == b.name; }
};

struct Value {
  SortKind kind = SortKind::Int;
  bool b = false;
  Rat q;  // used for Int (den==1) and Real

  Value() = default;
  static Value of_bool(bool v) { Value x; x.kind = SortKind::Bool; x.b = v; return x; }
  static Value of_int(i64 v) { Value x; x.kind = SortKind::Int; x.q = Rat(v); return x; }
  static Value of_real(Rat v) { Value x; x.kind = SortKind::Real; x.q = v; return x; }

  bool is_bool() const { return kind == SortKind::Bool; }
  bool is_numeric() const { return kind != SortKind::Bool; }
  bool as_bool() const { PARGUS_CHECK(is_bool(), "value is not bool"); return b; }
  i64 as_int() const {
    PARGUS_CHECK(is_numeric() && q.is_int(), "value is not an integer");
    return q.num;
  }
  const Rat& as_rat() const { PARGUS_CHECK(is_numeric(), "value is not numeric"); return q; }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.is_bool() != b.is_bool()) return false;
    return a.is_bool() ? a.b == b.b : a.q == b.q;
  }
  std::string str() const { return is_bool() ? (b ? "true" : "false") : q.str(); }
};

}  // namespace pargus

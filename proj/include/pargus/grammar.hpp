#pragma once

#include <unordered_map>
#include <unordered_set>

#include "pargus/term.hpp"

// Grammars for syntax-guided synthesis: hole expressions, interpolants and
// ranking functions, plus a size-ordered enumerator with observational
// equivalence pruning. Candidate size is the number of productions used.

namespace pargus {

struct Grammar {
  struct Prod {
    Op op = Op::Const;        // node constructor for composite productions
    std::vector<int> args;    // child nonterminal indices; empty => leaf
    Term leaf;                // leaf payload (variable or constant)
  };
  struct NonTerminal {
    std::string name;
    std::vector<Prod> prods;
  };

  std::vector<NonTerminal> nts;
  int root = 0;

  int add_nt(const std::string& name) {
    nts.push_back(NonTerminal{name, {}});
    return int(nts.size()) - 1;
  }
  void leaf(int nt, const Term& t) { nts[nt].prods.push_back(Prod{Op::Const, {}, t}); }
  void rule(int nt, Op op, std::vector<int> args) { nts[nt].prods.push_back(Prod{op, std::move(args), Term()}); }
  int find(const std::string& name) const {
    for (size_t i = 0; i < nts.size(); ++i)
      if (nts[i].name == name) return int(i);
    throw Error("no nonterminal named " + name);
  }
};

// --- the built-in grammars -------------------------------------------------

// Hole grammar: H ::= I | B; B ::= B&&B | !B | I<=I | bool vars;
// I ::= I+I | I-I | ite(B,I,I) | V | 0 | 1; V ::= params | states | inputs.
// Constants harvested from the instance substitutions are added as extra
// leaves (rationals are required for real-sorted problems; integers make
// the search match the concrete instances faster).
inline Grammar hole_grammar(const std::vector<VarRef>& params, const std::vector<VarRef>& states,
                            const std::vector<VarRef>& inputs, const std::vector<i64>& int_constants = {},
                            const std::vector<Rat>& real_constants = {}) {
  Grammar g;
  int B = g.add_nt("B");
  int I = g.add_nt("I");
  g.rule(B, Op::And, {B, B});
  g.rule(B, Op::Not, {B});
  g.rule(B, Op::Le, {I, I});
  g.rule(I, Op::Add, {I, I});
  g.rule(I, Op::Sub, {I, I});
  g.rule(I, Op::Ite, {B, I, I});
  g.leaf(I, mk_int(0));
  g.leaf(I, mk_int(1));
  for (const auto& vs : {params, states, inputs})
    for (const auto& v : vs) {
      if (v.sort.is_bool()) g.leaf(B, mk_var(v));
      else g.leaf(I, mk_var(v));
    }
  for (i64 c : int_constants)
    if (c != 0 && c != 1) g.leaf(I, mk_int(c));
  for (const auto& q : real_constants) g.leaf(I, mk_real(q));
  g.root = I;
  return g;
}

inline int hole_root_for(const Grammar& g, Sort sort) { return g.find(sort.is_bool() ? "B" : "I"); }

// Interpolant grammar: X ::= A | A||X; A ::= C | C&&A; C ::= I=I | I<=I;
// I ::= params | constants used in parameter valuations.
inline Grammar interpolant_grammar(const std::vector<VarRef>& params, const std::vector<i64>& constants) {
  Grammar g;
  int X = g.add_nt("X");
  int A = g.add_nt("A");
  int C = g.add_nt("C");
  int I = g.add_nt("I");
  g.rule(X, Op::Or, {A, X});
  g.rule(A, Op::And, {C, A});
  g.rule(C, Op::Eq, {I, I});
  g.rule(C, Op::Le, {I, I});
  for (const auto& p : params) g.leaf(I, mk_var(p));
  for (i64 c : constants) g.leaf(I, mk_int(c));
  // X ::= A and A ::= C are realized by unit productions
  g.rule(X, Op::Const, {A});
  g.rule(A, Op::Const, {C});
  g.root = X;
  return g;
}

// Ranking grammar (root R): R ::= S | S+R; S ::= V | abs(T-T);
// T ::= X | X+T; X ::= V | 1; V ::= params | int states | floor(real states).
inline Grammar ranking_r_grammar(const std::vector<VarRef>& params, const std::vector<VarRef>& states) {
  Grammar g;
  int R = g.add_nt("R");
  int S = g.add_nt("S");
  int T = g.add_nt("T");
  int X = g.add_nt("X");
  int V = g.add_nt("V");
  g.rule(R, Op::Const, {S});
  g.rule(R, Op::Add, {S, R});
  g.rule(S, Op::Const, {V});
  g.rule(S, Op::Abs, {T, T});  // rendered as abs(T - T)
  g.rule(T, Op::Const, {X});
  g.rule(T, Op::Add, {X, T});
  g.rule(X, Op::Const, {V});
  g.leaf(X, mk_int(1));
  for (const auto& p : params) g.leaf(V, mk_var(p));
  for (const auto& s : states) {
    if (s.sort.is_int()) g.leaf(V, mk_var(s));
    else if (s.sort.is_real()) g.nts[V].prods.push_back(Grammar::Prod{Op::Floor, {}, mk_floor(mk_var(s))});
  }
  g.root = R;
  return g;
}

// Assumption-selector grammar (root L): L ::= J | ite(B,L,L);
// B ::= I<=I | bool states; I ::= I+I | I-I | V | 0 | 1; J ::= 1..m.
inline Grammar ranking_l_grammar(int m, const std::vector<VarRef>& params,
                                 const std::vector<VarRef>& states) {
  Grammar g;
  int L = g.add_nt("L");
  int B = g.add_nt("B");
  int I = g.add_nt("I");
  int J = g.add_nt("J");
  g.rule(L, Op::Const, {J});
  g.rule(L, Op::Ite, {B, L, L});
  g.rule(B, Op::Le, {I, I});
  g.rule(I, Op::Add, {I, I});
  g.rule(I, Op::Sub, {I, I});
  g.leaf(I, mk_int(0));
  g.leaf(I, mk_int(1));
  for (int j = 1; j <= m; ++j) g.leaf(J, mk_int(j));
  for (const auto& p : params) g.leaf(I, mk_var(p));
  for (const auto& s : states) {
    if (s.sort.is_bool()) g.leaf(B, mk_var(s));
    else if (s.sort.is_int()) g.leaf(I, mk_var(s));
  }
  g.root = L;
  return g;
}

// --- enumeration -----------------------------------------------------------

// Size-ordered candidate enumeration. Candidates with identical value
// vectors on the active example set are collapsed (first one wins, so the
// order stays deterministic).
class Enumerator {
 public:
  Enumerator(const Grammar& g, std::vector<Valuation> examples, size_t per_level_cap = 100'000)
      : g_(g), examples_(std::move(examples)), cap_(per_level_cap) {
    levels_.assign(g_.nts.size(), {});
  }

  // All candidates of the root nonterminal with exactly `size` productions.
  const Terms& at_size(int nt, int size) {
    build_to(size);
    return levels_[nt][size - 1];
  }

  bool capped() const { return capped_; }

 private:
  const Grammar& g_;
  std::vector<Valuation> examples_;
  size_t cap_;
  bool capped_ = false;
  // levels_[nt][s-1] = candidates of size s
  std::vector<std::vector<Terms>> levels_;
  std::vector<std::unordered_set<std::string>> seen_ = std::vector<std::unordered_set<std::string>>(64);

  void build_to(int size) {
    int have = levels_.empty() ? 0 : int(levels_[0].size());
    for (int s = have + 1; s <= size; ++s) {
      for (size_t n = 0; n < g_.nts.size(); ++n) levels_[n].emplace_back();
      for (size_t n = 0; n < g_.nts.size(); ++n) build_level(int(n), s);
    }
  }

  void build_level(int nt, int size) {
    Terms& out = levels_[nt][size - 1];
    for (const auto& prod : g_.nts[nt].prods) {
      if (prod.args.empty()) {
        if (size == 1) push(nt, out, prod.leaf);
        continue;
      }
      int remaining = size - 1;
      if (int(prod.args.size()) > remaining) continue;
      std::vector<int> sizes(prod.args.size());
      combine(nt, out, prod, sizes, 0, remaining);
      if (out.size() > cap_) {
        capped_ = true;
        return;
      }
    }
  }

  void combine(int nt, Terms& out, const Grammar::Prod& prod, std::vector<int>& sizes, size_t i,
               int remaining) {
    if (out.size() > cap_) {
      capped_ = true;
      return;
    }
    if (i + 1 == sizes.size()) {
      sizes[i] = remaining;
      emit(nt, out, prod, sizes);
      return;
    }
    int reserve = int(sizes.size() - i - 1);  // one production minimum per arg
    for (int s = 1; s + reserve <= remaining; ++s) {
      sizes[i] = s;
      combine(nt, out, prod, sizes, i + 1, remaining - s);
    }
  }

  void emit(int nt, Terms& out, const Grammar::Prod& prod, const std::vector<int>& sizes) {
    std::vector<const Terms*> pools;
    for (size_t i = 0; i < prod.args.size(); ++i) {
      const Terms& p = levels_[prod.args[i]][sizes[i] - 1];
      if (p.empty()) return;
      pools.push_back(&p);
    }
    std::vector<size_t> idx(pools.size(), 0);
    while (true) {
      Terms kids;
      for (size_t i = 0; i < pools.size(); ++i) kids.push_back((*pools[i])[idx[i]]);
      if (auto t = construct(prod, kids); !t.empty()) push(nt, out, t);
      if (out.size() > cap_) {
        capped_ = true;
        return;
      }
      size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < pools[i]->size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }

  static Term construct(const Grammar::Prod& prod, const Terms& kids) {
    try {
      switch (prod.op) {
        case Op::Const: return kids[0];  // unit production
        case Op::And: return mk_and(kids[0], kids[1]);
        case Op::Or: return mk_or(kids[0], kids[1]);
        case Op::Not: return mk_not(kids[0]);
        case Op::Le: return mk_le(kids[0], kids[1]);
        case Op::Eq: return mk_eq(kids[0], kids[1]);
        case Op::Add: return mk_add(kids[0], kids[1]);
        case Op::Sub: return mk_sub(kids[0], kids[1]);
        case Op::Ite: return mk_ite(kids[0], kids[1], kids[2]);
        case Op::Abs: return mk_abs(mk_sub(kids[0], kids[1]));
        default: throw Error("bad grammar production");
      }
    } catch (const Error&) {
      return Term();  // ill-sorted combination; skip
    }
  }

  void push(int nt, Terms& out, const Term& t) {
    std::string key = obs_key(t);
    auto& seen = seen_[size_t(nt) % seen_.size()];
    std::string full = std::to_string(nt) + '#' + key;
    if (!seen.insert(full).second) return;
    out.push_back(t);
  }

  std::string obs_key(const Term& t) {
    if (examples_.empty()) return to_string(t);
    std::string key;
    for (const auto& ex : examples_) {
      try {
        key += evaluate(t, ex).str();
      } catch (const Error&) {
        key += "?" + to_string(t);  // unassigned variable: fall back to syntax
      }
      key += '|';
    }
    return key;
  }
};

}  // namespace pargus

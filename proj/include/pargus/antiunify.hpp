#pragma once

#include "pargus/term.hpp"

// Anti-unification (least general generalization) of a finite set of terms.
// Implemented as n-ary simultaneous anti-unification: positions where the
// inputs disagree become holes, and positions with identical disagreement
// tuples share one hole (Rule 2 saturation). The result is the unique LGG
// up to hole renaming, independent of input order.

namespace pargus {

struct AntiUnifyResult {
  Term generalizer;                        // may contain holes
  std::vector<Substitution> substitutions; // one per input, positionally aligned
};

namespace detail {

struct TupleLess {
  bool operator()(const Terms& a, const Terms& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i) {
      int c = Term::cmp(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }
};

class AntiUnifier {
 public:
  explicit AntiUnifier(size_t n) : n_(n) {}

  Term run(const Terms& tuple) {
    if (all_equal(tuple)) return tuple[0];
    if (same_head(tuple)) {
      Terms kids;
      for (size_t i = 0; i < tuple[0].arity(); ++i) {
        Terms sub;
        sub.reserve(n_);
        for (const auto& t : tuple) sub.push_back(t.kid(i));
        kids.push_back(run(sub));
      }
      return rebuild(tuple[0], std::move(kids));
    }
    return hole_for(tuple);
  }

  const std::map<Terms, VarRef, TupleLess>& holes() const { return holes_; }

 private:
  size_t n_;
  std::map<Terms, VarRef, TupleLess> holes_;
  int counter_ = 0;

  static bool all_equal(const Terms& tuple) {
    for (size_t i = 1; i < tuple.size(); ++i)
      if (tuple[i] != tuple[0]) return false;
    return true;
  }

  // Heads match when the node kind, arity and payload coincide. Constants
  // and multiplication factors are part of the head, so differing constants
  // become whole holes (the generalizer never abstracts a scale factor).
  static bool same_head(const Terms& tuple) {
    const Term& h = tuple[0];
    if (h.arity() == 0) return false;  // distinct leaves never share a head
    for (size_t i = 1; i < tuple.size(); ++i) {
      const Term& t = tuple[i];
      if (t.op() != h.op() || t.arity() != h.arity()) return false;
      if (h.op() == Op::MulConst && t.factor() != h.factor()) return false;
      if ((h.op() == Op::Forall || h.op() == Op::Exists) && t.binders() != h.binders()) return false;
    }
    return true;
  }

  static Sort joined_sort(const Terms& tuple) {
    bool all_bool = true, all_num = true;
    bool any_real = false;
    for (const auto& t : tuple) {
      all_bool = all_bool && t.sort().is_bool();
      all_num = all_num && t.sort().is_numeric();
      any_real = any_real || t.sort().is_real();
    }
    if (all_bool) return bool_sort();
    if (all_num) return any_real ? real_sort() : int_sort();
    return tuple[0].sort();
  }

  Term hole_for(const Terms& tuple) {
    auto it = holes_.find(tuple);
    if (it == holes_.end()) {
      VarRef h{"!h" + std::to_string(counter_++), VarClass::Hole, joined_sort(tuple)};
      it = holes_.emplace(tuple, h).first;
    }
    return mk_var(it->second);
  }
};

inline void hole_order(const Term& g, std::vector<std::string>& order, std::set<std::string>& seen) {
  if (g.op() == Op::Var && g.var().cls == VarClass::Hole) {
    if (seen.insert(g.var().name).second) order.push_back(g.var().name);
    return;
  }
  for (const auto& k : g.kids()) hole_order(k, order, seen);
}

}  // namespace detail

inline AntiUnifyResult anti_unify(const Terms& es) {
  PARGUS_CHECK(!es.empty(), "anti_unify needs at least one term");
  for (const auto& e : es) PARGUS_CHECK(!has_holes(e), "anti_unify inputs must be hole-free");
  detail::AntiUnifier au(es.size());
  Term g = au.run(es);

  // canonical hole names h1, h2, ... in first-occurrence order
  std::vector<std::string> order;
  std::set<std::string> seen;
  detail::hole_order(g, order, seen);
  std::map<VarKey, Term> rename;
  std::map<std::string, std::string> new_name;
  for (size_t i = 0; i < order.size(); ++i) new_name[order[i]] = "h" + std::to_string(i + 1);

  AntiUnifyResult out;
  out.substitutions.assign(es.size(), Substitution{});
  for (const auto& [tuple, h] : au.holes()) {
    auto it = new_name.find(h.name);
    PARGUS_CHECK(it != new_name.end(), "hole dropped from generalizer");
    VarRef renamed = h;
    renamed.name = it->second;
    rename.emplace(VarKey(h), mk_var(renamed));
    for (size_t k = 0; k < es.size(); ++k) out.substitutions[k].map.emplace(renamed.name, tuple[k]);
  }
  out.generalizer = substitute_vars(g, rename);
  return out;
}

}  // namespace pargus

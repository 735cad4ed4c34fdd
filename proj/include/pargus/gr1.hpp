#pragma once

#include "pargus/smt.hpp"
#include "pargus/spec.hpp"

// Symbolic GR(1) game solving over theory formulas: controllable
// predecessors, the triply nested fixpoint, and strategy extraction.
//
// Winning regions are computed with the per-valuation reading of the
// fixpoint: one input quantifier ranges over the whole three-way disjunct
//   (Js_j and move(Inv)) or move(Y) or (not Je_i and move(X)),
// which coincides with the propositional algorithm where formulas range over
// full (input, state) valuations and supports assumptions over inputs.

namespace pargus {

struct StrategyIterates {
  Term inv;                                 // final outer fixpoint
  std::vector<Terms> mY;                    // [j][r]
  std::vector<std::vector<Terms>> mX;       // [j][r][i]
  std::vector<int> maxr;                    // per-j rank bound (mY[j].size()-1)
};

enum class FixpointStatus { Realizable, Unrealizable, Unknown };

struct FixpointResult {
  FixpointStatus status = FixpointStatus::Unknown;
  StrategyIterates iterates;
  std::string reason;
};

// Extracted concrete system: one substrategy per guarantee, each with one
// action per specification action (positional identity preserved). Guards
// are stored without the implicit "c = j" conjunct; the counter advances to
// j (+) 1 exactly on steps taken from a state satisfying Js_j, and such
// steps use the next substrategy's guards (the program-loop reading).
struct ConcreteSystem {
  std::vector<VarRef> states;
  std::vector<VarRef> inputs;
  VarRef counter{"c", VarClass::Counter, int_sort()};
  Term init = mk_true();  // specification init; the full system init is init && c = 1
  Term env_trans = mk_true();
  Terms justice_assumptions;
  Terms justice_guarantees;
  std::vector<std::vector<Action>> substrategies;  // [j][action]
  Term inv = mk_true();
  ParamValuation provenance;

  size_t n() const { return substrategies.size(); }
};

struct Gr1Config {
  int outer_cap = 64;
  int middle_cap = 256;
  int inner_cap = 256;
  size_t simplify_threshold = 100;  // node count that triggers guard-style pruning
};

class Gr1Solver {
 public:
  Gr1Solver(const ConcreteSpec& spec, SolverSession& session, Gr1Config cfg = {})
      : spec_(spec), session_(session), cfg_(cfg) {}

  // S[x <- u(x)] for the action's update
  Term subst_post(const Term& s, const Action& a) const {
    std::map<VarKey, Term> sub;
    for (size_t i = 0; i < spec_.states.size(); ++i)
      sub.emplace(VarKey(spec_.states[i]), a.updates[i]);
    return substitute_vars(s, sub);
  }

  // exists x'. sigma and target', discharged by the one-point rule
  Term move_into(const Term& target) const {
    Terms parts;
    for (const auto& a : spec_.actions) parts.push_back(mk_and(a.guard, subst_post(target, a)));
    return disj(std::move(parts));
  }

  // wp(S, a) = env_trans -> (g and S[x <- u(x)])
  Term wp(const Term& s, const Action& a) const {
    return mk_implies(spec_.env_trans, mk_and(a.guard, subst_post(s, a)));
  }

  // universal input closure of a (state, input) predicate
  Term forall_inputs(const Term& body) const {
    Term impl = mk_implies(spec_.env_trans, body);
    if (spec_.inputs.empty()) return tidy(impl);
    return tidy(session_.qe(mk_forall(spec_.inputs, impl)));
  }

  // coax(target): states from which, against every legal input, some action
  // moves into target
  Term coax(const Term& target) const { return forall_inputs(move_into(target)); }

  FixpointResult solve_fixpoint() {
    FixpointResult out;
    size_t n = spec_.n_guarantees(), m = spec_.m_assumptions();
    Term inv = mk_true();
    StrategyIterates it;
    for (int outer = 0; outer < cfg_.outer_cap; ++outer) {
      Term inv_at_pass_start = inv;
      it.mY.assign(n, {});
      it.mX.assign(n, {});
      it.maxr.assign(n, 0);
      for (size_t j = 0; j < n; ++j) {
        const Term& js = spec_.justice_guarantees[j];
        Term y = mk_false();
        while (true) {
          if (int(it.mY[j].size()) >= cfg_.middle_cap) return unknown("middle fixpoint cap exceeded");
          Term goal_branch = mk_and(js, move_into(inv));
          Term escape = move_into(y);
          Term new_y;
          Terms xs_row;
          if (m == 0) {
            new_y = forall_inputs(mk_or(goal_branch, escape));
          } else {
            Terms units;
            for (size_t i = 0; i < m; ++i) {
              const Term& je = spec_.justice_assumptions[i];
              Term x = inv;
              int xiter = 0;
              while (true) {
                if (xiter++ >= cfg_.inner_cap) return unknown("inner fixpoint cap exceeded");
                Term stay = mk_and(mk_not(je), move_into(x));
                Term nx = forall_inputs(disj({goal_branch, escape, stay}));
                if (same(nx, x)) break;
                x = nx;
              }
              units.push_back(x);
              xs_row.push_back(x);
            }
            new_y = tidy(disj(std::move(units)));
          }
          it.mY[j].push_back(new_y);
          if (m > 0) it.mX[j].push_back(std::move(xs_row));
          if (same(new_y, y)) break;
          y = new_y;
        }
        it.maxr[j] = int(it.mY[j].size()) - 1;
        inv = y;
      }
      if (same(inv, inv_at_pass_start)) {
        it.inv = inv;
        Term init_outside = mk_and(spec_.init, mk_not(inv));
        SatResult sr = session_.check_sat(init_outside);
        if (sr.kind == SatResult::Unknown)
          return unknown("realizability check unknown: " + sr.reason);
        out.status = sr.sat() ? FixpointStatus::Unrealizable : FixpointStatus::Realizable;
        out.iterates = std::move(it);
        return out;
      }
    }
    return unknown("outer fixpoint cap exceeded");
  }

  // Guard construction per substrategy: progress disjuncts (gamma1, gamma2)
  // take precedence over stall disjuncts (gamma3), actions are chained into
  // mutually exclusive guards in the given priority order, conjoined with
  // the specification guard and simplified under inv and env_trans. Stored
  // actions keep specification order regardless of priority.
  std::vector<Action> extract_substrategy(const StrategyIterates& it, size_t j,
                                          const std::vector<size_t>& priority) {
    size_t m = spec_.m_assumptions();
    Term all_goals = conj(Terms(spec_.justice_guarantees));
    size_t na = spec_.actions.size();
    PARGUS_CHECK(priority.size() == na, "priority permutation size");

    Terms progress(na), stall(na);
    for (size_t ai = 0; ai < na; ++ai) {
      const Action& a = spec_.actions[ai];
      Terms parts;
      parts.push_back(mk_and(all_goals, wp(it.inv, a)));  // gamma_1
      for (int r = 1; r <= it.maxr[j]; ++r) {             // gamma_2
        Term at_rank = mk_and(it.mY[j][r], mk_not(it.mY[j][r - 1]));
        parts.push_back(mk_and(at_rank, wp(it.mY[j][r - 1], a)));
      }
      progress[ai] = disj(std::move(parts));
      Terms stalls;
      if (m > 0) {                                        // gamma_3
        for (int r = 0; r <= it.maxr[j]; ++r) {
          for (size_t i = 0; i < m; ++i) {
            Terms sel{it.mX[j][r][i]};
            if (r > 0) sel.push_back(mk_not(it.mY[j][r - 1]));
            for (size_t i2 = 0; i2 < i; ++i2) sel.push_back(mk_not(it.mX[j][r][i2]));
            sel.push_back(mk_not(spec_.justice_assumptions[i]));
            sel.push_back(wp(it.mX[j][r][i], a));
            stalls.push_back(conj(std::move(sel)));
          }
        }
      }
      stall[ai] = disj(std::move(stalls));
    }
    Term no_progress = mk_not(disj(Terms(progress)));

    std::vector<Action> sub(na);
    Term base_ctx = mk_and(it.inv, spec_.env_trans);
    Terms earlier;
    for (size_t pos = 0; pos < na; ++pos) {
      size_t ai = priority[pos];
      const Action& a = spec_.actions[ai];
      Term raw = mk_or(progress[ai], mk_and(stall[ai], no_progress));
      raw = mk_and(raw, a.guard);
      for (const auto& e : earlier) raw = mk_and(raw, mk_not(e));
      Term guard = session_.simplify_with_context(normalize(raw), base_ctx);
      earlier.push_back(guard);
      sub[ai] = Action{guard, a.updates};
    }
    return sub;
  }

  static std::vector<size_t> default_priority(size_t n_actions) {
    std::vector<size_t> p(n_actions);
    for (size_t i = 0; i < n_actions; ++i) p[i] = i;
    return p;
  }

  ConcreteSystem extract_strategy(const StrategyIterates& it,
                                  const std::vector<std::vector<size_t>>& priorities = {}) {
    size_t n = spec_.n_guarantees();
    ConcreteSystem sys;
    sys.states = spec_.states;
    sys.inputs = spec_.inputs;
    sys.init = spec_.init;
    sys.env_trans = spec_.env_trans;
    sys.justice_assumptions = spec_.justice_assumptions;
    sys.justice_guarantees = spec_.justice_guarantees;
    sys.inv = it.inv;
    sys.provenance = spec_.origin;
    for (size_t j = 0; j < n; ++j) {
      auto prio = j < priorities.size() && !priorities[j].empty() ? priorities[j]
                                                                  : default_priority(spec_.actions.size());
      sys.substrategies.push_back(extract_substrategy(it, j, prio));
    }
    return sys;
  }

 private:
  const ConcreteSpec& spec_;
  SolverSession& session_;
  Gr1Config cfg_;

  FixpointResult unknown(const std::string& why) const {
    FixpointResult r;
    r.status = FixpointStatus::Unknown;
    r.reason = why;
    return r;
  }

  bool same(const Term& a, const Term& b) const {
    if (a == b) return true;
    return session_.equivalent(a, b);
  }

  Term tidy(const Term& t) const {
    Term n = normalize(t);
    if (n.node_count() <= cfg_.simplify_threshold) return n;
    return session_.simplify_with_context(n, mk_true());
  }
};

// Convenience wrapper matching the specification surface.
inline FixpointResult solve_fixpoint(const ConcreteSpec& spec, SolverSession& session,
                                     Gr1Config cfg = {}) {
  return Gr1Solver(spec, session, cfg).solve_fixpoint();
}

}  // namespace pargus

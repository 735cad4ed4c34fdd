#pragma once

// Explicit-state GR(1) oracle over finite boxes: brute-force attractor
// computation used as an independent reference for the symbolic solver.

#include "pargus/spec.hpp"

namespace testutil {

using namespace pargus;

class ExplicitGr1 {
 public:
  ExplicitGr1(const ConcreteSpec& spec, i64 state_lo, i64 state_hi, i64 input_lo, i64 input_hi)
      : spec_(spec) {
    states_ = enumerate(spec.states, state_lo, state_hi);
    inputs_ = enumerate(spec.inputs, input_lo, input_hi);
    index_states();
    precompute();
  }

  const std::vector<Valuation>& states() const { return states_; }

  // winning region by the triply nested fixpoint (per-input reading)
  std::vector<bool> winning_region() const {
    size_t n = spec_.justice_guarantees.size(), m = spec_.justice_assumptions.size();
    std::vector<bool> inv(states_.size(), true);
    while (true) {
      std::vector<bool> before = inv;
      for (size_t j = 0; j < n; ++j) {
        std::vector<bool> y(states_.size(), false);
        while (true) {
          std::vector<bool> ny(states_.size(), false);
          if (m == 0) {
            for (size_t s = 0; s < states_.size(); ++s) ny[s] = step(s, j, inv, y, nullptr, 0);
          } else {
            for (size_t i = 0; i < m; ++i) {
              std::vector<bool> x = inv;
              while (true) {
                std::vector<bool> nx(states_.size(), false);
                for (size_t s = 0; s < states_.size(); ++s) nx[s] = step(s, j, inv, y, &x, i);
                if (nx == x) break;
                x = nx;
              }
              for (size_t s = 0; s < states_.size(); ++s) ny[s] = ny[s] || x[s];
            }
          }
          if (ny == y) break;
          y = ny;
        }
        inv = y;
      }
      if (inv == before) return inv;
    }
  }

  // controllable predecessors of an explicit target set
  std::vector<bool> coax(const std::vector<bool>& target) const {
    std::vector<bool> out(states_.size(), false);
    for (size_t s = 0; s < states_.size(); ++s) {
      bool ok = true;
      for (size_t in = 0; in < inputs_.size() && ok; ++in) {
        if (!legal_[s][in]) continue;
        ok = movable(s, in, target);
      }
      out[s] = ok;
    }
    return out;
  }

  std::vector<bool> satisfying(const Term& pred) const {
    std::vector<bool> out(states_.size(), false);
    for (size_t s = 0; s < states_.size(); ++s) out[s] = evaluate(pred, states_[s]).as_bool();
    return out;
  }

 private:
  const ConcreteSpec& spec_;
  std::vector<Valuation> states_, inputs_;
  std::map<std::string, size_t> state_index_;
  // per state, per input: legality of the input and per-action post index
  std::vector<std::vector<bool>> legal_;
  std::vector<std::vector<std::vector<int>>> post_;  // [s][in][action] -> state index or -1
  std::vector<std::vector<std::vector<bool>>> je_;   // [i][s][in]
  std::vector<std::vector<bool>> js_;                // [j][s]

  static std::vector<Valuation> enumerate(const std::vector<VarRef>& vars, i64 lo, i64 hi) {
    std::vector<Valuation> out{{}};
    for (const auto& v : vars) {
      std::vector<Valuation> next;
      for (const auto& base : out) {
        if (v.sort.is_bool()) {
          for (bool b : {false, true}) {
            Valuation n = base;
            n[VarKey(v)] = Value::of_bool(b);
            next.push_back(std::move(n));
          }
        } else {
          PARGUS_CHECK(v.sort.is_int(), "explicit oracle supports int/bool variables");
          for (i64 x = lo; x <= hi; ++x) {
            Valuation n = base;
            n[VarKey(v)] = Value::of_int(x);
            next.push_back(std::move(n));
          }
        }
      }
      out = std::move(next);
    }
    return out;
  }

  static std::string key_of(const Valuation& v) {
    std::string k;
    for (const auto& [var, val] : v) k += val.str() + "|";
    return k;
  }

  void index_states() {
    for (size_t s = 0; s < states_.size(); ++s) state_index_[key_of(states_[s])] = s;
  }

  void precompute() {
    size_t m = spec_.justice_assumptions.size(), n = spec_.justice_guarantees.size();
    legal_.assign(states_.size(), std::vector<bool>(inputs_.size(), false));
    post_.assign(states_.size(), {});
    je_.assign(m, std::vector<std::vector<bool>>(states_.size(), std::vector<bool>(inputs_.size(), false)));
    js_.assign(n, std::vector<bool>(states_.size(), false));
    for (size_t s = 0; s < states_.size(); ++s) {
      post_[s].assign(inputs_.size(), std::vector<int>(spec_.actions.size(), -1));
      for (size_t in = 0; in < inputs_.size(); ++in) {
        Valuation full = states_[s];
        for (const auto& [k, v] : inputs_[in]) full[k] = v;
        legal_[s][in] = evaluate(spec_.env_trans, full).as_bool();
        for (size_t i = 0; i < m; ++i)
          je_[i][s][in] = evaluate(spec_.justice_assumptions[i], full).as_bool();
        for (size_t a = 0; a < spec_.actions.size(); ++a) {
          if (!evaluate(spec_.actions[a].guard, full).as_bool()) continue;
          Valuation nxt;
          for (size_t xi = 0; xi < spec_.states.size(); ++xi)
            nxt[VarKey(spec_.states[xi])] = evaluate(spec_.actions[a].updates[xi], full);
          auto it = state_index_.find(key_of(nxt));
          post_[s][in][a] = it == state_index_.end() ? -1 : int(it->second);
        }
      }
      for (size_t j = 0; j < n; ++j) js_[j][s] = evaluate(spec_.justice_guarantees[j], states_[s]).as_bool();
    }
  }

  bool movable(size_t s, size_t in, const std::vector<bool>& target) const {
    for (size_t a = 0; a < spec_.actions.size(); ++a) {
      int t = post_[s][in][a];
      if (t >= 0 && target[size_t(t)]) return true;
    }
    return false;
  }

  bool step(size_t s, size_t j, const std::vector<bool>& inv, const std::vector<bool>& y,
            const std::vector<bool>* x, size_t i) const {
    for (size_t in = 0; in < inputs_.size(); ++in) {
      if (!legal_[s][in]) continue;
      bool ok = (js_[j][s] && movable(s, in, inv)) || movable(s, in, y);
      if (!ok && x) ok = !je_[i][s][in] && movable(s, in, *x);
      if (!ok) return false;
    }
    return true;
  }
};

}  // namespace testutil

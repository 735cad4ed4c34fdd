#pragma once

#include "pargus/normalize.hpp"
#include "pargus/smt.hpp"
#include "pargus/term_parser.hpp"

// Parameterized GR(1) specifications: the file format, the data model,
// instantiation to concrete specifications and well-formedness checks.

namespace pargus {

// An action (g, u): guard over params/states/inputs, one update expression
// per state variable, aligned positionally with the owning spec's states.
struct Action {
  Term guard;
  Terms updates;
};

struct ParamSpec {
  std::string name;
  std::vector<VarRef> params;
  std::vector<VarRef> states;
  std::vector<VarRef> inputs;
  Term init = mk_true();       // over params + states (parameter constraints included)
  Term env_trans = mk_true();  // over params + states + inputs
  std::vector<Action> actions;
  Terms justice_assumptions;   // may mention inputs
  Terms justice_guarantees;    // over params + states

  size_t n_guarantees() const { return justice_guarantees.size(); }
  size_t m_assumptions() const { return justice_assumptions.size(); }

  VarScope scope(bool with_inputs = true) const {
    VarScope s;
    for (const auto& v : params) s.add(v);
    for (const auto& v : states) s.add(v);
    if (with_inputs)
      for (const auto& v : inputs) s.add(v);
    return s;
  }
  std::optional<VarRef> state_named(const std::string& n) const {
    for (const auto& v : states)
      if (v.name == n) return v;
    return std::nullopt;
  }
};

struct ConcreteSpec {
  std::string name;
  std::vector<VarRef> states;
  std::vector<VarRef> inputs;
  Term init = mk_true();
  Term env_trans = mk_true();
  std::vector<Action> actions;
  Terms justice_assumptions;
  Terms justice_guarantees;
  ParamValuation origin;

  size_t n_guarantees() const { return justice_guarantees.size(); }
  size_t m_assumptions() const { return justice_assumptions.size(); }
};

// Parameter-only conjuncts of init (the parameter constraints, e.g. bounds
// relating the parameters; everything else mentions state).
inline Terms param_init_conjuncts(const ParamSpec& spec) {
  Terms out;
  Terms todo = spec.init.op() == Op::And ? spec.init.kids() : Terms{spec.init};
  for (const auto& c : todo) {
    bool param_only = true;
    for (const auto& v : vars(c))
      if (v.cls != VarClass::Parameter) { param_only = false; break; }
    if (param_only) out.push_back(c);
  }
  return out;
}

inline bool satisfies_param_init(const ParamSpec& spec, const ParamValuation& p) {
  Valuation v;
  for (const auto& [name, value] : p) v.emplace(VarKey(VarClass::Parameter, name), Value::of_int(value));
  for (const auto& c : param_init_conjuncts(spec))
    if (!evaluate(c, v).as_bool()) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string strip_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool comment = false;
  for (char c : text) {
    if (c == '#') comment = true;
    if (c == '\n') comment = false;
    out.push_back(comment ? ' ' : c);
  }
  return out;
}

inline std::vector<std::pair<size_t, std::string>> split_statements(const std::string& text) {
  std::vector<std::pair<size_t, std::string>> out;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ';') {
      std::string stmt = text.substr(start, i - start);
      size_t a = stmt.find_first_not_of(" \t\r\n");
      if (a != std::string::npos) {
        size_t b = stmt.find_last_not_of(" \t\r\n");
        out.emplace_back(start + a, stmt.substr(a, b - a + 1));
      }
      if (i < text.size() && text[i] == ';') start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string> split_top_commas(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

// Parses the specification DSL. Statements end with ';', comments run from
// '#' to end of line. A "guarantee G e" block is desugared by conjoining e
// into every action guard. State variables may carry "init <expr>" which is
// conjoined into init as an equality. Actions may omit updates for state
// variables they leave unchanged.
inline ParamSpec parse_spec(const std::string& raw_text, const std::string& name = "spec") {
  ParamSpec spec;
  spec.name = name;
  std::string text = detail::strip_comments(raw_text);
  Terms init_conjuncts, envtrans_conjuncts, global_guards;
  struct PendingAction {
    size_t offset;
    std::string guard, updates;
  };
  std::vector<PendingAction> pending_actions;

  auto reserve_check = [&](size_t off, const std::string& n) {
    if (n == "c") throw ParseError(off, "identifier 'c' is reserved for the strategy counter");
    if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_'))
      throw ParseError(off, "bad identifier '" + n + "'");
    for (const auto& vs : {spec.params, spec.states, spec.inputs})
      for (const auto& v : vs)
        if (v.name == n) throw ParseError(off, "duplicate declaration of '" + n + "'");
  };
  auto parse_sort = [&](size_t off, const std::string& s) -> Sort {
    if (s == "int") return int_sort();
    if (s == "real") return real_sort();
    if (s == "bool") return bool_sort();
    throw ParseError(off, "unknown sort '" + s + "' (expected int, real or bool)");
  };

  for (const auto& [off, stmt] : detail::split_statements(text)) {
    std::istringstream is(stmt);
    std::string kw;
    is >> kw;
    std::string rest = detail::trim(stmt.substr(kw.size() < stmt.size() ? kw.size() : stmt.size()));
    if (kw == "param") {
      auto colon = rest.find(':');
      if (colon == std::string::npos) throw ParseError(off, "expected 'param <name>: int'");
      std::string n = detail::trim(rest.substr(0, colon));
      std::string s = detail::trim(rest.substr(colon + 1));
      if (s != "int") throw ParseError(off, "parameters must be int");
      reserve_check(off, n);
      spec.params.push_back(VarRef{n, VarClass::Parameter, int_sort()});
    } else if (kw == "state" || kw == "input") {
      auto colon = rest.find(':');
      if (colon == std::string::npos) throw ParseError(off, "expected '<name>: <sort>'");
      std::string n = detail::trim(rest.substr(0, colon));
      std::string tail = detail::trim(rest.substr(colon + 1));
      std::string sort_word = tail;
      std::string init_expr;
      auto sp = tail.find_first_of(" \t");
      if (sp != std::string::npos) {
        sort_word = detail::trim(tail.substr(0, sp));
        std::string after = detail::trim(tail.substr(sp));
        if (after.rfind("init", 0) != 0) throw ParseError(off, "expected 'init <expr>' after sort");
        init_expr = detail::trim(after.substr(4));
      }
      Sort s = parse_sort(off, sort_word);
      reserve_check(off, n);
      if (kw == "state") {
        VarRef v{n, VarClass::State, s};
        spec.states.push_back(v);
        if (!init_expr.empty()) {
          Term e = parse_term(init_expr, spec.scope(false));
          init_conjuncts.push_back(s.is_bool() ? mk_iff(mk_var(v), e) : mk_eq(mk_var(v), e));
        }
      } else {
        if (!init_expr.empty()) throw ParseError(off, "inputs cannot carry init expressions");
        spec.inputs.push_back(VarRef{n, VarClass::Input, s});
      }
    } else if (kw == "init") {
      init_conjuncts.push_back(parse_term(rest, spec.scope(false)));
    } else if (kw == "envtrans") {
      envtrans_conjuncts.push_back(parse_term(rest, spec.scope(true)));
    } else if (kw == "action") {
      // defer so later "guarantee G" blocks and state declarations are seen
      size_t arrow = std::string::npos;
      for (size_t i = 0; i + 2 < rest.size(); ++i) {
        if (rest[i] == '|' && rest[i + 1] == '-' && rest[i + 2] == '>' && (i == 0 || rest[i - 1] != '|')) {
          arrow = i;
          break;
        }
      }
      if (arrow == std::string::npos) throw ParseError(off, "expected '|->' in action");
      pending_actions.push_back(
          PendingAction{off, detail::trim(rest.substr(0, arrow)), detail::trim(rest.substr(arrow + 3))});
    } else if (kw == "assume" || kw == "guarantee") {
      std::istringstream rs(rest);
      std::string mode;
      rs >> mode;
      std::string expr = detail::trim(rest.substr(mode.size()));
      if (kw == "assume") {
        if (mode != "GF") throw ParseError(off, "expected 'assume GF <expr>'");
        spec.justice_assumptions.push_back(parse_term(expr, spec.scope(true)));
      } else if (mode == "G") {
        global_guards.push_back(parse_term(expr, spec.scope(true)));
      } else if (mode == "GF") {
        spec.justice_guarantees.push_back(parse_term(expr, spec.scope(false)));
      } else {
        throw ParseError(off, "expected 'guarantee G <expr>' or 'guarantee GF <expr>'");
      }
    } else {
      throw ParseError(off, "unknown statement '" + kw + "'");
    }
  }

  for (const auto& pa : pending_actions) {
    Action a;
    a.guard = parse_term(pa.guard, spec.scope(true));
    if (!a.guard.sort().is_bool()) throw ParseError(pa.offset, "action guard must be boolean");
    std::map<std::string, Term> us;
    for (const auto& item : detail::split_top_commas(pa.updates)) {
      std::string u = detail::trim(item);
      auto assign = u.find(":=");
      if (assign == std::string::npos) throw ParseError(pa.offset, "expected '<var> := <expr>' in update");
      std::string vn = detail::trim(u.substr(0, assign));
      auto sv = spec.state_named(vn);
      if (!sv) throw ParseError(pa.offset, "update target '" + vn + "' is not a state variable");
      if (us.count(vn)) throw ParseError(pa.offset, "state '" + vn + "' updated twice");
      Term e = parse_term(detail::trim(u.substr(assign + 2)), spec.scope(true));
      if (sv->sort.is_bool() != e.sort().is_bool() || (sv->sort.is_int() && e.sort().is_real()))
        throw ParseError(pa.offset, "update for '" + vn + "' has incompatible sort");
      us.emplace(vn, e);
    }
    for (const auto& s : spec.states) {
      auto it = us.find(s.name);
      a.updates.push_back(it != us.end() ? it->second : mk_var(s));
    }
    spec.actions.push_back(std::move(a));
  }

  if (!global_guards.empty()) {
    Term g = conj(global_guards);
    for (auto& a : spec.actions) a.guard = a.guard.is_true() ? g : mk_and(a.guard, g);
  }
  spec.init = conj(std::move(init_conjuncts));
  spec.env_trans = conj(std::move(envtrans_conjuncts));
  return spec;
}

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

inline ConcreteSpec instantiate(const ParamSpec& spec, const ParamValuation& p) {
  for (const auto& v : spec.params)
    if (!p.count(v.name)) throw Error("parameter " + v.name + " unassigned in valuation");
  ConcreteSpec out;
  out.name = spec.name;
  out.states = spec.states;
  out.inputs = spec.inputs;
  out.init = instantiate_params(spec.init, p);
  out.env_trans = instantiate_params(spec.env_trans, p);
  for (const auto& a : spec.actions) {
    Action ca;
    ca.guard = instantiate_params(a.guard, p);
    for (const auto& u : a.updates) ca.updates.push_back(instantiate_params(u, p));
    out.actions.push_back(std::move(ca));
  }
  for (const auto& j : spec.justice_assumptions) out.justice_assumptions.push_back(instantiate_params(j, p));
  for (const auto& j : spec.justice_guarantees) out.justice_guarantees.push_back(instantiate_params(j, p));
  out.origin = p;
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {
inline void check_classes(const Term& t, bool allow_inputs, const char* what,
                          std::vector<std::string>& diags) {
  for (const auto& v : vars(t)) {
    switch (v.cls) {
      case VarClass::Parameter:
      case VarClass::State:
        break;
      case VarClass::Input:
        if (!allow_inputs) diags.push_back(std::string(what) + " must not reference input " + v.name);
        break;
      case VarClass::Hole:
        diags.push_back(std::string(what) + " contains a hole " + v.name);
        break;
      case VarClass::Counter:
      case VarClass::PrimedState:
        diags.push_back(std::string(what) + " references " + std::string(var_class_name(v.cls)) + " " +
                        v.display());
        break;
    }
  }
}
}  // namespace detail

// Structural well-formedness plus satisfiability of init for at least one
// parameter valuation. Diagnostics are data; an empty result means valid.
inline std::vector<std::string> validate(const ParamSpec& spec, SolverSession& session) {
  std::vector<std::string> diags;
  if (spec.justice_guarantees.empty()) diags.push_back("at least one justice guarantee is required");
  detail::check_classes(spec.init, false, "init", diags);
  detail::check_classes(spec.env_trans, true, "envtrans", diags);
  for (size_t i = 0; i < spec.actions.size(); ++i) {
    const auto& a = spec.actions[i];
    std::string where = "action " + std::to_string(i + 1);
    detail::check_classes(a.guard, true, (where + " guard").c_str(), diags);
    if (a.updates.size() != spec.states.size())
      diags.push_back(where + " must update every state variable exactly once");
    for (const auto& u : a.updates) detail::check_classes(u, true, (where + " update").c_str(), diags);
  }
  for (const auto& j : spec.justice_assumptions)
    detail::check_classes(j, true, "justice assumption", diags);
  for (const auto& j : spec.justice_guarantees)
    detail::check_classes(j, false, "justice guarantee", diags);
  if (!diags.empty()) return diags;

  SatResult r = session.check_sat(spec.init);
  if (r.unsat()) diags.push_back("no initial valuation: init is unsatisfiable for every parameter value");
  else if (r.kind == SatResult::Unknown)
    diags.push_back("could not establish satisfiability of init: " + r.reason);
  return diags;
}

inline std::vector<std::string> validate(const ParamSpec& spec) {
  SolverSession session;
  return validate(spec, session);
}

// Canonical rendering (parse . print is the identity on ParamSpec).
inline std::string print_spec(const ParamSpec& spec) {
  std::ostringstream os;
  for (const auto& v : spec.params) os << "param " << v.name << ": int;\n";
  for (const auto& v : spec.states) os << "state " << v.name << ": " << v.sort.str() << ";\n";
  for (const auto& v : spec.inputs) os << "input " << v.name << ": " << v.sort.str() << ";\n";
  os << "init " << spec.init << ";\n";
  if (!spec.env_trans.is_true()) os << "envtrans " << spec.env_trans << ";\n";
  for (const auto& a : spec.actions) {
    os << "action " << a.guard << " |-> ";
    for (size_t i = 0; i < a.updates.size(); ++i) {
      if (i) os << ", ";
      os << spec.states[i].name << " := " << a.updates[i];
    }
    os << ";\n";
  }
  for (const auto& j : spec.justice_assumptions) os << "assume GF " << j << ";\n";
  for (const auto& j : spec.justice_guarantees) os << "guarantee GF " << j << ";\n";
  return os.str();
}

}  // namespace pargus

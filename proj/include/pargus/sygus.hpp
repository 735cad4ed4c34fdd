#pragma once

#include <chrono>

#include "pargus/grammar.hpp"
#include "pargus/smt.hpp"

// Enumerative counterexample-guided synthesis over the built-in grammars.
// Candidates are enumerated in nondecreasing size (production count), pruned
// against stored counterexample valuations by evaluation, and validated by
// an independent satisfiability check of the negated constraint.

namespace pargus {

struct SynthProblem {
  struct Unknown {
    std::string name;  // also the hole-variable name when occurrences are implicit
    Sort sort;
    const Grammar* grammar = nullptr;
    int root = 0;
  };
  // A hole in the constraint standing for an unknown with a variable
  // renaming applied at that use site (e.g. a ranking function evaluated at
  // the post-state renames states to primed states).
  struct Occurrence {
    std::string hole;
    size_t unknown = 0;
    std::map<VarKey, Term> renaming;
  };

  std::vector<Unknown> unknowns;
  Term constraint;  // boolean; implicitly universally quantified over its free variables
  std::vector<Occurrence> occurrences;  // empty: one per unknown, identity renaming
  std::vector<VarRef> universe;         // variables candidates may mention (counterexample domain)
};

struct SynthBudget {
  int max_size = 12;
  double seconds = 30.0;
};

struct SynthResult {
  bool success = false;
  std::map<std::string, Term> solution;
  std::string reason;

  const Term& at(const std::string& name) const {
    auto it = solution.find(name);
    PARGUS_CHECK(it != solution.end(), "no solution for unknown " + name);
    return it->second;
  }
};

namespace detail {

inline std::vector<SynthProblem::Occurrence> occurrences_of(const SynthProblem& p) {
  if (!p.occurrences.empty()) return p.occurrences;
  std::vector<SynthProblem::Occurrence> out;
  for (size_t i = 0; i < p.unknowns.size(); ++i)
    out.push_back(SynthProblem::Occurrence{p.unknowns[i].name, i, {}});
  return out;
}

inline Term plug(const SynthProblem& p, const std::vector<SynthProblem::Occurrence>& occs,
                 const std::vector<Term>& candidates) {
  std::map<VarKey, Term> sub;
  for (const auto& occ : occs) {
    Term t = candidates[occ.unknown];
    if (!occ.renaming.empty()) t = substitute_vars(t, occ.renaming);
    sub.emplace(VarKey(VarClass::Hole, occ.hole), t);
  }
  return substitute_vars(p.constraint, sub);
}

}  // namespace detail

inline SynthResult func_synth(SolverSession& session, const SynthProblem& problem,
                              const SynthBudget& budget = {}) {
  PARGUS_CHECK(!problem.unknowns.empty(), "no unknowns to synthesize");
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(budget.seconds);
  auto occs = detail::occurrences_of(problem);

  // counterexample domain: free variables of the constraint plus the
  // candidate universe (so stored valuations stay total for evaluation)
  std::set<VarRef> domain_set;
  for (const auto& v : vars(problem.constraint))
    if (v.cls != VarClass::Hole) domain_set.insert(v);
  for (const auto& v : problem.universe) domain_set.insert(v);
  for (const auto& occ : occs)
    for (const auto& [key, rep] : occ.renaming)
      for (const auto& v : vars(rep)) domain_set.insert(v);
  std::vector<VarRef> domain(domain_set.begin(), domain_set.end());

  std::vector<Valuation> cexs;

  auto out_of_time = [&] { return std::chrono::steady_clock::now() > deadline; };

  while (true) {
    // enumeration restarts whenever the counterexample set grows, so the
    // observational-equivalence classes stay in sync with the examples
    std::vector<Enumerator> ens;
    ens.reserve(problem.unknowns.size());
    for (const auto& u : problem.unknowns) ens.emplace_back(*u.grammar, cexs);
    size_t n = problem.unknowns.size();

    std::vector<Term> chosen(n);
    bool found_cex = false;
    std::function<bool(size_t, int)> assign = [&](size_t i, int remaining) -> bool {
      if (out_of_time()) return false;
      if (i + 1 == n) {
        if (remaining > budget.max_size) return false;
        for (const auto& cand : ens[i].at_size(problem.unknowns[i].root, remaining)) {
          if (out_of_time()) return false;
          chosen[i] = cand;
          Term ground = detail::plug(problem, occs, chosen);
          bool pruned = false;
          for (const auto& cex : cexs) {
            if (!evaluate(ground, cex).as_bool()) { pruned = true; break; }
          }
          if (pruned) continue;
          SatResult r = session.check_sat(mk_not(ground), domain);
          if (r.unsat()) return true;  // valid: constraint holds for all valuations
          if (r.kind == SatResult::Unknown) continue;  // treat as rejected, keep searching
          cexs.push_back(r.model);
          found_cex = true;
          return false;
        }
        return false;
      }
      int reserve = int(n - i - 1);
      for (int s = 1; s + reserve <= remaining && s <= budget.max_size; ++s) {
        for (const auto& cand : ens[i].at_size(problem.unknowns[i].root, s)) {
          chosen[i] = cand;
          if (assign(i + 1, remaining - s)) return true;
          if (found_cex || out_of_time()) return false;
        }
      }
      return false;
    };

    for (int total = int(n); total <= budget.max_size * int(n); ++total) {
      if (assign(0, total)) {
        SynthResult out;
        out.success = true;
        for (size_t i = 0; i < n; ++i) out.solution.emplace(problem.unknowns[i].name, chosen[i]);
        return out;
      }
      if (found_cex) break;  // restart enumeration with the new example
      if (out_of_time()) return SynthResult{false, {}, "timeout"};
    }
    if (!found_cex) return SynthResult{false, {}, "size budget exhausted"};
  }
}

// Diagnostic SyGuS-IF v2 rendering of a problem (output only, not consumed).
inline std::string to_sygus_if(const SynthProblem& problem) {
  std::ostringstream os;
  os << "(set-logic LIA)\n";
  for (const auto& u : problem.unknowns) {
    os << "(synth-fun " << u.name << " (";
    bool first = true;
    for (const auto& v : problem.universe) {
      if (!first) os << ' ';
      first = false;
      os << '(' << v.name << ' ' << smtlib::sort_name(v.sort) << ')';
    }
    os << ") " << smtlib::sort_name(u.sort) << ")\n";
  }
  for (const auto& v : problem.universe)
    os << "(declare-var " << v.name << ' ' << smtlib::sort_name(v.sort) << ")\n";
  os << "(constraint " << smtlib::to_smt2(problem.constraint) << ")\n(check-synth)\n";
  return os.str();
}

}  // namespace pargus

// SMT-LIB2 solver over standard I/O for quantifier-free linear integer/real
// arithmetic with Booleans. Supports the incremental subset used by the
// toolkit: set-logic, declare-const/declare-fun, assert, check-sat,
// get-value, push/pop, reset, echo, exit.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pargus/lin.hpp"
#include "pargus/smtlib.hpp"

using namespace pargus;

namespace {

struct Server {
  bool print_success = false;
  std::map<std::string, VarRef> syms;
  std::vector<std::vector<Term>> stack{{}};
  std::vector<std::vector<std::string>> decl_stack{{}};
  Valuation model;
  bool have_model = false;
  i64 budget = 4'000'000;

  void success() {
    if (print_success) std::cout << "success\n" << std::flush;
  }
  void error(const std::string& msg) {
    std::cout << "(error \"" << msg << "\")\n" << std::flush;
  }

  Sort sort_of(const smtlib::SExpr& e) {
    if (e.is("Bool")) return bool_sort();
    if (e.is("Int")) return int_sort();
    if (e.is("Real")) return real_sort();
    throw Error("unsupported sort: " + e.str());
  }

  void declare(const std::string& name, Sort s) {
    if (syms.count(name)) throw Error("symbol already declared: " + name);
    syms.emplace(name, VarRef{name, VarClass::State, s});
    decl_stack.back().push_back(name);
  }

  void handle(const smtlib::SExpr& cmd) {
    if (cmd.atom || cmd.kids.empty() || !cmd.kids[0].atom) {
      error("malformed command");
      return;
    }
    const std::string& op = cmd.kids[0].text;
    if (op == "set-option") {
      if (cmd.kids.size() == 3 && cmd.kids[1].is(":print-success"))
        print_success = cmd.kids[2].is("true");
      success();
      return;
    }
    if (op == "set-logic" || op == "set-info") {
      success();
      return;
    }
    if (op == "declare-const") {
      if (cmd.kids.size() != 3) { error("declare-const arity"); return; }
      declare(cmd.kids[1].text, sort_of(cmd.kids[2]));
      success();
      return;
    }
    if (op == "declare-fun") {
      if (cmd.kids.size() != 4 || !cmd.kids[2].kids.empty()) {
        error("only nullary declare-fun is supported");
        return;
      }
      declare(cmd.kids[1].text, sort_of(cmd.kids[3]));
      success();
      return;
    }
    if (op == "assert") {
      if (cmd.kids.size() != 2) { error("assert arity"); return; }
      smtlib::TermBuilder b(syms);
      stack.back().push_back(b.build(cmd.kids[1]));
      success();
      return;
    }
    if (op == "push" || op == "pop") {
      i64 n = 1;
      if (cmd.kids.size() == 2) smtlib::numeral(cmd.kids[1].text, n);
      for (i64 i = 0; i < n; ++i) {
        if (op == "push") {
          stack.emplace_back();
          decl_stack.emplace_back();
        } else {
          if (stack.size() <= 1) { error("pop on empty stack"); return; }
          for (const auto& name : decl_stack.back()) syms.erase(name);
          stack.pop_back();
          decl_stack.pop_back();
        }
      }
      success();
      return;
    }
    if (op == "reset") {
      syms.clear();
      stack.assign(1, {});
      decl_stack.assign(1, {});
      have_model = false;
      success();
      return;
    }
    if (op == "check-sat") {
      Terms all;
      for (const auto& level : stack)
        for (const auto& t : level) all.push_back(t);
      lin::Solver solver(budget);
      auto r = solver.solve(conj(std::move(all)));
      have_model = r.kind == lin::SolveResult::Sat;
      model = std::move(r.model);
      std::cout << (r.kind == lin::SolveResult::Sat ? "sat"
                    : r.kind == lin::SolveResult::Unsat ? "unsat" : "unknown")
                << "\n" << std::flush;
      return;
    }
    if (op == "get-value") {
      if (!have_model) { error("no model available"); return; }
      if (cmd.kids.size() != 2 || cmd.kids[1].atom) { error("get-value arity"); return; }
      std::cout << '(';
      bool first = true;
      for (const auto& q : cmd.kids[1].kids) {
        auto it = syms.find(q.text);
        if (it == syms.end()) { error("undeclared symbol: " + q.text); return; }
        Value v;
        auto mit = model.find(VarKey(it->second));
        if (mit != model.end()) v = mit->second;
        else v = it->second.sort.is_bool() ? Value::of_bool(false)
               : it->second.sort.is_real() ? Value::of_real(Rat(0)) : Value::of_int(0);
        if (!first) std::cout << ' ';
        first = false;
        std::cout << '(' << (smtlib::simple_symbol(q.text) ? q.text : "|" + q.text + "|") << ' ';
        if (v.is_bool()) std::cout << (v.b ? "true" : "false");
        else if (v.q.num < 0) {
          if (v.q.den == 1) std::cout << "(- " << -v.q.num << ")";
          else std::cout << "(- (/ " << -v.q.num << " " << v.q.den << "))";
        } else if (v.q.den == 1) std::cout << v.q.num;
        else std::cout << "(/ " << v.q.num << " " << v.q.den << ")";
        std::cout << ')';
      }
      std::cout << ")\n" << std::flush;
      return;
    }
    if (op == "echo") {
      std::cout << cmd.kids[1].text << "\n" << std::flush;
      return;
    }
    if (op == "exit") {
      std::exit(0);
    }
    error("unsupported command: " + op);
  }
};

}  // namespace

int main(int argc, char** argv) {
  Server server;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--budget" && i + 1 < argc) server.budget = std::stoll(argv[++i]);
  }
  std::ios::sync_with_stdio(false);
  smtlib::SReader reader(std::cin);
  while (true) {
    std::optional<smtlib::SExpr> cmd;
    try {
      cmd = reader.next();
    } catch (const Error& e) {
      server.error(e.what());
      continue;
    }
    if (!cmd) break;
    try {
      server.handle(*cmd);
    } catch (const Error& e) {
      server.error(e.what());
    } catch (const std::exception& e) {
      server.error(std::string("internal: ") + e.what());
    }
  }
  return 0;
}

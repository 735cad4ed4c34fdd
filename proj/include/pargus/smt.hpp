#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <sstream>

#include "pargus/grammar.hpp"
#include "pargus/lin.hpp"
#include "pargus/normalize.hpp"
#include "pargus/smtlib.hpp"

// Session-oriented client for an SMT solver subprocess speaking SMT-LIB2
// over standard I/O. Quantifier elimination, interpolation and redundancy
// elimination are adapter capabilities layered on top of the session.

namespace pargus {

struct SatResult {
  enum Kind { Sat, Unsat, Unknown } kind = Unknown;
  Valuation model;  // values for exactly the requested variables when Sat
  std::string reason;

  bool sat() const { return kind == Sat; }
  bool unsat() const { return kind == Unsat; }
};

struct SolverConfig {
  std::vector<std::string> command;  // empty: resolve default solver
  std::string logic = "ALL";
  int timeout_ms = 10'000;
};

// Default backend: the bundled pargus-smt binary next to the running
// executable, unless PARGUS_SOLVER overrides it.
inline std::vector<std::string> default_solver_command() {
  if (const char* env = std::getenv("PARGUS_SOLVER")) {
    std::vector<std::string> argv;
    std::istringstream is(env);
    std::string w;
    while (is >> w) argv.push_back(w);
    if (!argv.empty()) return argv;
  }
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n > 0) {
    buf[n] = 0;
    std::string dir(buf);
    auto slash = dir.rfind('/');
    if (slash != std::string::npos) {
      std::string candidate = dir.substr(0, slash) + "/pargus-smt";
      if (access(candidate.c_str(), X_OK) == 0) return {candidate};
    }
  }
  return {"pargus-smt"};
}

class SolverSession {
 public:
  explicit SolverSession(SolverConfig cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.command.empty()) cfg_.command = default_solver_command();
    start();
  }
  ~SolverSession() { shutdown(); }
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  // --- check-sat -----------------------------------------------------------

  SatResult check_sat(const Terms& assertions, const std::vector<VarRef>& get = {}) {
    SatResult r = check_sat_once(assertions, get, cfg_.timeout_ms);
    if (r.kind == SatResult::Unknown && r.reason == "timeout") {
      restart();
      r = check_sat_once(assertions, get, cfg_.timeout_ms * 4);
    }
    return r;
  }
  SatResult check_sat(const Term& assertion, const std::vector<VarRef>& get = {}) {
    return check_sat(Terms{assertion}, get);
  }

  // valid iff the negation is unsatisfiable
  bool valid(const Term& t) {
    SatResult r = check_sat(mk_not(t));
    if (r.kind == SatResult::Unknown) throw Error("solver unknown while checking validity: " + r.reason);
    return r.unsat();
  }
  bool equivalent(const Term& a, const Term& b, const Term& context = mk_true()) {
    Term distinct = mk_not(mk_iff(a, b));
    SatResult r = check_sat(context.is_true() ? distinct : mk_and(context, distinct));
    if (r.kind == SatResult::Unknown) throw Error("solver unknown while checking equivalence: " + r.reason);
    return r.unsat();
  }

  // --- quantifier elimination (adapter capability, exact) -------------------

  Term qe(const Term& quantified) {
    ++stats_qe_;
    return lin::Eliminator().eliminate(quantified);
  }

  // --- grammar-restricted interpolation --------------------------------------

  // Finds a term over the parameters that is true on every valuation in
  // `a_points` and false on every valuation in `b_points`. Separation is
  // checked by evaluation; the fallback enumerates `a_points` exactly.
  Term interpolate(const std::vector<ParamValuation>& a_points, const std::vector<ParamValuation>& b_points,
                   const Grammar* grammar = nullptr, int max_size = 9) {
    PARGUS_CHECK(!a_points.empty(), "interpolation with empty A side");
    std::vector<VarRef> params;
    std::set<std::string> names;
    std::vector<i64> constants;
    std::set<i64> cset;
    auto note = [&](const ParamValuation& p) {
      for (const auto& [name, value] : p) {
        if (names.insert(name).second) params.push_back(VarRef{name, VarClass::Parameter, int_sort()});
        if (cset.insert(value).second) constants.push_back(value);
      }
    };
    for (const auto& p : a_points) note(p);
    for (const auto& p : b_points) note(p);
    std::sort(constants.begin(), constants.end());

    auto val_of = [](const ParamValuation& p) {
      Valuation v;
      for (const auto& [name, value] : p) v.emplace(VarKey(VarClass::Parameter, name), Value::of_int(value));
      return v;
    };
    std::vector<Valuation> avs, bvs, all;
    for (const auto& p : a_points) { avs.push_back(val_of(p)); all.push_back(avs.back()); }
    for (const auto& p : b_points) { bvs.push_back(val_of(p)); all.push_back(bvs.back()); }
    auto separates = [&](const Term& t) {
      for (const auto& v : avs)
        if (!evaluate(t, v).as_bool()) return false;
      for (const auto& v : bvs)
        if (evaluate(t, v).as_bool()) return false;
      return true;
    };

    Grammar own;
    if (!grammar) {
      own = interpolant_grammar(params, constants);
      grammar = &own;
    }
    Enumerator en(*grammar, all);
    for (int size = 1; size <= max_size; ++size) {
      for (const auto& cand : en.at_size(grammar->root, size))
        if (cand.sort().is_bool() && separates(cand)) return cand;
    }
    // fallback: enumeration of all values from the A side
    Terms cubes;
    for (const auto& p : a_points) {
      Terms eqs;
      for (const auto& [name, value] : p)
        eqs.push_back(mk_eq(mk_var(VarRef{name, VarClass::Parameter, int_sort()}), mk_int(value)));
      cubes.push_back(conj(std::move(eqs)));
    }
    Term out = disj(std::move(cubes));
    PARGUS_CHECK(separates(out), "interpolation fallback failed to separate");
    return out;
  }

  // --- redundancy elimination ------------------------------------------------

  // Returns t' with context -> (t <-> t') valid and node_count(t') <= t.
  // DNF-based: context-infeasible cubes dropped, then greedy literal and
  // cube deletion (larger candidates first, later position breaks ties).
  Term simplify_with_context(const Term& t, const Term& context) {
    Term n = normalize(t);
    if (n.is_const()) return n;
    std::optional<std::vector<Terms>> dnf = to_dnf(n, 512);
    if (!dnf) return n.node_count() <= t.node_count() ? n : t;

    std::vector<Terms> cubes;
    for (auto& cube : *dnf) {
      SatResult r = check_sat(mk_and(context, conj(cube)));
      if (r.kind == SatResult::Unknown) return n.node_count() <= t.node_count() ? n : t;
      if (r.sat()) cubes.push_back(std::move(cube));
    }
    if (cubes.empty()) return mk_false();

    // greedy literal deletion within each cube, to fixpoint
    for (auto& cube : cubes) prune_again(cube, context);

    // greedy cube deletion, to fixpoint
    bool changed = true;
    while (changed && cubes.size() > 1) {
      changed = false;
      for (size_t pos : deletion_order_sets(cubes)) {
        std::vector<Terms> rest;
        for (size_t i = 0; i < cubes.size(); ++i)
          if (i != pos) rest.push_back(cubes[i]);
        Terms rest_terms;
        for (auto& c : rest) rest_terms.push_back(conj(c));
        if (implies(mk_and(context, conj(cubes[pos])), disj(std::move(rest_terms)))) {
          cubes = std::move(rest);
          changed = true;
          break;
        }
      }
    }
    Terms out;
    for (auto& c : cubes) out.push_back(conj(c));
    Term result = normalize(disj(std::move(out)));
    return result.node_count() <= t.node_count() ? result : (n.node_count() <= t.node_count() ? n : t);
  }

  i64 query_count() const { return stats_queries_; }
  void set_timeout_ms(int ms) { cfg_.timeout_ms = ms; }

 private:
  SolverConfig cfg_;
  pid_t pid_ = -1;
  int in_fd_ = -1;   // we write commands here
  int out_fd_ = -1;  // we read replies here
  std::string rbuf_;
  std::map<std::string, VarRef> declared_;
  i64 stats_queries_ = 0;
  i64 stats_qe_ = 0;

  void prune_again(Terms& cube, const Term& context) {
    // second pass catches literals that became redundant after deletions
    bool changed = true;
    while (changed && cube.size() > 1) {
      changed = false;
      for (size_t pos : deletion_order(cube)) {
        if (cube.size() <= 1) break;
        Terms rest;
        for (size_t i = 0; i < cube.size(); ++i)
          if (i != pos) rest.push_back(cube[i]);
        if (implies(mk_and(context, conj(rest)), cube[pos])) {
          cube = std::move(rest);
          changed = true;
          break;
        }
      }
    }
  }

  bool implies(const Term& a, const Term& b) {
    SatResult r = check_sat(mk_and(a, mk_not(b)));
    return r.unsat();
  }

  static std::vector<size_t> deletion_order(const Terms& xs) {
    std::vector<size_t> idx(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      size_t na = xs[a].node_count(), nb = xs[b].node_count();
      if (na != nb) return na > nb;
      return a > b;
    });
    return idx;
  }
  static std::vector<size_t> deletion_order_sets(const std::vector<Terms>& xs) {
    std::vector<size_t> idx(xs.size());
    std::vector<size_t> sizes(xs.size(), 0);
    for (size_t i = 0; i < xs.size(); ++i) {
      idx[i] = i;
      for (const auto& t : xs[i]) sizes[i] += t.node_count();
    }
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
      return a > b;
    });
    return idx;
  }

  // literal-level DNF with caps; nullopt when the formula is too big or
  // contains structure the cube representation cannot hold (quantifiers)
  static std::optional<std::vector<Terms>> to_dnf(const Term& t, size_t cap) {
    switch (t.op()) {
      case Op::Const: return t.cval().b ? std::vector<Terms>{{}} : std::vector<Terms>{};
      case Op::Or: {
        std::vector<Terms> out;
        for (const auto& k : t.kids()) {
          auto sub = to_dnf(k, cap);
          if (!sub) return std::nullopt;
          for (auto& c : *sub) out.push_back(std::move(c));
          if (out.size() > cap) return std::nullopt;
        }
        return out;
      }
      case Op::And: {
        std::vector<Terms> acc{{}};
        for (const auto& k : t.kids()) {
          auto sub = to_dnf(k, cap);
          if (!sub) return std::nullopt;
          std::vector<Terms> next;
          for (const auto& a : acc)
            for (const auto& b : *sub) {
              Terms cube = a;
              cube.insert(cube.end(), b.begin(), b.end());
              next.push_back(std::move(cube));
              if (next.size() > cap) return std::nullopt;
            }
          acc = std::move(next);
        }
        return acc;
      }
      case Op::Implies: {
        Term rw = mk_or(mk_not(t.kid(0)), t.kid(1));
        return to_dnf(normalize(rw), cap);
      }
      case Op::Not: {
        const Term& k = t.kid(0);
        if (k.op() == Op::Var || k.op() == Op::Eq) return std::vector<Terms>{{t}};
        Term rw = normalize(t);
        if (rw == t) return std::vector<Terms>{{t}};
        return to_dnf(rw, cap);
      }
      case Op::Var: case Op::Le: case Op::Lt: case Op::Ge: case Op::Gt: case Op::Eq:
        return std::vector<Terms>{{t}};
      case Op::Ite: {
        if (!t.sort().is_bool()) return std::nullopt;
        Term rw = mk_or(mk_and(t.kid(0), t.kid(1)), mk_and(mk_not(t.kid(0)), t.kid(2)));
        return to_dnf(rw, cap);
      }
      default: return std::nullopt;
    }
  }

  // --- subprocess plumbing --------------------------------------------------

  void start() {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) throw Error("pipe failed");
    pid_ = fork();
    if (pid_ < 0) throw Error("fork failed");
    if (pid_ == 0) {
      dup2(to_child[0], 0);
      dup2(from_child[1], 1);
      close(to_child[0]); close(to_child[1]);
      close(from_child[0]); close(from_child[1]);
      std::vector<char*> argv;
      for (auto& a : cfg_.command) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(argv[0], argv.data());
      const char* msg = "(error \"exec failed\")\n";
      ssize_t ignored = write(1, msg, strlen(msg));
      (void)ignored;
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
    rbuf_.clear();
    command("(set-option :print-success true)", cfg_.timeout_ms);
    command("(set-logic " + cfg_.logic + ")", cfg_.timeout_ms);
    for (const auto& [sym, var] : declared_)
      command("(declare-const " + (smtlib::simple_symbol(sym) ? sym : "|" + sym + "|") + " " +
                  smtlib::sort_name(var.sort) + ")",
              cfg_.timeout_ms);
  }

  void shutdown() {
    if (pid_ > 0) {
      if (in_fd_ >= 0) {
        const char* bye = "(exit)\n";
        ssize_t ignored = write(in_fd_, bye, strlen(bye));
        (void)ignored;
        close(in_fd_);
      }
      if (out_fd_ >= 0) close(out_fd_);
      int status = 0;
      for (int i = 0; i < 50; ++i) {
        if (waitpid(pid_, &status, WNOHANG) == pid_) { pid_ = -1; break; }
        usleep(2000);
      }
      if (pid_ > 0) {
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        pid_ = -1;
      }
    }
    in_fd_ = out_fd_ = -1;
  }

  void restart() {
    shutdown();
    start();
  }

  struct Timeout {};

  void send(const std::string& line) {
    std::string data = line + "\n";
    ssize_t n = write(in_fd_, data.data(), data.size());
    if (n != ssize_t(data.size())) throw Error("solver pipe write failed");
  }

  // reads one balanced s-expression or bare word
  std::string read_reply(int timeout_ms) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    int depth = 0;
    size_t start = 0;
    std::string tok;
    while (true) {
      // scan buffered content
      for (size_t i = start; i < rbuf_.size(); ++i) {
        char c = rbuf_[i];
        if (depth == 0 && tok.empty() && std::isspace(static_cast<unsigned char>(c))) { continue; }
        if (c == '(') ++depth;
        if (c == ')') {
          --depth;
          if (depth == 0) {
            std::string out = rbuf_.substr(0, i + 1);
            rbuf_.erase(0, i + 1);
            return out;
          }
        }
        if (depth == 0 && c != '(') {
          // bare word reply: read to newline
          auto nl = rbuf_.find('\n', i);
          if (nl != std::string::npos) {
            std::string out = rbuf_.substr(0, nl);
            rbuf_.erase(0, nl + 1);
            // trim
            while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
            while (!out.empty() && std::isspace(static_cast<unsigned char>(out.front()))) out.erase(out.begin());
            return out;
          }
          break;
        }
      }
      start = rbuf_.size();
      // need more data
      auto now = std::chrono::steady_clock::now();
      if (now >= deadline) throw Timeout{};
      int wait_ms = int(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
      struct pollfd pfd{out_fd_, POLLIN, 0};
      int pr = poll(&pfd, 1, std::max(1, wait_ms));
      if (pr == 0) throw Timeout{};
      if (pr < 0) throw Error("solver pipe poll failed");
      char buf[65536];
      ssize_t n = read(out_fd_, buf, sizeof(buf));
      if (n <= 0) throw Error("solver terminated unexpectedly");
      rbuf_.append(buf, size_t(n));
    }
  }

  std::string command(const std::string& line, int timeout_ms) {
    send(line);
    std::string reply = read_reply(timeout_ms);
    if (reply.rfind("(error", 0) == 0) throw Error("solver error: " + reply + " for " + line);
    return reply;
  }

  void ensure_declared(const Term& t) {
    if (t.op() == Op::Var) {
      const VarRef& v = t.var();
      if (v.cls == VarClass::Hole) throw Error("hole in solver query: " + v.name);
      std::string sym = v.display();
      auto it = declared_.find(sym);
      if (it == declared_.end()) {
        declared_.emplace(sym, v);
        command("(declare-const " + (smtlib::simple_symbol(sym) ? sym : "|" + sym + "|") + " " +
                    smtlib::sort_name(v.sort) + ")",
                cfg_.timeout_ms);
      } else if (!(it->second.sort == v.sort)) {
        throw Error("conflicting sorts for symbol " + sym);
      }
    }
    for (const auto& k : t.kids()) ensure_declared(k);
  }

  SatResult check_sat_once(const Terms& assertions, const std::vector<VarRef>& get, int timeout_ms) {
    ++stats_queries_;
    SatResult out;
    try {
      for (const auto& a : assertions) {
        if (!a.sort().is_bool()) throw Error("non-boolean assertion");
        ensure_declared(a);
      }
      for (const auto& v : get) ensure_declared(mk_var(v));
      command("(push 1)", timeout_ms);
      for (const auto& a : assertions) command("(assert " + smtlib::to_smt2(a) + ")", timeout_ms);
      std::string verdict = readify(command("(check-sat)", timeout_ms));
      if (verdict == "sat") {
        out.kind = SatResult::Sat;
        if (!get.empty()) {
          std::string q = "(get-value (";
          for (size_t i = 0; i < get.size(); ++i) {
            if (i) q += ' ';
            std::string sym = get[i].display();
            q += smtlib::simple_symbol(sym) ? sym : "|" + sym + "|";
          }
          q += "))";
          std::string reply = command(q, timeout_ms);
          auto se = smtlib::parse_sexpr(reply);
          if (!se || se->atom) throw Error("malformed get-value reply: " + reply);
          for (const auto& pair : se->kids) {
            if (pair.atom || pair.kids.size() != 2) throw Error("malformed model binding");
            const std::string& sym = pair.kids[0].text;
            auto it = declared_.find(sym);
            if (it == declared_.end()) continue;
            out.model[VarKey(it->second)] = smtlib::value_of(pair.kids[1], it->second.sort);
          }
          for (const auto& v : get)
            if (!out.model.count(VarKey(v)))
              out.model[VarKey(v)] = v.sort.is_bool() ? Value::of_bool(false)
                                   : v.sort.is_real() ? Value::of_real(Rat(0)) : Value::of_int(0);
        }
      } else if (verdict == "unsat") {
        out.kind = SatResult::Unsat;
      } else {
        out.kind = SatResult::Unknown;
        out.reason = verdict;
      }
      command("(pop 1)", timeout_ms);
    } catch (const Timeout&) {
      out.kind = SatResult::Unknown;
      out.reason = "timeout";
      out.model.clear();
    } catch (const Error& e) {
      // try to recover the session for subsequent queries
      try { restart(); } catch (...) {}
      out.kind = SatResult::Unknown;
      out.reason = e.what();
      out.model.clear();
    }
    return out;
  }

  static std::string readify(const std::string& s) { return s; }
};

}  // namespace pargus

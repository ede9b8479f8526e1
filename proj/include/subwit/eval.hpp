// Call-by-value interpreter: environments, a mutable-cell store, exception
// propagation, and a step counter.  Coercions evaluate as their subjects, so
// every subtyping cast is free at runtime.
//
// Values are arena-allocated; a Value* stays valid for the lifetime of the
// Evaluator that produced it.  Raised exceptions travel as a C++ exception
// (RaisedExn) between `raise` and the nearest enclosing `try`; an uncaught
// raise surfaces as a Raised outcome rather than a C++ throw at the public
// entry points.
#pragma once

#include <pthread.h>

#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "subwit/ast.hpp"
#include "subwit/pretty.hpp"

namespace subwit {

// ---------------------------------------------------------------------------
// Runtime values.

struct Value;

// Linked environment frames, shared between closures.  `value` is mutable so a
// recursive binding can be patched in after its closure has been built.
struct EnvNode {
  std::string name;
  Value* value = nullptr;
  const EnvNode* next = nullptr;
};

struct IntV {
  long long value = 0;
};
struct BoolV {
  bool value = false;
};
struct UnitV {};
struct StringV {
  std::string value;
};
struct ExnV {
  std::string message;
};
struct ClosureV {
  std::string param;
  TermPtr body;
  const EnvNode* env = nullptr;
};
struct TyClosureV {
  std::string binder;
  TermPtr body;
  const EnvNode* env = nullptr;
};
struct RecordV {
  std::vector<std::pair<std::string, Value*>> fields;
};
struct CtorV {
  std::string adt; // declaring data type, when known; "" otherwise
  std::string ctor;
  Value* arg = nullptr; // null for nullary constructors
};
struct PackV {
  Value* payload = nullptr; // the hidden type is erased; only the payload remains
};
struct RefV {
  std::size_t cell = 0;
};

using ValueNode = std::variant<IntV, BoolV, UnitV, StringV, ExnV, ClosureV, TyClosureV, RecordV, CtorV, PackV, RefV>;

struct Value {
  ValueNode node;
};

// Cells are identified by index; indices are never reused within a store.
class Store {
 public:
  std::size_t alloc(Value* v) {
    cells_.push_back(v);
    return cells_.size() - 1;
  }
  Value* get(std::size_t cell) const { return cells_.at(cell); }
  void set(std::size_t cell, Value* v) { cells_.at(cell) = v; }
  std::size_t size() const { return cells_.size(); }

 private:
  std::vector<Value*> cells_;
};

// In-flight exception payload (always an ExnV value).
struct RaisedExn {
  Value* exn = nullptr;
};

// Result of a complete evaluation: exactly one of `returned` / `raised` is set.
struct Outcome {
  Value* returned = nullptr;
  Value* raised = nullptr;
  bool is_raised() const { return raised != nullptr; }
};

// Counted evaluation steps.  Function application and type instantiation are
// both beta steps; cell reads, writes, and match dispatch count separately.
struct StepCounts {
  std::uint64_t beta = 0;
  std::uint64_t tyapp = 0;
  std::uint64_t deref = 0;
  std::uint64_t assign = 0;
  std::uint64_t match = 0;
  std::uint64_t total() const { return beta + tyapp + deref + assign + match; }
};

// ---------------------------------------------------------------------------
// Rendering values (for messages and debugging; transcripts only ever contain
// what `print` was given).

inline std::string value_to_string(const Value* v);

namespace detail {

inline std::string record_value_to_string(const RecordV& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& [label, value] : r.fields) {
    if (!first) out += "; ";
    first = false;
    out += label + " = " + value_to_string(value);
  }
  out += "}";
  return out;
}

} // namespace detail

inline std::string value_to_string(const Value* v) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntV>) return std::to_string(n.value);
        if constexpr (std::is_same_v<N, BoolV>) return n.value ? "true" : "false";
        if constexpr (std::is_same_v<N, UnitV>) return "()";
        if constexpr (std::is_same_v<N, StringV>) return "\"" + n.value + "\"";
        if constexpr (std::is_same_v<N, ExnV>) return "<exn: " + n.message + ">";
        if constexpr (std::is_same_v<N, ClosureV>) return "<fun>";
        if constexpr (std::is_same_v<N, TyClosureV>) return "<Fun>";
        if constexpr (std::is_same_v<N, RecordV>) return detail::record_value_to_string(n);
        if constexpr (std::is_same_v<N, CtorV>) {
          if (n.arg == nullptr) return n.ctor;
          return n.ctor + " " + value_to_string(n.arg);
        }
        if constexpr (std::is_same_v<N, PackV>) return "<pack " + value_to_string(n.payload) + ">";
        if constexpr (std::is_same_v<N, RefV>) return "<ref #" + std::to_string(n.cell) + ">";
        return "<value>";
      },
      v->node);
}

// ---------------------------------------------------------------------------
// Builtins.
//
// Builtins are ordinary closures whose bodies are internal primitive nodes,
// so the evaluator needs no special application rule for them.  The typing
// signatures are provided separately so a checking context can admit the same
// names the evaluator binds.

inline std::vector<std::pair<std::string, TypePtr>> builtin_signatures() {
  return {
      {"print", t_arrow(t_string(), t_unit())},
      {"add", t_arrow(t_int(), t_arrow(t_int(), t_int()))},
      {"int_to_string", t_arrow(t_int(), t_string())},
      {"exn_of_string", t_arrow(t_string(), t_exn())},
      {"exn_message", t_arrow(t_exn(), t_string())},
  };
}

// ---------------------------------------------------------------------------
// The evaluator.

struct ProgramOutcome {
  Outcome outcome;                // of `main` when present, of the last binding otherwise
  bool has_main = false;          // a term declaration named `main` was evaluated
  StepCounts main_steps;          // steps taken while evaluating `main` only
  const EnvNode* env = nullptr;   // final top-level environment
};

class Evaluator {
 public:
  Evaluator() { base_env_ = install_builtins(); }

  // Accumulated `print` output ('\n'-terminated lines).
  const std::string& transcript() const { return transcript_; }
  std::string& transcript() { return transcript_; }

  const StepCounts& counts() const { return counts_; }
  Store& store() { return store_; }
  const EnvNode* base_env() const { return base_env_; }

  const EnvNode* bind(const EnvNode* env, std::string name, Value* v) {
    env_arena_.push_back(EnvNode{std::move(name), v, env});
    return &env_arena_.back();
  }

  Value* make(ValueNode n) {
    arena_.push_back(Value{std::move(n)});
    return &arena_.back();
  }

  // Evaluate one term; converts an uncaught raise into a Raised outcome.
  Outcome eval_term(const TermPtr& e, const EnvNode* env) {
    try {
      return Outcome{eval(e, env), nullptr};
    } catch (const RaisedExn& r) {
      return Outcome{nullptr, r.exn};
    }
  }

  // Evaluate a whole program: declarations in order, with a `main` term
  // declaration deferred to the very end.  Steps are counted only while
  // `main` runs, so construction work in earlier bindings never pollutes a
  // measurement.  A raise escaping any top-level binding aborts the program
  // with that outcome.
  ProgramOutcome eval_program(const Prog& p) {
    ProgramOutcome result;
    for (const Decl& d : p.decls) {
      if (const AdtDecl* adt = std::get_if<AdtDecl>(&d.node)) {
        for (const CtorDef& c : adt->ctors) ctor_adt_[c.name] = adt->name;
      }
    }
    const EnvNode* env = base_env_;
    const TermDecl* main_decl = nullptr;
    Value* last = make(UnitV{});
    try {
      for (const Decl& d : p.decls) {
        const TermDecl* td = std::get_if<TermDecl>(&d.node);
        if (td == nullptr) continue;
        if (td->name == "main") {
          main_decl = td;
          continue;
        }
        last = eval_binding(*td, env);
        env = bind(env, td->name, last);
      }
      if (main_decl != nullptr) {
        result.has_main = true;
        StepCounts before = counts_;
        Value* v = eval_binding(*main_decl, env);
        result.main_steps = delta(before, counts_);
        env = bind(env, "main", v);
        last = v;
      }
      result.outcome = Outcome{last, nullptr};
    } catch (const RaisedExn& r) {
      result.outcome = Outcome{nullptr, r.exn};
    }
    result.env = env;
    return result;
  }

  // Core evaluation; throws RaisedExn for in-flight exceptions.
  Value* eval(const TermPtr& e, const EnvNode* env) {
    return std::visit([&](const auto& n) -> Value* { return eval_node(n, e, env); }, e->node);
  }

 private:
  static StepCounts delta(const StepCounts& before, const StepCounts& after) {
    StepCounts d;
    d.beta = after.beta - before.beta;
    d.tyapp = after.tyapp - before.tyapp;
    d.deref = after.deref - before.deref;
    d.assign = after.assign - before.assign;
    d.match = after.match - before.match;
    return d;
  }

  [[noreturn]] void stuck(const TermPtr& e, const std::string& what) const {
    throw std::logic_error("evaluator reached a stuck state at " + e->span.to_string() + ": " + what);
  }

  Value* lookup(const EnvNode* env, const std::string& name, const TermPtr& e) const {
    for (const EnvNode* n = env; n != nullptr; n = n->next) {
      if (n->name == name) return n->value;
    }
    stuck(e, "unbound variable " + name);
  }

  // Evaluate a top-level or local binding body, patching the environment for
  // recursive bindings.  The bound term of a recursive binding is a function
  // or type abstraction, so it evaluates to a closure immediately; the
  // closure captures the frame that is then patched to point at it.
  Value* eval_binding(const TermDecl& td, const EnvNode*& env) {
    if (!td.is_rec) return eval(td.body, env);
    env_arena_.push_back(EnvNode{td.name, nullptr, env});
    EnvNode* self = &env_arena_.back();
    Value* v = eval(td.body, self);
    self->value = v;
    env = self; // callers re-bind anyway; harmless either way
    return v;
  }

  Value* eval_node(const EVar& n, const TermPtr& e, const EnvNode* env) { return lookup(env, n.name, e); }
  Value* eval_node(const EIntLit& n, const TermPtr&, const EnvNode*) { return make(IntV{n.value}); }
  Value* eval_node(const EBoolLit& n, const TermPtr&, const EnvNode*) { return make(BoolV{n.value}); }
  Value* eval_node(const EUnitLit&, const TermPtr&, const EnvNode*) { return make(UnitV{}); }
  Value* eval_node(const EStringLit& n, const TermPtr&, const EnvNode*) { return make(StringV{n.value}); }

  Value* eval_node(const ELam& n, const TermPtr&, const EnvNode* env) {
    return make(ClosureV{n.param, n.body, env});
  }

  Value* eval_node(const EApp& n, const TermPtr& e, const EnvNode* env) {
    Value* fv = eval(n.fn, env);
    Value* av = eval(n.arg, env);
    const ClosureV* cl = std::get_if<ClosureV>(&fv->node);
    if (cl == nullptr) stuck(e, "application of a non-function value");
    ++counts_.beta;
    return eval(cl->body, bind(cl->env, cl->param, av));
  }

  Value* eval_node(const ETyAbs& n, const TermPtr&, const EnvNode* env) {
    return make(TyClosureV{n.var, n.body, env});
  }

  Value* eval_node(const ETyApp& n, const TermPtr& e, const EnvNode* env) {
    Value* fv = eval(n.fn, env);
    const TyClosureV* cl = std::get_if<TyClosureV>(&fv->node);
    if (cl == nullptr) stuck(e, "type application of a non-type-abstraction value");
    ++counts_.tyapp;
    // Types are erased: the body runs in the captured environment, once per
    // instantiation.
    return eval(cl->body, cl->env);
  }

  Value* eval_node(const ELet& n, const TermPtr&, const EnvNode* env) {
    TermDecl td{n.is_rec, n.name, n.ann, n.bound};
    const EnvNode* inner = env;
    Value* v = eval_binding(td, inner);
    if (!n.is_rec) inner = bind(env, n.name, v);
    return eval(n.body, inner);
  }

  Value* eval_node(const ERecord& n, const TermPtr&, const EnvNode* env) {
    RecordV r;
    r.fields.reserve(n.fields.size());
    for (const EFieldInit& f : n.fields) r.fields.emplace_back(f.label, eval(f.value, env));
    return make(std::move(r));
  }

  Value* eval_node(const EProj& n, const TermPtr& e, const EnvNode* env) {
    Value* sv = eval(n.subject, env);
    const RecordV* r = std::get_if<RecordV>(&sv->node);
    if (r == nullptr) stuck(e, "projection from a non-record value");
    for (const auto& [label, value] : r->fields) {
      if (label == n.label) return value;
    }
    stuck(e, "projection of a missing field " + n.label);
  }

  Value* eval_node(const EPack& n, const TermPtr&, const EnvNode* env) {
    return make(PackV{eval(n.payload, env)});
  }

  Value* eval_node(const EUnpack& n, const TermPtr& e, const EnvNode* env) {
    Value* pv = eval(n.packed, env);
    const PackV* p = std::get_if<PackV>(&pv->node);
    if (p == nullptr) stuck(e, "unpack of a non-package value");
    return eval(n.body, bind(env, n.var, p->payload));
  }

  Value* eval_node(const EConstruct& n, const TermPtr&, const EnvNode* env) {
    Value* arg = n.arg == nullptr ? nullptr : eval(n.arg, env);
    auto it = ctor_adt_.find(n.ctor);
    return make(CtorV{it == ctor_adt_.end() ? std::string() : it->second, n.ctor, arg});
  }

  Value* eval_node(const EMatch& n, const TermPtr& e, const EnvNode* env) {
    Value* sv = eval(n.scrutinee, env);
    const CtorV* c = std::get_if<CtorV>(&sv->node);
    if (c == nullptr) stuck(e, "match on a non-constructor value");
    ++counts_.match;
    for (const EArm& arm : n.arms) {
      if (arm.ctor != c->ctor) continue;
      const EnvNode* inner = env;
      if (arm.binder.has_value()) {
        if (c->arg == nullptr) stuck(e, "match binder for a nullary constructor " + c->ctor);
        inner = bind(env, *arm.binder, c->arg);
      }
      return eval(arm.body, inner);
    }
    stuck(e, "match with no arm for constructor " + c->ctor);
  }

  Value* eval_node(const ERefNew& n, const TermPtr&, const EnvNode* env) {
    return make(RefV{store_.alloc(eval(n.init, env))});
  }

  Value* eval_node(const EDeref& n, const TermPtr& e, const EnvNode* env) {
    Value* sv = eval(n.subject, env);
    const RefV* r = std::get_if<RefV>(&sv->node);
    if (r == nullptr) stuck(e, "dereference of a non-cell value");
    ++counts_.deref;
    return store_.get(r->cell);
  }

  Value* eval_node(const EAssign& n, const TermPtr& e, const EnvNode* env) {
    Value* tv = eval(n.target, env);
    Value* vv = eval(n.value, env);
    const RefV* r = std::get_if<RefV>(&tv->node);
    if (r == nullptr) stuck(e, "assignment to a non-cell value");
    ++counts_.assign;
    store_.set(r->cell, vv);
    return make(UnitV{});
  }

  // Coercion is the identity at runtime: no step, no new value.
  Value* eval_node(const ECoerce& n, const TermPtr&, const EnvNode* env) { return eval(n.subject, env); }

  Value* eval_node(const ERaise& n, const TermPtr& e, const EnvNode* env) {
    Value* pv = eval(n.payload, env);
    if (!std::holds_alternative<ExnV>(pv->node)) stuck(e, "raise of a non-exception value");
    throw RaisedExn{pv};
  }

  Value* eval_node(const ETry& n, const TermPtr&, const EnvNode* env) {
    try {
      return eval(n.body, env);
    } catch (const RaisedExn& r) {
      return eval(n.handler, bind(env, n.binder, r.exn));
    }
  }

  Value* eval_node(const ESeq& n, const TermPtr&, const EnvNode* env) {
    eval(n.first, env);
    return eval(n.second, env);
  }

  Value* eval_node(const EPrim& n, const TermPtr& e, const EnvNode* env) {
    std::vector<Value*> args;
    args.reserve(n.args.size());
    for (const TermPtr& a : n.args) args.push_back(eval(a, env));
    if (n.prim == "print") {
      const StringV* s = std::get_if<StringV>(&args.at(0)->node);
      if (s == nullptr) stuck(e, "print of a non-string value");
      transcript_ += s->value;
      transcript_ += '\n';
      return make(UnitV{});
    }
    if (n.prim == "add") {
      const IntV* a = std::get_if<IntV>(&args.at(0)->node);
      const IntV* b = std::get_if<IntV>(&args.at(1)->node);
      if (a == nullptr || b == nullptr) stuck(e, "add of non-integer values");
      return make(IntV{a->value + b->value});
    }
    if (n.prim == "int_to_string") {
      const IntV* a = std::get_if<IntV>(&args.at(0)->node);
      if (a == nullptr) stuck(e, "int_to_string of a non-integer value");
      return make(StringV{std::to_string(a->value)});
    }
    if (n.prim == "exn_of_string") {
      const StringV* s = std::get_if<StringV>(&args.at(0)->node);
      if (s == nullptr) stuck(e, "exn_of_string of a non-string value");
      return make(ExnV{s->value});
    }
    if (n.prim == "exn_message") {
      const ExnV* x = std::get_if<ExnV>(&args.at(0)->node);
      if (x == nullptr) stuck(e, "exn_message of a non-exception value");
      return make(StringV{x->message});
    }
    stuck(e, "unknown primitive " + n.prim);
  }

  // Bind each builtin as a closure over an internal primitive node.  `add` is
  // curried through an ordinary lambda so partial application works.
  const EnvNode* install_builtins() {
    const EnvNode* env = nullptr;
    auto prim1 = [&](const std::string& name) {
      TermPtr body = mk_term(EPrim{name, {e_var("x")}});
      return make(ClosureV{"x", body, nullptr});
    };
    env = bind(env, "print", prim1("print"));
    TermPtr add_inner = mk_term(EPrim{"add", {e_var("a"), e_var("b")}});
    TermPtr add_lam = e_lam("b", nullptr, add_inner);
    env = bind(env, "add", make(ClosureV{"a", add_lam, nullptr}));
    env = bind(env, "int_to_string", prim1("int_to_string"));
    env = bind(env, "exn_of_string", prim1("exn_of_string"));
    env = bind(env, "exn_message", prim1("exn_message"));
    return env;
  }

  std::deque<Value> arena_;
  std::deque<EnvNode> env_arena_;
  Store store_;
  StepCounts counts_;
  std::string transcript_;
  std::map<std::string, std::string> ctor_adt_;
  const EnvNode* base_env_ = nullptr;
};

// ---------------------------------------------------------------------------
// Deep-recursion guard: run a closure on a thread with a large stack, so
// long object-language recursions (e.g. building a 10000-element list) do not
// overflow the default C++ stack.

namespace detail {

struct BigStackCall {
  const std::function<void()>* fn;
  std::exception_ptr error;
};

inline void* big_stack_trampoline(void* p) {
  BigStackCall* call = static_cast<BigStackCall*>(p);
  try {
    (*call->fn)();
  } catch (...) {
    call->error = std::current_exception();
  }
  return nullptr;
}

} // namespace detail

// Runs `fn` to completion on a fresh 512 MiB-stack thread and rethrows
// anything it threw on the calling thread.
inline void run_with_big_stack(const std::function<void()>& fn) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, 512u * 1024u * 1024u);
  detail::BigStackCall call{&fn, nullptr};
  pthread_t tid;
  int rc = pthread_create(&tid, &attr, detail::big_stack_trampoline, &call);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    // Could not spawn: fall back to the current stack.
    fn();
    return;
  }
  pthread_join(tid, nullptr);
  if (call.error) std::rethrow_exception(call.error);
}

} // namespace subwit

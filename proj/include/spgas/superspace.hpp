#pragma once

// Superfields over (x, t, theta1, theta2): covariant derivatives, supersymmetry
// generators, fermionic Taylor truncation, change of variables.

#include <functional>
#include <string>

#include "expr.hpp"

namespace spgas {

struct NonInvertibleMap : SpgasError {
  explicit NonInvertibleMap(const std::string& m) : SpgasError(m) {}
};

struct SuperCoords {
  std::shared_ptr<const SymRec> x, t, th1, th2;
};

inline SuperCoords std_coords(Workspace& ws) {
  SuperCoords c;
  c.x = ws.sym("x", SKind::BosonVar);
  c.t = ws.sym("t", SKind::BosonVar);
  c.th1 = ws.sym("theta1", SKind::FermiVar);
  c.th2 = ws.sym("theta2", SKind::FermiVar);
  return c;
}

inline Expr apply_D(int i, const Expr& e, const SuperCoords& c) {
  if (i == 1) return diff(e, *c.th1) + sym_expr(c.th1) * diff(e, *c.x);
  return diff(e, *c.th2) + sym_expr(c.th2) * diff(e, *c.t);
}

inline Expr apply_Q(int i, const Expr& e, const SuperCoords& c) {
  if (i == 1) return diff(e, *c.th1) - sym_expr(c.th1) * diff(e, *c.x);
  return diff(e, *c.th2) - sym_expr(c.th2) * diff(e, *c.t);
}

// The ten operator identities, checked on a family of superfields.  Each row
// reports its name and whether the identity held on every sample.
struct AlgebraIdentity {
  std::string name;
  bool pass;
};

inline std::vector<AlgebraIdentity> check_operator_algebra(
    const SuperCoords& c, const std::vector<Expr>& samples,
    const std::function<Expr(int, const Expr&)>& D_impl = {},
    const std::function<Expr(int, const Expr&)>& Q_impl = {}) {
  auto D = D_impl ? D_impl : [&c](int i, const Expr& e) { return apply_D(i, e, c); };
  auto Q = Q_impl ? Q_impl : [&c](int i, const Expr& e) { return apply_Q(i, e, c); };
  auto dx = [&c](const Expr& e) { return diff(e, *c.x); };
  auto dt = [&c](const Expr& e) { return diff(e, *c.t); };
  using Op = std::function<Expr(const Expr&)>;
  Op D1 = [&](const Expr& e) { return D(1, e); };
  Op D2 = [&](const Expr& e) { return D(2, e); };
  Op Q1 = [&](const Expr& e) { return Q(1, e); };
  Op Q2 = [&](const Expr& e) { return Q(2, e); };
  struct Row {
    std::string name;
    Op a, b;
    std::function<Expr(const Expr&)> rhs;
  };
  auto zero = [](const Expr&) { return Expr::zero(); };
  std::vector<Row> rows = {
      {"{Q1,Q1}=-2dx", Q1, Q1, [&](const Expr& e) { return scaled(dx(e), ParamRat(-2)); }},
      {"{Q2,Q2}=-2dt", Q2, Q2, [&](const Expr& e) { return scaled(dt(e), ParamRat(-2)); }},
      {"{D1,D1}=2dx", D1, D1, [&](const Expr& e) { return scaled(dx(e), ParamRat(2)); }},
      {"{D2,D2}=2dt", D2, D2, [&](const Expr& e) { return scaled(dt(e), ParamRat(2)); }},
      {"{D1,D2}=0", D1, D2, zero},
      {"{Q1,Q2}=0", Q1, Q2, zero},
      {"{D1,Q1}=0", D1, Q1, zero},
      {"{D1,Q2}=0", D1, Q2, zero},
      {"{D2,Q1}=0", D2, Q1, zero},
      {"{D2,Q2}=0", D2, Q2, zero},
  };
  std::vector<AlgebraIdentity> out;
  for (auto& r : rows) {
    bool ok = true;
    for (auto& e : samples) {
      Expr lhs = r.a(r.b(e)) + r.b(r.a(e));
      if (!(lhs == r.rhs(e))) {
        ok = false;
        break;
      }
    }
    out.push_back({r.name, ok});
  }
  return out;
}

// Multilinear expansion in the odd slots; even slots stay abstract.  Fresh
// components are functions of the even slots (constants when there are none)
// with parities forced so every term carries the parity of f.
inline Expr fermionic_taylor(Workspace& ws, const std::shared_ptr<const FuncRec>& f,
                             const std::vector<Expr>& args,
                             const std::function<std::string(unsigned)>& namer) {
  if (args.size() != f->slots.size()) throw SpgasError("arity mismatch in fermionic_taylor");
  std::vector<size_t> evens, odds;
  for (size_t i = 0; i < f->slots.size(); ++i)
    (f->slot_parity[i] ? odds : evens).push_back(i);
  for (auto i : odds) {
    auto p = args[i].parity();
    if (!p || *p != 1) throw ParityMismatch("odd slot argument must be odd: " + f->slots[i]);
  }
  std::vector<std::string> even_slot_names;
  for (auto i : evens) even_slot_names.push_back(f->slots[i]);
  Expr out;
  for (unsigned mask = 0; mask < (1u << odds.size()); ++mask) {
    int nbits = 0;
    for (unsigned b = 0; b < odds.size(); ++b)
      if (mask & (1u << b)) ++nbits;
    int par = (f->parity + nbits) & 1;
    std::string name = namer(mask);
    Expr comp;
    if (evens.empty()) {
      comp = sym_expr(ws.sym(name, par ? SKind::FermiParam : SKind::BosonParam));
    } else {
      auto cf = ws.func(name, par, even_slot_names);
      std::vector<Expr> cargs;
      for (auto i : evens) cargs.push_back(args[i]);
      comp = app_expr(cf, std::vector<uint32_t>(evens.size(), 0), std::move(cargs));
    }
    Expr term = comp;
    for (unsigned b = 0; b < odds.size(); ++b)
      if (mask & (1u << b)) term = term * args[odds[b]];
    out = out + term;
  }
  return out;
}

// Change of variables for reduction ansatze.  `defs` give each new coordinate
// in old variables; `inverse` rewrites old symbols (and bound superfield
// functions) in the new ones.
struct InvariantMap {
  std::vector<std::pair<std::shared_ptr<const SymRec>, Expr>> defs;
  Bindings inverse;

  // substituting inverse then forward definitions must fix every bound symbol
  void check_roundtrip() const {
    Bindings fwd;
    for (auto& [s, def] : defs) fwd.bind_sym(s, def);
    for (auto& [id, rep] : inverse.syms) {
      (void)rep;
      Expr back = substitute(substitute(sym_of(id), inverse), fwd);
      if (!(back == sym_of(id)))
        throw NonInvertibleMap("inverse bindings fail the roundtrip identity");
    }
  }

  std::function<Expr(uint32_t)> sym_of;  // id -> symbol expression (workspace lookup)
};

inline InvariantMap make_map(const Workspace& ws) {
  InvariantMap m;
  m.sym_of = [&ws](uint32_t id) { return sym_expr(ws.sym_by_id(id)); };
  return m;
}

inline Expr change_variables(const Expr& e, const InvariantMap& m) {
  m.check_roundtrip();
  return substitute(e, m.inverse);
}

}  // namespace spgas

#pragma once

// Invariant solutions.  Generators of the classified one-dimensional
// subalgebras acting on superspace extended by the two fiber variables,
// the invariants of each action, symmetry reduction of the system onto
// those invariants, comparison of reduced systems against recorded
// fixtures, and a catalog of closed-form solution families checked
// against the original equations.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prolong.hpp"

namespace spgas {

// ---------------------------------------------------------------------------
// Subalgebra generators on the fiber.

struct SubalgebraCoeffs {
  std::array<Expr, 4> C;  // dilation/translation weights over (L1, P1, L2, P2)
  std::array<Expr, 2> K;  // odd flow weights over (Q1, Q2)
};

// eps carries the sign twist of the mixed translation rows, kk the relative
// weight of the two dilations in the last row
inline SubalgebraCoeffs subalgebra_coefficients(int id, const Expr& mu, const Expr& nu,
                                                const ParamRat& eps, const ParamRat& kk) {
  Expr O = Expr::zero(), I = Expr::one();
  Expr ep = Expr::coeff(eps), kv = Expr::coeff(kk);
  SubalgebraCoeffs s{{O, O, O, O}, {O, O}};
  switch (id) {
    case 1: s.C[1] = I; break;
    case 2: s.K[0] = mu; break;
    case 3: s.C[1] = I; s.K[0] = mu; break;
    case 4: s.C[0] = I; break;
    case 5: s.C[3] = I; break;
    case 6: s.K[1] = nu; break;
    case 7: s.C[3] = I; s.K[1] = nu; break;
    case 8: s.C[2] = I; break;
    case 9: s.C[1] = I; s.C[3] = ep; break;
    case 10: s.C[1] = I; s.K[1] = nu; break;
    case 11: s.C[1] = I; s.C[3] = ep; s.K[1] = nu; break;
    case 12: s.C[1] = ep; s.C[2] = I; break;
    case 13: s.C[3] = I; s.K[0] = mu; break;
    case 14: s.K[0] = mu; s.K[1] = nu; break;
    case 15: s.C[3] = I; s.K[0] = mu; s.K[1] = nu; break;
    case 16: s.C[2] = I; s.K[0] = mu; break;
    case 17: s.C[1] = I; s.C[3] = ep; s.K[0] = mu; break;
    case 18: s.C[1] = I; s.K[0] = mu; s.K[1] = nu; break;
    case 19: s.C[1] = I; s.C[3] = ep; s.K[0] = mu; s.K[1] = nu; break;
    case 20: s.C[1] = ep; s.C[2] = I; s.K[0] = mu; break;
    case 21: s.C[0] = I; s.C[3] = ep; break;
    case 22: s.C[0] = I; s.K[1] = nu; break;
    case 23: s.C[0] = I; s.C[3] = ep; s.K[1] = nu; break;
    case 24: s.C[0] = I; s.C[2] = kv; break;
    default: throw SpgasError("subalgebra index out of range");
  }
  return s;
}

inline const std::vector<int>& standard_rows() {
  static const std::vector<int> r = {1, 3, 4, 5, 7, 8, 9, 10, 11, 12, 13, 16, 17, 20, 21, 22, 23, 24};
  return r;
}

inline const std::vector<int>& nonstandard_rows() {
  static const std::vector<int> r = {2, 6, 14, 15, 18, 19};
  return r;
}

inline const std::vector<int>& reducible_rows() {
  static const std::vector<int> r = {1, 3, 5, 8, 12, 16, 20, 24};
  return r;
}

inline bool row_uses_eps(int id) {
  return id == 9 || id == 11 || id == 12 || id == 17 || id == 19 || id == 20 || id == 21 || id == 23;
}

// ---------------------------------------------------------------------------
// Invariants of the generator action.

struct InvarianceRow {
  int id = 0;
  SuperCoords sc;
  std::shared_ptr<const SymRec> Wv, Pv;
  GeneralVectorField gen;
  std::vector<Expr> invariants;
};

// first-order action on functions of the coordinates and the fiber pair
inline Expr geometric_apply(const GeneralVectorField& v, const InvarianceRow& row, const Expr& F) {
  return v.xi * diff(F, *row.sc.x) + v.tau * diff(F, *row.sc.t) +
         v.rho1 * diff(F, *row.sc.th1) + v.rho2 * diff(F, *row.sc.th2) +
         v.lam * diff(F, *row.Wv) + v.om * diff(F, *row.Pv);
}

inline bool check_invariance(const InvarianceRow& row) {
  if (row.invariants.empty()) return false;
  for (auto& f : row.invariants)
    if (!geometric_apply(row.gen, row, f).is_zero()) return false;
  return true;
}

namespace detail {

struct RowBasis {
  InvarianceRow row;
  Expr x, t, th1, th2, W, P, mu, nu;
  ParamRat gam, kk, half, cg, dg;
};

inline RowBasis row_basis(Workspace& ws, int id, const Rat& eps_value) {
  RowBasis b;
  b.row.id = id;
  b.row.sc = std_coords(ws);
  b.row.Wv = ws.sym("W", SKind::BosonVar);
  b.row.Pv = ws.sym("P", SKind::BosonVar);
  b.x = sym_expr(b.row.sc.x);
  b.t = sym_expr(b.row.sc.t);
  b.th1 = sym_expr(b.row.sc.th1);
  b.th2 = sym_expr(b.row.sc.th2);
  b.W = sym_expr(b.row.Wv);
  b.P = sym_expr(b.row.Pv);
  b.mu = sym_expr(ws.sym("mu", SKind::FermiParam));
  b.nu = sym_expr(ws.sym("nu", SKind::FermiParam));
  b.gam = ParamRat::var(ws.sym("gamma", SKind::BosonParam)->id);
  b.kk = ParamRat::var(ws.sym("k", SKind::BosonParam)->id);
  b.half = ParamRat(Rat(1, 2));
  b.cg = (b.gam + ParamRat(5)) / (b.gam * ParamRat(2) + ParamRat(2));
  b.dg = (b.gam - ParamRat(3)) / (b.gam * ParamRat(2) + ParamRat(2));
  auto s = subalgebra_coefficients(id, b.mu, b.nu, ParamRat(eps_value), b.kk);
  b.row.gen = symmetry_family(b.row.sc, b.W, b.P, b.gam, s.C, s.K);
  return b;
}

}  // namespace detail

// invariants of the standard rows; rows mixing the two translations need a
// numeric sign twist, so eps enters as a rational value
inline InvarianceRow invariance_row(Workspace& ws, int id, const Rat& eps_value = Rat(1)) {
  auto b = detail::row_basis(ws, id, eps_value);
  Expr ep = Expr::num(eps_value);
  const Expr &x = b.x, &t = b.t, &th1 = b.th1, &th2 = b.th2, &W = b.W, &P = b.P;
  const Expr &mu = b.mu, &nu = b.nu;
  ParamRat half = b.half;
  Expr xm12 = gpow(x, ParamRat(0) - half), xm32 = gpow(x, ParamRat(Rat(-3, 2)));
  Expr tm12 = gpow(t, ParamRat(0) - half), tp12 = gpow(t, half);
  auto& inv = b.row.invariants;
  switch (id) {
    case 1: inv = {t, th1, th2, W, P}; break;
    case 3: inv = {t, th1 - mu * x, th2, W, P}; break;
    case 4: inv = {t, xm12 * th1, th2, xm32 * W, gpow(x, ParamRat(0) - b.cg) * P}; break;
    case 5: inv = {x, th1, th2, W, P}; break;
    case 7: inv = {x, th1, th2 - nu * t, W, P}; break;
    case 8: inv = {x, th1, tm12 * th2, tp12 * W, gpow(t, ParamRat(0) - b.dg) * P}; break;
    case 9: inv = {x - ep * t, th1, th2, W, P}; break;
    case 10: inv = {t + nu * th2 * x, th1, th2 - nu * x, W, P}; break;
    case 11: inv = {t - ep * x + nu * x * th2, th1, th2 - nu * x, W, P}; break;
    case 12:
      inv = {x - scaled(ep * ln_of(t), half), th1, tm12 * th2, tp12 * W,
             gpow(t, ParamRat(0) - b.dg) * P};
      break;
    case 13: inv = {x + mu * th1 * t, th1 - mu * t, th2, W, P}; break;
    case 16:
      inv = {x + scaled(mu * th1 * ln_of(t), half), th1 - scaled(mu * ln_of(t), half),
             tm12 * th2, tp12 * W, gpow(t, ParamRat(0) - b.dg) * P};
      break;
    case 17: inv = {ep * x - t + mu * t * th1, th1 - ep * mu * t, th2, W, P}; break;
    case 20:
      inv = {x + scaled(mu * th1 * ln_of(t), half) - scaled(ep * ln_of(t), half),
             th1 - scaled(mu * ln_of(t), half), tm12 * th2, tp12 * W,
             gpow(t, ParamRat(0) - b.dg) * P};
      break;
    case 21:
      inv = {t - scaled(ep * ln_of(x), half), xm12 * th1, th2, xm32 * W,
             gpow(x, ParamRat(0) - b.cg) * P};
      break;
    case 22:
      inv = {t + scaled(nu * th2 * ln_of(x), half), xm12 * th1,
             th2 - scaled(nu * ln_of(x), half), xm32 * W, gpow(x, ParamRat(0) - b.cg) * P};
      break;
    case 23:
      inv = {t + scaled(nu * th2 * ln_of(x), half) - scaled(ep * ln_of(x), half), xm12 * th1,
             th2 - scaled(nu * ln_of(x), half), xm32 * W, gpow(x, ParamRat(0) - b.cg) * P};
      break;
    case 24: {
      ParamRat ik = ParamRat(1) / b.kk;
      ParamRat eA = (b.kk - ParamRat(3)) / (b.kk * ParamRat(2));
      ParamRat eB = ((b.gam + ParamRat(5)) + b.kk * (b.gam - ParamRat(3))) /
                    (b.kk * ParamRat(2) * (b.gam + ParamRat(1)));
      inv = {gpow(t, ParamRat(0) - ik) * x, gpow(t, ParamRat(0) - ik * b.half) * th1,
             gpow(t, ParamRat(0) - b.half) * th2, gpow(t, eA) * W, gpow(t, ParamRat(0) - eB) * P};
      break;
    }
    default: throw SpgasError("row has no standard invariant set");
  }
  return b.row;
}

// rows whose only invariant is a nilpotent multiple of a free function of the
// coordinates left untouched by the flow
inline InvarianceRow nonstandard_row(Workspace& ws, int id, const Rat& eps_value = Rat(1)) {
  auto b = detail::row_basis(ws, id, eps_value);
  std::vector<std::string> slots;
  switch (id) {
    case 2:
    case 6:
    case 14: slots = {"x", "t", "theta1", "theta2", "W", "P"}; break;
    case 15: slots = {"x", "theta1", "theta2", "W", "P"}; break;
    case 18: slots = {"t", "theta1", "theta2", "W", "P"}; break;
    case 19: slots = {"theta1", "theta2", "W", "P"}; break;
    default: throw SpgasError("row has no nonstandard invariant");
  }
  auto fr = ws.func("F" + std::to_string(id), 0, slots);
  Expr mult = (id == 2) ? b.mu : (id == 6) ? b.nu : b.mu * b.nu;
  b.row.invariants = {mult * default_app(ws, fr)};
  return b.row;
}

inline bool nonstandard_invariant_check(const InvarianceRow& row) { return check_invariance(row); }

// ---------------------------------------------------------------------------
// Symmetry reduction.

struct ReducedSystem {
  Expr d1, d2;
  bool single() const { return d1.is_zero(); }
};

namespace detail {

struct AtomOrd {
  bool operator()(const AtomPtr& a, const AtomPtr& b) const { return atom_cmp(a, b) < 0; }
};

inline void collect_rec_apps(const Expr& e, const std::shared_ptr<const FuncRec>& rec,
                             std::map<AtomPtr, char, AtomOrd>& out) {
  for (auto& tm : e.t) {
    auto visit = [&](const AtomPtr& a, auto&& self) -> void {
      if (a->k == AKind::App) {
        if (a->fn->id == rec->id) out.emplace(a, 0);
        for (auto& ar : a->args)
          for (auto& itm : ar.t) {
            for (auto& f : itm.ev) self(f.a, self);
            for (auto& oa : itm.od) self(oa, self);
          }
      } else if (a->k == AKind::ExpF || a->k == AKind::LnF) {
        for (auto& itm : a->arg.t) {
          for (auto& f : itm.ev) self(f.a, self);
          for (auto& oa : itm.od) self(oa, self);
        }
      }
    };
    for (auto& f : tm.ev) visit(f.a, visit);
    for (auto& oa : tm.od) visit(oa, visit);
  }
}

// rewrite every derivative of `rec` taken at the composed arguments onto the
// record's default arguments; with drop_first the derivatives in the leading
// slot are vestigial and are removed
inline Expr to_default_args(const Workspace& ws, const Expr& e,
                            const std::shared_ptr<const FuncRec>& rec,
                            const std::vector<Expr>& composed, bool drop_first) {
  std::map<AtomPtr, char, AtomOrd> found;
  collect_rec_apps(e, rec, found);
  if (found.empty()) return e;
  std::vector<Expr> defaults;
  defaults.reserve(rec->slot_default.size());
  for (auto sd : rec->slot_default) defaults.push_back(default_arg_expr(ws, sd));
  Bindings B;
  for (auto& [a, tag] : found) {
    (void)tag;
    if (a->args.size() != composed.size())
      throw SpgasError("reduction met a record of unexpected arity: " + rec->name);
    for (size_t i = 0; i < composed.size(); ++i)
      if (!(a->args[i] == composed[i]))
        throw SpgasError("reduction met unexpected arguments on record " + rec->name);
    if (drop_first && a->dx[0] > 0)
      B.bind_atom(a, Expr::zero());
    else
      B.bind_atom(a, app_expr(rec, a->dx, defaults));
  }
  return substitute(e, B);
}

}  // namespace detail

// occurrence test at coefficient level only; record arguments are already in
// the reduced variables and are not inspected
inline bool coefficient_contains(const Expr& e, uint32_t id) {
  for (auto& tm : e.t) {
    for (auto& f : tm.ev) {
      if (f.a->k == AKind::Sym && f.a->sym->id == id) return true;
      if ((f.a->k == AKind::ExpF || f.a->k == AKind::LnF) && contains_sym(f.a->arg, id)) return true;
    }
    for (auto& oa : tm.od)
      if (oa->k == AKind::Sym && oa->sym->id == id) return true;
  }
  return false;
}

inline bool contains_log(const Expr& e) {
  for (auto& tm : e.t)
    for (auto& f : tm.ev)
      if (f.a->k == AKind::LnF) return true;
  return false;
}

// every term must carry one common power of s; that power is divided out
inline Expr strip_uniform_power(const Expr& e, const std::shared_ptr<const SymRec>& s) {
  if (e.is_zero()) return e;
  std::optional<ParamRat> common;
  for (auto& tm : e.t) {
    ParamRat p(0);
    for (auto& f : tm.ev)
      if (f.a->k == AKind::Sym && f.a->sym->id == s->id) p = p + f.e;
    if (!common)
      common = p;
    else if (!(p - *common).is_zero())
      throw SpgasError("reduction did not factor uniformly in " + s->name);
  }
  if (common->is_zero()) return e;
  return e * gpow(sym_expr(s), ParamRat(0) - *common);
}

inline std::string reduction_fixture(int id) {
  switch (id) {
    case 1: return "n1A";
    case 3: return "n3A";
    case 5: return "n5A";
    case 8: return "n8A";
    case 12: return "n12A";
    case 16: return "n16A";
    case 20: return "n20A";
    case 24: return "n24A";
    default: throw SpgasError("subalgebra has no recorded reduction");
  }
}

inline bool reduction_is_pair(int id) { return id == 1 || id == 3 || id == 5; }

// rows reduced at a fixed exponent; zero keeps the exponent symbolic
inline int reduction_gamma(int id) {
  if (id == 8 || id == 12 || id == 16 || id == 20) return 3;
  if (id == 24) return 2;
  return 0;
}

// recorded reduced systems abbreviate the x-derivative of a record composed
// with the slanted odd variable; expand the shorthand by the chain rule
inline Expr expand_slant_shorthand(const Expr& e, const std::shared_ptr<const FuncRec>& rec,
                                   const Expr& mu, size_t slant_slot) {
  std::map<AtomPtr, char, detail::AtomOrd> found;
  detail::collect_rec_apps(e, rec, found);
  Bindings B;
  for (auto& [a, tag] : found) {
    (void)tag;
    if (a->dx[0] == 0) continue;
    if (a->dx[0] != 1 || a->dx[slant_slot] != 0)
      throw SpgasError("unsupported derivative shorthand on record " + rec->name);
    auto nd = a->dx;
    nd[0] = 0;
    nd[slant_slot] = 1;
    B.bind_atom(a, Expr::zero() - mu * app_expr(rec, nd, a->args));
  }
  if (B.atoms.empty()) return e;
  return substitute(e, B);
}

// reduction of the system onto the invariants of one subalgebra; the
// workspace gains the reduced coordinates and profile records, shared by
// name with the corresponding fixture file
inline ReducedSystem reduce(Workspace& ws, int id) {
  SuperCoords sc = std_coords(ws);
  Expr x = sym_expr(sc.x), t = sym_expr(sc.t);
  Expr th1 = sym_expr(sc.th1), th2 = sym_expr(sc.th2);
  ParamRat half(Rat(1, 2));
  auto sym_gamma = [&] { return ParamRat::var(ws.sym("gamma", SKind::BosonParam)->id); };
  auto full_model = [&](const ParamRat& g) {
    return ModelParams{g, ParamRat::var(ws.sym("A", SKind::BosonParam)->id)};
  };
  auto const_pressure = [&] {
    return Expr::coeff(ParamRat::var(ws.sym("c0", SKind::BosonParam)->id));
  };
  // constant pressure kills the adiabatic term, so its constant is never used
  auto finish = [&](Expr d, const std::shared_ptr<const FuncRec>& rec,
                    const std::vector<Expr>& composed, const Bindings& coords,
                    const std::vector<std::shared_ptr<const SymRec>>& gone) {
    d = detail::to_default_args(ws, d, rec, composed, false);
    d = substitute(d, coords);
    for (auto& s : gone)
      if (coefficient_contains(d, s->id))
        throw SpgasError("reduction left the coordinate " + s->name);
    if (contains_log(d)) throw SpgasError("reduction left a logarithm");
    d = strip_uniform_power(d, sc.t);
    if (coefficient_contains(d, sc.t->id)) throw SpgasError("reduction left the coordinate t");
    return d;
  };
  switch (id) {
    case 1: {
      auto Wr = ws.func("W", 0, {"t", "theta1", "theta2"});
      auto Pr = ws.func("P", 0, {"t", "theta1", "theta2"});
      Residual R =
          residual(default_app(ws, Wr), default_app(ws, Pr), sc, full_model(sym_gamma()));
      return {R.d1, R.d2};
    }
    case 5: {
      auto Wr = ws.func("W", 0, {"x", "theta1", "theta2"});
      auto Pr = ws.func("P", 0, {"x", "theta1", "theta2"});
      Residual R =
          residual(default_app(ws, Wr), default_app(ws, Pr), sc, full_model(sym_gamma()));
      return {R.d1, R.d2};
    }
    case 3: {
      Expr mu = sym_expr(ws.sym("mu", SKind::FermiParam));
      auto tau1 = ws.sym("tau1", SKind::FermiVar);
      auto Wr = ws.func("W", 0, {"x", "t", "tau1", "theta2"});
      auto Pr = ws.func("P", 0, {"x", "t", "tau1", "theta2"});
      std::vector<Expr> comp{x, t, th1 - mu * x, th2};
      std::vector<uint32_t> z(4, 0);
      Residual R =
          residual(app_expr(Wr, z, comp), app_expr(Pr, z, comp), sc, full_model(sym_gamma()));
      Bindings coords;
      coords.bind_sym(sc.th1, sym_expr(tau1) + mu * x);
      auto norm = [&](Expr d) {
        d = detail::to_default_args(ws, d, Wr, comp, true);
        d = detail::to_default_args(ws, d, Pr, comp, true);
        d = substitute(d, coords);
        if (coefficient_contains(d, sc.x->id))
          throw SpgasError("reduction left the coordinate x");
        if (coefficient_contains(d, sc.th1->id))
          throw SpgasError("reduction left the coordinate theta1");
        return d;
      };
      return {norm(R.d1), norm(R.d2)};
    }
    case 8:
    case 12: {
      auto tau2 = ws.sym("tau2", SKind::FermiVar);
      Expr sg = x;
      std::vector<std::string> slots{"x", "theta1", "tau2"};
      if (id == 12) {
        ParamRat ep = ParamRat::var(ws.sym("eps", SKind::BosonParam)->id);
        ws.sym("sigma", SKind::BosonVar);
        sg = x - scaled(Expr::coeff(ep) * ln_of(t), half);
        slots = {"sigma", "theta1", "tau2"};
      }
      auto Ar = ws.func("A", 0, slots);
      std::vector<Expr> comp{sg, th1, gpow(t, ParamRat(0) - half) * th2};
      Expr W = gpow(t, ParamRat(0) - half) * app_expr(Ar, {0, 0, 0}, comp);
      Residual R = residual(W, const_pressure(), sc, ModelParams{ParamRat(3), ParamRat(1)});
      if (!R.d1.is_zero()) throw SpgasError("constant pressure row left a first component");
      Bindings coords;
      coords.bind_sym(sc.th2, gpow(t, half) * sym_expr(tau2));
      return {Expr::zero(), finish(R.d2, Ar, comp, coords, {sc.x, sc.th2})};
    }
    case 16:
    case 20: {
      Expr mu = sym_expr(ws.sym("mu", SKind::FermiParam));
      auto tau1 = ws.sym("tau1", SKind::FermiVar);
      auto tau2 = ws.sym("tau2", SKind::FermiVar);
      ws.sym("sigma", SKind::BosonVar);
      Expr sg = x + scaled(mu * th1 * ln_of(t), half);
      if (id == 20) {
        ParamRat ep = ParamRat::var(ws.sym("eps", SKind::BosonParam)->id);
        sg = sg - scaled(Expr::coeff(ep) * ln_of(t), half);
      }
      auto Ar = ws.func("A", 0, {"sigma", "tau1", "tau2"});
      std::vector<Expr> comp{sg, th1 - scaled(mu * ln_of(t), half),
                             gpow(t, ParamRat(0) - half) * th2};
      Expr W = gpow(t, ParamRat(0) - half) * app_expr(Ar, {0, 0, 0}, comp);
      Residual R = residual(W, const_pressure(), sc, ModelParams{ParamRat(3), ParamRat(1)});
      if (!R.d1.is_zero()) throw SpgasError("constant pressure row left a first component");
      Bindings coords;
      coords.bind_sym(sc.th1, sym_expr(tau1) + scaled(mu * ln_of(t), half));
      coords.bind_sym(sc.th2, gpow(t, half) * sym_expr(tau2));
      return {Expr::zero(), finish(R.d2, Ar, comp, coords, {sc.x, sc.th1, sc.th2})};
    }
    case 24: {
      auto sigma = ws.sym("sigma", SKind::BosonVar);
      auto tau1 = ws.sym("tau1", SKind::FermiVar);
      auto tau2 = ws.sym("tau2", SKind::FermiVar);
      const ParamRat k7(7);
      ParamRat ik = ParamRat(1) / k7;
      auto Ar = ws.func("A", 0, {"sigma", "tau1", "tau2"});
      std::vector<Expr> comp{gpow(t, ParamRat(0) - ik) * x,
                             gpow(t, ParamRat(0) - ik * half) * th1,
                             gpow(t, ParamRat(0) - half) * th2};
      ParamRat eA = (ParamRat(3) - k7) / (k7 * ParamRat(2));
      Expr W = gpow(t, eA) * app_expr(Ar, {0, 0, 0}, comp);
      Residual R = residual(W, const_pressure(), sc, ModelParams{ParamRat(2), ParamRat(1)});
      if (!R.d1.is_zero()) throw SpgasError("constant pressure row left a first component");
      Bindings coords;
      coords.bind_sym(sc.x, gpow(t, ik) * sym_expr(sigma));
      coords.bind_sym(sc.th1, gpow(t, ik * half) * sym_expr(tau1));
      coords.bind_sym(sc.th2, gpow(t, half) * sym_expr(tau2));
      return {Expr::zero(), finish(R.d2, Ar, comp, coords, {sc.x, sc.th1, sc.th2})};
    }
    default: throw SpgasError("subalgebra has no recorded reduction");
  }
}

// ---------------------------------------------------------------------------
// Comparison against recorded systems.

struct MatchReport {
  std::string status;  // "equal" | "unit" | "diff"
  ParamRat unit = ParamRat(1);
  std::vector<std::string> only_generated, only_recorded;
};

namespace detail {

inline bool same_monomial(const Term& a, const Term& b) {
  if (a.ev.size() != b.ev.size() || a.od.size() != b.od.size()) return false;
  for (size_t i = 0; i < a.ev.size(); ++i) {
    if (atom_cmp(a.ev[i].a, b.ev[i].a) != 0) return false;
    if (!(a.ev[i].e - b.ev[i].e).is_zero()) return false;
  }
  for (size_t i = 0; i < a.od.size(); ++i)
    if (atom_cmp(a.od[i], b.od[i]) != 0) return false;
  return true;
}

}  // namespace detail

// equal outright, equal after one overall unit, or a term-level difference;
// when a unit candidate exists the difference is taken against the rescaled
// record so that a single stray coefficient shows up alone
inline MatchReport compare_reduced(const Workspace& ws, const Expr& generated,
                                   const Expr& recorded) {
  MatchReport r;
  if (generated == recorded) {
    r.status = "equal";
    return r;
  }
  bool have_unit = false;
  ParamRat u(1);
  if (!generated.is_zero() && !recorded.is_zero()) {
    const Term& lead = generated.t.front();
    for (auto& ft : recorded.t) {
      if (!detail::same_monomial(lead, ft)) continue;
      u = lead.c / ft.c;
      have_unit = true;
      break;
    }
    if (have_unit && generated == scaled(recorded, u)) {
      r.status = "unit";
      r.unit = u;
      return r;
    }
  }
  r.status = "diff";
  if (have_unit) r.unit = u;
  Expr basis = have_unit ? scaled(recorded, u) : recorded;
  auto gs = term_strings(ws, generated), rs = term_strings(ws, basis);
  std::map<std::string, int> bag;
  for (auto& s : gs) bag[s]++;
  for (auto& s : rs) bag[s]--;
  for (auto& [s, n] : bag) {
    for (int i = 0; i < n; ++i) r.only_generated.push_back(s);
    for (int i = 0; i < -n; ++i) r.only_recorded.push_back(s);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form solution families.

struct FamilyResult {
  std::string id;
  std::string note;
  bool expects_zero = true;
  Expr W, P;
  Residual res;
  bool zero() const { return res.is_zero(); }
  bool ok() const { return zero() == expects_zero; }
};

inline const std::vector<std::string>& family_ids() {
  static const std::vector<std::string> ids = {
      "n1B",  "rtie1", "n5B",  "n5B-linear", "n9B",  "n9B-linear",  "n17B", "n10B",
      "n11B", "n13B",  "n21B", "n21B-free",  "n22B", "n22B-free",   "n3B",  "n3B-literal",
      "n3B-exp", "n4B", "n7B", "n7B-literal", "n23B", "n23B-exp"};
  return ids;
}

inline FamilyResult verify_family(Workspace& ws, const std::string& id) {
  SuperCoords sc = std_coords(ws);
  Expr x = sym_expr(sc.x), t = sym_expr(sc.t);
  Expr th1 = sym_expr(sc.th1), th2 = sym_expr(sc.th2);
  ParamRat gam = ParamRat::var(ws.sym("gamma", SKind::BosonParam)->id);
  ModelParams mp{gam, ParamRat::var(ws.sym("A", SKind::BosonParam)->id)};
  ParamRat half(Rat(1, 2));
  ParamRat cg = (gam + ParamRat(5)) / (gam * ParamRat(2) + ParamRat(2));
  auto fparam = [&](const char* n) { return sym_expr(ws.sym(n, SKind::FermiParam)); };
  auto bparam = [&](const char* n) {
    return Expr::coeff(ParamRat::var(ws.sym(n, SKind::BosonParam)->id));
  };
  auto odd_slot = [&](const char* n) { return ws.sym(n, SKind::FermiVar); };
  auto even_slot = [&](const char* n) { return ws.sym(n, SKind::BosonVar); };
  FamilyResult r;
  r.id = id;
  Expr W, P;
  if (id == "n1B") {
    auto Fr = ws.func("F", 0, {"theta1", "theta2"});
    auto Gr = ws.func("G", 0, {"theta1", "theta2"});
    W = default_app(ws, Fr);
    P = default_app(ws, Gr);
    r.note = "both components free in the odd pair";
  } else if (id == "rtie1") {
    W = bparam("C1") + fparam("C2") * th1 + fparam("C3") * th2 + bparam("C4") * th1 * th2;
    P = bparam("C5") + fparam("C6") * th1 + fparam("C7") * th2 + bparam("C8") * th1 * th2;
    r.note = "component form of the free odd-pair family";
  } else if (id == "n5B" || id == "n5B-linear") {
    Expr arg = (bparam("m1") - bparam("b1")) * th1 + (bparam("m2") - bparam("b2")) * th2;
    if (id == "n5B") {
      odd_slot("s1");
      W = app_expr(ws.func("F", 0, {"s1"}), {0}, {arg});
      P = app_expr(ws.func("G", 0, {"s1"}), {0}, {arg});
      r.note = "profiles of one odd combination; slope constants enter as even differences";
    } else {
      W = bparam("C0") + fparam("K1") * arg;
      P = bparam("C2") + fparam("K2") * arg;
      r.note = "linear truncation of the odd-combination profile";
    }
  } else if (id == "n9B" || id == "n9B-linear") {
    Expr arg = Expr::zero() - fparam("a1") * th1 - fparam("a2") * th2;
    if (id == "n9B") {
      even_slot("s0");
      W = app_expr(ws.func("F", 0, {"s0"}), {0}, {arg});
      P = app_expr(ws.func("G", 0, {"s0"}), {0}, {arg});
      r.note = "profiles of one even nilpotent combination";
    } else {
      W = bparam("C0") + bparam("C1") * arg;
      P = bparam("C2") + bparam("C3") * arg;
      r.note = "linear truncation; the slopes must be even to match the argument parity";
    }
  } else if (id == "n17B") {
    Expr mu = fparam("mu");
    odd_slot("s1");
    W = app_expr(ws.func("F", 0, {"s1"}), {0}, {th2}) + mu * th1;
    P = app_expr(ws.func("G", 0, {"s1"}), {0}, {th2}) + mu * th1;
    r.note = "free profiles of the second odd coordinate shifted by the odd flow constant";
  } else if (id == "n10B") {
    Expr mu = fparam("mu"), nu = fparam("nu"), eta = fparam("eta"), lam = fparam("lam");
    odd_slot("s1");
    Expr u = th2 - nu * x;
    W = app_expr(ws.func("F", 0, {"s1"}), {0}, {th1}) + mu * eta * u;
    P = app_expr(ws.func("G", 0, {"s1"}), {0}, {th1}) + mu * lam * u;
    r.note = "translated odd coordinate enters through nilpotent constant pairs";
  } else if (id == "n11B") {
    Expr nu = fparam("nu"), m2 = fparam("mu"), l2 = fparam("lam");
    odd_slot("s1");
    Expr u = th2 - nu * x;
    W = app_expr(ws.func("F", 0, {"s1"}), {0}, {th1}) + m2 * u;
    P = app_expr(ws.func("G", 0, {"s1"}), {0}, {th1}) + l2 * u;
    r.note = "translated odd coordinate with free odd slopes";
  } else if (id == "n13B") {
    Expr mu = fparam("mu"), eta = fparam("eta"), nu2 = fparam("nu"), lam = fparam("lam"),
         kap = fparam("kap");
    odd_slot("s1");
    W = app_expr(ws.func("F", 0, {"s1"}), {0}, {th2}) + mu * eta * th1 + mu * nu2 * x;
    P = app_expr(ws.func("G", 0, {"s1"}), {0}, {th2}) + mu * lam * th1 + mu * kap * x;
    r.note = "profiles of the second odd coordinate with nilpotent linear tails";
  } else if (id == "n21B" || id == "n21B-free") {
    Expr mu = fparam("mu"), nu = fparam("nu");
    Expr e1 = fparam("eta1");
    Expr e2 = (id == "n21B") ? e1 : fparam("eta2");
    odd_slot("s1");
    auto Fr = ws.func("F", 0, {"s1"});
    auto Gr = ws.func("G", 0, {"s1"});
    W = mu * x * th1 + gpow(x, ParamRat(Rat(3, 2))) * e1 * app_expr(Fr, {0}, {th2});
    P = nu * gpow(x, cg - half) * th1 + gpow(x, cg) * e2 * app_expr(Gr, {0}, {th2});
    r.expects_zero = (id == "n21B");
    r.note = (id == "n21B")
                 ? "scaling profiles; the two odd profile constants must coincide"
                 : "independent odd profile constants leave cross terms; see the tied variant";
  } else if (id == "n22B" || id == "n22B-free") {
    Expr mu = fparam("mu"), nu = fparam("nu"), zeta = fparam("zeta");
    Expr eta = fparam("eta");
    Expr rho = (id == "n22B") ? eta : fparam("rho");
    Expr lnx = ln_of(x);
    W = mu * x * th1 + gpow(x, ParamRat(Rat(3, 2))) * eta * th2 -
        scaled(gpow(x, ParamRat(Rat(3, 2))) * lnx * eta * nu, half);
    P = zeta * gpow(x, cg - half) * th1 + gpow(x, cg) * rho * th2 -
        scaled(gpow(x, cg) * lnx * rho * nu, half);
    r.expects_zero = (id == "n22B");
    r.note = (id == "n22B")
                 ? "logarithmic scaling pair; the two odd profile constants must coincide"
                 : "independent odd profile constants leave cross terms; see the tied variant";
  } else if (id == "n3B" || id == "n3B-literal" || id == "n3B-exp") {
    Expr mu = fparam("mu");
    auto s1 = odd_slot("s1");
    auto s2 = odd_slot("s2");
    auto Fr = ws.func("F", 0, {"s1", "s2"});
    auto Gr = ws.func("G", 0, {"s1", "s2"});
    Expr u1 = th1 - mu * x, u2 = th2 + mu * t;
    auto F = [&](uint32_t a, uint32_t b) { return app_expr(Fr, {a, b}, {u1, u2}); };
    auto G = [&](uint32_t a, uint32_t b) { return app_expr(Gr, {a, b}, {u1, u2}); };
    Expr f1, g1;
    if (id == "n3B-literal") {
      f1 = scaled(F(1, 1) * F(1, 0), ParamRat(2)) - F(0, 1);
      g1 = G(1, 1) * F(1, 0) + scaled(G(1, 0) * G(1, 1), ParamRat(2)) - G(0, 1);
      r.expects_zero = false;
      r.note = "recorded drift constraints; both components keep residual terms";
    } else {
      f1 = F(1, 1) * F(1, 0) - F(0, 1);
      g1 = G(1, 0) * F(1, 1) + G(1, 1) * F(1, 0) - G(0, 1);
      r.note = "drift constraints fixed by the equations themselves";
    }
    W = mu * t * f1 + F(0, 0);
    P = mu * t * g1 + G(0, 0);
    if (id == "n3B-exp") {
      ParamRat kv = ParamRat::var(ws.sym("k", SKind::BosonParam)->id);
      ParamRat lv = ParamRat::var(ws.sym("l", SKind::BosonParam)->id);
      Bindings bf;
      bf.bind_func(Fr, {s1, s2}, Expr::one() + Expr::coeff(kv) * sym_expr(s1) * sym_expr(s2));
      bf.bind_func(Gr, {s1, s2}, Expr::one() + Expr::coeff(lv) * sym_expr(s1) * sym_expr(s2));
      W = substitute(W, bf);
      P = substitute(P, bf);
      r.note = "exponential profiles in the slanted odd pair";
    }
  } else if (id == "n4B") {
    Expr mu = fparam("mu"), nu = fparam("nu");
    W = gpow(x, ParamRat(Rat(3, 2))) * mu * th2;
    P = gpow(x, cg) * nu * th2;
    r.note = "pure scaling monomials in the second odd coordinate";
  } else if (id == "n7B" || id == "n7B-literal") {
    Expr mu = fparam("mu"), nu = fparam("nu");
    ParamRat kv = ParamRat::var(ws.sym("k", SKind::BosonParam)->id);
    odd_slot("s1");
    Expr base = (id == "n7B") ? x : t;
    Expr arg = mu * base + Expr::coeff(kv) * th1 + mu * nu * th2;
    W = app_expr(ws.func("G", 0, {"s1"}), {0}, {arg});
    P = app_expr(ws.func("F", 0, {"s1"}), {0}, {arg});
    r.expects_zero = (id == "n7B");
    r.note = (id == "n7B")
                 ? "profiles of one odd slanted combination built on x"
                 : "recorded argument built on t leaves drift terms in both components";
  } else if (id == "n23B" || id == "n23B-exp") {
    Expr mu = fparam("mu"), nu = fparam("nu"), eta = fparam("eta"), alp = fparam("alpha");
    ParamRat ep = ParamRat::var(ws.sym("eps", SKind::BosonParam)->id);
    auto s0 = even_slot("s0");
    auto Fr = ws.func("F", 0, {"s0"});
    Expr lnx = ln_of(x);
    Expr sg = t + scaled(nu * th2 * lnx, half) - scaled(Expr::coeff(ep) * lnx, half);
    W = mu * gpow(x, ParamRat(Rat(3, 2))) * app_expr(Fr, {0}, {sg});
    P = eta * gpow(x, cg) * alp;
    if (id == "n23B-exp") {
      ParamRat kv = ParamRat::var(ws.sym("k", SKind::BosonParam)->id);
      Bindings bf;
      bf.bind_func(Fr, {s0}, exp_of(Expr::zero() - Expr::coeff(kv) * sym_expr(s0)));
      W = substitute(W, bf);
    }
    r.expects_zero = false;
    r.note = "recorded scaling ansatz; the time drift of the first component never cancels";
  } else {
    throw SpgasError("unknown family: " + id);
  }
  r.W = W;
  r.P = P;
  r.res = residual(W, P, sc, mp);
  return r;
}

// ---------------------------------------------------------------------------
// Structure checks on concrete solutions.

// expansion of a record over two odd slots through its corner derivatives
inline Expr odd_taylor(const std::shared_ptr<const FuncRec>& f, const Expr& a1, const Expr& a2) {
  std::vector<Expr> at0{Expr::zero(), Expr::zero()};
  Expr c0 = app_expr(f, {0, 0}, at0);
  Expr c1 = app_expr(f, {1, 0}, at0);
  Expr c2 = app_expr(f, {0, 1}, at0);
  Expr c12 = app_expr(f, {1, 1}, at0);
  return c0 + a1 * c1 + a2 * c2 + a1 * a2 * c12;
}

struct DerivativeProfile {
  std::array<std::array<bool, 4>, 2> nz{};
  int active_rows() const {
    int n = 0;
    for (auto& row : nz) {
      for (bool b : row)
        if (b) {
          ++n;
          break;
        }
    }
    return n;
  }
  int active_cols() const {
    int n = 0;
    for (int c = 0; c < 4; ++c)
      if (nz[0][c] || nz[1][c]) ++n;
    return n;
  }
};

// which coordinate directions move each component of the pair
inline DerivativeProfile derivative_profile(const SuperCoords& sc, const Expr& W, const Expr& P) {
  const SymRec* dirs[4] = {sc.x.get(), sc.t.get(), sc.th1.get(), sc.th2.get()};
  DerivativeProfile pr;
  for (int c = 0; c < 4; ++c) {
    pr.nz[0][c] = !diff(W, *dirs[c]).is_zero();
    pr.nz[1][c] = !diff(P, *dirs[c]).is_zero();
  }
  return pr;
}

}  // namespace spgas

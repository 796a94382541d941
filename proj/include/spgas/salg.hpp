#pragma once

// The six-generator Lie superalgebra of the model: graded brackets computed
// by composing the concrete vector fields, the supercommutation table,
// conjugation orbits, cocycle reduction, and the subalgebra catalog.

#include <array>
#include <string>
#include <vector>

#include "parser.hpp"
#include "superspace.hpp"

namespace spgas {

// coefficients over the ordered basis (L1, P1, Q1, L2, P2, Q2)
struct AlgebraElement {
  std::array<Expr, 6> c{};
  bool operator==(const AlgebraElement& o) const {
    for (int i = 0; i < 6; ++i)
      if (!(c[i] == o.c[i])) return false;
    return true;
  }
  bool operator!=(const AlgebraElement& o) const { return !(*this == o); }
  bool is_zero() const {
    for (auto& e : c)
      if (!e.is_zero()) return false;
    return true;
  }
  AlgebraElement operator+(const AlgebraElement& o) const {
    AlgebraElement r;
    for (int i = 0; i < 6; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  AlgebraElement operator-(const AlgebraElement& o) const {
    AlgebraElement r;
    for (int i = 0; i < 6; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
};

inline AlgebraElement scale_elem(const Expr& s, const AlgebraElement& x) {
  AlgebraElement r;
  for (int i = 0; i < 6; ++i) r.c[i] = s * x.c[i];
  return r;
}

struct SalgContext {
  Workspace& ws;
  SuperCoords sc;
  std::shared_ptr<const SymRec> Wv, Pv, s;
  std::shared_ptr<const SymRec> gamma, mu, nu, eps, twist_k;
  std::array<std::shared_ptr<const SymRec>, 6> coord;
  std::array<std::string, 6> bname;
  std::array<int, 6> bpar;
  std::array<std::array<Expr, 6>, 6> act;  // act[generator][coordinate]
  explicit SalgContext(Workspace& w) : ws(w) {}
};

inline SalgContext make_salg(Workspace& ws) {
  SalgContext ctx(ws);
  ctx.sc = std_coords(ws);
  ctx.Wv = ws.sym("W", SKind::BosonVar);
  ctx.Pv = ws.sym("P", SKind::BosonVar);
  ctx.s = ws.sym("s", SKind::BosonVar);
  ctx.gamma = ws.sym("gamma", SKind::BosonParam);
  ctx.mu = ws.sym("mu", SKind::FermiParam);
  ctx.nu = ws.sym("nu", SKind::FermiParam);
  ctx.eps = ws.sym("eps", SKind::BosonParam);
  ctx.twist_k = ws.sym("k", SKind::BosonParam);
  ctx.coord = {ctx.sc.x, ctx.sc.t, ctx.sc.th1, ctx.sc.th2, ctx.Wv, ctx.Pv};
  ctx.bname = {"L1", "P1", "Q1", "L2", "P2", "Q2"};
  ctx.bpar = {0, 0, 1, 0, 0, 1};
  ParamRat g = ParamRat::var(ctx.gamma->id);
  Expr x = sym_expr(ctx.sc.x), t = sym_expr(ctx.sc.t);
  Expr th1 = sym_expr(ctx.sc.th1), th2 = sym_expr(ctx.sc.th2);
  Expr W = sym_expr(ctx.Wv), P = sym_expr(ctx.Pv);
  for (auto& row : ctx.act)
    for (auto& e : row) e = Expr::zero();
  // dilations
  ctx.act[0][0] = scaled(x, ParamRat(2));
  ctx.act[0][2] = th1;
  ctx.act[0][4] = scaled(W, ParamRat(3));
  ctx.act[0][5] = scaled(P, (g + ParamRat(5)) / (g + ParamRat(1)));
  ctx.act[3][1] = scaled(t, ParamRat(2));
  ctx.act[3][3] = th2;
  ctx.act[3][4] = -W;
  ctx.act[3][5] = scaled(P, (g - ParamRat(3)) / (g + ParamRat(1)));
  // translations
  ctx.act[1][0] = Expr::one();
  ctx.act[4][1] = Expr::one();
  // supersymmetries
  ctx.act[2][0] = -th1;
  ctx.act[2][2] = Expr::one();
  ctx.act[5][1] = -th2;
  ctx.act[5][3] = Expr::one();
  return ctx;
}

inline AlgebraElement basis_elem(int i) {
  AlgebraElement r;
  r.c[i] = Expr::one();
  return r;
}

// the element as a concrete vector field: its value on each coordinate
inline std::array<Expr, 6> element_vf(const SalgContext& ctx, const AlgebraElement& x) {
  std::array<Expr, 6> a;
  for (int j = 0; j < 6; ++j) {
    a[j] = Expr::zero();
    for (int i = 0; i < 6; ++i) a[j] = a[j] + x.c[i] * ctx.act[i][j];
  }
  return a;
}

inline Expr vf_apply(const SalgContext& ctx, const std::array<Expr, 6>& a, const Expr& e) {
  Expr out = Expr::zero();
  for (int j = 0; j < 6; ++j)
    if (!a[j].is_zero()) out = out + a[j] * diff(e, *ctx.coord[j]);
  return out;
}

inline int vf_parity(const SalgContext& ctx, const std::array<Expr, 6>& a) {
  int found = -1;
  for (int j = 0; j < 6; ++j) {
    if (a[j].is_zero()) continue;
    auto p = a[j].parity();
    if (!p) throw SpgasError("vector field with a mixed-parity coefficient");
    int pj = (*p + ctx.coord[j]->parity()) & 1;
    if (found < 0)
      found = pj;
    else if (found != pj)
      throw SpgasError("vector field is not parity-homogeneous");
  }
  return found < 0 ? 0 : found;
}

inline int element_parity(const SalgContext& ctx, const AlgebraElement& x) {
  int found = -1;
  for (int i = 0; i < 6; ++i) {
    if (x.c[i].is_zero()) continue;
    auto p = x.c[i].parity();
    if (!p) throw SpgasError("algebra element with a mixed-parity coefficient");
    int pi = (*p + ctx.bpar[i]) & 1;
    if (found < 0)
      found = pi;
    else if (found != pi)
      throw SpgasError("algebra element is not parity-homogeneous");
  }
  return found < 0 ? 0 : found;
}

// express a concrete vector field over the six basis fields; throws when the
// field lies outside their span
inline AlgebraElement to_basis(const SalgContext& ctx, const std::array<Expr, 6>& a) {
  Bindings at0;
  for (auto& cs : ctx.coord) at0.bind_sym(cs, Expr::zero());
  AlgebraElement r;
  r.c[0] = scaled(diff(a[0], *ctx.coord[0]), ParamRat(Rat(1, 2)));
  r.c[1] = substitute(a[0], at0);
  r.c[2] = substitute(a[2], at0);
  r.c[3] = scaled(diff(a[1], *ctx.coord[1]), ParamRat(Rat(1, 2)));
  r.c[4] = substitute(a[1], at0);
  r.c[5] = substitute(a[3], at0);
  auto back = element_vf(ctx, r);
  for (int j = 0; j < 6; ++j)
    if (!(back[j] == a[j])) throw SpgasError("vector field outside the six-generator span");
  return r;
}

inline AlgebraElement graded_bracket(const SalgContext& ctx, const AlgebraElement& X,
                                     const AlgebraElement& Y) {
  auto ax = element_vf(ctx, X), ay = element_vf(ctx, Y);
  int px = vf_parity(ctx, ax), py = vf_parity(ctx, ay);
  bool anti = px == 1 && py == 1;
  std::array<Expr, 6> br;
  for (int j = 0; j < 6; ++j) {
    Expr xy = vf_apply(ctx, ax, ay[j]);
    Expr yx = vf_apply(ctx, ay, ax[j]);
    br[j] = anti ? xy + yx : xy - yx;
  }
  return to_basis(ctx, br);
}

// second path: bracket through stored structure constants
using BracketTable = std::array<std::array<AlgebraElement, 6>, 6>;

inline AlgebraElement bracket_sc(const SalgContext& ctx, const AlgebraElement& X,
                                 const AlgebraElement& Y, const BracketTable& tab) {
  AlgebraElement out;
  for (auto& e : out.c) e = Expr::zero();
  for (int i = 0; i < 6; ++i) {
    if (X.c[i].is_zero()) continue;
    for (int j = 0; j < 6; ++j) {
      if (Y.c[j].is_zero()) continue;
      auto pd = Y.c[j].parity();
      if (!pd) throw SpgasError("mixed-parity coefficient in structure-constant bracket");
      // moving the second coefficient across the first basis field
      Expr cd = X.c[i] * Y.c[j];
      if (ctx.bpar[i] && *pd) cd = -cd;
      for (int k2 = 0; k2 < 6; ++k2) out.c[k2] = out.c[k2] + cd * tab[i][j].c[k2];
    }
  }
  return out;
}

inline BracketTable build_table(const SalgContext& ctx) {
  BracketTable t;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) t[i][j] = graded_bracket(ctx, basis_elem(i), basis_elem(j));
  return t;
}

// fixture helpers: table entries and orbit claims are expressions over six
// symbols named after the basis fields
inline AlgebraElement elem_from_expr(const SalgContext& ctx, const Expr& e,
                                     const std::array<std::shared_ptr<const SymRec>, 6>& bs) {
  AlgebraElement r;
  for (int i = 0; i < 6; ++i) r.c[i] = grade_involution(diff(e, *bs[i]));
  Expr back = Expr::zero();
  for (int i = 0; i < 6; ++i) back = back + r.c[i] * sym_expr(bs[i]);
  if (!(back == e)) throw SpgasError("expression is not linear over the basis fields");
  return r;
}

inline Expr elem_to_expr(const SalgContext& ctx, const AlgebraElement& x,
                         const std::array<std::shared_ptr<const SymRec>, 6>& bs) {
  Expr out = Expr::zero();
  for (int i = 0; i < 6; ++i) out = out + x.c[i] * sym_expr(bs[i]);
  return out;
}

inline std::array<std::shared_ptr<const SymRec>, 6> basis_syms(Workspace& ws) {
  return {ws.sym("L1", SKind::BosonVar), ws.sym("P1", SKind::BosonVar),
          ws.sym("Q1", SKind::FermiVar), ws.sym("L2", SKind::BosonVar),
          ws.sym("P2", SKind::BosonVar), ws.sym("Q2", SKind::FermiVar)};
}

inline BracketTable table_from_fixture(const SalgContext& ctx, const Parser::Fixture& fx,
                                       const std::array<std::shared_ptr<const SymRec>, 6>& bs) {
  BracketTable t;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      t[i][j] = elem_from_expr(ctx, fx.at(ctx.bname[i] + "," + ctx.bname[j]), bs);
  return t;
}

namespace detail {

// a pure-coefficient expression, or throws
inline ParamRat expr_coeff(const Expr& e) {
  if (e.is_zero()) return ParamRat(0);
  if (e.t.size() != 1 || !e.t[0].ev.empty() || !e.t[0].od.empty())
    throw SpgasError("expected a pure coefficient");
  return e.t[0].c;
}

// definite integral of u^m e^(lam*u) over [0, end]
inline Expr power_exp_integral(long m, const ParamRat& lam, const Expr& end) {
  if (lam.is_zero())
    return scaled(gpow(end, ParamRat(m + 1)), ParamRat(Rat(1, m + 1)));
  // antiderivative e^(lam*u) G_m(u), G_m = u^m/lam - (m/lam) G_{m-1}
  std::function<Expr(long, const Expr&)> G = [&](long mm, const Expr& v) -> Expr {
    if (mm == 0) return Expr::coeff(ParamRat(1) / lam);
    Expr vm = scaled(gpow(v, ParamRat(mm)), ParamRat(1) / lam);
    return vm - scaled(G(mm - 1, v), ParamRat(mm) / lam);
  };
  Expr at_end = exp_of(scaled(end, lam)) * G(m, end);
  return at_end - G(m, Expr::zero());
}

}  // namespace detail

// integral over [0, s] of an expression whose terms are coefficients times
// s^m times at most one exponential linear in s
inline Expr integrate_poly_exp(const Expr& f, const std::shared_ptr<const SymRec>& s) {
  Expr sE = sym_expr(s);
  Expr total = Expr::zero();
  for (const auto& tm : f.t) {
    long m = 0;
    ParamRat lam(0);
    std::vector<EFactor> keep;
    for (const auto& ef : tm.ev) {
      if (ef.a->k == AKind::Sym && ef.a->sym && ef.a->sym->id == s->id) {
        auto iv = ef.e.try_integer();
        if (!iv || *iv <= 0) throw SpgasError("integral: unsupported power of the flow variable");
        m = static_cast<long>(*iv);
      } else if (ef.a->k == AKind::ExpF && contains_sym(ef.a->arg, s->id)) {
        lam = detail::expr_coeff(diff(ef.a->arg, *s));
        if (!(ef.a->arg == scaled(sE, lam)))
          throw SpgasError("integral: exponential argument not linear in the flow variable");
      } else {
        if (atom_contains_sym(ef.a, s->id))
          throw SpgasError("integral: unsupported dependence on the flow variable");
        keep.push_back(ef);
      }
    }
    for (const auto& oa : tm.od)
      if (atom_contains_sym(oa, s->id))
        throw SpgasError("integral: unsupported dependence on the flow variable");
    Term rest;
    rest.c = ParamRat(1);
    rest.ev = keep;
    rest.od = tm.od;
    Expr restE = Expr::from_terms({rest});
    total = total + scaled(detail::power_exp_integral(m, lam, sE) * restE, tm.c);
  }
  return total;
}

// exp(u ad_B) for a bosonic body B = a0 L1 + a1 P1 + a3 L2 + a4 P2, applied
// to an element; closed form on this solvable algebra
inline AlgebraElement flow_apply(const SalgContext& ctx, const std::array<ParamRat, 6>& body,
                                 const Expr& u, const AlgebraElement& x) {
  if (!body[2].is_zero() || !body[5].is_zero())
    throw SpgasError("flow body must lie on the even generators");
  auto eu = [&](const ParamRat& cc) {
    return cc.is_zero() ? Expr::one() : exp_of(scaled(u, cc));
  };
  auto mix = [&](const ParamRat& al, const ParamRat& be) {
    // solves c' = 2 be - 2 al c, c(0) = 0
    if (al.is_zero()) return scaled(u, be * ParamRat(2));
    return scaled(Expr::one() - eu(ParamRat(-2) * al), be / al);
  };
  AlgebraElement r;
  for (auto& e : r.c) e = Expr::zero();
  r.c[0] = x.c[0];
  r.c[1] = x.c[0] * mix(body[0], body[1]) + x.c[1] * eu(ParamRat(-2) * body[0]);
  r.c[2] = x.c[2] * eu(-body[0]);
  r.c[3] = x.c[3];
  r.c[4] = x.c[3] * mix(body[3], body[4]) + x.c[4] * eu(ParamRat(-2) * body[3]);
  r.c[5] = x.c[5] * eu(-body[3]);
  return r;
}

// exp(ad_Y) X: the bosonic body of Y is exponentiated in closed form; the
// nilpotent remainder enters through a fixed-point interaction-picture
// iteration whose series truncates
inline AlgebraElement adjoint_orbit(const SalgContext& ctx, const AlgebraElement& Y,
                                    const AlgebraElement& X) {
  if (element_parity(ctx, Y) != 0)
    throw SpgasError("conjugation requires an even element");
  std::array<ParamRat, 6> body{};
  std::array<ParamRat, 6> nbody{};
  AlgebraElement soul;
  for (int i = 0; i < 6; ++i) {
    auto [b, sl] = body_soul(Y.c[i]);
    soul.c[i] = sl;
    body[i] = detail::expr_coeff(b);
    nbody[i] = -body[i];
  }
  Expr sE = sym_expr(ctx.s);
  AlgebraElement Z = X;
  if (!soul.is_zero()) {
    bool settled = false;
    for (int it = 0; it < 64 && !settled; ++it) {
      AlgebraElement W1 = flow_apply(ctx, body, sE, Z);
      AlgebraElement Br = graded_bracket(ctx, soul, W1);
      AlgebraElement Pb = flow_apply(ctx, nbody, sE, Br);
      AlgebraElement Zn = X;
      for (int i = 0; i < 6; ++i) Zn.c[i] = Zn.c[i] + integrate_poly_exp(Pb.c[i], ctx.s);
      settled = Zn == Z;
      Z = Zn;
    }
    if (!settled) throw SpgasError("conjugation series did not stabilize");
  }
  Bindings s1;
  s1.bind_sym(ctx.s, Expr::one());
  AlgebraElement Z1;
  for (int i = 0; i < 6; ++i) Z1.c[i] = substitute(Z.c[i], s1);
  return flow_apply(ctx, body, Expr::one(), Z1);
}

// conjugation correction removing the P1/Q1 tail of L1 + a1 P1 + a2 Q1
inline AlgebraElement cocycle_reduce(const SalgContext& ctx, const AlgebraElement& V) {
  if (!(V.c[0] == Expr::one()) || !V.c[3].is_zero() || !V.c[4].is_zero() || !V.c[5].is_zero())
    throw SpgasError("cocycle reduction expects L1 plus a P1/Q1 tail");
  Expr a1 = V.c[1], a2 = V.c[2];
  Expr lam1 = scaled(a1, ParamRat(Rat(-1, 2)));
  Expr lam2 = -a2;
  AlgebraElement corr1 = graded_bracket(ctx, basis_elem(1), basis_elem(0));
  AlgebraElement corr2 = graded_bracket(ctx, basis_elem(2), basis_elem(0));
  return V + scale_elem(lam1, corr1) + scale_elem(lam2, corr2);
}

struct SubalgebraSpec {
  int index;
  std::string id;
  AlgebraElement gen;
  std::vector<std::string> params;
  std::string note;
};

inline std::vector<SubalgebraSpec> catalog(const SalgContext& ctx) {
  Expr mu = sym_expr(ctx.mu), nu = sym_expr(ctx.nu);
  Expr ep = Expr::coeff(ParamRat::var(ctx.eps->id));
  Expr kk = Expr::coeff(ParamRat::var(ctx.twist_k->id));
  auto el = [&](std::initializer_list<std::pair<int, Expr>> parts) {
    AlgebraElement r;
    for (auto& [i, e] : parts) r.c[i] = r.c[i] + e;
    return r;
  };
  Expr one = Expr::one();
  std::vector<SubalgebraSpec> out;
  auto add = [&](int n, AlgebraElement g, std::vector<std::string> ps, std::string note) {
    out.push_back({n, "L" + std::to_string(n), std::move(g), std::move(ps), std::move(note)});
  };
  add(1, el({{1, one}}), {}, "x-translation");
  add(2, el({{2, mu}}), {"mu"}, "first supersymmetry direction");
  add(3, el({{1, one}, {2, mu}}), {"mu"}, "x-translation twisted with the first supersymmetry");
  add(4, el({{0, one}}), {}, "first dilation");
  add(5, el({{4, one}}), {}, "t-translation");
  add(6, el({{5, nu}}), {"nu"}, "second supersymmetry direction");
  add(7, el({{4, one}, {5, nu}}), {"nu"}, "t-translation twisted with the second supersymmetry");
  add(8, el({{3, one}}), {}, "second dilation");
  add(9, el({{1, one}, {4, ep}}), {"eps"},
      "twist of the two translations; the ratio rescales by any positive real, leaving only its sign");
  add(10, el({{1, one}, {5, nu}}), {"nu"}, "x-translation with the second supersymmetry");
  add(11, el({{1, one}, {4, ep}, {5, nu}}), {"eps", "nu"},
      "both translations with the second supersymmetry");
  add(12, el({{3, one}, {1, ep}}), {"eps"}, "second dilation with an x-translation");
  add(13, el({{4, one}, {2, mu}}), {"mu"}, "t-translation with the first supersymmetry");
  add(14, el({{2, mu}, {5, nu}}), {"mu", "nu"}, "both supersymmetry directions");
  add(15, el({{4, one}, {2, mu}, {5, nu}}), {"mu", "nu"},
      "t-translation with both supersymmetries");
  add(16, el({{3, one}, {2, mu}}), {"mu"}, "second dilation with the first supersymmetry");
  add(17, el({{1, one}, {4, ep}, {2, mu}}), {"eps", "mu"},
      "both translations with the first supersymmetry");
  add(18, el({{1, one}, {2, mu}, {5, nu}}), {"mu", "nu"},
      "x-translation with both supersymmetries");
  add(19, el({{1, one}, {4, ep}, {2, mu}, {5, nu}}), {"eps", "mu", "nu"},
      "both translations with both supersymmetries");
  add(20, el({{3, one}, {1, ep}, {2, mu}}), {"eps", "mu"},
      "second dilation with an x-translation and the first supersymmetry");
  add(21, el({{0, one}, {4, ep}}), {"eps"}, "first dilation with a t-translation");
  add(22, el({{0, one}, {5, nu}}), {"nu"}, "first dilation with the second supersymmetry");
  add(23, el({{0, one}, {4, ep}, {5, nu}}), {"eps", "nu"},
      "first dilation with a t-translation and the second supersymmetry");
  add(24, el({{0, one}, {3, kk}}), {"k"}, "twist of the two dilations, k nonzero");
  return out;
}

}  // namespace spgas

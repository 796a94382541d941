#pragma once

// The supersymmetric polytropic gas system: the two residuals, the general
// thirteen-parameter family, and component expansion over (1, th1, th2,
// th1*th2).

#include <array>

#include "superspace.hpp"

namespace spgas {

struct ModelParams {
  ParamRat gamma;
  ParamRat A;
};

struct GeneralFamilyParams {
  ParamRat a{0}, b{0}, c{0}, d{0}, e{0}, f{0}, g{0}, h{0}, i{0}, j{0}, k{0}, l{0}, m{0};
};

struct Residual {
  Expr d1, d2;
  bool is_zero() const { return d1.is_zero() && d2.is_zero(); }
};

// power factors multiply products that are frequently nilpotent-zero; the
// cofactor is normalized first and the power skipped when it vanishes
inline Expr lazy_pow_term(const Expr& base, const ParamRat& expo, const Expr& cofactor) {
  if (cofactor.is_zero()) return Expr::zero();
  return gpow(base, expo) * cofactor;
}

inline Residual residual(const Expr& W, const Expr& P, const SuperCoords& c,
                         const ModelParams& p) {
  Expr d1d2w = apply_D(1, apply_D(2, W, c), c);
  Expr d1d2p = apply_D(1, apply_D(2, P, c), c);
  Expr wx = diff(W, *c.x);
  Residual r;
  r.d1 = diff(P, *c.t) - diff(P, *c.x) * d1d2w - d1d2p * wx;
  Expr q = apply_D(1, P, c) * apply_D(2, P, c) * diff(d1d2p, *c.x);
  Expr aterm = q.is_zero()
                   ? Expr::zero()
                   : sign_pow(p.gamma + ParamRat(1)) * Expr::coeff(p.A) *
                         lazy_pow_term(d1d2p, p.gamma - ParamRat(2), q);
  r.d2 = diff(W, *c.t) - d1d2w * wx + aterm;
  return r;
}

inline Residual general_residual(const Expr& W, const Expr& P, const SuperCoords& c,
                                 const ModelParams& p, const GeneralFamilyParams& q) {
  auto D1 = [&c](const Expr& e) { return apply_D(1, e, c); };
  auto D2 = [&c](const Expr& e) { return apply_D(2, e, c); };
  auto dx = [&c](const Expr& e) { return diff(e, *c.x); };
  Expr d1d2w = D1(D2(W));
  Expr d1d2p = D1(D2(P));
  Expr d1w = D1(W), d2w = D2(W), d1p = D1(P), d2p = D2(P);
  const ParamRat one(1);

  Residual r;
  r.d1 = diff(P, *c.t) + scaled(dx(d1d2p) * W, q.a) + scaled(dx(d2p) * d1w, q.b) +
         scaled(dx(d1p) * d2w, q.c) + scaled(dx(P) * d1d2w, q.c - q.b - q.a - one) +
         scaled(P * dx(d1d2w), q.d) + scaled(d1p * dx(d2w), q.e) +
         scaled(d2p * dx(d1w), q.f) + scaled(d1d2p * dx(W), q.e - q.f - q.d - one);

  Expr tail = scaled(lazy_pow_term(d1d2p, p.gamma, dx(P)), q.j) +
              scaled(lazy_pow_term(d1d2p, p.gamma - one, d2p * dx(d1p)), q.k) +
              scaled(lazy_pow_term(d1d2p, p.gamma - one, d1p * dx(d2p)), q.l) +
              scaled(lazy_pow_term(d1d2p, p.gamma - one, P * dx(d1d2p)), q.m);
  Expr last_coeff = sign_pow(p.gamma + one) * Expr::coeff(p.A) +
                    Expr::coeff(q.j + q.k + q.m - q.l);
  Expr last = last_coeff.is_zero()
                  ? Expr::zero()
                  : last_coeff * lazy_pow_term(d1d2p, p.gamma - ParamRat(2), d1p * d2p * dx(d1d2p));
  r.d2 = diff(W, *c.t) + scaled(W * dx(d1d2w), q.g) + scaled(d1w * dx(d2w), q.h) +
         scaled(d2w * dx(d1w), q.i) + scaled(d1d2w * dx(W), q.h - q.i - q.g - one) + tail + last;
  return r;
}

// coefficients of 1, th1, th2, th1*th2 in that order, written to the left of
// the monomial; the expression must be polynomial in the odd coordinates
// (they may not hide inside function arguments)
inline std::array<Expr, 4> component_expand(const Expr& e, const SuperCoords& c) {
  for (auto& tm : e.t) {
    auto check = [&](const AtomPtr& a) {
      if (a->k != AKind::App) return;
      for (auto& ar : a->args)
        if (contains_sym(ar, c.th1->id) || contains_sym(ar, c.th2->id))
          throw SpgasError("component_expand: odd coordinate inside a function argument");
    };
    for (auto& f : tm.ev) check(f.a);
    for (auto& oa : tm.od) check(oa);
  }
  Bindings at0;
  at0.bind_sym(c.th1, Expr::zero());
  at0.bind_sym(c.th2, Expr::zero());
  std::array<Expr, 4> out;
  out[0] = substitute(e, at0);
  out[1] = grade_involution(substitute(diff(e, *c.th1), at0));
  out[2] = grade_involution(substitute(diff(e, *c.th2), at0));
  out[3] = substitute(diff(diff(e, *c.th1), *c.th2), at0);
  Expr th1 = sym_expr(c.th1), th2 = sym_expr(c.th2);
  Expr back = out[0] + out[1] * th1 + out[2] * th2 + out[3] * th1 * th2;
  if (!(back == e))
    throw SpgasError("component_expand: expression is not polynomial in the odd coordinates");
  return out;
}

}  // namespace spgas

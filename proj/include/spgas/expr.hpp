#pragma once

// Canonical Grassmann-graded expression kernel.
//
// An expression is a sorted sum of terms; a term is
//   coefficient (rational function of bosonic parameters)
//   * product of even atoms with exponents (rational functions of parameters)
//   * ordered product of distinct odd atoms.
// Odd atoms square to zero and anticommute; sorting tracks the sign.  Bosonic
// parameters live in the coefficients and exponents, never as atoms.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "param.hpp"
#include "workspace.hpp"

namespace spgas {

class Expr;
struct AtomNode;
using AtomPtr = std::shared_ptr<const AtomNode>;

int expr_cmp(const Expr& a, const Expr& b);
int atom_cmp(const AtomPtr& a, const AtomPtr& b);

struct EFactor {
  AtomPtr a;
  ParamRat e;
};

struct Term {
  ParamRat c;
  std::vector<EFactor> ev;  // even atoms, sorted, nonzero exponents
  std::vector<AtomPtr> od;  // odd atoms, sorted, distinct
};

class Expr {
 public:
  std::vector<Term> t;  // sorted by monomial, nonzero coefficients

  Expr() = default;

  static Expr zero() { return Expr(); }
  static Expr one() { return num(Rat(1)); }
  static Expr num(const Rat& r) { return coeff(ParamRat(r)); }
  static Expr coeff(const ParamRat& c) {
    Expr e;
    if (!c.is_zero()) e.t.push_back(Term{c, {}, {}});
    return e;
  }
  static Expr from_terms(std::vector<Term> ts);

  bool is_zero() const { return t.empty(); }
  bool is_one() const {
    return t.size() == 1 && t[0].ev.empty() && t[0].od.empty() && t[0].c.is_one();
  }

  // 0: even, 1: odd, nullopt: mixed; the zero expression reports even
  std::optional<int> parity() const {
    std::optional<int> p;
    for (auto& tm : t) {
      int tp = static_cast<int>(tm.od.size() & 1);
      if (!p) p = tp;
      else if (*p != tp) return std::nullopt;
    }
    return p ? p : std::optional<int>(0);
  }

  bool operator==(const Expr& o) const { return expr_cmp(*this, o) == 0; }
  bool operator!=(const Expr& o) const { return !(*this == o); }
};

enum class AKind : uint8_t { Sym = 0, App = 1, ExpF = 2, LnF = 3, SignF = 4, NumPow = 5, PowP = 6 };

struct AtomNode {
  AKind k;
  int par = 0;
  std::shared_ptr<const SymRec> sym;   // Sym
  std::shared_ptr<const FuncRec> fn;   // App
  std::vector<uint32_t> dx;            // App: derivative count per slot
  std::vector<Expr> args;              // App
  Expr arg;                            // ExpF / LnF
  ParamRat sgn;                        // SignF exponent, mod-2 reduced
  Rat base;                            // NumPow: positive rational != 1
  ParamRat pbase;                      // PowP: canonical parameter fraction
};

inline int app_parity(const FuncRec& fn, const std::vector<uint32_t>& dx) {
  int p = fn.parity;
  for (size_t i = 0; i < dx.size(); ++i)
    if (fn.slot_parity[i]) p ^= static_cast<int>(dx[i] & 1);
  return p;
}

inline int atom_cmp(const AtomPtr& a, const AtomPtr& b) {
  if (a->k != b->k) return a->k < b->k ? -1 : 1;
  switch (a->k) {
    case AKind::Sym:
      if (a->sym->id != b->sym->id) return a->sym->id < b->sym->id ? -1 : 1;
      return 0;
    case AKind::App: {
      if (a->fn->id != b->fn->id) return a->fn->id < b->fn->id ? -1 : 1;
      if (a->dx != b->dx) return a->dx < b->dx ? -1 : 1;
      if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
      for (size_t i = 0; i < a->args.size(); ++i) {
        int c = expr_cmp(a->args[i], b->args[i]);
        if (c) return c;
      }
      return 0;
    }
    case AKind::ExpF:
    case AKind::LnF:
      return expr_cmp(a->arg, b->arg);
    case AKind::SignF:
      return paramrat_cmp(a->sgn, b->sgn);
    case AKind::NumPow:
      if (a->base != b->base) return a->base < b->base ? -1 : 1;
      return 0;
    case AKind::PowP:
      return paramrat_cmp(a->pbase, b->pbase);
  }
  return 0;
}

inline int term_mono_cmp(const Term& a, const Term& b) {
  if (a.ev.size() != b.ev.size()) return a.ev.size() < b.ev.size() ? -1 : 1;
  for (size_t i = 0; i < a.ev.size(); ++i) {
    int c = atom_cmp(a.ev[i].a, b.ev[i].a);
    if (c) return c;
    c = paramrat_cmp(a.ev[i].e, b.ev[i].e);
    if (c) return c;
  }
  if (a.od.size() != b.od.size()) return a.od.size() < b.od.size() ? -1 : 1;
  for (size_t i = 0; i < a.od.size(); ++i) {
    int c = atom_cmp(a.od[i], b.od[i]);
    if (c) return c;
  }
  return 0;
}

inline int expr_cmp(const Expr& a, const Expr& b) {
  if (a.t.size() != b.t.size()) return a.t.size() < b.t.size() ? -1 : 1;
  for (size_t i = 0; i < a.t.size(); ++i) {
    int c = term_mono_cmp(a.t[i], b.t[i]);
    if (c) return c;
    c = paramrat_cmp(a.t[i].c, b.t[i].c);
    if (c) return c;
  }
  return 0;
}

inline Expr Expr::from_terms(std::vector<Term> ts) {
  std::sort(ts.begin(), ts.end(), [](const Term& x, const Term& y) { return term_mono_cmp(x, y) < 0; });
  Expr e;
  for (auto& tm : ts) {
    if (tm.c.is_zero()) continue;
    if (!e.t.empty() && term_mono_cmp(e.t.back(), tm) == 0) {
      e.t.back().c = e.t.back().c + tm.c;
      if (e.t.back().c.is_zero()) e.t.pop_back();
    } else {
      e.t.push_back(std::move(tm));
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Atom constructors (Expr-valued smart constructors normalize on the way in).

Expr exp_of(const Expr& u);
Expr ln_of(const Expr& u);
Expr sign_pow(const ParamRat& e);
Expr pow_coeff(const ParamRat& c, const ParamRat& p);
Expr gpow(const Expr& u, const ParamRat& p);
std::pair<Expr, Expr> body_soul(const Expr& e);

inline Expr atom_expr(AtomPtr a, ParamRat expo = ParamRat(1)) {
  Expr e;
  Term tm;
  tm.c = ParamRat(1);
  if (a->par)
    tm.od.push_back(std::move(a));
  else
    tm.ev.push_back(EFactor{std::move(a), std::move(expo)});
  e.t.push_back(std::move(tm));
  return e;
}

inline Expr sym_expr(const std::shared_ptr<const SymRec>& s) {
  if (s->kind == SKind::BosonParam) return Expr::coeff(ParamRat::var(s->id));
  auto n = std::make_shared<AtomNode>();
  n->k = AKind::Sym;
  n->sym = s;
  n->par = s->parity();
  return atom_expr(n);
}

inline Expr app_expr(const std::shared_ptr<const FuncRec>& fn, std::vector<uint32_t> dx,
                     std::vector<Expr> args) {
  for (size_t i = 0; i < dx.size(); ++i)
    if (fn->slot_parity[i] && dx[i] > 1) return Expr::zero();
  auto n = std::make_shared<AtomNode>();
  n->k = AKind::App;
  n->fn = fn;
  n->dx = std::move(dx);
  n->args = std::move(args);
  n->par = app_parity(*fn, n->dx);
  return atom_expr(n);
}

Expr default_app(const Workspace& ws, const std::shared_ptr<const FuncRec>& fn);

inline Expr default_arg_expr(const Workspace& ws, int64_t sd) {
  if (sd >= 0) return sym_expr(ws.sym_by_id(static_cast<uint32_t>(sd)));
  if (sd <= -2) return default_app(ws, ws.func_by_id(static_cast<uint32_t>(-2 - sd)));
  throw SpgasError("slot has no default argument");
}

inline Expr default_app(const Workspace& ws, const std::shared_ptr<const FuncRec>& fn) {
  std::vector<Expr> args;
  args.reserve(fn->slots.size());
  for (auto sd : fn->slot_default) args.push_back(default_arg_expr(ws, sd));
  return app_expr(fn, std::vector<uint32_t>(fn->slots.size(), 0), std::move(args));
}

// ---------------------------------------------------------------------------
// Term multiplication with graded signs.

namespace detail {

// merge sorted odd atom lists; returns false when a generator repeats
inline bool merge_odds(const std::vector<AtomPtr>& A, const std::vector<AtomPtr>& B,
                       std::vector<AtomPtr>& out, int& sign) {
  out.clear();
  out.reserve(A.size() + B.size());
  size_t i = 0, j = 0;
  while (i < A.size() && j < B.size()) {
    int c = atom_cmp(A[i], B[j]);
    if (c == 0) return false;
    if (c < 0) {
      out.push_back(A[i++]);
    } else {
      if ((A.size() - i) & 1) sign = -sign;
      out.push_back(B[j++]);
    }
  }
  for (; i < A.size(); ++i) out.push_back(A[i]);
  for (; j < B.size(); ++j) out.push_back(B[j]);
  return true;
}

inline void insert_even_factor(std::vector<EFactor>& ev, AtomPtr a, ParamRat e) {
  EFactor f{std::move(a), std::move(e)};
  auto it = std::lower_bound(ev.begin(), ev.end(), f,
                             [](const EFactor& x, const EFactor& y) { return atom_cmp(x.a, y.a) < 0; });
  ev.insert(it, std::move(f));
}

// canonical fixups after an even-factor merge: drop zero exponents, fuse
// exponential/sign factors, fold integer powers of numeric/parameter bases
inline bool normalize_even_factors(Term& tm) {
  std::vector<EFactor> out;
  out.reserve(tm.ev.size());
  bool saw_exp = false, saw_sign = false;
  Expr exp_arg;
  ParamRat sign_e(0);
  for (auto& f : tm.ev) {
    if (f.e.is_zero()) continue;
    switch (f.a->k) {
      case AKind::ExpF: {
        saw_exp = true;
        Expr sc = f.a->arg;
        if (!f.e.is_one())
          for (auto& tt : sc.t) tt.c = tt.c * f.e;
        std::vector<Term> ts = std::move(exp_arg.t);
        for (auto& tt : sc.t) ts.push_back(std::move(tt));
        exp_arg = Expr::from_terms(std::move(ts));
        break;
      }
      case AKind::SignF:
        saw_sign = true;
        sign_e = sign_e + f.e * f.a->sgn;
        break;
      case AKind::NumPow:
        if (auto n = f.e.try_integer()) {
          tm.c = tm.c * ParamRat(rat_pow(f.a->base, *n));
        } else {
          out.push_back(f);
        }
        break;
      case AKind::PowP:
        if (auto n = f.e.try_integer()) {
          tm.c = tm.c * f.a->pbase.pow(*n);
        } else {
          out.push_back(f);
        }
        break;
      default:
        out.push_back(f);
    }
    if (tm.c.is_zero()) return false;
  }
  tm.ev = std::move(out);
  if (saw_exp && !exp_arg.is_zero()) {
    auto n = std::make_shared<AtomNode>();
    n->k = AKind::ExpF;
    n->arg = std::move(exp_arg);
    n->par = 0;
    insert_even_factor(tm.ev, std::move(n), ParamRat(1));
  }
  if (saw_sign) {
    ParamRat r = sign_exponent_reduce(sign_e);
    if (!r.is_zero()) {
      if (auto n = r.try_integer()) {
        if (*n % 2 != 0) tm.c = -tm.c;
      } else if (r.is_const()) {
        throw SpgasError("non-integer constant sign exponent");
      } else {
        auto n = std::make_shared<AtomNode>();
        n->k = AKind::SignF;
        n->sgn = std::move(r);
        n->par = 0;
        insert_even_factor(tm.ev, std::move(n), ParamRat(1));
      }
    }
  }
  return !tm.c.is_zero();
}

inline std::optional<Term> term_mul(const Term& A, const Term& B) {
  Term r;
  r.c = A.c * B.c;
  if (r.c.is_zero()) return std::nullopt;
  int sign = 1;
  if (!merge_odds(A.od, B.od, r.od, sign)) return std::nullopt;
  if (sign < 0) r.c = -r.c;
  // merge even factors, adding exponents of equal atoms
  r.ev.reserve(A.ev.size() + B.ev.size());
  size_t i = 0, j = 0;
  while (i < A.ev.size() && j < B.ev.size()) {
    int c = atom_cmp(A.ev[i].a, B.ev[j].a);
    if (c < 0) r.ev.push_back(A.ev[i++]);
    else if (c > 0) r.ev.push_back(B.ev[j++]);
    else {
      ParamRat e = A.ev[i].e + B.ev[j].e;
      if (!e.is_zero()) r.ev.push_back(EFactor{A.ev[i].a, std::move(e)});
      ++i;
      ++j;
    }
  }
  for (; i < A.ev.size(); ++i) r.ev.push_back(A.ev[i]);
  for (; j < B.ev.size(); ++j) r.ev.push_back(B.ev[j]);
  if (!normalize_even_factors(r)) return std::nullopt;
  return r;
}

}  // namespace detail

inline Expr operator+(const Expr& a, const Expr& b) {
  std::vector<Term> ts;
  ts.reserve(a.t.size() + b.t.size());
  for (auto& tm : a.t) ts.push_back(tm);
  for (auto& tm : b.t) ts.push_back(tm);
  return Expr::from_terms(std::move(ts));
}
inline Expr operator-(const Expr& a) {
  Expr r = a;
  for (auto& tm : r.t) tm.c = -tm.c;
  return r;
}
inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
inline Expr operator*(const Expr& a, const Expr& b) {
  std::vector<Term> ts;
  ts.reserve(a.t.size() * b.t.size());
  for (auto& ta : a.t)
    for (auto& tb : b.t)
      if (auto tm = detail::term_mul(ta, tb)) ts.push_back(std::move(*tm));
  return Expr::from_terms(std::move(ts));
}
inline Expr scaled(const Expr& a, const ParamRat& c) {
  if (c.is_zero()) return Expr::zero();
  Expr r = a;
  for (auto& tm : r.t) tm.c = tm.c * c;
  return r;
}

inline std::pair<Expr, Expr> body_soul(const Expr& e) {
  Expr b, s;
  for (auto& tm : e.t)
    (tm.od.empty() ? b : s).t.push_back(tm);
  return {std::move(b), std::move(s)};
}

// negates the odd part; moving a factor across one odd symbol
inline Expr grade_involution(const Expr& e) {
  Expr r = e;
  for (auto& tm : r.t)
    if (tm.od.size() & 1) tm.c = -tm.c;
  return r;
}

inline Expr exp_of(const Expr& u) {
  auto [b, s] = body_soul(u);
  Expr base = Expr::one();
  if (!b.is_zero()) {
    auto n = std::make_shared<AtomNode>();
    n->k = AKind::ExpF;
    n->arg = std::move(b);
    n->par = 0;
    base = atom_expr(std::move(n));
  }
  if (s.is_zero()) return base;
  Expr acc = Expr::one();
  Expr wk = Expr::one();
  Rat fact(1);
  for (unsigned k = 1;; ++k) {
    wk = wk * s;
    if (wk.is_zero()) break;
    fact *= Rat(k);
    acc = acc + scaled(wk, ParamRat(Rat(1) / fact));
  }
  return base * acc;
}

inline Expr sign_pow(const ParamRat& e) {
  ParamRat r = sign_exponent_reduce(e);
  if (r.is_zero()) return Expr::one();
  if (auto n = r.try_integer()) return Expr::num(*n % 2 != 0 ? Rat(-1) : Rat(1));
  if (r.is_const()) throw SpgasError("non-integer constant sign exponent");
  auto n = std::make_shared<AtomNode>();
  n->k = AKind::SignF;
  n->sgn = std::move(r);
  n->par = 0;
  return atom_expr(std::move(n));
}

inline Expr numpow_atom(const Rat& base, const ParamRat& p) {
  if (base <= 0) throw SpgasError("numeric power base must be positive");
  if (base == 1) return Expr::one();
  if (auto n = p.try_integer()) return Expr::num(rat_pow(base, *n));
  auto a = std::make_shared<AtomNode>();
  a->k = AKind::NumPow;
  a->base = base;
  a->par = 0;
  return atom_expr(std::move(a), p);
}

Expr pow_coeff(const ParamRat& c, const ParamRat& p);

inline Expr powp_atom(const ParamRat& pb, const ParamRat& p) {
  if (pb.is_one()) return Expr::one();
  if (auto n = p.try_integer()) return Expr::coeff(pb.pow(*n));
  if (poly_content_factor(pb.n) != 1) return pow_coeff(pb, p);
  auto a = std::make_shared<AtomNode>();
  a->k = AKind::PowP;
  a->pbase = pb;
  a->par = 0;
  return atom_expr(std::move(a), p);
}

inline Expr pow_coeff(const ParamRat& c, const ParamRat& p) {
  if (p.is_zero()) return Expr::one();
  if (c.is_zero()) return Expr::zero();
  if (auto n = p.try_integer()) return Expr::coeff(c.pow(*n));
  Poly nc;
  Rat r = poly_content_factor(c.n, &nc);
  Expr res = Expr::one();
  if (r < 0) {
    res = res * sign_pow(p);
    r = -r;
  }
  if (r != 1) res = res * numpow_atom(r, p);
  ParamRat unit(nc, c.d);
  if (!unit.is_one()) res = res * powp_atom(unit, p);
  return res;
}

namespace detail {

// power of a single body term (invertible monomial)
inline Expr powered_mono(const Term& tm, const ParamRat& p) {
  Expr res = pow_coeff(tm.c, p);
  for (auto& f : tm.ev) {
    ParamRat pe = p * f.e;
    switch (f.a->k) {
      case AKind::ExpF:
        res = res * exp_of(scaled(f.a->arg, pe));
        break;
      case AKind::SignF:
        res = res * sign_pow(pe * f.a->sgn);
        break;
      case AKind::NumPow:
        res = res * numpow_atom(f.a->base, pe);
        break;
      case AKind::PowP:
        res = res * powp_atom(f.a->pbase, pe);
        break;
      default:
        res = res * atom_expr(f.a, pe);
    }
  }
  return res;
}

}  // namespace detail

inline Expr gpow(const Expr& u, const ParamRat& p) {
  if (p.is_zero()) return Expr::one();
  if (u.is_zero()) {
    if (auto n = p.try_integer(); n && *n > 0) return Expr::zero();
    throw NonInvertibleBody("zero base with non-natural exponent");
  }
  if (auto n = p.try_integer(); n && *n >= 0) {
    Expr acc = Expr::one();
    for (long i = 0; i < *n; ++i) acc = acc * u;
    return acc;
  }
  auto [b, s] = body_soul(u);
  if (b.is_zero()) throw NonInvertibleBody("zero body with non-natural exponent");
  if (b.t.size() > 1) throw NonInvertibleBody("body is not a single invertible term");
  Expr bp = detail::powered_mono(b.t[0], p);
  if (s.is_zero()) return bp;
  Expr binv = detail::powered_mono(b.t[0], ParamRat(-1));
  Expr w = s * binv;
  Expr acc = Expr::one();
  Expr wk = Expr::one();
  for (unsigned k = 1;; ++k) {
    wk = wk * w;
    if (wk.is_zero()) break;
    acc = acc + scaled(wk, binom(p, k));
  }
  return bp * acc;
}

inline Expr ln_of(const Expr& u) {
  auto [b, s] = body_soul(u);
  if (b.is_zero()) throw NonInvertibleBody("logarithm of a soul-only expression");
  Expr base = Expr::zero();
  if (!b.is_one()) {
    auto n = std::make_shared<AtomNode>();
    n->k = AKind::LnF;
    n->arg = std::move(b);
    n->par = 0;
    base = atom_expr(std::move(n));
  }
  if (s.is_zero()) return base;
  auto [b2, _] = body_soul(u);
  Expr w = s * gpow(b2, ParamRat(-1));
  Expr acc = Expr::zero();
  Expr wk = Expr::one();
  for (unsigned k = 1;; ++k) {
    wk = wk * w;
    if (wk.is_zero()) break;
    Rat c = Rat((k % 2) ? 1 : -1) / Rat(k);
    acc = acc + scaled(wk, ParamRat(c));
  }
  return base + acc;
}

// ---------------------------------------------------------------------------
// Differentiation.

// increments dx[slot]; returns the reordering sign, or 0 when the derivative
// annihilates the atom (repeated odd derivative)
inline int bump_deriv(const FuncRec& fn, std::vector<uint32_t>& dx, size_t slot) {
  if (fn.slot_parity[slot]) {
    if (dx[slot] >= 1) return 0;
    int cnt = 0;
    for (size_t j = slot + 1; j < dx.size(); ++j)
      if (fn.slot_parity[j]) cnt += static_cast<int>(dx[j]);
    dx[slot] = 1;
    return (cnt & 1) ? -1 : 1;
  }
  ++dx[slot];
  return 1;
}

Expr diff(const Expr& e, const SymRec& v);

inline Expr diff_atom(const AtomPtr& a, const SymRec& v) {
  switch (a->k) {
    case AKind::Sym:
      return (a->sym->id == v.id) ? Expr::one() : Expr::zero();
    case AKind::App: {
      Expr res = Expr::zero();
      for (size_t i = 0; i < a->args.size(); ++i) {
        Expr da = diff(a->args[i], v);
        if (da.is_zero()) continue;
        std::vector<uint32_t> dx = a->dx;
        int s = bump_deriv(*a->fn, dx, i);
        if (!s) continue;
        Expr piece = da * app_expr(a->fn, std::move(dx), a->args);
        res = res + (s < 0 ? -piece : piece);
      }
      return res;
    }
    case AKind::ExpF: {
      Expr da = diff(a->arg, v);
      if (da.is_zero()) return Expr::zero();
      return da * atom_expr(a);
    }
    case AKind::LnF: {
      Expr da = diff(a->arg, v);
      if (da.is_zero()) return Expr::zero();
      return da * gpow(a->arg, ParamRat(-1));
    }
    default:
      return Expr::zero();
  }
}

inline Expr diff(const Expr& e, const SymRec& v) {
  const bool vodd = v.parity() != 0;
  Expr out = Expr::zero();
  for (auto& tm : e.t) {
    for (size_t j = 0; j < tm.ev.size(); ++j) {
      Expr da = diff_atom(tm.ev[j].a, v);
      if (da.is_zero()) continue;
      Term pre;
      pre.c = tm.c * tm.ev[j].e;
      if (pre.c.is_zero()) continue;
      for (size_t k = 0; k < tm.ev.size(); ++k) {
        if (k == j) {
          ParamRat e1 = tm.ev[j].e - ParamRat(1);
          if (!e1.is_zero()) pre.ev.push_back(EFactor{tm.ev[j].a, std::move(e1)});
        } else {
          pre.ev.push_back(tm.ev[k]);
        }
      }
      Term odt;
      odt.c = ParamRat(1);
      odt.od = tm.od;
      Expr pe;
      if (detail::normalize_even_factors(pre)) pe.t.push_back(pre);
      Expr oe;
      oe.t.push_back(odt);
      out = out + pe * da * oe;
    }
    for (size_t j = 0; j < tm.od.size(); ++j) {
      Expr da = diff_atom(tm.od[j], v);
      if (da.is_zero()) continue;
      Term pre;
      pre.c = (vodd && (j & 1)) ? -tm.c : tm.c;
      pre.ev = tm.ev;
      pre.od.assign(tm.od.begin(), tm.od.begin() + static_cast<long>(j));
      Term post;
      post.c = ParamRat(1);
      post.od.assign(tm.od.begin() + static_cast<long>(j) + 1, tm.od.end());
      Expr pe;
      pe.t.push_back(pre);
      Expr oe;
      oe.t.push_back(post);
      out = out + pe * da * oe;
    }
  }
  return out;
}

// partial derivative treating `target` as an independent coordinate (jet
// coordinates in prolongation); a left derivative on odd targets
inline Expr diff_jet(const Expr& e, const AtomPtr& target) {
  Expr out = Expr::zero();
  const bool todd = target->par != 0;
  for (auto& tm : e.t) {
    if (!todd) {
      for (size_t j = 0; j < tm.ev.size(); ++j) {
        if (atom_cmp(tm.ev[j].a, target) != 0) continue;
        Term r;
        r.c = tm.c * tm.ev[j].e;
        if (r.c.is_zero()) continue;
        for (size_t k = 0; k < tm.ev.size(); ++k) {
          if (k == j) {
            ParamRat e1 = tm.ev[j].e - ParamRat(1);
            if (!e1.is_zero()) r.ev.push_back(EFactor{tm.ev[j].a, std::move(e1)});
          } else {
            r.ev.push_back(tm.ev[k]);
          }
        }
        r.od = tm.od;
        Expr pe;
        if (detail::normalize_even_factors(r)) pe.t.push_back(r);
        out = out + pe;
      }
    } else {
      for (size_t j = 0; j < tm.od.size(); ++j) {
        if (atom_cmp(tm.od[j], target) != 0) continue;
        Term r;
        r.c = (j & 1) ? -tm.c : tm.c;
        r.ev = tm.ev;
        for (size_t k = 0; k < tm.od.size(); ++k)
          if (k != j) r.od.push_back(tm.od[k]);
        Expr pe;
        pe.t.push_back(r);
        out = out + pe;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitution.

struct FuncBinding {
  std::vector<std::shared_ptr<const SymRec>> slots;
  Expr body;
};

struct Bindings {
  std::map<uint32_t, Expr> syms;
  std::map<uint32_t, FuncBinding> funcs;
  std::vector<std::pair<AtomPtr, Expr>> atoms;

  void bind_sym(const std::shared_ptr<const SymRec>& s, Expr e) {
    auto p = e.parity();
    if (!e.is_zero() && (!p || *p != s->parity()))
      throw ParityMismatch("binding parity does not match symbol " + s->name);
    syms[s->id] = std::move(e);
  }
  void bind_func(const std::shared_ptr<const FuncRec>& f,
                 std::vector<std::shared_ptr<const SymRec>> slots, Expr body) {
    funcs[f->id] = FuncBinding{std::move(slots), std::move(body)};
  }
  void bind_atom(AtomPtr pat, Expr e) { atoms.emplace_back(std::move(pat), std::move(e)); }
};

Expr substitute(const Expr& e, const Bindings& B);

namespace detail {

inline std::optional<Expr> subst_atom(const AtomPtr& a, const Bindings& B) {
  for (auto& [pat, rep] : B.atoms)
    if (atom_cmp(a, pat) == 0) return rep;
  switch (a->k) {
    case AKind::Sym: {
      auto it = B.syms.find(a->sym->id);
      if (it == B.syms.end()) return std::nullopt;
      return it->second;
    }
    case AKind::App: {
      bool changed = false;
      std::vector<Expr> args;
      args.reserve(a->args.size());
      for (auto& ar : a->args) {
        Expr na = substitute(ar, B);
        if (!(na == ar)) changed = true;
        args.push_back(std::move(na));
      }
      auto it = B.funcs.find(a->fn->id);
      if (it != B.funcs.end()) {
        Expr body = it->second.body;
        for (size_t slot = 0; slot < a->dx.size(); ++slot)
          for (uint32_t k = 0; k < a->dx[slot]; ++k) body = diff(body, *it->second.slots[slot]);
        Bindings inner;
        for (size_t slot = 0; slot < it->second.slots.size(); ++slot)
          inner.bind_sym(it->second.slots[slot], args[slot]);
        return substitute(body, inner);
      }
      if (!changed) return std::nullopt;
      return app_expr(a->fn, a->dx, std::move(args));
    }
    case AKind::ExpF: {
      Expr na = substitute(a->arg, B);
      if (na == a->arg) return std::nullopt;
      return exp_of(na);
    }
    case AKind::LnF: {
      Expr na = substitute(a->arg, B);
      if (na == a->arg) return std::nullopt;
      return ln_of(na);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

inline Expr substitute(const Expr& e, const Bindings& B) {
  Expr out = Expr::zero();
  for (auto& tm : e.t) {
    Expr acc = Expr::coeff(tm.c);
    for (auto& f : tm.ev) {
      auto rep = detail::subst_atom(f.a, B);
      if (!rep) {
        acc = acc * atom_expr(f.a, f.e);
      } else if (f.e.is_one()) {
        acc = acc * (*rep);
      } else {
        acc = acc * gpow(*rep, f.e);
      }
      if (acc.is_zero()) break;
    }
    if (acc.is_zero()) continue;
    for (auto& oa : tm.od) {
      auto rep = detail::subst_atom(oa, B);
      acc = acc * (rep ? *rep : atom_expr(oa));
      if (acc.is_zero()) break;
    }
    out = out + acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter binding (gamma = 3, epsilon = -1, ...).

Expr bind_param(const Expr& e, uint32_t id, const Rat& val);

namespace detail {

inline Expr bind_param_atom(const AtomPtr& a, const ParamRat& expo, uint32_t id, const Rat& val) {
  switch (a->k) {
    case AKind::Sym:
      return atom_expr(a, expo);
    case AKind::App: {
      std::vector<Expr> args;
      args.reserve(a->args.size());
      for (auto& ar : a->args) args.push_back(bind_param(ar, id, val));
      return gpow(app_expr(a->fn, a->dx, std::move(args)), expo);
    }
    case AKind::ExpF:
      return exp_of(scaled(bind_param(a->arg, id, val), expo));
    case AKind::LnF:
      return gpow(ln_of(bind_param(a->arg, id, val)), expo);
    case AKind::SignF:
      return sign_pow(expo * a->sgn.bind(id, val));
    case AKind::NumPow:
      return numpow_atom(a->base, expo);
    case AKind::PowP:
      return pow_coeff(a->pbase.bind(id, val), expo);
  }
  return Expr::zero();
}

}  // namespace detail

inline Expr bind_param(const Expr& e, uint32_t id, const Rat& val) {
  Expr out = Expr::zero();
  for (auto& tm : e.t) {
    Expr acc = Expr::coeff(tm.c.bind(id, val));
    for (auto& f : tm.ev) {
      if (acc.is_zero()) break;
      acc = acc * detail::bind_param_atom(f.a, f.e.bind(id, val), id, val);
    }
    for (auto& oa : tm.od) {
      if (acc.is_zero()) break;
      acc = acc * detail::bind_param_atom(oa, ParamRat(1), id, val);
    }
    out = out + acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structure queries.

inline bool contains_sym(const Expr& e, uint32_t id);

inline bool atom_contains_sym(const AtomPtr& a, uint32_t id) {
  switch (a->k) {
    case AKind::Sym:
      return a->sym->id == id;
    case AKind::App:
      for (auto& ar : a->args)
        if (contains_sym(ar, id)) return true;
      return false;
    case AKind::ExpF:
    case AKind::LnF:
      return contains_sym(a->arg, id);
    default:
      return false;
  }
}

inline bool contains_sym(const Expr& e, uint32_t id) {
  for (auto& tm : e.t) {
    for (auto& f : tm.ev)
      if (atom_contains_sym(f.a, id)) return true;
    for (auto& oa : tm.od)
      if (atom_contains_sym(oa, id)) return true;
  }
  return false;
}

inline bool contains_param(const Expr& e, uint32_t id);

inline bool atom_contains_param(const AtomPtr& a, uint32_t id) {
  std::set<uint32_t> vs;
  switch (a->k) {
    case AKind::Sym:
      return false;
    case AKind::App:
      for (auto& ar : a->args)
        if (contains_param(ar, id)) return true;
      return false;
    case AKind::ExpF:
    case AKind::LnF:
      return contains_param(a->arg, id);
    case AKind::SignF:
      a->sgn.vars_into(vs);
      return vs.count(id) > 0;
    case AKind::NumPow:
      return false;
    case AKind::PowP:
      a->pbase.vars_into(vs);
      return vs.count(id) > 0;
  }
  return false;
}

inline bool contains_param(const Expr& e, uint32_t id) {
  for (auto& tm : e.t) {
    std::set<uint32_t> vs;
    tm.c.vars_into(vs);
    if (vs.count(id)) return true;
    for (auto& f : tm.ev) {
      vs.clear();
      f.e.vars_into(vs);
      if (vs.count(id)) return true;
      if (atom_contains_param(f.a, id)) return true;
    }
    for (auto& oa : tm.od)
      if (atom_contains_param(oa, id)) return true;
  }
  return false;
}

}  // namespace spgas

#pragma once

// Jet-space layer: the two dependent superfields become function records over
// the four base coordinates, so the kernel chain rule is the total derivative
// and derivative records are the jet coordinates.  On top of that sit the
// prolongation coefficients of a general vector field, the determining
// equations of the model, and the yes/no symmetry test.

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "printer.hpp"

namespace spgas {

struct JetVars {
  Workspace* ws;
  SuperCoords sc;
  std::shared_ptr<const FuncRec> Wf, Pf;
  Expr W, P;
};

inline JetVars make_jet_vars(Workspace& ws) {
  JetVars jv;
  jv.ws = &ws;
  jv.sc = std_coords(ws);
  std::vector<std::string> slots = {jv.sc.x->name, jv.sc.t->name, jv.sc.th1->name,
                                    jv.sc.th2->name};
  jv.Wf = ws.func("W", 0, slots);
  jv.Pf = ws.func("P", 0, slots);
  jv.W = default_app(ws, jv.Wf);
  jv.P = default_app(ws, jv.Pf);
  return jv;
}

inline const SymRec& jet_dir(const JetVars& jv, int dir) {
  switch (dir) {
    case 0: return *jv.sc.x;
    case 1: return *jv.sc.t;
    case 2: return *jv.sc.th1;
    case 3: return *jv.sc.th2;
    default: throw SpgasError("jet direction index out of range");
  }
}

// dependent fields are function records, so the chain rule already promotes
// every derivative record one step in the requested direction
inline Expr total_derivative(const JetVars& jv, const Expr& e, int dir) {
  return diff(e, jet_dir(jv, dir));
}

// canonical derivative coordinate of field f (0: W, 1: P); the order of the
// counts is (x, t, theta1, theta2) and odd counts above one vanish
inline Expr jet(const JetVars& jv, int f, const std::array<uint32_t, 4>& J) {
  const auto& fn = f == 0 ? jv.Wf : jv.Pf;
  const Expr& base = f == 0 ? jv.W : jv.P;
  std::vector<uint32_t> dx(J.begin(), J.end());
  return app_expr(fn, std::move(dx), base.t[0].ev[0].a->args);
}

// point vector field: coefficients are expressions over the base coordinates
// and the bare fields; the two odd directions carry odd coefficients, so an
// odd generator enters multiplied by a fermionic constant
struct GeneralVectorField {
  Expr xi, tau, rho1, rho2, lam, om;
};

namespace detail {

inline void require_parity(const Expr& e, int want, const char* who) {
  if (e.is_zero()) return;
  auto p = e.parity();
  if (!p || *p != want)
    throw SpgasError(std::string("vector-field coefficient parity mismatch: ") + who);
}

inline const AtomPtr& the_atom(const Expr& e) {
  if (e.t.size() == 1 && e.t[0].od.empty() && e.t[0].ev.size() == 1 &&
      e.t[0].c.is_one() && e.t[0].ev[0].e.is_one())
    return e.t[0].ev[0].a;
  if (e.t.size() == 1 && e.t[0].ev.empty() && e.t[0].od.size() == 1 && e.t[0].c.is_one())
    return e.t[0].od[0];
  throw SpgasError("expression is not a single unit atom");
}

}  // namespace detail

inline void check_field_parities(const GeneralVectorField& v) {
  detail::require_parity(v.xi, 0, "xi");
  detail::require_parity(v.tau, 0, "tau");
  detail::require_parity(v.rho1, 1, "rho1");
  detail::require_parity(v.rho2, 1, "rho2");
  detail::require_parity(v.lam, 0, "lam");
  detail::require_parity(v.om, 0, "om");
}

// Coefficients of the prolonged vector field, generated by peeling the last
// derivative direction:
//   phi_{J,d} = D_d phi_J - sum_C (D_d zeta^C) u_{J+C}
// with the zeta-derivative kept to the left of the jet coordinate.  The
// coefficient attached to a derivative record is looked up by (field, counts),
// memoized across the recursion.
class Prolongation {
 public:
  Prolongation(const JetVars& jv, GeneralVectorField v) : jv_(jv), v_(std::move(v)) {
    check_field_parities(v_);
    zeta_ = {v_.xi, v_.tau, v_.rho1, v_.rho2};
  }

  using Key = std::pair<int, std::array<uint32_t, 4>>;

  const Expr& coeff(int f, const std::array<uint32_t, 4>& J) {
    Key key{f, J};
    auto it = phi_.find(key);
    if (it != phi_.end()) return it->second;
    Expr res;
    int d = last_dir(J);
    if (d < 0) {
      res = f == 0 ? v_.lam : v_.om;
    } else {
      auto Jp = J;
      --Jp[static_cast<size_t>(d)];
      const SymRec& dv = jet_dir(jv_, d);
      res = diff(coeff(f, Jp), dv);
      Expr uJp = jet(jv_, f, Jp);
      for (int c = 0; c < 4; ++c) {
        Expr dz = diff(zeta_[static_cast<size_t>(c)], dv);
        if (dz.is_zero()) continue;
        Expr u = diff(uJp, jet_dir(jv_, c));
        if (u.is_zero()) continue;
        res = res - dz * u;
      }
    }
    return phi_.emplace(std::move(key), std::move(res)).first->second;
  }

  // graded prolongation applied to an expression over the canonical jet
  // fields: explicit-coordinate parts and every derivative record present
  // receive their coefficient, multiplied from the left
  Expr apply(const Expr& e) {
    std::map<AtomPtr, char, AtomLess> found;
    collect(e, found);

    Bindings freeze, thaw;
    std::vector<std::pair<AtomPtr, std::shared_ptr<const SymRec>>> marks;
    const auto& canon_args = jv_.W.t[0].ev[0].a->args;
    for (auto& [a, unused] : found) {
      (void)unused;
      for (size_t i = 0; i < 4; ++i)
        if (!(a->args[i] == canon_args[i]))
          throw SpgasError("prolongation over a relocated jet field");
      std::string name = a->fn->name + "@";
      for (size_t i = 0; i < 4; ++i) name += std::to_string(a->dx[i]) + (i < 3 ? "." : "");
      auto mk = jv_.ws->sym(name, a->par ? SKind::FermiVar : SKind::BosonVar);
      freeze.bind_atom(a, sym_expr(mk));
      thaw.bind_sym(mk, atom_expr(a));
      marks.emplace_back(a, mk);
    }
    Expr fe = substitute(e, freeze);
    Expr out = Expr::zero();
    for (int d = 0; d < 4; ++d) {
      Expr pd = diff(fe, jet_dir(jv_, d));
      if (pd.is_zero()) continue;
      out = out + zeta_[static_cast<size_t>(d)] * substitute(pd, thaw);
    }
    for (auto& [a, mk] : marks) {
      Expr pd = diff(fe, *mk);
      if (pd.is_zero()) continue;
      std::array<uint32_t, 4> J{a->dx[0], a->dx[1], a->dx[2], a->dx[3]};
      out = out + coeff(a->fn->id == jv_.Wf->id ? 0 : 1, J) * substitute(pd, thaw);
    }
    return out;
  }

 private:
  struct AtomLess {
    bool operator()(const AtomPtr& a, const AtomPtr& b) const { return atom_cmp(a, b) < 0; }
  };

  static int last_dir(const std::array<uint32_t, 4>& J) {
    if (J[3]) return 3;
    if (J[2]) return 2;
    if (J[1]) return 1;
    if (J[0]) return 0;
    return -1;
  }

  bool is_jet(const AtomPtr& a) const {
    return a->k == AKind::App && (a->fn->id == jv_.Wf->id || a->fn->id == jv_.Pf->id);
  }

  void collect(const Expr& e, std::map<AtomPtr, char, AtomLess>& found) const {
    for (auto& tm : e.t) {
      for (auto& f : tm.ev) collect_atom(f.a, found);
      for (auto& oa : tm.od) collect_atom(oa, found);
    }
  }

  void collect_atom(const AtomPtr& a, std::map<AtomPtr, char, AtomLess>& found) const {
    if (is_jet(a)) {
      found.emplace(a, 0);
      return;
    }
    if (a->k == AKind::App)
      for (auto& ar : a->args) collect(ar, found);
    else if (a->k == AKind::ExpF || a->k == AKind::LnF)
      collect(a->arg, found);
  }

  JetVars jv_;
  GeneralVectorField v_;
  std::array<Expr, 4> zeta_;
  std::map<Key, Expr> phi_;
};

// the ten second-extension coefficients that act on the model's residuals
inline std::map<std::string, Expr> prolong_coeffs(const JetVars& jv,
                                                  const GeneralVectorField& v) {
  Prolongation pr(jv, v);
  std::map<std::string, Expr> out;
  out["Om_x"] = pr.coeff(1, {1, 0, 0, 0});
  out["Om_t"] = pr.coeff(1, {0, 1, 0, 0});
  out["Lam_xt"] = pr.coeff(0, {1, 1, 0, 0});
  out["Lam_ttheta1"] = pr.coeff(0, {0, 1, 1, 0});
  out["Lam_xtheta2"] = pr.coeff(0, {1, 0, 0, 1});
  out["Lam_theta1theta2"] = pr.coeff(0, {0, 0, 1, 1});
  out["Om_xt"] = pr.coeff(1, {1, 1, 0, 0});
  out["Om_ttheta1"] = pr.coeff(1, {0, 1, 1, 0});
  out["Om_xtheta2"] = pr.coeff(1, {1, 0, 0, 1});
  out["Om_theta1theta2"] = pr.coeff(1, {0, 0, 1, 1});
  return out;
}

// split an expression into groups with identical derivative-record content;
// bare fields and base coordinates stay inside the coefficients, and symbolic
// powers with distinct exponents count as distinct records
inline std::vector<Expr> jet_monomial_groups(const JetVars& jv, const Expr& e) {
  Printer pn(*jv.ws);
  auto jet_part = [&](const AtomPtr& a) -> bool {
    if (a->k != AKind::App) return false;
    if (a->fn->id != jv.Wf->id && a->fn->id != jv.Pf->id) return false;
    uint32_t total = 0;
    for (auto d : a->dx) total += d;
    return total > 0;
  };
  std::map<std::string, Expr> groups;
  for (auto& tm : e.t) {
    std::vector<std::string> ks;
    for (auto& f : tm.ev)
      if (jet_part(f.a)) {
        std::string d = f.a->fn->name;
        for (auto c : f.a->dx) d += "." + std::to_string(c);
        ks.push_back(d + "^" + pn.exponent(f.e));
      }
    for (auto& oa : tm.od)
      if (jet_part(oa)) {
        std::string d = oa->fn->name;
        for (auto c : oa->dx) d += "." + std::to_string(c);
        ks.push_back(d + "^1");
      }
    std::sort(ks.begin(), ks.end());
    std::string key;
    for (auto& k : ks) key += k + "*";
    Expr te;
    te.t.push_back(tm);
    auto it = groups.find(key);
    if (it == groups.end())
      groups.emplace(std::move(key), std::move(te));
    else
      it->second = it->second + te;
  }
  std::vector<Expr> out;
  for (auto& [k, g] : groups) {
    (void)k;
    if (!g.is_zero()) out.push_back(g);
  }
  return out;
}

// prolong the candidate over both residuals, eliminate the bare time
// derivatives through the system itself (one pass, after full expansion), and
// return the surviving groups; an empty list means the candidate is a symmetry
inline std::vector<Expr> determining_equations(const JetVars& jv, const GeneralVectorField& v,
                                               const ModelParams& p) {
  Residual R = residual(jv.W, jv.P, jv.sc, p);
  Prolongation pr(jv, v);
  Expr Pt = diff(jv.P, *jv.sc.t);
  Expr Wt = diff(jv.W, *jv.sc.t);
  Expr rhs1 = Pt - R.d1;
  // the second right-hand side mentions the first record, so put it on shell
  // too; after that neither value contains a bare top record and one
  // simultaneous pass suffices
  Bindings pre;
  pre.bind_atom(detail::the_atom(Pt), rhs1);
  Expr rhs2 = substitute(Wt - R.d2, pre);
  Bindings onshell;
  onshell.bind_atom(detail::the_atom(Pt), rhs1);
  onshell.bind_atom(detail::the_atom(Wt), rhs2);
  std::vector<Expr> out;
  for (const Expr* dk : {&R.d1, &R.d2}) {
    Expr applied = substitute(pr.apply(*dk), onshell);
    for (auto& g : jet_monomial_groups(jv, applied)) out.push_back(std::move(g));
  }
  return out;
}

inline bool verify_symmetry(const JetVars& jv, const GeneralVectorField& v,
                            const ModelParams& p) {
  return determining_equations(jv, v, p).empty();
}

// the six-parameter solution family of the determining system: dilations,
// translations, and the two odd flows; C are bosonic coefficients, K odd ones.
// Wval and Pval are whatever stands in for the two dependent variables, jet
// expressions or plain fiber symbols alike.
inline GeneralVectorField symmetry_family(const SuperCoords& sc, const Expr& Wval,
                                          const Expr& Pval, const ParamRat& gamma,
                                          const std::array<Expr, 4>& C,
                                          const std::array<Expr, 2>& K) {
  Expr x = sym_expr(sc.x), t = sym_expr(sc.t);
  Expr th1 = sym_expr(sc.th1), th2 = sym_expr(sc.th2);
  GeneralVectorField v;
  v.xi = scaled(C[0] * x, ParamRat(2)) + C[1] - K[0] * th1;
  v.tau = scaled(C[2] * t, ParamRat(2)) + C[3] - K[1] * th2;
  v.rho1 = C[0] * th1 + K[0];
  v.rho2 = C[2] * th2 + K[1];
  v.lam = (scaled(C[0], ParamRat(3)) - C[2]) * Wval;
  v.om = (scaled(C[0], (gamma + ParamRat(5)) / (gamma + ParamRat(1))) +
          scaled(C[2], (gamma - ParamRat(3)) / (gamma + ParamRat(1)))) *
         Pval;
  return v;
}

inline GeneralVectorField symmetry_family(const JetVars& jv, const ParamRat& gamma,
                                          const std::array<Expr, 4>& C,
                                          const std::array<Expr, 2>& K) {
  return symmetry_family(jv.sc, jv.W, jv.P, gamma, C, K);
}

// basis generators in the algebra module's order: the two dilations, the two
// translations, and the two odd flows; the odd ones are returned multiplied
// by the supplied fermionic constant so the ansatz parities hold
inline GeneralVectorField generator_field(const JetVars& jv, int which, const ParamRat& gamma,
                                          const Expr& odd_unit) {
  std::array<Expr, 4> C{Expr::zero(), Expr::zero(), Expr::zero(), Expr::zero()};
  std::array<Expr, 2> K{Expr::zero(), Expr::zero()};
  switch (which) {
    case 0: C[0] = Expr::one(); break;
    case 1: C[1] = Expr::one(); break;
    case 2: K[0] = odd_unit; break;
    case 3: C[2] = Expr::one(); break;
    case 4: C[3] = Expr::one(); break;
    case 5: K[1] = odd_unit; break;
    default: throw SpgasError("generator index out of range");
  }
  return symmetry_family(jv, gamma, C, K);
}

}  // namespace spgas

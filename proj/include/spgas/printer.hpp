#pragma once

// Deterministic text form for expressions.  The grammar it emits is the one
// parser.hpp reads back; parse(print(e)) == e for every normalized e.

#include <sstream>
#include <string>
#include <vector>

#include "expr.hpp"

namespace spgas {

class Printer {
 public:
  explicit Printer(const Workspace& ws) : ws_(ws) {}

  std::string expr(const Expr& e) const {
    if (e.t.empty()) return "0";
    std::string out;
    for (size_t i = 0; i < e.t.size(); ++i) {
      bool neg = false;
      std::string body = term(e.t[i], &neg);
      if (i == 0) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      out += body;
    }
    return out;
  }

  std::string atom(const AtomPtr& a) const {
    switch (a->k) {
      case AKind::Sym:
        return a->sym->name;
      case AKind::App:
        return app(a);
      case AKind::ExpF:
        return "exp(" + expr(a->arg) + ")";
      case AKind::LnF:
        return "ln(" + expr(a->arg) + ")";
      case AKind::SignF:
        return "(-1)^(" + paramrat(a->sgn) + ")";
      case AKind::NumPow:
        return numpow_base(a->base);
      case AKind::PowP:
        return "(" + paramrat(a->pbase) + ")";
    }
    return "?";
  }

  std::string paramrat(const ParamRat& c) const {
    std::string out = poly(c.n);
    if (c.n.t.size() > 1) out = "(" + out + ")";
    if (!(c.d.is_const() && c.d.const_value() == 1)) out += "*(" + poly(c.d) + ")^(-1)";
    return out;
  }

 private:
  const Workspace& ws_;

  static std::string rat(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
  }

  static std::string numpow_base(const Rat& b) {
    using boost::multiprecision::denominator;
    if (denominator(b) == 1) return rat(b);
    return "(" + rat(b) + ")";
  }

  std::string mono(const Mono& m, const Rat& c, bool lead_sign) const {
    std::string out;
    Rat ab = c < 0 ? Rat(-c) : c;
    if (c < 0)
      out += lead_sign ? "-" : " - ";
    else if (!lead_sign)
      out += " + ";
    bool havecoef = !(ab == 1) || m.empty();
    if (havecoef) out += rat(ab);
    bool first = !havecoef;
    for (auto& [v, e] : m) {
      if (!first || havecoef) out += "*";
      out += ws_.param_name(v);
      if (e > 1) out += "^(" + std::to_string(e) + ")";
      first = false;
    }
    return out;
  }

  std::string poly(const Poly& p) const {
    if (p.is_zero()) return "0";
    std::string out;
    for (size_t i = p.t.size(); i-- > 0;)
      out += mono(p.t[i].first, p.t[i].second, i + 1 == p.t.size());
    return out;
  }

  std::string app(const AtomPtr& a) const {
    std::string out = a->fn->name;
    bool sub = false;
    for (size_t i = 0; i < a->dx.size(); ++i)
      for (uint32_t k = 0; k < a->dx[i]; ++k) {
        if (!sub) out += "_";
        sub = true;
        out += a->fn->slots[i];
      }
    bool defaults = true;
    for (size_t i = 0; i < a->args.size(); ++i) {
      int64_t sd = a->fn->slot_default[i];
      if (sd == -1) {
        defaults = false;
        break;
      }
      Expr d = default_arg_expr(ws_, sd);
      if (!(a->args[i] == d)) {
        defaults = false;
        break;
      }
    }
    if (!defaults) {
      out += "(";
      for (size_t i = 0; i < a->args.size(); ++i) {
        if (i) out += ",";
        out += expr(a->args[i]);
      }
      out += ")";
    }
    return out;
  }

 public:
  // coefficient split c = r * (nhat/d); emits |r|, reports the sign
  std::string term(const Term& tm, bool* neg) const {
    Poly nhat;
    Rat r = poly_content_factor(tm.c.n, &nhat);
    *neg = r < 0;
    if (r < 0) r = -r;
    std::vector<std::string> parts;
    bool nhat_one = nhat.is_const() && nhat.const_value() == 1;
    bool d_one = tm.c.d.is_const() && tm.c.d.const_value() == 1;
    if (!(r == 1) || (nhat_one && d_one && tm.ev.empty() && tm.od.empty())) parts.push_back(rat(r));
    if (!nhat_one) {
      std::string s = poly(nhat);
      if (nhat.t.size() > 1) s = "(" + s + ")";
      parts.push_back(s);
    }
    if (!d_one) parts.push_back("(" + poly(tm.c.d) + ")^(-1)");
    for (auto& f : tm.ev) {
      std::string s = atom(f.a);
      if (!f.e.is_one()) s += "^(" + exponent(f.e) + ")";
      parts.push_back(s);
    }
    for (auto& oa : tm.od) parts.push_back(atom(oa));
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
      if (i) out += "*";
      out += parts[i];
    }
    return out;
  }

  std::string exponent(const ParamRat& p) const {
    if (auto r = p.try_rat()) return rat(*r);
    return paramrat(p);
  }
};

// signed text of each term in canonical order, for reports and diffs
inline std::vector<std::string> term_strings(const Workspace& ws, const Expr& e) {
  Printer p(ws);
  std::vector<std::string> out;
  out.reserve(e.t.size());
  for (auto& tm : e.t) {
    bool neg = false;
    std::string s = p.term(tm, &neg);
    out.push_back((neg ? "-" : "+") + s);
  }
  return out;
}

}  // namespace spgas

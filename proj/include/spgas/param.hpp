#pragma once

// Coefficient field for the expression kernel: exact rational functions in the
// bosonic parameters (gamma, A, k, ...).  Parameters are identified by integer
// ids issued by the workspace registry; this header knows nothing about names.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spgas {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct SpgasError : std::runtime_error {
  explicit SpgasError(const std::string& m) : std::runtime_error(m) {}
};
struct DivideByZero : SpgasError {
  DivideByZero() : SpgasError("division by zero") {}
};
struct NonInvertibleBody : SpgasError {
  explicit NonInvertibleBody(const std::string& m) : SpgasError(m) {}
};
struct ParityMismatch : SpgasError {
  explicit ParityMismatch(const std::string& m) : SpgasError(m) {}
};

inline Rat rat_pow(const Rat& b, long e) {
  if (e == 0) return Rat(1);
  if (b == 0) {
    if (e < 0) throw DivideByZero();
    return Rat(0);
  }
  Rat base = e < 0 ? Rat(1) / b : b;
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  Rat acc(1);
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Monomials: sorted (variable id, exponent>0) lists under degree-lex order.

using Mono = std::vector<std::pair<uint32_t, uint32_t>>;

inline uint64_t mono_degree(const Mono& m) {
  uint64_t d = 0;
  for (auto& [v, e] : m) d += e;
  return d;
}

// degree-lex; smaller ids carry more lexicographic weight
inline int mono_cmp(const Mono& a, const Mono& b) {
  uint64_t da = mono_degree(a), db = mono_degree(b);
  if (da != db) return da < db ? -1 : 1;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    uint32_t va = i < a.size() ? a[i].first : UINT32_MAX;
    uint32_t vb = j < b.size() ? b[j].first : UINT32_MAX;
    if (va < vb) return 1;   // a has the smaller id with positive exponent
    if (vb < va) return -1;
    if (a[i].second != b[j].second) return a[i].second > b[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  return 0;
}

inline Mono mono_mul(const Mono& a, const Mono& b) {
  Mono r;
  r.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) r.push_back(a[i++]);
    else if (b[j].first < a[i].first) r.push_back(b[j++]);
    else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  for (; j < b.size(); ++j) r.push_back(b[j]);
  return r;
}

// a / b, or nullopt when b does not divide a termwise
inline std::optional<Mono> mono_div(const Mono& a, const Mono& b) {
  Mono r;
  size_t i = 0;
  for (auto& [v, e] : b) {
    while (i < a.size() && a[i].first < v) r.push_back(a[i++]);
    if (i >= a.size() || a[i].first != v || a[i].second < e) return std::nullopt;
    if (a[i].second > e) r.emplace_back(v, a[i].second - e);
    ++i;
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over Rat.

class Poly {
 public:
  // terms sorted ascending under mono_cmp; all coefficients nonzero
  std::vector<std::pair<Mono, Rat>> t;

  Poly() = default;
  explicit Poly(const Rat& c) {
    if (c != 0) t.emplace_back(Mono{}, c);
  }
  explicit Poly(long c) : Poly(Rat(c)) {}
  static Poly var(uint32_t id) {
    Poly p;
    p.t.emplace_back(Mono{{id, 1}}, Rat(1));
    return p;
  }

  bool is_zero() const { return t.empty(); }
  bool is_const() const { return t.empty() || (t.size() == 1 && t[0].first.empty()); }
  Rat const_value() const { return t.empty() ? Rat(0) : t[0].second; }

  void vars_into(std::set<uint32_t>& out) const {
    for (auto& [m, c] : t)
      for (auto& [v, e] : m) out.insert(v);
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.t.reserve(a.t.size() + b.t.size());
    size_t i = 0, j = 0;
    while (i < a.t.size() && j < b.t.size()) {
      int c = mono_cmp(a.t[i].first, b.t[j].first);
      if (c < 0) r.t.push_back(a.t[i++]);
      else if (c > 0) r.t.push_back(b.t[j++]);
      else {
        Rat s = a.t[i].second + b.t[j].second;
        if (s != 0) r.t.emplace_back(a.t[i].first, s);
        ++i;
        ++j;
      }
    }
    for (; i < a.t.size(); ++i) r.t.push_back(a.t[i]);
    for (; j < b.t.size(); ++j) r.t.push_back(b.t[j]);
    return r;
  }
  friend Poly operator-(const Poly& a) {
    Poly r = a;
    for (auto& [m, c] : r.t) c = -c;
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::map<Mono, Rat, decltype([](const Mono& x, const Mono& y) { return mono_cmp(x, y) < 0; })> acc;
    for (auto& [ma, ca] : a.t)
      for (auto& [mb, cb] : b.t) {
        Mono m = mono_mul(ma, mb);
        auto it = acc.find(m);
        if (it == acc.end()) acc.emplace(std::move(m), ca * cb);
        else {
          it->second += ca * cb;
          if (it->second == 0) acc.erase(it);
        }
      }
    Poly r;
    r.t.assign(acc.begin(), acc.end());
    return r;
  }
  Poly scaled(const Rat& c) const {
    if (c == 0) return Poly();
    Poly r = *this;
    for (auto& [m, k] : r.t) k *= c;
    return r;
  }
  Poly pow(unsigned n) const {
    Poly acc(Rat(1));
    Poly base = *this;
    while (n) {
      if (n & 1) acc = acc * base;
      if (n >>= 1) base = base * base;
    }
    return acc;
  }

  bool operator==(const Poly& o) const { return t == o.t; }

  uint32_t degree_in(uint32_t v) const {
    uint32_t d = 0;
    for (auto& [m, c] : t)
      for (auto& [mv, me] : m)
        if (mv == v) d = std::max(d, me);
    return d;
  }

  // dense coefficient list in v, index = exponent of v
  std::vector<Poly> coeffs_in(uint32_t v) const {
    std::vector<Poly> out(degree_in(v) + 1);
    for (auto& [m, c] : t) {
      uint32_t e = 0;
      Mono rest;
      for (auto& [mv, me] : m) {
        if (mv == v) e = me;
        else rest.push_back({mv, me});
      }
      Poly term;
      term.t.emplace_back(std::move(rest), c);
      out[e] = out[e] + term;
    }
    return out;
  }
  static Poly assemble(const std::vector<Poly>& cs, uint32_t v) {
    Poly r;
    Poly xv = var(v);
    Poly xpow(Rat(1));
    for (size_t e = 0; e < cs.size(); ++e) {
      if (e) xpow = xpow * xv;
      r = r + cs[e] * xpow;
    }
    return r;
  }

  Poly bind(uint32_t v, const Rat& val) const {
    Poly r;
    for (auto& [m, c] : t) {
      Rat cc = c;
      Mono rest;
      for (auto& [mv, me] : m) {
        if (mv == v) cc *= rat_pow(val, me);
        else rest.push_back({mv, me});
      }
      Poly term;
      if (cc != 0) term.t.emplace_back(std::move(rest), cc);
      r = r + term;
    }
    return r;
  }
};

inline int poly_cmp(const Poly& a, const Poly& b) {
  if (a.t.size() != b.t.size()) return a.t.size() < b.t.size() ? -1 : 1;
  for (size_t i = 0; i < a.t.size(); ++i) {
    int c = mono_cmp(a.t[i].first, b.t[i].first);
    if (c) return c;
    if (a.t[i].second != b.t[i].second) return a.t[i].second < b.t[i].second ? -1 : 1;
  }
  return 0;
}

// scalar r and canonical part C with P = r*C; C has coprime integer
// coefficients and positive leading (degree-lex highest) coefficient
inline Rat poly_content_factor(const Poly& p, Poly* canon_out = nullptr) {
  if (p.is_zero()) {
    if (canon_out) *canon_out = Poly();
    return Rat(0);
  }
  Int g(0), l(1);
  for (auto& [m, c] : p.t) {
    g = boost::multiprecision::gcd(g, boost::multiprecision::numerator(c));
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(c));
  }
  Rat r(g, l);
  if (p.t.back().second < 0) r = -r;
  if (canon_out) *canon_out = p.scaled(Rat(1) / r);
  return r;
}
inline Poly poly_canon(const Poly& p) {
  Poly c;
  poly_content_factor(p, &c);
  return c;
}

// exact multivariate division (throws if not exact)
inline Poly poly_divexact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DivideByZero();
  Poly r = a, q;
  const Mono& lmb = b.t.back().first;
  const Rat& lcb = b.t.back().second;
  while (!r.is_zero()) {
    auto m = mono_div(r.t.back().first, lmb);
    if (!m) throw SpgasError("poly_divexact: not divisible");
    Poly term;
    term.t.emplace_back(std::move(*m), r.t.back().second / lcb);
    q = q + term;
    r = r - term * b;
  }
  return q;
}

namespace detail {

// pseudo-remainder of a by b in variable v: lc(b)^(da-db+1)*a mod b
inline Poly prem(const Poly& a, const Poly& b, uint32_t v) {
  uint32_t da = a.degree_in(v), db = b.degree_in(v);
  auto ca = a.coeffs_in(v);
  auto cb = b.coeffs_in(v);
  const Poly& l = cb[db];
  long e = static_cast<long>(da) - static_cast<long>(db) + 1;
  std::vector<Poly> r = ca;
  while (true) {
    while (!r.empty() && r.back().is_zero()) r.pop_back();
    if (r.empty() || r.size() - 1 < db) break;
    size_t dr = r.size() - 1;
    Poly lr = r.back();
    std::vector<Poly> nr(dr);  // l*r - lr*x^(dr-db)*b, dropping the top term
    for (size_t i = 0; i < dr; ++i) {
      nr[i] = l * r[i];
      size_t off = dr - db;
      if (i >= off && (i - off) <= db) nr[i] = nr[i] - lr * cb[i - off];
    }
    r = std::move(nr);
    --e;
  }
  Poly rem;
  for (size_t i = 0; i < r.size(); ++i) {
    Poly term = r[i];
    for (size_t k = 0; k < i; ++k) term = term * Poly::var(v);
    rem = rem + term;
  }
  for (; e > 0; --e) rem = rem * l;
  return rem;
}

}  // namespace detail

Poly poly_gcd(const Poly& A, const Poly& B);

inline Poly poly_content_in(const Poly& p, uint32_t v) {
  Poly g;
  for (auto& c : p.coeffs_in(v))
    if (!c.is_zero()) g = poly_gcd(g, c);
  return g;
}

// canonical gcd (integer-primitive, positive leading coefficient); gcd of two
// nonzero constants is 1 since the coefficients form a field
inline Poly poly_gcd(const Poly& A, const Poly& B) {
  if (A.is_zero()) return B.is_zero() ? Poly() : poly_canon(B);
  if (B.is_zero()) return poly_canon(A);
  if (A.is_const() || B.is_const()) return Poly(Rat(1));
  std::set<uint32_t> vs;
  A.vars_into(vs);
  B.vars_into(vs);
  uint32_t v = *vs.rbegin();
  if (A.degree_in(v) == 0) return poly_gcd(A, poly_content_in(B, v));
  if (B.degree_in(v) == 0) return poly_gcd(poly_content_in(A, v), B);

  Poly cA = poly_content_in(A, v), cB = poly_content_in(B, v);
  Poly c = poly_gcd(cA, cB);
  Poly F = poly_divexact(A, cA), G = poly_divexact(B, cB);
  if (F.degree_in(v) < G.degree_in(v)) std::swap(F, G);
  Poly g(Rat(1)), h(Rat(1));
  while (true) {
    uint32_t dF = F.degree_in(v), dG = G.degree_in(v);
    uint32_t delta = dF - dG;
    Poly R = detail::prem(F, G, v);
    if (R.is_zero()) {
      Poly pp = poly_divexact(G, poly_content_in(G, v));
      return poly_canon(c * pp);
    }
    if (R.degree_in(v) == 0) return poly_canon(c);
    F = G;
    G = poly_divexact(R, g * h.pow(delta));
    g = F.coeffs_in(v).back();
    if (delta > 0) h = poly_divexact(g.pow(delta), h.pow(delta - 1));
  }
}

// ---------------------------------------------------------------------------
// Canonical fractions of polynomials: the coefficient field.

class ParamRat {
 public:
  Poly n, d;  // d integer-primitive with positive leading coefficient

  ParamRat() : n(), d(Rat(1)) {}
  ParamRat(const Rat& c) : n(c), d(Rat(1)) {}
  ParamRat(long c) : n(Rat(c)), d(Rat(1)) {}
  ParamRat(int c) : n(Rat(c)), d(Rat(1)) {}
  ParamRat(const Poly& nn, const Poly& dd) : n(nn), d(dd) { normalize(); }
  static ParamRat var(uint32_t id) {
    ParamRat r;
    r.n = Poly::var(id);
    return r;
  }

  void normalize() {
    if (d.is_zero()) throw DivideByZero();
    if (n.is_zero()) {
      d = Poly(Rat(1));
      return;
    }
    Poly g = poly_gcd(n, d);
    if (!(g.is_const() && g.const_value() == 1)) {
      n = poly_divexact(n, g);
      d = poly_divexact(d, g);
    }
    Poly dc;
    Rat r = poly_content_factor(d, &dc);
    d = dc;
    n = n.scaled(Rat(1) / r);
  }

  bool is_zero() const { return n.is_zero(); }
  bool is_one() const { return n == d; }
  bool is_const() const { return n.is_const() && d.is_const(); }
  std::optional<Rat> try_rat() const {
    if (!is_const()) return std::nullopt;
    return n.const_value() / d.const_value();
  }
  std::optional<long> try_integer() const {
    auto r = try_rat();
    if (!r) return std::nullopt;
    if (boost::multiprecision::denominator(*r) != 1) return std::nullopt;
    Int num = boost::multiprecision::numerator(*r);
    if (num > 1000000000 || num < -1000000000) return std::nullopt;
    return num.convert_to<long>();
  }

  void vars_into(std::set<uint32_t>& out) const {
    n.vars_into(out);
    d.vars_into(out);
  }

  friend ParamRat operator+(const ParamRat& a, const ParamRat& b) {
    return ParamRat(a.n * b.d + b.n * a.d, a.d * b.d);
  }
  friend ParamRat operator-(const ParamRat& a) {
    ParamRat r = a;
    r.n = -r.n;
    return r;
  }
  friend ParamRat operator-(const ParamRat& a, const ParamRat& b) { return a + (-b); }
  friend ParamRat operator*(const ParamRat& a, const ParamRat& b) {
    return ParamRat(a.n * b.n, a.d * b.d);
  }
  friend ParamRat operator/(const ParamRat& a, const ParamRat& b) {
    if (b.is_zero()) throw DivideByZero();
    return ParamRat(a.n * b.d, a.d * b.n);
  }
  ParamRat pow(long e) const {
    if (e >= 0) {
      ParamRat r(1);
      for (long i = 0; i < e; ++i) r = r * (*this);
      return r;
    }
    ParamRat inv = ParamRat(1) / (*this);
    ParamRat r(1);
    for (long i = 0; i < -e; ++i) r = r * inv;
    return r;
  }

  bool operator==(const ParamRat& o) const { return n == o.n && d == o.d; }
  bool operator!=(const ParamRat& o) const { return !(*this == o); }

  ParamRat bind(uint32_t v, const Rat& val) const {
    return ParamRat(n.bind(v, val), d.bind(v, val));
  }
};

inline int paramrat_cmp(const ParamRat& a, const ParamRat& b) {
  int c = poly_cmp(a.n, b.n);
  if (c) return c;
  return poly_cmp(a.d, b.d);
}

// binomial coefficient C(p,k) = p(p-1)...(p-k+1)/k! with symbolic p
inline ParamRat binom(const ParamRat& p, unsigned k) {
  ParamRat acc(1);
  Rat fact(1);
  for (unsigned i = 0; i < k; ++i) {
    acc = acc * (p - ParamRat(Rat(i)));
    fact *= Rat(i + 1);
  }
  return acc * ParamRat(Rat(1) / fact);
}

// reduce an exponent of the formal sign atom (-1)^e modulo 2: integer
// coefficients map into {0,1}; non-integer coefficients are kept as-is
inline ParamRat sign_exponent_reduce(const ParamRat& e) {
  if (!e.d.is_const() || e.d.const_value() != 1) return e;
  Poly r;
  for (auto& [m, c] : e.n.t) {
    if (boost::multiprecision::denominator(c) != 1) {
      Poly term;
      term.t.emplace_back(m, c);
      r = r + term;
      continue;
    }
    Int num = boost::multiprecision::numerator(c);
    Int mod = num % 2;
    if (mod < 0) mod += 2;
    if (mod != 0) {
      Poly term;
      term.t.emplace_back(m, Rat(mod));
      r = r + term;
    }
  }
  return ParamRat(r, Poly(Rat(1)));
}

}  // namespace spgas

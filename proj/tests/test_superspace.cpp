#include <catch2/catch_amalgamated.hpp>

#include "spgas/parser.hpp"
#include "spgas/printer.hpp"
#include "spgas/random_expr.hpp"
#include "spgas/superspace.hpp"

using namespace spgas;

namespace {

struct Env {
  Workspace ws;
  SuperCoords c;
  Printer printer;

  Env() : c(std_coords(ws)), printer(ws) {
    ws.sym("mu", SKind::FermiParam);
    ws.sym("nu", SKind::FermiParam);
    ws.func("f", 0, {"x", "t"});
  }

  Expr S(const char* n) { return sym_expr(ws.find_sym(n)); }

  std::vector<Expr> samples(int n, uint64_t seed) {
    RandExpr gen(seed);
    gen.even_blocks = {S("x"), S("t"), default_app(ws, ws.find_func("f"))};
    gen.odd_blocks = {S("theta1"), S("theta2"), S("mu"), S("nu")};
    std::vector<Expr> out;
    for (int i = 0; i < n; ++i) out.push_back(gen.gen(3));
    return out;
  }
};

}  // namespace

TEST_CASE("covariant derivative and supersymmetry generator basics") {
  Env v;
  Expr x = v.S("x"), t = v.S("t"), th1 = v.S("theta1"), th2 = v.S("theta2");
  CHECK(apply_D(1, x, v.c) == th1);
  CHECK(apply_Q(1, x, v.c) == -th1);
  CHECK(apply_Q(2, t, v.c) == -th2);
  CHECK(apply_D(1, apply_D(2, th1 * th2, v.c), v.c) == -Expr::one());
  Expr e = x * th1;
  CHECK(apply_D(1, e, v.c) == x);
  CHECK(apply_D(1, apply_D(1, e, v.c), v.c) == diff(e, *v.c.x));
  Expr e2 = x * th1 * th2;
  CHECK(apply_Q(1, apply_Q(1, e2, v.c), v.c) == -diff(e2, *v.c.x));
}

TEST_CASE("operators flip parity") {
  Env v;
  auto smp = v.samples(20, 31);
  for (auto& e : smp) {
    for (int par : {0, 1}) {
      RandExpr g(7);
      g.even_blocks = {v.S("x"), v.S("t")};
      g.odd_blocks = {v.S("theta1"), v.S("theta2"), v.S("mu")};
      Expr h = g.gen_parity(par, 2);
      for (int i : {1, 2}) {
        Expr d = apply_D(i, h, v.c);
        if (!d.is_zero()) CHECK(*d.parity() == 1 - par);
        Expr q = apply_Q(i, h, v.c);
        if (!q.is_zero()) CHECK(*q.parity() == 1 - par);
      }
    }
    (void)e;
  }
}

TEST_CASE("all ten operator identities hold on randomized superfields") {
  Env v;
  auto rows = check_operator_algebra(v.c, v.samples(40, 32));
  REQUIRE(rows.size() == 10);
  for (auto& r : rows) {
    INFO(r.name);
    CHECK(r.pass);
  }
}

TEST_CASE("a sign-corrupted covariant derivative is caught") {
  Env v;
  auto bad_D = [&v](int i, const Expr& e) {
    if (i == 1) return diff(e, *v.c.th1) - sym_expr(v.c.th1) * diff(e, *v.c.x);
    return apply_D(i, e, v.c);
  };
  auto rows = check_operator_algebra(v.c, v.samples(10, 33), bad_D);
  bool d1_failed = false;
  for (auto& r : rows)
    if (r.name == "{D1,D1}=2dx") d1_failed = !r.pass;
  CHECK(d1_failed);
}

TEST_CASE("fermionic Taylor expansion of odd-slot functions") {
  Env v;
  auto namer = [](const char* prefix) {
    return [prefix](unsigned mask) { return std::string(prefix) + std::to_string(mask); };
  };

  auto f1 = v.ws.func("tf1", 0, {"theta2"});
  Expr e1 = fermionic_taylor(v.ws, f1, {v.S("theta2")}, namer("Ca"));
  Expr expect1 = sym_expr(v.ws.find_sym("Ca0")) + sym_expr(v.ws.find_sym("Ca1")) * v.S("theta2");
  CHECK(e1 == expect1);
  CHECK(v.ws.find_sym("Ca0")->kind == SKind::BosonParam);
  CHECK(v.ws.find_sym("Ca1")->kind == SKind::FermiParam);

  auto f2 = v.ws.func("tf2", 0, {"theta1", "theta2"});
  Expr e2 = fermionic_taylor(v.ws, f2, {v.S("theta1"), v.S("theta2")}, namer("Cb"));
  Expr expect2 = sym_expr(v.ws.find_sym("Cb0")) + sym_expr(v.ws.find_sym("Cb1")) * v.S("theta1") +
                 sym_expr(v.ws.find_sym("Cb2")) * v.S("theta2") +
                 sym_expr(v.ws.find_sym("Cb3")) * v.S("theta1") * v.S("theta2");
  CHECK(e2 == expect2);
  CHECK(*e2.parity() == 0);

  Expr shifted = v.S("theta2") - v.S("nu") * v.S("x");
  auto f3 = v.ws.func("tf3", 0, {"theta2"});
  Expr e3 = fermionic_taylor(v.ws, f3, {shifted}, namer("Cc"));
  Expr expect3 = sym_expr(v.ws.find_sym("Cc0")) + sym_expr(v.ws.find_sym("Cc1")) * shifted;
  CHECK(e3 == expect3);

  auto f4 = v.ws.func("tf4", 0, {"x", "theta2"});
  Expr e4 = fermionic_taylor(v.ws, f4, {v.S("x"), v.S("theta2")}, namer("Cd"));
  auto c0 = v.ws.find_func("Cd0");
  auto c1 = v.ws.find_func("Cd1");
  REQUIRE(c0);
  REQUIRE(c1);
  CHECK(c0->parity == 0);
  CHECK(c1->parity == 1);
  Expr expect4 = app_expr(c0, {0}, {v.S("x")}) + app_expr(c1, {0}, {v.S("x")}) * v.S("theta2");
  CHECK(e4 == expect4);

  auto fo = v.ws.func("tf5", 1, {"theta2"});
  Expr e5 = fermionic_taylor(v.ws, fo, {v.S("theta2")}, namer("Ce"));
  CHECK(*e5.parity() == 1);
  CHECK(v.ws.find_sym("Ce0")->kind == SKind::FermiParam);
  CHECK(v.ws.find_sym("Ce1")->kind == SKind::BosonParam);

  CHECK_THROWS_AS(fermionic_taylor(v.ws, f1, {v.S("x")}, namer("Cf")), ParityMismatch);
}

TEST_CASE("change of variables: shifted odd coordinate") {
  Env v;
  auto tau1 = v.ws.sym("tau1", SKind::FermiVar);
  auto fw = v.ws.func("W", 0, {"x", "t", "theta1", "theta2"});
  auto fa = v.ws.func("A", 0, {"t", "tau1", "theta2"});
  Expr mu = v.S("mu");

  InvariantMap m = make_map(v.ws);
  m.defs.emplace_back(tau1, v.S("theta1") - mu * v.S("x"));
  m.inverse.bind_sym(v.c.th1, sym_expr(tau1) + mu * v.S("x"));
  m.inverse.bind_func(fw, {v.c.x, v.c.t, v.c.th1, v.c.th2},
                      app_expr(fa, {0, 0, 0},
                               {v.S("t"), v.S("theta1") - mu * v.S("x"), v.S("theta2")}));

  Expr wx = diff(default_app(v.ws, fw), *v.c.x);
  Expr out = change_variables(wx, m);
  Expr a_tau1 = app_expr(fa, {0, 1, 0}, {v.S("t"), sym_expr(tau1), v.S("theta2")});
  CHECK(out == -(mu * a_tau1));

  InvariantMap ident = make_map(v.ws);
  Expr e = v.S("x") * v.S("theta1") + v.S("t");
  CHECK(change_variables(e, ident) == e);
}

TEST_CASE("change of variables: scaled odd coordinate with even weight") {
  Env v;
  auto tau2 = v.ws.sym("tau2", SKind::FermiVar);
  auto fw = v.ws.func("W", 0, {"x", "t", "theta1", "theta2"});
  auto fa = v.ws.func("A", 0, {"x", "theta1", "tau2"});
  Expr t = v.S("t");

  InvariantMap m = make_map(v.ws);
  m.defs.emplace_back(tau2, gpow(t, ParamRat(Rat(-1, 2))) * v.S("theta2"));
  m.inverse.bind_sym(v.c.th2, gpow(t, ParamRat(Rat(1, 2))) * sym_expr(tau2));
  Expr templ = gpow(t, ParamRat(Rat(-1, 2))) *
               app_expr(fa, {0, 0, 0},
                        {v.S("x"), v.S("theta1"), gpow(t, ParamRat(Rat(-1, 2))) * v.S("theta2")});
  m.inverse.bind_func(fw, {v.c.x, v.c.t, v.c.th1, v.c.th2}, templ);

  Expr wt = diff(default_app(v.ws, fw), *v.c.t);
  Expr out = change_variables(wt, m);
  Expr a = default_app(v.ws, fa);
  Expr a_tau2 = app_expr(fa, {0, 0, 1}, a.t[0].ev[0].a->args);
  Expr expect = scaled(gpow(t, ParamRat(Rat(-3, 2))) * a, ParamRat(Rat(-1, 2))) +
                scaled(gpow(t, ParamRat(Rat(-3, 2))) * sym_expr(tau2) * a_tau2, ParamRat(Rat(-1, 2)));
  CHECK(out == expect);
}

TEST_CASE("bad inverse bindings are rejected") {
  Env v;
  auto tau1 = v.ws.sym("tau1", SKind::FermiVar);
  InvariantMap m = make_map(v.ws);
  m.defs.emplace_back(tau1, v.S("theta1") - v.S("mu") * v.S("x"));
  m.inverse.bind_sym(v.c.th1, sym_expr(tau1) - v.S("mu") * v.S("x"));
  CHECK_THROWS_AS(change_variables(v.S("theta1"), m), NonInvertibleMap);
}

TEST_CASE("change of variables round-trips on randomized superfields") {
  Env v;
  auto tau1 = v.ws.sym("tau1", SKind::FermiVar);
  auto sigma = v.ws.sym("sigma", SKind::BosonVar);
  Expr mu = v.S("mu");

  InvariantMap m = make_map(v.ws);
  m.defs.emplace_back(tau1, v.S("theta1") - mu * v.S("x"));
  m.defs.emplace_back(sigma, v.S("t") + v.S("x"));
  m.inverse.bind_sym(v.c.th1, sym_expr(tau1) + mu * v.S("x"));
  m.inverse.bind_sym(v.c.t, sym_expr(sigma) - v.S("x"));

  Bindings fwd;
  for (auto& [s, def] : m.defs) fwd.bind_sym(s, def);

  RandExpr gen(44);
  gen.even_blocks = {v.S("x"), v.S("t")};
  gen.odd_blocks = {v.S("theta1"), v.S("theta2"), v.S("mu")};
  for (int i = 0; i < 50; ++i) {
    Expr e = gen.gen(3);
    CHECK(substitute(change_variables(e, m), fwd) == e);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "spgas/parser.hpp"
#include "spgas/printer.hpp"
#include "spgas/random_expr.hpp"

using namespace spgas;

namespace {

struct Env {
  Workspace ws;
  SuperCoords c;
  Parser parser;
  Printer printer;

  Env() : c(std_coords(ws)), parser(ws, c), printer(ws) {
    ws.sym("gamma", SKind::BosonParam);
    ws.sym("mu", SKind::FermiParam);
    ws.sym("nu", SKind::FermiParam);
    ws.func("W", 0, {"x", "t", "theta1", "theta2"});
    ws.func("P", 0, {"x", "t", "theta1", "theta2"});
  }

  Expr S(const char* n) { return sym_expr(ws.find_sym(n)); }
  Expr rt(const Expr& e) { return parser.parse(printer.expr(e)); }
};

}  // namespace

TEST_CASE("grammar basics") {
  Env v;
  CHECK(v.parser.parse("theta1*theta1").is_zero());
  CHECK(v.parser.parse("theta2*theta1") == -(v.S("theta1") * v.S("theta2")));
  CHECK(v.parser.parse("3/2*x") == scaled(v.S("x"), ParamRat(Rat(3, 2))));
  CHECK(v.parser.parse("-x + 2*t - 1") ==
        -v.S("x") + scaled(v.S("t"), ParamRat(2)) - Expr::one());
  CHECK(v.parser.parse("x^(2)") == v.S("x") * v.S("x"));
  CHECK(v.parser.parse("x^(-1)*x") == Expr::one());
  CHECK(v.parser.parse("x^(gamma-2)") == gpow(v.S("x"), ParamRat::var(v.ws.find_sym("gamma")->id) - ParamRat(2)));
  CHECK(v.parser.parse("(x+t)*(x-t)") == v.S("x") * v.S("x") - v.S("t") * v.S("t"));
  CHECK(v.parser.parse("exp(x)*exp(-x)") == Expr::one());
  CHECK(v.parser.parse("0").is_zero());
}

TEST_CASE("jet subscripts parse left to right") {
  Env v;
  auto fw = v.ws.find_func("W");
  Expr w = default_app(v.ws, fw);
  auto args = w.t[0].ev[0].a->args;
  CHECK(v.parser.parse("W") == w);
  CHECK(v.parser.parse("W_x") == app_expr(fw, {1, 0, 0, 0}, args));
  CHECK(v.parser.parse("W_xt") == app_expr(fw, {1, 1, 0, 0}, args));
  Expr w12 = app_expr(fw, {0, 0, 1, 1}, args);
  CHECK(v.parser.parse("W_theta1theta2") == w12);
  CHECK(v.parser.parse("W_theta2theta1") == -w12);
  CHECK(v.parser.parse("W_theta1theta1").is_zero());
  CHECK(v.parser.parse("W_xtheta2") == app_expr(fw, {1, 0, 0, 1}, args));
}

TEST_CASE("covariant operator chains") {
  Env v;
  Expr x = v.S("x");
  CHECK(v.parser.parse("D1x") == v.S("theta1"));
  CHECK(v.parser.parse("D1(x)") == v.S("theta1"));
  CHECK(v.parser.parse("Q1x") == -v.S("theta1"));
  CHECK(v.parser.parse("Q2t") == -v.S("theta2"));
  CHECK(v.parser.parse("D1(D2(theta1*theta2))") == -Expr::one());
  CHECK(v.parser.parse("D1D2W") == v.parser.parse("D1(D2(W))"));
  Expr lhs = v.parser.parse("D1(D1(x*theta1))");
  CHECK(lhs == diff(v.parser.parse("x*theta1"), *v.c.x));
}

TEST_CASE("declarations extend the workspace") {
  Env v;
  CHECK(v.parser.try_declaration("boson sigma"));
  CHECK(v.parser.try_declaration("fermion tau1, tau2"));
  CHECK(v.parser.try_declaration("param k"));
  CHECK(v.parser.try_declaration("fconst lambda"));
  CHECK(v.parser.try_declaration("field A(sigma,tau1,tau2)"));
  CHECK(!v.parser.try_declaration("n1A-eq1 = x"));
  Expr a = v.parser.parse("A_tau1");
  CHECK(a.t.size() == 1);
  CHECK(v.parser.parse("A_tau1tau2") == -v.parser.parse("A_tau2tau1"));
  CHECK(v.parser.parse("lambda*lambda").is_zero());
}

TEST_CASE("fixture files: comments, continuations, labels") {
  Env v;
  std::string path = "test_fixture_tmp.sexp";
  {
    std::ofstream out(path);
    out << "# header comment\n";
    out << "boson sigma\n";
    out << "fermion tau2\n";
    out << "field A(sigma,tau2)\n";
    out << "\n";
    out << "eq1 = A_sigma + tau2*A_tau2sigma  # trailing comment\n";
    out << "eq2 = sigma*A\n";
    out << "   + A_tau2*tau2\n";
  }
  auto fx = v.parser.load_file(path);
  std::remove(path.c_str());
  REQUIRE(fx.entries.size() == 2);
  CHECK(fx.entries[0].first == "eq1");
  Expr a = v.parser.parse("A");
  Expr expect2 = v.parser.parse("sigma*A") + v.parser.parse("A_tau2*tau2");
  CHECK(fx.at("eq2") == expect2);
  CHECK_THROWS_AS(fx.at("missing"), SpgasError);
  CHECK_THROWS_AS(v.parser.load_file("no_such_file.sexp"), SpgasError);
}

TEST_CASE("parse and print round-trip on randomized expressions") {
  Env v;
  ParamRat g = ParamRat::var(v.ws.find_sym("gamma")->id);
  RandExpr gen(21);
  gen.even_blocks = {v.S("x"),
                     v.S("t"),
                     gpow(v.S("x"), ParamRat(Rat(1, 2))),
                     gpow(v.S("t"), g),
                     exp_of(v.S("x") + v.S("t")),
                     ln_of(v.S("x")),
                     sign_pow(g),
                     numpow_atom(Rat(2), g),
                     powp_atom((g + ParamRat(5)) / (ParamRat(2) * g + ParamRat(2)), g - ParamRat(2)),
                     v.parser.parse("W_x"),
                     v.parser.parse("P_theta1theta2"),
                     Expr::coeff((g + ParamRat(5)) / (ParamRat(2) * g + ParamRat(2)))};
  gen.odd_blocks = {v.S("theta1"), v.S("theta2"), v.S("mu"), v.S("nu"),
                    v.parser.parse("W_theta1"), v.parser.parse("P_theta2")};
  for (int i = 0; i < 1000; ++i) {
    Expr e = gen.gen(3);
    CHECK(v.rt(e) == e);
  }
}

TEST_CASE("syntax and parity errors carry positions") {
  Env v;
  CHECK_THROWS_AS(v.parser.parse("x +"), ParseError);
  CHECK_THROWS_AS(v.parser.parse("unknownsym"), ParseError);
  CHECK_THROWS_AS(v.parser.parse("x^(theta1)"), ParseError);
  CHECK_THROWS_AS(v.parser.parse("W_sigma9"), ParseError);
  CHECK_THROWS_AS(v.parser.parse("x x"), ParseError);
  CHECK_THROWS_AS(v.parser.parse("theta1^(gamma)"), NonInvertibleBody);
}

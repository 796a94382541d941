#pragma once

// Expression-language parser.  Reads the same text the printer emits:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ['^' '(' expr ')']
//   atom   := number ['/' number] | ident | ident '_' subscript
//           | name '(' args ')' | '(' expr ')'
// Identifiers resolve against the workspace; D1/D2/Q1/Q2 act as covariant
// operator applications, either called (D1(D2(W))) or chained (D1D2W).
// Subscripts encode jet indices applied left to right (W_xt, P_theta1theta2).

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>

#include "superspace.hpp"

namespace spgas {

struct ParseError : SpgasError {
  ParseError(const std::string& m, size_t at)
      : SpgasError(m + " at offset " + std::to_string(at)) {}
};

inline std::string fixture_root() {
  if (const char* env = std::getenv("SPGAS_FIXTURES")) return env;
#ifdef SPGAS_FIXTURES_DEFAULT
  return SPGAS_FIXTURES_DEFAULT;
#else
  return "fixtures";
#endif
}

inline std::string fixture_path(const std::string& rel) { return fixture_root() + "/" + rel; }

class Parser {
 public:
  explicit Parser(Workspace& ws) : ws_(ws) {}
  Parser(Workspace& ws, SuperCoords coords) : ws_(ws), coords_(coords), has_coords_(true) {}

  Expr parse(const std::string& text) {
    src_ = text;
    pos_ = 0;
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError("trailing input", pos_);
    return e;
  }

  // declaration statements: boson/fermion/param/fconst names, field F(slots)
  bool try_declaration(const std::string& line) {
    size_t i = 0;
    auto word = [&]() {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      size_t s = i;
      while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_'))
        ++i;
      return line.substr(s, i - s);
    };
    std::string kw = word();
    SKind kind;
    if (kw == "boson") kind = SKind::BosonVar;
    else if (kw == "fermion") kind = SKind::FermiVar;
    else if (kw == "param") kind = SKind::BosonParam;
    else if (kw == "fconst") kind = SKind::FermiParam;
    else if (kw == "field" || kw == "ffield") {
      std::string name = word();
      if (name.empty()) throw SpgasError("field declaration without a name");
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size() || line[i] != '(') throw SpgasError("field declaration needs slots");
      ++i;
      std::vector<std::string> slots;
      while (true) {
        std::string s = word();
        if (s.empty()) throw SpgasError("bad slot list in field declaration");
        slots.push_back(s);
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i < line.size() && line[i] == ',') {
          ++i;
          continue;
        }
        if (i < line.size() && line[i] == ')') {
          ++i;
          break;
        }
        throw SpgasError("bad slot list in field declaration");
      }
      ws_.func(name, kw == "ffield" ? 1 : 0, slots);
      return true;
    } else {
      return false;
    }
    bool any = false;
    while (true) {
      std::string name = word();
      if (name.empty()) break;
      ws_.sym(name, kind);
      any = true;
      while (i < line.size() &&
             (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ','))
        ++i;
      if (i >= line.size()) break;
    }
    if (!any) throw SpgasError("declaration without names: " + line);
    return true;
  }

  struct Fixture {
    std::vector<std::pair<std::string, Expr>> entries;
    std::map<std::string, Expr> by_label;

    const Expr& at(const std::string& label) const {
      auto it = by_label.find(label);
      if (it == by_label.end()) throw SpgasError("fixture has no entry: " + label);
      return it->second;
    }
  };

  Fixture load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpgasError("cannot open fixture file: " + path);
    Fixture fx;
    std::string line, pending;
    auto flush = [&]() {
      if (pending.empty()) return;
      process_line(pending, fx);
      pending.clear();
    };
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (blank) {
        flush();
        continue;
      }
      bool cont = std::isspace(static_cast<unsigned char>(line[0])) != 0;
      if (cont && !pending.empty()) {
        pending += " " + line;
      } else {
        flush();
        pending = line;
      }
    }
    flush();
    return fx;
  }

 private:
  Workspace& ws_;
  SuperCoords coords_{};
  bool has_coords_ = false;
  std::string src_;
  size_t pos_ = 0;

  void process_line(const std::string& line, Fixture& fx) {
    if (try_declaration(line)) return;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SpgasError("fixture line is neither declaration nor labeled expression: " + line);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string label = trim(line.substr(0, eq));
    if (label.empty()) throw SpgasError("fixture entry without a label: " + line);
    Expr e = parse(line.substr(eq + 1));
    fx.entries.emplace_back(label, e);
    fx.by_label[label] = e;
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Int lex_int() {
    skip_ws();
    size_t s = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (s == pos_) throw ParseError("expected a number", pos_);
    return Int(src_.substr(s, pos_ - s));
  }

  std::string lex_ident() {
    skip_ws();
    size_t s = pos_;
    if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_])))
      throw ParseError("expected an identifier", pos_);
    ++pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '_') {
      ++pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    return src_.substr(s, pos_ - s);
  }

  Expr parse_expr() {
    bool neg = eat('-');
    Expr acc = parse_term();
    if (neg) acc = -acc;
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        acc = acc + parse_term();
      } else if (c == '-') {
        ++pos_;
        acc = acc - parse_term();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    while (eat('*')) acc = acc * parse_factor();
    return acc;
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (peek() == '^') {
      ++pos_;
      expect('(');
      Expr ex = parse_expr();
      expect(')');
      base = gpow(base, exponent_value(ex));
    }
    return base;
  }

  ParamRat exponent_value(const Expr& e) {
    if (e.is_zero()) return ParamRat(0);
    if (e.t.size() == 1 && e.t[0].ev.empty() && e.t[0].od.empty()) return e.t[0].c;
    throw ParseError("exponent must be a parameter expression", pos_);
  }

  Expr parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Int num = lex_int();
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '/' && pos_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        ++pos_;
        Int den = lex_int();
        return Expr::num(Rat(num, den));
      }
      return Expr::num(Rat(num));
    }
    return parse_ident_atom(lex_ident());
  }

  static int op_prefix(const std::string& s, size_t at) {
    if (at + 2 > s.size()) return 0;
    char a = s[at], b = s[at + 1];
    if ((a == 'D' || a == 'Q') && (b == '1' || b == '2')) return a == 'D' ? (b == '1' ? 1 : 2) : (b == '1' ? 3 : 4);
    return 0;
  }

  Expr apply_op(int op, const Expr& e) {
    if (!has_coords_) throw SpgasError("operator chain used without registered supercoordinates");
    switch (op) {
      case 1: return apply_D(1, e, coords_);
      case 2: return apply_D(2, e, coords_);
      case 3: return apply_Q(1, e, coords_);
      default: return apply_Q(2, e, coords_);
    }
  }

  Expr parse_ident_atom(const std::string& tok) {
    std::string base = tok, sub;
    if (auto us = tok.find('_'); us != std::string::npos) {
      base = tok.substr(0, us);
      sub = tok.substr(us + 1);
    }
    if (base == "exp" || base == "ln") {
      if (!sub.empty()) throw ParseError("subscript on builtin " + base, pos_);
      expect('(');
      Expr a = parse_expr();
      expect(')');
      return base == "exp" ? exp_of(a) : ln_of(a);
    }
    if (auto s = ws_.find_sym(base)) {
      if (!sub.empty()) throw ParseError("subscript on plain symbol " + base, pos_);
      return sym_expr(s);
    }
    if (auto f = ws_.find_func(base)) return parse_app(f, sub);
    // covariant operator chains: D1(...), D1D2W, Q1Q2P_x
    if (int op = op_prefix(base, 0)) {
      if (base.size() == 2 && sub.empty() && peek() == '(') {
        ++pos_;
        Expr a = parse_expr();
        expect(')');
        return apply_op(op, a);
      }
      std::vector<int> ops;
      size_t at = 0;
      while (true) {
        int o = op_prefix(base, at);
        if (!o) break;
        std::string rest = base.substr(at + 2);
        if (rest.empty() && at + 2 < base.size()) break;
        ops.push_back(o);
        at += 2;
        if (ws_.find_sym(base.substr(at)) || ws_.find_func(base.substr(at))) break;
      }
      std::string rest = base.substr(at);
      Expr inner;
      if (auto s = ws_.find_sym(rest)) {
        if (!sub.empty()) throw ParseError("subscript on plain symbol " + rest, pos_);
        inner = sym_expr(s);
      } else if (auto f = ws_.find_func(rest)) {
        inner = parse_app(f, sub);
      } else {
        throw ParseError("unknown identifier " + tok, pos_);
      }
      for (size_t i = ops.size(); i-- > 0;) inner = apply_op(ops[i], inner);
      return inner;
    }
    throw ParseError("unknown identifier " + tok, pos_);
  }

  Expr parse_app(const std::shared_ptr<const FuncRec>& f, const std::string& sub) {
    std::vector<Expr> args;
    if (peek() == '(') {
      ++pos_;
      while (true) {
        args.push_back(parse_expr());
        if (eat(',')) continue;
        expect(')');
        break;
      }
      if (args.size() != f->slots.size())
        throw ParseError("arity mismatch for " + f->name, pos_);
    } else {
      for (auto sd : f->slot_default) {
        if (sd == -1) throw ParseError("function " + f->name + " needs explicit arguments", pos_);
        args.push_back(default_arg_expr(ws_, sd));
      }
    }
    std::vector<uint32_t> dx(f->slots.size(), 0);
    int sign = 1;
    size_t at = 0;
    while (at < sub.size()) {
      size_t best = 0, best_len = 0;
      for (size_t i = 0; i < f->slots.size(); ++i) {
        const std::string& sn = f->slots[i];
        if (sn.size() > best_len && sub.compare(at, sn.size(), sn) == 0) {
          best = i;
          best_len = sn.size();
        }
      }
      if (!best_len) throw ParseError("bad jet subscript '" + sub + "' for " + f->name, pos_);
      int s = bump_deriv(*f, dx, best);
      if (!s) return Expr::zero();
      sign *= s;
      at += best_len;
    }
    Expr a = app_expr(f, std::move(dx), std::move(args));
    return sign < 0 ? -a : a;
  }
};

}  // namespace spgas

#pragma once

// Seeded random expression generator for property tests.

#include <random>

#include "expr.hpp"

namespace spgas {

class RandExpr {
 public:
  std::mt19937_64 rng;
  std::vector<Expr> even_blocks;
  std::vector<Expr> odd_blocks;

  explicit RandExpr(uint64_t seed) : rng(seed) {}

  Rat rand_rat() {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    int n = num(rng);
    if (n == 0) n = 1;
    return Rat(n, den(rng));
  }

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); }

  // product of random blocks with `nodd` odd factors
  Expr term(int neven, int nodd) {
    Expr r = Expr::num(rand_rat());
    for (int i = 0; i < neven && !even_blocks.empty(); ++i) {
      Expr b = even_blocks[pick(even_blocks.size())];
      if (pick(4) == 0) b = b * b;
      r = r * b;
    }
    for (int i = 0; i < nodd && !odd_blocks.empty(); ++i) r = r * odd_blocks[pick(odd_blocks.size())];
    return r;
  }

  Expr gen(int nterms) {
    Expr r;
    for (int i = 0; i < nterms; ++i)
      r = r + term(static_cast<int>(pick(3)), static_cast<int>(pick(3)));
    return r;
  }

  // homogeneous in Grassmann parity
  Expr gen_parity(int par, int nterms) {
    Expr r;
    for (int i = 0; i < nterms; ++i) {
      int nodd = par ? (pick(2) ? 1 : 3) : (pick(2) ? 0 : 2);
      r = r + term(static_cast<int>(pick(3)), nodd);
    }
    return r;
  }
};

}  // namespace spgas

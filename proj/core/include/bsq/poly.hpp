#pragma once

#include "bsq/expr.hpp"

namespace bsq {

/// One atomic factor base^exp of a monomial. The base is an atom (Sym, Jet,
/// Fun, Exp-marker, Log, or an unexpandable Sum/Num); the exponent is a
/// normalized expression, Num in the common case.
struct Factor {
  ExprPtr base;
  ExprPtr exp;
};

using Monomial = std::vector<Factor>;  // sorted by base

int compare(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return compare(a, b) < 0;
  }
};

/// Expanded multinomial: sum of coeff * monomial.
struct Poly {
  std::map<Monomial, Rat, MonomialLess> terms;

  void add_term(const Monomial& m, const Rat& c);
  bool is_zero() const { return terms.empty(); }
};

Poly to_poly(const ExprPtr& e, const NormalizeOptions& opt = {});
ExprPtr monomial_expr(const Monomial& m);
ExprPtr poly_expr(const Poly& p);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b, const NormalizeOptions& opt);
Poly poly_neg(const Poly& a);

}  // namespace bsq

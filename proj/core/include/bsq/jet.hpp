#pragma once

#include "bsq/expr.hpp"

#include <map>

namespace bsq {

/// Infinitesimal generator V = p d/dx + q d/dt + r d/du with p, q, r
/// expressions in (x, t, u) only.
struct VectorField {
  ExprPtr p, q, r;
};

/// Derivative multi-index (i, j) = (#x, #t); mixed partials are symmetric.
struct JetIndex {
  int i = 0, j = 0;
  friend bool operator<(const JetIndex& a, const JetIndex& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  }
  friend bool operator==(const JetIndex& a, const JetIndex& b) {
    return a.i == b.i && a.j == b.j;
  }
};

struct ProlongedField {
  VectorField base;
  std::map<JetIndex, ExprPtr> eta;  // eta[{0,0}] == base.r
};

/// Total derivative D_x ('x') or D_t ('t'); raises jet order by one.
/// Throws std::invalid_argument past the jet-order maximum (6).
ExprPtr total_derivative(const ExprPtr& e, char dir);
inline ExprPtr Dx(const ExprPtr& e) { return total_derivative(e, 'x'); }
inline ExprPtr Dt(const ExprPtr& e) { return total_derivative(e, 't'); }

/// Characteristic Q = r - p*u_x - q*u_t.
ExprPtr characteristic(const VectorField& V);

enum class ProlongMethod { characteristic, recursive };

/// Prolong V up to jet order `order` (<= 4). Both constructions agree;
/// the recursive one exists as the independent cross-check.
ProlongedField prolong(const VectorField& V, int order,
                       ProlongMethod method = ProlongMethod::characteristic);

/// pr V(F) = p dF/dx + q dF/dt + sum_J eta^J dF/du_J.
ExprPtr apply_prolonged(const ProlongedField& PV, const ExprPtr& F);

/// Left side of the PDE u_tt - u_xx + (f(u)+u_xx)_xx = 0 with the second
/// x-derivative expanded. Symbolic overload keeps f as an unknown-function
/// atom; the other substitutes a concrete f(u) expression.
ExprPtr boussinesq_F();
ExprPtr boussinesq_F(const ExprPtr& f_of_u);

}  // namespace bsq

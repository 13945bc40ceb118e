#pragma once

#include "bsq/classify.hpp"

namespace bsq {

/// A similarity reduction of the PDE: substituting `ansatz` into the PDE
/// left side equals separation * ode (with the similarity variable z).
struct Reduction {
  std::string kind;   // "travelling" | "scaling"
  ExprPtr z;          // similarity variable as an expression in x, t
  ExprPtr ansatz;     // u(x,t) written through h(...)
  ExprPtr ode;        // expression in z, h, h', ..., h''''; = 0 is the ODE
  ExprPtr separation; // pure-t factor extracted during derivation
  ExprPtr integrated; // travelling wave only: h'' + (l^2-1)h + f(h) - k1 z - k2
};

struct SeparationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// z = x - lambda*t, u = h(z). The derived fourth-order ODE is the second
/// z-derivative of the twice-integrated form.
Reduction travelling_wave(const ExprPtr& lambda, const FSpec& f);

/// Table 2 scaling reduction for the power/log/exp families
/// (z = x/sqrt(t)). The power exponent n must be an exact rational.
Reduction scaling(const FFamily& fam);

/// The reduced z-only ODE (h'''' coefficient scaled to leading
/// coefficient 1); convenience accessor mirroring the derivation.
ExprPtr derive_ode(const Reduction& red);

/// Randomized equality up to one overall nonzero constant factor.
bool equiv_up_to_factor(const ExprPtr& e1, const ExprPtr& e2,
                        const EquivOptions& opt = {});

/// Compare the derived reduced ODE against the printed Table 3 expression
/// (i = 1: power with k = n d a^n; i = 2: log; i = 3: exp with h = e^{g'}).
/// Mismatches are recorded as failing rows, never corrected.
Report check_table3(int i, const FFamily& fam, const EquivOptions& opt = {});

/// True iff D_z(candidate) equals multiplier * ode under equiv.
bool check_first_integral(const ExprPtr& ode, const ExprPtr& candidate,
                          const ExprPtr& multiplier, const EquivOptions& opt = {});

Json to_json(const Reduction& red);

}  // namespace bsq

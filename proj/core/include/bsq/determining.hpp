#pragma once

#include "bsq/jet.hpp"
#include "bsq/report.hpp"

namespace bsq {

/// f(u) of the PDE: symbolic (f, f', f'', ... kept as unknown-function
/// atoms) when concrete is null, otherwise an expression in u.
struct FSpec {
  ExprPtr concrete;  // null => symbolic
  bool symbolic() const { return concrete == nullptr; }
};

/// Determining system for the infinitesimals: equations in (x, t, u) and
/// the unknown functions p, q, r (q absent in the nonclassical system,
/// where q == 1). Unknowns appear as p(x,t,u) atoms with derivative
/// multi-indices p{i,j,k}(x,t,u).
struct DeterminingSystem {
  std::string method;  // "classical" | "nonclassical"
  std::vector<ExprPtr> equations;
  std::vector<std::string> basis;  // splitting monomial per equation
  FSpec f;
};

/// Classical invariance condition pr V(F) = 0 on the solution manifold
/// (u_tt and its differential consequences eliminated), split over the
/// remaining jet monomials.
DeterminingSystem build_classical(const FSpec& f);

/// Nonclassical (q == 1) system: the surface condition u_t = r - p u_x and
/// all differential consequences substituted, then u_xxxx and higher pure
/// x-jets eliminated through the PDE on the surface, then split over the
/// free coordinates u_x, u_xx, u_xxx.
DeterminingSystem build_nonclassical(const FSpec& f);

/// Substitute a candidate (p,q,r) into every equation; exact vanishing via
/// normalize/is_zero first, randomized equivalence to zero as fallback.
/// For nonclassical systems candidate.q is ignored.
Report residuals(const DeterminingSystem& S, const VectorField& candidate,
                 const EquivOptions& opt = {});

/// Numeric residual check for candidates only available as evaluators
/// (e.g. the nonclassical (p,r) built from sampled h(t)). Each unknown is
/// a callable receiving (x,t,u) and the derivative multi-index.
struct SampleBox {
  double x_lo = -1.0, x_hi = 1.0;
  double t_lo = 1.0, t_hi = 2.0;
  double u_lo = -1.0, u_hi = 1.0;
};

Report residuals_numeric(const DeterminingSystem& S, const FunCallable& p,
                         const FunCallable& r, int points = 100,
                         const SampleBox& box = {},
                         std::uint64_t seed = kDefaultEquivSeed,
                         double tol = 1e-8);

Json to_json(const DeterminingSystem& S);

}  // namespace bsq

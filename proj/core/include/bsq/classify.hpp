#pragma once

#include "bsq/determining.hpp"

namespace bsq {

enum class FamilyTag { arbitrary, power, log, exp, quadratic };

std::string to_string(FamilyTag t);

/// Detected f(u) family with its parameters. Parameters are expressions
/// (rational constants in the concrete case, symbols like a, n in the
/// parametric case); absent entries are null.
struct FFamily {
  FamilyTag tag = FamilyTag::arbitrary;
  ExprPtr a, b, c, d, n, k;
  ExprPtr f() const;  // reconstructs f(u) from the parameters
};

/// Pattern-match f against d*(a*u+b)^n + k*u + c, d*log(a*u+b) + k*u + c,
/// d*exp(a*u+b) + k*u + c and d*u^2 + b*u + c. Falls back to arbitrary.
FFamily detect_family(const ExprPtr& f);

/// V1 = d/dx, V2 = d/dt, plus the Table 1 scaling generator for the
/// power/log/exp families.
std::vector<VectorField> generators_for(const FFamily& fam);

/// Substitute the affine ansatz p = a1 x + a2, q = b1 t + b2, r = c1 u + c2
/// into the classical determining system, split into a linear system over
/// the six coefficients, and return an exact nullspace basis as fields.
std::vector<VectorField> ansatz_solve(const FSpec& f);

Json to_json(const FFamily& fam);

}  // namespace bsq

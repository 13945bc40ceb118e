#pragma once

#include "bsq/numverify.hpp"

namespace bsq {

/// Adaptive Simpson quadrature with a relative error target.
double integrate_1d(const std::function<double(double)>& g, double a, double b,
                    double rel_tol = 1e-9);

/// Travelling-wave quadrature: for f = d(a u + b)^n + u (m = n + 1, m != 0)
///   sign * sqrt(a m / 2) * Int_{h_ref}^{h} (-a m (k2 s + k3) - d (a s + b)^m)^{-1/2} ds
/// and for the log family (n = -1 formally, log_family = true)
///   sign * sqrt(a / 2) * Int_{h_ref}^{h} (-a (k2 s + k3) - d log(a s + b))^{-1/2} ds.
/// Returns z + k4. Throws EvalError when the radicand is not positive.
struct QuadratureSpec {
  double a = 1, b = 0, d = 1;
  double n = 2;
  bool log_family = false;
  double k2 = 0, k3 = 0, k4 = 0;
  int sign = +1;
  double h_ref = 0;
};
double quadrature_z(const QuadratureSpec& qs, double h);

/// Invert the relation for h(z) by bisection on [h_lo, h_hi].
double quadrature_h(const QuadratureSpec& qs, double z, double h_lo, double h_hi);

/// Weierstrass elliptic function by Laurent series plus argument doubling;
/// ddp is from the identity p'' = 6 p^2 - g2/2.
struct WeierstrassParams {
  double g2 = 0, g3 = 0;
};
struct WeierstrassValue {
  double p = 0, dp = 0, ddp = 0;
};
WeierstrassValue weierstrass(double z, const WeierstrassParams& wp);

/// Solutions of (h')^2 = k3 h^3 + k4 with h(t_begin) = h0 and h'(t_begin)
/// of sign hp_sign. Forms: "constant" (k3 = k4 = 0), "linear" (k3 = 0),
/// "pole" h = 4/(k3 (t - t_pole)^2) (k4 = 0), "numeric" otherwise
/// (integrated as h'' = (3/2) k3 h^2 together with J' = h/(h')^2).
struct HSolution {
  std::string form;
  double k3 = 0, k4 = 0;
  double t_begin = 0, t_end = 0;
  double h0 = 0, slope = 0;  // linear: h = h0 + slope (t - t_begin)
  double t_pole = 0;         // pole form
  std::shared_ptr<SampledFunction> samples;  // numeric: (h, h', J)
  double eval(int order, double t) const;    // h, h', h'', h'''
};
HSolution solve_h(double k3, double k4, double t_begin, double t_end, double h0,
                  int hp_sign, double tol = 1e-10);

/// h as an unknown-function callable H(t) with derivative orders 0..3.
FunCallable h_callable(const HSolution& h);

/// Antiderivative J(t) of h/(h')^2 normalized by J(t_ref) = j_ref, with
/// derivative orders 0..3 via the closure (h')^2 = k3 h^3 + k4.
FunCallable j_callable(const HSolution& h, double t_ref, double j_ref = 0.0);

/// Nonclassical (q == 1) infinitesimals for f = d u^2 + b u + c, written
/// over the atoms H(t) and J(t) with p1 = H'/(2H), p2 = k1 p1 J + k2 p1.
/// `paper` is the published form, recorded verbatim; `derived` is the form
/// this library derives from its own determining system.
enum class NonclassicalVariant { paper, derived };

struct NonclassicalFields {
  ExprPtr p, q, r;  // q == 1
};

NonclassicalFields nonclassical_fields(const ExprPtr& b, const ExprPtr& d,
                                       const ExprPtr& k1, const ExprPtr& k2,
                                       NonclassicalVariant variant);

/// Substitute the elementary pole solution H = 4/(k3 (t - t0)^2),
/// J = k3 (t - t0)^5 / 80, giving explicit (p, q, r) in (x, t, u).
VectorField elementary_fields(const NonclassicalFields& nf, const ExprPtr& k3,
                              const ExprPtr& t0);

/// Turn a symbolic field (in x, t, u and the atoms H(t), J(t)) into a
/// numeric callable on (x, t, u) supporting derivative multi-indices by
/// exact differentiation of the expression.
FunCallable field_callable(const ExprPtr& field, const FunCallable& H,
                           const FunCallable& J);

}  // namespace bsq

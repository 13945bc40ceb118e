#include "bsq/closedform.hpp"

#include <cmath>

namespace bsq {

namespace {

double simpson_rec(const std::function<double(double)>& g, double a, double b,
                   double fa, double fm, double fb, double whole, double eps,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = g(lm), frm = g(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return simpson_rec(g, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& g, double a, double b,
                    double rel_tol) {
  if (a == b) return 0.0;
  double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double eps = rel_tol * (std::fabs(whole) + 1e-30);
  return simpson_rec(g, a, b, fa, fm, fb, whole, eps, 48);
}

double quadrature_z(const QuadratureSpec& qs, double h) {
  double m = qs.n + 1.0;
  double pref;
  std::function<double(double)> integrand;
  if (qs.log_family) {
    pref = std::sqrt(qs.a / 2.0);
    integrand = [&qs](double s) {
      double rad = -qs.a * (qs.k2 * s + qs.k3) - qs.d * std::log(qs.a * s + qs.b);
      if (!(rad > 0.0)) throw EvalError("quadrature radicand nonpositive");
      return 1.0 / std::sqrt(rad);
    };
  } else {
    if (m == 0.0)
      throw std::invalid_argument("quadrature_z: n = -1 needs log_family");
    pref = std::sqrt(qs.a * m / 2.0);
    integrand = [&qs, m](double s) {
      double rad =
          -qs.a * m * (qs.k2 * s + qs.k3) - qs.d * std::pow(qs.a * s + qs.b, m);
      if (!(rad > 0.0)) throw EvalError("quadrature radicand nonpositive");
      return 1.0 / std::sqrt(rad);
    };
  }
  return double(qs.sign) * pref * integrate_1d(integrand, qs.h_ref, h);
}

double quadrature_h(const QuadratureSpec& qs, double z, double h_lo, double h_hi) {
  auto g = [&](double h) { return quadrature_z(qs, h) - z; };
  double glo = g(h_lo), ghi = g(h_hi);
  if (glo == 0.0) return h_lo;
  if (ghi == 0.0) return h_hi;
  if ((glo > 0.0) == (ghi > 0.0))
    throw std::invalid_argument("quadrature_h: z not bracketed by [h_lo, h_hi]");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (h_lo + h_hi);
    double gm = g(mid);
    if (gm == 0.0 || h_hi - h_lo < 1e-14 * (1.0 + std::fabs(mid))) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      h_lo = mid;
      glo = gm;
    } else {
      h_hi = mid;
    }
  }
  return 0.5 * (h_lo + h_hi);
}

WeierstrassValue weierstrass(double z, const WeierstrassParams& wp) {
  if (z == 0.0) throw EvalError("weierstrass: pole at z = 0");
  // Laurent coefficients: p(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}; the
  // doubling steps amplify rounding, so work in long double throughout.
  using LD = long double;
  constexpr int K = 30;
  LD g2 = wp.g2, g3 = wp.g3;
  LD c[K + 1] = {};
  c[2] = g2 / 20.0L;
  c[3] = g3 / 28.0L;
  for (int k = 4; k <= K; ++k) {
    LD s = 0.0L;
    for (int m = 2; m <= k - 2; ++m) s += c[m] * c[k - m];
    c[k] = 3.0L * s / ((2 * k + 1) * (k - 3));
  }
  double scale = std::max(
      {1.0, std::pow(std::fabs(wp.g2), 0.25), std::pow(std::fabs(wp.g3), 1.0 / 6.0)});
  double r = 0.25 / scale;
  LD zz = z;
  int doublings = 0;
  while (std::fabs(double(zz)) > r && doublings < 64) {
    zz *= 0.5L;
    ++doublings;
  }
  LD p = 1.0L / (zz * zz), dp = -2.0L / (zz * zz * zz);
  LD z2 = zz * zz, zpow = 1.0L;
  for (int k = 2; k <= K; ++k) {
    zpow *= z2;  // z^{2k-2}
    p += c[k] * zpow;
    dp += LD(2 * k - 2) * c[k] * zpow / zz;
  }
  for (int i = 0; i < doublings; ++i) {
    if (std::fabs(double(dp)) < 1e-300)
      throw EvalError("weierstrass: derivative vanishes during doubling");
    LD ddp = 6.0L * p * p - g2 / 2.0L;
    LD slope = ddp / dp;  // tangent to (p')^2 = 4p^3 - g2 p - g3
    LD pn = slope * slope / 4.0L - 2.0L * p;
    LD dpn = -(dp + slope * (pn - p));
    p = pn;
    dp = dpn;
  }
  return {double(p), double(dp), double(6.0L * p * p - g2 / 2.0L)};
}

double HSolution::eval(int order, double t) const {
  if (order < 0 || order > 5)
    throw EvalError("HSolution: derivative order out of range");
  if (form == "constant") return order == 0 ? h0 : 0.0;
  if (form == "linear") {
    if (order == 0) return h0 + slope * (t - t_begin);
    return order == 1 ? slope : 0.0;
  }
  if (form == "pole") {
    double tau = t - t_pole;
    if (tau == 0.0) throw EvalError("HSolution: pole");
    switch (order) {
      case 0: return 4.0 / (k3 * tau * tau);
      case 1: return -8.0 / (k3 * tau * tau * tau);
      case 2: return 24.0 / (k3 * std::pow(tau, 4));
      case 3: return -96.0 / (k3 * std::pow(tau, 5));
      case 4: return 480.0 / (k3 * std::pow(tau, 6));
      default: return -2880.0 / (k3 * std::pow(tau, 7));
    }
  }
  // numeric: close higher orders through h'' = (3/2) k3 h^2
  double hv = samples->value(t, 0), vv = samples->value(t, 1);
  switch (order) {
    case 0: return hv;
    case 1: return vv;
    case 2: return 1.5 * k3 * hv * hv;
    case 3: return 3.0 * k3 * hv * vv;
    case 4: return 3.0 * k3 * vv * vv + 4.5 * k3 * k3 * hv * hv * hv;
    default: return 22.5 * k3 * k3 * hv * hv * vv;
  }
}

HSolution solve_h(double k3, double k4, double t_begin, double t_end, double h0,
                  int hp_sign, double tol) {
  HSolution h;
  h.k3 = k3;
  h.k4 = k4;
  h.t_begin = t_begin;
  h.t_end = t_end;
  h.h0 = h0;
  if (k3 == 0.0 && k4 == 0.0) {
    h.form = "constant";
    return h;
  }
  if (k3 == 0.0) {
    if (k4 < 0.0)
      throw std::invalid_argument("solve_h: k3 = 0 needs k4 >= 0");
    h.form = "linear";
    h.slope = double(hp_sign) * std::sqrt(k4);
    return h;
  }
  if (k4 == 0.0) {
    if (k3 < 0.0 || h0 <= 0.0)
      throw std::invalid_argument("solve_h: pole form needs k3 > 0, h0 > 0");
    h.form = "pole";
    double off = 2.0 / std::sqrt(k3 * h0);
    // h' = -8/(k3 (t-tp)^3): sign of h' at t_begin picks the pole side
    h.t_pole = hp_sign > 0 ? t_begin + off : t_begin - off;
    if (hp_sign > 0 && h.t_pole <= t_end)
      throw IntegrationError("solve_h: solution blows up inside [t_begin, t_end]",
                             h.t_pole);
    return h;
  }
  double v0sq = k3 * h0 * h0 * h0 + k4;
  if (v0sq < 0.0)
    throw std::invalid_argument("solve_h: (h')^2 = k3 h^3 + k4 < 0 at h0");
  h.form = "numeric";
  double y0[3] = {h0, double(hp_sign) * std::sqrt(v0sq), 0.0};
  OdeRhs rhs = [k3](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = 1.5 * k3 * y[0] * y[0];
    d[2] = y[0] / (y[1] * y[1]);  // J' = h/(h')^2
  };
  h.samples = std::make_shared<SampledFunction>(
      integrate_ode(rhs, y0, t_begin, t_end, tol));
  return h;
}

FunCallable h_callable(const HSolution& h) {
  auto hp = std::make_shared<HSolution>(h);
  return [hp](std::span<const double> args, std::span<const int> didx) {
    double t = args.empty() ? 0.0 : args[0];
    int k = didx.empty() ? 0 : didx[0];
    return hp->eval(k, t);
  };
}

FunCallable j_callable(const HSolution& h, double t_ref, double j_ref) {
  auto hp = std::make_shared<HSolution>(h);
  double base;
  if (h.form == "constant")
    throw std::invalid_argument("j_callable: J undefined for constant h (h' = 0)");
  if (h.form == "linear") {
    base = 0.0;  // fixed below through the closed form
  } else if (h.form == "pole") {
    double tau = t_ref - h.t_pole;
    base = h.k3 * std::pow(tau, 5) / 80.0;
  } else {
    base = h.samples->value(t_ref, 2);
  }
  double shift = j_ref - (h.form == "linear"
                              ? (h.h0 * (t_ref - h.t_begin) +
                                 0.5 * h.slope * (t_ref - h.t_begin) *
                                     (t_ref - h.t_begin)) /
                                    h.k4
                              : base);
  return [hp, shift](std::span<const double> args, std::span<const int> didx) {
    double t = args.empty() ? 0.0 : args[0];
    int k = didx.empty() ? 0 : didx[0];
    const HSolution& H = *hp;
    if (H.form == "linear") {
      double s = t - H.t_begin;
      switch (k) {
        case 0: return (H.h0 * s + 0.5 * H.slope * s * s) / H.k4 + shift;
        case 1: return H.eval(0, t) / H.k4;
        case 2: return H.slope / H.k4;
        case 3: case 4: return 0.0;
        default: throw EvalError("j_callable: derivative order out of range");
      }
    }
    if (H.form == "pole") {
      double tau = t - H.t_pole;
      switch (k) {
        case 0: return H.k3 * std::pow(tau, 5) / 80.0 + shift;
        case 1: return H.k3 * std::pow(tau, 4) / 16.0;
        case 2: return H.k3 * std::pow(tau, 3) / 4.0;
        case 3: return 0.75 * H.k3 * tau * tau;
        case 4: return 1.5 * H.k3 * tau;
        default: throw EvalError("j_callable: derivative order out of range");
      }
    }
    double hv = H.samples->value(t, 0), vv = H.samples->value(t, 1);
    double k3 = H.k3;
    switch (k) {
      case 0: return H.samples->value(t, 2) + shift;
      case 1: return hv / (vv * vv);
      case 2: return 1.0 / vv - 3.0 * k3 * hv * hv * hv / (vv * vv * vv);
      case 3:
        return -10.5 * k3 * hv * hv / (vv * vv) +
               13.5 * k3 * k3 * std::pow(hv, 5) / std::pow(vv, 4);
      case 4:
        return -21.0 * k3 * hv / vv + 99.0 * k3 * k3 * std::pow(hv, 4) / std::pow(vv, 3) -
               81.0 * std::pow(k3, 3) * std::pow(hv, 7) / std::pow(vv, 5);
      default: throw EvalError("j_callable: derivative order out of range");
    }
  };
}

NonclassicalFields nonclassical_fields(const ExprPtr& b, const ExprPtr& d,
                                       const ExprPtr& k1, const ExprPtr& k2,
                                       NonclassicalVariant variant) {
  ExprPtr x = sym("x"), t = sym("t"), u = jetv(0, 0);
  ExprPtr H = fun("H", t), H1 = fun("H", t, 1);
  ExprPtr J = fun("J", t);
  ExprPtr p1 = H1 / (num(2) * H);
  ExprPtr p2 = k1 * p1 * J + k2 * p1;
  ExprPtr p1d = diff(p1, t), p2d = diff(p2, t);
  NonclassicalFields nf;
  nf.q = num(1);
  if (variant == NonclassicalVariant::paper) {
    nf.p = -d * (p1 * x + p2);
    nf.r = p1 * (p1d + num(2) * p1 * p1) * pow(x, 2) +
           (p1 * p2d + p2 * p1d + num(4) * p1 * p1 * p2) * x +
           num(2) * d * p1 * u + p2 * p2d + num(2) * p1 * p2 * p2 +
           (num(1) - b) * p1;
  } else {
    nf.p = p1 * x + p2;
    nf.r = -((num(2) * p1 * p1 * p1 + p1 * p1d) / d) * pow(x, 2) -
           ((num(4) * p1 * p1 * p2 + p1 * p2d + p2 * p1d) / d) * x -
           num(2) * p1 * u +
           ((num(1) - b) * p1 - num(2) * p1 * p2 * p2 - p2 * p2d) / d;
  }
  return nf;
}

VectorField elementary_fields(const NonclassicalFields& nf, const ExprPtr& k3,
                              const ExprPtr& t0) {
  ExprPtr t = sym("t");
  ExprPtr tau = t - t0;
  Binding sigma;
  sigma.funs["H"] = FunTemplate{{t}, num(4) * pow(k3, num(-1)) * pow(tau, num(-2))};
  sigma.funs["J"] = FunTemplate{{t}, k3 * pow(tau, 5) * num(1, 80)};
  VectorField V;
  V.p = normalize(substitute(nf.p, sigma));
  V.q = nf.q;
  V.r = normalize(substitute(nf.r, sigma));
  return V;
}

FunCallable field_callable(const ExprPtr& field, const FunCallable& H,
                           const FunCallable& J) {
  ExprPtr x = sym("x"), t = sym("t"), u = jetv(0, 0);
  auto cache = std::make_shared<std::map<std::vector<int>, ExprPtr>>();
  (*cache)[{0, 0, 0}] = field;
  return [=](std::span<const double> args, std::span<const int> didx) {
    std::vector<int> key(3, 0);
    for (std::size_t i = 0; i < didx.size() && i < 3; ++i) key[i] = didx[i];
    auto it = cache->find(key);
    if (it == cache->end()) {
      ExprPtr e = (*cache)[{0, 0, 0}];
      for (int i = 0; i < key[0]; ++i) e = diff(e, x);
      for (int j = 0; j < key[1]; ++j) e = diff(e, t);
      for (int k = 0; k < key[2]; ++k) e = diff(e, u);
      it = cache->emplace(key, normalize(e)).first;
    }
    EvalBinding sigma;
    if (args.size() > 0) sigma.vars[x] = args[0];
    if (args.size() > 1) sigma.vars[t] = args[1];
    if (args.size() > 2) sigma.vars[u] = args[2];
    sigma.funs["H"] = H;
    sigma.funs["J"] = J;
    return eval(it->second, sigma);
  };
}

}  // namespace bsq

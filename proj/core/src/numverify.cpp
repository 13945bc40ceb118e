#include "bsq/numverify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bsq {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kE[7] = {71.0 / 57600,  0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Hairer's dense-output weights.
constexpr double kD[7] = {-12715105075.0 / 11282082432.0,
                          0.0,
                          87487479700.0 / 32700410799.0,
                          -10690763975.0 / 1880347072.0,
                          701980252875.0 / 199316789632.0,
                          -1453857185.0 / 822651844.0,
                          69997945.0 / 29380423.0};

bool finite_all(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

double SampledFunction::t_begin() const { return grid_.front(); }
double SampledFunction::t_end() const { return grid_.back(); }
std::size_t SampledFunction::components() const { return ncomp_; }

const SampledFunction::Step& SampledFunction::locate(double t) const {
  if (steps_.empty()) throw IntegrationError("empty SampledFunction", t);
  double lo = t_begin(), hi = t_end();
  double pad = 1e-10 * (1.0 + std::fabs(lo) + std::fabs(hi));
  if (t < lo - pad || t > hi + pad)
    throw IntegrationError("dense-output query outside the integration range", t);
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t idx = it == grid_.begin() ? 0 : std::size_t(it - grid_.begin()) - 1;
  if (idx >= steps_.size()) idx = steps_.size() - 1;
  return steps_[idx];
}

double SampledFunction::value(double t, int comp) const {
  const Step& s = locate(t);
  double th = (t - s.t) / s.h;
  double omt = 1.0 - th;
  std::size_t c = std::size_t(comp);
  return s.r1[c] +
         th * (s.r2[c] + omt * (s.r3[c] + th * (s.r4[c] + omt * s.r5[c])));
}

double SampledFunction::derivative(double t, int comp) const {
  const Step& s = locate(t);
  double th = (t - s.t) / s.h;
  std::size_t c = std::size_t(comp);
  double dp = s.r2[c] + (1.0 - 2.0 * th) * s.r3[c] +
              th * (2.0 - 3.0 * th) * s.r4[c] +
              2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * s.r5[c];
  return dp / s.h;
}

std::string SampledFunction::to_text(
    const std::vector<std::pair<std::string, double>>& meta) const {
  std::ostringstream os;
  os.precision(17);
  for (auto& [k, v] : meta) os << "# " << k << " " << v << "\n";
  for (double t : grid_) {
    os << t;
    for (std::size_t c = 0; c < ncomp_; ++c) os << " " << value(t, int(c));
    os << "\n";
  }
  return os.str();
}

SampledFunction integrate_ode(const OdeRhs& rhs, std::span<const double> y0,
                              double t_begin, double t_end, double tol) {
  if (!(t_end > t_begin))
    throw std::invalid_argument("integrate_ode: need t_end > t_begin");
  const std::size_t n = y0.size();
  SampledFunction out;
  out.ncomp_ = n;
  out.grid_.push_back(t_begin);

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<std::vector<double>> k(7, std::vector<double>(n));
  std::vector<double> ytmp(n), ynew(n), err(n);

  double t = t_begin;
  double h = (t_end - t_begin) / 100.0;
  rhs(t, y, k[0]);
  if (!finite_all(k[0]))
    throw IntegrationError("non-finite right-hand side at the initial point", t);

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < 1e-14 * (1.0 + std::fabs(t)))
      throw IntegrationError("step size underflow (possible blow-up)", t);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
        ytmp[i] = y[i] + h * acc;
      }
      rhs(t + kC[s] * h, ytmp, k[s]);
      if (!finite_all(k[s]))
        throw IntegrationError("non-finite right-hand side (possible blow-up)", t);
    }
    // stage 7 argument ytmp is the 5th-order solution (FSAL)
    ynew = ytmp;
    double errnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double e = 0.0;
      for (int s = 0; s < 7; ++s) e += kE[s] * k[s][i];
      double sc = tol + tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      errnorm += (h * e / sc) * (h * e / sc);
    }
    errnorm = std::sqrt(errnorm / double(n));
    if (errnorm <= 1.0 && finite_all(ynew)) {
      SampledFunction::Step st;
      st.t = t;
      st.h = h;
      st.r1.resize(n);
      st.r2.resize(n);
      st.r3.resize(n);
      st.r4.resize(n);
      st.r5.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        double ydiff = ynew[i] - y[i];
        double bspl = h * k[0][i] - ydiff;
        st.r1[i] = y[i];
        st.r2[i] = ydiff;
        st.r3[i] = bspl;
        st.r4[i] = ydiff - h * k[6][i] - bspl;
        double acc = 0.0;
        for (int s = 0; s < 7; ++s) acc += kD[s] * k[s][i];
        st.r5[i] = h * acc;
      }
      out.steps_.push_back(std::move(st));
      t += h;
      out.grid_.push_back(t);
      y = ynew;
      k[0] = k[6];  // FSAL
    }
    double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
    h *= std::clamp(fac, 0.2, 5.0);
  }
  out.y_end_ = y;
  return out;
}

ExprPtr h4_expr(const Reduction& red) {
  ExprPtr h4 = fun("h", sym("z"), 4);
  ExprPtr e = normalize(h4 - red.ode);
  for (auto& a : atoms_of(e))
    if (equal(a, h4))
      throw std::logic_error("h4_expr: reduced ODE is not monic in h''''");
  return e;
}

OdeRhs ode_rhs(const Reduction& red) {
  ExprPtr h4e = h4_expr(red);
  ExprPtr z = sym("z");
  return [h4e, z](double t, std::span<const double> y, std::span<double> dydt) {
    EvalBinding sigma;
    sigma.vars[z] = t;
    std::vector<double> state(y.begin(), y.end());
    sigma.funs["h"] = [&state](std::span<const double>,
                               std::span<const int> didx) {
      int k = didx.empty() ? 0 : didx[0];
      if (k < 0 || std::size_t(k) >= state.size())
        throw EvalError("h derivative order out of range in ode_rhs");
      return state[std::size_t(k)];
    };
    for (std::size_t i = 0; i + 1 < y.size(); ++i) dydt[i] = y[i + 1];
    dydt[y.size() - 1] = eval(h4e, sigma);
  };
}

UEvaluator reduction_evaluator(const Reduction& red, const SampledFunction& h) {
  if (h.components() != 4)
    throw std::invalid_argument(
        "reduction_evaluator: need 4 components (h, h', h'', h''')");
  ExprPtr x = sym("x"), t = sym("t"), z = sym("z");
  ExprPtr h4e = h4_expr(red);
  // exact mixed derivatives of the ansatz, d^i/dx^i d^j/dt^j for i<=4, j<=2
  auto jets = std::make_shared<std::array<std::array<ExprPtr, 3>, 5>>();
  (*jets)[0][0] = red.ansatz;
  for (int i = 0; i <= 4; ++i) {
    if (i > 0) (*jets)[i][0] = diff((*jets)[i - 1][0], x);
    for (int j = 1; j <= 2; ++j) (*jets)[i][j] = diff((*jets)[i][j - 1], t);
  }
  auto hp = std::make_shared<SampledFunction>(h);
  auto hcall = std::make_shared<FunCallable>();
  *hcall = [hp, h4e, z, hcall](std::span<const double> args,
                               std::span<const int> didx) -> double {
    double zv = args.empty() ? 0.0 : args[0];
    int k = didx.empty() ? 0 : didx[0];
    if (k >= 0 && k <= 3) return hp->value(zv, k);
    if (k == 4) {
      EvalBinding sigma;
      sigma.vars[z] = zv;
      sigma.funs["h"] = *hcall;
      return eval(h4e, sigma);
    }
    throw EvalError("h derivative order out of range in reduction_evaluator");
  };
  auto at = [jets, hcall, x, t](int i, int j, double xv, double tv) {
    EvalBinding sigma;
    sigma.vars[x] = xv;
    sigma.vars[t] = tv;
    sigma.funs["h"] = *hcall;
    return eval((*jets)[std::size_t(i)][std::size_t(j)], sigma);
  };
  UEvaluator u;
  u.value = [at](double xv, double tv) { return at(0, 0, xv, tv); };
  u.jets = [at](int i, int j, double xv, double tv) {
    if (i < 0 || i > 4 || j < 0 || j > 2)
      throw EvalError("reduction_evaluator: jet order out of range");
    return at(i, j, xv, tv);
  };
  return u;
}

namespace {

using Fn1 = std::function<double(double)>;

double fd1(const Fn1& g, double x, double h) {
  return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
}

double fd2(const Fn1& g, double x, double h) {
  return (-g(x - 2 * h) + 16 * g(x - h) - 30 * g(x) + 16 * g(x + h) -
          g(x + 2 * h)) /
         (12 * h * h);
}

double fd4(const Fn1& g, double x, double h) {
  return (-(g(x - 3 * h) + g(x + 3 * h)) / 6.0 +
          2.0 * (g(x - 2 * h) + g(x + 2 * h)) -
          6.5 * (g(x - h) + g(x + h)) + (28.0 / 3.0) * g(x)) /
         (h * h * h * h);
}

// Both stencils are 4th-order accurate, so one Richardson refinement
// combines h and h/2 with weights (16, -1)/15.
double richardson(const std::function<double(double)>& d_at_step, double h,
                  bool enabled) {
  double coarse = d_at_step(h);
  if (!enabled) return coarse;
  double fine = d_at_step(h / 2.0);
  return (16.0 * fine - coarse) / 15.0;
}

}  // namespace

Report pde_residual(const UEvaluator& u, const ExprPtr& f_concrete,
                    std::span<const Point> points, const FdOptions& fd,
                    double tol) {
  Report rep;
  rep.label = "pde-residual";
  rep.tol = tol;
  ExprPtr u0 = jetv(0, 0);
  ExprPtr f1 = normalize(diff(f_concrete, u0));
  ExprPtr f2 = normalize(diff(f1, u0));
  double worst = 0.0;
  Point worst_pt{0.0, 0.0};
  for (auto& [xv, tv] : points) {
    double uv, ux, uxx, utt, uxxxx;
    if (u.jets) {
      uv = u.jets(0, 0, xv, tv);
      ux = u.jets(1, 0, xv, tv);
      uxx = u.jets(2, 0, xv, tv);
      utt = u.jets(0, 2, xv, tv);
      uxxxx = u.jets(4, 0, xv, tv);
    } else {
      Fn1 ut = [&](double xx) { return u.value(xx, tv); };
      Fn1 uxf = [&](double tt) { return u.value(xv, tt); };
      uv = u.value(xv, tv);
      ux = richardson([&](double h) { return fd1(ut, xv, h); }, fd.hx,
                      fd.richardson);
      uxx = richardson([&](double h) { return fd2(ut, xv, h); }, fd.hx,
                       fd.richardson);
      utt = richardson([&](double h) { return fd2(uxf, tv, h); }, fd.ht,
                       fd.richardson);
      uxxxx = richardson([&](double h) { return fd4(ut, xv, h); }, fd.hx4,
                         fd.richardson);
    }
    EvalBinding sigma;
    sigma.vars[u0] = uv;
    double fp = eval(f1, sigma);
    double fpp = eval(f2, sigma);
    double r = utt - uxx + fpp * ux * ux + fp * uxx + uxxxx;
    if (std::fabs(r) > worst) {
      worst = std::fabs(r);
      worst_pt = {xv, tv};
    }
  }
  std::ostringstream detail;
  detail.precision(6);
  detail << points.size() << " points, " << (u.jets ? "exact jets" : "finite differences")
         << ", worst at (x,t)=(" << worst_pt.first << "," << worst_pt.second << ")";
  rep.add("max |u_tt - u_xx + (f(u)+u_xx)_xx|", worst <= tol, worst, detail.str());
  return rep;
}

Report verify_reduction(const Reduction& red, const SampledFunction& h,
                        const ExprPtr& f_concrete, std::span<const Point> grid,
                        double tol) {
  UEvaluator u = reduction_evaluator(red, h);
  Report rep = pde_residual(u, f_concrete, grid, {}, tol);
  rep.label = "reduction-residual (" + red.kind + ")";
  return rep;
}

Report verify_surface_condition(const Field3& p, const Field3& r,
                                const UEvaluator& u, std::span<const Point> points,
                                double tol, const FdOptions& fd) {
  Report rep;
  rep.label = "surface-condition";
  rep.tol = tol;
  double worst = 0.0;
  Point worst_pt{0.0, 0.0};
  for (auto& [xv, tv] : points) {
    double uv = u.value(xv, tv);
    double ux, ut;
    if (u.jets) {
      ux = u.jets(1, 0, xv, tv);
      ut = u.jets(0, 1, xv, tv);
    } else {
      ux = richardson(
          [&](double h) {
            return fd1([&](double xx) { return u.value(xx, tv); }, xv, h);
          },
          fd.hx, fd.richardson);
      ut = richardson(
          [&](double h) {
            return fd1([&](double tt) { return u.value(xv, tt); }, tv, h);
          },
          fd.ht, fd.richardson);
    }
    double res = std::fabs(p(xv, tv, uv) * ux + ut - r(xv, tv, uv));
    if (res > worst) {
      worst = res;
      worst_pt = {xv, tv};
    }
  }
  std::ostringstream detail;
  detail.precision(6);
  detail << points.size() << " points, worst at (x,t)=(" << worst_pt.first << ","
         << worst_pt.second << ")";
  rep.add("max |p u_x + u_t - r|", worst <= tol, worst, detail.str());
  return rep;
}

}  // namespace bsq

#pragma once

#include "bsq/reduce.hpp"

#include <functional>

namespace bsq {

struct IntegrationError : std::runtime_error {
  double where;
  IntegrationError(std::string msg, double t)
      : std::runtime_error(std::move(msg)), where(t) {}
};

/// First-order system right-hand side: dydt = f(t, y).
using OdeRhs =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Adaptive Dormand-Prince 5(4) solution with per-step dense output
/// (Hairer's order-4 interpolant).
class SampledFunction {
 public:
  double t_begin() const;
  double t_end() const;
  std::size_t components() const;
  const std::vector<double>& grid() const { return grid_; }

  double value(double t, int comp = 0) const;
  double derivative(double t, int comp = 0) const;

  /// Columnar text: '# key value' header lines, then t y0 y1 ... rows.
  std::string to_text(const std::vector<std::pair<std::string, double>>& meta = {}) const;

 private:
  friend SampledFunction integrate_ode(const OdeRhs&, std::span<const double>,
                                       double, double, double);
  struct Step {
    double t, h;
    std::vector<double> r1, r2, r3, r4, r5;  // dense coefficients per component
  };
  const Step& locate(double t) const;
  std::vector<Step> steps_;
  std::vector<double> grid_;
  std::vector<double> y_end_;
  std::size_t ncomp_ = 0;
  bool forward_ = true;
};

SampledFunction integrate_ode(const OdeRhs& rhs, std::span<const double> y0,
                              double t_begin, double t_end, double tol = 1e-9);

/// y = (h, h', h'', h'''); the fourth derivative is red.ode solved for h''''.
OdeRhs ode_rhs(const Reduction& red);

/// The expression for h'''' implied by red.ode (monic leading coefficient).
ExprPtr h4_expr(const Reduction& red);

/// Numeric u(x,t). `jets(i,j,x,t)` returns the exact mixed derivative when
/// available; pde_residual falls back to finite differences otherwise.
struct UEvaluator {
  std::function<double(double x, double t)> value;
  std::function<double(int i, int j, double x, double t)> jets;  // may be null
};

/// Lift a reduction ansatz through an integrated h (4 components) to a
/// full u(x,t) evaluator with exact jets.
UEvaluator reduction_evaluator(const Reduction& red, const SampledFunction& h);

struct FdOptions {
  double hx = 1e-3;   // second-derivative stencils
  double ht = 1e-3;
  double hx4 = 2e-2;  // fourth-derivative stencil (rounding floor ~eps/h^4)
  bool richardson = true;
};

using Point = std::pair<double, double>;  // (x, t)

/// max |u_tt - u_xx + f''(u)u_x^2 + f'(u)u_xx + u_xxxx| over the points.
Report pde_residual(const UEvaluator& u, const ExprPtr& f_concrete,
                    std::span<const Point> points, const FdOptions& fd = {},
                    double tol = 1e-5);

Report verify_reduction(const Reduction& red, const SampledFunction& h,
                        const ExprPtr& f_concrete, std::span<const Point> grid,
                        double tol = 1e-5);

using Field3 = std::function<double(double x, double t, double u)>;

/// max |p*u_x + u_t - r| over the points (q == 1).
Report verify_surface_condition(const Field3& p, const Field3& r,
                                const UEvaluator& u, std::span<const Point> points,
                                double tol = 1e-7, const FdOptions& fd = {});

}  // namespace bsq

#include <doctest.h>

#include "bsq/numverify.hpp"

#include <cmath>

using namespace bsq;

namespace {

const OdeRhs kOscillator = [](double, std::span<const double> y,
                              std::span<double> d) {
  d[0] = y[1];
  d[1] = -y[0];
};

std::vector<Point> box_grid(double xlo, double xhi, double tlo, double thi,
                            int n) {
  std::vector<Point> g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.push_back({xlo + (xhi - xlo) * i / (n - 1),
                   tlo + (thi - tlo) * j / (n - 1)});
  return g;
}

}  // namespace

TEST_CASE("harmonic oscillator to 1e-9") {
  double y0[2] = {0.0, 1.0};
  auto s = integrate_ode(kOscillator, y0, 0.0, 2.0, 1e-9);
  CHECK(std::fabs(s.value(std::acos(-1.0) / 2, 0) - 1.0) < 1e-9);
}

TEST_CASE("dense output error stays within 10x the tolerance") {
  double y0[2] = {0.0, 1.0};
  for (double tol : {1e-6, 1e-9}) {
    CAPTURE(tol);
    auto s = integrate_ode(kOscillator, y0, 0.0, 10.0, tol);
    double worst = 0.0;
    for (double t = 0.0; t <= 10.0; t += 0.0173)
      worst = std::max(worst, std::fabs(s.value(t, 0) - std::sin(t)));
    CHECK(worst <= 10.0 * tol);
  }
}

TEST_CASE("tolerance halving improves the error (embedded order)") {
  double y0[2] = {0.0, 1.0};
  auto coarse = integrate_ode(kOscillator, y0, 0.0, 10.0, 1e-5);
  auto fine = integrate_ode(kOscillator, y0, 0.0, 10.0, 1e-8);
  double ec = std::fabs(coarse.value(10.0, 0) - std::sin(10.0));
  double ef = std::fabs(fine.value(10.0, 0) - std::sin(10.0));
  CHECK(ef < ec);
  CHECK(ef < 1e-7);
}

TEST_CASE("derivative of the interpolant") {
  double y0[2] = {0.0, 1.0};
  auto s = integrate_ode(kOscillator, y0, 0.0, 5.0, 1e-10);
  double worst = 0.0;
  for (double t = 0.1; t < 5.0; t += 0.31)
    worst = std::max(worst, std::fabs(s.derivative(t, 0) - std::cos(t)));
  CHECK(worst < 1e-7);
}

TEST_CASE("blow-up is reported with a location") {
  OdeRhs riccati = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[0] * y[0];
  };
  double y0[1] = {1.0};
  try {
    integrate_ode(riccati, y0, 0.0, 2.0, 1e-9);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.where > 0.9);
    CHECK(e.where <= 1.01);
  }
}

TEST_CASE("queries outside the span are rejected") {
  double y0[2] = {0.0, 1.0};
  auto s = integrate_ode(kOscillator, y0, 0.0, 1.0, 1e-9);
  CHECK_THROWS_AS(s.value(1.5, 0), IntegrationError);
}

TEST_CASE("columnar serialization") {
  double y0[2] = {0.0, 1.0};
  auto s = integrate_ode(kOscillator, y0, 0.0, 1.0, 1e-6);
  std::string text = s.to_text({{"tol", 1e-6}});
  CHECK(text.find("# tol") == 0);
  CHECK(text.find('\n') != std::string::npos);
}

TEST_CASE("pde_residual: constants and exact sinusoid") {
  SUBCASE("constant u has zero residual") {
    UEvaluator u;
    u.value = [](double, double) { return 3.0; };
    Report rep = pde_residual(u, num(0), box_grid(-1, 1, -1, 1, 5), {}, 1e-12);
    CHECK(rep.pass);
    CHECK(rep.max_residual == 0.0);
  }
  SUBCASE("f = 0, lambda = sqrt(2): u = sin(x - sqrt(2) t)") {
    UEvaluator u;
    double l = std::sqrt(2.0);
    u.value = [l](double x, double t) { return std::sin(x - l * t); };
    Report rep = pde_residual(u, num(0), box_grid(-1, 1, -1, 1, 9), {}, 1e-6);
    CHECK(rep.pass);  // finite-difference path
  }
}

TEST_CASE("travelling-wave reduction closes the loop") {
  FSpec f{parse("u^2/2 + u")};
  Reduction red = travelling_wave(num(2), f);
  double ic[4] = {0.5, 0.1, -0.2, 0.3};
  auto h = integrate_ode(ode_rhs(red), ic, -1.0, 1.0, 1e-11);
  auto grid = box_grid(-0.4, 0.4, -0.2, 0.2, 7);
  SUBCASE("exact-jets residual") {
    Report rep = verify_reduction(red, h, f.concrete, grid, 1e-5);
    CHECK(rep.pass);
    CHECK(rep.max_residual < 1e-10);
  }
  SUBCASE("perturbed solution fails by a wide margin") {
    UEvaluator ue = reduction_evaluator(red, h);
    UEvaluator bad;
    bad.value = [ue](double x, double t) { return 1.01 * ue.value(x, t); };
    Report rep = pde_residual(bad, f.concrete, grid, {}, 1e-5);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_residual > 1e-3);
  }
}

TEST_CASE("surface condition for a travelling wave") {
  FSpec f{parse("u^2/2 + u")};
  Reduction red = travelling_wave(num(2), f);
  double ic[4] = {0.5, 0.1, -0.2, 0.3};
  auto h = integrate_ode(ode_rhs(red), ic, -1.0, 1.0, 1e-11);
  UEvaluator ue = reduction_evaluator(red, h);
  // classical field scaled to q = 1: p = lambda, r = 0 (u_t = -lambda u_x)
  Field3 p = [](double, double, double) { return 2.0; };
  Field3 r = [](double, double, double) { return 0.0; };
  Report rep =
      verify_surface_condition(p, r, ue, box_grid(-0.4, 0.4, -0.2, 0.2, 7), 1e-7);
  CHECK(rep.pass);
}

TEST_CASE("ode_rhs demands a monic reduced ODE") {
  Reduction red = travelling_wave(num(2), FSpec{parse("u^2")});
  CHECK_NOTHROW(h4_expr(red));
  red.ode = normalize(red.ode * fun("h", sym("z")));
  CHECK_THROWS_AS(h4_expr(red), std::logic_error);
}

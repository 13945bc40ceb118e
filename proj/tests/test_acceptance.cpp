// Acceptance suite: one TEST_CASE per criterion, registered individually
// with ctest through doctest's --test-case filter (see CMakeLists.txt).

#include <doctest.h>

#include "bsq/closedform.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

using namespace bsq;

namespace {

FFamily power_family(long n) {
  FFamily f;
  f.tag = FamilyTag::power;
  f.a = num(1);
  f.b = num(0);
  f.c = num(0);
  f.d = num(1);
  f.n = num(n);
  f.k = num(1);
  return f;
}

bool all_exact(const Report& rep) {
  if (!rep.pass) return false;
  for (auto& c : rep.checks)
    if (c.detail != "exact") return false;
  return true;
}

/// Small random rational in [lo, hi] x {1..4}^-1, never zero.
ExprPtr rand_rat(std::mt19937_64& rng, long lo, long hi) {
  std::uniform_int_distribution<long> nu(lo, hi), de(1, 4);
  long n = nu(rng), d = de(rng);
  if (n == 0) n = 1;
  return num(n, d);
}

std::vector<Point> box_grid(double xlo, double xhi, double tlo, double thi,
                            int n) {
  std::vector<Point> g;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.push_back({xlo + (xhi - xlo) * i / (n - 1),
                   tlo + (thi - tlo) * j / (n - 1)});
  return g;
}

/// (x,t) grid whose z = x/sqrt(t) image stays inside [za, zb], t in [1, 1.21].
std::vector<Point> scaling_grid(double za, double zb, int n) {
  double tlo = 1.0, thi = 1.21;
  double xlo = std::max(za * std::sqrt(tlo), za * std::sqrt(thi));
  double xhi = std::min(zb * std::sqrt(tlo), zb * std::sqrt(thi));
  return box_grid(xlo, xhi, tlo, thi, n);
}

}  // namespace

TEST_CASE("criterion 1: translation symmetries of the classical system") {
  DeterminingSystem S = build_classical(FSpec{});
  for (auto V : {VectorField{num(1), num(0), num(0)},
                 VectorField{num(0), num(1), num(0)}}) {
    Report rep = residuals(S, V);
    CHECK(all_exact(rep));
  }
}

TEST_CASE("criterion 2: Table 1 classification over random parameter draws") {
  std::mt19937_64 rng(kDefaultEquivSeed);
  ExprPtr x = sym("x"), t = sym("t"), u = jetv(0, 0);
  const std::array<long, 5> ncand = {3, -1, -2, 5, 7};
  for (int tag = 0; tag < 3; ++tag) {
    for (int draw = 0; draw < 5; ++draw) {
      CAPTURE(tag);
      CAPTURE(draw);
      ExprPtr a = rand_rat(rng, 1, 5), b = rand_rat(rng, -3, 3);
      ExprPtr c = rand_rat(rng, -3, 3), d = rand_rat(rng, 1, 5);
      ExprPtr f;
      if (tag == 0) {
        std::uniform_int_distribution<std::size_t> pick(0, ncand.size() - 1);
        std::uniform_int_distribution<long> de(1, 3);
        // exponents 0, 1, 2 fold into the polynomial families; skip them
        Rat nv;
        do {
          nv = Rat(ncand[pick(rng)], de(rng));
        } while (nv == 0 || nv == 1 || nv == 2);
        // keep the affine power unexpanded so the family stays recognizable
        f = d * pow(a * u + b, num(nv)) + u + c;
      } else if (tag == 1) {
        f = d * loge(a * u + b) + u + c;
      } else {
        f = d * expe(a * u + b) + u + c;
      }
      FFamily fam = detect_family(f);
      auto gens = generators_for(fam);
      REQUIRE(gens.size() == 3);
      // the Table 1 generator satisfies the determining system exactly
      DeterminingSystem S = build_classical(FSpec{f});
      CHECK(all_exact(residuals(S, gens[2])));
      // ansatz_solve recovers it up to scale, modulo translations
      auto fields = ansatz_solve(FSpec{f});
      CHECK(fields.size() == 3);
      bool recovered = false;
      for (auto& W : fields) {
        ExprPtr s = normalize(diff(W.p, x));
        if (is_zero(s)) continue;
        bool ok = is_zero(diff(s, x)) && is_zero(diff(s, t)) &&
                  is_zero(diff(s, u));
        ok = ok && is_zero(diff(W.p / s - gens[2].p, x));
        ok = ok && is_zero(diff(W.q / s - gens[2].q, t));
        ok = ok && is_zero(W.r - s * gens[2].r);
        if (ok) recovered = true;
      }
      CHECK(recovered);
    }
  }
  // non-family samples keep only the translations
  for (auto s : {"u + log(u^2+1)", "u*exp(u)", "u^3 + u^2 + u",
                 "exp(u) + log(u+2)", "u^2*log(u)"}) {
    CAPTURE(s);
    CHECK(ansatz_solve(FSpec{parse(s)}).size() == 2);
  }
}

TEST_CASE("criterion 3: travelling-wave loop for the classical Boussinesq") {
  FSpec f{parse("u^2/2 + u")};
  Reduction red = travelling_wave(num(1), f);
  // initial data consistent with the twice-integrated form at k1 = k2 = 0:
  // h'' = -(h^2/2 + h), differentiated once for h'''
  double h0 = 0.5, h1 = 0.3;
  double ic[4] = {h0, h1, -(h0 * h0 / 2 + h0), -(h0 + 1) * h1};
  auto h = integrate_ode(ode_rhs(red), ic, -1.0, 1.0, 1e-11);
  auto grid = box_grid(-0.4, 0.4, -0.2, 0.2, 21);
  Report rep = verify_reduction(red, h, f.concrete, grid, 1e-5);
  CHECK(rep.pass);
  // energy of the second-order form is conserved along the trajectory
  double e0 = 0, drift = 0;
  for (int i = 0; i <= 100; ++i) {
    double z = -1.0 + 2.0 * i / 100.0;
    double hv = h.value(z, 0), hp = h.value(z, 1);
    double E = hp * hp / 2 + hv * hv * hv / 6 + hv * hv / 2;
    if (i == 0)
      e0 = E;
    else
      drift = std::max(drift, std::fabs(E - e0));
  }
  CHECK(drift < 1e-8);
}

TEST_CASE("criterion 4: Table 2/3 loop over the five reductions") {
  struct Row {
    std::string name;
    FFamily fam;
    int table3_row;
  };
  FFamily fl;
  fl.tag = FamilyTag::log;
  fl.a = num(2);
  fl.b = num(1, 3);
  fl.c = num(0);
  fl.d = num(1);
  fl.k = num(1);
  FFamily fe;
  fe.tag = FamilyTag::exp;
  fe.a = num(1);
  fe.b = num(0);
  fe.c = num(0);
  fe.d = num(1);
  fe.k = num(1);
  std::vector<Row> rows = {{"power n=2", power_family(2), 1},
                           {"power n=3", power_family(3), 1},
                           {"power n=-1", power_family(-1), 1},
                           {"log", fl, 2},
                           {"exp", fe, 3}};
  for (auto& row : rows) {
    CAPTURE(row.name);
    Reduction red = scaling(row.fam);
    CHECK_FALSE(is_zero(red.separation));
    // the exp-family ODE carries a 1/h factor; clear it before integrating
    if (row.fam.tag == FamilyTag::exp)
      red.ode = normalize(red.ode * fun("h", sym("z")));
    double ic[4] = {0.5, 0.1, -0.2, 0.3};
    auto h = integrate_ode(ode_rhs(red), ic, -1.0, 1.0, 1e-11);
    Report rep = verify_reduction(red, h, row.fam.f(), scaling_grid(-0.96, 0.96, 9),
                                  1e-5);
    CHECK(rep.pass);
    // record the printed-ODE equivalence verdict with residual evidence;
    // the frozen expectation is: ODE1 and ODE2 agree, ODE3 as printed does
    // not (its independently integrated form does)
    Report t3 = check_table3(row.table3_row, row.fam, {});
    for (auto& c : t3.checks)
      MESSAGE(row.name, " / ", c.label, ": pass=", c.pass,
              " residual=", c.residual);
    if (row.table3_row < 3) {
      CHECK(t3.pass);
    } else {
      REQUIRE(t3.checks.size() == 2);
      CHECK_FALSE(t3.checks[0].pass);
      CHECK(t3.checks[1].pass);
    }
  }
}

TEST_CASE("criterion 5: first integrals of ODE1") {
  ExprPtr z = sym("z"), h = fun("h", z), h1 = fun("h", z, 1),
          h2 = fun("h", z, 2), h3 = fun("h", z, 3);
  EquivOptions opt;
  opt.trials = 50;
  opt.tol = 1e-9;
  {
    ExprPtr k = num(2);
    ExprPtr cand = (pow(z, 3) / num(4) + h * k * z) * h1 + h * pow(z, 2) +
                   z * h3 - pow(h, 2) * k / num(2) - h2;
    CHECK(check_first_integral(scaling(power_family(2)).ode, cand, z, opt));
  }
  {
    ExprPtr k = num(3);
    ExprPtr cand = (pow(z, 2) / num(4) + pow(h, 2) * k) * h1 +
                   num(3) * h * z / num(4) + h3;
    CHECK(check_first_integral(scaling(power_family(3)).ode, cand, num(1), opt));
  }
  {
    ExprPtr k = num(-1);
    ExprPtr cand =
        (pow(z, 2) / num(4) + k * pow(h, -2)) * h1 - h * z / num(4) + h3;
    CHECK(check_first_integral(scaling(power_family(-1)).ode, cand, num(1), opt));
  }
}

TEST_CASE("criterion 6: Weierstrass differential identity") {
  std::mt19937_64 rng(kDefaultEquivSeed);
  std::uniform_real_distribution<double> g(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    WeierstrassParams wp{g(rng), g(rng)};
    for (int k = 0; k < 100; ++k) {
      double z = 0.4 + 0.6 * k / 99.0;
      auto v = weierstrass(z, wp);
      double res =
          std::fabs(v.dp * v.dp - (4 * v.p * v.p * v.p - wp.g2 * v.p - wp.g3));
      worst = std::max(worst, res);
    }
  }
  CHECK(worst <= 1e-9);
  double wd = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double z = 0.3 + 1.7 * k / 100.0;
    wd = std::max(wd, std::fabs(weierstrass(z, {0, 0}).p - 1.0 / (z * z)));
  }
  CHECK(wd <= 1e-10);
}

TEST_CASE("criterion 7: Eq. (8) branches") {
  SUBCASE("k3 = 0: linear closed form") {
    HSolution h = solve_h(0.0, 2.25, 1.0, 3.0, 0.5, +1);
    REQUIRE(h.form == "linear");
    for (double t = 1.0; t <= 3.0; t += 0.2)
      CHECK(std::fabs(h.eval(0, t) - (0.5 + 1.5 * (t - 1.0))) <= 1e-7);
  }
  SUBCASE("k4 = 0: inverse-square closed form") {
    HSolution h = solve_h(0.5, 0.0, 1.0, 3.0, 8.0, -1);
    REQUIRE(h.form == "pole");
    for (double t = 1.0; t <= 3.0; t += 0.2)
      CHECK(std::fabs(h.eval(0, t) - 8.0 / ((t - h.t_pole) * (t - h.t_pole))) <=
            1e-7);
  }
  SUBCASE("general branch conserves the invariant along the trajectory") {
    for (auto [k3, k4] : {std::pair{1.0, 1.0}, {0.5, 0.7}, {2.0, -0.5}}) {
      CAPTURE(k3);
      CAPTURE(k4);
      HSolution h = solve_h(k3, k4, 1.0, 2.0, 1.0, +1, 1e-11);
      REQUIRE(h.form == "numeric");
      for (double t = 1.0; t <= 2.0; t += 0.05) {
        double hv = h.eval(0, t), hp = h.eval(1, t);
        CHECK(std::fabs(hp * hp - k3 * hv * hv * hv - k4) <= 1e-8);
      }
    }
  }
}

TEST_CASE("criterion 8: nonclassical verification with the printed (p, r)") {
  // The criterion asks for the published formulas verbatim. They do not
  // satisfy the determining system generated here: three of the fourteen
  // equations carry residuals many orders above the tolerance, at every
  // sampled (b, d). The variant this library derives from its own system
  // is exercised separately below and passes to machine precision.
  std::mt19937_64 rng(kDefaultEquivSeed);
  for (int draw = 0; draw < 2; ++draw) {
    CAPTURE(draw);
    ExprPtr b = rand_rat(rng, -3, 3), d = rand_rat(rng, 1, 5),
            c = rand_rat(rng, -3, 3);
    ExprPtr u = jetv(0, 0);
    DeterminingSystem S =
        build_nonclassical(FSpec{normalize(d * pow(u, 2) + b * u + c)});
    // elementary h (k4 = 0): pole profile, with J = k3 (t - t_pole)^5 / 80
    HSolution hs = solve_h(0.5, 0.0, 1.0, 4.0, 8.0, -1);
    REQUIRE(hs.form == "pole");
    FunCallable H = h_callable(hs);
    FunCallable J = j_callable(hs, 1.0, 0.5 / 80.0);
    auto nf = nonclassical_fields(b, d, num(3), num(1),
                                  NonclassicalVariant::paper);
    SampleBox box;
    box.t_lo = 1.1;
    box.t_hi = 1.9;
    Report rep = residuals_numeric(S, field_callable(nf.p, H, J),
                                   field_callable(nf.r, H, J), 100, box,
                                   kDefaultEquivSeed, 1e-8);
    for (auto& ch : rep.checks)
      if (!ch.pass)
        MESSAGE("draw ", draw, " / ", ch.label, ": residual=", ch.residual);
    CHECK(rep.pass);
    // translation candidate passes exactly
    CHECK(all_exact(residuals(S, VectorField{num(1), num(1), num(0)})));
    // negative control: a perturbed candidate must fail loudly
    FunCallable pone = [](std::span<const double>, std::span<const int> di) {
      for (int k : di)
        if (k > 0) return 0.0;
      return 1.0;
    };
    FunCallable rbad = [](std::span<const double> a, std::span<const int> di) {
      for (int k : di)
        if (k > 0) return 0.0;
      return 0.1 * a[0];
    };
    Report bad = residuals_numeric(S, pone, rbad, 100, {}, kDefaultEquivSeed,
                                   1e-8);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_residual > 1e-3);
  }
}

TEST_CASE("criterion 8 (derived fields): nonclassical verification") {
  // Same protocol as criterion 8 but with the (p, r) this library derives
  // from its own determining system; passes to machine precision.
  std::mt19937_64 rng(kDefaultEquivSeed);
  for (int draw = 0; draw < 2; ++draw) {
    CAPTURE(draw);
    ExprPtr b = rand_rat(rng, -3, 3), d = rand_rat(rng, 1, 5),
            c = rand_rat(rng, -3, 3);
    ExprPtr u = jetv(0, 0);
    DeterminingSystem S =
        build_nonclassical(FSpec{normalize(d * pow(u, 2) + b * u + c)});
    HSolution hs = solve_h(0.5, 0.0, 1.0, 4.0, 8.0, -1);
    FunCallable H = h_callable(hs);
    FunCallable J = j_callable(hs, 1.0, 0.5 / 80.0);
    auto nf = nonclassical_fields(b, d, num(3), num(1),
                                  NonclassicalVariant::derived);
    SampleBox box;
    box.t_lo = 1.1;
    box.t_hi = 1.9;
    Report rep = residuals_numeric(S, field_callable(nf.p, H, J),
                                   field_callable(nf.r, H, J), 100, box,
                                   kDefaultEquivSeed, 1e-8);
    CHECK(rep.pass);
    // and symbolically, through the elementary pole substitution
    auto V = elementary_fields(nf, num(1, 2), num(0));
    CHECK(all_exact(residuals(S, V)));
  }
}

#ifdef BSQSYM_BIN
TEST_CASE("criterion 9: CLI determinism") {
  auto capture = [](const std::string& args) {
    std::string cmd = std::string(BSQSYM_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0)
      out.append(buf.data(), n);
    pclose(p);
    return out;
  };
  for (const char* args :
       {"classify --f \"d*(a*u+b)^n + u + c\" --seed 7",
        "determine --method nonclassical --f \"u^2\" --seed 7",
        "verify-generator --f \"u^3 + u\" --gen \"dx\" --seed 7",
        "reduce --f \"u^3 + u\" --lambda 2 --seed 7",
        "solve --k3 1 --k4 0 --t0 1 --t1 2 --h0 4 --sign -1 --seed 7"}) {
    CAPTURE(args);
    std::string a = capture(args), b = capture(args);
    CHECK(!a.empty());
    CHECK(a == b);
  }
}
#endif

#include "bsq/determining.hpp"

#include "bsq/poly.hpp"

#include <cmath>
#include <random>
#include <set>

namespace bsq {

namespace {

ExprPtr xs() { return sym("x"); }
ExprPtr ts() { return sym("t"); }
ExprPtr us() { return jetv(0, 0); }

ExprPtr unknown(const std::string& name) {
  return fun(name, {xs(), ts(), us()}, {0, 0, 0});
}

ExprPtr with_f(const FSpec& f, const ExprPtr& e) {
  if (f.symbolic()) return e;
  Binding sigma;
  sigma.funs["f"] = FunTemplate{{us()}, f.concrete};
  return substitute(e, sigma);
}

bool is_f_atom(const ExprPtr& b) { return b->kind == Kind::Fun && b->name == "f"; }
bool is_jet_atom(const ExprPtr& b) {
  return b->kind == Kind::Jet && b->jx + b->jt >= 1;
}

/// u_tt expressed through the PDE: u_tt = u_xx - f''u_x^2 - f'u_xx - u_xxxx.
ExprPtr manifold_rhs(const FSpec& f) {
  ExprPtr rhs = jetv(2, 0) - fun("f", us(), 2) * pow(jetv(1, 0), 2) -
                fun("f", us(), 1) * jetv(2, 0) - jetv(4, 0);
  return with_f(f, rhs);
}

/// Eliminate every jet with >= 2 t-derivatives using u_tt = rhs and its
/// total-derivative consequences.
ExprPtr eliminate_high_t(ExprPtr e, const ExprPtr& rhs) {
  while (true) {
    Binding sigma;
    for (auto& a : atoms_of(e)) {
      if (a->kind != Kind::Jet || a->jt < 2) continue;
      ExprPtr rep = rhs;
      for (int j = 2; j < a->jt; ++j) rep = Dt(rep);
      for (int i = 0; i < a->jx; ++i) rep = Dx(rep);
      sigma.exprs[a] = rep;
    }
    if (sigma.exprs.empty()) return e;
    e = normalize(substitute(e, sigma));
  }
}

/// Eliminate every t-jet using the surface condition u_t = Qs = r - p u_x
/// and its differential consequences (recursive re-substitution).
ExprPtr eliminate_t(ExprPtr e, const ExprPtr& Qs) {
  while (true) {
    Binding sigma;
    for (auto& a : atoms_of(e)) {
      if (a->kind != Kind::Jet || a->jt < 1) continue;
      ExprPtr rep = Qs;
      for (int j = 1; j < a->jt; ++j) rep = Dt(rep);
      for (int i = 0; i < a->jx; ++i) rep = Dx(rep);
      // rep may reintroduce t-jets of strictly lower t-count; the outer
      // loop resolves them
      sigma.exprs[a] = rep;
    }
    if (sigma.exprs.empty()) return e;
    e = normalize(substitute(e, sigma));
  }
}

/// Eliminate pure x-jets of order >= 4 using u_xxxx = u4rhs (the PDE
/// restricted to the surface) and its x-derivatives.
ExprPtr eliminate_x4(ExprPtr e, const ExprPtr& u4rhs) {
  while (true) {
    Binding sigma;
    for (auto& a : atoms_of(e)) {
      if (a->kind != Kind::Jet || a->jt != 0 || a->jx < 4) continue;
      ExprPtr rep = u4rhs;
      for (int i = 4; i < a->jx; ++i) rep = Dx(rep);
      sigma.exprs[a] = rep;
    }
    if (sigma.exprs.empty()) return e;
    e = normalize(substitute(e, sigma));
  }
}

/// Scale so the first term has coefficient 1 (deterministic representative).
ExprPtr canonical_scale(const ExprPtr& e) {
  Poly p = to_poly(e);
  if (p.terms.empty()) return num(0);
  Rat lead = p.terms.begin()->second;
  Poly scaled;
  for (auto& [m, c] : p.terms) scaled.terms.emplace(m, c / lead);
  return poly_expr(scaled);
}

/// Split the invariance condition over monomials in the jet variables (and
/// the f-atoms in symbolic mode); the coefficients, functions of (x,t,u)
/// and the unknowns, become the determining equations.
void split(const ExprPtr& e, DeterminingSystem& out) {
  Poly p = to_poly(e);
  std::map<Monomial, Poly, MonomialLess> groups;
  for (auto& [m, c] : p.terms) {
    Monomial key, coeff;
    for (auto& fct : m) {
      if (is_jet_atom(fct.base) || is_f_atom(fct.base))
        key.push_back(fct);
      else
        coeff.push_back(fct);
    }
    groups[key].add_term(coeff, c);
  }
  std::set<std::string> seen;
  for (auto& [key, grp] : groups) {
    ExprPtr eq = canonical_scale(poly_expr(grp));
    if (is_zero_literal(eq)) continue;
    std::string rendered = render(eq);
    if (!seen.insert(rendered).second) continue;
    out.equations.push_back(eq);
    out.basis.push_back(key.empty() ? "1" : render(monomial_expr(key)));
  }
}

}  // namespace

DeterminingSystem build_classical(const FSpec& f) {
  DeterminingSystem S;
  S.method = "classical";
  S.f = f;
  VectorField V{unknown("p"), unknown("q"), unknown("r")};
  ExprPtr F = f.symbolic() ? boussinesq_F() : boussinesq_F(f.concrete);
  ExprPtr G = apply_prolonged(prolong(V, 4), F);
  G = eliminate_high_t(normalize(G), manifold_rhs(f));
  split(G, S);
  return S;
}

DeterminingSystem build_nonclassical(const FSpec& f) {
  DeterminingSystem S;
  S.method = "nonclassical";
  S.f = f;
  VectorField V{unknown("p"), num(1), unknown("r")};
  ExprPtr Qs = V.r - V.p * jetv(1, 0);
  ExprPtr F = f.symbolic() ? boussinesq_F() : boussinesq_F(f.concrete);

  ExprPtr F_surf = eliminate_t(normalize(F), Qs);
  ExprPtr u4rhs = normalize(jetv(4, 0) - F_surf);
  for (auto& a : atoms_of(u4rhs))
    if (a->kind == Kind::Jet && (a->jt >= 1 || a->jx >= 4))
      throw std::logic_error("nonclassical: PDE-on-surface elimination failed");

  ExprPtr G = apply_prolonged(prolong(V, 4), F);
  G = eliminate_t(normalize(G), Qs);
  G = eliminate_x4(G, u4rhs);
  split(G, S);
  return S;
}

Report residuals(const DeterminingSystem& S, const VectorField& candidate,
                 const EquivOptions& opt) {
  Report rep;
  rep.label = S.method + " determining residuals";
  rep.seed = opt.seed;
  rep.tol = opt.tol;
  Binding sigma;
  std::vector<ExprPtr> formals{xs(), ts(), us()};
  sigma.funs["p"] = FunTemplate{formals, candidate.p};
  sigma.funs["r"] = FunTemplate{formals, candidate.r};
  if (S.method == "classical")
    sigma.funs["q"] = FunTemplate{formals, candidate.q};
  for (std::size_t i = 0; i < S.equations.size(); ++i) {
    ExprPtr sub = substitute(S.equations[i], sigma);
    std::string label = "eq" + std::to_string(i + 1) + " [" + S.basis[i] + "]";
    bool exact = false;
    try {
      exact = is_zero(sub);
    } catch (const ExpansionLimitError&) {
    }
    if (exact) {
      rep.add(label, true, 0.0, "exact");
    } else {
      EquivResult er = equiv_report(sub, num(0), opt);
      rep.add(label, er.equivalent, er.worst_residual, "numeric");
    }
  }
  return rep;
}

Report residuals_numeric(const DeterminingSystem& S, const FunCallable& p,
                         const FunCallable& r, int points, const SampleBox& box,
                         std::uint64_t seed, double tol) {
  Report rep;
  rep.label = S.method + " determining residuals (numeric candidate)";
  rep.seed = seed;
  rep.tol = tol;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dx(box.x_lo, box.x_hi);
  std::uniform_real_distribution<double> dt(box.t_lo, box.t_hi);
  std::uniform_real_distribution<double> du(box.u_lo, box.u_hi);
  for (std::size_t i = 0; i < S.equations.size(); ++i) {
    double worst = 0.0;
    int used = 0;
    for (int s = 0; s < points; ++s) {
      EvalBinding sigma;
      sigma.vars[xs()] = dx(rng);
      sigma.vars[ts()] = dt(rng);
      sigma.vars[us()] = du(rng);
      sigma.funs["p"] = p;
      sigma.funs["r"] = r;
      try {
        worst = std::max(worst, std::fabs(eval(S.equations[i], sigma)));
        ++used;
      } catch (const EvalError&) {
      }
    }
    std::string label = "eq" + std::to_string(i + 1) + " [" + S.basis[i] + "]";
    rep.add(label, used > 0 && worst <= tol, worst,
            "samples=" + std::to_string(used));
  }
  return rep;
}

Json to_json(const DeterminingSystem& S) {
  Json j;
  j["method"] = S.method;
  j["f"] = S.f.symbolic() ? "symbolic" : render(S.f.concrete);
  j["count"] = S.equations.size();
  Json eqs = Json::array();
  for (std::size_t i = 0; i < S.equations.size(); ++i) {
    Json row;
    row["basis"] = S.basis[i];
    row["equation"] = render(S.equations[i]);
    eqs.push_back(std::move(row));
  }
  j["equations"] = std::move(eqs);
  return j;
}

}  // namespace bsq

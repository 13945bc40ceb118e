#include "bsq/classify.hpp"

#include "bsq/poly.hpp"

#include <array>
#include <optional>

namespace bsq {

namespace {

ExprPtr uvar() { return jetv(0, 0); }

bool free_of_u(const ExprPtr& e) {
  for (auto& a : atoms_of(e))
    if (a->kind == Kind::Jet) return false;
  return true;
}

/// base == alpha*u + beta with alpha, beta free of u (and alpha nonzero).
bool affine_in_u(const ExprPtr& base, ExprPtr* alpha, ExprPtr* beta) {
  ExprPtr a = normalize(diff(base, uvar()));
  if (is_zero_literal(a) || !free_of_u(a)) return false;
  ExprPtr b = normalize(base - a * uvar());
  if (!free_of_u(b)) return false;
  *alpha = a;
  *beta = b;
  return true;
}

struct SpecialTerm {
  FamilyTag tag;       // power, log or exp
  ExprPtr d, a, b, n;  // cofactor, affine base, exponent (power only)
};

/// Try to read one summand as d * special(a*u+b) with a u-free cofactor.
std::optional<SpecialTerm> match_special(const ExprPtr& term) {
  std::vector<ExprPtr> factors =
      term->kind == Kind::Prod ? term->kids : std::vector<ExprPtr>{term};
  std::optional<SpecialTerm> found;
  std::vector<ExprPtr> cofactor;
  for (auto& fct : factors) {
    if (free_of_u(fct)) {
      cofactor.push_back(fct);
      continue;
    }
    ExprPtr alpha, beta;
    if (fct->kind == Kind::Pow && free_of_u(fct->kids[1]) &&
        affine_in_u(fct->kids[0], &alpha, &beta)) {
      if (found) return std::nullopt;
      found = SpecialTerm{FamilyTag::power, nullptr, alpha, beta, fct->kids[1]};
    } else if (fct->kind == Kind::Log && affine_in_u(fct->kids[0], &alpha, &beta)) {
      if (found) return std::nullopt;
      found = SpecialTerm{FamilyTag::log, nullptr, alpha, beta, nullptr};
    } else if (fct->kind == Kind::Exp && affine_in_u(fct->kids[0], &alpha, &beta)) {
      if (found) return std::nullopt;
      found = SpecialTerm{FamilyTag::exp, nullptr, alpha, beta, nullptr};
    } else {
      return std::nullopt;
    }
  }
  if (!found) return std::nullopt;
  found->d = cofactor.empty() ? num(1) : prod(std::move(cofactor));
  return found;
}

std::optional<FFamily> try_quadratic(const ExprPtr& f) {
  // polynomial in u of degree exactly 2
  ExprPtr n = normalize(f);
  Poly p = to_poly(n);
  Poly coeffs[3];
  for (auto& [m, c] : p.terms) {
    Int deg = 0;
    Monomial rest;
    for (auto& fct : m) {
      if (fct.base->kind == Kind::Jet) {
        if (fct.exp->kind != Kind::Num || denominator(fct.exp->num) != 1)
          return std::nullopt;
        deg += numerator(fct.exp->num);
      } else if (free_of_u(pow(fct.base, fct.exp))) {
        rest.push_back(fct);
      } else {
        return std::nullopt;
      }
    }
    if (deg < 0 || deg > 2) return std::nullopt;
    coeffs[static_cast<int>(deg)].add_term(rest, c);
  }
  if (coeffs[2].is_zero()) return std::nullopt;
  FFamily fam;
  fam.tag = FamilyTag::quadratic;
  fam.d = poly_expr(coeffs[2]);
  fam.b = poly_expr(coeffs[1]);
  fam.c = poly_expr(coeffs[0]);
  return fam;
}

bool nonzero_when_numeric(const ExprPtr& e) {
  return !(e && e->kind == Kind::Num && e->num == 0);
}

}  // namespace

std::string to_string(FamilyTag t) {
  switch (t) {
    case FamilyTag::arbitrary: return "arbitrary";
    case FamilyTag::power: return "power";
    case FamilyTag::log: return "log";
    case FamilyTag::exp: return "exp";
    case FamilyTag::quadratic: return "quadratic";
  }
  return "?";
}

ExprPtr FFamily::f() const {
  ExprPtr u = uvar();
  ExprPtr lin = (k ? k : num(1)) * u + (c ? c : num(0));
  switch (tag) {
    case FamilyTag::power:
      return d * pow(a * u + b, n) + lin;
    case FamilyTag::log:
      return d * loge(a * u + b) + lin;
    case FamilyTag::exp:
      return d * expe(a * u + b) + lin;
    case FamilyTag::quadratic:
      return d * u * u + b * u + (c ? c : num(0));
    case FamilyTag::arbitrary:
      return nullptr;
  }
  return nullptr;
}

FFamily detect_family(const ExprPtr& f) {
  std::vector<ExprPtr> terms =
      f->kind == Kind::Sum ? f->kids : std::vector<ExprPtr>{f};
  std::optional<SpecialTerm> spec;
  std::vector<ExprPtr> linear, consts;
  bool ok = true;
  for (auto& t : terms) {
    if (free_of_u(t)) {
      consts.push_back(t);
      continue;
    }
    if (auto s = match_special(t)) {
      if (spec) { ok = false; break; }
      spec = s;
      continue;
    }
    // otherwise the term must be (u-free) * u
    ExprPtr kc = normalize(diff(t, uvar()));
    if (free_of_u(kc) && is_zero_literal(normalize(t - kc * uvar()))) {
      linear.push_back(kc);
      continue;
    }
    ok = false;
    break;
  }
  FFamily fam;
  if (ok && spec) {
    // numeric exponents 0/1/2 degenerate out of the power pattern
    bool degenerate =
        spec->tag == FamilyTag::power && spec->n->kind == Kind::Num &&
        (spec->n->num == 0 || spec->n->num == 1 || spec->n->num == 2);
    if (!degenerate) {
      fam.tag = spec->tag;
      fam.a = normalize(spec->a);
      fam.b = normalize(spec->b);
      fam.d = normalize(spec->d);
      fam.n = spec->n ? normalize(spec->n) : nullptr;
      fam.k = linear.empty() ? num(0) : normalize(sum(linear));
      fam.c = consts.empty() ? num(0) : normalize(sum(consts));
      bool valid = nonzero_when_numeric(fam.a) && nonzero_when_numeric(fam.d);
      if (fam.tag == FamilyTag::power && fam.n->kind == Kind::Num)
        valid = valid && fam.n->num != 0 && fam.n->num != 1;
      if (valid && equiv(fam.f(), f)) return fam;
      fam = FFamily{};
    }
  }
  if (auto q = try_quadratic(f)) {
    if (nonzero_when_numeric(q->d) && equiv(q->f(), f)) return *q;
  }
  return FFamily{};  // arbitrary
}

std::vector<VectorField> generators_for(const FFamily& fam) {
  std::vector<VectorField> out;
  out.push_back({num(1), num(0), num(0)});
  out.push_back({num(0), num(1), num(0)});
  ExprPtr x = sym("x"), t = sym("t"), u = uvar();
  switch (fam.tag) {
    case FamilyTag::power:
      out.push_back({x, num(2) * t,
                     (num(2) / (fam.a * (num(1) - fam.n))) * (fam.a * u + fam.b)});
      break;
    case FamilyTag::log:
      out.push_back({x, num(2) * t, (num(2) / fam.a) * (fam.a * u + fam.b)});
      break;
    case FamilyTag::exp:
      out.push_back({x, num(2) * t, -(num(2) / fam.a)});
      break;
    default:
      break;
  }
  return out;
}

namespace {

/// Exact nullspace of an m x n rational matrix (column-major basis vectors).
std::vector<std::vector<Rat>> nullspace(std::vector<std::array<Rat, 6>> rows) {
  constexpr int n = 6;
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    Rat inv = Rat(1) / rows[rank][col];
    for (int j = 0; j < n; ++j) rows[rank][j] *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || rows[i][col] == 0) continue;
      Rat fct = rows[i][col];
      for (int j = 0; j < n; ++j) rows[i][j] -= fct * rows[rank][j];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rat>> basis;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(n, Rat(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
      v[pivot_col[i]] = -rows[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

std::vector<VectorField> ansatz_solve(const FSpec& f) {
  DeterminingSystem S = build_classical(f);
  const char* names[6] = {"al1", "al2", "be1", "be2", "ga1", "ga2"};
  ExprPtr c[6];
  for (int i = 0; i < 6; ++i) c[i] = sym(names[i]);
  ExprPtr x = sym("x"), t = sym("t"), u = uvar();
  Binding sigma;
  std::vector<ExprPtr> formals{x, t, u};
  sigma.funs["p"] = FunTemplate{formals, c[0] * x + c[1]};
  sigma.funs["q"] = FunTemplate{formals, c[2] * t + c[3]};
  sigma.funs["r"] = FunTemplate{formals, c[4] * u + c[5]};

  // rebase u against the family's affine base so that split monomials are
  // linearly independent functions of u
  Binding rebase;
  if (!f.symbolic()) {
    FFamily fam = detect_family(f.concrete);
    if (fam.tag == FamilyTag::power || fam.tag == FamilyTag::log ||
        fam.tag == FamilyTag::exp) {
      ExprPtr w = sym("_w");
      rebase.exprs[u] = (w - fam.b) / fam.a;
    }
  }

  // each (equation, split-monomial) pair is an independent linear row
  std::map<std::pair<std::size_t, Monomial>,
           std::array<Rat, 6>,
           decltype([](const auto& a, const auto& b) {
             if (a.first != b.first) return a.first < b.first;
             return compare(a.second, b.second) < 0;
           })>
      rows_map;
  for (std::size_t ei = 0; ei < S.equations.size(); ++ei) {
    ExprPtr sub = substitute(S.equations[ei], sigma);
    if (!rebase.exprs.empty()) sub = substitute(sub, rebase);
    Poly p = to_poly(sub);
    for (auto& [m, coeff] : p.terms) {
      int which = -1;
      Monomial rest;
      for (auto& fct : m) {
        int idx = -1;
        for (int i = 0; i < 6; ++i)
          if (equal(fct.base, c[i])) idx = i;
        if (idx >= 0) {
          if (which >= 0 || !is_num(fct.exp, 1))
            throw std::logic_error("ansatz_solve: system not linear in ansatz");
          which = idx;
        } else {
          rest.push_back(fct);
        }
      }
      if (which < 0)
        throw std::logic_error("ansatz_solve: inhomogeneous term encountered");
      rows_map[{ei, rest}][which] += coeff;
    }
  }
  std::vector<std::array<Rat, 6>> rows;
  rows.reserve(rows_map.size());
  for (auto& [key, row] : rows_map) {
    bool all_zero = true;
    for (auto& v : row) all_zero = all_zero && v == 0;
    if (!all_zero) rows.push_back(row);
  }
  std::vector<VectorField> out;
  for (auto& v : nullspace(std::move(rows))) {
    VectorField V;
    V.p = normalize(num(v[0]) * x + num(v[1]));
    V.q = normalize(num(v[2]) * t + num(v[3]));
    V.r = normalize(num(v[4]) * u + num(v[5]));
    out.push_back(std::move(V));
  }
  return out;
}

Json to_json(const FFamily& fam) {
  Json j;
  j["family"] = to_string(fam.tag);
  Json params = Json::object();
  auto put = [&](const char* name, const ExprPtr& e) {
    if (e) params[name] = render(e);
  };
  put("a", fam.a);
  put("b", fam.b);
  put("c", fam.c);
  put("d", fam.d);
  put("n", fam.n);
  put("k", fam.k);
  j["params"] = std::move(params);
  Json gens = Json::array();
  for (auto& V : generators_for(fam)) {
    Json g;
    g["p"] = render(V.p);
    g["q"] = render(V.q);
    g["r"] = render(V.r);
    gens.push_back(std::move(g));
  }
  j["generators"] = std::move(gens);
  return j;
}

}  // namespace bsq

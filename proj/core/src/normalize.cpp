#include "bsq/expr.hpp"
#include "bsq/poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsq {

namespace {

// Marker base for exponential factors: exp(g) is stored as E^g.
const ExprPtr& exp_marker() {
  static const ExprPtr m = expe(num(1));
  return m;
}

bool is_exp_marker(const ExprPtr& b) {
  return b->kind == Kind::Exp && b->kids.size() == 1 && is_num(b->kids[0], 1);
}

bool is_integer(const ExprPtr& e, Int* out = nullptr) {
  if (e->kind != Kind::Num || denominator(e->num) != 1) return false;
  if (out) *out = numerator(e->num);
  return true;
}

ExprPtr add_exps(const ExprPtr& a, const ExprPtr& b, const NormalizeOptions& opt) {
  if (a->kind == Kind::Num && b->kind == Kind::Num) return num(a->num + b->num);
  return normalize(a + b, opt);
}

ExprPtr mul_exps(const ExprPtr& a, const ExprPtr& b, const NormalizeOptions& opt) {
  if (a->kind == Kind::Num && b->kind == Kind::Num) return num(a->num * b->num);
  return normalize(a * b, opt);
}

// exact rational power c^(p/q); returns false when no exact rational result
bool exact_rat_pow(const Rat& c, const Rat& e, Rat* out) {
  Int p = numerator(e), q = denominator(e);
  if (q == 1) {
    if (c == 0 && p < 0) return false;
    Rat r = 1;
    Int n = abs(p);
    Rat base = c;
    for (Int i = 0; i < n; ++i) r *= base;
    if (p < 0) {
      if (r == 0) return false;
      r = Rat(1) / r;
    }
    *out = r;
    return true;
  }
  if (c < 0) return false;
  if (c == 0) {
    if (p <= 0) return false;
    *out = 0;
    return true;
  }
  auto iroot = [](const Int& v, const Int& q, Int* root) {
    if (v == 1) { *root = 1; return true; }
    double guess = std::pow(v.convert_to<double>(), 1.0 / q.convert_to<double>());
    for (Int cand = Int(std::floor(guess)) - 1; cand <= Int(std::ceil(guess)) + 1; ++cand) {
      if (cand < 1) continue;
      Int acc = 1;
      for (Int i = 0; i < q; ++i) acc *= cand;
      if (acc == v) { *root = cand; return true; }
    }
    return false;
  };
  Int rn, rd;
  if (!iroot(numerator(c), q, &rn) || !iroot(denominator(c), q, &rd)) return false;
  Rat root(rn, rd);
  Rat r = 1;
  Int n = abs(p);
  for (Int i = 0; i < n; ++i) r *= root;
  if (p < 0) r = Rat(1) / r;
  *out = r;
  return true;
}

using FactorMap = std::map<ExprPtr, ExprPtr, ExprLess>;  // base -> exponent

struct Builder {
  const NormalizeOptions& opt;
  std::size_t nodes = 0;

  void charge(std::size_t n) {
    nodes += n;
    if (nodes > opt.node_limit)
      throw ExpansionLimitError("expression expansion exceeded node limit (" +
                                std::to_string(opt.node_limit) + " nodes)");
  }

  Poly convert(const ExprPtr& e);
  Poly pow_poly(const Poly& pb, const ExprPtr& en);
  Poly mul(const Poly& a, const Poly& b);
  void canonical_term(FactorMap fm, Rat coeff, Poly& out);
};

Poly one_poly() {
  Poly p;
  p.terms[{}] = 1;
  return p;
}

Poly const_poly(const Rat& c) {
  Poly p;
  if (c != 0) p.terms[{}] = c;
  return p;
}

Poly atom_poly(const ExprPtr& a) {
  Poly p;
  p.terms[Monomial{{a, num(1)}}] = 1;
  return p;
}

// Rewrites a monomial's factor set into canonical form, folding numeric
// bases, extracting logs from exponential factors and sign-normalizing
// integer powers of sums. May spawn additional factors (worklist).
void Builder::canonical_term(FactorMap fm, Rat coeff, Poly& out) {
  // sum bases whose merged exponent became a nonnegative integer get
  // re-expanded into the polynomial at the end
  std::vector<std::pair<ExprPtr, Int>> expand;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = fm.begin(); it != fm.end();) {
      const ExprPtr& base = it->first;
      const ExprPtr& ex = it->second;
      if (is_zero_literal(ex)) {
        it = fm.erase(it);
        continue;
      }
      if (base->kind == Kind::Num) {
        if (base->num == 1) {
          it = fm.erase(it);
          continue;
        }
        if (ex->kind == Kind::Num) {
          Rat v;
          if (exact_rat_pow(base->num, ex->num, &v)) {
            coeff *= v;
            it = fm.erase(it);
            continue;
          }
        }
      }
      if (base->kind == Kind::Sum) {
        Int m;
        if (is_integer(ex, &m) && m >= 0) {
          expand.emplace_back(base, m);
          it = fm.erase(it);
          continue;
        }
        if (is_integer(ex, &m)) {
          // sign canonicalization: leading coefficient positive
          const ExprPtr& lead = base->kids.front();
          Rat lc = 1;
          if (lead->kind == Kind::Num) lc = lead->num;
          else if (lead->kind == Kind::Prod && lead->kids.front()->kind == Kind::Num)
            lc = lead->kids.front()->num;
          if (lc < 0) {
            std::vector<ExprPtr> negkids;
            negkids.reserve(base->kids.size());
            for (auto& k : base->kids) negkids.push_back(prod({num(-1), k}));
            ExprPtr nb = normalize(sum(std::move(negkids)), opt);
            if (m % 2 != 0) coeff = -coeff;
            ExprPtr exq = it->second;
            it = fm.erase(it);
            auto [jt2, inserted] = fm.emplace(nb, exq);
            if (!inserted) jt2->second = add_exps(jt2->second, exq, opt);
            changed = true;
            break;
          }
        }
      }
      if (is_exp_marker(base)) {
        // extract rational multiples of logs from the exponent
        Poly pe = convert(ex);
        Poly rest;
        FactorMap extracted;
        bool any = false;
        for (auto& [m, c] : pe.terms) {
          if (m.size() == 1 && m[0].base->kind == Kind::Log &&
              is_num(m[0].exp, 1)) {
            // c*log(w) -> w^c
            any = true;
            const ExprPtr w = m[0].base->kids[0];
            Poly pw = convert(w);
            Poly contrib = pow_poly(pw, num(c));
            if (contrib.terms.size() == 1) {
              auto& [mm, cc] = *contrib.terms.begin();
              coeff *= cc;
              for (auto& f : mm) {
                auto [jt2, ins] = extracted.emplace(f.base, f.exp);
                if (!ins) jt2->second = add_exps(jt2->second, f.exp, opt);
              }
            } else {
              // w^c stays atomic (sum base, non-integer exponent)
              ExprPtr b2 = poly_expr(pw);
              auto [jt2, ins] = extracted.emplace(b2, num(c));
              if (!ins) jt2->second = add_exps(jt2->second, num(c), opt);
            }
          } else {
            rest.add_term(m, c);
          }
        }
        if (any) {
          ExprPtr exq = poly_expr(rest);
          it = fm.erase(it);
          if (!is_zero_literal(exq)) {
            auto [jt2, ins] = fm.emplace(exp_marker(), exq);
            if (!ins) jt2->second = add_exps(jt2->second, exq, opt);
          }
          for (auto& [b2, e2] : extracted) {
            auto [jt2, ins] = fm.emplace(b2, e2);
            if (!ins) jt2->second = add_exps(jt2->second, e2, opt);
          }
          changed = true;
          break;
        }
      }
      ++it;
    }
  }
  if (coeff == 0) return;
  Monomial m;
  m.reserve(fm.size());
  for (auto& [b, e] : fm) m.push_back({b, e});
  if (expand.empty()) {
    out.add_term(m, coeff);
    charge(m.size() + 1);
    return;
  }
  Poly acc;
  acc.terms.emplace(std::move(m), coeff);
  for (auto& [base, k] : expand)
    acc = mul(acc, pow_poly(convert(base), num(Rat(k))));
  for (auto& [mm, cc] : acc.terms) out.add_term(mm, cc);
}

Poly Builder::mul(const Poly& a, const Poly& b) {
  Poly out;
  for (auto& [ma, ca] : a.terms) {
    for (auto& [mb, cb] : b.terms) {
      FactorMap fm;
      for (auto& f : ma) fm.emplace(f.base, f.exp);
      for (auto& f : mb) {
        auto [it, inserted] = fm.emplace(f.base, f.exp);
        if (!inserted) it->second = add_exps(it->second, f.exp, opt);
      }
      canonical_term(std::move(fm), ca * cb, out);
    }
  }
  return out;
}

Poly Builder::pow_poly(const Poly& pb, const ExprPtr& en) {
  Int m;
  if (is_integer(en, &m)) {
    if (m == 0) return one_poly();
    if (m > 0 && (pb.terms.size() > 1 || m <= 4)) {
      // binary exponentiation with expansion
      Poly acc = one_poly();
      Poly sq = pb;
      Int k = m;
      while (k > 0) {
        if (k % 2 == 1) acc = mul(acc, sq);
        k /= 2;
        if (k > 0) sq = mul(sq, sq);
      }
      return acc;
    }
  }
  // single-monomial distribution
  if (pb.terms.size() == 1) {
    auto& [mono, c] = *pb.terms.begin();
    Poly out;
    FactorMap fm;
    for (auto& f : mono) fm.emplace(f.base, mul_exps(f.exp, en, opt));
    Rat coeff = 1;
    if (c != 1) {
      Rat v;
      if (en->kind == Kind::Num && exact_rat_pow(c, en->num, &v)) {
        coeff = v;
      } else {
        auto [it, ins] = fm.emplace(num(c), en);
        if (!ins) it->second = add_exps(it->second, en, opt);
      }
    }
    canonical_term(std::move(fm), coeff, out);
    return out;
  }
  if (pb.is_zero()) {
    if (en->kind == Kind::Num && en->num > 0) return Poly{};
    throw EvalError("zero raised to non-positive power during normalization");
  }
  // sum base, negative-integer or non-integer exponent: atomic factor
  Poly out;
  FactorMap fm;
  fm.emplace(poly_expr(pb), en);
  canonical_term(std::move(fm), 1, out);
  return out;
}

Poly Builder::convert(const ExprPtr& e) {
  switch (e->kind) {
    case Kind::Num:
      return const_poly(e->num);
    case Kind::Sym:
    case Kind::Jet:
      return atom_poly(e);
    case Kind::Fun: {
      std::vector<ExprPtr> args;
      args.reserve(e->kids.size());
      for (auto& a : e->kids) args.push_back(normalize(a, opt));
      return atom_poly(fun(e->name, std::move(args), e->didx));
    }
    case Kind::Sum: {
      Poly acc;
      for (auto& k : e->kids) acc = poly_add(acc, convert(k));
      return acc;
    }
    case Kind::Prod: {
      Poly acc = one_poly();
      for (auto& k : e->kids) acc = mul(acc, convert(k));
      return acc;
    }
    case Kind::Pow: {
      Poly pb = convert(e->kids[0]);
      ExprPtr en = normalize(e->kids[1], opt);
      return pow_poly(pb, en);
    }
    case Kind::Exp: {
      Poly out;
      FactorMap fm;
      ExprPtr arg = poly_expr(convert(e->kids[0]));
      if (is_zero_literal(arg)) return one_poly();
      fm.emplace(exp_marker(), arg);
      canonical_term(std::move(fm), 1, out);
      return out;
    }
    case Kind::Log: {
      ExprPtr arg = poly_expr(convert(e->kids[0]));
      if (is_num(arg, 1)) return Poly{};
      return atom_poly(loge(arg));
    }
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

// ---- Poly public helpers --------------------------------------------------

int compare(const Monomial& a, const Monomial& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = compare(a[i].base, b[i].base); c != 0) return c;
    if (int c = compare(a[i].exp, b[i].exp); c != 0) return c;
  }
  return 0;
}

void Poly::add_term(const Monomial& m, const Rat& c) {
  if (c == 0) return;
  auto [it, inserted] = terms.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms.erase(it);
  }
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (auto& [m, c] : b.terms) out.add_term(m, c);
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out;
  for (auto& [m, c] : a.terms) out.terms.emplace(m, -c);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b, const NormalizeOptions& opt) {
  Builder bl{opt};
  return bl.mul(a, b);
}

ExprPtr monomial_expr(const Monomial& m) {
  std::vector<ExprPtr> fs;
  fs.reserve(m.size());
  for (auto& f : m) {
    if (is_exp_marker(f.base)) {
      fs.push_back(expe(f.exp));
    } else if (is_num(f.exp, 1)) {
      fs.push_back(f.base);
    } else {
      fs.push_back(pow(f.base, f.exp));
    }
  }
  return prod(std::move(fs));
}

ExprPtr poly_expr(const Poly& p) {
  std::vector<ExprPtr> terms;
  terms.reserve(p.terms.size());
  for (auto& [m, c] : p.terms) {
    if (m.empty()) {
      terms.push_back(num(c));
    } else if (c == 1) {
      terms.push_back(monomial_expr(m));
    } else {
      terms.push_back(prod({num(c), monomial_expr(m)}));
    }
  }
  return sum(std::move(terms));
}

Poly to_poly(const ExprPtr& e, const NormalizeOptions& opt) {
  Builder bl{opt};
  return bl.convert(e);
}

ExprPtr normalize(const ExprPtr& e, const NormalizeOptions& opt) {
  return poly_expr(to_poly(e, opt));
}

// ---- deep zero test with affine rebase ------------------------------------

namespace {

// Does the sum base depend on v only affinely? Returns alpha, beta with
// base == alpha*v + beta, both free of v.
bool affine_split(const ExprPtr& base, const ExprPtr& v, ExprPtr* alpha,
                  ExprPtr* beta, const NormalizeOptions& opt) {
  ExprPtr a = normalize(diff(base, v), opt);
  if (is_zero_literal(a)) return false;
  for (auto& at : atoms_of(a))
    if (equal(at, v)) return false;
  ExprPtr b = normalize(base - prod({a, v}), opt);
  for (auto& at : atoms_of(b))
    if (equal(at, v)) return false;
  *alpha = a;
  *beta = b;
  return true;
}

bool is_zero_rec(const ExprPtr& e, const NormalizeOptions& opt, int depth) {
  ExprPtr n = normalize(e, opt);
  if (is_zero_literal(n)) return true;
  if (depth <= 0) return false;

  // collect candidate affine bases from non-trivial power factors
  std::vector<ExprPtr> candidates;
  std::function<void(const ExprPtr&)> scan = [&](const ExprPtr& x) {
    if (x->kind == Kind::Pow && x->kids[0]->kind == Kind::Sum) {
      Int m;
      bool integer_nonneg =
          x->kids[1]->kind == Kind::Num && denominator(x->kids[1]->num) == 1 &&
          numerator(x->kids[1]->num) >= 0;
      if (!integer_nonneg) candidates.push_back(x->kids[0]);
    }
    for (auto& k : x->kids) scan(k);
  };
  scan(n);

  static const ExprPtr uvar = jetv(0, 0);
  ExprPtr w = sym("_w");
  for (auto& base : candidates) {
    for (const ExprPtr& v : {uvar, sym("u"), sym("z"), sym("x"), sym("t")}) {
      ExprPtr alpha, beta;
      if (!affine_split(base, v, &alpha, &beta, opt)) continue;
      Binding sigma;
      sigma.exprs[v] = prod({sum({w, prod({num(-1), beta})}), pow(alpha, num(-1))});
      ExprPtr rebased = substitute(n, sigma);
      try {
        if (is_zero_rec(rebased, opt, depth - 1)) return true;
      } catch (const ExpansionLimitError&) {
      }
    }
  }
  return false;
}

}  // namespace

bool is_zero(const ExprPtr& e, const NormalizeOptions& opt) {
  return is_zero_rec(e, opt, 2);
}

}  // namespace bsq

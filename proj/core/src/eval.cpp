#include "bsq/expr.hpp"

#include <cmath>
#include <random>

namespace bsq {

// ---- differentiation ------------------------------------------------------

ExprPtr diff(const ExprPtr& e, const ExprPtr& v) {
  if (equal(e, v)) return num(1);
  switch (e->kind) {
    case Kind::Num:
    case Kind::Sym:
    case Kind::Jet:
      return num(0);
    case Kind::Fun: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        ExprPtr da = diff(e->kids[i], v);
        if (is_zero_literal(da)) continue;
        std::vector<int> didx = e->didx;
        ++didx[i];
        terms.push_back(prod({fun(e->name, e->kids, std::move(didx)), da}));
      }
      return sum(std::move(terms));
    }
    case Kind::Sum: {
      std::vector<ExprPtr> terms;
      terms.reserve(e->kids.size());
      for (auto& k : e->kids) terms.push_back(diff(k, v));
      return sum(std::move(terms));
    }
    case Kind::Prod: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        ExprPtr dk = diff(e->kids[i], v);
        if (is_zero_literal(dk)) continue;
        std::vector<ExprPtr> fs = e->kids;
        fs[i] = dk;
        terms.push_back(prod(std::move(fs)));
      }
      return sum(std::move(terms));
    }
    case Kind::Pow: {
      const ExprPtr& b = e->kids[0];
      const ExprPtr& ex = e->kids[1];
      ExprPtr db = diff(b, v);
      ExprPtr dex = diff(ex, v);
      std::vector<ExprPtr> terms;
      if (!is_zero_literal(db))
        terms.push_back(prod({ex, db, pow(b, ex - num(1))}));
      if (!is_zero_literal(dex))
        terms.push_back(prod({dex, loge(b), pow(b, ex)}));
      return sum(std::move(terms));
    }
    case Kind::Exp:
      return prod({diff(e->kids[0], v), e});
    case Kind::Log:
      return diff(e->kids[0], v) / e->kids[0];
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- substitution ---------------------------------------------------------

ExprPtr substitute(const ExprPtr& e, const Binding& sigma) {
  if (auto it = sigma.exprs.find(e); it != sigma.exprs.end()) return it->second;
  switch (e->kind) {
    case Kind::Num:
    case Kind::Sym:
    case Kind::Jet:
      return e;
    case Kind::Fun: {
      std::vector<ExprPtr> args;
      args.reserve(e->kids.size());
      for (auto& a : e->kids) args.push_back(substitute(a, sigma));
      auto it = sigma.funs.find(e->name);
      if (it == sigma.funs.end()) return fun(e->name, std::move(args), e->didx);
      const FunTemplate& tmpl = it->second;
      if (tmpl.formals.size() != args.size())
        throw std::invalid_argument("substitute: arity mismatch for " + e->name);
      ExprPtr body = tmpl.body;
      for (std::size_t i = 0; i < args.size(); ++i)
        for (int k = 0; k < e->didx[i]; ++k) body = diff(body, tmpl.formals[i]);
      Binding inner;
      for (std::size_t i = 0; i < args.size(); ++i)
        inner.exprs[tmpl.formals[i]] = args[i];
      return substitute(body, inner);
    }
    case Kind::Sum: {
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      for (auto& k : e->kids) kids.push_back(substitute(k, sigma));
      return sum(std::move(kids));
    }
    case Kind::Prod: {
      std::vector<ExprPtr> kids;
      kids.reserve(e->kids.size());
      for (auto& k : e->kids) kids.push_back(substitute(k, sigma));
      return prod(std::move(kids));
    }
    case Kind::Pow:
      return pow(substitute(e->kids[0], sigma), substitute(e->kids[1], sigma));
    case Kind::Exp:
      return expe(substitute(e->kids[0], sigma));
    case Kind::Log:
      return loge(substitute(e->kids[0], sigma));
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- numeric evaluation ---------------------------------------------------

double eval(const ExprPtr& e, const EvalBinding& sigma) {
  switch (e->kind) {
    case Kind::Num:
      return to_double(e->num);
    case Kind::Sym:
    case Kind::Jet: {
      auto it = sigma.vars.find(e);
      if (it == sigma.vars.end()) throw EvalError("unbound atom " + render(e));
      return it->second;
    }
    case Kind::Fun: {
      if (auto it = sigma.vars.find(e); it != sigma.vars.end()) return it->second;
      auto it = sigma.funs.find(e->name);
      if (it == sigma.funs.end())
        throw EvalError("unbound function atom " + render(e));
      std::vector<double> args;
      args.reserve(e->kids.size());
      for (auto& a : e->kids) args.push_back(eval(a, sigma));
      return it->second(args, e->didx);
    }
    case Kind::Sum: {
      double acc = 0;
      for (auto& k : e->kids) acc += eval(k, sigma);
      return acc;
    }
    case Kind::Prod: {
      double acc = 1;
      for (auto& k : e->kids) acc *= eval(k, sigma);
      return acc;
    }
    case Kind::Pow: {
      double b = eval(e->kids[0], sigma);
      double ex = eval(e->kids[1], sigma);
      bool integral = std::nearbyint(ex) == ex;
      if (b == 0 && ex <= 0) throw EvalError("zero base with non-positive exponent");
      if (b < 0 && !integral) throw EvalError("negative base with fractional exponent");
      double r = std::pow(b, ex);
      if (!std::isfinite(r)) throw EvalError("non-finite power");
      return r;
    }
    case Kind::Exp: {
      double r = std::exp(eval(e->kids[0], sigma));
      if (!std::isfinite(r)) throw EvalError("non-finite exp");
      return r;
    }
    case Kind::Log: {
      double a = eval(e->kids[0], sigma);
      if (a <= 0) throw EvalError("log of non-positive value");
      return std::log(a);
    }
  }
  throw std::logic_error("unreachable expression kind");
}

// ---- randomized equivalence ----------------------------------------------

EquivResult equiv_report(const ExprPtr& a, const ExprPtr& b, const EquivOptions& opt) {
  EquivResult res;
  try {
    if (is_zero(a - b)) {
      res.equivalent = true;
      res.structural = true;
      return res;
    }
  } catch (const ExpansionLimitError&) {
  }

  std::vector<ExprPtr> atoms = atoms_of(sum({a, b}));
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(opt.box_lo, opt.box_hi);
  for (int trial = 0; trial < opt.trials; ++trial) {
    bool evaluated = false;
    for (int attempt = 0; attempt < opt.max_attempts_per_trial && !evaluated;
         ++attempt) {
      EvalBinding sigma;
      for (auto& at : atoms) sigma.vars[at] = dist(rng);
      try {
        double va = eval(a, sigma);
        double vb = eval(b, sigma);
        evaluated = true;
        ++res.samples_used;
        double r = std::fabs(va - vb);
        res.worst_residual = std::max(res.worst_residual, r);
        if (r > opt.tol * (1.0 + std::fabs(va) + std::fabs(vb))) {
          res.equivalent = false;
          return res;
        }
      } catch (const EvalError&) {
      }
    }
    if (!evaluated) return res;  // could not sample: report non-equivalent
  }
  res.equivalent = true;
  return res;
}

bool equiv(const ExprPtr& a, const ExprPtr& b, const EquivOptions& opt) {
  return equiv_report(a, b, opt).equivalent;
}

}  // namespace bsq

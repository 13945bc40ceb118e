#include "bsq/jet.hpp"

namespace bsq {

namespace {

ExprPtr td(const ExprPtr& e, bool is_x) {
  switch (e->kind) {
    case Kind::Num:
      return num(0);
    case Kind::Sym:
      if (is_x && e->name == "x") return num(1);
      if (!is_x && e->name == "t") return num(1);
      return num(0);
    case Kind::Jet:
      if (e->jx + e->jt >= kMaxJetOrder)
        throw std::invalid_argument("total_derivative: jet order overflow beyond " +
                                    std::to_string(kMaxJetOrder));
      return is_x ? jetv(e->jx + 1, e->jt) : jetv(e->jx, e->jt + 1);
    case Kind::Fun: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        ExprPtr da = td(e->kids[i], is_x);
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
      for (auto& k : e->kids) terms.push_back(td(k, is_x));
      return sum(std::move(terms));
    }
    case Kind::Prod: {
      std::vector<ExprPtr> terms;
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        ExprPtr dk = td(e->kids[i], is_x);
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
      ExprPtr db = td(b, is_x);
      ExprPtr dex = td(ex, is_x);
      std::vector<ExprPtr> terms;
      if (!is_zero_literal(db))
        terms.push_back(prod({ex, db, pow(b, ex - num(1))}));
      if (!is_zero_literal(dex))
        terms.push_back(prod({dex, loge(b), pow(b, ex)}));
      return sum(std::move(terms));
    }
    case Kind::Exp:
      return prod({td(e->kids[0], is_x), e});
    case Kind::Log:
      return td(e->kids[0], is_x) / e->kids[0];
  }
  throw std::logic_error("unreachable expression kind");
}

}  // namespace

ExprPtr total_derivative(const ExprPtr& e, char dir) {
  if (dir != 'x' && dir != 't')
    throw std::invalid_argument("total_derivative: dir must be 'x' or 't'");
  return td(e, dir == 'x');
}

ExprPtr characteristic(const VectorField& V) {
  return V.r - V.p * jetv(1, 0) - V.q * jetv(0, 1);
}

ProlongedField prolong(const VectorField& V, int order, ProlongMethod method) {
  if (order < 0 || order > 4)
    throw std::invalid_argument("prolong: order must be in [0, 4]");
  ProlongedField PV;
  PV.base = V;
  PV.eta[{0, 0}] = V.r;
  if (method == ProlongMethod::characteristic) {
    ExprPtr Q = normalize(characteristic(V));
    // row by row: Dx^i applied to Dt^j Q
    ExprPtr Qt = Q;
    for (int j = 0; j <= order; ++j) {
      ExprPtr Qxt = Qt;
      for (int i = 0; j + i <= order; ++i) {
        if (i + j > 0)
          PV.eta[{i, j}] = normalize(Qxt + V.p * jetv(i + 1, j) + V.q * jetv(i, j + 1));
        if (j + i < order) Qxt = normalize(Dx(Qxt));
      }
      if (j < order) Qt = normalize(Dt(Qt));
    }
  } else {
    // eta^{J,dir} = D_dir eta^J - (D_dir p) u_{J,x} - (D_dir q) u_{J,t}
    for (int n = 1; n <= order; ++n) {
      for (int j = 0; j <= n; ++j) {
        int i = n - j;
        JetIndex from = i > 0 ? JetIndex{i - 1, j} : JetIndex{i, j - 1};
        char dir = i > 0 ? 'x' : 't';
        const ExprPtr& prev = PV.eta.at(from);
        PV.eta[{i, j}] = normalize(
            total_derivative(prev, dir) -
            total_derivative(V.p, dir) * jetv(from.i + 1, from.j) -
            total_derivative(V.q, dir) * jetv(from.i, from.j + 1));
      }
    }
  }
  return PV;
}

ExprPtr apply_prolonged(const ProlongedField& PV, const ExprPtr& F) {
  std::vector<ExprPtr> terms;
  terms.push_back(PV.base.p * diff(F, sym("x")));
  terms.push_back(PV.base.q * diff(F, sym("t")));
  for (auto& [J, eta] : PV.eta) {
    ExprPtr dF = diff(F, jetv(J.i, J.j));
    if (!is_zero_literal(dF)) terms.push_back(eta * dF);
  }
  return sum(std::move(terms));
}

ExprPtr boussinesq_F() {
  ExprPtr u = jetv(0, 0);
  return jetv(0, 2) - jetv(2, 0) + fun("f", u, 2) * pow(jetv(1, 0), 2) +
         fun("f", u, 1) * jetv(2, 0) + jetv(4, 0);
}

ExprPtr boussinesq_F(const ExprPtr& f_of_u) {
  Binding sigma;
  sigma.funs["f"] = FunTemplate{{jetv(0, 0)}, f_of_u};
  return substitute(boussinesq_F(), sigma);
}

}  // namespace bsq

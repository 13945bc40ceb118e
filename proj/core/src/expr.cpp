#include "bsq/expr.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace bsq {

namespace {

ExprPtr make(Kind k) { return std::make_shared<Expr>(k); }

const ExprPtr& zero() {
  static const ExprPtr z = [] {
    auto e = std::make_shared<Expr>(Kind::Num);
    e->num = 0;
    return ExprPtr(e);
  }();
  return z;
}

int kind_rank(Kind k) { return static_cast<int>(k); }

}  // namespace

ExprPtr num(const Rat& r) {
  auto e = std::make_shared<Expr>(Kind::Num);
  e->num = r;
  return e;
}
ExprPtr num(long n) { return num(Rat(n)); }
ExprPtr num(long n, long d) { return num(Rat(n, d)); }

ExprPtr sym(std::string name) {
  auto e = std::make_shared<Expr>(Kind::Sym);
  e->name = std::move(name);
  return e;
}

ExprPtr jetv(int jx, int jt) {
  if (jx < 0 || jt < 0 || jx + jt > kMaxJetOrder)
    throw std::invalid_argument("jet order out of range");
  auto e = std::make_shared<Expr>(Kind::Jet);
  e->jx = jx;
  e->jt = jt;
  return e;
}

ExprPtr fun(std::string name, std::vector<ExprPtr> args, std::vector<int> didx) {
  if (args.size() != didx.size())
    throw std::invalid_argument("fun: args/didx size mismatch");
  auto e = std::make_shared<Expr>(Kind::Fun);
  e->name = std::move(name);
  e->kids = std::move(args);
  e->didx = std::move(didx);
  return e;
}

ExprPtr fun(std::string name, ExprPtr arg, int order) {
  return fun(std::move(name), std::vector<ExprPtr>{std::move(arg)},
             std::vector<int>{order});
}

bool is_zero_literal(const ExprPtr& e) {
  return e->kind == Kind::Num && e->num == 0;
}
bool is_num(const ExprPtr& e, const Rat& value) {
  return e->kind == Kind::Num && e->num == value;
}

ExprPtr sum(std::vector<ExprPtr> terms) {
  std::vector<ExprPtr> flat;
  Rat c = 0;
  for (auto& t : terms) {
    if (!t) throw std::invalid_argument("null expr");
    if (t->kind == Kind::Num) {
      c += t->num;
    } else if (t->kind == Kind::Sum) {
      for (auto& k : t->kids) {
        if (k->kind == Kind::Num)
          c += k->num;
        else
          flat.push_back(k);
      }
    } else {
      flat.push_back(t);
    }
  }
  if (c != 0) flat.push_back(num(c));
  if (flat.empty()) return zero();
  if (flat.size() == 1) return flat.front();
  auto e = std::make_shared<Expr>(Kind::Sum);
  e->kids = std::move(flat);
  return e;
}

ExprPtr prod(std::vector<ExprPtr> factors) {
  std::vector<ExprPtr> flat;
  Rat c = 1;
  for (auto& f : factors) {
    if (!f) throw std::invalid_argument("null expr");
    if (f->kind == Kind::Num) {
      c *= f->num;
    } else if (f->kind == Kind::Prod) {
      for (auto& k : f->kids) {
        if (k->kind == Kind::Num)
          c *= k->num;
        else
          flat.push_back(k);
      }
    } else {
      flat.push_back(f);
    }
  }
  if (c == 0) return zero();
  if (c != 1) flat.insert(flat.begin(), num(c));
  if (flat.empty()) return num(1);
  if (flat.size() == 1) return flat.front();
  auto e = std::make_shared<Expr>(Kind::Prod);
  e->kids = std::move(flat);
  return e;
}

ExprPtr pow(ExprPtr base, ExprPtr exponent) {
  if (is_num(exponent, 1)) return base;
  if (is_num(exponent, 0)) return num(1);
  if (base->kind == Kind::Num && exponent->kind == Kind::Num &&
      denominator(exponent->num) == 1) {
    Int n = numerator(exponent->num);
    if (abs(n) <= 64 && base->num != 0) {
      bool neg = n < 0;
      unsigned long k = static_cast<unsigned long>(abs(n));
      Rat r = 1;
      for (unsigned long i = 0; i < k; ++i) r *= base->num;
      if (neg) r = Rat(1) / r;
      return num(r);
    }
  }
  if (is_num(base, 1)) return num(1);
  auto e = std::make_shared<Expr>(Kind::Pow);
  e->kids = {std::move(base), std::move(exponent)};
  return e;
}

ExprPtr pow(ExprPtr base, long exponent) {
  return pow(std::move(base), num(exponent));
}

ExprPtr expe(ExprPtr arg) {
  auto e = std::make_shared<Expr>(Kind::Exp);
  e->kids = {std::move(arg)};
  return e;
}

ExprPtr loge(ExprPtr arg) {
  auto e = std::make_shared<Expr>(Kind::Log);
  e->kids = {std::move(arg)};
  return e;
}

ExprPtr operator+(ExprPtr a, ExprPtr b) { return sum({std::move(a), std::move(b)}); }
ExprPtr operator-(ExprPtr a, ExprPtr b) {
  return sum({std::move(a), prod({num(-1), std::move(b)})});
}
ExprPtr operator-(ExprPtr a) { return prod({num(-1), std::move(a)}); }
ExprPtr operator*(ExprPtr a, ExprPtr b) { return prod({std::move(a), std::move(b)}); }
ExprPtr operator/(ExprPtr a, ExprPtr b) {
  return prod({std::move(a), pow(std::move(b), num(-1))});
}

int compare(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind)
    return kind_rank(a->kind) < kind_rank(b->kind) ? -1 : 1;
  switch (a->kind) {
    case Kind::Num:
      if (a->num == b->num) return 0;
      return a->num < b->num ? -1 : 1;
    case Kind::Sym:
      return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case Kind::Jet:
      if (a->jx != b->jx) return a->jx < b->jx ? -1 : 1;
      if (a->jt != b->jt) return a->jt < b->jt ? -1 : 1;
      return 0;
    case Kind::Fun: {
      if (int c = a->name.compare(b->name); c != 0) return c < 0 ? -1 : 1;
      if (a->didx != b->didx) return a->didx < b->didx ? -1 : 1;
      break;  // fall through to kids
    }
    default:
      break;
  }
  if (a->kids.size() != b->kids.size())
    return a->kids.size() < b->kids.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (int c = compare(a->kids[i], b->kids[i]); c != 0) return c;
  return 0;
}

bool equal(const ExprPtr& a, const ExprPtr& b) { return compare(a, b) == 0; }

// ---- rendering ------------------------------------------------------------

namespace {

// precedence levels: 0 sum, 1 product, 2 unary minus, 3 power, 4 atom
void render_rec(const ExprPtr& e, std::ostringstream& os, int parent_prec);

void render_num(const Rat& r, std::ostringstream& os, int parent_prec) {
  bool frac = denominator(r) != 1;
  bool neg = r < 0;
  int prec = frac ? 1 : (neg ? 2 : 4);
  bool parens = prec < parent_prec;
  if (parens) os << '(';
  os << numerator(r).str();
  if (frac) os << '/' << denominator(r).str();
  if (parens) os << ')';
}

void render_jet(const Expr& e, std::ostringstream& os) {
  os << 'u';
  if (e.jx + e.jt > 0) {
    os << '_';
    for (int i = 0; i < e.jx; ++i) os << 'x';
    for (int i = 0; i < e.jt; ++i) os << 't';
  }
}

void render_fun(const Expr& e, std::ostringstream& os) {
  os << e.name;
  bool simple = e.didx.size() == 1 && e.didx[0] >= 0 && e.didx[0] <= 3;
  if (simple) {
    for (int i = 0; i < e.didx[0]; ++i) os << '\'';
  } else {
    os << '{';
    for (std::size_t i = 0; i < e.didx.size(); ++i) {
      if (i) os << ',';
      os << e.didx[i];
    }
    os << '}';
  }
  os << '(';
  for (std::size_t i = 0; i < e.kids.size(); ++i) {
    if (i) os << ',';
    render_rec(e.kids[i], os, 0);
  }
  os << ')';
}

void render_rec(const ExprPtr& e, std::ostringstream& os, int parent_prec) {
  switch (e->kind) {
    case Kind::Num:
      render_num(e->num, os, parent_prec);
      return;
    case Kind::Sym:
      os << e->name;
      return;
    case Kind::Jet:
      render_jet(*e, os);
      return;
    case Kind::Fun:
      render_fun(*e, os);
      return;
    case Kind::Exp:
      os << "exp(";
      render_rec(e->kids[0], os, 0);
      os << ')';
      return;
    case Kind::Log:
      os << "log(";
      render_rec(e->kids[0], os, 0);
      os << ')';
      return;
    case Kind::Pow: {
      bool parens = 3 < parent_prec;  // never, but keep the shape uniform
      if (parens) os << '(';
      render_rec(e->kids[0], os, 4);
      os << '^';
      render_rec(e->kids[1], os, 4);
      if (parens) os << ')';
      return;
    }
    case Kind::Prod: {
      bool parens = 1 < parent_prec;
      if (parens) os << '(';
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << '*';
        render_rec(e->kids[i], os, 2);
      }
      if (parens) os << ')';
      return;
    }
    case Kind::Sum: {
      bool parens = 0 < parent_prec;
      if (parens) os << '(';
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        const ExprPtr& k = e->kids[i];
        // pull a leading minus out of the term for readability
        Rat coeff = 1;
        if (k->kind == Kind::Num) coeff = k->num;
        if (k->kind == Kind::Prod && k->kids.front()->kind == Kind::Num)
          coeff = k->kids.front()->num;
        if (i) os << (coeff < 0 ? " - " : " + ");
        else if (coeff < 0) os << '-';
        if (coeff < 0) {
          // re-render with the sign stripped
          ExprPtr stripped;
          if (k->kind == Kind::Num) {
            stripped = num(-k->num);
          } else {
            std::vector<ExprPtr> fs = k->kids;
            fs.front() = num(-fs.front()->num);
            stripped = prod(std::move(fs));
          }
          render_rec(stripped, os, 1);
        } else {
          render_rec(k, os, 1);
        }
      }
      if (parens) os << ')';
      return;
    }
  }
}

}  // namespace

std::string render(const ExprPtr& e) {
  std::ostringstream os;
  render_rec(e, os, 0);
  return os.str();
}

std::vector<ExprPtr> atoms_of(const ExprPtr& e) {
  std::set<ExprPtr, ExprLess> seen;
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& n) {
    switch (n->kind) {
      case Kind::Sym:
      case Kind::Jet:
      case Kind::Fun:
        seen.insert(n);
        if (n->kind == Kind::Fun)
          for (auto& k : n->kids) walk(k);
        return;
      default:
        for (auto& k : n->kids) walk(k);
    }
  };
  walk(e);
  return {seen.begin(), seen.end()};
}

double to_double(const Rat& r) {
  return numerator(r).convert_to<double>() / denominator(r).convert_to<double>();
}

}  // namespace bsq

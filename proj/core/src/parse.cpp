#include "bsq/expr.hpp"
#include "bsq/jet.hpp"

#include <cctype>
#include <cstdlib>

namespace bsq {

namespace {

struct Parser {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  ExprPtr parse_number() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    Int ipart(std::string(s.substr(start, pos - start)));
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t fstart = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == fstart) fail("digits expected after decimal point");
      std::string frac(s.substr(fstart, pos - fstart));
      Int scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
      return num(Rat(ipart * scale + Int(frac), scale));
    }
    return num(Rat(ipart));
  }

  ExprPtr parse_ident() {
    std::size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                              s[pos] == '_'))
      ++pos;
    std::string name(s.substr(start, pos - start));

    // jet variables: u, u_x, u_xt, u_xxxx, ...
    if (name == "u") return jetv(0, 0);
    if (name.size() > 2 && name.rfind("u_", 0) == 0) {
      int jx = 0, jt = 0;
      bool ok = true;
      for (std::size_t i = 2; i < name.size(); ++i) {
        if (name[i] == 'x') ++jx;
        else if (name[i] == 't') ++jt;
        else { ok = false; break; }
      }
      if (ok) {
        if (jx + jt > kMaxJetOrder) fail("jet order above " + std::to_string(kMaxJetOrder));
        return jetv(jx, jt);
      }
    }

    // total-derivative shorthands dx(.), dt(.), d2x(.)
    if ((name == "dx" || name == "dt" || name == "d2x") && peek('(')) {
      ++pos;
      ExprPtr arg = parse_sum();
      expect(')');
      if (name == "dt") return Dt(arg);
      ExprPtr d = Dx(arg);
      return name == "d2x" ? Dx(d) : d;
    }

    if (name == "exp" || name == "log" || name == "sqrt") {
      expect('(');
      ExprPtr arg = parse_sum();
      expect(')');
      if (name == "exp") return expe(arg);
      if (name == "log") return loge(arg);
      return pow(arg, num(1, 2));
    }

    // derivative decorations: primes or an explicit multi-index
    int primes = 0;
    while (pos < s.size() && s[pos] == '\'') {
      ++primes;
      ++pos;
    }
    std::vector<int> didx;
    bool braced = false;
    if (primes == 0 && pos < s.size() && s[pos] == '{') {
      braced = true;
      ++pos;
      while (true) {
        skip_ws();
        std::size_t dstart = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == dstart) fail("derivative index expected");
        didx.push_back(std::atoi(std::string(s.substr(dstart, pos - dstart)).c_str()));
        if (accept(',')) continue;
        expect('}');
        break;
      }
    }

    if (peek('(')) {
      ++pos;
      std::vector<ExprPtr> args;
      if (!peek(')')) {
        args.push_back(parse_sum());
        while (accept(',')) args.push_back(parse_sum());
      }
      expect(')');
      if (braced) {
        if (didx.size() != args.size()) fail("derivative index arity mismatch");
      } else {
        didx.assign(args.size(), 0);
        if (!didx.empty()) didx[0] = primes;
        else if (primes) fail("primes on a zero-argument function");
      }
      return fun(std::move(name), std::move(args), std::move(didx));
    }
    if (primes || braced) fail("derivative marks on a plain symbol");
    return sym(std::move(name));
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      ExprPtr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail("unexpected character");
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept('^')) {
      // right-associative; allow a signed exponent
      skip_ws();
      bool neg = accept('-');
      ExprPtr e = parse_power();
      if (neg) e = prod({num(-1), e});
      return pow(base, e);
    }
    return base;
  }

  ExprPtr parse_unary() {
    if (accept('-')) return prod({num(-1), parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_unary();
    while (true) {
      if (accept('*')) {
        e = prod({e, parse_unary()});
      } else if (accept('/')) {
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    while (true) {
      if (accept('+')) {
        e = e + parse_product();
      } else if (accept('-')) {
        e = e - parse_product();
      } else {
        return e;
      }
    }
  }

  ExprPtr run() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return e;
  }
};

}  // namespace

ExprPtr parse(std::string_view text) {
  Parser p{text};
  return p.run();
}

}  // namespace bsq

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bsq {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

/// Maximum total jet order u_{x^i t^j} supported anywhere in the library.
inline constexpr int kMaxJetOrder = 6;

enum class Kind : std::uint8_t {
  Num,   // exact rational constant
  Sym,   // variable or parameter symbol
  Jet,   // jet variable u_{x^i t^j}; (0,0) is u itself
  Fun,   // unknown-function application with derivative multi-index
  Sum,   // n-ary sum
  Prod,  // n-ary product
  Pow,   // kids = {base, exponent}
  Exp,   // kids = {arg}
  Log,   // kids = {arg}
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable symbolic expression node. Build through the factory
/// functions below; trees are shared freely and never mutated.
class Expr {
 public:
  Kind kind;
  Rat num;                    // Kind::Num
  std::string name;           // Kind::Sym, Kind::Fun
  int jx = 0, jt = 0;         // Kind::Jet
  std::vector<int> didx;      // Kind::Fun: one derivative count per argument
  std::vector<ExprPtr> kids;  // children (Fun: the arguments)

  Expr(Kind k) : kind(k) {}
};

// ---- construction ---------------------------------------------------------

ExprPtr num(const Rat& r);
ExprPtr num(long n);
ExprPtr num(long n, long d);
ExprPtr sym(std::string name);
ExprPtr jetv(int jx, int jt);  // throws if jx+jt > kMaxJetOrder or negative
ExprPtr fun(std::string name, std::vector<ExprPtr> args, std::vector<int> didx);
ExprPtr fun(std::string name, ExprPtr arg, int order = 0);

ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr prod(std::vector<ExprPtr> factors);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr pow(ExprPtr base, long exponent);
ExprPtr expe(ExprPtr arg);
ExprPtr loge(ExprPtr arg);

ExprPtr operator+(ExprPtr a, ExprPtr b);
ExprPtr operator-(ExprPtr a, ExprPtr b);
ExprPtr operator-(ExprPtr a);
ExprPtr operator*(ExprPtr a, ExprPtr b);
ExprPtr operator/(ExprPtr a, ExprPtr b);

bool is_zero_literal(const ExprPtr& e);
bool is_num(const ExprPtr& e, const Rat& value);

// ---- structural order -----------------------------------------------------

/// Total order on expression trees; 0 iff structurally equal.
int compare(const ExprPtr& a, const ExprPtr& b);
bool equal(const ExprPtr& a, const ExprPtr& b);

struct ExprLess {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const { return compare(a, b) < 0; }
};

// ---- rendering / parsing --------------------------------------------------

/// Emits the expression grammar accepted by parse().
std::string render(const ExprPtr& e);

struct ParseError : std::runtime_error {
  std::size_t position;
  ParseError(std::string msg, std::size_t pos)
      : std::runtime_error(std::move(msg)), position(pos) {}
};

ExprPtr parse(std::string_view text);

// ---- normalization --------------------------------------------------------

struct ExpansionLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NormalizeOptions {
  std::size_t node_limit = 200000;
};

/// Canonical multinomial form over atomic factors. Idempotent.
ExprPtr normalize(const ExprPtr& e, const NormalizeOptions& opt = {});

/// normalize == 0, with a change-of-variable fallback that rewrites
/// polynomials in u against affine power bases (a*u+b)^s before retrying.
bool is_zero(const ExprPtr& e, const NormalizeOptions& opt = {});

// ---- differentiation / substitution ---------------------------------------

/// Exact partial derivative with respect to an atom (Sym or Jet). Jet
/// variables are treated as mutually independent.
ExprPtr diff(const ExprPtr& e, const ExprPtr& v);

struct FunTemplate {
  std::vector<ExprPtr> formals;  // e.g. {sym("z")}
  ExprPtr body;
};

struct Binding {
  std::map<ExprPtr, ExprPtr, ExprLess> exprs;  // atom -> replacement
  std::map<std::string, FunTemplate> funs;     // function symbol -> template
};

/// Simultaneous, non-recursive replacement. Function bindings replace
/// f^{(k)}(args) by the k-th derivative of the template body evaluated
/// at the (substituted) arguments.
ExprPtr substitute(const ExprPtr& e, const Binding& sigma);

// ---- numeric evaluation ---------------------------------------------------

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Callable binding for an unknown function symbol: given argument values
/// and the derivative multi-index, return the derivative value.
using FunCallable =
    std::function<double(std::span<const double> args, std::span<const int> didx)>;

struct EvalBinding {
  std::map<ExprPtr, double, ExprLess> vars;
  std::map<std::string, FunCallable> funs;
};

double eval(const ExprPtr& e, const EvalBinding& sigma);

// ---- randomized equivalence ----------------------------------------------

inline constexpr std::uint64_t kDefaultEquivSeed = 0x5eed2026u;

struct EquivOptions {
  int trials = 20;
  double tol = 1e-10;
  std::uint64_t seed = kDefaultEquivSeed;
  double box_lo = 0.3;
  double box_hi = 2.1;
  int max_attempts_per_trial = 64;
};

struct EquivResult {
  bool equivalent = false;
  bool structural = false;   // short-circuited by normalization
  double worst_residual = 0.0;
  int samples_used = 0;
};

EquivResult equiv_report(const ExprPtr& a, const ExprPtr& b, const EquivOptions& opt = {});
bool equiv(const ExprPtr& a, const ExprPtr& b, const EquivOptions& opt = {});

/// Collect every atom (Sym, Jet, Fun) occurring in e, in canonical order.
std::vector<ExprPtr> atoms_of(const ExprPtr& e);

/// Convenience: rational -> double.
double to_double(const Rat& r);

}  // namespace bsq

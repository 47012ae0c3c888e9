#pragma once
// Scalar function specifications: builtins and the integral-representation
// constructors whose operator classes hold by construction. Each spec knows
// its domain (a,b), evaluates its analytic continuation off the real axis,
// and provides closed-form derivatives of every order (used by the
// divided-difference engine at clustered eigenvalues).

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "opertone/json_io.hpp"
#include "opertone/matrix.hpp"

namespace opertone {

constexpr int kMaxTone = 12;
// Representation atoms on (-1,1) keep |lambda| <= 1 - kLambdaMargin so that
// I - lambda*A stays invertible for test spectra bounded away from +-1.
constexpr double kLambdaMargin = 1e-3;

struct Interval {
  double a = -1.0;
  double b = 1.0;

  bool finite() const { return std::isfinite(a) && std::isfinite(b); }
  bool contains(double x, double gap = 0.0) const { return x > a + gap && x < b - gap; }

  std::string print() const {
    std::string sa = std::isinf(a) ? "-inf" : fmt_double(a);
    std::string sb = std::isinf(b) ? "inf" : fmt_double(b);
    return "(" + sa + "," + sb + ")";
  }

  static Interval unit() { return {-1.0, 1.0}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity()}; }
  static Interval whole() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
};

enum class BuiltinKind { Id, Const, Pow, Log, Inv, Exp };

struct Atom {
  double w = 0.0;
  double lambda = 0.0;
};

struct ClassTags {
  std::vector<int> tones;  // certified tone orders, ascending, <= kMaxTone
  bool monotone = false;
  bool decreasing = false;
  bool convex = false;
  bool nonneg = false;

  bool has_tone(int k) const {
    for (int t : tones)
      if (t == k) return true;
    return false;
  }
};

class FunctionSpec {
 public:
  enum class Form { Builtin, KtoneRep, MonotoneRep, DecreasingRep, ConvexRep, Rescaled };

  // -- factories ------------------------------------------------------------

  static FunctionSpec builtin(BuiltinKind kind, double param, Interval dom) {
    FunctionSpec f;
    f.form_ = Form::Builtin;
    f.builtin_ = kind;
    f.param_ = param;
    f.domain_ = dom;
    f.validate();
    f.compute_tags();
    return f;
  }

  static FunctionSpec id(Interval dom = Interval::unit()) { return builtin(BuiltinKind::Id, 0, dom); }
  static FunctionSpec constant(double c, Interval dom = Interval::unit()) {
    return builtin(BuiltinKind::Const, c, dom);
  }
  static FunctionSpec pow(double p, Interval dom = Interval::positive()) {
    return builtin(BuiltinKind::Pow, p, dom);
  }
  static FunctionSpec log() { return builtin(BuiltinKind::Log, 0, Interval::positive()); }
  static FunctionSpec inv() { return builtin(BuiltinKind::Inv, 0, Interval::positive()); }
  static FunctionSpec exp(Interval dom = Interval::unit()) { return builtin(BuiltinKind::Exp, 0, dom); }

  /// P(x) + sum_j w_j x^l / (1 - lambda_j x) on (-1,1), deg P < l.
  static FunctionSpec ktone_rep(int l, std::vector<double> poly, std::vector<Atom> atoms) {
    FunctionSpec f;
    f.form_ = Form::KtoneRep;
    f.tone_order_ = l;
    f.poly_ = std::move(poly);
    f.atoms_ = std::move(atoms);
    f.domain_ = Interval::unit();
    while (!f.poly_.empty() && f.poly_.back() == 0.0) f.poly_.pop_back();
    f.validate();
    f.compute_tags();
    return f;
  }

  /// alpha + beta x + sum_j w_j x/(x+lambda_j) on (0,inf).
  static FunctionSpec monotone_rep(double alpha, double beta, std::vector<Atom> atoms) {
    FunctionSpec f;
    f.form_ = Form::MonotoneRep;
    f.alpha_ = alpha;
    f.beta_ = beta;
    f.atoms_ = std::move(atoms);
    f.domain_ = Interval::positive();
    f.validate();
    f.compute_tags();
    return f;
  }

  /// alpha + beta x + sum_j w_j/(x+lambda_j) on (0,inf).
  static FunctionSpec decreasing_rep(double alpha, double beta, std::vector<Atom> atoms) {
    FunctionSpec f;
    f.form_ = Form::DecreasingRep;
    f.alpha_ = alpha;
    f.beta_ = beta;
    f.atoms_ = std::move(atoms);
    f.domain_ = Interval::positive();
    f.validate();
    f.compute_tags();
    return f;
  }

  /// c0 + c1 (x-1) + gamma (x-1)^2 + sum_j w_j (x-1)^2/(x+lambda_j) on (0,inf).
  static FunctionSpec convex_rep(double c0, double c1, double gamma, std::vector<Atom> atoms) {
    FunctionSpec f;
    f.form_ = Form::ConvexRep;
    f.alpha_ = c0;
    f.beta_ = c1;
    f.gamma_ = gamma;
    f.atoms_ = std::move(atoms);
    f.domain_ = Interval::positive();
    f.validate();
    f.compute_tags();
    return f;
  }

  /// g(y) = f((y - beta)/alpha) on (-1,1); alpha > 0. Result of the affine
  /// reduction of a finite interval to (-1,1); not present in the grammar.
  static FunctionSpec rescaled(FunctionSpec inner, double alpha, double beta) {
    if (!(alpha > 0)) throw Error("rescaled: alpha must be > 0");
    FunctionSpec f;
    f.form_ = Form::Rescaled;
    f.inner_ = std::make_shared<FunctionSpec>(std::move(inner));
    f.alpha_ = alpha;
    f.beta_ = beta;
    f.domain_ = Interval::unit();
    f.tags_ = f.inner_->tags();  // affine reparametrization preserves classes
    return f;
  }

  // -- accessors ------------------------------------------------------------

  Form form() const { return form_; }
  const Interval& domain() const { return domain_; }
  const ClassTags& tags() const { return tags_; }
  BuiltinKind builtin_kind() const { return builtin_; }
  double param() const { return param_; }
  int tone_order() const { return tone_order_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& poly() const { return poly_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  const FunctionSpec& inner() const { return *inner_; }
  double rescale_alpha() const { return alpha_; }
  double rescale_beta() const { return beta_; }

  bool has_closed_derivs() const { return true; }

  bool is_constant() const {
    switch (form_) {
      case Form::Builtin:
        return builtin_ == BuiltinKind::Const;
      case Form::KtoneRep:
        return atoms_weightless() && poly_.size() <= 1;
      case Form::MonotoneRep:
      case Form::DecreasingRep:
        return atoms_weightless() && beta_ == 0.0;
      case Form::ConvexRep:
        return atoms_weightless() && beta_ == 0.0 && gamma_ == 0.0;
      case Form::Rescaled:
        return inner_->is_constant();
    }
    return false;
  }

  /// (u, v) with f(x) = u + v x when f is exactly affine.
  std::optional<std::pair<double, double>> affine_coeffs() const {
    switch (form_) {
      case Form::Builtin:
        if (builtin_ == BuiltinKind::Id) return {{0.0, 1.0}};
        if (builtin_ == BuiltinKind::Const) return {{param_, 0.0}};
        if (builtin_ == BuiltinKind::Pow && param_ == 1.0) return {{0.0, 1.0}};
        if (builtin_ == BuiltinKind::Pow && param_ == 0.0) return {{1.0, 0.0}};
        return std::nullopt;
      case Form::KtoneRep:
        if (atoms_weightless() && poly_.size() <= 2)
          return {{poly_.empty() ? 0.0 : poly_[0], poly_.size() > 1 ? poly_[1] : 0.0}};
        return std::nullopt;
      case Form::MonotoneRep:
      case Form::DecreasingRep:
        if (atoms_weightless()) return {{alpha_, beta_}};
        return std::nullopt;
      case Form::ConvexRep:
        if (atoms_weightless() && gamma_ == 0.0) return {{alpha_ - beta_, beta_}};
        return std::nullopt;
      case Form::Rescaled:
        if (auto uv = inner_->affine_coeffs())
          return {{uv->first - uv->second * beta_ / alpha_, uv->second / alpha_}};
        return std::nullopt;
    }
    return std::nullopt;
  }

  // -- evaluation -----------------------------------------------------------

  /// Value of the analytic continuation; real z must lie in (a,b).
  Complex eval(Complex z) const { return deriv(z, 0); }
  double eval(double x) const {
    check_real_in_domain(x);
    return deriv_nocheck(x, 0);
  }

  Complex deriv(Complex z, int order) const {
    if (z.imag() == 0.0) check_real_in_domain(z.real());
    return deriv_nocheck(z, order);
  }
  double deriv(double x, int order) const {
    check_real_in_domain(x);
    return deriv_nocheck(x, order);
  }

  // -- text form ------------------------------------------------------------

  std::string print() const {
    std::ostringstream os;
    switch (form_) {
      case Form::Builtin:
        switch (builtin_) {
          case BuiltinKind::Id: os << "id"; break;
          case BuiltinKind::Const: os << "const " << fmt_double(param_); break;
          case BuiltinKind::Pow: os << "pow " << fmt_double(param_); break;
          case BuiltinKind::Log: os << "log"; break;
          case BuiltinKind::Inv: os << "inv"; break;
          case BuiltinKind::Exp: os << "exp"; break;
        }
        os << " on " << domain_.print();
        break;
      case Form::KtoneRep:
        os << "ktone " << tone_order_ << " on " << domain_.print();
        if (!poly_.empty()) {
          os << " poly [";
          for (size_t i = 0; i < poly_.size(); ++i) os << (i ? "," : "") << fmt_double(poly_[i]);
          os << "]";
        }
        os << " atoms " << print_atoms();
        break;
      case Form::MonotoneRep:
      case Form::DecreasingRep:
        os << (form_ == Form::MonotoneRep ? "monotone" : "decreasing") << " on "
           << domain_.print() << " alpha " << fmt_double(alpha_) << " beta " << fmt_double(beta_)
           << " atoms " << print_atoms();
        break;
      case Form::ConvexRep:
        os << "convex on " << domain_.print() << " alpha " << fmt_double(alpha_) << " beta "
           << fmt_double(beta_) << " gamma " << fmt_double(gamma_) << " atoms " << print_atoms();
        break;
      case Form::Rescaled:
        os << "rescaled " << fmt_double(alpha_) << " " << fmt_double(beta_) << " of ("
           << inner_->print() << ")";
        break;
    }
    return os.str();
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"form\":\"" << form_name() << "\",\"domain\":[" << fmt_double(domain_.a) << ","
       << fmt_double(domain_.b) << "]";
    switch (form_) {
      case Form::Builtin:
        os << ",\"name\":" << json_quote(builtin_name());
        if (builtin_ == BuiltinKind::Pow || builtin_ == BuiltinKind::Const)
          os << ",\"param\":" << fmt_double(param_);
        break;
      case Form::KtoneRep:
        os << ",\"l\":" << tone_order_ << ",\"poly\":" << json_poly() << ",\"atoms\":" << json_atoms();
        break;
      case Form::MonotoneRep:
      case Form::DecreasingRep:
        os << ",\"alpha\":" << fmt_double(alpha_) << ",\"beta\":" << fmt_double(beta_)
           << ",\"atoms\":" << json_atoms();
        break;
      case Form::ConvexRep:
        os << ",\"c0\":" << fmt_double(alpha_) << ",\"c1\":" << fmt_double(beta_)
           << ",\"gamma\":" << fmt_double(gamma_) << ",\"atoms\":" << json_atoms();
        break;
      case Form::Rescaled:
        os << ",\"alpha\":" << fmt_double(alpha_) << ",\"beta\":" << fmt_double(beta_)
           << ",\"inner\":" << inner_->to_json();
        break;
    }
    os << ",\"tags\":{\"tones\":[";
    for (size_t i = 0; i < tags_.tones.size(); ++i) os << (i ? "," : "") << tags_.tones[i];
    os << "],\"monotone\":" << (tags_.monotone ? "true" : "false")
       << ",\"decreasing\":" << (tags_.decreasing ? "true" : "false")
       << ",\"convex\":" << (tags_.convex ? "true" : "false")
       << ",\"nonneg\":" << (tags_.nonneg ? "true" : "false") << "}}";
    return os.str();
  }

 private:
  FunctionSpec() = default;

  bool atoms_weightless() const {
    for (const Atom& a : atoms_)
      if (a.w != 0.0) return false;
    return true;
  }

  void check_real_in_domain(double x) const {
    if (!(x > domain_.a && x < domain_.b)) {
      std::ostringstream os;
      os << "eval: real argument " << x << " outside analyticity region; domain "
         << domain_.print();
      throw DomainError(os.str());
    }
  }

  // z^k by repeated multiplication; exact continuation for integer powers.
  template <typename S>
  static S powi(S z, int k) {
    S r = S(1.0);
    for (int i = 0; i < k; ++i) r *= z;
    return r;
  }

  static double falling(double p, int r) {
    double v = 1.0;
    for (int j = 0; j < r; ++j) v *= (p - j);
    return v;
  }

  static double factorial(int n) {
    double v = 1.0;
    for (int i = 2; i <= n; ++i) v *= i;
    return v;
  }

  template <typename S>
  S deriv_nocheck(S z, int r) const {
    switch (form_) {
      case Form::Builtin:
        return builtin_deriv(z, r);
      case Form::KtoneRep: {
        S sum = poly_deriv(poly_, z, r);
        for (const Atom& a : atoms_) sum += a.w * ktone_atom_deriv(tone_order_, a.lambda, z, r);
        return sum;
      }
      case Form::MonotoneRep: {
        S sum = affine_deriv(z, r);
        for (const Atom& a : atoms_) {
          // x/(x+l) = 1 - l/(x+l)
          if (r == 0)
            sum += a.w * (z / (z + a.lambda));
          else
            sum += a.w * a.lambda * (r % 2 ? 1.0 : -1.0) * factorial(r) / powi(z + S(a.lambda), r + 1);
        }
        return sum;
      }
      case Form::DecreasingRep: {
        S sum = affine_deriv(z, r);
        for (const Atom& a : atoms_)
          sum += a.w * (r % 2 ? -1.0 : 1.0) * factorial(r) / powi(z + S(a.lambda), r + 1);
        return sum;
      }
      case Form::ConvexRep: {
        // c0 + c1 (x-1) + gamma (x-1)^2, atoms via
        // (x-1)^2/(x+l) = x - (2+l) + (1+l)^2/(x+l).
        S sum = S(0.0);
        if (r == 0) sum = S(alpha_) + beta_ * (z - S(1.0)) + gamma_ * powi(z - S(1.0), 2);
        if (r == 1) sum = S(beta_) + 2.0 * gamma_ * (z - S(1.0));
        if (r == 2) sum = S(2.0 * gamma_);
        for (const Atom& a : atoms_) {
          const double c = (1.0 + a.lambda) * (1.0 + a.lambda);
          if (r == 0)
            sum += a.w * (z - S(2.0 + a.lambda) + c / (z + S(a.lambda)));
          else if (r == 1)
            sum += a.w * (S(1.0) - c / powi(z + S(a.lambda), 2));
          else
            sum += a.w * c * (r % 2 ? -1.0 : 1.0) * factorial(r) / powi(z + S(a.lambda), r + 1);
        }
        return sum;
      }
      case Form::Rescaled:
        return inner_->deriv_nocheck((z - S(beta_)) / S(alpha_), r) / powi(S(alpha_), r);
    }
    throw Error("FunctionSpec: unknown form");
  }

  template <typename S>
  S affine_deriv(S z, int r) const {
    if (r == 0) return S(alpha_) + beta_ * z;
    if (r == 1) return S(beta_);
    return S(0.0);
  }

  template <typename S>
  static S poly_deriv(const std::vector<double>& c, S z, int r) {
    S sum = S(0.0);
    for (int j = r; j < static_cast<int>(c.size()); ++j)
      sum += c[j] * falling(static_cast<double>(j), r) * powi(z, j - r);
    return sum;
  }

  /// d^r/dx^r of x^l/(1 - lambda x). For lambda != 0 uses the split
  /// x^l/(1-lx) = l^{-l}/(1-lx) - l^{-l} sum_{j<l} (lx)^j.
  template <typename S>
  static S ktone_atom_deriv(int l, double lambda, S z, int r) {
    if (lambda == 0.0) {
      if (r > l) return S(0.0);
      return falling(static_cast<double>(l), r) * powi(z, l - r);
    }
    const double li = 1.0 / std::pow(lambda, l);
    const S res = factorial(r) * std::pow(lambda, r) / powi(S(1.0) - lambda * z, r + 1);
    S poly = S(0.0);
    for (int j = r; j < l; ++j)
      poly += std::pow(lambda, j) * falling(static_cast<double>(j), r) * powi(z, j - r);
    return li * res - li * poly;
  }

  template <typename S>
  S builtin_deriv(S z, int r) const {
    switch (builtin_) {
      case BuiltinKind::Id:
        return r == 0 ? z : (r == 1 ? S(1.0) : S(0.0));
      case BuiltinKind::Const:
        return r == 0 ? S(param_) : S(0.0);
      case BuiltinKind::Pow: {
        const double p = param_;
        if (p >= 0 && p == std::floor(p)) {
          const int ip = static_cast<int>(p);
          if (r > ip) return S(0.0);
          return falling(p, r) * powi(z, ip - r);
        }
        return falling(p, r) * std::pow(z, S(p - r));
      }
      case BuiltinKind::Log:
        if (r == 0) return std::log(z);
        return (r % 2 ? 1.0 : -1.0) * factorial(r - 1) / powi(z, r);
      case BuiltinKind::Inv:
        return (r % 2 ? -1.0 : 1.0) * factorial(r) / powi(z, r + 1);
      case BuiltinKind::Exp:
        return std::exp(z);
    }
    throw Error("FunctionSpec: unknown builtin");
  }

  void validate() const {
    if (!(domain_.a < domain_.b)) throw Error("FunctionSpec: interval requires a < b");
    if (form_ == Form::Builtin) {
      const bool needs_cut = builtin_ == BuiltinKind::Log || builtin_ == BuiltinKind::Inv ||
                             (builtin_ == BuiltinKind::Pow &&
                              !(param_ >= 0 && param_ == std::floor(param_)));
      if (needs_cut && !(domain_.a >= 0.0))
        throw Error("FunctionSpec: " + builtin_name() + " requires domain within (0,inf)");
      if (builtin_ == BuiltinKind::Pow && !std::isfinite(param_))
        throw Error("FunctionSpec: pow exponent must be finite");
      return;
    }
    if (form_ == Form::KtoneRep) {
      if (tone_order_ < 0 || tone_order_ > kMaxTone)
        throw Error("FunctionSpec: field l: tone order must be in [1," + std::to_string(kMaxTone) + "]");
      if (static_cast<int>(poly_.size()) > tone_order_)  // deg P < l
        throw Error("FunctionSpec: field poly: deg P >= l");
      for (const Atom& a : atoms_) {
        if (a.w < 0) throw Error("FunctionSpec: field atoms: negative weight");
        if (std::abs(a.lambda) > 1.0 - kLambdaMargin)
          throw Error("FunctionSpec: field atoms: |lambda| must be <= 1 - 1e-3");
      }
      return;
    }
    if (form_ == Form::MonotoneRep || form_ == Form::DecreasingRep) {
      if (alpha_ < 0) throw Error("FunctionSpec: field alpha: must be >= 0");
      if (beta_ < 0) throw Error("FunctionSpec: field beta: must be >= 0");
      for (const Atom& a : atoms_) {
        if (a.w < 0) throw Error("FunctionSpec: field atoms: negative weight");
        if (form_ == Form::MonotoneRep && !(a.lambda > 0))
          throw Error("FunctionSpec: field atoms: lambda must be > 0");
        if (form_ == Form::DecreasingRep && !(a.lambda >= 0))
          throw Error("FunctionSpec: field atoms: lambda must be >= 0");
      }
      return;
    }
    if (form_ == Form::ConvexRep) {
      if (gamma_ < 0) throw Error("FunctionSpec: field gamma: must be >= 0");
      for (const Atom& a : atoms_) {
        if (a.w < 0) throw Error("FunctionSpec: field atoms: negative weight");
        if (!(a.lambda >= 0)) throw Error("FunctionSpec: field atoms: lambda must be >= 0");
      }
      return;
    }
  }

  void add_tone_chain(int k0) {
    for (int k = k0; k <= kMaxTone; k += 2)
      if (k >= 1 && !tags_.has_tone(k)) tags_.tones.push_back(k);
    std::sort(tags_.tones.begin(), tags_.tones.end());
  }

  void all_tones() {
    tags_.tones.clear();
    for (int k = 1; k <= kMaxTone; ++k) tags_.tones.push_back(k);
  }

  void compute_tags() {
    tags_ = ClassTags{};
    if (is_constant()) {
      all_tones();
      tags_.monotone = tags_.decreasing = tags_.convex = true;
      tags_.nonneg = deriv_nocheck(midpoint(), 0) >= 0.0;
      return;
    }
    if (auto uv = affine_coeffs()) {
      const double u = uv->first, v = uv->second;
      all_tones();
      tags_.monotone = v > 0;
      tags_.decreasing = v < 0;
      tags_.convex = true;
      if (domain_.finite())
        tags_.nonneg = std::min(u + v * domain_.a, u + v * domain_.b) >= 0.0;
      else
        tags_.nonneg = v >= 0 && u + v * domain_.a >= 0.0 && std::isfinite(domain_.a);
      return;
    }
    switch (form_) {
      case Form::Builtin:
        switch (builtin_) {
          case BuiltinKind::Pow: {
            const double p = param_;
            if (p >= 0 && p == std::floor(p)) {
              const int ip = static_cast<int>(p);
              add_tone_chain(ip);
              tags_.convex = (ip == 2);
              tags_.nonneg = (ip % 2 == 0) || domain_.a >= 0.0;
            } else {
              if (p >= 0.0 && p <= 1.0) {
                tags_.monotone = true;
                add_tone_chain(1);
              }
              if ((p >= 1.0 && p <= 2.0) || (p >= -1.0 && p <= 0.0)) {
                tags_.convex = true;
                add_tone_chain(2);
              }
              tags_.decreasing = (p >= -1.0 && p <= 0.0);
              tags_.nonneg = domain_.a >= 0.0;
            }
            break;
          }
          case BuiltinKind::Log:
            tags_.monotone = true;
            add_tone_chain(1);
            tags_.nonneg = domain_.a >= 1.0;
            break;
          case BuiltinKind::Inv:
            tags_.convex = true;
            tags_.decreasing = true;
            add_tone_chain(2);
            tags_.nonneg = domain_.a >= 0.0;
            break;
          case BuiltinKind::Exp:
            break;  // negative control: no certificates
          default:
            break;
        }
        break;
      case Form::KtoneRep:
        add_tone_chain(std::max(tone_order_, 1));
        if (tone_order_ == 1) tags_.monotone = true;
        if (tone_order_ == 2) tags_.convex = true;
        break;
      case Form::MonotoneRep:
        tags_.monotone = true;
        tags_.nonneg = true;
        add_tone_chain(1);
        break;
      case Form::DecreasingRep:
        tags_.convex = true;
        tags_.nonneg = true;
        tags_.decreasing = (beta_ == 0.0);
        add_tone_chain(2);
        break;
      case Form::ConvexRep:
        tags_.convex = true;
        add_tone_chain(2);
        break;
      case Form::Rescaled:
        break;  // copied in the factory
    }
  }

  double midpoint() const {
    if (domain_.finite()) return 0.5 * (domain_.a + domain_.b);
    if (std::isfinite(domain_.a)) return domain_.a + 1.0;
    if (std::isfinite(domain_.b)) return domain_.b - 1.0;
    return 0.0;
  }

  std::string builtin_name() const {
    switch (builtin_) {
      case BuiltinKind::Id: return "id";
      case BuiltinKind::Const: return "const";
      case BuiltinKind::Pow: return "pow";
      case BuiltinKind::Log: return "log";
      case BuiltinKind::Inv: return "inv";
      case BuiltinKind::Exp: return "exp";
    }
    return "?";
  }

  std::string form_name() const {
    switch (form_) {
      case Form::Builtin: return "builtin";
      case Form::KtoneRep: return "ktone_rep";
      case Form::MonotoneRep: return "monotone_rep";
      case Form::DecreasingRep: return "decreasing_rep";
      case Form::ConvexRep: return "convex_rep";
      case Form::Rescaled: return "rescaled";
    }
    return "?";
  }

  std::string print_atoms() const {
    std::string out = "[";
    for (size_t i = 0; i < atoms_.size(); ++i) {
      if (i) out += ",";
      out += "(" + fmt_double(atoms_[i].w) + "," + fmt_double(atoms_[i].lambda) + ")";
    }
    return out + "]";
  }

  std::string json_atoms() const {
    std::string out = "[";
    for (size_t i = 0; i < atoms_.size(); ++i) {
      if (i) out += ",";
      out += "[" + fmt_double(atoms_[i].w) + "," + fmt_double(atoms_[i].lambda) + "]";
    }
    return out + "]";
  }

  std::string json_poly() const {
    std::string out = "[";
    for (size_t i = 0; i < poly_.size(); ++i) {
      if (i) out += ",";
      out += fmt_double(poly_[i]);
    }
    return out + "]";
  }

  Form form_ = Form::Builtin;
  BuiltinKind builtin_ = BuiltinKind::Id;
  double param_ = 0.0;
  Interval domain_;
  int tone_order_ = 1;
  std::vector<double> poly_;
  std::vector<Atom> atoms_;
  double alpha_ = 0.0, beta_ = 0.0, gamma_ = 0.0;
  std::shared_ptr<const FunctionSpec> inner_;
  ClassTags tags_;
};

}  // namespace opertone

#pragma once
// Closed-form derivative identities for representation atoms, the affine
// reduction of finite intervals to (-1,1), and seeded construction of
// certified operator-class functions.
//
// The resolvent identity: with C = lambda (I-lambda A)^{-1/2} B (I-lambda A)^{-1/2},
//   D^m (1/(1-lambda x)) (A;B) = m! (I-lambda A)^{-1/2} C^m (I-lambda A)^{-1/2},
// and x^l/(1-lambda x) splits off an explicit polynomial part handled by the
// word sums.

#include "opertone/frechet.hpp"
#include "opertone/rng.hpp"

namespace opertone {

/// Factorization data behind the closed forms: inv_sqrt is (I-lambda A)^{-1/2}
/// or (A+lambda I)^{-1/2} depending on the context, c_matrix the sandwiched
/// direction.
struct ResolventFactorization {
  double lambda = 0.0;
  HermitianMatrix inv_sqrt;
  HermitianMatrix c_matrix;
};

/// inv_sqrt = (I - lambda A)^{-1/2}, C = lambda * inv_sqrt B inv_sqrt.
/// Requires I - lambda A > 0.
inline ResolventFactorization resolvent_factorization(double lambda, const HermitianMatrix& a,
                                                      const HermitianMatrix& b) {
  const int n = a.dim();
  const HermitianMatrix m = HermitianMatrix::project(CMat::Identity(n, n) - lambda * a.mat());
  if (!(psd_margin(m) > 0))
    throw Error("resolvent_factorization: I - lambda A is not positive definite");
  HermitianMatrix s = hermitian_power(m, -0.5);
  HermitianMatrix c = HermitianMatrix::project(lambda * (s.mat() * b.mat() * s.mat()));
  return {lambda, std::move(s), std::move(c)};
}

/// inv_sqrt = (A + lambda I)^{-1/2}, C = inv_sqrt B inv_sqrt. Requires A + lambda I > 0.
inline ResolventFactorization shifted_factorization(double lambda, const HermitianMatrix& a,
                                                    const HermitianMatrix& b) {
  const int n = a.dim();
  const HermitianMatrix m = HermitianMatrix::project(a.mat() + lambda * CMat::Identity(n, n));
  if (!(psd_margin(m) > 0))
    throw Error("shifted_factorization: A + lambda I is not positive definite");
  HermitianMatrix s = hermitian_power(m, -0.5);
  HermitianMatrix c = HermitianMatrix::project(s.mat() * b.mat() * s.mat());
  return {lambda, std::move(s), std::move(c)};
}

enum class AtomKind { Resolvent, KtoneAtom };

namespace detail {

inline CMat sandwich_power(const ResolventFactorization& rf, int m) {
  const int n = rf.inv_sqrt.dim();
  CMat cm = CMat::Identity(n, n);
  for (int i = 0; i < m; ++i) cm = cm * rf.c_matrix.mat();
  return rf.inv_sqrt.mat() * cm * rf.inv_sqrt.mat();
}

/// D^m (1/(x+lambda)) (A;B) = m! (-1)^m S C^m S with S = (A+lambda I)^{-1/2},
/// C = S B S.
inline CMat shifted_resolvent_deriv(double lambda, const HermitianMatrix& a,
                                    const HermitianMatrix& b, int m) {
  const ResolventFactorization rf = shifted_factorization(lambda, a, b);
  return factorial_d(m) * ((m % 2) ? -1.0 : 1.0) * sandwich_power(rf, m);
}

}  // namespace detail

/// Closed-form D^m for the representation atoms. Resolvent kind is
/// 1/(1-lambda x); ktone_atom is x^l/(1-lambda x), whose polynomial part is
/// evaluated through the word sums (lambda = 0 degenerates to the monomial).
inline DerivativeTensor exact_frechet_atom(AtomKind kind, double lambda, int l,
                                           const HermitianMatrix& a, const HermitianMatrix& b,
                                           int m) {
  if (m < 0 || m > 12) throw Error("exact_frechet_atom: order must be in [0,12]");
  const int n = a.dim();
  CMat value;
  if (kind == AtomKind::Resolvent) {
    if (lambda == 0.0) {
      value = (m == 0) ? CMat(CMat::Identity(n, n)) : CMat(CMat::Zero(n, n));
    } else {
      const ResolventFactorization rf = resolvent_factorization(lambda, a, b);
      value = detail::factorial_d(m) * detail::sandwich_power(rf, m);
    }
  } else {
    if (lambda == 0.0) {
      value = (m > l) ? CMat(CMat::Zero(n, n))
                      : CMat(detail::factorial_d(m) * poly_word_sum(l, m, a, b).mat());
    } else {
      const ResolventFactorization rf = resolvent_factorization(lambda, a, b);
      const double li = 1.0 / std::pow(lambda, l);
      value = li * detail::factorial_d(m) * detail::sandwich_power(rf, m);
      // P_lambda(x) = -lambda^{-l} * sum_{j<l} lambda^j x^j
      for (int j = m; j < l; ++j)
        value -= li * std::pow(lambda, j) * detail::factorial_d(m) *
                 poly_word_sum(j, m, a, b).mat();
    }
  }
  value = 0.5 * (value + value.adjoint());
  return {m, ComplexMatrix(value), DerivEngine::ClosedForm, 1e-13 * (1.0 + value.norm()), true};
}

// ---------------------------------------------------------------------------
// Closed-form engine for whole representation specs

namespace detail {

inline CMat closed_form_deriv(const FunctionSpec& f, const HermitianMatrix& a,
                              const HermitianMatrix& b, int m);

inline CMat closed_form_poly(const std::vector<double>& coeffs, const HermitianMatrix& a,
                             const HermitianMatrix& b, int m) {
  const int n = a.dim();
  CMat acc = CMat::Zero(n, n);
  for (int j = m; j < static_cast<int>(coeffs.size()); ++j)
    if (coeffs[j] != 0.0)
      acc += coeffs[j] * factorial_d(m) * poly_word_sum(j, m, a, b).mat();
  return acc;
}

inline CMat closed_form_deriv(const FunctionSpec& f, const HermitianMatrix& a,
                              const HermitianMatrix& b, int m) {
  const int n = a.dim();
  if (m == 0) return calc_hermitian(f, a).mat();
  switch (f.form()) {
    case FunctionSpec::Form::Builtin: {
      if (f.builtin_kind() == BuiltinKind::Id)
        return m == 1 ? CMat(b.mat()) : CMat(CMat::Zero(n, n));
      if (f.builtin_kind() == BuiltinKind::Const) return CMat::Zero(n, n);
      if (f.builtin_kind() == BuiltinKind::Pow) {
        const double p = f.param();
        if (p >= 0 && p == std::floor(p)) {
          const int ip = static_cast<int>(p);
          return m > ip ? CMat(CMat::Zero(n, n))
                        : CMat(factorial_d(m) * poly_word_sum(ip, m, a, b).mat());
        }
      }
      throw Error("closed-form engine: unavailable for builtin " + f.print());
    }
    case FunctionSpec::Form::KtoneRep: {
      CMat acc = closed_form_poly(f.poly(), a, b, m);
      for (const Atom& at : f.atoms())
        acc += at.w *
               exact_frechet_atom(AtomKind::KtoneAtom, at.lambda, f.tone_order(), a, b, m)
                   .value.mat();
      return acc;
    }
    case FunctionSpec::Form::MonotoneRep: {
      CMat acc = (m == 1) ? CMat(f.beta() * b.mat()) : CMat(CMat::Zero(n, n));
      for (const Atom& at : f.atoms())  // x/(x+l) = 1 - l/(x+l)
        acc -= at.w * at.lambda * shifted_resolvent_deriv(at.lambda, a, b, m);
      return acc;
    }
    case FunctionSpec::Form::DecreasingRep: {
      CMat acc = (m == 1) ? CMat(f.beta() * b.mat()) : CMat(CMat::Zero(n, n));
      for (const Atom& at : f.atoms())
        acc += at.w * shifted_resolvent_deriv(at.lambda, a, b, m);
      return acc;
    }
    case FunctionSpec::Form::ConvexRep: {
      // c1 (x-1) + gamma (x-1)^2 handled as polynomials in x
      std::vector<double> poly = {f.alpha() - f.beta() + f.gamma(), f.beta() - 2.0 * f.gamma(),
                                  f.gamma()};
      CMat acc = closed_form_poly(poly, a, b, m);
      for (const Atom& at : f.atoms()) {
        // (x-1)^2/(x+l) = x - (2+l) + (1+l)^2/(x+l)
        if (m == 1) acc += at.w * b.mat();
        acc += at.w * std::pow(1.0 + at.lambda, 2) *
               shifted_resolvent_deriv(at.lambda, a, b, m);
      }
      return acc;
    }
    case FunctionSpec::Form::Rescaled: {
      const double alpha = f.rescale_alpha();
      const double beta = f.rescale_beta();
      const HermitianMatrix ai =
          HermitianMatrix::project((a.mat() - beta * CMat::Identity(n, n)) / alpha);
      return closed_form_deriv(f.inner(), ai, b, m) / std::pow(alpha, m);
    }
  }
  throw Error("closed-form engine: unknown form");
}

}  // namespace detail

/// Engine dispatcher. Auto prefers divided differences for Hermitian pairs
/// within its size limits, falling back to the contour engine.
inline DerivativeTensor compute_derivative(const FunctionSpec& f, const HermitianMatrix& a,
                                           const HermitianMatrix& b, int m,
                                           DerivEngine engine = DerivEngine::Auto) {
  switch (engine) {
    case DerivEngine::Auto:
      if (a.dim() <= 8 && m <= 8) return frechet_divided_diff(f, a, b, m);
      return frechet_contour(f, a, b, m);
    case DerivEngine::DividedDiff:
      return frechet_divided_diff(f, a, b, m);
    case DerivEngine::Contour:
      return frechet_contour(f, a, b, m);
    case DerivEngine::FiniteDiff:
      return frechet_fd_oracle(f, a, b, m);
    case DerivEngine::ClosedForm: {
      CMat v = detail::closed_form_deriv(f, a, b, m);
      v = 0.5 * (v + v.adjoint());
      return {m, ComplexMatrix(v), DerivEngine::ClosedForm, 1e-13 * (1.0 + v.norm()), true};
    }
  }
  throw Error("compute_derivative: unknown engine");
}

// ---------------------------------------------------------------------------
// Affine reduction to (-1,1)

struct RescaleResult {
  FunctionSpec f;
  HermitianMatrix a;
  HermitianMatrix b;
  double alpha = 1.0;
  double beta = 0.0;
};

/// Maps a finite (a,b) onto (-1,1): returns (f~, A~, B~) with
/// f~(x) = f((x-beta)/alpha), A~ = alpha A + beta I, B~ = alpha B, so that
/// D^m f(A;B) = D^m f~(A~;B~).
inline RescaleResult affine_rescale(const FunctionSpec& f, const HermitianMatrix& a,
                                    const HermitianMatrix& b) {
  const Interval dom = f.domain();
  if (!dom.finite())
    throw Error("affine_rescale: unsupported for infinite endpoints; shrink to a finite hull first");
  const Spectrum sp = hermitian_eigen(a);
  const RVec lam = sp.real_values();
  if (!(lam(0) > dom.a && lam(lam.size() - 1) < dom.b))
    throw DomainError("affine_rescale: sigma(A) not inside the domain");
  const double alpha = 2.0 / (dom.b - dom.a);
  const double beta = -(dom.b + dom.a) / (dom.b - dom.a);
  const int n = a.dim();
  RescaleResult out{
      FunctionSpec::rescaled(f, alpha, beta),
      HermitianMatrix::project(alpha * a.mat() + beta * CMat::Identity(n, n)),
      HermitianMatrix::project(alpha * b.mat()), alpha, beta};
  return out;
}

// ---------------------------------------------------------------------------
// Certified random specs

enum class CertClass { Ktone, Monotone, Decreasing, Convex };

/// Draws a spec whose operator class holds by construction; weights are
/// log-uniform in [1e-2, 1], nodes stay away from singular configurations.
inline FunctionSpec random_certified(CertClass cls, int k, std::uint64_t seed, int atom_count) {
  if (atom_count < 0 || atom_count > 16) throw Error("random_certified: atom_count in [0,16]");
  Rng rng(seed);
  std::vector<Atom> atoms;
  switch (cls) {
    case CertClass::Ktone: {
      if (k < 1 || k > kMaxTone) throw Error("random_certified: ktone order in [1,12]");
      const int deg = k > 1 ? static_cast<int>(rng.uniform(0.0, static_cast<double>(k - 1))) : 0;
      std::vector<double> poly(deg + 1);
      for (double& c : poly) c = rng.uniform(-1.0, 1.0);
      for (int i = 0; i < atom_count; ++i)
        atoms.push_back({rng.log_uniform(1e-2, 1.0),
                         rng.uniform(-(1.0 - kLambdaMargin), 1.0 - kLambdaMargin)});
      return FunctionSpec::ktone_rep(k, std::move(poly), std::move(atoms));
    }
    case CertClass::Monotone: {
      const double al = rng.log_uniform(1e-2, 1.0);
      const double be = rng.log_uniform(1e-2, 1.0);
      for (int i = 0; i < atom_count; ++i)
        atoms.push_back({rng.log_uniform(1e-2, 1.0), rng.log_uniform(1e-2, 1e2)});
      return FunctionSpec::monotone_rep(al, be, std::move(atoms));
    }
    case CertClass::Decreasing: {
      const double al = rng.log_uniform(1e-2, 1.0);
      for (int i = 0; i < atom_count; ++i)
        atoms.push_back({rng.log_uniform(1e-2, 1.0), rng.log_uniform(1e-2, 1e2)});
      return FunctionSpec::decreasing_rep(al, 0.0, std::move(atoms));
    }
    case CertClass::Convex: {
      const double c0 = rng.uniform(-1.0, 1.0);
      const double c1 = rng.uniform(-1.0, 1.0);
      const double ga = rng.log_uniform(1e-2, 1.0);
      for (int i = 0; i < atom_count; ++i)
        atoms.push_back({rng.log_uniform(1e-2, 1.0), rng.log_uniform(1e-2, 1e2)});
      return FunctionSpec::convex_rep(c0, c1, ga, std::move(atoms));
    }
  }
  throw Error("random_certified: unknown class");
}

}  // namespace opertone

#pragma once
// Analytic functional calculus f(X) = (2*pi*i)^{-1} * closed integral of
// f(zeta) (zeta I - X)^{-1} dzeta, with two independent evaluation paths:
// diagonalization (fast, needs a well-conditioned eigenbasis) and contour
// quadrature with node doubling (authoritative for non-normal X).

#include <sstream>

#include "opertone/contour.hpp"
#include "opertone/function_spec.hpp"
#include "opertone/matrix.hpp"

namespace opertone {

enum class CalcPath { Auto, EigenPath, ContourPath };

constexpr double kEigenPathCondCap = 1e6;
constexpr double kCalcContourTol = 1e-11;
constexpr int kContourStartNodes = 64;
constexpr int kContourMaxNodes = 8192;

struct CalcResult {
  ComplexMatrix value;
  CalcPath path = CalcPath::EigenPath;
  double est_error = 0.0;
  int nodes_used = 0;

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"value\":" << matrix_to_json(value) << ",\"path\":\""
       << (path == CalcPath::EigenPath ? "eigen" : "contour")
       << "\",\"est_error\":" << fmt_double(est_error) << ",\"nodes_used\":" << nodes_used << "}";
    return os.str();
  }
};

/// Usual functional calculus of a Hermitian argument: f applied to the
/// eigenvalues. Every eigenvalue must keep distance 1e-9 from the domain
/// endpoints.
inline HermitianMatrix calc_hermitian(const FunctionSpec& f, const HermitianMatrix& a) {
  const Spectrum sp = hermitian_eigen(a);
  const RVec lam = sp.real_values();
  const Interval& dom = f.domain();
  RVec flam(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    const bool low_ok = !std::isfinite(dom.a) || lam(i) - dom.a >= 1e-9;
    const bool high_ok = !std::isfinite(dom.b) || dom.b - lam(i) >= 1e-9;
    if (!low_ok || !high_ok || !dom.contains(lam(i))) {
      std::ostringstream os;
      os << "calc_hermitian: eigenvalue " << fmt_double(lam(i))
         << " outside or within 1e-9 of the domain " << dom.print();
      throw DomainError(os.str());
    }
    flam(i) = f.deriv(lam(i), 0);
  }
  const CMat r = sp.right_vectors * flam.asDiagonal() * sp.right_vectors.adjoint();
  return HermitianMatrix::project(r);
}

namespace detail {

struct Hypotheses {
  bool upper = false;   // Im X > 0
  bool lower = false;   // Im X < 0 (handled by reflection)
  bool strip = false;   // sigma(Re X) in (a,b)
  double im_margin = 0.0;
  double strip_gap = 0.0;
};

inline Hypotheses classify(const FunctionSpec& f, const ComplexMatrix& x) {
  Hypotheses h;
  const auto parts = re_im_parts(x);
  h.im_margin = psd_margin(parts.second);
  h.upper = h.im_margin > 0;
  h.lower = -max_eigenvalue(parts.second) > 0;
  const Spectrum spa = hermitian_eigen(parts.first);
  const RVec lam = spa.real_values();
  const Interval& dom = f.domain();
  double gap = std::numeric_limits<double>::infinity();
  if (std::isfinite(dom.a)) gap = std::min(gap, lam(0) - dom.a);
  if (std::isfinite(dom.b)) gap = std::min(gap, dom.b - lam(lam.size() - 1));
  h.strip_gap = gap;
  h.strip = lam(0) > dom.a && lam(lam.size() - 1) < dom.b;
  return h;
}

inline void require_some_hypothesis(const Hypotheses& h, const FunctionSpec& f) {
  if (h.upper || h.lower || h.strip) return;
  std::ostringstream os;
  os << "analytic calculus: neither hypothesis holds: psd_margin(Im X) = "
     << fmt_double(h.im_margin) << ", sigma(Re X) clearance to " << f.domain().print() << " = "
     << fmt_double(h.strip_gap);
  throw PrecondError(os.str());
}

/// (2 pi i)^{-1} * sum_j w_j f(zeta_j) ((zeta_j I - X)^{-1} Z)^m (zeta_j I - X)^{-1},
/// evaluated in fixed node order. m = 0 with Z unused reproduces f(X).
inline CMat contour_sum(const FunctionSpec& f, const ComplexMatrix& x, const CMat* z, int m,
                        const Contour& contour) {
  const int n = x.dim();
  CMat acc = CMat::Zero(n, n);
  const CMat eye = CMat::Identity(n, n);
  for (int j = 0; j < contour.node_count; ++j) {
    const Complex zeta = contour.nodes[j];
    Eigen::PartialPivLU<CMat> lu(zeta * eye - x.mat());
    CMat t = lu.solve(eye);
    for (int s = 0; s < m; ++s) t = lu.solve((*z) * t);
    acc.noalias() += (contour.weights[j] * f.eval(zeta)) * t;
  }
  return acc / Complex(0.0, 2.0 * M_PI);
}

struct ContourEval {
  CMat value;
  double cauchy_diff = 0.0;
  int nodes = 0;
};

inline ContourEval contour_with_doubling(const FunctionSpec& f, const ComplexMatrix& x,
                                         const CMat* z, int m, ContourCase ccase,
                                         double rel_tol) {
  Contour contour = build_contour(x, f, ccase, kContourStartNodes);
  CMat prev = contour_sum(f, x, z, m, contour);
  double last_diff = std::numeric_limits<double>::infinity();
  for (int n = 2 * kContourStartNodes; n <= kContourMaxNodes; n *= 2) {
    contour.fill_nodes(n);
    CMat cur = contour_sum(f, x, z, m, contour);
    last_diff = (cur - prev).norm();
    if (last_diff <= rel_tol * std::max(cur.norm(), 1e-30)) return {cur, last_diff, n};
    prev = cur;
  }
  std::ostringstream os;
  os << "contour quadrature: no convergence at " << kContourMaxNodes
     << " nodes, last Cauchy difference " << fmt_double(last_diff);
  throw AccuracyError(os.str(), last_diff);
}

inline ContourCase pick_case(const Hypotheses& h) {
  // Both hypotheses may hold; prefer the one with the larger clearance
  // (e.g. B barely PSD makes the upper half-plane path ill-conditioned
  // while the strip crossing stays healthy).
  if (h.strip && (!h.upper || h.strip_gap > h.im_margin)) return ContourCase::Strip;
  return ContourCase::UpperHalf;
}

}  // namespace detail

/// f(X) under either spectral-localization hypothesis. Auto takes the eigen
/// fast path when the eigenvector matrix is well conditioned and falls back
/// to contour quadrature otherwise. Im X < 0 is handled by reflection:
/// f(X) = f(X*)*.
inline CalcResult analytic_calc(const FunctionSpec& f, const ComplexMatrix& x,
                                CalcPath path = CalcPath::Auto) {
  const detail::Hypotheses h = detail::classify(f, x);
  detail::require_some_hypothesis(h, f);
  if (!h.upper && !h.strip) {
    CalcResult r = analytic_calc(f, x.adjoint(), path);
    return {r.value.adjoint(), r.path, r.est_error, r.nodes_used};
  }

  const auto eigen_path = [&]() -> CalcResult {
    const Spectrum sp = general_eigen(x);
    const int n = x.dim();
    CVec flam(n);
    for (int i = 0; i < n; ++i) flam(i) = f.eval(sp.values(i));
    Eigen::PartialPivLU<CMat> lu(sp.right_vectors);
    const CMat value = sp.right_vectors * flam.asDiagonal() * lu.solve(CMat::Identity(n, n));
    CalcResult r{ComplexMatrix(value), CalcPath::EigenPath, 0.0, 0};
    r.est_error = sp.vector_condition * std::numeric_limits<double>::epsilon() *
                  (1.0 + value.norm());
    return r;
  };

  const auto contour_path = [&]() -> CalcResult {
    const detail::ContourEval ev =
        detail::contour_with_doubling(f, x, nullptr, 0, detail::pick_case(h), kCalcContourTol);
    return {ComplexMatrix(ev.value), CalcPath::ContourPath, ev.cauchy_diff, ev.nodes};
  };

  switch (path) {
    case CalcPath::EigenPath:
      return eigen_path();
    case CalcPath::ContourPath:
      return contour_path();
    case CalcPath::Auto: {
      const Spectrum sp = general_eigen(x);
      if (sp.vector_condition <= kEigenPathCondCap) {
        try {
          return eigen_path();
        } catch (const DomainError&) {
          // eigenvalue grazing the region boundary; contour is authoritative
        }
      }
      return contour_path();
    }
  }
  throw Error("analytic_calc: unreachable");
}

}  // namespace opertone

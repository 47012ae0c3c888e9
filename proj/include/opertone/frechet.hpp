#pragma once
// Higher-order directional derivatives D^m f(A;B) = (d^m/dt^m) f(A+tB)|_{t=0}
// by three mutually independent engines:
//   contour       m!/(2 pi i) * closed integral of f(zeta) ((zeta I-X)^{-1} Z)^m (zeta I-X)^{-1}
//   divided_diff  spectral multi-index sum with confluent divided differences
//   finite_diff   central stencils on t -> f(A+tB) with Richardson extrapolation
// plus the word sums F_{l-m,m}(A,B) for monomials and the alternating
// even/odd Taylor partial sums built from a single engine.

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "opertone/funcalc.hpp"

namespace opertone {

enum class DerivEngine { Auto, Contour, DividedDiff, FiniteDiff, ClosedForm };

constexpr double kFrechetContourTol = 1e-10;

inline std::string engine_name(DerivEngine e) {
  switch (e) {
    case DerivEngine::Auto: return "auto";
    case DerivEngine::Contour: return "contour";
    case DerivEngine::DividedDiff: return "divided_diff";
    case DerivEngine::FiniteDiff: return "finite_diff";
    case DerivEngine::ClosedForm: return "closed_form";
  }
  return "?";
}

struct DerivativeTensor {
  int order = 0;
  ComplexMatrix value;
  DerivEngine engine = DerivEngine::Contour;
  double est_error = 0.0;
  bool hermitian = false;

  HermitianMatrix hermitian_value() const {
    if (!hermitian) throw Error("DerivativeTensor: value is not flagged Hermitian");
    return HermitianMatrix::project(value.mat());
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"order\":" << order << ",\"value\":" << matrix_to_json(value) << ",\"engine\":\""
       << engine_name(engine) << "\",\"est_error\":" << fmt_double(est_error) << "}";
    return os.str();
  }
};

// ---------------------------------------------------------------------------
// Word sums: F_{a,b}(A,B) = sum of all products of a A's and b B's.

/// F_{l-m,m}(A,B) by direct enumeration of the C(l,m) words;
/// D^m x^l (A;B) = m! F_{l-m,m}.
inline HermitianMatrix poly_word_sum(int l, int m, const HermitianMatrix& a,
                                     const HermitianMatrix& b) {
  if (l < 0 || m < 0 || m > l || l > 12) throw Error("poly_word_sum: need 0 <= m <= l <= 12");
  const int n = a.dim();
  CMat sum = CMat::Zero(n, n);
  if (m == 0 && l == 0) return HermitianMatrix::identity(n);
  // positions of the B factors among l slots
  std::vector<int> pos(m);
  for (int i = 0; i < m; ++i) pos[i] = i;
  while (true) {
    CMat word = CMat::Identity(n, n);
    int next_b = 0;
    for (int slot = 0; slot < l; ++slot) {
      const bool is_b = next_b < m && pos[next_b] == slot;
      word = word * (is_b ? b.mat() : a.mat());
      if (is_b) ++next_b;
    }
    sum += word;
    if (m == 0) break;
    int i = m - 1;
    while (i >= 0 && pos[i] == l - m + i) --i;
    if (i < 0) break;
    ++pos[i];
    for (int j = i + 1; j < m; ++j) pos[j] = pos[j - 1] + 1;
    continue;
  }
  return HermitianMatrix::project(sum);
}

// ---------------------------------------------------------------------------
// Contour engine

namespace detail {

inline double factorial_d(int n) {
  double v = 1.0;
  for (int i = 2; i <= n; ++i) v *= i;
  return v;
}

}  // namespace detail

/// Eq.-style contour derivative for general X, Z. Hermitian (X, Z) pairs are
/// symmetrized and flagged; the quadrature doubles nodes until the Cauchy
/// difference is below 1e-10 relative.
inline DerivativeTensor frechet_contour(const FunctionSpec& f, const ComplexMatrix& x,
                                        const ComplexMatrix& z, int m) {
  if (m < 0 || m > 12) throw Error("frechet_contour: order must be in [0,12]");
  const detail::Hypotheses h = detail::classify(f, x);
  detail::require_some_hypothesis(h, f);
  if (!h.upper && !h.strip) {
    DerivativeTensor r = frechet_contour(f, x.adjoint(), z.adjoint(), m);
    return {m, r.value.adjoint(), DerivEngine::Contour, r.est_error, r.hermitian};
  }
  const CMat zmat = z.mat();
  const detail::ContourEval ev = detail::contour_with_doubling(
      f, x, &zmat, m, detail::pick_case(h), kFrechetContourTol);
  CMat value = detail::factorial_d(m) * ev.value;
  const double herm_defect = (value - value.adjoint()).norm();
  const bool x_herm = (x.mat() - x.mat().adjoint()).norm() <= 1e-12 * (1.0 + x.fro());
  const bool z_herm = (zmat - zmat.adjoint()).norm() <= 1e-12 * (1.0 + zmat.norm());
  bool hermitian = false;
  if (x_herm && z_herm) {
    value = 0.5 * (value + value.adjoint());
    hermitian = true;
  }
  DerivativeTensor out{m, ComplexMatrix(value), DerivEngine::Contour,
                       detail::factorial_d(m) * ev.cauchy_diff + herm_defect, hermitian};
  return out;
}

inline DerivativeTensor frechet_contour(const FunctionSpec& f, const HermitianMatrix& a,
                                        const HermitianMatrix& b, int m) {
  return frechet_contour(f, a.as_complex(), b.as_complex(), m);
}

// ---------------------------------------------------------------------------
// Divided-difference (spectral) engine

namespace detail {

/// Confluent divided differences over the (ascending) eigenvalues of A,
/// memoized by the multiset of node indices. Nodes closer than
/// delta = 1e-7 (1 + ||A||) are treated as coincident and served from the
/// closed-form derivatives of f.
class DividedDifferenceTable {
 public:
  DividedDifferenceTable(const FunctionSpec& f, RVec nodes, double delta)
      : f_(f), nodes_(std::move(nodes)), delta_(delta) {}

  /// key: packed per-index multiplicities, 4 bits each (n <= 8, counts <= 13)
  double value(std::uint64_t key, const std::vector<int>& counts) {
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<double> xs;
    for (int i = 0; i < static_cast<int>(counts.size()); ++i)
      for (int c = 0; c < counts[i]; ++c) xs.push_back(nodes_(i));
    const double v = confluent(xs);
    cache_.emplace(key, v);
    return v;
  }

  bool used_clusters() const { return used_clusters_; }

 private:
  double confluent(const std::vector<double>& xs) {
    const int m = static_cast<int>(xs.size()) - 1;
    // table diag-by-diag: d[i] holds f[x_i, ..., x_{i+len}]
    std::vector<double> d(m + 1);
    for (int i = 0; i <= m; ++i) d[i] = f_.deriv(xs[i], 0);
    for (int len = 1; len <= m; ++len) {
      for (int i = 0; i + len <= m; ++i) {
        const double spread = xs[i + len] - xs[i];
        if (spread <= delta_) {
          used_clusters_ = true;
          double mid = 0.0;
          for (int j = i; j <= i + len; ++j) mid += xs[j];
          mid /= (len + 1);
          d[i] = f_.deriv(mid, len) / factorial_d(len);
        } else {
          d[i] = (d[i + 1] - d[i]) / spread;
        }
      }
    }
    return d[0];
  }

  const FunctionSpec& f_;
  RVec nodes_;
  double delta_;
  bool used_clusters_ = false;
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace detail

/// Workspace caching the eigendecomposition of A and the rotated direction,
/// so that several orders (Taylor sums) reuse one factorization.
class SpectralDerivatives {
 public:
  SpectralDerivatives(const FunctionSpec& f, const HermitianMatrix& a, const HermitianMatrix& b)
      : f_(f), n_(a.dim()) {
    if (n_ > 8) throw Error("divided_diff engine: n <= 8 (cost O(n^{m+1}))");
    const Spectrum sp = hermitian_eigen(a);
    lam_ = sp.real_values();
    u_ = sp.right_vectors;
    const Interval& dom = f.domain();
    for (int i = 0; i < n_; ++i)
      if (!dom.contains(lam_(i))) {
        std::ostringstream os;
        os << "divided_diff engine: eigenvalue " << fmt_double(lam_(i)) << " outside "
           << dom.print();
        throw DomainError(os.str());
      }
    bt_ = u_.adjoint() * b.mat() * u_;
    delta_ = 1e-7 * (1.0 + a.fro());
    table_ = std::make_unique<detail::DividedDifferenceTable>(f_, lam_, delta_);
  }

  DerivativeTensor order(int m) const {
    if (m < 0 || m > 8) throw Error("divided_diff engine: order must be in [0,8]");
    CMat out = CMat::Zero(n_, n_);
    std::vector<int> counts(n_, 0);
    std::uint64_t key = 0;
    const auto bump = [&](int i, int dir) {
      counts[i] += dir;
      key = dir > 0 ? key + (1ull << (4 * i)) : key - (1ull << (4 * i));
    };
    // enumerate paths i0 -> i1 -> ... -> im, product of Bt along edges
    std::function<void(int, int, int, Complex)> rec = [&](int i0, int depth, int last,
                                                          Complex prod) {
      if (depth == m + 1) {
        out(i0, last) += table_->value(key, counts) * prod;
        return;
      }
      for (int nxt = 0; nxt < n_; ++nxt) {
        const Complex step = prod * bt_(last, nxt);
        if (step == Complex(0.0, 0.0)) continue;
        bump(nxt, +1);
        rec(i0, depth + 1, nxt, step);
        bump(nxt, -1);
      }
    };
    for (int i0 = 0; i0 < n_; ++i0) {
      bump(i0, +1);
      rec(i0, 1, i0, Complex(1.0, 0.0));
      bump(i0, -1);
    }
    CMat value = detail::factorial_d(m) * (u_ * out * u_.adjoint());
    value = 0.5 * (value + value.adjoint());
    return {m, ComplexMatrix(value), DerivEngine::DividedDiff,
            1e-12 * (1.0 + value.norm()), true};
  }

 private:
  const FunctionSpec& f_;
  int n_;
  RVec lam_;
  CMat u_;
  CMat bt_;
  double delta_ = 0.0;
  std::unique_ptr<detail::DividedDifferenceTable> table_;
};

inline DerivativeTensor frechet_divided_diff(const FunctionSpec& f, const HermitianMatrix& a,
                                             const HermitianMatrix& b, int m) {
  if (!f.has_closed_derivs()) {
    // no closed-form derivatives at clustered nodes: contour is the fallback
    return frechet_contour(f, a, b, m);
  }
  return SpectralDerivatives(f, a, b).order(m);
}

// ---------------------------------------------------------------------------
// Finite-difference oracle

namespace detail {

inline const std::vector<std::pair<int, double>>& fd_stencil(int m) {
  static const std::vector<std::vector<std::pair<int, double>>> stencils = {
      {},                                                                    // m = 0 unused
      {{-1, -0.5}, {1, 0.5}},                                                // m = 1
      {{-1, 1.0}, {0, -2.0}, {1, 1.0}},                                      // m = 2
      {{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}},                          // m = 3
      {{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}},                // m = 4
      {{-3, -0.5}, {-2, 2.0}, {-1, -2.5}, {1, 2.5}, {2, -2.0}, {3, 0.5}},    // m = 5
      {{-3, 1.0}, {-2, -6.0}, {-1, 15.0}, {0, -20.0}, {1, 15.0}, {2, -6.0}, {3, 1.0}},  // m = 6
  };
  return stencils.at(m);
}

}  // namespace detail

/// Central finite differences of t -> f(A+tB) with Richardson extrapolation;
/// the step is chosen so the whole stencil stays inside the domain with 10%
/// of the boundary gap to spare.
inline DerivativeTensor frechet_fd_oracle(const FunctionSpec& f, const HermitianMatrix& a,
                                          const HermitianMatrix& b, int m) {
  if (m < 0 || m > 6) throw Error("frechet_fd_oracle: order must be in [0,6]");
  if (m == 0) {
    const HermitianMatrix v = calc_hermitian(f, a);
    return {0, v.as_complex(), DerivEngine::FiniteDiff, 1e-14 * (1.0 + v.fro()), true};
  }
  const Spectrum spa = hermitian_eigen(a);
  const RVec lam = spa.real_values();
  const Interval& dom = f.domain();
  double gap = std::numeric_limits<double>::infinity();
  if (std::isfinite(dom.a)) gap = std::min(gap, lam(0) - dom.a);
  if (std::isfinite(dom.b)) gap = std::min(gap, dom.b - lam(lam.size() - 1));
  if (!(gap > 0)) throw DomainError("frechet_fd_oracle: sigma(A) outside the domain");

  const Spectrum spb = hermitian_eigen(b);
  const double bnorm =
      std::max(std::abs(spb.real_values()(0)), std::abs(spb.real_values()(b.dim() - 1)));
  const double eps = std::numeric_limits<double>::epsilon();
  const auto& stencil = detail::fd_stencil(m);
  const int reach = std::abs(stencil.front().first);
  double h = std::pow(eps, 1.0 / (m + 2)) * (1.0 + a.fro()) / (1.0 + b.fro());
  if (std::isfinite(gap) && bnorm > 0) h = std::min(h, 0.9 * gap / (reach * bnorm));
  if (h < 1e2 * eps * (1.0 + a.fro()))
    throw DomainError("frechet_fd_oracle: domain too tight to place the stencil");

  const int n = a.dim();
  const auto diff_at = [&](double step) -> CMat {
    CMat acc = CMat::Zero(n, n);
    for (const auto& [j, c] : stencil) {
      const HermitianMatrix shifted =
          HermitianMatrix::project(a.mat() + (j * step) * b.mat());
      acc += c * calc_hermitian(f, shifted).mat();
    }
    return acc / std::pow(step, m);
  };

  // 3-level Richardson in h^2
  CMat t00 = diff_at(h), t10 = diff_at(h / 2), t20 = diff_at(h / 4);
  CMat t11 = (4.0 * t10 - t00) / 3.0;
  CMat t21 = (4.0 * t20 - t10) / 3.0;
  CMat t22 = (16.0 * t21 - t11) / 15.0;
  const double est = (t22 - t21).norm() + 1e-13 * (1.0 + t22.norm());
  const CMat value = 0.5 * (t22 + t22.adjoint());
  return {m, ComplexMatrix(value), DerivEngine::FiniteDiff, est, true};
}

// ---------------------------------------------------------------------------
// Taylor partial sums

/// even[j] = sum_{m=0..j} (-1)^m/(2m)!  D^{2m} f(A;B)
/// odd[j]  = sum_{m=1..j} (-1)^{m-1}/(2m-1)! D^{2m-1} f(A;B)
struct TaylorSums {
  std::vector<HermitianMatrix> even;
  std::vector<HermitianMatrix> odd;
};

/// All derivatives come from the single requested engine (no mixing).
inline TaylorSums taylor_sums(const FunctionSpec& f, const HermitianMatrix& a,
                              const HermitianMatrix& b, int kmax,
                              DerivEngine engine = DerivEngine::Auto) {
  if (kmax < 0) throw Error("taylor_sums: K must be >= 0");
  std::vector<CMat> deriv(2 * kmax + 1);
  const bool use_dd = engine == DerivEngine::Auto || engine == DerivEngine::DividedDiff;
  std::unique_ptr<SpectralDerivatives> ws;
  if (use_dd) ws = std::make_unique<SpectralDerivatives>(f, a, b);
  for (int m = 0; m <= 2 * kmax; ++m) {
    DerivativeTensor t = use_dd ? ws->order(m)
                         : engine == DerivEngine::Contour ? frechet_contour(f, a, b, m)
                                                          : frechet_fd_oracle(f, a, b, m);
    deriv[m] = t.value.mat();
  }
  TaylorSums out;
  const int n = a.dim();
  CMat even_acc = CMat::Zero(n, n), odd_acc = CMat::Zero(n, n);
  for (int j = 0; j <= kmax; ++j) {
    even_acc += ((j % 2) ? -1.0 : 1.0) / detail::factorial_d(2 * j) * deriv[2 * j];
    out.even.push_back(HermitianMatrix::project(even_acc));
    if (j >= 1) odd_acc += ((j % 2) ? 1.0 : -1.0) / detail::factorial_d(2 * j - 1) * deriv[2 * j - 1];
    out.odd.push_back(HermitianMatrix::project(odd_acc));
  }
  return out;
}

}  // namespace opertone

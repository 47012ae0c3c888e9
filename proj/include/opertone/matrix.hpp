#pragma once
// Dense complex matrix types, Hermitian/general eigendecomposition,
// PSD margins, and the Re/Im split used throughout the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opertone {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Error hierarchy. Every failure mode surfaces as one of these.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis (e.g. one of the two spectral localization cases)
/// does not hold for the given input.
class PrecondError : public Error {
 public:
  using Error::Error;
};

/// Requested accuracy could not be reached within the configured budget.
class AccuracyError : public Error {
 public:
  explicit AccuracyError(const std::string& msg, double last_diff = 0.0)
      : Error(msg), last_diff(last_diff) {}
  double last_diff;
};

/// Contour geometry cannot be placed with the required clearances.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

class CampaignError : public Error {
 public:
  using Error::Error;
};

class SpecParseError : public Error {
 public:
  SpecParseError(const std::string& msg, int line, int col)
      : Error(msg), line(line), col(col) {}
  int line;
  int col;
};

namespace detail {

inline bool all_finite(const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

inline double max_abs_entry(const CMat& m) {
  double mx = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      mx = std::max(mx, std::abs(m(i, j)));
  return mx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Value types

/// Square complex matrix with finite entries.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(CMat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw Error("ComplexMatrix: matrix must be square");
    if (m_.rows() < 1) throw Error("ComplexMatrix: dimension must be >= 1");
    if (!detail::all_finite(m_)) throw Error("ComplexMatrix: non-finite entry");
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double fro() const { return m_.norm(); }

  ComplexMatrix adjoint() const { return ComplexMatrix(CMat(m_.adjoint())); }

 private:
  CMat m_;
};

/// Hermitian matrix. Construction gates the Hermiticity defect at
/// 1e-12 * (1 + max|entry|) and then stores the symmetrized (M+M*)/2.
/// Internal computations that produce Hermitian results up to quadrature
/// error use project() instead, which symmetrizes without the gate.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const CMat& m) {
    check_shape(m);
    const double defect = detail::max_abs_entry(CMat(m - m.adjoint()));
    const double gate = 1e-12 * (1.0 + detail::max_abs_entry(m));
    if (defect > gate) {
      std::ostringstream os;
      os << "HermitianMatrix: Hermiticity defect " << defect << " exceeds gate " << gate;
      throw Error(os.str());
    }
    m_ = 0.5 * (m + m.adjoint());
  }

  static HermitianMatrix project(const CMat& m) {
    check_shape(m);
    return HermitianMatrix(CMat(0.5 * (m + m.adjoint())), private_tag{});
  }

  static HermitianMatrix zero(int n) { return project(CMat::Zero(n, n)); }
  static HermitianMatrix identity(int n) { return project(CMat::Identity(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double fro() const { return m_.norm(); }

  ComplexMatrix as_complex() const { return ComplexMatrix(m_); }

 private:
  struct private_tag {};
  HermitianMatrix(CMat m, private_tag) : m_(std::move(m)) {}

  static void check_shape(const CMat& m) {
    if (m.rows() != m.cols()) throw Error("HermitianMatrix: matrix must be square");
    if (m.rows() < 1) throw Error("HermitianMatrix: dimension must be >= 1");
    if (!detail::all_finite(m)) throw Error("HermitianMatrix: non-finite entry");
  }

  CMat m_;
};

/// Eigendecomposition result. For Hermitian inputs the values are real and
/// ascending and the vectors unitary; for general inputs vector_condition
/// estimates the conditioning of the eigenvector matrix.
struct Spectrum {
  CVec values;
  CMat right_vectors;
  double vector_condition = 1.0;
  bool ill_conditioned = false;

  RVec real_values() const { return values.real(); }
};

// ---------------------------------------------------------------------------
// Eigendecomposition

namespace detail {

/// Cyclic complex Jacobi diagonalization, used as the fallback when the
/// primary solver reports non-convergence. Returns ascending eigenvalues.
inline bool jacobi_hermitian(const CMat& h, RVec& evals, CMat& evecs, int max_sweeps = 64) {
  const int n = static_cast<int>(h.rows());
  CMat a = h;
  CMat v = CMat::Identity(n, n);
  const double scale = std::max(1.0, h.norm());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-15 * scale) {
      evals = a.diagonal().real();
      // sort ascending, permute vectors accordingly
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](int i, int j) { return evals(i) < evals(j); });
      RVec sorted(n);
      CMat vv(n, n);
      for (int i = 0; i < n; ++i) {
        sorted(i) = evals(idx[i]);
        vv.col(i) = v.col(idx[i]);
      }
      evals = sorted;
      evecs = vv;
      return true;
    }
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * scale) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        // unitary 2x2 rotation annihilating a(p,q)
        const double theta = (aqq - app) / (2.0 * std::abs(apq));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Complex phase = apq / std::abs(apq);
        const Complex s = t * c * phase;
        for (int k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - std::conj(s) * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = std::conj(s) * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - std::conj(s) * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  return false;
}

}  // namespace detail

/// H = U diag(lambda) U*, eigenvalues ascending. Falls back to a Jacobi
/// sweep with a higher iteration budget if the QR iteration does not
/// converge; reports the residual if both fail.
inline Spectrum hermitian_eigen(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h.mat());
  Spectrum sp;
  if (es.info() == Eigen::Success) {
    sp.values = es.eigenvalues().cast<Complex>();
    sp.right_vectors = es.eigenvectors();
    sp.vector_condition = 1.0;
    return sp;
  }
  RVec evals;
  CMat evecs;
  if (detail::jacobi_hermitian(h.mat(), evals, evecs, 256)) {
    sp.values = evals.cast<Complex>();
    sp.right_vectors = evecs;
    sp.vector_condition = 1.0;
    return sp;
  }
  std::ostringstream os;
  os << "hermitian_eigen: no convergence; off-diagonal residual approx "
     << h.mat().norm();
  throw Error(os.str());
}

/// General (possibly non-normal) eigendecomposition with eigenvalues sorted
/// by (Re, Im). vector_condition is the 2-norm condition number of the
/// eigenvector matrix; > 1e6 flags the result ill-conditioned.
inline Spectrum general_eigen(const ComplexMatrix& x) {
  Eigen::ComplexEigenSolver<CMat> es(x.mat());
  if (es.info() != Eigen::Success)
    throw Error("general_eigen: QR iteration failed to converge");
  const int n = x.dim();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const CVec& raw = es.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (raw(i).real() != raw(j).real()) return raw(i).real() < raw(j).real();
    return raw(i).imag() < raw(j).imag();
  });
  Spectrum sp;
  sp.values.resize(n);
  sp.right_vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    sp.values(i) = raw(idx[i]);
    sp.right_vectors.col(i) = es.eigenvectors().col(idx[i]);
  }
  Eigen::JacobiSVD<CMat> svd(sp.right_vectors);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  sp.vector_condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  sp.ill_conditioned = !(sp.vector_condition <= 1e6);
  return sp;
}

/// Minimum eigenvalue. The executable meaning of ">= 0": the caller treats
/// margin >= -tau as PSD at tolerance tau.
inline double psd_margin(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    RVec evals;
    CMat evecs;
    if (!detail::jacobi_hermitian(h.mat(), evals, evecs, 256))
      throw Error("psd_margin: eigenvalue computation failed");
    return evals(0);
  }
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("max_eigenvalue: eigensolver failed");
  return es.eigenvalues()(h.dim() - 1);
}

/// M = Re + i Im with both parts Hermitian; exact up to roundoff.
inline std::pair<HermitianMatrix, HermitianMatrix> re_im_parts(const ComplexMatrix& m) {
  const CMat re = 0.5 * (m.mat() + m.mat().adjoint());
  const CMat im = (m.mat() - m.mat().adjoint()) / Complex(0.0, 2.0);
  return {HermitianMatrix::project(re), HermitianMatrix::project(im)};
}

/// H^s through the spectral decomposition. Fractional or negative s
/// requires H > 0.
inline HermitianMatrix hermitian_power(const HermitianMatrix& h, double s) {
  const bool natural = s >= 0.0 && s == std::floor(s);
  const Spectrum sp = hermitian_eigen(h);
  const RVec lam = sp.real_values();
  if (!natural && lam(0) <= 0.0) {
    std::ostringstream os;
    os << "hermitian_power: exponent " << s << " requires H > 0 but min eigenvalue is " << lam(0);
    throw DomainError(os.str());
  }
  RVec powered(h.dim());
  for (int i = 0; i < h.dim(); ++i) powered(i) = std::pow(lam(i), s);
  const CMat r = sp.right_vectors * powered.asDiagonal() * sp.right_vectors.adjoint();
  return HermitianMatrix::project(r);
}

// Small conveniences used across the library.

inline ComplexMatrix assemble(const HermitianMatrix& re, const HermitianMatrix& im) {
  return ComplexMatrix(CMat(re.mat() + Complex(0, 1) * im.mat()));
}

inline double rel_fro_diff(const CMat& a, const CMat& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

}  // namespace opertone

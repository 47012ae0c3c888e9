#pragma once
// Deterministic generation of random matrix instances in the hypothesis
// classes the theorems quantify over. Every sampler re-checks its own
// postcondition before returning, so a returned instance is always a valid
// theorem input.

#include <sstream>

#include "opertone/function_spec.hpp"
#include "opertone/matrix.hpp"
#include "opertone/rng.hpp"

namespace opertone {

struct SampleConfig {
  int n = 2;
  std::uint64_t seed = 1;
  double margin = 1e-2;  // gap kept from interval endpoints
  double scale = 1.0;    // spectral-norm scale for directions

  void validate() const {
    if (n < 1) throw SamplerError("SampleConfig: n must be >= 1");
    if (!(margin > 0)) throw SamplerError("SampleConfig: margin must be > 0");
    if (!(scale > 0)) throw SamplerError("SampleConfig: scale must be > 0");
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"n\":" << n << ",\"seed\":" << fmt_u64(seed) << ",\"margin\":" << fmt_double(margin)
       << ",\"scale\":" << fmt_double(scale) << "}";
    return os.str();
  }
};

namespace detail {

inline CMat gaussian_matrix(Rng& rng, int n) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cgauss();
  return g;
}

/// QR of a complex Gaussian with the R-diagonal phase fix.
inline CMat haar_unitary(Rng& rng, int n) {
  const CMat g = gaussian_matrix(rng, n);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0));
  }
  return q;
}

inline double op_norm(const HermitianMatrix& h) {
  return std::max(std::abs(psd_margin(h)), std::abs(max_eigenvalue(h)));
}

}  // namespace detail

/// A = U diag(lambda) U* with U Haar and eigenvalues uniform in
/// [a+margin, b-margin] (finite case) or log-uniform in [margin, 1/margin]
/// on (0,inf).
inline HermitianMatrix rand_hermitian_in(const SampleConfig& cfg, const Interval& itv) {
  cfg.validate();
  Rng rng(cfg.seed);
  RVec lam(cfg.n);
  if (itv.finite()) {
    if (!(cfg.margin < 0.5 * (itv.b - itv.a)))
      throw SamplerError("rand_hermitian_in: margin too large for the interval");
    for (int i = 0; i < cfg.n; ++i) lam(i) = rng.uniform(itv.a + cfg.margin, itv.b - cfg.margin);
  } else if (itv.a == 0.0 && std::isinf(itv.b)) {
    for (int i = 0; i < cfg.n; ++i) lam(i) = rng.log_uniform(cfg.margin, 1.0 / cfg.margin);
  } else {
    throw SamplerError("rand_hermitian_in: unsupported interval " + itv.print());
  }
  const CMat u = detail::haar_unitary(rng, cfg.n);
  HermitianMatrix a = HermitianMatrix::project(u * lam.asDiagonal() * u.adjoint());
  const RVec check = hermitian_eigen(a).real_values();
  for (int i = 0; i < cfg.n; ++i)
    if (!itv.contains(check(i), 0.5 * cfg.margin))
      throw SamplerError("rand_hermitian_in: postcondition violated");
  return a;
}

/// G* G scaled to operator norm = scale.
inline HermitianMatrix rand_psd(const SampleConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const CMat g = detail::gaussian_matrix(rng, cfg.n);
  HermitianMatrix s = HermitianMatrix::project(g.adjoint() * g);
  const double nrm = max_eigenvalue(s);
  s = HermitianMatrix::project(s.mat() * (cfg.scale / nrm));
  if (psd_margin(s) < -1e-14 * cfg.scale) throw SamplerError("rand_psd: postcondition violated");
  return s;
}

/// rand_psd + margin * I.
inline HermitianMatrix rand_pd(const SampleConfig& cfg) {
  const HermitianMatrix s = rand_psd(cfg);
  HermitianMatrix p =
      HermitianMatrix::project(s.mat() + cfg.margin * CMat::Identity(cfg.n, cfg.n));
  if (psd_margin(p) < cfg.margin * (1.0 - 1e-12))
    throw SamplerError("rand_pd: postcondition violated");
  return p;
}

/// (G + G*)/2 scaled to operator norm = scale.
inline HermitianMatrix rand_hermitian(const SampleConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const CMat g = detail::gaussian_matrix(rng, cfg.n);
  HermitianMatrix h = HermitianMatrix::project(0.5 * (g + g.adjoint()));
  const double nrm = detail::op_norm(h);
  if (nrm == 0) throw SamplerError("rand_hermitian: degenerate draw");
  return HermitianMatrix::project(h.mat() * (cfg.scale / nrm));
}

/// Member of the sector cone V_{p pi}: Im X > 0 and Im(e^{-i p pi} X) < 0.
/// Construction: positive combination of a Haar frame with phases inside
/// (0.05 p pi, 0.95 p pi), then a small non-normal perturbation with
/// rejection until both membership margins are strictly positive.
inline ComplexMatrix rand_sector(const SampleConfig& cfg, double p) {
  cfg.validate();
  if (!(p > 0.0 && p <= 1.0)) throw SamplerError("rand_sector: p must be in (0,1]");
  Rng rng(cfg.seed);
  const int n = cfg.n;
  const CMat u = detail::haar_unitary(rng, n);
  CVec d(n);
  double min_sin = 1.0;
  for (int i = 0; i < n; ++i) {
    const double theta = rng.uniform(0.05 * p * M_PI, 0.95 * p * M_PI);
    const double w = cfg.scale * rng.log_uniform(0.5, 2.0);
    d(i) = w * Complex(std::cos(theta), std::sin(theta));
    min_sin = std::min(min_sin, std::min(std::sin(theta), std::sin(p * M_PI - theta)));
  }
  const CMat x0 = u * d.asDiagonal() * u.adjoint();
  const CMat g = detail::gaussian_matrix(rng, n);
  const CMat pert = g / std::max(g.norm(), 1e-300);
  const Complex rot = std::polar(1.0, -p * M_PI);

  double eps = 0.02 * cfg.scale * min_sin;
  for (int attempt = 0; attempt < 100; ++attempt, eps *= 0.5) {
    const ComplexMatrix x{CMat(x0 + eps * pert)};
    const auto parts = re_im_parts(x);
    const double m1 = psd_margin(parts.second);
    const auto rot_parts = re_im_parts(ComplexMatrix(CMat(rot * x.mat())));
    const double m2 = -max_eigenvalue(rot_parts.second);
    if (m1 > 1e-9 * (1.0 + cfg.scale) && m2 > 1e-9 * (1.0 + cfg.scale)) return x;
  }
  throw SamplerError("rand_sector: rejection cap exceeded");
}

}  // namespace opertone

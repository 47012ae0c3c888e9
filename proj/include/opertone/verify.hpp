#pragma once
// The theorem statements as falsifiable checks: k-tone derivative positivity,
// the four branch inequalities between Re/Im f(A+iB) and even/odd Taylor
// sums, the operator Loewner/Pick and monotone-decreasing characterizations,
// sector-cone preservation, small-epsilon expansion-order probes, scalar
// counterexample searches, and the seeded campaign runner that aggregates
// margins into pass/refuted/inconclusive reports.

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>

#include "opertone/repfun.hpp"
#include "opertone/sampler.hpp"
#include "opertone/spec_parser.hpp"

namespace opertone {

// ---------------------------------------------------------------------------
// PSD margins with the relative-tolerance convention: a matrix counts PSD at
// scale s when min-eig >= -tau_rel * (1 + s), s the Frobenius norm of the
// tested matrix. normalized() folds the scale away so campaigns compare a
// dimensionless number against tau_rel directly.

struct MarginValue {
  double margin = 0.0;
  double scale = 0.0;
  double normalized() const { return margin / (1.0 + scale); }
};

inline MarginValue margin_of(const HermitianMatrix& h) { return {psd_margin(h), h.fro()}; }

inline double default_tau_rel() {
  if (const char* env = std::getenv("OPERTONE_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return 1e-8;
}

// ---------------------------------------------------------------------------
// Branch bookkeeping for the four k mod 4 cases.

struct ToneBranch {
  int k = 1;
  enum Kind { B1, B2, B3, B4 } kind = B3;
  int kp = 1;          // the paper's index: k = 4kp-2, 4kp, 4kp-3, 4kp-1
  bool real_part = true;
  bool lhs_le_rhs = true;  // orientation of LHS vs the truncated sum
  bool even_sum = true;
  int sum_index = 0;       // upper summation index m
  int max_order = 0;       // largest derivative order used (k-2 for k>=2)

  static ToneBranch from_k(int k) {
    if (k < 1 || k > kMaxTone) throw Error("ToneBranch: k must be in [1,12]");
    ToneBranch t;
    t.k = k;
    switch (k % 4) {
      case 2:  // (4kp-2)-tone: Re f(A+iB) <= even sum to 2kp-2
        t.kind = B1; t.kp = (k + 2) / 4; t.real_part = true; t.lhs_le_rhs = true;
        t.even_sum = true; t.sum_index = 2 * t.kp - 2;
        break;
      case 0:  // 4kp-tone: Re f(A+iB) >= even sum to 2kp-1
        t.kind = B2; t.kp = k / 4; t.real_part = true; t.lhs_le_rhs = false;
        t.even_sum = true; t.sum_index = 2 * t.kp - 1;
        break;
      case 1:  // (4kp-3)-tone: Im f(A+iB) >= odd sum to 2kp-2
        t.kind = B3; t.kp = (k + 3) / 4; t.real_part = false; t.lhs_le_rhs = false;
        t.even_sum = false; t.sum_index = 2 * t.kp - 2;
        break;
      default:  // (4kp-1)-tone: Im f(A+iB) <= odd sum to 2kp-1
        t.kind = B4; t.kp = (k + 1) / 4; t.real_part = false; t.lhs_le_rhs = true;
        t.even_sum = false; t.sum_index = 2 * t.kp - 1;
        break;
    }
    t.max_order = std::max(0, k - 2);
    return t;
  }

  const char* name() const {
    switch (kind) {
      case B1: return "B1";
      case B2: return "B2";
      case B3: return "B3";
      case B4: return "B4";
    }
    return "?";
  }
};

// ---------------------------------------------------------------------------
// Individual checks

/// Condition (a): margin of D^k f(A;B) for B >= 0.
inline MarginValue check_derivative_sign(const FunctionSpec& f, int k, const HermitianMatrix& a,
                                         const HermitianMatrix& b,
                                         DerivEngine engine = DerivEngine::Auto) {
  const DerivativeTensor d = compute_derivative(f, a, b, k, engine);
  return margin_of(d.hermitian_value());
}

/// Condition (c): margin of f(A+B) - sum_{m<k} D^m f(A;B)/m!.
inline MarginValue check_taylor_remainder(const FunctionSpec& f, int k, const HermitianMatrix& a,
                                          const HermitianMatrix& b,
                                          DerivEngine engine = DerivEngine::Auto) {
  const HermitianMatrix apb = HermitianMatrix::project(a.mat() + b.mat());
  const HermitianMatrix fab = calc_hermitian(f, apb);
  CMat acc = CMat::Zero(a.dim(), a.dim());
  const bool dd = engine == DerivEngine::Auto || engine == DerivEngine::DividedDiff;
  std::unique_ptr<SpectralDerivatives> ws;
  if (dd) ws = std::make_unique<SpectralDerivatives>(f, a, b);
  for (int m = 0; m < k; ++m) {
    const DerivativeTensor t = dd ? ws->order(m) : compute_derivative(f, a, b, m, engine);
    acc += t.value.mat() / detail::factorial_d(m);
  }
  return margin_of(HermitianMatrix::project(fab.mat() - acc));
}

struct BranchOutcome {
  MarginValue margin;
  HermitianMatrix oriented;  // the tested RHS-LHS (or LHS-RHS) matrix
};

/// One Theorem-3.1 branch: compute f(A+iB), split off the relevant part,
/// build the branch's truncated Taylor sum from a single engine, and return
/// the sign-adjusted PSD margin (pass means >= -tau).
inline BranchOutcome check_branch(const FunctionSpec& f, const ToneBranch& tone,
                                  const HermitianMatrix& a, const HermitianMatrix& b,
                                  DerivEngine engine = DerivEngine::Auto,
                                  CalcPath path = CalcPath::Auto) {
  const ComplexMatrix x = assemble(a, b);
  const CalcResult calc = analytic_calc(f, x, path);
  const auto parts = re_im_parts(calc.value);
  const HermitianMatrix& side = tone.real_part ? parts.first : parts.second;
  const TaylorSums sums = taylor_sums(f, a, b, tone.sum_index, engine);
  const HermitianMatrix& s = tone.even_sum ? sums.even[tone.sum_index] : sums.odd[tone.sum_index];
  const CMat diff = tone.lhs_le_rhs ? CMat(s.mat() - side.mat()) : CMat(side.mat() - s.mat());
  HermitianMatrix oriented = HermitianMatrix::project(diff);
  return {margin_of(oriented), oriented};
}

/// Theorem 4.2 (ii): margin of Im f(X) for Im X > 0.
inline MarginValue check_pick(const FunctionSpec& f, const ComplexMatrix& x,
                              CalcPath path = CalcPath::Auto) {
  const auto parts = re_im_parts(x);
  if (!(psd_margin(parts.second) > 0))
    throw PrecondError("check_pick: requires Im X > 0");
  const CalcResult calc = analytic_calc(f, x, path);
  return margin_of(re_im_parts(calc.value).second);
}

struct Thm43Outcome {
  std::vector<MarginValue> margins;
  bool log_skipped = false;
};

/// Theorem 4.3 ordered-pair margins.
///   part 1 (f nonneg monotone, Re X > 0):   0 <= f(Re X) <= Re f(X)
///   part 2 (f = beta x + decreasing, Re X > 0): 0 <= Re f(X) <= f(Re X)
///   part 3 (f decreasing): Im f(X) >= 0 for Im X < 0, and for Re X > 0
///           0 < Re f(X) <= f(Re X) with Re(log f(X)) <= log f(Re X).
inline Thm43Outcome check_thm43(const FunctionSpec& f, const ComplexMatrix& x, int part,
                                double tau_rel = 1e-8, CalcPath path = CalcPath::Auto) {
  Thm43Outcome out;
  const auto xparts = re_im_parts(x);
  const double re_margin = psd_margin(xparts.first);
  const double im_neg_margin = -max_eigenvalue(xparts.second);

  if (part == 3 && im_neg_margin > 0) {
    const CalcResult calc = analytic_calc(f, x, path);
    out.margins.push_back(margin_of(re_im_parts(calc.value).second));  // (iii)
    return out;
  }
  if (!(re_margin > 0)) throw PrecondError("check_thm43: requires Re X > 0 (or Im X < 0 for part 3)");

  const CalcResult calc = analytic_calc(f, x, path);
  const auto yparts = re_im_parts(calc.value);
  const HermitianMatrix fre = calc_hermitian(f, xparts.first);

  if (part == 1) {
    out.margins.push_back(margin_of(fre));
    out.margins.push_back(margin_of(HermitianMatrix::project(yparts.first.mat() - fre.mat())));
    return out;
  }
  if (part == 2) {
    out.margins.push_back(margin_of(yparts.first));
    out.margins.push_back(margin_of(HermitianMatrix::project(fre.mat() - yparts.first.mat())));
    return out;
  }
  if (part != 3) throw Error("check_thm43: part must be 1, 2, or 3");

  // part 3 (iv)
  const MarginValue m0 = margin_of(yparts.first);
  out.margins.push_back(m0);
  out.margins.push_back(margin_of(HermitianMatrix::project(fre.mat() - yparts.first.mat())));
  if (m0.normalized() < tau_rel) {
    out.log_skipped = true;  // Re f(X) margin below tau: skip the log leg
    return out;
  }
  const FunctionSpec logf = FunctionSpec::log();
  try {
    const CalcResult logy = analytic_calc(logf, calc.value, path);
    const HermitianMatrix log_fre = calc_hermitian(logf, fre);
    out.margins.push_back(margin_of(
        HermitianMatrix::project(log_fre.mat() - re_im_parts(logy.value).first.mat())));
  } catch (const PrecondError&) {
    // sigma(f(X)) touching (-inf,0]: refutation evidence
    out.margins.push_back({-1.0, 0.0});
  } catch (const DomainError&) {
    out.margins.push_back({-1.0, 0.0});
  }
  return out;
}

/// V_{p pi} membership margins: (psd_margin(Im X), psd_margin(-Im(e^{-i p pi} X))).
/// The dual cone V_{-p pi} is tested through the adjoint.
inline std::pair<MarginValue, MarginValue> sector_membership(const ComplexMatrix& x, double p) {
  const auto parts = re_im_parts(x);
  const Complex rot = std::polar(1.0, -p * M_PI);
  const auto rot_parts = re_im_parts(ComplexMatrix(CMat(rot * x.mat())));
  const HermitianMatrix neg_im = HermitianMatrix::project(-rot_parts.second.mat());
  return {margin_of(parts.second), margin_of(neg_im)};
}

inline bool sector_member(const ComplexMatrix& x, double p) {
  const auto m = sector_membership(x, p);
  return m.first.margin > 0 && m.second.margin > 0;
}

struct SectorOutcome {
  bool pass = false;
  bool member = false;
  bool constant_escape = false;
  double alpha = 0.0;       // escape scalar
  MarginValue m1, m2;       // membership margins of f(X) in the target cone
};

/// Theorem 4.6: f maps V_{p pi} into V_{p pi} (monotone direction) or into
/// V_{-p pi} (decreasing direction), with the constant escape f(X) = alpha I.
inline SectorOutcome check_sector_map(const FunctionSpec& f, const ComplexMatrix& x, double p,
                                      bool monotone_direction, double tau_rel = 1e-8,
                                      CalcPath path = CalcPath::Auto) {
  const bool in_pos = sector_member(x, p);
  const bool in_neg = sector_member(x.adjoint(), p);
  if (!in_pos && !in_neg)
    throw PrecondError("check_sector_map: X is not a member of V_{p pi} or V_{-p pi}");
  const CalcResult calc = analytic_calc(f, x, path);
  const CMat& y = calc.value.mat();

  SectorOutcome out;
  const int n = x.dim();
  out.alpha = (y.trace() / static_cast<double>(n)).real();
  const double esc = (y - out.alpha * CMat::Identity(n, n)).norm();
  if (esc <= tau_rel * (1.0 + std::abs(out.alpha)) && out.alpha >= -tau_rel) {
    out.constant_escape = true;
    out.pass = true;
    return out;
  }
  // target cone: same as the source for monotone, mirrored for decreasing
  const bool target_pos = monotone_direction ? in_pos : !in_pos;
  const ComplexMatrix ytest = target_pos ? calc.value : calc.value.adjoint();
  const auto mm = sector_membership(ytest, p);
  out.m1 = mm.first;
  out.m2 = mm.second;
  out.member = mm.first.margin > 0 && mm.second.margin > 0;
  out.pass = out.member;
  return out;
}

// ---------------------------------------------------------------------------
// Expansion-order probe (Eq. 3.1/3.2 scaling)

struct ProbeReport {
  double slope_re = 0.0, slope_im = 0.0;
  bool re_skipped = false, im_skipped = false;
  int re_points = 0, im_points = 0;

  /// Pass margin in the campaign convention: min over channels of
  /// 0.3 - |slope - target| (skipped channels contribute +0.3).
  double pass_margin(int l) const {
    double m = 0.3;
    if (!re_skipped) m = std::min(m, 0.3 - std::abs(slope_re - (2.0 * l + 2.0)));
    if (!im_skipped) m = std::min(m, 0.3 - std::abs(slope_im - (2.0 * l + 1.0)));
    return m;
  }
};

/// Verifies || Re f(A + i eps B) - even sum to l || ~ eps^{2l+2} and the odd
/// analogue ~ eps^{2l+1} by a log-log slope fit over eps = 2^{-3..-10};
/// points at the roundoff floor are dropped, and a channel with fewer than
/// four usable points is reported skipped (exact truncation).
inline ProbeReport expansion_order_probe(const FunctionSpec& f, const HermitianMatrix& a,
                                         const HermitianMatrix& b, int l,
                                         DerivEngine engine = DerivEngine::Auto) {
  SpectralDerivatives ws(f, a, b);
  std::vector<CMat> deriv(2 * l + 1);
  for (int m = 0; m <= 2 * l; ++m)
    deriv[m] = (engine == DerivEngine::Contour ? frechet_contour(f, a, b, m) : ws.order(m))
                   .value.mat();

  std::vector<double> eps_used_re, res_re, eps_used_im, res_im;
  for (int e = 3; e <= 10; ++e) {
    const double eps = std::pow(2.0, -e);
    const HermitianMatrix beps = HermitianMatrix::project(eps * b.mat());
    const CalcResult calc = analytic_calc(f, assemble(a, beps));
    const auto parts = re_im_parts(calc.value);
    const int n = a.dim();
    CMat even = CMat::Zero(n, n), odd = CMat::Zero(n, n);
    for (int m = 0; m <= l; ++m) {
      even += ((m % 2) ? -1.0 : 1.0) * std::pow(eps, 2 * m) / detail::factorial_d(2 * m) *
              deriv[2 * m];
      if (m >= 1)
        odd += ((m % 2) ? 1.0 : -1.0) * std::pow(eps, 2 * m - 1) /
               detail::factorial_d(2 * m - 1) * deriv[2 * m - 1];
    }
    const double floor = 1e-12 * (1.0 + calc.value.fro());
    const double r_re = (parts.first.mat() - even).norm();
    const double r_im = (parts.second.mat() - odd).norm();
    if (r_re > floor) {
      eps_used_re.push_back(std::log(eps));
      res_re.push_back(std::log(r_re));
    }
    if (r_im > floor) {
      eps_used_im.push_back(std::log(eps));
      res_im.push_back(std::log(r_im));
    }
  }

  const auto fit = [](const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };

  ProbeReport out;
  out.re_points = static_cast<int>(eps_used_re.size());
  out.im_points = static_cast<int>(eps_used_im.size());
  if (out.re_points < 4)
    out.re_skipped = true;
  else
    out.slope_re = fit(eps_used_re, res_re);
  if (out.im_points < 4)
    out.im_skipped = true;
  else
    out.slope_im = fit(eps_used_im, res_im);
  return out;
}

// ---------------------------------------------------------------------------
// Sandwich chains (Corollaries 4.4 / 4.5)

enum class SandwichFlavor { Monotone, Convex };

/// Two-sided Re and Im chains. Im margins are produced only when B >= 0
/// (their quantifier); with general Hermitian B only the Re chain applies.
inline std::vector<MarginValue> check_sandwich(const FunctionSpec& f, int k,
                                               const HermitianMatrix& a, const HermitianMatrix& b,
                                               SandwichFlavor flavor,
                                               DerivEngine engine = DerivEngine::Auto,
                                               CalcPath path = CalcPath::Auto) {
  if (k < 1) throw Error("check_sandwich: k must be >= 1");
  const bool b_psd = psd_margin(b) >= -1e-12 * (1.0 + b.fro());
  const int kmax = flavor == SandwichFlavor::Convex ? 2 * k : 2 * k - 1;
  const TaylorSums sums = taylor_sums(f, a, b, kmax, engine);
  const CalcResult calc = analytic_calc(f, assemble(a, b), path);
  const auto parts = re_im_parts(calc.value);
  const CMat& re = parts.first.mat();
  const CMat& im = parts.second.mat();

  std::vector<MarginValue> out;
  const auto push = [&](const CMat& diff) {
    out.push_back(margin_of(HermitianMatrix::project(diff)));
  };
  if (flavor == SandwichFlavor::Monotone) {
    push(re - sums.even[2 * k - 2].mat());
    push(sums.even[2 * k - 1].mat() - re);
    if (b_psd) {
      push(im - sums.odd[2 * k - 2].mat());
      push(sums.odd[2 * k - 1].mat() - im);
    }
  } else {
    push(re - sums.even[2 * k - 1].mat());
    push(sums.even[2 * k - 2].mat() - re);
    if (b_psd) {
      push(im - sums.odd[2 * k - 1].mat());
      push(sums.odd[2 * k].mat() - im);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Counterexample searches (Remark 3.5 / Remark 4.8)

struct Counterexample {
  bool found = false;
  bool verified = false;
  std::string kind;
  double p = 0.0;
  double a = 0.0, b = 0.0;  // scalar witness z = a + i b
  double value = 0.0;       // the violating quantity
  CMat amat, bmat;          // remark48 witness pair
  double min_eig = 0.0;
  double det = 0.0;

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"kind\":" << json_quote(kind) << ",\"found\":" << (found ? "true" : "false");
    if (found) {
      os << ",\"verified\":" << (verified ? "true" : "false");
      if (kind == "remark48") {
        os << ",\"A\":" << matrix_to_json(amat) << ",\"B\":" << matrix_to_json(bmat)
           << ",\"min_eig\":" << fmt_double(min_eig) << ",\"det\":" << fmt_double(det);
      } else {
        os << ",\"p\":" << fmt_double(p) << ",\"a\":" << fmt_double(a)
           << ",\"b\":" << fmt_double(b) << ",\"value\":" << fmt_double(value);
      }
    }
    os << "}";
    return os.str();
  }
};

enum class CounterKind { Remark35Im, Remark35Re, Remark48 };

inline bool counterexample_expected(CounterKind kind, double p) {
  switch (kind) {
    case CounterKind::Remark35Im: return p > 2.0;
    case CounterKind::Remark35Re: return p < 1.0 || p > 3.0;
    case CounterKind::Remark48: return true;
  }
  return false;
}

/// remark35_im: a,b > 0 with Im (a+ib)^p < 0 (exists iff p > 2).
/// remark35_re: a,b > 0 with Re (a+ib)^p > a^p (exists iff p < 1 or p > 3).
/// remark48:    A,B > 0 (2x2) with AB + BA not PSD (always exists).
/// Witnesses are re-verified through an independent route before return.
inline Counterexample counterexample_search(CounterKind kind, double p, int budget,
                                            std::uint64_t seed = 42) {
  if (budget < 1) throw Error("counterexample_search: budget must be >= 1");
  Counterexample out;
  out.p = p;
  if (kind == CounterKind::Remark35Im || kind == CounterKind::Remark35Re) {
    out.kind = kind == CounterKind::Remark35Im ? "remark35_im" : "remark35_re";
    const int grid = std::min(budget, 1 << 20);
    for (int j = 0; j < grid; ++j) {
      const double theta = (j + 0.5) / grid * 0.5 * M_PI;  // arg z in (0, pi/2)
      const double ca = std::cos(theta), sb = std::sin(theta);
      bool hit = false;
      double value = 0.0;
      if (kind == CounterKind::Remark35Im) {
        value = std::sin(p * theta);  // Im z^p on |z| = 1
        hit = value < -1e-12;
      } else {
        value = std::cos(p * theta) - std::pow(ca, p);  // Re z^p - a^p on |z| = 1
        hit = value > 1e-12;
      }
      if (!hit) continue;
      // independent re-verification through complex arithmetic
      const Complex zp = std::pow(Complex(ca, sb), p);
      const bool ok = kind == CounterKind::Remark35Im ? zp.imag() < 0
                                                      : zp.real() > std::pow(ca, p);
      if (!ok) continue;
      out.found = true;
      out.verified = true;
      out.a = ca;
      out.b = sb;
      out.value = kind == CounterKind::Remark35Im ? zp.imag() : zp.real() - std::pow(ca, p);
      return out;
    }
    return out;
  }

  out.kind = "remark48";
  Rng rng(seed);
  for (int t = 0; t < budget; ++t) {
    CMat a(2, 2), b(2, 2);
    if (t == 0) {
      // the canonical family: A = diag(1, eps), B near all-ones
      const double eps = 0.05;
      a << 1, 0, 0, eps;
      b << 1, 0.999, 0.999, 1;
    } else {
      const double eps = rng.log_uniform(1e-3, 1.0);
      const double c = rng.uniform(0.5, 0.999);
      const double s = rng.log_uniform(0.2, 5.0);
      a << 1, 0, 0, eps;
      b << s, s * c, s * c, s;
    }
    const HermitianMatrix ah(a), bh(b);
    if (!(psd_margin(ah) > 0) || !(psd_margin(bh) > 0)) continue;
    const HermitianMatrix m = HermitianMatrix::project(a * b + b * a);
    const double mineig = psd_margin(m);
    if (mineig >= -1e-12) continue;
    // re-verify: for PD A,B the trace of AB+BA is positive, so a negative
    // eigenvalue is equivalent to det < 0 (2x2)
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (!(det.real() < 0)) continue;
    out.found = true;
    out.verified = true;
    out.amat = a;
    out.bmat = b;
    out.min_eig = mineig;
    out.det = det.real();
    return out;
  }
  return out;
}

}  // namespace opertone

#pragma once
// Closed quadrature contours around sigma(X) inside the analyticity region
// (C \ R) u (a,b). Two shapes, both with analytic parametrizations so the
// trapezoid rule converges geometrically under node doubling:
//   circle  - spectrum strictly in the upper half-plane (Im X > 0)
//   ellipse - axis-aligned, crossing R only inside (a,b); used for the
//             strip case and as a fallback for flat upper-half spectra

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "opertone/function_spec.hpp"
#include "opertone/json_io.hpp"
#include "opertone/matrix.hpp"

namespace opertone {

enum class ContourKind { Circle, Ellipse };
enum class ContourCase { UpperHalf, Strip };

struct Contour {
  ContourKind kind = ContourKind::Circle;
  Complex center{0.0, 0.0};
  double radius = 1.0;       // circle radius; ellipse semi-axis along Im
  double half_length = 0.0;  // ellipse semi-axis along Re; 0 for a circle
  std::vector<Complex> nodes;
  std::vector<Complex> weights;  // include dzeta: sum w_j g(zeta_j) ~ closed integral of g
  int node_count = 0;
  double spectrum_clearance = 0.0;  // min distance of the path to sigma(X)
  double real_clearance = 0.0;      // min distance of the path to R \ (a,b)

  Complex point(double theta) const {
    if (kind == ContourKind::Circle) return center + radius * Complex(std::cos(theta), std::sin(theta));
    return center + Complex(half_length * std::cos(theta), radius * std::sin(theta));
  }

  Complex tangent(double theta) const {
    if (kind == ContourKind::Circle)
      return radius * Complex(-std::sin(theta), std::cos(theta));
    return Complex(-half_length * std::sin(theta), radius * std::cos(theta));
  }

  void fill_nodes(int n) {
    if (n < 2 || (n & (n - 1)) != 0) throw Error("Contour: node count must be a power of two");
    node_count = n;
    nodes.resize(n);
    weights.resize(n);
    const double step = 2.0 * M_PI / n;
    for (int j = 0; j < n; ++j) {
      const double theta = step * j;
      nodes[j] = point(theta);
      weights[j] = step * tangent(theta);
    }
  }

  std::string to_json() const {
    std::ostringstream os;
    os << "{\"kind\":\"" << (kind == ContourKind::Circle ? "circle" : "ellipse")
       << "\",\"center\":[" << fmt_double(center.real()) << "," << fmt_double(center.imag())
       << "],\"radius\":" << fmt_double(radius) << ",\"half_length\":" << fmt_double(half_length)
       << ",\"nodes\":" << node_count << ",\"spectrum_clearance\":" << fmt_double(spectrum_clearance)
       << ",\"real_clearance\":" << fmt_double(real_clearance) << "}";
    return os.str();
  }
};

namespace detail {

inline double dist_to_real_complement(Complex z, const Interval& dom) {
  double d = std::numeric_limits<double>::infinity();
  if (std::isfinite(dom.a))
    d = std::min(d, z.real() <= dom.a ? std::abs(z.imag())
                                      : std::hypot(z.real() - dom.a, z.imag()));
  if (std::isfinite(dom.b))
    d = std::min(d, z.real() >= dom.b ? std::abs(z.imag())
                                      : std::hypot(z.real() - dom.b, z.imag()));
  return d;
}

/// Clearances measured on a dense parameter sample, independent of the
/// quadrature node count.
inline void measure_clearances(Contour& c, const CVec& eigs, const Interval& dom) {
  constexpr int kSamples = 512;
  double spec = std::numeric_limits<double>::infinity();
  double real = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kSamples; ++j) {
    const Complex z = c.point(2.0 * M_PI * j / kSamples);
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
      spec = std::min(spec, std::abs(z - eigs(i)));
    real = std::min(real, dist_to_real_complement(z, dom));
  }
  c.spectrum_clearance = spec;
  c.real_clearance = real;
}

inline void check_clearances(const Contour& c, double scale) {
  const double floor = 1e-12 * (1.0 + scale);
  if (c.spectrum_clearance < floor) {
    std::ostringstream os;
    os << "contour: path too close to sigma(X), clearance " << c.spectrum_clearance;
    throw GeometryError(os.str());
  }
  if (c.real_clearance < floor) {
    std::ostringstream os;
    os << "contour: path too close to R outside the domain, clearance " << c.real_clearance;
    throw GeometryError(os.str());
  }
}

inline Contour upper_half_contour(const CVec& eigs, const Interval& dom, double scale) {
  const int n = static_cast<int>(eigs.size());
  double min_im = std::numeric_limits<double>::infinity();
  double max_im = 0.0, xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  Complex mean(0, 0);
  for (int i = 0; i < n; ++i) {
    min_im = std::min(min_im, eigs(i).imag());
    max_im = std::max(max_im, eigs(i).imag());
    xmin = std::min(xmin, eigs(i).real());
    xmax = std::max(xmax, eigs(i).real());
    mean += eigs(i);
  }
  mean /= static_cast<double>(n);
  if (!(min_im > 0)) throw PrecondError("upper_half contour: sigma(X) not strictly above R");

  auto maxdist = [&](Complex c) {
    double d = 0;
    for (int i = 0; i < n; ++i) d = std::max(d, std::abs(eigs(i) - c));
    return d;
  };

  // Preferred circle: center at the eigenvalue mean, radius 1.25x the max
  // distance, kept at height >= min_im/2 above R. Raise the center if the
  // preferred radius would dip below that line.
  {
    Complex c = mean;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double md = maxdist(c);
      const double r_pref = std::max(1.25 * md, 0.25 * min_im);
      const double r_max = c.imag() - 0.5 * min_im;
      if (r_max >= std::max(1.05 * md, 0.1 * min_im)) {
        Contour out;
        out.kind = ContourKind::Circle;
        out.center = c;
        out.radius = std::min(r_pref, r_max);
        return out;
      }
      c = Complex(c.real(), c.imag() * 1.6 + 0.1 * min_im);
      if (c.imag() > 1e9 * (1.0 + scale)) break;
    }
  }

  // Fallback for wide, low spectra: axis-aligned ellipse with its lowest
  // point on the line Im = min_im/2. Widen the horizontal semi-axis until
  // the per-eigenvalue windows for the vertical semi-axis intersect; pick
  // the candidate with the best measured clearance to the spectrum.
  const double span = xmax - xmin;
  const double cx = 0.5 * (xmin + xmax);
  const double y0 = 0.5 * min_im;
  Contour best;
  double best_clear = -1.0;
  for (double mult : {1.3, 1.6, 2.0, 3.0, 5.0, 8.0, 13.0, 21.0, 34.0, 55.0, 144.0, 610.0,
                      2584.0, 10946.0}) {
    const double ae = 0.5 * span * mult + min_im;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double u = std::pow((eigs(i).real() - cx) / ae, 2);
      if (u >= 1.0) { ok = false; break; }
      const double s = std::sqrt(1.0 - u);
      const double d = eigs(i).imag() - y0;
      lo = std::max(lo, d / (1.0 + s));
      if (s < 1.0) hi = std::min(hi, d / (1.0 - s));
    }
    if (!ok || !(lo < hi)) continue;
    Contour cand;
    cand.kind = ContourKind::Ellipse;
    const double be = std::isfinite(hi) ? std::sqrt(lo * hi) : 2.0 * lo;
    cand.center = Complex(cx, y0 + be);
    cand.radius = be;
    cand.half_length = ae;
    double clear = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 256; ++j) {
      const Complex zp = cand.point(2.0 * M_PI * j / 256);
      for (int i = 0; i < n; ++i) clear = std::min(clear, std::abs(zp - eigs(i)));
    }
    if (clear > best_clear) {
      best_clear = clear;
      best = cand;
    }
    if (clear >= 0.1 * min_im) return cand;
  }
  if (best_clear > 0) return best;
  throw GeometryError("upper_half contour: no enclosing path with the required clearances");
}

inline Contour strip_contour(const CVec& eigs, const RVec& re_spectrum, const Interval& dom,
                             double scale) {
  const double lam_min = re_spectrum(0);
  const double lam_max = re_spectrum(re_spectrum.size() - 1);
  const double endpoint_gap = 1e-9 * (1.0 + scale);
  if (std::isfinite(dom.a) && lam_min - dom.a < endpoint_gap) {
    std::ostringstream os;
    os << "strip contour: eigenvalue " << lam_min << " within 1e-9 of endpoint " << dom.a;
    throw GeometryError(os.str());
  }
  if (std::isfinite(dom.b) && dom.b - lam_max < endpoint_gap) {
    std::ostringstream os;
    os << "strip contour: eigenvalue " << lam_max << " within 1e-9 of endpoint " << dom.b;
    throw GeometryError(os.str());
  }

  // Crossing points: halfway between the spectral hull of Re X and the
  // interval endpoints (finite hull extension on unbounded sides).
  double xl, xr;
  if (std::isfinite(dom.a))
    xl = 0.5 * (dom.a + lam_min);
  else
    xl = lam_min - 0.5 * std::max(1.0, std::abs(lam_min));
  if (std::isfinite(dom.b))
    xr = 0.5 * (dom.b + lam_max);
  else
    xr = lam_max + 0.5 * std::max(1.0, std::abs(lam_max));

  const int n = static_cast<int>(eigs.size());
  const double cx = 0.5 * (xl + xr);
  const double ae = 0.5 * (xr - xl);
  const double mu = 0.1;
  double be = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = std::pow((eigs(i).real() - cx) / ae, 2);
    // In tight geometry fall back to half of the remaining headroom.
    const double s2 = std::max(1.0 - mu - u, 0.5 * (1.0 - u));
    if (!(s2 > 0)) throw GeometryError("strip contour: eigenvalue outside the crossing window");
    be = std::max(be, std::abs(eigs(i).imag()) / std::sqrt(s2));
  }
  be = std::max(be, 0.25 * ae);

  Contour out;
  out.kind = ContourKind::Ellipse;
  out.center = Complex(cx, 0.0);
  out.radius = be;
  out.half_length = ae;
  return out;
}

}  // namespace detail

/// Builds a quadrature contour for (X, f) under the requested spectral
/// hypothesis. upper_half requires Im X > 0; strip requires
/// sigma(Re X) inside (a,b).
inline Contour build_contour(const ComplexMatrix& x, const FunctionSpec& f, ContourCase c,
                             int node_count = 64) {
  const Spectrum sp = general_eigen(x);
  const double scale = x.fro();
  Contour out;
  if (c == ContourCase::UpperHalf) {
    const auto parts = re_im_parts(x);
    if (!(psd_margin(parts.second) > 0))
      throw PrecondError("build_contour: upper_half requires psd_margin(Im X) > 0");
    out = detail::upper_half_contour(sp.values, f.domain(), scale);
  } else {
    const auto parts = re_im_parts(x);
    const Spectrum spa = hermitian_eigen(parts.first);
    const RVec rev = spa.real_values();
    const Interval& dom = f.domain();
    if (!(rev(0) > dom.a && rev(rev.size() - 1) < dom.b))
      throw PrecondError("build_contour: strip requires sigma(Re X) inside the domain");
    out = detail::strip_contour(sp.values, rev, dom, scale);
  }
  detail::measure_clearances(out, sp.values, f.domain());
  detail::check_clearances(out, scale);
  out.fill_nodes(node_count);
  return out;
}

}  // namespace opertone

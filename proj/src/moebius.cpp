#include "bikelab/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bikelab {

namespace {

cplx bracket(const Hom& a, const Hom& b) { return a(0) * b(1) - a(1) * b(0); }

// Sends p1 -> 0, p2 -> 1, p3 -> infinity.
Mat2c normal_frame(const Hom& p1, const Hom& p2, const Hom& p3) {
  Mat2c f;
  const cplx s = bracket(p2, p3), t = bracket(p2, p1);
  f << s * p1(1), -s * p1(0), t * p3(1), -t * p3(0);
  return f;
}

double max_abs(const Mat2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Hom to_homogeneous(const Vec& e, int dim) {
  Hom h;
  if (dim == 2) {
    const double c = e.x(), s = e.y();
    if (c > -0.5)
      h << s, 1.0 + c;
    else
      h << 1.0 - c, s;
  } else {
    if (e.z() < 0.5)
      h << cplx(e.x(), e.y()), 1.0 - e.z();
    else
      h << 1.0 + e.z(), cplx(e.x(), -e.y());
  }
  return h / h.norm();
}

Vec from_homogeneous(const Hom& h, int dim) {
  if (dim == 2) {
    // strip the common phase so that both coordinates are real
    const cplx big = std::abs(h(0)) > std::abs(h(1)) ? h(0) : h(1);
    const cplx phase = std::conj(big) / std::abs(big);
    const double a = (h(0) * phase).real(), b = (h(1) * phase).real();
    const double n2 = a * a + b * b;
    return Vec((b * b - a * a) / n2, 2.0 * a * b / n2, 0.0);
  }
  const double n0 = std::norm(h(0)), n1 = std::norm(h(1));
  const cplx xy = 2.0 * h(0) * std::conj(h(1)) / (n0 + n1);
  return Vec(xy.real(), xy.imag(), (n0 - n1) / (n0 + n1));
}

MoebiusMap::MoebiusMap(int dim, const Mat2c& raw) : MoebiusMap(dim, raw, raw.determinant()) {}

MoebiusMap::MoebiusMap(int dim, const Mat2c& raw, cplx det) : dim_(dim) {
  if (std::abs(det) < 1e-300 || !raw.allFinite())
    throw Error(ErrorCode::FitDegenerate, "singular Moebius matrix");
  const cplx tr = raw.trace();
  trace_invariant_ = tr * tr / det;
  if (dim == 2) {
    reversing_ = det.real() < 0.0;
    m_ = raw / std::sqrt(std::abs(det));
    m_ = m_.real().cast<cplx>();
    trace_invariant_ = cplx(trace_invariant_.real(), 0.0);
  } else {
    m_ = raw / std::sqrt(det);
  }
}

MoebiusMap MoebiusMap::planar(const Mat2c& raw, double log_abs_det, bool reversing) {
  const double big = raw.cwiseAbs().maxCoeff();
  if (!(big > 0.0) || !raw.allFinite() || !std::isfinite(log_abs_det))
    throw Error(ErrorCode::FitDegenerate, "singular Moebius matrix");
  const double shift = std::log(big) - 0.5 * log_abs_det;
  if (std::abs(shift) < 300.0) return MoebiusMap(2, raw, cplx(reversing ? -1.0 : 1.0) * std::exp(log_abs_det));
  MoebiusMap out;
  out.dim_ = 2;
  out.reversing_ = reversing;
  out.m_ = (raw / big).real().cast<cplx>();
  out.log_scale_ = shift;
  const double tr = std::abs(raw.trace().real());
  const double log_t = 2.0 * std::log(tr) - log_abs_det;
  out.trace_invariant_ = cplx((reversing ? -1.0 : 1.0) * std::exp(log_t), 0.0);
  return out;
}

Vec MoebiusMap::apply(const Vec& direction) const {
  return from_homogeneous(m_ * to_homogeneous(direction, dim_), dim_);
}

MoebiusMap MoebiusMap::after(const MoebiusMap& other) const {
  if (dim_ == 2 && (log_scale_ != 0.0 || other.log_scale_ != 0.0))
    return planar(m_ * other.m_, -2.0 * (log_scale_ + other.log_scale_), reversing_ != other.reversing_);
  return MoebiusMap(dim_, m_ * other.m_);
}

MoebiusMap MoebiusMap::inverse() const {
  if (log_scale_ != 0.0) {
    // adjugate / det, at the same scale
    Mat2c adj;
    adj << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    MoebiusMap out = *this;
    out.m_ = reversing_ ? Mat2c(-adj) : adj;
    return out;
  }
  return MoebiusMap(dim_, m_.inverse());
}

cplx MoebiusMap::multiplier_at(const Vec& direction) const {
  const Hom h = to_homogeneous(direction, dim_);
  const Hom mh = m_ * h;
  const cplx mu = h.dot(mh);  // conj(h) . (M h), |h| = 1
  if (log_scale_ != 0.0) return det() * std::exp(-2.0 * log_scale_ - 2.0 * std::log(mu));
  return det() / (mu * mu);
}

std::string to_string(MonodromyKind k) {
  switch (k) {
    case MonodromyKind::Elliptic: return "elliptic";
    case MonodromyKind::Parabolic: return "parabolic";
    case MonodromyKind::Hyperbolic: return "hyperbolic";
    case MonodromyKind::Identity: return "identity";
  }
  return "unknown";
}

MonodromyClass classify(const MoebiusMap& map) {
  MonodromyClass out;
  const Mat2c& m = map.matrix();
  const Mat2c id = Mat2c::Identity();
  out.trace_invariant = map.trace_invariant();
  out.identity_distance = map.log_scale() != 0.0 ? std::numeric_limits<double>::infinity()
                                                  : std::min(max_abs(m - id), max_abs(m + id));
  if (out.identity_distance < kIdentityTolerance && !map.orientation_reversing()) {
    out.kind = MonodromyKind::Identity;
    return out;
  }

  // determinant of m itself; differs from map.det() only for log-scaled maps
  const cplx det = map.det() * std::exp(-2.0 * map.log_scale());
  const cplx tr = m.trace();
  const cplx disc = tr * tr - 4.0 * det;
  const cplx t = out.trace_invariant;
  const bool real = map.dim() == 2;

  std::vector<cplx> eig;
  if (real) {
    if (std::abs(t.real() - 4.0) < kParabolicTolerance && !map.orientation_reversing()) {
      out.kind = MonodromyKind::Parabolic;
      eig.push_back(tr / 2.0);
    } else if (disc.real() > 0.0) {
      out.kind = MonodromyKind::Hyperbolic;
      const double r = std::copysign(std::sqrt(disc.real()), tr.real());
      const cplx big = (tr + r) / 2.0;
      eig.push_back(big);
      eig.push_back(det / big);
    } else {
      out.kind = MonodromyKind::Elliptic;
    }
  } else {
    const cplx r = std::sqrt(disc);
    if (std::abs(t - 4.0) < kParabolicTolerance) {
      out.kind = MonodromyKind::Parabolic;
      eig.push_back(tr / 2.0);
    } else {
      const bool on_segment = std::abs(t.imag()) < kParabolicTolerance * std::max(1.0, std::abs(t)) &&
                              t.real() >= 0.0 && t.real() < 4.0;
      out.kind = on_segment ? MonodromyKind::Elliptic : MonodromyKind::Hyperbolic;
      const cplx big = std::abs(tr + r) >= std::abs(tr - r) ? (tr + r) / 2.0 : (tr - r) / 2.0;
      eig.push_back(big);
      eig.push_back(det / big);
    }
  }

  for (std::size_t k = 0; k < eig.size(); ++k) {
    const cplx mu = eig[k];
    Hom v1, v2;
    v1 << m(0, 1), mu - m(0, 0);
    v2 << mu - m(1, 1), m(1, 0);
    Hom v = v1.norm() >= v2.norm() ? v1 : v2;
    if (v.norm() == 0.0) continue;
    v /= v.norm();
    FixedPoint fp;
    fp.direction = from_homogeneous(v, map.dim());
    // det / mu^2 = other / mu, which survives det underflow
    if (eig.size() == 2)
      fp.multiplier = mu == 0.0 ? cplx(std::numeric_limits<double>::infinity()) : eig[1 - k] / mu;
    else
      fp.multiplier = det / (mu * mu);
    out.fixed_points.push_back(fp);
  }
  std::stable_sort(out.fixed_points.begin(), out.fixed_points.end(),
                   [](const FixedPoint& a, const FixedPoint& b) { return std::abs(a.multiplier) < std::abs(b.multiplier); });
  return out;
}

MoebiusMap moebius_through(int dim, std::span<const Vec, 3> src, std::span<const Vec, 3> img) {
  const Mat2c fz = normal_frame(to_homogeneous(src[0], dim), to_homogeneous(src[1], dim), to_homogeneous(src[2], dim));
  const Mat2c fw = normal_frame(to_homogeneous(img[0], dim), to_homogeneous(img[1], dim), to_homogeneous(img[2], dim));
  if (std::abs(fz.determinant()) < 1e-24 || std::abs(fw.determinant()) < 1e-24)
    throw Error(ErrorCode::FitDegenerate, "anchor points numerically coincide");
  return MoebiusMap(dim, fw.inverse() * fz);
}

MoebiusFit fit_moebius(int dim, std::span<const Vec> sources, std::span<const Vec> images) {
  const std::size_t n = sources.size();
  if (n != images.size() || n < 4) throw Error(ErrorCode::FitDegenerate, "need at least 4 sample pairs");
  double best = -1.0;
  std::array<std::size_t, 3> anchors{0, 1, 2};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        const double sep = std::min({(sources[a] - sources[b]).norm(), (sources[a] - sources[c]).norm(),
                                     (sources[b] - sources[c]).norm(), (images[a] - images[b]).norm(),
                                     (images[a] - images[c]).norm(), (images[b] - images[c]).norm()});
        if (sep > best) {
          best = sep;
          anchors = {a, b, c};
        }
      }
  if (best < 1e-12) throw Error(ErrorCode::FitDegenerate, "sampled images are numerically coincident");

  const std::array<Vec, 3> s{sources[anchors[0]], sources[anchors[1]], sources[anchors[2]]};
  const std::array<Vec, 3> w{images[anchors[0]], images[anchors[1]], images[anchors[2]]};
  MoebiusFit fit{moebius_through(dim, s, w), 0.0, anchors};
  for (std::size_t i = 0; i < n; ++i) {
    if (i == anchors[0] || i == anchors[1] || i == anchors[2]) continue;
    fit.residual = std::max(fit.residual, (fit.map.apply(sources[i]) - images[i]).norm());
  }
  return fit;
}

std::vector<Vec> sample_directions(int dim, std::size_t count) {
  std::vector<Vec> out(count);
  const double pi = std::numbers::pi;
  for (std::size_t i = 0; i < count; ++i) {
    if (dim == 2) {
      const double t = 2.0 * pi * (static_cast<double>(i) + 0.25) / static_cast<double>(count);
      out[i] = Vec(std::cos(t), std::sin(t), 0.0);
    } else {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = static_cast<double>(i) * pi * (3.0 - std::sqrt(5.0));
      out[i] = Vec(r * std::cos(phi), r * std::sin(phi), z);
    }
  }
  return out;
}

double map_distance(const MoebiusMap& a, const MoebiusMap& b, std::size_t samples) {
  double d = 0.0;
  for (const auto& x : sample_directions(a.dim(), samples)) d = std::max(d, (a.apply(x) - b.apply(x)).norm());
  return d;
}

}  // namespace bikelab

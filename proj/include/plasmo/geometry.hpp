#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>

#include "plasmo/quadrature.hpp"
#include "plasmo/types.hpp"

namespace plasmo {

/// Reference domain B: the unit ball or an ellipsoid whose largest
/// semi-axis is 1.
template <typename Scalar>
class ShapeT {
 public:
  static constexpr Scalar kMinAxis = Scalar(1e-6);

  static ShapeT ball() { return ShapeT(Vector3<Scalar>::Ones(), true); }

  static ShapeT ellipsoid(Scalar r1, Scalar r2, Scalar r3) {
    const Vector3<Scalar> r(r1, r2, r3);
    if (!r.allFinite() || r.minCoeff() <= 0)
      throw InvalidArgument("ellipsoid semi-axes must be positive");
    if (r.minCoeff() < kMinAxis)
      throw InvalidArgument("degenerate ellipsoid: semi-axis below 1e-6");
    using std::abs;
    if (abs(r.maxCoeff() - 1) > Scalar(1e-12))
      throw InvalidArgument("ellipsoid must have maximum semi-axis 1");
    return ShapeT(r, false);
  }

  bool is_ball() const { return ball_; }
  /// True for the ball and for the ellipsoid (1,1,1).
  bool is_spherical() const { return ball_ || (axes_.array() == Scalar(1)).all(); }
  const Vector3<Scalar>& semi_axes() const { return axes_; }
  Scalar max_axis() const { return axes_.maxCoeff(); }
  Scalar volume() const { return 4 * pi_v<Scalar> / 3 * axes_.prod(); }

  template <typename Other>
  ShapeT<Other> cast() const {
    return ball_ ? ShapeT<Other>::ball()
                 : ShapeT<Other>::ellipsoid(Other(axes_[0]), Other(axes_[1]), Other(axes_[2]));
  }

 private:
  ShapeT(Vector3<Scalar> axes, bool ball) : axes_(std::move(axes)), ball_(ball) {}

  Vector3<Scalar> axes_;
  bool ball_;
};

/// Embedded particle D = a B + z.
template <typename Scalar>
struct ParticleT {
  ShapeT<Scalar> shape = ShapeT<Scalar>::ball();
  Vector3<Scalar> center = Vector3<Scalar>::Zero();
  Scalar scale = Scalar(0.01);

  Scalar diameter() const { return 2 * scale * shape.max_axis(); }
  /// Radius of the smallest ball around the center that covers D.
  Scalar radius() const { return scale * shape.max_axis(); }

  void validate() const {
    if (!(scale > 0) || !std::isfinite(static_cast<double>(scale)))
      throw InvalidArgument("particle scale a must be positive");
    if (!center.allFinite()) throw InvalidArgument("particle center must be finite");
  }
};

using Shape = ShapeT<double>;
using Particle = ParticleT<double>;

namespace detail {

template <typename T>
bool is_finite_value(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::isfinite(v);
  } else if constexpr (std::is_same_v<T, std::complex<float>> ||
                       std::is_same_v<T, std::complex<double>> ||
                       std::is_same_v<T, std::complex<long double>>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    return v.allFinite();
  }
}

template <typename T>
T zero_like(const T& v) {
  if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, std::complex<double>> ||
                std::is_same_v<T, std::complex<float>> ||
                std::is_same_v<T, std::complex<long double>>) {
    return T(0);
  } else {
    T z = v;
    z.setZero();
    return z;
  }
}

// Orthonormal pair completing the unit vector `axis`.
template <typename Scalar>
void complete_basis(const Vector3<Scalar>& axis, Vector3<Scalar>& u, Vector3<Scalar>& v) {
  using std::abs;
  const Vector3<Scalar> trial = abs(axis.x()) < Scalar(0.9) ? Vector3<Scalar>::UnitX()
                                                            : Vector3<Scalar>::UnitY();
  u = (trial - axis.dot(trial) * axis).normalized();
  v = axis.cross(u);
}

}  // namespace detail

/// Membership test Σ (x_j / r_j)² ≤ 1.
template <typename Scalar>
bool contains(const ShapeT<Scalar>& shape, const Vector3<Scalar>& x) {
  if (shape.is_ball()) return x.squaredNorm() <= 1;
  return x.cwiseQuotient(shape.semi_axes()).squaredNorm() <= 1;
}

/// Distance from an interior point to the boundary along a unit direction.
template <typename Scalar>
Scalar ray_exit(const ShapeT<Scalar>& shape, const Vector3<Scalar>& origin,
                const Vector3<Scalar>& dir) {
  using std::sqrt;
  const Vector3<Scalar> inv2 = shape.semi_axes().cwiseProduct(shape.semi_axes()).cwiseInverse();
  const Scalar A = dir.cwiseProduct(dir).dot(inv2);
  const Scalar B = origin.cwiseProduct(dir).dot(inv2);
  const Scalar C = origin.cwiseProduct(origin).dot(inv2) - 1;
  return (-B + sqrt(B * B - A * C)) / A;
}

/// ∫_B f dx by the polar product rule on the unit ball, mapped affinely
/// onto the ellipsoid. Radial and polar directions use Gauss-Legendre of
/// the given order, the azimuth a 2·order trapezoid; the rule integrates
/// polynomials of degree < 2·order exactly.
template <typename Scalar, typename F>
auto volume_quadrature(const ShapeT<Scalar>& shape, F&& f, int order = 24) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const auto& gl = gauss_legendre<Scalar>(order);
  const int n_phi = 2 * order;
  const Vector3<Scalar> r = shape.semi_axes();
  const Scalar jac = shape.is_ball() ? Scalar(1) : r.prod();
  const Scalar dphi = 2 * pi_v<Scalar> / n_phi;

  using R = std::decay_t<decltype(f(Vector3<Scalar>::Zero().eval()))>;
  R sum = detail::zero_like(f(Vector3<Scalar>::Zero().eval()));
  for (int ir = 0; ir < order; ++ir) {
    const Scalar rad = (gl.nodes[ir] + 1) / 2;
    const Scalar wr = gl.weights[ir] / 2 * rad * rad;
    for (int it = 0; it < order; ++it) {
      const Scalar ct = gl.nodes[it];
      const Scalar st = sqrt(1 - ct * ct);
      const Scalar wt = wr * gl.weights[it] * dphi;
      for (int ip = 0; ip < n_phi; ++ip) {
        const Scalar phi = dphi * ip;
        Vector3<Scalar> x(rad * st * cos(phi), rad * st * sin(phi), rad * ct);
        x = x.cwiseProduct(r);
        const R value = f(x);
        if (!detail::is_finite_value(value))
          throw NumericalError("volume_quadrature: non-finite integrand value");
        sum += wt * value;
      }
    }
  }
  return R(sum * jac);
}

/// ∫_B f dx in spherical coordinates centred at an interior point, so that
/// integrands singular at `origin` (like 1/|x - origin|) are handled by the
/// ρ² Jacobian. The ray length to ∂B is exact.
template <typename Scalar, typename F>
auto volume_quadrature_about(const ShapeT<Scalar>& shape, const Vector3<Scalar>& origin, F&& f,
                             int order = 48, int radial_order = 4) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!contains(shape, origin))
    throw InvalidArgument("volume_quadrature_about: origin outside the shape");
  const auto& gl = gauss_legendre<Scalar>(order);
  const auto& glr = gauss_legendre<Scalar>(radial_order);
  const int n_phi = 2 * order;
  const Scalar dphi = 2 * pi_v<Scalar> / n_phi;

  using R = std::decay_t<decltype(f(origin))>;
  R sum = detail::zero_like(f(origin));
  for (int it = 0; it < order; ++it) {
    const Scalar ct = gl.nodes[it];
    const Scalar st = sqrt(1 - ct * ct);
    for (int ip = 0; ip < n_phi; ++ip) {
      const Scalar phi = dphi * ip;
      const Vector3<Scalar> dir(st * cos(phi), st * sin(phi), ct);
      const Scalar rho = ray_exit(shape, origin, dir);
      const Scalar w_ang = gl.weights[it] * dphi;
      for (int ir = 0; ir < radial_order; ++ir) {
        const Scalar t = rho * (glr.nodes[ir] + 1) / 2;
        const R value = f((origin + t * dir).eval());
        if (!detail::is_finite_value(value))
          throw NumericalError("volume_quadrature_about: non-finite integrand value");
        sum += (w_ang * glr.weights[ir] * rho / 2 * t * t) * value;
      }
    }
  }
  return R(sum);
}

/// ∫_{∂B(center, radius)} f dσ by the Gauss(cos θ) × trapezoid(φ) product rule.
template <typename Scalar, typename F>
auto sphere_surface_quadrature(const Vector3<Scalar>& center, Scalar radius, F&& f,
                               int order = 24) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!(radius > 0)) throw InvalidArgument("sphere_surface_quadrature: radius must be positive");
  const auto& gl = gauss_legendre<Scalar>(order);
  const int n_phi = 2 * order;
  const Scalar dphi = 2 * pi_v<Scalar> / n_phi;
  using R = std::decay_t<decltype(f(center))>;
  R sum = detail::zero_like(f(center));
  for (int it = 0; it < order; ++it) {
    const Scalar ct = gl.nodes[it];
    const Scalar st = sqrt(1 - ct * ct);
    for (int ip = 0; ip < n_phi; ++ip) {
      const Scalar phi = dphi * ip;
      const Vector3<Scalar> y = center + radius * Vector3<Scalar>(st * cos(phi), st * sin(phi), ct);
      const R value = f(y);
      if (!detail::is_finite_value(value))
        throw NumericalError("sphere_surface_quadrature: non-finite integrand value");
      sum += (gl.weights[it] * dphi) * value;
    }
  }
  return R(sum * (radius * radius));
}

/// ∫ over the part of ∂B(center, radius) lying inside the ball
/// B(ball_center, ball_radius). The polar axis points at ball_center so the
/// clipped region is a cap and the rule stays spectrally accurate for smooth
/// f. Pass azimuth_order = 1 when f is axisymmetric about that axis.
template <typename Scalar, typename F>
Scalar sphere_cap_quadrature(const Vector3<Scalar>& center, Scalar radius,
                             const Vector3<Scalar>& ball_center, Scalar ball_radius, F&& f,
                             int order = 24, int azimuth_order = -1) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!(radius > 0)) throw InvalidArgument("sphere_cap_quadrature: radius must be positive");
  const Vector3<Scalar> offset = ball_center - center;
  const Scalar d = offset.norm();
  Scalar cos_lo;
  Vector3<Scalar> axis = Vector3<Scalar>::UnitZ();
  if (d <= Scalar(0)) {
    if (radius > ball_radius) return Scalar(0);
    cos_lo = -1;
  } else {
    axis = offset / d;
    cos_lo = (radius * radius + d * d - ball_radius * ball_radius) / (2 * radius * d);
    if (cos_lo >= 1) return Scalar(0);
    cos_lo = std::max(cos_lo, Scalar(-1));
  }
  Vector3<Scalar> u, v;
  detail::complete_basis(axis, u, v);

  const auto& gl = gauss_legendre<Scalar>(order);
  const int n_phi = azimuth_order > 0 ? azimuth_order : 2 * order;
  const Scalar dphi = 2 * pi_v<Scalar> / n_phi;
  const Scalar half = (1 - cos_lo) / 2;
  const Scalar mid = (1 + cos_lo) / 2;
  Scalar sum = 0;
  for (int it = 0; it < order; ++it) {
    const Scalar ct = mid + half * gl.nodes[it];
    const Scalar st = sqrt(std::max(Scalar(0), 1 - ct * ct));
    for (int ip = 0; ip < n_phi; ++ip) {
      const Scalar phi = dphi * ip;
      const Vector3<Scalar> dir = ct * axis + st * (cos(phi) * u + sin(phi) * v);
      const Scalar value = f((center + radius * dir).eval());
      if (!detail::is_finite_value(value))
        throw NumericalError("sphere_cap_quadrature: non-finite integrand value");
      sum += gl.weights[it] * half * dphi * value;
    }
  }
  return sum * radius * radius;
}

}  // namespace plasmo

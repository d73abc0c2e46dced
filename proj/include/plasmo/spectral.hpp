#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "plasmo/geometry.hpp"

namespace plasmo {

namespace detail {
inline std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace detail

/// Visible eigenpair of the Magnetization operator on B: eigenvalue and
/// the mean vector ∫_B e dx. Only the constant-mean sector (tag 3) is
/// represented.
template <typename Scalar>
struct EigenModeT {
  Scalar lambda = 0;
  int axis = 0;  // 0, 1, 2 for ê1, ê2, ê3
  Vector3<Scalar> direction = Vector3<Scalar>::UnitZ();
  /// |∫_B e dx|; empty when no closed form is available (non-spherical B).
  std::optional<Scalar> mean_magnitude;
  int subspace_tag = 3;

  bool mean_known() const { return mean_magnitude.has_value(); }
  Vector3<Scalar> mean() const {
    if (!mean_magnitude) throw InvalidArgument("mode mean magnitude is unknown for this shape");
    return *mean_magnitude * direction;
  }
};

/// Diagonal of ∇M(I) on an ellipsoid (the demagnetization factors).
template <typename Scalar>
struct MagnetizationTensorT {
  Vector3<Scalar> diag = Vector3<Scalar>::Constant(Scalar(1) / 3);

  Matrix3<Scalar> matrix() const { return diag.asDiagonal(); }
  Scalar trace() const { return diag.sum(); }
};

using EigenMode = EigenModeT<double>;
using MagnetizationTensor = MagnetizationTensorT<double>;

/// |∫_B e dx| for the visible unit-ball mode, (2/9)·√(π/3).
template <typename Scalar = double>
Scalar ball_mode_mean_magnitude() {
  using std::sqrt;
  return Scalar(2) / 9 * sqrt(pi_v<Scalar> / 3);
}

/// 𝓘_j(r1,r2,r3) = ∫₀^∞ ds / [(s + r_j²) √((s+r1²)(s+r2²)(s+r3²))].
/// Adaptive Gauss-Kronrod on the half line; throws when the error estimate
/// exceeds `abs_tol`.
template <typename Scalar>
Scalar demag_integral(Scalar r1, Scalar r2, Scalar r3, int j, Scalar abs_tol = Scalar(1e-10)) {
  using std::sqrt;
  if (!(r1 > 0 && r2 > 0 && r3 > 0)) throw InvalidArgument("demag_integral: semi-axes must be positive");
  if (j < 0 || j > 2) throw InvalidArgument("demag_integral: axis index must be 0, 1 or 2");
  using std::cos;
  using std::tan;
  const std::array<Scalar, 3> sq{r1 * r1, r2 * r2, r3 * r3};
  // s = tan²θ maps the half line onto [0, π/2) with a smooth integrand.
  auto integrand = [&](Scalar theta) -> Scalar {
    const Scalar c = cos(theta);
    if (c <= 0) return Scalar(0);
    const Scalar t = tan(theta);
    const Scalar s = t * t;
    return 2 * t / (c * c) / ((s + sq[j]) * sqrt((s + sq[0]) * (s + sq[1]) * (s + sq[2])));
  };
  Scalar error = 0;
  const Scalar rel_tol = std::max(Scalar(1e-14), std::numeric_limits<Scalar>::epsilon() * 16);
  const Scalar value = boost::math::quadrature::gauss_kronrod<Scalar, 61>::integrate(
      integrand, Scalar(0), pi_v<Scalar> / 2, 20, rel_tol, &error);
  if (!(error <= abs_tol))
    throw NumericalError("demag_integral did not converge; achieved error estimate " +
                         detail::scientific(static_cast<double>(error)));
  return value;
}

/// ∇M(I) on B: (r1 r2 r3 / 2)·diag(𝓘1, 𝓘2, 𝓘3); exactly I/3 on the ball.
template <typename Scalar>
MagnetizationTensorT<Scalar> magnetization_tensor(const ShapeT<Scalar>& shape) {
  MagnetizationTensorT<Scalar> t;
  if (shape.is_spherical()) return t;
  const Vector3<Scalar>& r = shape.semi_axes();
  const Scalar scale = r.prod() / 2;
  for (int j = 0; j < 3; ++j) t.diag[j] = scale * demag_integral(r[0], r[1], r[2], j);
  return t;
}

/// Modes with non-vanishing mean, sorted by eigenvalue (ties by axis).
/// The ball yields three axis-aligned copies of λ = 1/3.
template <typename Scalar>
std::vector<EigenModeT<Scalar>> visible_modes(const ShapeT<Scalar>& shape) {
  const auto tensor = magnetization_tensor(shape);
  std::vector<EigenModeT<Scalar>> modes(3);
  for (int j = 0; j < 3; ++j) {
    modes[j].lambda = tensor.diag[j];
    modes[j].axis = j;
    modes[j].direction = Vector3<Scalar>::Unit(j);
    if (shape.is_spherical()) modes[j].mean_magnitude = ball_mode_mean_magnitude<Scalar>();
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  return modes;
}

/// N(1)(x) = ∫_B dy / (4π|x - y|) for x inside B.
template <typename Scalar>
Scalar newtonian_potential_of_one(const ShapeT<Scalar>& shape, const Vector3<Scalar>& x,
                                  int order = 64) {
  const Scalar inv4pi = 1 / (4 * pi_v<Scalar>);
  return volume_quadrature_about(
      shape, x, [&](const Vector3<Scalar>& y) { return inv4pi / (y - x).norm(); }, order, 2);
}

/// Numerical ∇M(I)(x) = -Hess N(1)(x), built from the Newtonian potential
/// by central differences. Used as the quadrature oracle for
/// magnetization_tensor.
template <typename Scalar>
Matrix3<Scalar> apply_magnetization_to_constant(const ShapeT<Scalar>& shape,
                                                const Vector3<Scalar>& x,
                                                Scalar step = Scalar(1e-4), int order = 64) {
  using std::sqrt;
  const Scalar level = sqrt(x.cwiseQuotient(shape.semi_axes()).squaredNorm());
  if ((1 - level) * shape.semi_axes().minCoeff() < Scalar(1e-3))
    throw InvalidArgument("apply_magnetization_to_constant: point within 1e-3 of the boundary");
  auto N = [&](const Vector3<Scalar>& p) { return newtonian_potential_of_one(shape, p, order); };
  const Scalar center = N(x);
  Matrix3<Scalar> hess;
  for (int i = 0; i < 3; ++i) {
    const Vector3<Scalar> ei = step * Vector3<Scalar>::Unit(i);
    hess(i, i) = (N(x + ei) - 2 * center + N(x - ei)) / (step * step);
    for (int j = i + 1; j < 3; ++j) {
      const Vector3<Scalar> ej = step * Vector3<Scalar>::Unit(j);
      hess(i, j) = (N(x + ei + ej) - N(x + ei - ej) - N(x - ei + ej) + N(x - ei - ej)) /
                   (4 * step * step);
      hess(j, i) = hess(i, j);
    }
  }
  return -hess;
}

/// ∫_B u dx, the projection of a vector field onto the constant fields.
/// Vanishes for fields in H0(div = 0) and H0(curl = 0).
template <typename Scalar, typename Field>
Vector3<Scalar> constant_projection(const ShapeT<Scalar>& shape, Field&& field, int order = 24) {
  return volume_quadrature(shape, [&](const Vector3<Scalar>& x) -> Vector3<Scalar> { return field(x); },
                           order);
}

}  // namespace plasmo

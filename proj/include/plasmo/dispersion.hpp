#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "plasmo/types.hpp"

namespace plasmo {

enum class DispersionModel { lorentz, drude };

/// Dispersive particle material. `omega_0` is ignored by the Drude model.
template <typename Scalar>
struct LorentzMediumT {
  Scalar eps_inf = 1;
  Scalar omega_p = 1;
  Scalar omega_0 = 1;
  DispersionModel model = DispersionModel::lorentz;

  void validate() const {
    if (!(eps_inf > 0)) throw InvalidArgument("medium: eps_inf must be positive");
    if (!(omega_p > 0)) throw InvalidArgument("medium: omega_p must be positive");
    if (model == DispersionModel::lorentz && !(omega_0 > 0))
      throw InvalidArgument("medium: omega_0 must be positive");
  }
};

/// ε0(z), the background permittivity at the particle location.
template <typename Scalar>
struct HostPermittivityT {
  std::complex<Scalar> value{2, 0};

  void validate(const LorentzMediumT<Scalar>& m) const {
    if (!(value.real() > m.eps_inf))
      throw InvalidArgument("host permittivity hypothesis violated: Re eps0(z) must exceed eps_inf");
    if (value.imag() < 0) throw InvalidArgument("host permittivity: Im eps0(z) must be >= 0");
  }
};

/// Root (ω_n, γ_n) of the dispersion equation for one eigenvalue.
template <typename Scalar>
struct ResonanceT {
  Scalar lambda = 0;
  Scalar omega = 0;
  Scalar gamma = 0;
  std::complex<Scalar> residual{};
  /// Relative sensitivity λ·ω'(λ)/ω(λ); large values flag poor conditioning.
  Scalar condition = 0;
};

/// The (ω, γ) rectangle that contains every resonance.
template <typename Scalar>
struct SweepSquareT {
  Scalar omega_min = 0;
  Scalar omega_max = 0;
  Scalar gamma_max = 0;
};

using LorentzMedium = LorentzMediumT<double>;
using HostPermittivity = HostPermittivityT<double>;
using Resonance = ResonanceT<double>;
using SweepSquare = SweepSquareT<double>;

inline constexpr double kAccumulationGuard = 0.02;
inline constexpr double kLosslessGammaFloor = 1e-3;

namespace detail {

template <typename Scalar>
std::complex<Scalar> lorentz_unchecked(const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  const std::complex<Scalar> denom(m.omega_0 * m.omega_0 - omega * omega, gamma * omega);
  return m.eps_inf * (Scalar(1) + m.omega_p * m.omega_p / denom);
}

template <typename Scalar>
std::complex<Scalar> drude_unchecked(const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  const std::complex<Scalar> denom(omega * omega, -gamma * omega);
  return m.eps_inf - m.omega_p * m.omega_p / denom;
}

template <typename Scalar>
std::complex<Scalar> permittivity_unchecked(const LorentzMediumT<Scalar>& m, Scalar omega,
                                            Scalar gamma) {
  return m.model == DispersionModel::drude ? drude_unchecked(m, omega, gamma)
                                           : lorentz_unchecked(m, omega, gamma);
}

template <typename Scalar>
void check_lambda_open(Scalar lambda) {
  if (!(lambda > 0 && lambda < 1)) throw InvalidArgument("eigenvalue must lie in (0, 1)");
}

// ω_n(λ) and γ_n(λ) in closed form, no validation.
template <typename Scalar>
std::pair<Scalar, Scalar> resonance_closed_form(Scalar lambda, std::complex<Scalar> eps0,
                                                const LorentzMediumT<Scalar>& m) {
  using std::abs;
  using std::norm;
  using std::sqrt;
  const Scalar wp2 = m.omega_p * m.omega_p;
  if (m.model == DispersionModel::drude) {
    // ω² - iγω = ω_p² / (ε∞ + ε0 (1-λ)/λ)
    const std::complex<Scalar> e = m.eps_inf + eps0 * (1 - lambda) / lambda;
    const std::complex<Scalar> w = wp2 / e;
    const Scalar omega = sqrt(w.real());
    return {omega, -w.imag() / omega};
  }
  const std::complex<Scalar> c = eps0 * (1 - lambda) + lambda * m.eps_inf;
  const Scalar re_c = eps0.real() * (1 - lambda) + lambda * m.eps_inf;
  const Scalar c2 = norm(c);
  const Scalar w02 = m.omega_0 * m.omega_0;
  const Scalar omega = sqrt(w02 + wp2 * lambda * m.eps_inf * re_c / c2);
  const Scalar q = sqrt(w02 * c2 + wp2 * lambda * m.eps_inf * re_c);
  const Scalar gamma = eps0.imag() * (1 - lambda) * wp2 * lambda * m.eps_inf / (sqrt(c2) * q);
  return {omega, gamma};
}

}  // namespace detail

/// ε_p = ε∞ [1 + ω_p² / (ω0² - ω² + iγω)].
/// Under this sign convention Im ε_p ≤ 0 for γ > 0.
template <typename Scalar>
std::complex<Scalar> lorentz_permittivity(const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  if (!(omega > 0)) throw InvalidArgument("lorentz_permittivity: omega must be positive");
  if (!(gamma >= 0)) throw InvalidArgument("lorentz_permittivity: gamma must be non-negative");
  if (gamma == 0 && omega == m.omega_0) throw NumericalError("undamped resonance singularity");
  return detail::lorentz_unchecked(m, omega, gamma);
}

/// ε = ε∞ - ω_p² / (ω² - iγω), the free-electron limit written in the same
/// sign convention as lorentz_permittivity.
template <typename Scalar>
std::complex<Scalar> drude_permittivity(const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  if (omega == 0) throw NumericalError("drude_permittivity: pole at omega = 0");
  if (!(omega > 0)) throw InvalidArgument("drude_permittivity: omega must be positive");
  if (!(gamma >= 0)) throw InvalidArgument("drude_permittivity: gamma must be non-negative");
  return detail::drude_unchecked(m, omega, gamma);
}

template <typename Scalar>
std::complex<Scalar> permittivity(const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  return m.model == DispersionModel::drude ? drude_permittivity(m, omega, gamma)
                                           : lorentz_permittivity(m, omega, gamma);
}

/// f(ω, γ) = ε0(z) - (ε0(z) - ε_p(ω, γ)) λ.
template <typename Scalar>
std::complex<Scalar> dispersion_residual(Scalar lambda, const HostPermittivityT<Scalar>& host,
                                         const LorentzMediumT<Scalar>& m, Scalar omega, Scalar gamma) {
  if (!(lambda >= 0 && lambda <= 1)) throw InvalidArgument("eigenvalue must lie in [0, 1]");
  const std::complex<Scalar> eps_p = permittivity(m, omega, gamma);
  return host.value - (host.value - eps_p) * lambda;
}

/// Closed-form solution of f(ω, γ) = 0 inside the sweep square.
template <typename Scalar>
ResonanceT<Scalar> resonance(Scalar lambda, const HostPermittivityT<Scalar>& host,
                             const LorentzMediumT<Scalar>& m, Scalar guard = Scalar(kAccumulationGuard)) {
  using std::abs;
  m.validate();
  detail::check_lambda_open(lambda);
  if (abs(lambda - Scalar(0.5)) < guard)
    throw InvalidArgument("eigenvalue too close to accumulation point 1/2");
  host.validate(m);
  ResonanceT<Scalar> r;
  r.lambda = lambda;
  std::tie(r.omega, r.gamma) = detail::resonance_closed_form(lambda, host.value, m);
  if (!(r.gamma >= 0))
    throw NumericalError("resonance: negative damping, no root inside the sweep square");
  r.residual = host.value - (host.value - detail::permittivity_unchecked(m, r.omega, r.gamma)) * lambda;

  const Scalar step = std::min(Scalar(1e-6), std::min(lambda, 1 - lambda) / 4);
  const Scalar up = detail::resonance_closed_form(lambda + step, host.value, m).first;
  const Scalar down = detail::resonance_closed_form(lambda - step, host.value, m).first;
  r.condition = lambda * (up - down) / (2 * step * r.omega);
  return r;
}

/// Frequency band and damping bound for a host with sup(Im ε0 / Re ε0) = loss_bound.
template <typename Scalar>
SweepSquareT<Scalar> bounds(Scalar loss_bound, const LorentzMediumT<Scalar>& m) {
  using std::sqrt;
  if (!(loss_bound >= 0)) throw InvalidArgument("bounds: loss bound must be non-negative");
  m.validate();
  SweepSquareT<Scalar> sq;
  if (m.model == DispersionModel::drude) {
    sq.omega_min = 0;
    sq.omega_max = m.omega_p / sqrt(m.eps_inf);
  } else {
    sq.omega_min = m.omega_0;
    sq.omega_max = sqrt(m.omega_0 * m.omega_0 + m.omega_p * m.omega_p);
  }
  if (!(sq.omega_max - sq.omega_min > Scalar(1e-9) * sq.omega_max))
    throw InvalidArgument("bounds: plasmonic band collapsed (omega_p too small)");
  sq.gamma_max = sq.omega_max * loss_bound;
  if (loss_bound == 0) sq.gamma_max = Scalar(kLosslessGammaFloor) * sq.omega_max;
  return sq;
}

/// Real resonance frequency for a lossless host (γ fixed and small).
template <typename Scalar>
Scalar lossless_resonance(Scalar lambda, Scalar re_host, const LorentzMediumT<Scalar>& m) {
  using std::sqrt;
  detail::check_lambda_open(lambda);
  if (!(re_host > m.eps_inf))
    throw InvalidArgument("host permittivity hypothesis violated: Re eps0(z) must exceed eps_inf");
  if (m.model == DispersionModel::drude)
    return detail::resonance_closed_form(lambda, std::complex<Scalar>(re_host, 0), m).first;
  return sqrt(m.omega_0 * m.omega_0 +
              lambda * m.eps_inf * m.omega_p * m.omega_p /
                  (lambda * m.eps_inf + (1 - lambda) * re_host));
}

/// Both complex frequencies ω = (iγ ± √Δ★)/2 for a fixed damping γ,
/// principal square root.
template <typename Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> complex_resonance(
    Scalar lambda, const HostPermittivityT<Scalar>& host, const LorentzMediumT<Scalar>& m,
    Scalar gamma) {
  detail::check_lambda_open(lambda);
  const std::complex<Scalar> i(0, 1);
  const std::complex<Scalar> c = host.value * (1 - lambda) + m.eps_inf * lambda;
  const std::complex<Scalar> delta =
      -gamma * gamma + Scalar(4) * (m.omega_0 * m.omega_0 + lambda * m.eps_inf * m.omega_p * m.omega_p / c);
  const std::complex<Scalar> root = std::sqrt(delta);
  return {(i * gamma + root) / Scalar(2), (i * gamma - root) / Scalar(2)};
}

/// |f_n| at the detuned points (ω_n0 ± a^h, γ_n0 ± a^h).
template <typename Scalar>
struct DetunedResidualT {
  Scalar plus = 0;
  Scalar minus = 0;
  bool resonant = false;
  Scalar max() const { return std::max(plus, minus); }
};

template <typename Scalar>
DetunedResidualT<Scalar> detuned_residual_scale(Scalar lambda_n, Scalar lambda_n0,
                                                const ResonanceT<Scalar>& res_n0,
                                                const LorentzMediumT<Scalar>& m,
                                                const HostPermittivityT<Scalar>& host, Scalar a,
                                                Scalar h) {
  using std::abs;
  using std::pow;
  if (!(h > 0 && h < 1)) throw InvalidArgument("detuned_residual_scale: h must lie in (0, 1)");
  if (!(a > 0 && a < 1)) throw InvalidArgument("detuned_residual_scale: a must lie in (0, 1)");
  const Scalar d = pow(a, h);
  auto f = [&](Scalar omega, Scalar gamma) {
    return abs(host.value - (host.value - detail::permittivity_unchecked(m, omega, gamma)) * lambda_n);
  };
  DetunedResidualT<Scalar> out;
  out.plus = f(res_n0.omega + d, res_n0.gamma + d);
  out.minus = f(res_n0.omega - d, res_n0.gamma - d);
  out.resonant = abs(lambda_n - lambda_n0) <= Scalar(1e-12);
  return out;
}

/// Diagnostic fallback: bisection on Re f along the curve where Im f = 0.
/// Lorentz model only.
template <typename Scalar>
ResonanceT<Scalar> resonance_by_bisection(Scalar lambda, const HostPermittivityT<Scalar>& host,
                                          const LorentzMediumT<Scalar>& m, int iterations = 200) {
  detail::check_lambda_open(lambda);
  host.validate(m);
  if (m.model != DispersionModel::lorentz)
    throw InvalidArgument("resonance_by_bisection: Lorentz model only");
  const Scalar re_c = host.value.real() * (1 - lambda) + lambda * m.eps_inf;
  auto gamma_on_curve = [&](Scalar omega) {
    return host.value.imag() * (1 - lambda) * (omega * omega - m.omega_0 * m.omega_0) / (re_c * omega);
  };
  auto re_f = [&](Scalar omega) {
    const Scalar g = gamma_on_curve(omega);
    return (host.value - (host.value - detail::lorentz_unchecked(m, omega, g)) * lambda).real();
  };
  const auto sq = bounds(Scalar(0), m);
  Scalar lo = sq.omega_min * (1 + Scalar(1e-12)), hi = sq.omega_max;
  Scalar f_lo = re_f(lo);
  if (f_lo * re_f(hi) > 0) throw NumericalError("resonance_by_bisection: no sign change");
  for (int k = 0; k < iterations && hi - lo > 0; ++k) {
    const Scalar mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    const Scalar f_mid = re_f(mid);
    if ((f_mid < 0) == (f_lo < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  ResonanceT<Scalar> r;
  r.lambda = lambda;
  r.omega = (lo + hi) / 2;
  r.gamma = gamma_on_curve(r.omega);
  r.residual = host.value - (host.value - detail::lorentz_unchecked(m, r.omega, r.gamma)) * lambda;
  return r;
}

}  // namespace plasmo

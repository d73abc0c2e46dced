#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "plasmo/dispersion.hpp"
#include "plasmo/geometry.hpp"
#include "plasmo/spectral.hpp"

namespace plasmo {

/// Spatial profile of Im ε0 over Ω. `bump` scales Im ε0(z) by the smooth
/// radial weight (1 - |y-c|²/R²)², normalized to match at z.
enum class HostProfile { constant, bump };

template <typename Scalar>
struct DomainT {
  Vector3<Scalar> center = Vector3<Scalar>::Zero();
  Scalar radius = 1;

  bool contains(const Vector3<Scalar>& x) const { return (x - center).norm() <= radius; }
};

template <typename Scalar>
struct IncidentWaveT {
  Vector3<Scalar> direction = Vector3<Scalar>::UnitX();
  Vector3<Scalar> polarization = Vector3<Scalar>::UnitZ();
  Scalar amplitude = 1;
};

template <typename Scalar>
struct ScenarioT {
  DomainT<Scalar> domain;
  HostPermittivityT<Scalar> host;
  HostProfile profile = HostProfile::constant;
  Scalar mu = 1;
  LorentzMediumT<Scalar> medium;
  ParticleT<Scalar> particle;
  IncidentWaveT<Scalar> incident;
  Scalar h = Scalar(0.5);

  void validate() const {
    using std::abs;
    if (!(domain.radius > 0)) throw InvalidArgument("scenario: domain radius must be positive");
    if (!(mu > 0)) throw InvalidArgument("scenario: mu must be positive");
    if (!(h > 0 && h < 1)) throw InvalidArgument("scenario: h must lie in (0, 1)");
    medium.validate();
    host.validate(medium);
    particle.validate();
    const Scalar tol = Scalar(1e-9);
    if (abs(incident.direction.norm() - 1) > tol)
      throw InvalidArgument("scenario: incident direction must be a unit vector");
    if (abs(incident.polarization.norm() - 1) > tol)
      throw InvalidArgument("scenario: polarization must be a unit vector");
    if (abs(incident.direction.dot(incident.polarization)) > tol)
      throw InvalidArgument("scenario: polarization must be orthogonal to the direction");
    if ((particle.center - domain.center).norm() + particle.radius() >= domain.radius)
      throw InvalidArgument("scenario: particle must lie strictly inside the domain");
  }
};

template <typename Scalar>
struct ScatteringSummaryT {
  Scalar energy = 0;
  CMatrix3<Scalar> w_integral = CMatrix3<Scalar>::Zero();
  std::vector<std::complex<Scalar>> mode_coeffs;
  /// Index of the near-resonant mode and the modes degenerate with it.
  std::vector<int> resonant_group;
  std::complex<Scalar> residual{};
};

using Domain = DomainT<double>;
using IncidentWave = IncidentWaveT<double>;
using Scenario = ScenarioT<double>;
using ScatteringSummary = ScatteringSummaryT<double>;

template <typename Scalar>
Scalar host_wavenumber(const ScenarioT<Scalar>& s, Scalar omega) {
  using std::sqrt;
  return omega * sqrt(s.mu * s.host.value.real());
}

/// u0(x) = amplitude · q · exp(i k θ·x) with the host wavenumber k.
template <typename Scalar>
CVector3<Scalar> incident_field(const ScenarioT<Scalar>& s, const Vector3<Scalar>& x, Scalar omega) {
  const Scalar phase = host_wavenumber(s, omega) * s.incident.direction.dot(x);
  const std::complex<Scalar> factor = s.incident.amplitude * std::polar(Scalar(1), phase);
  return s.incident.polarization.template cast<std::complex<Scalar>>() * factor;
}

/// Per-mode ⟨ũ1, e_n⟩ = ε0(z) (u0(z)·mean_n) / f_n(ω, γ).
template <typename Scalar>
std::vector<std::complex<Scalar>> mode_projection_solve(const ScenarioT<Scalar>& s, Scalar omega,
                                                        Scalar gamma,
                                                        const std::vector<EigenModeT<Scalar>>& modes) {
  const CVector3<Scalar> u0 = incident_field(s, s.particle.center, omega);
  std::vector<std::complex<Scalar>> coeffs;
  coeffs.reserve(modes.size());
  for (const auto& mode : modes) {
    const std::complex<Scalar> f = dispersion_residual(mode.lambda, s.host, s.medium, omega, gamma);
    if (f == std::complex<Scalar>(0))
      throw NumericalError("exact root hit: evaluate at a detuned frequency (omega_n + a^h)");
    const std::complex<Scalar> projection = u0.dot(mode.mean().template cast<std::complex<Scalar>>());
    coeffs.push_back(s.host.value * projection / f);
  }
  return coeffs;
}

/// Leading-order scattering quantities at (ω, γ). The near-resonant mode is
/// the one with the smallest |f_n|; modes sharing its eigenvalue are summed.
template <typename Scalar>
ScatteringSummaryT<Scalar> scatter(const ScenarioT<Scalar>& s, Scalar omega, Scalar gamma) {
  using std::abs;
  const auto modes = visible_modes(s.particle.shape);
  int best = 0;
  Scalar best_abs = std::numeric_limits<Scalar>::infinity();
  for (int n = 0; n < static_cast<int>(modes.size()); ++n) {
    const Scalar r = abs(dispersion_residual(modes[n].lambda, s.host, s.medium, omega, gamma));
    if (r < best_abs) {
      best_abs = r;
      best = n;
    }
  }
  std::vector<EigenModeT<Scalar>> group;
  ScatteringSummaryT<Scalar> out;
  for (int n = 0; n < static_cast<int>(modes.size()); ++n) {
    if (abs(modes[n].lambda - modes[best].lambda) <= Scalar(1e-14)) {
      group.push_back(modes[n]);
      out.resonant_group.push_back(n);
    }
  }
  out.mode_coeffs = mode_projection_solve(s, omega, gamma, group);
  const Scalar a3 = s.particle.scale * s.particle.scale * s.particle.scale;
  for (const auto& c : out.mode_coeffs) out.energy += std::norm(c);
  out.energy *= a3;

  out.residual = dispersion_residual(group.front().lambda, s.host, s.medium, omega, gamma);
  const std::complex<Scalar> factor = a3 * s.host.value / out.residual;
  for (const auto& mode : group) {
    const Vector3<Scalar> m = mode.mean();
    out.w_integral += (factor * (m * m.transpose()).template cast<std::complex<Scalar>>());
  }
  return out;
}

/// ∫_D |u1|² ≈ a³ |ε0(z)|² Σ |u0(z)·mean_n|² / |f_n|².
template <typename Scalar>
Scalar electric_energy(const ScenarioT<Scalar>& s, Scalar omega, Scalar gamma) {
  return scatter(s, omega, gamma).energy;
}

/// ∫_D W dx ≈ a³ ε0(z)/f_n · Σ mean_n ⊗ mean_n.
template <typename Scalar>
CMatrix3<Scalar> scattering_matrix_integral(const ScenarioT<Scalar>& s, Scalar omega, Scalar gamma) {
  return scatter(s, omega, gamma).w_integral;
}

}  // namespace plasmo

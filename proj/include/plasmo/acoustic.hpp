#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "plasmo/emfield.hpp"

namespace plasmo {

/// Initial pressure f = p(·, 0): a compactly supported particle bump
/// ∝ (1 - r²/a²)⁴ of total mass `particle_mass` around z plus a background
/// density on Ω.
/// Units are chosen so that c_s = 1 and ωβ0/c_p = 1.
struct InitialPressure {
  double particle_mass = 0;
  Vec3 particle_center = Vec3::Zero();
  /// Radius of the support of the particle density (a · max semi-axis).
  double particle_radius = 1e-2;
  /// Evaluate the particle term by quadrature over D instead of in closed form.
  bool resolved = false;

  Domain domain;
  /// Im ε0(z) |u0|², the background density at the particle location.
  double background_level = 0;
  HostProfile profile = HostProfile::constant;
  /// Normalization of the bump profile, (1 - |z-c|²/R²)².
  double profile_norm = 1;

  double particle_density(const Vec3& y) const;
  /// Particle density as a function of the distance r from z.
  double particle_radial(double r) const;
  double background_density(const Vec3& y) const;
  /// Background density as a function of the distance r from the domain center.
  double background_radial(double r) const;
  double density(const Vec3& y) const { return particle_density(y) + background_density(y); }

  InitialPressure without_particle() const {
    InitialPressure copy = *this;
    copy.particle_mass = 0;
    return copy;
  }
};

/// Build the initial pressure of a scenario at (ω, γ). The particle mass is
/// Im ε_p(ω, γ) · ∫_D |u1|²; it carries the sign of Im ε_p.
InitialPressure make_initial_pressure(const Scenario& s, double omega, double gamma,
                                      bool resolved = false);

struct PressureTrace {
  Vec3 detector = Vec3::Zero();
  std::vector<double> times;
  std::vector<double> values;

  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  void validate() const;
};

enum class PressureComponent { all, background, particle };

/// p(x, t) from the spherical-mean representation
/// p = (1/4π) ∂_t [(1/t) ∫_{∂B(x,t)} f dσ]. The background part uses a
/// centered difference with half-width `step`.
double pressure_at(const InitialPressure& ip, const Vec3& x, double t, double step = 1e-4,
                   PressureComponent which = PressureComponent::all);

/// Sample p(x, ·) on t_k = k·dt, k = 0 .. floor(t_max/dt).
PressureTrace sample_trace(const InitialPressure& ip, const Vec3& x, double t_max, double dt,
                           PressureComponent which = PressureComponent::all);

/// p★(x, t_k) for every sample, by composite trapezoid double integration.
std::vector<double> pstar_cumulative(const PressureTrace& trace);

/// p★(x, s) = ∫₀^s r ∫₀^r p(x, t) dt dr from samples; linear interpolation
/// inside the last interval.
double pstar_from_trace(const PressureTrace& trace, double s);

/// p★(x, s) = (1/4π) ∫_{B(x,s)∩Ω} f dy, evaluated directly as a volume integral.
double pstar_volume(const InitialPressure& ip, const Vec3& x, double s);

/// Mass of a radial density ρ(|y - q|) supported in B(q, support) that lies
/// inside B(x, s). Exact for polynomial ρ up to degree ~40 in r.
template <typename Density>
double radial_mass_inside_ball(Density&& rho, const Vec3& q, double support, const Vec3& x,
                               double s);

/// Leading term Im ε_p · ∫_D|u1|² / 4π of p★ - p★0.
double pstar_difference_closed(const Scenario& s, double omega, double gamma, const Vec3& x,
                               double s_time);

struct TraceSet {
  std::vector<PressureTrace> background;
  std::vector<PressureTrace> with_particle;
};

/// Background-only and with-particle traces for each detector on ∂Ω.
TraceSet synthesize_traces(const Scenario& s, const std::vector<Vec3>& detectors, double omega,
                           double gamma, double t_max, double dt, bool resolved = false);

/// Throws unless x lies on ∂Ω (relative tolerance 1e-9).
void require_on_boundary(const Domain& domain, const Vec3& x);

// ----------------------------------------------------------------------------

template <typename Density>
double radial_mass_inside_ball(Density&& rho, const Vec3& q, double support, const Vec3& x,
                               double s) {
  if (!(s > 0) || !(support > 0)) return 0.0;
  const double d = (x - q).norm();
  const double pi = pi_v<double>;
  // Area of ∂B(q, r) inside B(x, s).
  auto area = [&](double r) {
    if (r <= s - d) return 4 * pi * r * r;
    if (r >= s + d || r <= d - s) return 0.0;
    return 2 * pi * r * r - pi * r * (r * r + d * d - s * s) / d;
  };
  std::vector<double> cuts{0.0, support};
  for (double c : {std::abs(s - d), s + d})
    if (c > 0 && c < support) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  const auto& gl = gauss_legendre<double>(24);
  double mass = 0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k + 1] <= cuts[k]) continue;
    mass += gl.integrate(cuts[k], cuts[k + 1], [&](double r) { return rho(r) * area(r); });
  }
  return mass;
}

}  // namespace plasmo

#include "plasmo/acoustic.hpp"

#include <cmath>

#include "plasmo/parallel.hpp"

namespace plasmo {

namespace {

constexpr int kCapOrder = 16;

// g(τ) = J(|τ|)/|τ| · sign(τ), the odd extension of the spherical mean
// integral divided by the radius; smooth through τ = 0.
template <typename Density>
double odd_mean(const Vec3& x, double tau, const Vec3& ball_center, double ball_radius,
                Density&& rho) {
  if (tau == 0) return 0.0;
  const double t = std::abs(tau);
  const double j = sphere_cap_quadrature<double>(x, t, ball_center, ball_radius, rho, kCapOrder, 1);
  return tau > 0 ? j / t : -j / t;
}

template <typename Density>
double differentiate_mean(const Vec3& x, double t, double step, const Vec3& ball_center,
                          double ball_radius, Density&& rho) {
  const double up = odd_mean(x, t + step, ball_center, ball_radius, rho);
  const double down = odd_mean(x, t - step, ball_center, ball_radius, rho);
  return (up - down) / (2 * step) / (4 * pi_v<double>);
}

double particle_pressure(const InitialPressure& ip, const Vec3& x, double t, double step) {
  if (ip.particle_mass == 0) return 0.0;
  const double d = (x - ip.particle_center).norm();
  if (!ip.resolved && d > 0) {
    const double u = std::abs(t - d);
    return -(t - d) * ip.particle_radial(u) / (2 * d);
  }
  auto rho = [&](const Vec3& y) { return ip.particle_radial((y - ip.particle_center).norm()); };
  return differentiate_mean(x, t, step, ip.particle_center, ip.particle_radius, rho);
}

double background_pressure(const InitialPressure& ip, const Vec3& x, double t, double step) {
  if (ip.background_level == 0) return 0.0;
  auto rho = [&](const Vec3& y) { return ip.background_density(y); };
  return differentiate_mean(x, t, step, ip.domain.center, ip.domain.radius, rho);
}

}  // namespace

double InitialPressure::particle_radial(double r) const {
  if (particle_mass == 0 || r > particle_radius) return 0.0;
  // ∫_{B(0,a)} (1 - r²/a²)⁴ dy = 512π a³ / 3465.
  const double a3 = particle_radius * particle_radius * particle_radius;
  const double w = 1 - r * r / (particle_radius * particle_radius);
  return 3465 * particle_mass / (512 * pi_v<double> * a3) * (w * w) * (w * w);
}

double InitialPressure::particle_density(const Vec3& y) const {
  return particle_radial((y - particle_center).norm());
}

double InitialPressure::background_radial(double r) const {
  if (background_level == 0 || r > domain.radius) return 0.0;
  if (profile == HostProfile::constant) return background_level;
  const double w = 1 - r * r / (domain.radius * domain.radius);
  return background_level * w * w / profile_norm;
}

double InitialPressure::background_density(const Vec3& y) const {
  return background_radial((y - domain.center).norm());
}

InitialPressure make_initial_pressure(const Scenario& s, double omega, double gamma, bool resolved) {
  s.validate();
  if (!s.particle.shape.is_spherical())
    throw InvalidArgument("forward amplitude simulation requires a spherical particle");
  InitialPressure ip;
  const Complex eps_p = permittivity(s.medium, omega, gamma);
  ip.particle_mass = eps_p.imag() * electric_energy(s, omega, gamma);
  ip.particle_center = s.particle.center;
  ip.particle_radius = s.particle.radius();
  ip.resolved = resolved;
  ip.domain = s.domain;
  ip.background_level = s.host.value.imag() * s.incident.amplitude * s.incident.amplitude;
  ip.profile = s.profile;
  const double rz = (s.particle.center - s.domain.center).norm() / s.domain.radius;
  ip.profile_norm = (1 - rz * rz) * (1 - rz * rz);
  return ip;
}

void PressureTrace::validate() const {
  if (times.size() != values.size()) throw InvalidArgument("trace: times and values differ in length");
  if (times.size() < 2) throw InvalidArgument("trace: at least two samples required");
  if (times[0] != 0) throw InvalidArgument("trace: first sample must be at t = 0");
  const double dt = step();
  if (!(dt > 0)) throw InvalidArgument("trace: time step must be positive");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, times[k]))
      throw InvalidArgument("trace: time grid must be uniform");
  }
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("trace: non-finite sample");
}

double pressure_at(const InitialPressure& ip, const Vec3& x, double t, double step,
                   PressureComponent which) {
  if (!(t >= 0)) throw InvalidArgument("pressure_at: t must be non-negative");
  if (!(step > 0)) throw InvalidArgument("pressure_at: difference step must be positive");
  const bool want_particle = which != PressureComponent::background;
  const bool want_background = which != PressureComponent::particle;
  if (t == 0) {
    return (want_particle ? ip.particle_density(x) : 0.0) +
           (want_background ? ip.background_density(x) : 0.0);
  }
  double p = 0;
  if (want_particle) p += particle_pressure(ip, x, t, step);
  if (want_background) p += background_pressure(ip, x, t, step);
  return p;
}

PressureTrace sample_trace(const InitialPressure& ip, const Vec3& x, double t_max, double dt,
                           PressureComponent which) {
  if (!(dt > 0)) throw InvalidArgument("sample_trace: dt must be positive");
  if (!(t_max > dt)) throw InvalidArgument("sample_trace: t_max must exceed dt");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  PressureTrace trace;
  trace.detector = x;
  trace.times.resize(n);
  trace.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    trace.times[k] = static_cast<double>(k) * dt;
    trace.values[k] = pressure_at(ip, x, trace.times[k], dt / 10, which);
  }
  return trace;
}

std::vector<double> pstar_cumulative(const PressureTrace& trace) {
  const std::size_t n = trace.values.size();
  std::vector<double> out(n, 0.0);
  double inner = 0, outer = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const double dt = trace.times[k] - trace.times[k - 1];
    const double next_inner = inner + dt * (trace.values[k - 1] + trace.values[k]) / 2;
    outer += dt * (trace.times[k - 1] * inner + trace.times[k] * next_inner) / 2;
    inner = next_inner;
    out[k] = outer;
  }
  return out;
}

double pstar_from_trace(const PressureTrace& trace, double s) {
  if (trace.values.size() < 2 || trace.times.size() != trace.values.size())
    throw InvalidArgument("pstar_from_trace: malformed trace");
  if (!(s >= 0)) throw InvalidArgument("pstar_from_trace: s must be non-negative");
  const double end = trace.t_end();
  if (s > end * (1 + 1e-12)) throw InvalidArgument("pstar_from_trace: s beyond the last sample");
  s = std::min(s, end);
  double inner = 0, outer = 0;
  std::size_t k = 1;
  for (; k < trace.values.size() && trace.times[k] <= s; ++k) {
    const double dt = trace.times[k] - trace.times[k - 1];
    const double next_inner = inner + dt * (trace.values[k - 1] + trace.values[k]) / 2;
    outer += dt * (trace.times[k - 1] * inner + trace.times[k] * next_inner) / 2;
    inner = next_inner;
  }
  if (k < trace.values.size()) {
    const double t0 = trace.times[k - 1];
    const double h = s - t0;
    if (h > 0) {
      const double frac = h / (trace.times[k] - t0);
      const double ps = trace.values[k - 1] + frac * (trace.values[k] - trace.values[k - 1]);
      const double next_inner = inner + h * (trace.values[k - 1] + ps) / 2;
      outer += h * (t0 * inner + s * next_inner) / 2;
    }
  }
  return outer;
}

double pstar_volume(const InitialPressure& ip, const Vec3& x, double s) {
  if (!(s > 0)) throw InvalidArgument("pstar_volume: s must be positive");
  double mass = 0;
  if (ip.particle_mass != 0) {
    mass += radial_mass_inside_ball([&](double r) { return ip.particle_radial(r); },
                                    ip.particle_center, ip.particle_radius, x, s);
  }
  if (ip.background_level != 0) {
    mass += radial_mass_inside_ball([&](double r) { return ip.background_radial(r); },
                                    ip.domain.center, ip.domain.radius, x, s);
  }
  return mass / (4 * pi_v<double>);
}

double pstar_difference_closed(const Scenario& s, double omega, double gamma, const Vec3& x,
                               double s_time) {
  s.validate();
  const double dist = std::max(0.0, (x - s.particle.center).norm() - s.particle.radius());
  if (s_time < s.particle.diameter() + dist)
    throw InvalidArgument("detector radius below arrival threshold");
  const Complex eps_p = permittivity(s.medium, omega, gamma);
  return eps_p.imag() * electric_energy(s, omega, gamma) / (4 * pi_v<double>);
}

void require_on_boundary(const Domain& domain, const Vec3& x) {
  if (std::abs((x - domain.center).norm() - domain.radius) > 1e-9 * domain.radius)
    throw InvalidArgument("detector must lie on the domain boundary");
}

TraceSet synthesize_traces(const Scenario& s, const std::vector<Vec3>& detectors, double omega,
                           double gamma, double t_max, double dt, bool resolved) {
  for (const auto& x : detectors) require_on_boundary(s.domain, x);
  const InitialPressure ip = make_initial_pressure(s, omega, gamma, resolved);
  TraceSet set;
  set.background.resize(detectors.size());
  set.with_particle.resize(detectors.size());
  parallel_for(detectors.size(), [&](std::size_t i) {
    PressureTrace bg = sample_trace(ip, detectors[i], t_max, dt, PressureComponent::background);
    PressureTrace with = sample_trace(ip, detectors[i], t_max, dt, PressureComponent::particle);
    for (std::size_t k = 0; k < with.values.size(); ++k) with.values[k] += bg.values[k];
    set.background[i] = std::move(bg);
    set.with_particle[i] = std::move(with);
  });
  return set;
}

}  // namespace plasmo

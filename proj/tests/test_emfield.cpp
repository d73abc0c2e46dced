#include <doctest.h>

#include <cmath>
#include <random>

#include "plasmo/emfield.hpp"

using namespace plasmo;

namespace {

const double pi = pi_v<double>;

Scenario ball_scenario(double a = 1e-2) {
  Scenario s;
  s.host = HostPermittivity{Complex(2, 0)};
  s.particle.shape = Shape::ball();
  s.particle.center = Vec3::Zero();
  s.particle.scale = a;
  return s;
}

// ω with ε_p(ω, 0) = -3.7 for the unit Lorentz medium; then f = 0.1 at λ = 1/3.
const double omega_residual_tenth = std::sqrt(1 + 1 / 4.7);

Mat3 rotation(double angle, const Vec3& axis) { return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(); }

}  // namespace

TEST_CASE("incident field: value at the origin") {
  Scenario s = ball_scenario();
  s.incident.amplitude = 2.5;
  const CVec3 u = incident_field(s, Vec3::Zero().eval(), 1.3);
  CHECK((u - CVec3(0, 0, 2.5)).norm() < 1e-15);
}

TEST_CASE("incident field: unimodular phase") {
  Scenario s = ball_scenario();
  s.incident.amplitude = 0.7;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) CHECK(incident_field(s, Vec3(u(rng), u(rng), u(rng)), 1.7).norm() == doctest::Approx(0.7));
}

TEST_CASE("incident field: one full period") {
  const Scenario s = ball_scenario();
  const double omega = 1.2;
  const double k = host_wavenumber(s, omega);
  CHECK(k == doctest::Approx(omega * std::sqrt(2.0)));
  const CVec3 u = incident_field(s, Vec3(2 * pi / k, 0, 0), omega);
  CHECK((u - CVec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("mode projection: orthogonal polarization gives zero coefficients") {
  const Scenario s = ball_scenario();
  auto modes = visible_modes(s.particle.shape);
  modes.pop_back();  // keep ê1, ê2; u0(z) = ê3
  for (const Complex& c : mode_projection_solve(s, omega_residual_tenth, 0.0, modes)) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("mode projection: single ball mode") {
  const Scenario s = ball_scenario();
  const auto modes = visible_modes(s.particle.shape);
  const auto coeffs = mode_projection_solve(s, omega_residual_tenth, 0.0, {modes[2]});
  REQUIRE(coeffs.size() == 1);
  const double mean = ball_mode_mean_magnitude();
  CHECK(std::abs(coeffs[0] - Complex(2 * mean / 0.1, 0)) < 1e-12);
}

TEST_CASE("mode projection: linear in the incident amplitude") {
  Scenario s = ball_scenario();
  s.incident.polarization = Vec3(1, 1, 0).normalized();
  s.incident.direction = Vec3(0, 0, 1);
  const auto modes = visible_modes(s.particle.shape);
  const auto c1 = mode_projection_solve(s, 1.15, 0.02, modes);
  s.incident.amplitude = 3;
  const auto c3 = mode_projection_solve(s, 1.15, 0.02, modes);
  for (std::size_t n = 0; n < modes.size(); ++n) CHECK(std::abs(c3[n] - 3.0 * c1[n]) < 1e-13 * std::abs(c3[n]) + 1e-300);
}

TEST_CASE("mode projection: exact root is rejected") {
  // ε_p(2.5, 0) = 1 + 4 / (2.25 - 6.25) = 0 exactly, and f = ε_p at λ = 1.
  Scenario s = ball_scenario();
  s.medium = LorentzMedium{1.0, 2.0, 1.5};
  EigenMode mode;
  mode.lambda = 1.0;
  mode.mean_magnitude = 1.0;
  CHECK_THROWS_WITH_AS(mode_projection_solve(s, 2.5, 0.0, {mode}),
                       "exact root hit: evaluate at a detuned frequency (omega_n + a^h)", NumericalError);
}

TEST_CASE("electric energy: hand value") {
  const double a = 1e-2;
  const Scenario s = ball_scenario(a);
  const double expected = a * a * a * 4 * (4 * pi / 243) / 0.01;
  CHECK(electric_energy(s, omega_residual_tenth, 0.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("electric energy: a³ scaling") {
  const double e1 = electric_energy(ball_scenario(1e-2), 1.1, 0.03);
  const double e2 = electric_energy(ball_scenario(2e-2), 1.1, 0.03);
  CHECK(e2 / e1 == doctest::Approx(8).epsilon(1e-12));
}

TEST_CASE("electric energy: equals the sum of squared mode coefficients") {
  Scenario s = ball_scenario(3e-3);
  s.host = HostPermittivity{Complex(2.4, 0.3)};
  s.particle.center = Vec3(0.2, -0.1, 0.3);
  s.incident.direction = Vec3(1, 2, 2).normalized();
  s.incident.polarization = Vec3(2, -1, 0).normalized();
  const auto summary = scatter(s, 1.12, 0.05);
  const auto coeffs = mode_projection_solve(s, 1.12, 0.05, visible_modes(s.particle.shape));
  double sum = 0;
  for (const Complex& c : coeffs) sum += std::norm(c);
  CHECK(std::abs(sum * std::pow(3e-3, 3) - summary.energy) < 1e-12 * summary.energy);
  CHECK(summary.resonant_group.size() == 3);
}

TEST_CASE("electric energy: zero exactly when u0(z) is orthogonal to every mean") {
  Scenario s = ball_scenario();
  s.incident.amplitude = 0;
  CHECK(electric_energy(s, 1.1, 0.02) == 0.0);
  CHECK(electric_energy(ball_scenario(), 1.1, 0.02) > 0.0);
}

TEST_CASE("scattering matrix: ball gives a multiple of the identity") {
  const double a = 1e-2;
  const Scenario s = ball_scenario(a);
  const CMat3 w = scattering_matrix_integral(s, omega_residual_tenth, 0.0);
  const Complex scalar = 4 * pi / 243 * a * a * a * 2.0 / 0.1;
  CHECK((w - scalar * CMat3::Identity()).norm() < 1e-12 * std::abs(scalar));
  CHECK((w - w.transpose()).norm() == 0.0);
}

TEST_CASE("scattering matrix: Frobenius norm scales as a³/|f|") {
  const Scenario s1 = ball_scenario(1e-2), s2 = ball_scenario(2e-2);
  const auto w1 = scatter(s1, 1.1, 0.03);
  const auto w2 = scatter(s2, 1.2, 0.01);
  const double k1 = w1.w_integral.norm() * std::abs(w1.residual) / std::pow(1e-2, 3);
  const double k2 = w2.w_integral.norm() * std::abs(w2.residual) / std::pow(2e-2, 3);
  CHECK(k1 == doctest::Approx(k2).epsilon(1e-12));
}

TEST_CASE("electric energy: rotation invariance for the ball") {
  Scenario s = ball_scenario();
  s.host = HostPermittivity{Complex(2, 0.2)};
  const double e0 = electric_energy(s, 1.1, 0.02);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 10; ++k) {
    const Mat3 r = rotation(3 * u(rng), Vec3(u(rng), u(rng), u(rng)));
    Scenario t = s;
    t.incident.direction = r * s.incident.direction;
    t.incident.polarization = r * s.incident.polarization;
    CHECK(electric_energy(t, 1.1, 0.02) == doctest::Approx(e0).epsilon(1e-12));
  }
}

namespace {

double energy_slope(const LorentzMedium& m, const std::vector<double>& exponents, double h) {
  const HostPermittivity host{Complex(2, 0.2)};
  const Resonance r = resonance(1.0 / 3.0, host, m);
  std::vector<double> la, le;
  for (double e : exponents) {
    const double a = std::pow(10.0, e);
    Scenario s = ball_scenario(a);
    s.host = host;
    s.medium = m;
    la.push_back(std::log(a));
    le.push_back(std::log(electric_energy(s, r.omega + std::pow(a, h), r.gamma)));
  }
  return (le.back() - le.front()) / (la.back() - la.front());
}

}  // namespace

TEST_CASE("electric energy: resonant amplification slope 3 - 2h") {
  // a^h must be small against the resonance width; ω_p = 5 gives that at a = 1e-2.
  CHECK(std::abs(energy_slope(LorentzMedium{1.0, 5.0, 1.0}, {-2.0, -2.5, -3.0}, 0.5) - 2) < 0.05);
  // The unit medium has a narrow resonance and reaches the same slope at smaller a.
  CHECK(std::abs(energy_slope(LorentzMedium{}, {-6.0, -6.5, -7.0}, 0.5) - 2) < 0.05);
  CHECK(std::abs(energy_slope(LorentzMedium{1.0, 5.0, 1.0}, {-4.0, -4.5, -5.0}, 0.3) - 2.4) < 0.05);
}

TEST_CASE("scenario validation") {
  Scenario s = ball_scenario();
  CHECK_NOTHROW(s.validate());
  Scenario t = s;
  t.incident.polarization = Vec3(1, 0, 1).normalized();
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t = s;
  t.h = 1.0;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  t = s;
  t.particle.center = Vec3(0.995, 0, 0);
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

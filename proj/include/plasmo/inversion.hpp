#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plasmo/acoustic.hpp"

namespace plasmo {

/// I_z(ω, γ) = |p★ - p★0|.
inline double indicator(double pstar_with, double pstar_without) {
  return std::abs(pstar_with - pstar_without);
}

/// Indicator samples; values(i, j) belongs to (omegas[i], gammas[j]).
struct IndicatorGrid {
  std::vector<double> omegas;
  std::vector<double> gammas;
  Eigen::MatrixXd values;

  bool empty() const { return omegas.empty() || gammas.empty(); }
  void validate() const;
};

/// Cell-centered grid of n points strictly inside (lo, hi).
std::vector<double> cell_centers(double lo, double hi, int n);

/// First s where the curve reaches √(floor · plateau); the floor is the
/// largest pre-arrival value and the plateau is the final value.
double estimate_distance(const std::vector<double>& s, const std::vector<double>& curve,
                         double a_hint);

struct Trilateration {
  Vec3 position = Vec3::Zero();
  /// Root mean square of | |x_i - ẑ| - d_i |.
  double residual = 0;
};

/// Intersection of spheres |y - points[i]| = dists[i]. With three spheres
/// the mirror solution is rejected by requiring ẑ ∈ Ω.
Trilateration trilaterate(const std::vector<Vec3>& points, const std::vector<double>& dists,
                          const Domain& domain, double a_hint);

struct Peak {
  double omega = 0;
  double gamma = 0;
  double prominence = 0;
  double value = 0;
  int i = 0;
  int j = 0;
};

inline constexpr double kDefaultProminence = 0.05;

/// Strict 8-neighbour local maxima with prominence ≥ rho · max, sorted by ω.
std::vector<Peak> detect_peaks(const IndicatorGrid& grid, double rho = kDefaultProminence);

/// Quadratic refinement of a peak along ω, clamped to half a cell.
double refine_omega(const IndicatorGrid& grid, const Peak& peak);

struct MatchedPeak {
  Peak peak;
  double lambda = 0;
};

/// Order-preserving assignment of peaks to sorted, distinct eigenvalues.
/// With fewer peaks than eigenvalues, `omega_of_lambda` ranks the injections.
std::vector<MatchedPeak> match_eigenvalues(const std::vector<Peak>& peaks,
                                           const std::vector<double>& lambdas,
                                           const std::function<double(double)>& omega_of_lambda = {});

/// ε0(z) = -ε_p λ / (1 - λ).
Complex recover_permittivity(double lambda, Complex eps_p);

/// Distinct visible eigenvalues of a shape, ascending.
std::vector<double> distinct_eigenvalues(const Shape& shape);

struct TracePair {
  PressureTrace with_particle;
  PressureTrace background;
};

/// Measurements consumed by the pipeline. Sweep traces are recorded at
/// detector 0.
class MeasurementSource {
 public:
  virtual ~MeasurementSource() = default;
  virtual std::size_t detector_count() const = 0;
  virtual Vec3 detector(std::size_t i) const = 0;
  /// Traces at the probe frequency, used for localization.
  virtual TracePair probe(std::size_t i) const = 0;
  /// Traces at (ω, γ) covering at least [0, t_max].
  virtual TracePair sweep(double omega, double gamma, double t_max) const = 0;
  /// True when sweep() accepts arbitrary (ω, γ), not only the recorded grid.
  virtual bool on_demand() const { return false; }
};

/// Forward-model measurements generated from a scenario on request.
class SyntheticSource : public MeasurementSource {
 public:
  SyntheticSource(Scenario scenario, std::vector<Vec3> detectors, double probe_omega,
                  double probe_gamma, double t_max, double dt, bool resolved = false);

  std::size_t detector_count() const override { return detectors_.size(); }
  Vec3 detector(std::size_t i) const override { return detectors_.at(i); }
  TracePair probe(std::size_t i) const override;
  TracePair sweep(double omega, double gamma, double t_max) const override;
  bool on_demand() const override { return true; }

  const Scenario& scenario() const { return scenario_; }
  /// Particle mass Im ε_p ∫_D|u1|² at (ω, γ).
  double particle_mass(double omega, double gamma) const;

 private:
  TracePair assemble(std::size_t i, double mass, std::size_t samples) const;

  Scenario scenario_;
  std::vector<Vec3> detectors_;
  double probe_omega_, probe_gamma_;
  std::vector<PressureTrace> background_;
  std::vector<PressureTrace> unit_particle_;
};

struct PipelineConfig {
  Domain domain;
  LorentzMedium medium;
  Shape shape_prior = Shape::ball();
  double a_hint = 1e-2;
  double h = 0.5;
  /// sup over Ω of Im ε0 / Re ε0; 0 selects the lossless floor.
  double loss_bound = 0;
  int n_omega = 200;
  int n_gamma = 50;
  /// Sweep ω only, at this fixed damping.
  std::optional<double> gamma_fixed;
  double prominence = kDefaultProminence;
  /// Refine each coarse peak by line searches; the ω window starts at a^h·(ω_max - ω_min).
  bool zoom = true;
  int zoom_omega = 41;
  int zoom_gamma = 21;
  /// Optional host value used only to rank partial eigenvalue assignments.
  std::optional<HostPermittivity> host_prior;
};

struct PeakRecovery {
  double omega_star = 0;
  double gamma_star = 0;
  double lambda = 0;
  double prominence = 0;
  Complex eps_p{};
  Complex eps0{};
};

struct RecoveryReport {
  Vec3 z_hat = Vec3::Zero();
  std::vector<double> distance_estimates;
  double trilateration_residual = 0;
  double s_indicator = 0;
  SweepSquare square;
  IndicatorGrid grid;
  std::vector<PeakRecovery> peaks;
};

/// Sweep square used by the pipeline for a configuration.
SweepSquare pipeline_square(const PipelineConfig& cfg);

/// Indicator over the given axes using sweep traces at s.
IndicatorGrid evaluate_grid(const MeasurementSource& source, const std::vector<double>& omegas,
                            const std::vector<double>& gammas, double s);

/// Localization, sweep, peak detection, eigenvalue matching and recovery.
/// Stage failures are reported as PipelineError.
RecoveryReport run_pipeline(const MeasurementSource& source, const PipelineConfig& cfg);

/// ẑ and distance estimates from probe traces (the localization stage alone).
RecoveryReport localize(const MeasurementSource& source, const PipelineConfig& cfg);

}  // namespace plasmo

#include "plasmo/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "plasmo/parallel.hpp"

namespace plasmo {

void IndicatorGrid::validate() const {
  if (empty()) throw InvalidArgument("indicator grid is empty");
  if (values.rows() != static_cast<Eigen::Index>(omegas.size()) ||
      values.cols() != static_cast<Eigen::Index>(gammas.size()))
    throw InvalidArgument("indicator grid: value matrix does not match the axes");
  if (!std::is_sorted(omegas.begin(), omegas.end()) || !std::is_sorted(gammas.begin(), gammas.end()))
    throw InvalidArgument("indicator grid: axes must be increasing");
  if (!values.allFinite() || (values.array() < 0).any())
    throw InvalidArgument("indicator grid: values must be finite and non-negative");
}

std::vector<double> cell_centers(double lo, double hi, int n) {
  if (n < 1) throw InvalidArgument("grid size must be >= 1");
  if (!(hi > lo)) throw InvalidArgument("grid interval is empty");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = (hi - lo) / n;
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + (k + 0.5) * step;
  return out;
}

double estimate_distance(const std::vector<double>& s, const std::vector<double>& curve,
                         double a_hint) {
  if (s.size() != curve.size() || s.size() < 2)
    throw InvalidArgument("estimate_distance: curve needs at least two matching samples");
  if (!(a_hint > 0)) throw InvalidArgument("estimate_distance: a_hint must be positive");
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!(s[k] - s[k - 1] < a_hint))
      throw InvalidArgument("estimate_distance: s grid must be finer than a_hint");

  std::vector<double> c(curve.size());
  std::transform(curve.begin(), curve.end(), c.begin(), [](double v) { return std::abs(v); });
  const double plateau = c.back();
  if (!(plateau > 0)) throw NumericalError("no particle signature");

  std::size_t rough = 0;
  while (rough < c.size() && c[rough] < 1e-3 * plateau) ++rough;
  // p★ vanishes at s = 0, so a curve without a quiet start has no arrival.
  if (rough == 0) throw NumericalError("no particle signature");
  double floor = 0;
  for (std::size_t k = 0; k < c.size() && s[k] <= s[rough] - 2 * a_hint; ++k)
    floor = std::max(floor, c[k]);
  floor = std::max(floor, 1e-12 * plateau);
  if (plateau <= 10 * floor) throw NumericalError("no particle signature");

  const double threshold = std::sqrt(floor * plateau);
  std::size_t k = 0;
  while (c[k] < threshold) ++k;
  if (k == 0) return s[0];
  const double frac = (threshold - c[k - 1]) / (c[k] - c[k - 1]);
  return s[k - 1] + frac * (s[k] - s[k - 1]);
}

namespace {

Vec3 gauss_newton(const std::vector<Vec3>& points, const std::vector<double>& dists, Vec3 y) {
  const auto n = static_cast<Eigen::Index>(points.size());
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::MatrixXd J(n, 3);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec3 diff = y - points[static_cast<std::size_t>(i)];
      const double len = diff.norm();
      if (len == 0) return y;
      J.row(i) = diff.transpose() / len;
      r(i) = len - dists[static_cast<std::size_t>(i)];
    }
    const Vec3 delta = J.colPivHouseholderQr().solve(-r);
    y += delta;
    if (delta.norm() <= 1e-15 * std::max(1.0, y.norm())) break;
  }
  return y;
}

double rms_residual(const std::vector<Vec3>& points, const std::vector<double>& dists, const Vec3& y) {
  double sum = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = (y - points[i]).norm() - dists[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

}  // namespace

Trilateration trilaterate(const std::vector<Vec3>& points, const std::vector<double>& dists,
                          const Domain& domain, double a_hint) {
  if (points.size() < 3 || points.size() != dists.size())
    throw InvalidArgument("trilaterate: need at least three points with distances");
  if (!(a_hint > 0)) throw InvalidArgument("trilaterate: a_hint must be positive");
  const auto rows = static_cast<Eigen::Index>(points.size() - 1);
  Eigen::MatrixXd A(rows, 3);
  Eigen::VectorXd b(rows);
  const Vec3& p0 = points[0];
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Vec3& pi = points[static_cast<std::size_t>(i + 1)];
    A.row(i) = 2 * (pi - p0).transpose();
    b(i) = dists[0] * dists[0] - dists[static_cast<std::size_t>(i + 1)] * dists[static_cast<std::size_t>(i + 1)] +
           pi.squaredNorm() - p0.squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double tol = 1e-9 * sigma(0);
  if (sigma.size() < 2 || sigma(1) <= tol) throw NumericalError("trilateration degenerate");

  std::vector<Vec3> candidates;
  if (sigma.size() >= 3 && sigma(2) > tol) {
    candidates.push_back(svd.solve(b));
  } else {
    // Solutions form a line y0 + τ n; intersect it with the first sphere.
    svd.setThreshold(1e-9);
    const Vec3 y0 = svd.solve(b);
    const Vec3 n = svd.matrixV().col(2);
    const Vec3 w = y0 - p0;
    const double half_b = n.dot(w);
    double disc = half_b * half_b - (w.squaredNorm() - dists[0] * dists[0]);
    if (disc < 0) {
      if (std::sqrt(-disc) > 10 * a_hint) throw NumericalError("trilateration: inconsistent spheres");
      disc = 0;
    }
    const double root = std::sqrt(disc);
    candidates.push_back(y0 + (-half_b + root) * n);
    candidates.push_back(y0 + (-half_b - root) * n);
  }

  std::vector<Trilateration> inside;
  for (const auto& c : candidates) {
    Trilateration t;
    t.position = gauss_newton(points, dists, c);
    t.residual = rms_residual(points, dists, t.position);
    if (candidates.size() == 1 || domain.contains(t.position)) inside.push_back(t);
  }
  if (inside.empty()) throw NumericalError("trilateration: no solution inside the domain");
  if (inside.size() > 1) {
    if ((inside[0].position - inside[1].position).norm() > 10 * a_hint)
      throw NumericalError("trilateration ambiguous: mirror solution also lies inside the domain");
    inside.resize(1);
  }
  if (inside[0].residual > 10 * a_hint) throw NumericalError("trilateration: inconsistent spheres");
  return inside[0];
}

std::vector<Peak> detect_peaks(const IndicatorGrid& grid, double rho) {
  if (grid.empty() || grid.values.size() == 0) throw InvalidArgument("detect_peaks: empty grid");
  const auto& v = grid.values;
  const int ni = static_cast<int>(v.rows());
  const int nj = static_cast<int>(v.cols());
  const double vmax = v.maxCoeff();
  const double vmin = v.minCoeff();
  std::vector<Peak> peaks;
  if (!(vmax > 0)) return peaks;

  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < nj; ++j) {
      const double value = v(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di)
        for (int dj = -1; dj <= 1 && strict; ++dj) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= ni || b >= nj) continue;
          if (v(a, b) >= value) strict = false;
        }
      if (!strict) continue;

      // Lowest point on the way to higher ground along each axis ray.
      bool found_higher = false;
      double key = -std::numeric_limits<double>::infinity();
      const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& d : dirs) {
        double low = value;
        for (int a = i + d[0], b = j + d[1]; a >= 0 && b >= 0 && a < ni && b < nj;
             a += d[0], b += d[1]) {
          if (v(a, b) > value) {
            found_higher = true;
            key = std::max(key, low);
            break;
          }
          low = std::min(low, v(a, b));
        }
      }
      const double prominence = found_higher ? value - key : value - vmin;
      if (prominence < rho * vmax) continue;
      peaks.push_back({grid.omegas[static_cast<std::size_t>(i)], grid.gammas[static_cast<std::size_t>(j)],
                       prominence, value, i, j});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    return a.omega != b.omega ? a.omega < b.omega : a.gamma < b.gamma;
  });
  return peaks;
}

double refine_omega(const IndicatorGrid& grid, const Peak& peak) {
  const int n = static_cast<int>(grid.omegas.size());
  if (peak.i <= 0 || peak.i >= n - 1) return peak.omega;
  const double lo = grid.values(peak.i - 1, peak.j);
  const double mid = grid.values(peak.i, peak.j);
  const double hi = grid.values(peak.i + 1, peak.j);
  const double curvature = lo - 2 * mid + hi;
  if (!(curvature < 0)) return peak.omega;
  const double step = grid.omegas[static_cast<std::size_t>(peak.i + 1)] - grid.omegas[static_cast<std::size_t>(peak.i)];
  const double offset = std::clamp(0.5 * (lo - hi) / curvature, -0.5, 0.5);
  return peak.omega + offset * step;
}

std::vector<MatchedPeak> match_eigenvalues(const std::vector<Peak>& peaks,
                                           const std::vector<double>& lambdas,
                                           const std::function<double(double)>& omega_of_lambda) {
  if (peaks.size() > lambdas.size()) throw InvalidArgument("more peaks than visible modes");
  if (!std::is_sorted(lambdas.begin(), lambdas.end()))
    throw InvalidArgument("match_eigenvalues: eigenvalues must be sorted");
  std::vector<Peak> sorted = peaks;
  std::sort(sorted.begin(), sorted.end(), [](const Peak& a, const Peak& b) {
    return a.omega != b.omega ? a.omega < b.omega : a.gamma < b.gamma;
  });
  const std::size_t k = sorted.size();
  const std::size_t n = lambdas.size();
  std::vector<MatchedPeak> out;
  if (k == 0) return out;
  if (k == n) {
    for (std::size_t i = 0; i < k; ++i) out.push_back({sorted[i], lambdas[i]});
    return out;
  }
  if (!omega_of_lambda)
    throw InvalidArgument("ambiguous eigenvalue matching: fewer peaks than modes and no host prior");

  std::vector<double> omega_n(n);
  for (std::size_t m = 0; m < n; ++m) omega_n[m] = omega_of_lambda(lambdas[m]);
  // Enumerate order-preserving injections as k-subsets of the eigenvalues.
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best;
  do {
    std::vector<std::size_t> chosen;
    for (std::size_t m = 0; m < n; ++m)
      if (mask[m]) chosen.push_back(m);
    double cost = 0;
    for (std::size_t i = 0; i < k; ++i) cost += std::abs(sorted[i].omega - omega_n[chosen[i]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = chosen;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  for (std::size_t i = 0; i < k; ++i) out.push_back({sorted[i], lambdas[best[i]]});
  return out;
}

Complex recover_permittivity(double lambda, Complex eps_p) {
  if (!(lambda > 0 && lambda < 1)) throw InvalidArgument("recover_permittivity: lambda must lie in (0, 1)");
  return -eps_p * lambda / (1 - lambda);
}

std::vector<double> distinct_eigenvalues(const Shape& shape) {
  std::vector<double> out;
  for (const auto& mode : visible_modes(shape))
    if (out.empty() || std::abs(mode.lambda - out.back()) > 1e-12) out.push_back(mode.lambda);
  return out;
}

SyntheticSource::SyntheticSource(Scenario scenario, std::vector<Vec3> detectors, double probe_omega,
                                 double probe_gamma, double t_max, double dt, bool resolved)
    : scenario_(std::move(scenario)),
      detectors_(std::move(detectors)),
      probe_omega_(probe_omega),
      probe_gamma_(probe_gamma) {
  for (const auto& x : detectors_) require_on_boundary(scenario_.domain, x);
  InitialPressure ip = make_initial_pressure(scenario_, probe_omega_, probe_gamma_, resolved);
  ip.particle_mass = 1;
  background_.resize(detectors_.size());
  unit_particle_.resize(detectors_.size());
  parallel_for(detectors_.size(), [&](std::size_t i) {
    background_[i] = sample_trace(ip, detectors_[i], t_max, dt, PressureComponent::background);
    unit_particle_[i] = sample_trace(ip, detectors_[i], t_max, dt, PressureComponent::particle);
  });
}

double SyntheticSource::particle_mass(double omega, double gamma) const {
  return permittivity(scenario_.medium, omega, gamma).imag() * electric_energy(scenario_, omega, gamma);
}

TracePair SyntheticSource::assemble(std::size_t i, double mass, std::size_t samples) const {
  const PressureTrace& bg = background_.at(i);
  const PressureTrace& unit = unit_particle_.at(i);
  samples = std::min(samples, bg.values.size());
  TracePair pair;
  pair.background.detector = bg.detector;
  pair.background.times.assign(bg.times.begin(), bg.times.begin() + static_cast<std::ptrdiff_t>(samples));
  pair.background.values.assign(bg.values.begin(), bg.values.begin() + static_cast<std::ptrdiff_t>(samples));
  pair.with_particle = pair.background;
  for (std::size_t k = 0; k < samples; ++k) pair.with_particle.values[k] += mass * unit.values[k];
  return pair;
}

TracePair SyntheticSource::probe(std::size_t i) const {
  return assemble(i, particle_mass(probe_omega_, probe_gamma_), background_.at(i).values.size());
}

TracePair SyntheticSource::sweep(double omega, double gamma, double t_max) const {
  const PressureTrace& bg = background_.at(0);
  if (t_max > bg.t_end()) throw InvalidArgument("sweep: requested time window exceeds the recording");
  const auto samples = static_cast<std::size_t>(std::ceil(t_max / bg.step())) + 2;
  return assemble(0, particle_mass(omega, gamma), samples);
}

SweepSquare pipeline_square(const PipelineConfig& cfg) { return bounds(cfg.loss_bound, cfg.medium); }

IndicatorGrid evaluate_grid(const MeasurementSource& source, const std::vector<double>& omegas,
                            const std::vector<double>& gammas, double s) {
  IndicatorGrid grid;
  grid.omegas = omegas;
  grid.gammas = gammas;
  grid.values.resize(static_cast<Eigen::Index>(omegas.size()), static_cast<Eigen::Index>(gammas.size()));
  const std::size_t ng = gammas.size();
  parallel_for(omegas.size() * ng, [&](std::size_t idx) {
    const std::size_t i = idx / ng, j = idx % ng;
    const TracePair pair = source.sweep(omegas[i], gammas[j], s);
    grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        indicator(pstar_from_trace(pair.with_particle, s), pstar_from_trace(pair.background, s));
  });
  return grid;
}

namespace {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(stage, e.what());
  }
}

}  // namespace

// Alternating line searches around a coarse peak: ω over a window of
// half-width a^h·(ω_max - ω_min), shrinking each round, then γ over the
// whole damping range followed by a one-cell zoom.
std::pair<double, double> refine_peak(const MeasurementSource& source, const PipelineConfig& cfg,
                                      const SweepSquare& sq, double s, const Peak& coarse) {
  double omega = coarse.omega, gamma = coarse.gamma;
  double w_omega = std::pow(cfg.a_hint, cfg.h) * (sq.omega_max - sq.omega_min);
  const bool one_d = cfg.gamma_fixed.has_value();
  auto argmax = [](const IndicatorGrid& g) {
    Eigen::Index bi = 0, bj = 0;
    g.values.maxCoeff(&bi, &bj);
    return Peak{g.omegas[static_cast<std::size_t>(bi)], g.gammas[static_cast<std::size_t>(bj)], 0.0,
                g.values(bi, bj), static_cast<int>(bi), static_cast<int>(bj)};
  };
  for (int round = 0; round < 3; ++round, w_omega /= 4) {
    const double lo = std::max(sq.omega_min, omega - w_omega);
    const double hi = std::min(sq.omega_max, omega + w_omega);
    const IndicatorGrid line = evaluate_grid(source, cell_centers(lo, hi, cfg.zoom_omega), {gamma}, s);
    omega = refine_omega(line, argmax(line));
    if (one_d) continue;
    const IndicatorGrid column = evaluate_grid(source, {omega}, cell_centers(0.0, sq.gamma_max, cfg.n_gamma), s);
    const double cell = sq.gamma_max / cfg.n_gamma;
    const double g0 = argmax(column).gamma;
    const IndicatorGrid fine = evaluate_grid(
        source, {omega}, cell_centers(std::max(0.0, g0 - cell), std::min(sq.gamma_max, g0 + cell), cfg.zoom_gamma), s);
    gamma = argmax(fine).gamma;
  }
  return {omega, gamma};
}

RecoveryReport localize(const MeasurementSource& source, const PipelineConfig& cfg) {
  RecoveryReport report;
  const std::size_t n = source.detector_count();
  if (n < 3) throw PipelineError("localization", "at least three detectors are required");
  const double rmax = cfg.shape_prior.max_axis();
  std::vector<Vec3> points(n);
  std::vector<double> center_dists(n);
  report.distance_estimates.resize(n);
  run_stage("localization", [&] {
    for (std::size_t i = 0; i < n; ++i) {
      const TracePair pair = source.probe(i);
      pair.with_particle.validate();
      pair.background.validate();
      const auto with = pstar_cumulative(pair.with_particle);
      const auto without = pstar_cumulative(pair.background);
      std::vector<double> diff(with.size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = indicator(with[k], without[k]);
      points[i] = source.detector(i);
      report.distance_estimates[i] = estimate_distance(pair.background.times, diff, cfg.a_hint);
      center_dists[i] = report.distance_estimates[i] + cfg.a_hint * rmax;
    }
    return 0;
  });
  const Trilateration tri =
      run_stage("trilateration", [&] { return trilaterate(points, center_dists, cfg.domain, cfg.a_hint); });
  report.z_hat = tri.position;
  report.trilateration_residual = tri.residual;
  return report;
}

RecoveryReport run_pipeline(const MeasurementSource& source, const PipelineConfig& cfg) {
  RecoveryReport report = localize(source, cfg);
  const double rmax = cfg.shape_prior.max_axis();
  const double dist0 = std::max(0.0, (source.detector(0) - report.z_hat).norm() - cfg.a_hint * rmax);
  const double s = 1.1 * (dist0 + 2 * cfg.a_hint * rmax);
  report.s_indicator = s;

  report.square = run_stage("sweep", [&] { return pipeline_square(cfg); });
  const SweepSquare& sq = report.square;
  const bool one_d = cfg.gamma_fixed.has_value();
  const std::vector<double> omegas = run_stage("sweep", [&] { return cell_centers(sq.omega_min, sq.omega_max, cfg.n_omega); });
  const std::vector<double> gammas =
      one_d ? std::vector<double>{*cfg.gamma_fixed}
            : run_stage("sweep", [&] { return cell_centers(0.0, sq.gamma_max, cfg.n_gamma); });
  report.grid = run_stage("sweep", [&] { return evaluate_grid(source, omegas, gammas, s); });

  const auto peaks = run_stage("peaks", [&] { return detect_peaks(report.grid, cfg.prominence); });
  if (peaks.empty()) throw PipelineError("peaks", "no resonance peak detected");

  const auto lambdas = run_stage("matching", [&] { return distinct_eigenvalues(cfg.shape_prior); });
  std::function<double(double)> omega_of_lambda;
  if (cfg.host_prior) {
    omega_of_lambda = [&](double lambda) { return resonance(lambda, *cfg.host_prior, cfg.medium).omega; };
  }
  const auto matches = run_stage("matching", [&] { return match_eigenvalues(peaks, lambdas, omega_of_lambda); });

  run_stage("recovery", [&] {
    for (const auto& m : matches) {
      PeakRecovery rec;
      rec.lambda = m.lambda;
      rec.prominence = m.peak.prominence;
      if (cfg.zoom && source.on_demand()) {
        std::tie(rec.omega_star, rec.gamma_star) = refine_peak(source, cfg, sq, s, m.peak);
      } else {
        rec.omega_star = refine_omega(report.grid, m.peak);
        rec.gamma_star = m.peak.gamma;
      }
      rec.eps_p = permittivity(cfg.medium, rec.omega_star, rec.gamma_star);
      rec.eps0 = recover_permittivity(rec.lambda, rec.eps_p);
      report.peaks.push_back(rec);
    }
    return 0;
  });
  return report;
}

}  // namespace plasmo

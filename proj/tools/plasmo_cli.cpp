#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plasmo/io.hpp"

namespace fs = std::filesystem;
using namespace plasmo;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;

struct Options {
  std::string scenario;
  std::string out;
  std::string traces;
  std::optional<double> gamma_fixed;
  bool drude = false;
  bool resolve_particle = false;
  bool ball = false;
  std::vector<double> ellipsoid;
  std::size_t detector = 0;
  // dispersion without a scenario file
  double eps0_real = 2, eps0_imag = 0, eps_inf = 1, omega_p = 1, omega_0 = 1;
  int samples = 0;
};

Shape shape_from(const Options& o) {
  if (!o.ellipsoid.empty()) {
    if (o.ellipsoid.size() != 3) throw InvalidArgument("--ellipsoid takes three semi-axes");
    return Shape::ellipsoid(o.ellipsoid[0], o.ellipsoid[1], o.ellipsoid[2]);
  }
  return Shape::ball();
}

ScenarioFile load(const Options& o) {
  if (o.scenario.empty()) throw InvalidArgument("--scenario is required");
  ScenarioFile file = load_scenario(o.scenario);
  if (o.drude) file.scenario.medium.model = DispersionModel::drude;
  if (o.gamma_fixed) file.numerics.gamma_fixed = o.gamma_fixed;
  file.validate();
  return file;
}

// Writes to --out when given, otherwise to stdout.
template <typename Writer>
void emit(const std::string& out_path, Writer&& write) {
  if (out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InvalidArgument("cannot write " + out_path);
  write(out);
}

void cmd_spectrum(const Options& o) {
  const Shape shape = shape_from(o);
  const auto tensor = magnetization_tensor(shape);
  emit(o.out, [&](std::ostream& out) {
    out << "axis,lambda,N,mean\n";
    for (const auto& mode : visible_modes(shape)) {
      out << mode.axis + 1 << ',' << format_double(mode.lambda) << ',' << format_double(tensor.diag[mode.axis]) << ','
          << (mode.mean_known() ? format_double(*mode.mean_magnitude) : std::string("UNKNOWN")) << '\n';
    }
  });
}

void cmd_dispersion(const Options& o) {
  HostPermittivity host;
  LorentzMedium medium;
  Shape shape = shape_from(o);
  if (!o.scenario.empty()) {
    const ScenarioFile file = load(o);
    if (!file.host_known) throw InvalidArgument("dispersion: scenario must specify the host permittivity");
    host = file.scenario.host;
    medium = file.scenario.medium;
    if (!o.ball && o.ellipsoid.empty()) shape = file.scenario.particle.shape;
  } else {
    host.value = Complex(o.eps0_real, o.eps0_imag);
    medium.eps_inf = o.eps_inf;
    medium.omega_p = o.omega_p;
    medium.omega_0 = o.omega_0;
    if (o.drude) medium.model = DispersionModel::drude;
  }
  std::vector<double> lambdas;
  if (o.samples > 0) {
    for (int k = 1; k <= o.samples; ++k) lambdas.push_back(static_cast<double>(k) / (o.samples + 1));
  } else {
    lambdas = distinct_eigenvalues(shape);
  }
  emit(o.out, [&](std::ostream& out) {
    out << "lambda,omega_n,gamma_n,residual,condition\n";
    for (double lambda : lambdas) {
      if (std::abs(lambda - 0.5) < kAccumulationGuard) continue;
      const Resonance r = resonance(lambda, host, medium);
      out << format_double(lambda) << ',' << format_double(r.omega) << ',' << format_double(r.gamma) << ','
          << format_double(std::abs(r.residual)) << ',' << format_double(r.condition) << '\n';
    }
  });
}

void cmd_simulate(const Options& o) {
  if (o.out.empty()) throw InvalidArgument("simulate: --out <dir> is required");
  write_simulation(load(o), o.out, o.resolve_particle);
}

void cmd_sweep(const Options& o) {
  const ScenarioFile file = load(o);
  if (!file.host_known) throw InvalidArgument("sweep: scenario must specify the host permittivity");
  if (o.detector >= file.detectors.size()) throw InvalidArgument("sweep: detector index out of range");
  std::vector<Vec3> detectors{file.detectors[o.detector]};
  const Scenario& s = file.scenario;
  const double dist = std::max(0.0, (detectors[0] - s.particle.center).norm() - s.particle.radius());
  const double t = 1.1 * (dist + s.particle.diameter());
  const auto probe = file.probe();
  const SyntheticSource source(s, detectors, probe[0], probe[1], std::min(file.t_max(), 1.05 * t), file.dt(),
                               o.resolve_particle);
  const PipelineConfig cfg = file.pipeline_config();
  const SweepSquare sq = pipeline_square(cfg);
  const auto omegas = cell_centers(sq.omega_min, sq.omega_max, cfg.n_omega);
  const auto gammas = cfg.gamma_fixed ? std::vector<double>{*cfg.gamma_fixed} : cell_centers(0.0, sq.gamma_max, cfg.n_gamma);
  const IndicatorGrid grid = evaluate_grid(source, omegas, gammas, t);
  emit(o.out, [&](std::ostream& out) { write_grid_csv(out, grid); });
}

std::unique_ptr<MeasurementSource> measurements(const Options& o, const ScenarioFile& file) {
  if (!o.traces.empty()) return std::make_unique<FileSource>(file, o.traces);
  if (!file.host_known) throw InvalidArgument("missing traces: pass --traces <dir> for a truth-blinded scenario");
  const auto probe = file.probe();
  return std::make_unique<SyntheticSource>(file.scenario, file.detectors, probe[0], probe[1], file.t_max(), file.dt(),
                                           o.resolve_particle);
}

void write_json(const Options& o, const nlohmann::json& doc) {
  emit(o.out, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
}

void cmd_localize(const Options& o) {
  const ScenarioFile file = load(o);
  const auto source = measurements(o, file);
  const RecoveryReport report = localize(*source, file.pipeline_config());
  nlohmann::json doc = report_to_json(report);
  doc.erase("peaks");
  doc.erase("square");
  doc.erase("s_indicator");
  write_json(o, doc);
}

void cmd_invert(const Options& o) {
  const ScenarioFile file = load(o);
  const auto source = measurements(o, file);
  write_json(o, report_to_json(run_pipeline(*source, file.pipeline_config())));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photo-acoustic plasmonic imaging: forward simulation and inversion"};
  app.require_subcommand(1);
  Options o;

  auto* spectrum = app.add_subcommand("spectrum", "Visible eigenvalues of a reference shape (CSV)");
  spectrum->add_flag("--ball", o.ball, "Unit ball");
  spectrum->add_option("--ellipsoid", o.ellipsoid, "Ellipsoid semi-axes r1 r2 r3")->expected(3);
  spectrum->add_option("--out", o.out, "Output file (default stdout)");

  auto* dispersion = app.add_subcommand("dispersion", "Resonance table lambda -> (omega_n, gamma_n) (CSV)");
  dispersion->add_option("--scenario", o.scenario, "Scenario JSON");
  dispersion->add_flag("--ball", o.ball, "Use the unit ball spectrum");
  dispersion->add_option("--ellipsoid", o.ellipsoid, "Use an ellipsoid spectrum")->expected(3);
  dispersion->add_option("--eps0-real", o.eps0_real, "Re eps0(z)");
  dispersion->add_option("--eps0-imag", o.eps0_imag, "Im eps0(z)");
  dispersion->add_option("--eps-inf", o.eps_inf, "eps_inf");
  dispersion->add_option("--omega-p", o.omega_p, "Plasma frequency");
  dispersion->add_option("--omega-0", o.omega_0, "Undamped frequency");
  dispersion->add_option("--samples", o.samples, "Tabulate n uniformly spaced eigenvalues instead of the shape's");
  dispersion->add_flag("--drude", o.drude, "Drude dispersion");
  dispersion->add_option("--out", o.out, "Output file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Write synthetic pressure traces and a truth-blinded manifest");
  auto* sweep = app.add_subcommand("sweep", "Indicator grid omega,gamma,I (CSV)");
  auto* localize_cmd = app.add_subcommand("localize", "Particle localization from probe traces (JSON)");
  auto* invert = app.add_subcommand("invert", "Full recovery pipeline (JSON report)");
  for (auto* cmd : {simulate, sweep, localize_cmd, invert}) {
    cmd->add_option("--scenario", o.scenario, "Scenario JSON")->required();
    cmd->add_option("--out", o.out, "Output path");
    cmd->add_option("--gamma-fixed", o.gamma_fixed, "Sweep omega only at this damping");
    cmd->add_flag("--drude", o.drude, "Drude dispersion");
    cmd->add_flag("--resolve-particle", o.resolve_particle, "Integrate the particle term over D instead of using the closed form");
  }
  sweep->add_option("--detector", o.detector, "Detector index");
  for (auto* cmd : {localize_cmd, invert}) cmd->add_option("--traces", o.traces, "Directory written by simulate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (spectrum->parsed()) cmd_spectrum(o);
    else if (dispersion->parsed()) cmd_dispersion(o);
    else if (simulate->parsed()) cmd_simulate(o);
    else if (sweep->parsed()) cmd_sweep(o);
    else if (localize_cmd->parsed()) cmd_localize(o);
    else if (invert->parsed()) cmd_invert(o);
  } catch (const PipelineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}

#include "plasmo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace plasmo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Vec3 read_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument(std::string(what) + ": expected a 3-vector");
  return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name)) throw InvalidArgument(std::string("scenario: missing section '") + name + "'");
  return doc.at(name);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& cell) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos)
      throw InvalidArgument("malformed number '" + cell + "'");
    return v;
  } catch (const std::logic_error&) {
    throw InvalidArgument("malformed number '" + cell + "'");
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

}  // namespace

double ScenarioFile::loss_bound() const {
  if (numerics.loss_bound) return *numerics.loss_bound;
  if (!host_known) return 0.0;
  const Complex eps0 = scenario.host.value;
  double im = eps0.imag();
  if (scenario.profile == HostProfile::bump) {
    const double rz = (scenario.particle.center - scenario.domain.center).norm() / scenario.domain.radius;
    im /= (1 - rz * rz) * (1 - rz * rz);
  }
  return im / eps0.real();
}

std::array<double, 2> ScenarioFile::probe() const {
  if (numerics.probe) return *numerics.probe;
  const SweepSquare sq = square();
  return {(sq.omega_min + sq.omega_max) / 2, numerics.gamma_fixed.value_or(sq.gamma_max / 2)};
}

PipelineConfig ScenarioFile::pipeline_config() const {
  PipelineConfig cfg;
  cfg.domain = scenario.domain;
  cfg.medium = scenario.medium;
  cfg.shape_prior = scenario.particle.shape;
  cfg.a_hint = scenario.particle.scale;
  cfg.h = numerics.h;
  cfg.loss_bound = loss_bound();
  cfg.n_omega = numerics.n_omega;
  cfg.n_gamma = numerics.n_gamma;
  cfg.gamma_fixed = numerics.gamma_fixed;
  if (host_known) cfg.host_prior = scenario.host;
  return cfg;
}

void ScenarioFile::validate() const {
  Scenario check = scenario;
  // An unknown host value is replaced by an admissible placeholder so the
  // remaining invariants are still enforced.
  if (!host_known) check.host.value = Complex(scenario.medium.eps_inf + 1, 0);
  check.validate();
  if (!(scenario.incident.amplitude >= 0)) throw InvalidArgument("scenario: amplitude must be non-negative");
  if (numerics.n_omega < 1 || numerics.n_gamma < 1) throw InvalidArgument("numerics: grid sizes must be >= 1");
  if (numerics.quadrature_order < 1) throw InvalidArgument("numerics: quadrature order must be >= 1");
  if (!(dt() > 0)) throw InvalidArgument("numerics: dt must be positive");
  if (!(t_max() > dt())) throw InvalidArgument("numerics: t_max must exceed dt");
  if (numerics.gamma_fixed && !(*numerics.gamma_fixed > 0))
    throw InvalidArgument("numerics: gamma_fixed must be positive");
  if (numerics.loss_bound && !(*numerics.loss_bound >= 0))
    throw InvalidArgument("numerics: loss_bound must be non-negative");
  for (const auto& x : detectors) require_on_boundary(scenario.domain, x);
}

ScenarioFile parse_scenario(const json& doc) {
  ScenarioFile file;
  Scenario& s = file.scenario;
  try {
    const json& domain = section(doc, "domain");
    s.domain.center = read_vec3(domain.at("center"), "domain.center");
    s.domain.radius = domain.at("radius").get<double>();

    const json& host = doc.contains("host") ? doc.at("host") : json::object();
    file.host_known = host.contains("eps0_real");
    if (file.host_known)
      s.host.value = Complex(host.at("eps0_real").get<double>(), host.value("eps0_imag", 0.0));
    const std::string profile = host.value("profile", std::string("constant"));
    if (profile == "constant")
      s.profile = HostProfile::constant;
    else if (profile == "bump")
      s.profile = HostProfile::bump;
    else
      throw InvalidArgument("host.profile must be 'constant' or 'bump'");

    s.mu = doc.value("mu", 1.0);

    const json& medium = section(doc, "medium");
    s.medium.eps_inf = medium.at("eps_inf").get<double>();
    s.medium.omega_p = medium.at("omega_p").get<double>();
    s.medium.omega_0 = medium.value("omega_0", 1.0);
    const std::string model = medium.value("model", std::string("lorentz"));
    if (model == "lorentz")
      s.medium.model = DispersionModel::lorentz;
    else if (model == "drude")
      s.medium.model = DispersionModel::drude;
    else
      throw InvalidArgument("medium.model must be 'lorentz' or 'drude'");

    const json& particle = section(doc, "particle");
    const std::string shape = particle.value("shape", std::string("ball"));
    if (shape == "ball") {
      s.particle.shape = Shape::ball();
    } else if (shape == "ellipsoid") {
      const Vec3 r = read_vec3(particle.at("semi_axes"), "particle.semi_axes");
      s.particle.shape = Shape::ellipsoid(r.x(), r.y(), r.z());
    } else {
      throw InvalidArgument("particle.shape must be 'ball' or 'ellipsoid'");
    }
    s.particle.center =
        particle.contains("center") ? read_vec3(particle.at("center"), "particle.center") : s.domain.center;
    s.particle.scale = particle.at("a").get<double>();

    if (doc.contains("incident")) {
      const json& inc = doc.at("incident");
      s.incident.direction = read_vec3(inc.at("direction"), "incident.direction");
      s.incident.polarization = read_vec3(inc.at("polarization"), "incident.polarization");
      s.incident.amplitude = inc.value("amplitude", 1.0);
    }

    if (doc.contains("detectors"))
      for (const auto& d : doc.at("detectors")) file.detectors.push_back(read_vec3(d, "detector"));

    if (doc.contains("numerics")) {
      const json& num = doc.at("numerics");
      Numerics& n = file.numerics;
      n.h = num.value("h", n.h);
      if (num.contains("grid")) {
        const json& g = num.at("grid");
        if (!g.is_array() || g.size() != 2) throw InvalidArgument("numerics.grid must be [n_omega, n_gamma]");
        n.n_omega = g.at(0).get<int>();
        n.n_gamma = g.at(1).get<int>();
      }
      n.quadrature_order = num.value("quadrature_order", n.quadrature_order);
      if (num.contains("dt")) n.dt = num.at("dt").get<double>();
      if (num.contains("t_max")) n.t_max = num.at("t_max").get<double>();
      if (num.contains("t_sweep")) n.t_sweep = num.at("t_sweep").get<double>();
      n.seed = num.value("seed", n.seed);
      if (num.contains("probe")) {
        const json& p = num.at("probe");
        if (!p.is_array() || p.size() != 2) throw InvalidArgument("numerics.probe must be [omega, gamma]");
        n.probe = std::array<double, 2>{p.at(0).get<double>(), p.at(1).get<double>()};
      }
      if (num.contains("gamma_fixed")) n.gamma_fixed = num.at("gamma_fixed").get<double>();
      if (num.contains("loss_bound")) n.loss_bound = num.at("loss_bound").get<double>();
    }
    s.h = file.numerics.h;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  file.validate();
  return file;
}

ScenarioFile load_scenario(const fs::path& path) {
  std::ifstream in = open_input(path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidArgument("scenario: " + std::string(e.what()));
  }
  return parse_scenario(doc);
}

json scenario_to_json(const ScenarioFile& file, bool include_host) {
  const Scenario& s = file.scenario;
  json doc;
  doc["domain"] = {{"center", vec3_json(s.domain.center)}, {"radius", s.domain.radius}};
  json host = {{"profile", s.profile == HostProfile::bump ? "bump" : "constant"}};
  if (include_host && file.host_known) {
    host["eps0_real"] = s.host.value.real();
    host["eps0_imag"] = s.host.value.imag();
  }
  doc["host"] = host;
  doc["mu"] = s.mu;
  doc["medium"] = {{"eps_inf", s.medium.eps_inf},
                   {"omega_p", s.medium.omega_p},
                   {"omega_0", s.medium.omega_0},
                   {"model", s.medium.model == DispersionModel::drude ? "drude" : "lorentz"}};
  json particle = {{"shape", s.particle.shape.is_ball() ? "ball" : "ellipsoid"},
                   {"semi_axes", vec3_json(s.particle.shape.semi_axes())},
                   {"a", s.particle.scale}};
  if (include_host) particle["center"] = vec3_json(s.particle.center);
  doc["particle"] = particle;
  doc["incident"] = {{"direction", vec3_json(s.incident.direction)},
                     {"polarization", vec3_json(s.incident.polarization)},
                     {"amplitude", s.incident.amplitude}};
  json detectors = json::array();
  for (const auto& d : file.detectors) detectors.push_back(vec3_json(d));
  doc["detectors"] = detectors;

  const Numerics& n = file.numerics;
  json num = {{"h", n.h},
              {"grid", {n.n_omega, n.n_gamma}},
              {"quadrature_order", n.quadrature_order},
              {"dt", file.dt()},
              {"t_max", file.t_max()},
              {"seed", n.seed},
              {"loss_bound", file.loss_bound()}};
  const auto probe = file.probe();
  num["probe"] = {probe[0], probe[1]};
  if (n.t_sweep) num["t_sweep"] = *n.t_sweep;
  if (n.gamma_fixed) num["gamma_fixed"] = *n.gamma_fixed;
  doc["numerics"] = num;
  return doc;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const fs::path& path, const PressureTrace& trace) {
  std::ofstream out = open_output(path);
  out << "t,p\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k)
    out << format_double(trace.times[k]) << ',' << format_double(trace.values[k]) << '\n';
}

PressureTrace read_trace_csv(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,p", 0) != 0)
    throw InvalidArgument(path.string() + ": expected header 't,p'");
  PressureTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw InvalidArgument(path.string() + ": expected two columns");
    trace.times.push_back(to_double(cells[0]));
    trace.values.push_back(to_double(cells[1]));
  }
  trace.validate();
  return trace;
}

void write_grid_csv(std::ostream& out, const IndicatorGrid& grid) {
  out << "omega,gamma,I\n";
  for (std::size_t i = 0; i < grid.omegas.size(); ++i)
    for (std::size_t j = 0; j < grid.gammas.size(); ++j)
      out << format_double(grid.omegas[i]) << ',' << format_double(grid.gammas[j]) << ','
          << format_double(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
}

IndicatorGrid read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("omega,gamma,I", 0) != 0)
    throw InvalidArgument("grid: expected header 'omega,gamma,I'");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) throw InvalidArgument("grid: expected three columns");
    rows.push_back({to_double(cells[0]), to_double(cells[1]), to_double(cells[2])});
  }
  IndicatorGrid grid;
  for (const auto& r : rows) {
    if (grid.omegas.empty() || grid.omegas.back() != r[0]) grid.omegas.push_back(r[0]);
    if (grid.omegas.size() == 1) grid.gammas.push_back(r[1]);
  }
  if (grid.empty() || grid.omegas.size() * grid.gammas.size() != rows.size())
    throw InvalidArgument("grid: rows do not form a rectangular grid");
  grid.values.resize(static_cast<Eigen::Index>(grid.omegas.size()), static_cast<Eigen::Index>(grid.gammas.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    grid.values(static_cast<Eigen::Index>(k / grid.gammas.size()), static_cast<Eigen::Index>(k % grid.gammas.size())) =
        rows[k][2];
  return grid;
}

json report_to_json(const RecoveryReport& report) {
  json doc;
  doc["z_hat"] = vec3_json(report.z_hat);
  doc["distance_estimates"] = report.distance_estimates;
  doc["trilateration_residual"] = report.trilateration_residual;
  doc["s_indicator"] = report.s_indicator;
  doc["square"] = {{"omega_min", report.square.omega_min},
                   {"omega_max", report.square.omega_max},
                   {"gamma_max", report.square.gamma_max}};
  json peaks = json::array();
  for (const auto& p : report.peaks) {
    peaks.push_back({{"omega_star", p.omega_star},
                     {"gamma_star", p.gamma_star},
                     {"lambda_matched", p.lambda},
                     {"prominence", p.prominence},
                     {"eps_p_at_peak", {p.eps_p.real(), p.eps_p.imag()}},
                     {"eps0_recovered", {p.eps0.real(), p.eps0.imag()}}});
  }
  doc["peaks"] = peaks;
  return doc;
}

std::string trace_file_name(std::size_t detector, bool with_particle) {
  return "detector_" + std::to_string(detector) + (with_particle ? "_particle.csv" : "_background.csv");
}

FileSource::FileSource(const ScenarioFile& manifest, const fs::path& dir) : detectors_(manifest.detectors) {
  if (!fs::is_directory(dir)) throw InvalidArgument("missing traces directory " + dir.string());
  for (std::size_t i = 0; i < detectors_.size(); ++i) {
    TracePair pair;
    pair.with_particle = read_trace_csv(dir / trace_file_name(i, true));
    pair.background = read_trace_csv(dir / trace_file_name(i, false));
    pair.with_particle.detector = pair.background.detector = detectors_[i];
    if (pair.with_particle.times != pair.background.times)
      throw InvalidArgument("probe traces of detector " + std::to_string(i) + " use different time grids");
    probes_.push_back(std::move(pair));
  }
  const fs::path sweep_path = dir / kSweepTracesName;
  if (!fs::exists(sweep_path)) return;
  std::ifstream in = open_input(sweep_path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("omega,gamma,t,p", 0) != 0)
    throw InvalidArgument(sweep_path.string() + ": expected header 'omega,gamma,t,p'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) throw InvalidArgument(sweep_path.string() + ": expected four columns");
    auto& values = sweep_values_[{to_double(cells[0]), to_double(cells[1])}];
    const double t = to_double(cells[2]);
    if (sweep_values_.size() == 1) sweep_times_.push_back(t);
    values.push_back(to_double(cells[3]));
  }
}

TracePair FileSource::sweep(double omega, double gamma, double t_max) const {
  const auto it = sweep_values_.find({omega, gamma});
  if (it == sweep_values_.end())
    throw InvalidArgument("no recorded sweep trace at omega=" + format_double(omega) + ", gamma=" + format_double(gamma));
  if (sweep_times_.empty() || t_max > sweep_times_.back())
    throw InvalidArgument("recorded sweep traces end before the indicator time " + format_double(t_max));
  const std::size_t n = sweep_times_.size();
  if (it->second.size() != n) throw InvalidArgument("sweep traces have inconsistent lengths");
  TracePair pair;
  pair.background = probes_.at(0).background;
  if (pair.background.values.size() < n) throw InvalidArgument("background trace shorter than sweep traces");
  pair.background.times.resize(n);
  pair.background.values.resize(n);
  if (pair.background.times != sweep_times_)
    throw InvalidArgument("sweep traces and background trace use different time grids");
  pair.with_particle = pair.background;
  pair.with_particle.values = it->second;
  return pair;
}

void write_simulation(const ScenarioFile& file, const fs::path& dir, bool resolved) {
  if (!file.host_known) throw InvalidArgument("simulate: the scenario must specify host.eps0_real");
  if (file.detectors.size() < 1) throw InvalidArgument("simulate: at least one detector is required");
  fs::create_directories(dir);
  const Scenario& s = file.scenario;
  const auto probe = file.probe();
  const SyntheticSource source(s, file.detectors, probe[0], probe[1], file.t_max(), file.dt(), resolved);

  ScenarioFile manifest = file;
  const Vec3& x0 = file.detectors.front();
  const double rmax = s.particle.shape.max_axis();
  const double t_sweep = std::min(
      file.t_max(), file.numerics.t_sweep.value_or(1.2 * ((x0 - s.particle.center).norm() + 2 * s.particle.scale * rmax)));
  manifest.numerics.t_sweep = t_sweep;
  manifest.numerics.loss_bound = file.loss_bound();
  manifest.numerics.probe = probe;
  manifest.numerics.dt = file.dt();
  manifest.numerics.t_max = file.t_max();
  {
    std::ofstream out = open_output(dir / kManifestName);
    out << scenario_to_json(manifest, false).dump(2) << '\n';
  }
  for (std::size_t i = 0; i < file.detectors.size(); ++i) {
    const TracePair pair = source.probe(i);
    write_trace_csv(dir / trace_file_name(i, true), pair.with_particle);
    write_trace_csv(dir / trace_file_name(i, false), pair.background);
  }

  const PipelineConfig cfg = file.pipeline_config();
  const SweepSquare sq = pipeline_square(cfg);
  const auto omegas = cell_centers(sq.omega_min, sq.omega_max, cfg.n_omega);
  const auto gammas = cfg.gamma_fixed ? std::vector<double>{*cfg.gamma_fixed} : cell_centers(0.0, sq.gamma_max, cfg.n_gamma);
  std::ofstream out = open_output(dir / kSweepTracesName);
  out << "omega,gamma,t,p\n";
  for (double w : omegas) {
    for (double g : gammas) {
      const TracePair pair = source.sweep(w, g, t_sweep);
      for (std::size_t k = 0; k < pair.with_particle.values.size(); ++k) {
        out << format_double(w) << ',' << format_double(g) << ',' << format_double(pair.with_particle.times[k]) << ','
            << format_double(pair.with_particle.values[k]) << '\n';
      }
    }
  }
}

}  // namespace plasmo

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plasmo/inversion.hpp"

namespace plasmo {

struct Numerics {
  double h = 0.5;
  int n_omega = 200;
  int n_gamma = 50;
  int quadrature_order = 24;
  /// Time step; defaults to a/20.
  std::optional<double> dt;
  /// Recording length; defaults to 2.1·R_Ω.
  std::optional<double> t_max;
  /// Recording length of sweep traces (file output only).
  std::optional<double> t_sweep;
  std::uint64_t seed = 0;
  /// (ω, γ) used for the localization traces; defaults to the square's center.
  std::optional<std::array<double, 2>> probe;
  std::optional<double> gamma_fixed;
  /// sup Im ε0 / Re ε0 over Ω; derived from the host when absent.
  std::optional<double> loss_bound;
};

struct ScenarioFile {
  Scenario scenario;
  /// False for truth-blinded inputs that omit ε0(z).
  bool host_known = true;
  std::vector<Vec3> detectors;
  Numerics numerics;

  double dt() const { return numerics.dt.value_or(scenario.particle.scale / 20); }
  double t_max() const { return numerics.t_max.value_or(2.1 * scenario.domain.radius); }
  double loss_bound() const;
  SweepSquare square() const { return bounds(loss_bound(), scenario.medium); }
  std::array<double, 2> probe() const;
  PipelineConfig pipeline_config() const;
  void validate() const;
};

ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const ScenarioFile& file, bool include_host = true);

/// Fixed 17-significant-digit formatting used by every emitted file.
std::string format_double(double v);

void write_trace_csv(const std::filesystem::path& path, const PressureTrace& trace);
PressureTrace read_trace_csv(const std::filesystem::path& path);

void write_grid_csv(std::ostream& out, const IndicatorGrid& grid);
IndicatorGrid read_grid_csv(std::istream& in);

nlohmann::json report_to_json(const RecoveryReport& report);

std::string trace_file_name(std::size_t detector, bool with_particle);
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kSweepTracesName = "sweep_traces.csv";

/// Measurements read back from a `simulate` output directory. Sweep traces
/// exist only on the recorded grid.
class FileSource : public MeasurementSource {
 public:
  FileSource(const ScenarioFile& manifest, const std::filesystem::path& dir);

  std::size_t detector_count() const override { return detectors_.size(); }
  Vec3 detector(std::size_t i) const override { return detectors_.at(i); }
  TracePair probe(std::size_t i) const override { return probes_.at(i); }
  TracePair sweep(double omega, double gamma, double t_max) const override;

 private:
  std::vector<Vec3> detectors_;
  std::vector<TracePair> probes_;
  std::vector<double> sweep_times_;
  std::map<std::pair<double, double>, std::vector<double>> sweep_values_;
};

/// Write manifest, probe traces and sweep traces for a scenario.
void write_simulation(const ScenarioFile& file, const std::filesystem::path& dir, bool resolved);

}  // namespace plasmo

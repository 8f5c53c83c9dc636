#pragma once

// Configuration and experiment layer behind the CLI: declarative sweep
// configs, the three experiment commands (observer conditionals,
// super-observer erasure + tomography, two-time curves), and byte-stable
// CSV/JSON emitters. Every output byte is a function of (config, seed).

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relclock/optics_mc.hpp"
#include "relclock/paw.hpp"
#include "relclock/tomography.hpp"

namespace relclock::harness {

inline constexpr const char* kToolVersion = "relclock 1.0.0";
inline constexpr const char* kFormatVersion = "1";

enum class Mode { PawObserver, PawSuperobserver, Gppt };

std::string to_string(Mode mode);
std::optional<Mode> mode_from_string(const std::string& name);

// Invalid configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Mode mode = Mode::PawObserver;
  double omega = 1.0;
  std::vector<double> plate_A_values;   // radians of plate-A thickness δ
  std::vector<double> delta_B_values;   // radians of clock delay (gppt)
  long long shots = 0;                  // 0 = analytic only
  long long exposure = 0;               // tomography shots per setting
  std::uint64_t seed = 0;
  std::string output_path;              // empty = stdout
  std::string format = "csv";           // csv | json
  std::string timestamp;                // echoed verbatim into outputs
  std::string tomography_dump_dir;      // optional per-point count dumps

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the JSON config document. Field values are overridden later by CLI
// flags; cli_mode (the chosen subcommand) must agree with any "mode" field.
ExperimentConfig config_from_json_text(const std::string& text, std::optional<Mode> cli_mode);

void validate(const ExperimentConfig& config);

// n equispaced values in [0, 2π).
std::vector<double> equispaced(int n);

struct ObserverPoint {
  double plate_A;
  paw::ConditionalTable analytic;
  std::optional<optics_mc::ConditionalEstimates> estimates;
};

// The observer's own clock-time view: the plate-averaged conditionals at
// the two dial readings.
struct ObserverInset {
  double t1 = 0.0;
  double t2 = 0.0;
  paw::ConditionalTable analytic;
  std::optional<optics_mc::ConditionalEstimates> estimates;
};

struct SuperobserverPoint {
  double plate_A;
  double fidelity_exact;
  double postselect_prob;
  std::optional<double> fidelity_mle;
  std::optional<long long> mle_iterations;
  bool mle_converged = true;
};

struct GpptPoint {
  double delta_B;
  double t_plus_tau_1;
  double p3_t1;
  double t_plus_tau_2;
  double p3_t2;
  double p3_t1_quad;
  double p3_t2_quad;
  std::optional<optics_mc::ConditionalEstimates> estimates;
};

struct RunRecord {
  ExperimentConfig config;
  std::string tool_version;
  std::string format_version;
  std::string timestamp;
  std::vector<ObserverPoint> observer_points;
  std::optional<ObserverInset> inset;
  std::vector<SuperobserverPoint> superobserver_points;
  std::vector<GpptPoint> gppt_points;
  bool all_converged = true;
};

bool operator==(const RunRecord& a, const RunRecord& b);

// Validates and executes the configured sweep.
RunRecord run(const ExperimentConfig& config);

// Fixed decimal formatting for emitted cells: 17 significant digits,
// '.' separator; undefined conditionals become the literal "undefined".
std::string format_double(double value);

std::string to_csv(const RunRecord& record);
std::string to_json_text(const RunRecord& record);
RunRecord record_from_json_text(const std::string& text);

std::string tomography_data_to_csv(const tomography::TomographyData& data);
tomography::TomographyData tomography_data_from_csv(const std::string& text);

// Writes bytes as-is (LF endings preserved); throws std::runtime_error on
// I/O failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// One-paragraph human summary for stdout when output goes to a file.
std::string summarize(const RunRecord& record);

}  // namespace relclock::harness

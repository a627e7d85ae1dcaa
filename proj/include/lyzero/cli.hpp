#pragma once

// Experiment configuration and the command implementations behind the
// `lyzero` executable. Commands return a process exit code and write their
// files under RunOptions::out_dir.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyzero/bath.hpp"
#include "lyzero/probe.hpp"
#include "lyzero/zeros.hpp"

namespace lyzero {

/// Temperature in units of the bath coupling J^b; infinite maps to beta = 0.
struct Temperature {
  double value = 1.0;
  bool infinite = false;

  static Temperature inf() { return {0.0, true}; }
  friend bool operator==(const Temperature&, const Temperature&) = default;
};

struct TimeGrid {
  double lambda_t_min = 0.0;
  double lambda_t_max = 6.283185307179586;
  int samples = 2001;

  std::vector<double> lambda_t() const;
  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct Tolerances {
  double circle_tol = 1e-8;
  double refine_tol = 1e-6;
  double cluster_tol = 1e-6;
  double detect_threshold = 1e-2;
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct BathConfig {
  BathSpec spec;
  /// Set when the bath was given with the "ring" shortcut.
  std::optional<double> ring_coupling;
  /// J^b used to convert temperatures; defaults to the ring coupling or the
  /// largest |J_ij|.
  std::optional<double> energy_unit;

  double reference_coupling() const;
  friend bool operator==(const BathConfig&, const BathConfig&) = default;
};

struct ExperimentConfig {
  BathConfig bath;
  /// Empty: use bath.spec.beta directly.
  std::vector<Temperature> temperatures;
  ProbeParams probe;
  ProbeState initial_state;
  TimeGrid grid;
  Tolerances tolerances;
  std::string output_dir = "out";
  int enumeration_cap = kDefaultEnumerationCap;
  int verify_draws = 100;

  /// Ten-site ring, J^b = 1, lambda = 1, isotropic probe coupling
  /// J = lambda / 2pi, x-projected probes, T in {inf, 1, 1/4, 1/8} J^b.
  static ExperimentConfig figure_defaults();
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Missing keys take figure_defaults() values. Throws Error(kConfig) on
/// schema violations or zero temperature and Error(kInvalidState) for an
/// unnormalized initial state.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical serialized config.
std::string config_hash(const ExperimentConfig& config);

struct TemperaturePoint {
  std::string label;  // directory name, e.g. "T_inf", "T_0.25"
  double beta = 0.0;
};

std::vector<TemperaturePoint> temperature_points(const ExperimentConfig& config);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
  std::uint64_t seed = 20240101;
  /// verify: check this weights file instead of recomputing.
  std::optional<std::filesystem::path> weights_file;
};

int cmd_weights(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
int cmd_zeros(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
int cmd_dynamics(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
int cmd_verify(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);
int cmd_figures(const ExperimentConfig& config, const RunOptions& options, std::ostream& log);

struct RingZeroMarker {
  double theta = 0.0;
  int multiplicity = 1;
  double predicted_lambda_t = 0.0;
  std::optional<double> detected_lambda_t;
  bool masked = false;
};

struct RingZeroDetection {
  std::vector<RingZeroMarker> markers;  // one per predicted zero in the window
  std::vector<DetectedZero> detections;  // in units of lambda t
  std::vector<double> unmatched;  // detections not assigned to a prediction
};

/// Samples <s_A^y s_B^z> (extended-precision ratio) on the grid, detects its
/// zeros and pairs them with the Delta m = 1 zero times theta_n / lambda.
RingZeroDetection detect_ring_zeros(const RingExperiment& experiment,
                                    const LeeYangZeroSet& zeros, const TimeGrid& grid,
                                    double threshold, double refine_tol, unsigned threads = 1);

}  // namespace lyzero

#pragma once

// The three command-line verbs as library calls. Each returns the process
// exit status: 0 ok, 2 input error, 3 optimization stalled, 4 verification
// failure.

#include "vora/optimizer.hpp"
#include "vora/spectral_data.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace vora::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitStalled = 3;
inline constexpr int kExitVerification = 4;

inline constexpr const char* kDataEnvVar = "VORA_FILTER_DATA";
inline constexpr const char* kDefaultObserverFile = "cie1931_2deg_5nm.csv";
inline constexpr const char* kJsonSchemaVersion = "1";

struct InputPaths {
  std::filesystem::path camera;
  /// Empty means $VORA_FILTER_DATA/cie1931_2deg_5nm.csv.
  std::filesystem::path observer;
  WavelengthGrid grid;
};

struct EvaluateOptions {
  InputPaths inputs;
  std::optional<std::filesystem::path> filter;
  bool json = false;
};

struct OptimizeOptions {
  InputPaths inputs;
  std::optional<std::filesystem::path> initial_filter;
  OptimizerConfig config;
  std::optional<std::filesystem::path> out_filter;
  std::optional<std::filesystem::path> out_trace;
  std::optional<std::filesystem::path> out_svg;
  std::optional<std::filesystem::path> emit_coeffs;
  bool json = false;
};

struct CheckOptions {
  InputPaths inputs;
  std::uint64_t seed = 0;
  int trials = 20;
  bool json = false;
  /// Test-only negative control: perturbs the analytic gradient.
  bool sabotage = false;
};

std::filesystem::path resolve_observer(const std::filesystem::path& observer);

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err);
int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err);
int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err);

/// `iter,vora,mu,step,gradnorm,backtracks`, 17 significant digits.
void write_trace_csv(std::ostream& out, const OptimizationReport& report);
/// `index,coefficient`, 17 significant digits.
void write_coefficients_csv(std::ostream& out, const Eigen::VectorXd& coeffs);
/// Two stacked line plots: transmittance vs wavelength and nu vs iteration.
void write_svg(std::ostream& out, const OptimizationReport& report);

}  // namespace vora::cli

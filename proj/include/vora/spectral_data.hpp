#pragma once

// Sampled spectra: wavelength lattices, sensor sets (camera or observer), and
// filter transmittances, plus the CSV reader/writer and linear resampler that
// bring arbitrary measurement files onto a common grid.

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace vora {

/// Uniform wavelength lattice start, start+step, ..., start+(count-1)*step.
struct WavelengthGrid {
  double start_nm = 400.0;
  double step_nm = 10.0;
  int count = 31;

  /// Validates step > 0 and count >= 4.
  static WavelengthGrid make(double start_nm, double step_nm, int count);
  /// Parses "start:step:count".
  static WavelengthGrid parse(std::string_view text);

  double end_nm() const { return start_nm + step_nm * (count - 1); }
  double wavelength(int i) const { return start_nm + step_nm * i; }
  Eigen::VectorXd wavelengths() const;
  std::string to_string() const;

  friend bool operator==(const WavelengthGrid&, const WavelengthGrid&) = default;
};

/// Samples exactly as they appear in a CSV file.
struct RawSpectra {
  std::vector<double> wavelengths;
  Eigen::MatrixXd values;  // rows = wavelengths, cols = channels
  std::vector<std::string> channel_names;
};

/// Reads `wavelength,<c1>[,<c2>,<c3>]`. Blank lines and lines starting with
/// '#' are skipped; CRLF is accepted. `source` only labels error messages.
RawSpectra parse_spectral_csv(std::istream& in, int expected_channels,
                              std::string_view source = "<stream>");
RawSpectra parse_spectral_csv_text(std::string_view text, int expected_channels);

/// Writes the same format with 17 significant digits so that a parse of the
/// output reproduces the values bit for bit.
void write_spectral_csv(std::ostream& out, const std::vector<double>& wavelengths,
                        const Eigen::MatrixXd& values,
                        const std::vector<std::string>& channel_names);

/// Linear interpolation of every column onto `grid`. Source samples outside
/// the grid are ignored; the source must cover [grid.start, grid.end].
Eigen::MatrixXd resample_to_grid(const std::vector<double>& wavelengths,
                                 const Eigen::MatrixXd& values, const WavelengthGrid& grid);

/// Numerical rank with threshold sigma_1 * rows * eps * 1e3.
int numerical_rank(const Eigen::MatrixXd& m);

/// n x 3 sensor responses (camera Q or observer X) on a grid.
class SensorSet {
 public:
  /// Throws RankDeficient unless the columns have numerical rank 3.
  SensorSet(WavelengthGrid grid, Eigen::MatrixXd responses,
            std::array<std::string, 3> channel_names = {"c1", "c2", "c3"});

  const WavelengthGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& responses() const { return responses_; }
  const std::array<std::string, 3>& channel_names() const { return channel_names_; }
  int size() const { return grid_.count; }

 private:
  WavelengthGrid grid_;
  Eigen::MatrixXd responses_;
  std::array<std::string, 3> channel_names_;
};

/// Per-wavelength transmittance, strictly positive and inside [tau_min, tau_max].
class FilterSpectrum {
 public:
  static constexpr double kDefaultTauMin = 1e-4;
  static constexpr double kDefaultTauMax = 1.0;

  FilterSpectrum(WavelengthGrid grid, Eigen::VectorXd transmittance,
                 double tau_min = kDefaultTauMin, double tau_max = kDefaultTauMax);

  static FilterSpectrum ones(const WavelengthGrid& grid);

  const WavelengthGrid& grid() const { return grid_; }
  const Eigen::VectorXd& transmittance() const { return transmittance_; }

 private:
  WavelengthGrid grid_;
  Eigen::VectorXd transmittance_;
};

SensorSet load_sensor_set(const std::filesystem::path& path, const WavelengthGrid& grid);
SensorSet sensor_set_from_csv_text(std::string_view text, const WavelengthGrid& grid);
FilterSpectrum load_filter(const std::filesystem::path& path, const WavelengthGrid& grid);

void write_filter_csv(std::ostream& out, const FilterSpectrum& filter);

/// Three Gaussian channels exp(-(lambda - peak)^2 / (2 sigma^2)).
SensorSet gaussian_camera(const WavelengthGrid& grid, const std::array<double, 3>& peaks_nm,
                          double sigma_nm);

/// The synthetic camera used throughout the tests: peaks 450/550/600 nm, sigma 30 nm.
SensorSet reference_gaussian_camera(const WavelengthGrid& grid = {});

}  // namespace vora

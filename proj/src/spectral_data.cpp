#include "vora/spectral_data.hpp"

#include "vora/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vora {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  size_t pos = 0;
  while (true) {
    const size_t next = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::string where(std::string_view source, int line) {
  std::ostringstream os;
  os << source << ":" << line;
  return os.str();
}

// Tolerance for deciding that a source sample sits on a grid point or that the
// source covers a grid end point.
constexpr double kWavelengthSlack = 1e-9;

}  // namespace

WavelengthGrid WavelengthGrid::make(double start_nm, double step_nm, int count) {
  if (!std::isfinite(start_nm) || !std::isfinite(step_nm) || !(step_nm > 0.0)) {
    throw VoraError(ErrorCode::InvalidGrid, "grid step must be a positive finite number");
  }
  if (count < 4) {
    throw VoraError(ErrorCode::InvalidGrid, "grid needs at least 4 samples, got " + std::to_string(count));
  }
  return WavelengthGrid{start_nm, step_nm, count};
}

WavelengthGrid WavelengthGrid::parse(std::string_view text) {
  const size_t a = text.find(':');
  const size_t b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos || text.find(':', b + 1) != std::string_view::npos) {
    throw VoraError(ErrorCode::InvalidGrid, "expected start:step:count, got '" + std::string(text) + "'");
  }
  double start = 0.0;
  double step = 0.0;
  double count = 0.0;
  if (!parse_double(trim(text.substr(0, a)), start) || !parse_double(trim(text.substr(a + 1, b - a - 1)), step) ||
      !parse_double(trim(text.substr(b + 1)), count) || count != std::floor(count)) {
    throw VoraError(ErrorCode::InvalidGrid, "expected start:step:count, got '" + std::string(text) + "'");
  }
  return make(start, step, static_cast<int>(count));
}

Eigen::VectorXd WavelengthGrid::wavelengths() const {
  Eigen::VectorXd w(count);
  for (int i = 0; i < count; ++i) w[i] = wavelength(i);
  return w;
}

std::string WavelengthGrid::to_string() const {
  std::ostringstream os;
  os << start_nm << ":" << step_nm << ":" << count;
  return os.str();
}

RawSpectra parse_spectral_csv(std::istream& in, int expected_channels, std::string_view source) {
  if (expected_channels < 1 || expected_channels > 3) {
    throw VoraError(ErrorCode::InvalidConfig, "expected_channels must be 1, 2 or 3");
  }
  RawSpectra raw;
  std::vector<double> flat;
  bool have_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto cells = split_commas(content);
    if (!have_header) {
      if (cells.size() != static_cast<size_t>(expected_channels) + 1 || cells[0] != "wavelength") {
        throw VoraError(ErrorCode::MalformedCsv,
                        where(source, line_no) + ": header must be 'wavelength' followed by " +
                            std::to_string(expected_channels) + " channel name(s)");
      }
      for (size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) {
          throw VoraError(ErrorCode::MalformedCsv, where(source, line_no) + ": empty channel name");
        }
        raw.channel_names.emplace_back(cells[c]);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != static_cast<size_t>(expected_channels) + 1) {
      throw VoraError(ErrorCode::MalformedCsv, where(source, line_no) + ": expected " +
                                                   std::to_string(expected_channels + 1) + " cells, got " +
                                                   std::to_string(cells.size()));
    }
    double wl = 0.0;
    if (!parse_double(cells[0], wl)) {
      throw VoraError(ErrorCode::MalformedCsv,
                      where(source, line_no) + ": non-numeric wavelength '" + std::string(cells[0]) + "'");
    }
    if (!raw.wavelengths.empty()) {
      if (wl == raw.wavelengths.back()) {
        throw VoraError(ErrorCode::DuplicateWavelength, where(source, line_no) + ": wavelength repeated");
      }
      if (wl < raw.wavelengths.back()) {
        throw VoraError(ErrorCode::UnsortedWavelength, where(source, line_no) + ": wavelengths must ascend");
      }
    }
    raw.wavelengths.push_back(wl);
    for (size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw VoraError(ErrorCode::MalformedCsv,
                        where(source, line_no) + ": non-numeric value '" + std::string(cells[c]) + "'");
      }
      flat.push_back(v);
    }
  }
  if (!have_header) throw VoraError(ErrorCode::MalformedCsv, std::string(source) + ": missing header row");
  if (raw.wavelengths.empty()) throw VoraError(ErrorCode::MalformedCsv, std::string(source) + ": no data rows");

  const auto rows = static_cast<Eigen::Index>(raw.wavelengths.size());
  raw.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, expected_channels);
  return raw;
}

RawSpectra parse_spectral_csv_text(std::string_view text, int expected_channels) {
  std::istringstream in{std::string(text)};
  return parse_spectral_csv(in, expected_channels, "<text>");
}

void write_spectral_csv(std::ostream& out, const std::vector<double>& wavelengths, const Eigen::MatrixXd& values,
                        const std::vector<std::string>& channel_names) {
  if (values.rows() != static_cast<Eigen::Index>(wavelengths.size()) ||
      values.cols() != static_cast<Eigen::Index>(channel_names.size())) {
    throw VoraError(ErrorCode::ShapeMismatch, "values must be wavelengths x channels");
  }
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "wavelength";
  for (const auto& name : channel_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out << wavelengths[static_cast<size_t>(r)];
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << ',' << values(r, c);
    out << '\n';
  }
  out.precision(old_precision);
}

Eigen::MatrixXd resample_to_grid(const std::vector<double>& wavelengths, const Eigen::MatrixXd& values,
                                 const WavelengthGrid& grid) {
  if (values.rows() != static_cast<Eigen::Index>(wavelengths.size())) {
    throw VoraError(ErrorCode::ShapeMismatch, "one row of values per wavelength required");
  }
  if (!std::is_sorted(wavelengths.begin(), wavelengths.end())) {
    throw VoraError(ErrorCode::UnsortedWavelength, "source wavelengths must ascend");
  }
  if (wavelengths.empty() || wavelengths.front() > grid.start_nm + kWavelengthSlack ||
      wavelengths.back() < grid.end_nm() - kWavelengthSlack) {
    std::ostringstream os;
    os << "grid " << grid.start_nm << ".." << grid.end_nm() << " nm is not covered by the source";
    if (!wavelengths.empty()) os << " (" << wavelengths.front() << ".." << wavelengths.back() << " nm)";
    throw VoraError(ErrorCode::InsufficientCoverage, os.str());
  }

  Eigen::MatrixXd out(grid.count, values.cols());
  size_t seg = 0;
  for (int i = 0; i < grid.count; ++i) {
    const double wl = grid.wavelength(i);
    while (seg + 1 < wavelengths.size() && wavelengths[seg + 1] < wl - kWavelengthSlack) ++seg;
    // Exact passthrough for coincident samples.
    if (std::abs(wavelengths[seg] - wl) <= kWavelengthSlack) {
      out.row(i) = values.row(static_cast<Eigen::Index>(seg));
      continue;
    }
    if (seg + 1 < wavelengths.size() && std::abs(wavelengths[seg + 1] - wl) <= kWavelengthSlack) {
      out.row(i) = values.row(static_cast<Eigen::Index>(seg + 1));
      continue;
    }
    const double w0 = wavelengths[seg];
    const double w1 = wavelengths[seg + 1];
    const double t = (wl - w0) / (w1 - w0);
    out.row(i) = (1.0 - t) * values.row(static_cast<Eigen::Index>(seg)) +
                 t * values.row(static_cast<Eigen::Index>(seg + 1));
  }
  return out;
}

int numerical_rank(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double tol = s[0] * static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * 1e3;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > tol) ++rank;
  }
  return rank;
}

SensorSet::SensorSet(WavelengthGrid grid, Eigen::MatrixXd responses, std::array<std::string, 3> channel_names)
    : grid_(grid), responses_(std::move(responses)), channel_names_(std::move(channel_names)) {
  if (responses_.rows() != grid_.count || responses_.cols() != 3) {
    throw VoraError(ErrorCode::ShapeMismatch, "sensor responses must be " + std::to_string(grid_.count) + " x 3");
  }
  if (!responses_.allFinite()) throw VoraError(ErrorCode::MalformedCsv, "sensor responses must be finite");
  const int rank = numerical_rank(responses_);
  if (rank < 3) {
    throw VoraError(ErrorCode::RankDeficient, "sensor set has numerical rank " + std::to_string(rank) + " < 3");
  }
}

FilterSpectrum::FilterSpectrum(WavelengthGrid grid, Eigen::VectorXd transmittance, double tau_min, double tau_max)
    : grid_(grid), transmittance_(std::move(transmittance)) {
  if (!(tau_min > 0.0) || !(tau_min <= tau_max)) {
    throw VoraError(ErrorCode::InvalidConfig, "filter box requires 0 < tau_min <= tau_max");
  }
  if (transmittance_.size() != grid_.count) {
    throw VoraError(ErrorCode::ShapeMismatch, "filter length must match the grid");
  }
  for (Eigen::Index i = 0; i < transmittance_.size(); ++i) {
    const double t = transmittance_[i];
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw VoraError(ErrorCode::NonPositiveFilter,
                      "transmittance at " + std::to_string(grid_.wavelength(static_cast<int>(i))) +
                          " nm is not strictly positive");
    }
    if (t < tau_min || t > tau_max) {
      throw VoraError(ErrorCode::OutOfBox, "transmittance at " +
                                               std::to_string(grid_.wavelength(static_cast<int>(i))) +
                                               " nm lies outside [tau_min, tau_max]");
    }
  }
}

FilterSpectrum FilterSpectrum::ones(const WavelengthGrid& grid) {
  return FilterSpectrum(grid, Eigen::VectorXd::Ones(grid.count));
}

namespace {

RawSpectra read_file(const std::filesystem::path& path, int channels) {
  std::ifstream in(path);
  if (!in) throw VoraError(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_spectral_csv(in, channels, path.string());
}

SensorSet sensor_set_from_raw(const RawSpectra& raw, const WavelengthGrid& grid) {
  return SensorSet(grid, resample_to_grid(raw.wavelengths, raw.values, grid),
                   {raw.channel_names[0], raw.channel_names[1], raw.channel_names[2]});
}

}  // namespace

SensorSet load_sensor_set(const std::filesystem::path& path, const WavelengthGrid& grid) {
  const RawSpectra raw = read_file(path, 3);
  try {
    return sensor_set_from_raw(raw, grid);
  } catch (const VoraError& e) {
    throw VoraError(e.code(), path.string() + ": " + e.what());
  }
}

SensorSet sensor_set_from_csv_text(std::string_view text, const WavelengthGrid& grid) {
  return sensor_set_from_raw(parse_spectral_csv_text(text, 3), grid);
}

FilterSpectrum load_filter(const std::filesystem::path& path, const WavelengthGrid& grid) {
  const RawSpectra raw = read_file(path, 1);
  try {
    return FilterSpectrum(grid, resample_to_grid(raw.wavelengths, raw.values, grid).col(0));
  } catch (const VoraError& e) {
    throw VoraError(e.code(), path.string() + ": " + e.what());
  }
}

void write_filter_csv(std::ostream& out, const FilterSpectrum& filter) {
  const auto& grid = filter.grid();
  std::vector<double> wl(static_cast<size_t>(grid.count));
  for (int i = 0; i < grid.count; ++i) wl[static_cast<size_t>(i)] = grid.wavelength(i);
  write_spectral_csv(out, wl, filter.transmittance(), {"transmittance"});
}

SensorSet gaussian_camera(const WavelengthGrid& grid, const std::array<double, 3>& peaks_nm, double sigma_nm) {
  Eigen::MatrixXd q(grid.count, 3);
  for (int i = 0; i < grid.count; ++i) {
    for (int c = 0; c < 3; ++c) {
      const double z = (grid.wavelength(i) - peaks_nm[static_cast<size_t>(c)]) / sigma_nm;
      q(i, c) = std::exp(-0.5 * z * z);
    }
  }
  return SensorSet(grid, std::move(q), {"b", "g", "r"});
}

SensorSet reference_gaussian_camera(const WavelengthGrid& grid) {
  return gaussian_camera(grid, {450.0, 550.0, 600.0}, 30.0);
}

}  // namespace vora

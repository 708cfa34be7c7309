#include "vora/commands.hpp"

#include "vora/error.hpp"
#include "vora/filter_calculus.hpp"
#include "vora/vora_metric.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

namespace vora::cli {

namespace {

using json = nlohmann::json;

std::string fixed12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int exit_code_for(const VoraError& e) {
  switch (e.code()) {
    case ErrorCode::NoAscent:
    case ErrorCode::SingularSystem:
      return kExitStalled;
    default:
      return kExitInput;
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VoraError(ErrorCode::Io, "cannot write '" + path.string() + "'");
  return out;
}

struct LoadedInputs {
  SensorSet camera;
  SensorSet observer;
};

LoadedInputs load_inputs(const InputPaths& paths) {
  return LoadedInputs{load_sensor_set(paths.camera, paths.grid),
                      load_sensor_set(resolve_observer(paths.observer), paths.grid)};
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double relative_error(const Eigen::MatrixXd& value, const Eigen::MatrixXd& reference) {
  const double denom = std::max(max_abs(reference), std::numeric_limits<double>::min());
  return max_abs(value - reference) / denom;
}

}  // namespace

std::filesystem::path resolve_observer(const std::filesystem::path& observer) {
  if (!observer.empty()) return observer;
  const char* dir = std::getenv(kDataEnvVar);
  if (dir == nullptr || *dir == '\0') {
    throw VoraError(ErrorCode::Io, std::string("no --observer given and ") + kDataEnvVar + " is not set");
  }
  return std::filesystem::path(dir) / kDefaultObserverFile;
}

int cmd_evaluate(const EvaluateOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const LoadedInputs in = load_inputs(options.inputs);
    const VoraValue native = vora_value(in.camera, in.observer);
    std::optional<VoraValue> filtered;
    if (options.filter) {
      filtered = filtered_vora_value(in.camera, in.observer, load_filter(*options.filter, options.inputs.grid));
    }
    if (options.json) {
      json j;
      j["schema"] = kJsonSchemaVersion;
      j["command"] = "evaluate";
      j["grid"] = {{"start_nm", options.inputs.grid.start_nm},
                   {"step_nm", options.inputs.grid.step_nm},
                   {"count", options.inputs.grid.count}};
      j["vora_value"] = native.clamped();
      j["vora_value_raw"] = native.raw;
      if (filtered) {
        j["filtered_vora_value"] = filtered->clamped();
        j["filtered_vora_value_raw"] = filtered->raw;
      }
      out << j.dump() << '\n';
    } else {
      out << "grid: " << options.inputs.grid.to_string() << " nm\n";
      out << "vora_value: " << fixed12(native.clamped()) << '\n';
      if (filtered) out << "filtered_vora_value: " << fixed12(filtered->clamped()) << '\n';
    }
    return kExitOk;
  } catch (const VoraError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

void write_trace_csv(std::ostream& out, const OptimizationReport& report) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "iter,vora,mu,step,gradnorm,backtracks\n";
  for (const auto& r : report.iterations) {
    out << r.iter << ',' << r.vora << ',' << r.mu << ',' << r.step << ',' << r.grad_norm << ',' << r.backtracks
        << '\n';
  }
  out.precision(old);
}

void write_coefficients_csv(std::ostream& out, const Eigen::VectorXd& coeffs) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << "index,coefficient\n";
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) out << i << ',' << coeffs[i] << '\n';
  out.precision(old);
}

namespace {

struct Panel {
  double left, top, width, height;
};

void polyline(std::ostream& out, const Panel& p, const std::vector<double>& xs, const std::vector<double>& ys,
              const std::string& title, const std::string& x_label) {
  double x0 = *std::min_element(xs.begin(), xs.end());
  double x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end());
  double y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  out << "<rect x=\"" << p.left << "\" y=\"" << p.top << "\" width=\"" << p.width << "\" height=\"" << p.height
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << p.left << "\" y=\"" << p.top - 6 << "\" font-size=\"13\">" << title << "</text>\n";
  out << "<text x=\"" << p.left + p.width / 2 << "\" y=\"" << p.top + p.height + 16
      << "\" font-size=\"11\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"" << p.left - 4 << "\" y=\"" << p.top + 10 << "\" font-size=\"10\" text-anchor=\"end\">"
      << std::setprecision(6) << y1 << "</text>\n";
  out << "<text x=\"" << p.left - 4 << "\" y=\"" << p.top + p.height << "\" font-size=\"10\" text-anchor=\"end\">"
      << y0 << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  out << std::fixed << std::setprecision(2);
  for (size_t i = 0; i < xs.size(); ++i) {
    const double x = p.left + (xs[i] - x0) / (x1 - x0) * p.width;
    const double y = p.top + p.height - (ys[i] - y0) / (y1 - y0) * p.height;
    out << (i ? " " : "") << x << ',' << y;
  }
  out << "\"/>\n";
  out << std::defaultfloat;
}

}  // namespace

void write_svg(std::ostream& out, const OptimizationReport& report) {
  const auto& grid = report.final_filter.grid();
  std::vector<double> wl;
  std::vector<double> tr;
  for (int i = 0; i < grid.count; ++i) {
    wl.push_back(grid.wavelength(i));
    tr.push_back(report.final_filter.transmittance()[i]);
  }
  std::vector<double> it;
  std::vector<double> nu;
  for (const auto& r : report.iterations) {
    it.push_back(r.iter);
    nu.push_back(r.vora);
  }
  const auto old = out.precision();
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"640\" font-family=\"sans-serif\">\n";
  polyline(out, {80, 30, 600, 230}, wl, tr, "filter transmittance", "wavelength (nm)");
  polyline(out, {80, 350, 600, 230}, it, nu, "Vora-Value per iteration", "iteration");
  out << "</svg>\n";
  out.precision(old);
}

int cmd_optimize(const OptimizeOptions& options, std::ostream& out, std::ostream& err) {
  try {
    // Outputs must not clobber an input or each other.
    std::set<std::filesystem::path> seen{options.inputs.camera.lexically_normal(),
                                         resolve_observer(options.inputs.observer).lexically_normal()};
    if (options.initial_filter) seen.insert(options.initial_filter->lexically_normal());
    for (const auto& p : {options.out_filter, options.out_trace, options.out_svg, options.emit_coeffs}) {
      if (p && !seen.insert(p->lexically_normal()).second) {
        throw VoraError(ErrorCode::InvalidConfig, "path '" + p->string() + "' is used more than once");
      }
    }
    if (options.emit_coeffs && !options.config.basis) {
      throw VoraError(ErrorCode::InvalidConfig, "--emit-coeffs needs --basis");
    }

    const LoadedInputs in = load_inputs(options.inputs);
    OptimizerConfig config = options.config;
    if (options.initial_filter) {
      config.initial_filter = load_filter(*options.initial_filter, options.inputs.grid).transmittance();
    }
    const OptimizationReport report = optimize(in.camera, in.observer, config);

    if (options.out_filter) {
      auto f = open_output(*options.out_filter);
      write_filter_csv(f, report.final_filter);
    }
    if (options.out_trace) {
      auto f = open_output(*options.out_trace);
      write_trace_csv(f, report);
    }
    if (options.out_svg) {
      auto f = open_output(*options.out_svg);
      write_svg(f, report);
    }
    if (options.emit_coeffs && report.coefficients) {
      auto f = open_output(*options.emit_coeffs);
      write_coefficients_csv(f, *report.coefficients);
    }

    if (options.json) {
      json j;
      j["schema"] = kJsonSchemaVersion;
      j["command"] = "optimize";
      j["method"] = to_string(report.method);
      j["alpha"] = report.alpha;
      j["initial_vora"] = report.initial_vora;
      j["final_vora"] = report.final_vora;
      j["iterations"] = report.accepted_steps();
      j["termination"] = to_string(report.termination);
      out << j.dump() << '\n';
    } else {
      out << "method: " << to_string(report.method) << '\n';
      out << "initial_vora: " << fixed12(report.initial_vora) << '\n';
      out << "final_vora: " << fixed12(report.final_vora) << '\n';
      out << "iterations: " << report.accepted_steps() << '\n';
      out << "termination: " << to_string(report.termination) << '\n';
    }
    return report.termination == Termination::Stalled ? kExitStalled : kExitOk;
  } catch (const VoraError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

namespace {

struct CheckRow {
  std::string name;
  double tolerance;
  double max_error = 0.0;
};

}  // namespace

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  if (options.trials < 0) {
    err << "error: trials must be >= 0\n";
    return kExitInput;
  }
  std::optional<LoadedInputs> in;
  try {
    in = load_inputs(options.inputs);
  } catch (const VoraError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  const VoraObjective objective(in->camera, in->observer);
  const int n = objective.size();

  std::vector<CheckRow> rows{
      {"gradient_vs_fd", 1e-5},          {"hessian_vs_fd", 1e-4},        {"hessian_asymmetry", 1e-9},
      {"f_dot_gradient", 1e-10},         {"gradient_plus_hessian_f", 1e-8}, {"f_hess_mu_f_minus_alpha_ff", 1e-8},
      {"newton_closed_form", 1e-8},
  };

  const auto grad_fn = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    Eigen::VectorXd g = gradient(objective, f);
    if (options.sabotage) g[0] *= 1.01;
    return g;
  };
  const auto value_fn = [&](const Eigen::VectorXd& f) { return objective.value(f); };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.2, 1.0);
  try {
    for (int trial = 0; trial < options.trials; ++trial) {
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i) f[i] = unit(rng);

      const Eigen::VectorXd g = grad_fn(f);
      const HessianMatrix h = hessian(objective, f, 0.0);
      auto bump = [](CheckRow& row, double e) { row.max_error = std::max(row.max_error, e); };

      bump(rows[0], relative_error(g, fd_gradient(value_fn, f, 1e-6)));
      bump(rows[1], relative_error(h.matrix, fd_hessian(grad_fn, f, 1e-5)));
      bump(rows[2], h.asymmetry);
      bump(rows[3], std::abs(f.dot(g)) / std::max(f.norm() * g.norm(), std::numeric_limits<double>::min()));
      bump(rows[4], max_abs(g + h.matrix * f));
      for (const double alpha : {1e-6, 1e-4, 1e-2}) {
        const HessianMatrix hm = hessian(objective, f, alpha);
        bump(rows[5], std::abs(f.dot(hm.matrix * f) - alpha * f.squaredNorm()));
      }
      bump(rows[6], relative_error(newton_step(objective, f, 1e-4), newton_step_closed_form(objective, f, 1e-4)));
    }
  } catch (const VoraError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  }

  bool ok = true;
  if (options.json) {
    json j;
    j["schema"] = kJsonSchemaVersion;
    j["command"] = "check";
    j["trials"] = options.trials;
    j["identities"] = json::array();
    for (const auto& r : rows) {
      const bool pass = options.trials == 0 || r.max_error < r.tolerance;
      ok = ok && pass;
      if (options.trials > 0) {
        j["identities"].push_back({{"name", r.name}, {"max_error", r.max_error}, {"tolerance", r.tolerance},
                                   {"pass", pass}});
      }
    }
    j["pass"] = ok;
    out << j.dump() << '\n';
  } else {
    out << std::left << std::setw(30) << "identity" << std::setw(14) << "max_error" << std::setw(12) << "tolerance"
        << "status\n";
    for (const auto& r : rows) {
      if (options.trials == 0) break;
      const bool pass = r.max_error < r.tolerance;
      ok = ok && pass;
      out << std::left << std::setw(30) << r.name << std::setw(14) << sci(r.max_error) << std::setw(12)
          << sci(r.tolerance) << (pass ? "ok" : "FAIL") << '\n';
    }
    out << "trials: " << options.trials << '\n';
  }
  return ok ? kExitOk : kExitVerification;
}

}  // namespace vora::cli

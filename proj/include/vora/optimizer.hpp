#pragma once

#include "vora/filter_calculus.hpp"
#include "vora/spectral_data.hpp"
#include "vora/vora_metric.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vora {

enum class Method { Gradient, Newton };
enum class InitKind { Ones, Random };
enum class Termination { ConvergedObjective, ConvergedGradient, MaxIterations, Stalled };

std::string to_string(Method method);
std::string to_string(Termination termination);
Method parse_method(std::string_view text);

struct BasisSpec {
  BasisKind kind = BasisKind::Cosine;
  int size = 8;
};

struct OptimizerConfig {
  Method method = Method::Gradient;
  double alpha = 1e-4;
  int max_iters = 5000;
  double tol_obj = 1e-12;
  double tol_grad = 1e-8;
  double tau_min = 1e-4;
  double tau_max = 1.0;
  InitKind init = InitKind::Ones;
  std::uint64_t seed = 0;
  std::optional<BasisSpec> basis;
  /// Overrides `init` when set; must lie on the problem grid.
  std::optional<Eigen::VectorXd> initial_filter;
  double shrink = 0.5;
  int max_backtracks = 50;
  /// Keep every accepted filter in the report.
  bool record_iterates = false;

  /// Throws InvalidConfig on any out-of-range field.
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double vora = 0.0;
  double mu = 0.0;
  double step = 0.0;      // accepted line-search step length t (0 for the start point)
  double grad_norm = 0.0; // projected-gradient infinity norm at this iterate
  int backtracks = 0;
};

struct OptimizationReport {
  std::vector<IterationRecord> iterations;  // row 0 is the starting point
  FilterSpectrum final_filter;
  Eigen::VectorXd normalized_filter;        // final_filter / max(final_filter)
  std::optional<Eigen::VectorXd> coefficients;
  std::optional<BasisSet> basis;
  std::vector<Eigen::VectorXd> iterates;    // only with record_iterates
  double initial_vora = 0.0;
  double final_vora = 0.0;
  Termination termination = Termination::MaxIterations;
  Method method = Method::Gradient;
  double alpha = 0.0;

  int accepted_steps() const { return static_cast<int>(iterations.size()) - 1; }
};

/// Regularized Newton step -(grad^2 nu + alpha I)^-1 (grad nu + alpha f), by a
/// symmetric factorization. Throws SingularSystem when the solve fails and
/// InvalidConfig unless alpha > 0.
Eigen::VectorXd newton_step(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha);
Eigen::VectorXd newton_step(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter,
                            double alpha);

/// (grad^2 nu + alpha I)^-1 (grad^2 nu - alpha I) f, the same step rewritten
/// through grad nu = -(grad^2 nu) f.
Eigen::VectorXd newton_step_closed_form(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha);

Eigen::VectorXd project_to_box(const Eigen::VectorXd& v, double tau_min, double tau_max);
FilterSpectrum project_to_box(const WavelengthGrid& grid, const Eigen::VectorXd& v, double tau_min, double tau_max);

/// Monotone ascent on nu(FQ, X) over [tau_min, tau_max]^n (or over f = B c).
/// Throws NoAscent when the very first line search finds no improvement.
OptimizationReport optimize(const VoraObjective& objective, const OptimizerConfig& config);
OptimizationReport optimize(const SensorSet& camera, const SensorSet& observer, const OptimizerConfig& config);

}  // namespace vora

#include "vora/optimizer.hpp"

#include "vora/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vora {

std::string to_string(Method method) { return method == Method::Newton ? "newton" : "grad"; }

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::ConvergedObjective: return "converged_obj";
    case Termination::ConvergedGradient: return "converged_grad";
    case Termination::MaxIterations: return "max_iters";
    case Termination::Stalled: return "stalled";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "grad") return Method::Gradient;
  if (text == "newton") return Method::Newton;
  throw VoraError(ErrorCode::InvalidConfig, "method must be 'grad' or 'newton', got '" + std::string(text) + "'");
}

void OptimizerConfig::validate() const {
  const auto fail = [](const std::string& what) { throw VoraError(ErrorCode::InvalidConfig, what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (method == Method::Newton && !(alpha > 0.0)) fail("the Newton method needs alpha > 0");
  if (max_iters < 0) fail("max_iters must be >= 0");
  if (!(tol_obj >= 0.0) || !(tol_grad >= 0.0)) fail("tolerances must be >= 0");
  if (!(tau_min > 0.0) || !(tau_min < tau_max) || !(tau_max <= 1.0)) fail("need 0 < tau_min < tau_max <= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) fail("line-search shrink factor must lie in (0, 1)");
  if (max_backtracks < 0) fail("max_backtracks must be >= 0");
  if (basis && basis->size < 1) fail("basis size must be >= 1");
}

namespace {

// Solves the symmetric system m x = rhs. LDLT with pivoting handles the
// indefinite matrices that show up away from the optimum; the residual check
// catches the cases where it silently breaks down.
Eigen::VectorXd symmetric_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs) {
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw VoraError(ErrorCode::SingularSystem, "LDLT factorization failed");
  const Eigen::VectorXd x = ldlt.solve(rhs);
  const double scale = m.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
  if (!x.allFinite() || (m * x - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw VoraError(ErrorCode::SingularSystem, "Newton system is numerically singular; increase alpha");
  }
  return x;
}

void check_alpha_positive(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw VoraError(ErrorCode::InvalidConfig, "the Newton step needs alpha > 0");
  }
}

}  // namespace

Eigen::VectorXd newton_step(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha) {
  check_alpha_positive(alpha);
  const HessianMatrix h = hessian(objective, f, alpha);
  const Eigen::VectorXd g = gradient(objective, f);
  return symmetric_solve(h.matrix, -(g + alpha * f));
}

Eigen::VectorXd newton_step(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter,
                            double alpha) {
  if (!(camera.grid() == filter.grid())) throw VoraError(ErrorCode::GridMismatch, "filter grid differs from camera");
  return newton_step(VoraObjective(camera, observer), filter.transmittance(), alpha);
}

Eigen::VectorXd newton_step_closed_form(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha) {
  check_alpha_positive(alpha);
  const Eigen::MatrixXd shifted = hessian(objective, f, alpha).matrix;  // grad^2 nu + alpha I
  const Eigen::MatrixXd minus = shifted - 2.0 * alpha * Eigen::MatrixXd::Identity(f.size(), f.size());
  return symmetric_solve(shifted, minus * f);
}

Eigen::VectorXd project_to_box(const Eigen::VectorXd& v, double tau_min, double tau_max) {
  return v.cwiseMax(tau_min).cwiseMin(tau_max);
}

FilterSpectrum project_to_box(const WavelengthGrid& grid, const Eigen::VectorXd& v, double tau_min, double tau_max) {
  return FilterSpectrum(grid, project_to_box(v, tau_min, tau_max), tau_min, tau_max);
}

namespace {

// The search variable x is either f itself or the basis coefficients c with
// f = B c. nu is invariant under f -> k f, so every trial point is first
// rescaled to max(f) = tau_max; that fixes the gauge and keeps the upper
// bound from throttling the ascent.
class Parameterization {
 public:
  Parameterization(const OptimizerConfig& config, std::optional<BasisSet> basis)
      : tau_min_(config.tau_min), tau_max_(config.tau_max), basis_(std::move(basis)) {}

  bool has_basis() const { return basis_.has_value(); }
  const std::optional<BasisSet>& basis() const { return basis_; }

  Eigen::VectorXd filter(const Eigen::VectorXd& x) const { return basis_ ? basis_->filter(x) : x; }

  /// Returns the feasible point for trial `x`, or nothing when none exists.
  /// Full space: rescale then clip into the box. Basis mode: rescale only,
  /// infeasible if any transmittance falls below tau_min.
  std::optional<Eigen::VectorXd> feasible(const Eigen::VectorXd& x) const {
    if (!x.allFinite()) return std::nullopt;
    const Eigen::VectorXd f = filter(x);
    const double peak = f.maxCoeff();
    if (!(peak > 0.0)) return std::nullopt;
    const double scale = tau_max_ / peak;
    if (!basis_) return project_to_box(scale * x, tau_min_, tau_max_);
    if ((scale * f).minCoeff() < tau_min_) return std::nullopt;
    return Eigen::VectorXd(scale * x);
  }

  Eigen::VectorXd pull_back(const Eigen::VectorXd& grad_f) const {
    return basis_ ? Eigen::VectorXd(basis_->basis.transpose() * grad_f) : grad_f;
  }

  /// Infinity norm of the projected gradient: the box-projected step in the
  /// full space, the plain coefficient gradient in basis mode.
  double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_f) const {
    if (basis_) return pull_back(grad_f).cwiseAbs().maxCoeff();
    return (project_to_box(x + grad_f, tau_min_, tau_max_) - x).cwiseAbs().maxCoeff();
  }

 private:
  double tau_min_;
  double tau_max_;
  std::optional<BasisSet> basis_;
};

Eigen::VectorXd starting_filter(const VoraObjective& objective, const OptimizerConfig& config) {
  const int n = objective.size();
  if (config.initial_filter) {
    if (config.initial_filter->size() != n) {
      throw VoraError(ErrorCode::GridMismatch, "initial filter length does not match the grid");
    }
    require_positive(*config.initial_filter);
    return *config.initial_filter;
  }
  if (config.init == InitKind::Random) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.2, 1.0);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = unit(rng);
    return f;
  }
  return Eigen::VectorXd::Ones(n);
}

Eigen::VectorXd starting_point(const Parameterization& param, const Eigen::VectorXd& f0) {
  if (!param.has_basis()) {
    if (auto x = param.feasible(f0)) return *x;
    throw VoraError(ErrorCode::NonPositiveFilter, "starting filter is infeasible");
  }
  // Least-squares fit of the requested start, pulled towards the fit of the
  // flat filter until B c is feasible.
  const Eigen::MatrixXd& b = param.basis()->basis;
  const auto qr = b.colPivHouseholderQr();
  const Eigen::VectorXd target = qr.solve(f0);
  const Eigen::VectorXd flat = qr.solve(Eigen::VectorXd::Ones(b.rows()).eval());
  double weight = 1.0;
  for (int attempt = 0; attempt < 60; ++attempt, weight *= 0.5) {
    if (auto x = param.feasible(flat + weight * (target - flat))) return *x;
  }
  if (auto x = param.feasible(flat)) return *x;
  throw VoraError(ErrorCode::BadBasisSpec, "basis cannot represent a feasible starting filter");
}

// Ascent direction for the Newton method. The regularized step of the
// negated objective -nu + (alpha/2)|f|^2 is
//   delta = -(-H + alpha I)^-1 (-g + alpha f) = 2 (-H + alpha I)^-1 g - f,
// using H f = -g. Its component along f only rescales the filter, so the
// half-step (delta + f) / 2 = (-H + alpha I)^-1 g is taken. When -H + alpha I
// is not positive definite an extra diagonal shift is added until it is.
Eigen::VectorXd newton_direction(const VoraObjective& objective, const Parameterization& param,
                                 const Eigen::VectorXd& f, const Eigen::VectorXd& g, double alpha) {
  const Eigen::MatrixXd h = hessian(objective, f, 0.0).matrix;
  Eigen::MatrixXd system;
  Eigen::VectorXd rhs;
  if (param.has_basis()) {
    const Eigen::MatrixXd& b = param.basis()->basis;
    system = -(b.transpose() * h * b) + alpha * (b.transpose() * b);
    rhs = b.transpose() * g;
  } else {
    system = -h;
    system.diagonal().array() += alpha;
    rhs = g;
  }
  const double base = std::max(system.cwiseAbs().maxCoeff(), 1.0);
  double shift = 0.0;
  for (int attempt = 0; attempt < 200; ++attempt) {
    Eigen::MatrixXd shifted = system;
    shifted.diagonal().array() += shift;
    const Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(rhs);
      if (d.allFinite()) return d;
    }
    shift = shift == 0.0 ? 1e-12 * base : 2.0 * shift;
  }
  throw VoraError(ErrorCode::SingularSystem, "could not regularize the Newton system");
}

}  // namespace

OptimizationReport optimize(const VoraObjective& objective, const OptimizerConfig& config) {
  config.validate();
  std::optional<BasisSet> basis;
  if (config.basis) basis = make_basis(config.basis->kind, config.basis->size, objective.grid());
  const Parameterization param(config, basis);

  Eigen::VectorXd x = starting_point(param, starting_filter(objective, config));
  Eigen::VectorXd f = param.filter(x);
  double nu = objective.value(f);
  Eigen::VectorXd g = gradient(objective, f);
  double grad_norm = param.projected_gradient_norm(x, g);

  std::vector<IterationRecord> trace;
  trace.push_back({0, nu, nu + 0.5 * config.alpha * f.squaredNorm(), 0.0, grad_norm, 0});
  std::vector<Eigen::VectorXd> iterates;
  if (config.record_iterates) iterates.push_back(f);

  const double initial_vora = nu;
  Termination termination = Termination::MaxIterations;
  int small_changes = 0;

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    if (grad_norm < config.tol_grad) {
      termination = Termination::ConvergedGradient;
      break;
    }
    const Eigen::VectorXd direction = config.method == Method::Newton
                                          ? newton_direction(objective, param, f, g, config.alpha)
                                          : param.pull_back(g);

    double t = 1.0;
    std::optional<Eigen::VectorXd> accepted;
    double accepted_nu = nu;
    int backtracks = 0;
    for (;; ++backtracks) {
      if (auto trial = param.feasible(x + t * direction)) {
        const double trial_nu = objective.value(param.filter(*trial));
        if (trial_nu > nu) {
          accepted = std::move(trial);
          accepted_nu = trial_nu;
          break;
        }
      }
      if (backtracks == config.max_backtracks) break;
      t *= config.shrink;
    }
    if (!accepted) {
      if (iter == 1) throw VoraError(ErrorCode::NoAscent, "line search found no ascent from the starting filter");
      termination = Termination::Stalled;
      break;
    }

    const double change = accepted_nu - nu;
    x = std::move(*accepted);
    f = param.filter(x);
    nu = accepted_nu;
    g = gradient(objective, f);
    grad_norm = param.projected_gradient_norm(x, g);
    trace.push_back({iter, nu, nu + 0.5 * config.alpha * f.squaredNorm(), t, grad_norm, backtracks});
    if (config.record_iterates) iterates.push_back(f);

    small_changes = std::abs(change) < config.tol_obj ? small_changes + 1 : 0;
    if (small_changes >= 3) {
      termination = Termination::ConvergedObjective;
      break;
    }
  }

  std::optional<Eigen::VectorXd> coefficients;
  if (param.has_basis()) coefficients = x;
  const Eigen::VectorXd normalized = f / f.maxCoeff();
  return OptimizationReport{std::move(trace),
                            // B c can sit an ulp outside the box after rescaling.
                            project_to_box(objective.grid(), f, config.tau_min, config.tau_max),
                            normalized,
                            std::move(coefficients),
                            std::move(basis),
                            std::move(iterates),
                            initial_vora,
                            nu,
                            termination,
                            config.method,
                            config.alpha};
}

OptimizationReport optimize(const SensorSet& camera, const SensorSet& observer, const OptimizerConfig& config) {
  return optimize(VoraObjective(camera, observer), config);
}

}  // namespace vora

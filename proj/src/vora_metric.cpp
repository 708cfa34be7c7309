#include "vora/vora_metric.hpp"

#include "vora/error.hpp"

#include <cmath>
#include <string>

namespace vora {

double subspace_vora(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v) {
  return (w.transpose() * v).squaredNorm() / 3.0;
}

VoraObjective::VoraObjective(const SensorSet& camera, const SensorSet& observer)
    : grid_(camera.grid()), camera_(camera.responses()) {
  if (!(camera.grid() == observer.grid())) {
    throw VoraError(ErrorCode::GridMismatch,
                    "camera grid " + camera.grid().to_string() + " vs observer grid " + observer.grid().to_string());
  }
  observer_basis_ = orthonormal_columns(observer.responses());
  observer_projector_ = observer_basis_ * observer_basis_.transpose();
}

void require_positive(const Eigen::VectorXd& f) {
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0.0) || !std::isfinite(f[i])) {
      throw VoraError(ErrorCode::NonPositiveFilter, "filter entry " + std::to_string(i) + " is not strictly positive");
    }
  }
}

Eigen::MatrixXd VoraObjective::filtered_basis(const Eigen::VectorXd& f) const {
  if (f.size() != camera_.rows()) throw VoraError(ErrorCode::GridMismatch, "filter length does not match the grid");
  require_positive(f);
  return orthonormal_columns(f.asDiagonal() * camera_);
}

double VoraObjective::value(const Eigen::VectorXd& f) const {
  return subspace_vora(filtered_basis(f), observer_basis_);
}

double VoraObjective::regularized(const Eigen::VectorXd& f, double alpha) const {
  if (!(alpha >= 0.0)) throw VoraError(ErrorCode::InvalidConfig, "alpha must be nonnegative");
  return value(f) + 0.5 * alpha * f.squaredNorm();
}

VoraValue vora_value(const SensorSet& camera, const SensorSet& observer) {
  const VoraObjective objective(camera, observer);
  return VoraValue{subspace_vora(orthonormal_columns(camera.responses()), objective.observer_basis())};
}

VoraValue filtered_vora_value(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter) {
  if (!(filter.grid() == camera.grid())) {
    throw VoraError(ErrorCode::GridMismatch, "filter grid " + filter.grid().to_string() + " vs camera grid " +
                                                 camera.grid().to_string());
  }
  return filtered_vora_value(camera, observer, filter.transmittance());
}

VoraValue filtered_vora_value(const SensorSet& camera, const SensorSet& observer, const Eigen::VectorXd& f) {
  return VoraValue{VoraObjective(camera, observer).value(f)};
}

double regularized_objective(const SensorSet& camera, const SensorSet& observer, const Eigen::VectorXd& f,
                             double alpha) {
  return VoraObjective(camera, observer).regularized(f, alpha);
}

}  // namespace vora

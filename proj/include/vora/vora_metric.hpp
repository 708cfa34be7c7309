#pragma once

#include "vora/projector_algebra.hpp"
#include "vora/spectral_data.hpp"

#include <Eigen/Dense>

namespace vora {

/// Vora-Value of a camera against an observer. `raw` is the computed trace,
/// which rounding can push a hair outside [0, 1].
struct VoraValue {
  double raw = 0.0;

  double clamped() const { return raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw); }
};

/// (1/3) trace(W W^T V V^T) for orthonormal W, V, evaluated as
/// (1/3) ||W^T V||_F^2.
double subspace_vora(const Eigen::MatrixXd& w, const Eigen::MatrixXd& v);

/// Camera Q and observer X on a shared grid, with the observer basis V and
/// projector P{X} = V V^T cached. Everything that varies with the filter is
/// recomputed per call.
class VoraObjective {
 public:
  /// Throws GridMismatch when the two sensor sets live on different grids.
  VoraObjective(const SensorSet& camera, const SensorSet& observer);

  const WavelengthGrid& grid() const { return grid_; }
  int size() const { return grid_.count; }
  const Eigen::MatrixXd& camera() const { return camera_; }
  const Eigen::MatrixXd& observer_basis() const { return observer_basis_; }
  const Eigen::MatrixXd& observer_projector() const { return observer_projector_; }

  /// nu(FQ, X) for a strictly positive transmittance vector (any scale).
  double value(const Eigen::VectorXd& f) const;
  /// mu(f) = nu(FQ, X) + (alpha / 2) f^T f.
  double regularized(const Eigen::VectorXd& f, double alpha) const;
  /// Orthonormal basis of diag(f) Q.
  Eigen::MatrixXd filtered_basis(const Eigen::VectorXd& f) const;

 private:
  WavelengthGrid grid_;
  Eigen::MatrixXd camera_;
  Eigen::MatrixXd observer_basis_;
  Eigen::MatrixXd observer_projector_;
};

/// Throws NonPositiveFilter unless every entry is finite and > 0.
void require_positive(const Eigen::VectorXd& f);

VoraValue vora_value(const SensorSet& camera, const SensorSet& observer);
VoraValue filtered_vora_value(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter);
VoraValue filtered_vora_value(const SensorSet& camera, const SensorSet& observer, const Eigen::VectorXd& f);
double regularized_objective(const SensorSet& camera, const SensorSet& observer, const Eigen::VectorXd& f,
                             double alpha);

}  // namespace vora

#pragma once

#include "vora/spectral_data.hpp"

#include <Eigen/Dense>

namespace vora {

/// Orthonormal columns spanning the same space as a sensor set (V for the
/// observer, W for the camera).
struct OrthonormalBasis {
  WavelengthGrid grid;
  Eigen::MatrixXd basis;
};

/// Symmetric idempotent n x n matrix onto a column space.
struct ProjectorMatrix {
  Eigen::MatrixXd matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Gram-Schmidt with one full re-orthogonalization pass per column. Throws
/// RankDeficient when a column has no component left outside the span of its
/// predecessors (relative residual below rows * eps * 1e3).
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m);

OrthonormalBasis orthonormalize(const SensorSet& sensors);

/// P = V V^T with V = orthonormal_columns(m); the normal-equations inverse is
/// never formed.
ProjectorMatrix projector(const Eigen::MatrixXd& m);
ProjectorMatrix projector(const OrthonormalBasis& basis);

Eigen::VectorXd ediag(const Eigen::MatrixXd& square);
Eigen::MatrixXd diag_of(const Eigen::VectorXd& v);
Eigen::MatrixXd hadamard(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace vora

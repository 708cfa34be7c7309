#include "vora/projector_algebra.hpp"

#include "vora/error.hpp"

#include <limits>
#include <string>

namespace vora {

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (cols == 0 || cols > rows) {
    throw VoraError(ErrorCode::RankDeficient, "cannot orthonormalize a " + std::to_string(rows) + " x " +
                                                  std::to_string(cols) + " matrix");
  }
  const double tol = static_cast<double>(rows) * std::numeric_limits<double>::epsilon() * 1e3;

  Eigen::MatrixXd q = m;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double original = q.col(j).norm();
    if (!(original > 0.0)) throw VoraError(ErrorCode::RankDeficient, "zero column " + std::to_string(j));
    // Two modified Gram-Schmidt sweeps restore orthogonality lost to
    // cancellation when columns are nearly dependent.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    }
    const double residual = q.col(j).norm();
    if (!(residual > tol * original)) {
      throw VoraError(ErrorCode::RankDeficient,
                      "column " + std::to_string(j) + " lies in the span of the preceding columns");
    }
    q.col(j) /= residual;
  }
  return q;
}

OrthonormalBasis orthonormalize(const SensorSet& sensors) {
  return OrthonormalBasis{sensors.grid(), orthonormal_columns(sensors.responses())};
}

ProjectorMatrix projector(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd v = orthonormal_columns(m);
  return ProjectorMatrix{v * v.transpose()};
}

ProjectorMatrix projector(const OrthonormalBasis& basis) {
  return ProjectorMatrix{basis.basis * basis.basis.transpose()};
}

Eigen::VectorXd ediag(const Eigen::MatrixXd& square) {
  if (square.rows() != square.cols()) throw VoraError(ErrorCode::ShapeMismatch, "ediag needs a square matrix");
  return square.diagonal();
}

Eigen::MatrixXd diag_of(const Eigen::VectorXd& v) { return v.asDiagonal(); }

Eigen::MatrixXd hadamard(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw VoraError(ErrorCode::ShapeMismatch, "hadamard operands differ in shape");
  }
  return a.cwiseProduct(b);
}

}  // namespace vora

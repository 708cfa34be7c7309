#pragma once

// Test-only reference computations. Everything here takes a different
// algebraic route from the library: explicit normal-equation inverses instead
// of orthonormal bases, and a Hessian assembled from the projector
// differential dP = (I - P) dF F^-1 P + P F^-1 dF (I - P) rather than from
// the four-term Hadamard form.

#include "vora/spectral_data.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>

namespace vora::oracle {

inline std::string data_path(const std::string& name) { return std::string(VORA_DATA_DIR) + "/" + name; }

inline SensorSet cie_observer(const WavelengthGrid& grid = {}) {
  return load_sensor_set(data_path("cie1931_2deg_5nm.csv"), grid);
}

/// Q (Q^T Q)^-1 Q^T with an explicit inverse.
inline Eigen::MatrixXd normal_equation_projector(const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd gram_inv = (q.transpose() * q).inverse();
  return q * gram_inv * q.transpose();
}

/// (1/3) tr(Q (Q^T Q)^-1 Q^T X (X^T X)^-1 X^T).
inline double direct_vora(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x) {
  return (normal_equation_projector(q) * normal_equation_projector(x)).trace() / 3.0;
}

/// (1/3) tr(F Q (Q^T F^2 Q)^-1 Q^T F X (X^T X)^-1 X^T).
inline double direct_filtered_vora(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x, const Eigen::VectorXd& f) {
  const Eigen::MatrixXd fq = f.asDiagonal() * q;
  const Eigen::MatrixXd inner = (q.transpose() * f.array().square().matrix().asDiagonal() * q).inverse();
  const Eigen::MatrixXd px = normal_equation_projector(x);
  return (fq * inner * fq.transpose() * px).trace() / 3.0;
}

/// Hessian of nu(FQ, X) from differentiating g_i = (2/3)[C B A (I - B)]_ii
/// term by term with the projector differential above.
inline Eigen::MatrixXd chain_rule_hessian(const Eigen::MatrixXd& q, const Eigen::MatrixXd& x,
                                          const Eigen::VectorXd& f) {
  const Eigen::Index n = f.size();
  const Eigen::MatrixXd a = normal_equation_projector(x);
  const Eigen::MatrixXd b = normal_equation_projector(f.asDiagonal() * q);
  const Eigen::MatrixXd c = f.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd cbai = c * b * a * (i - b);
  Eigen::MatrixXd h = -c.cwiseProduct(cbai.transpose());
  h += (c * (i - b)).cwiseProduct(((i - b) * a * b * c));
  h += (c * b * c).cwiseProduct((i - b) * a * (i - b));
  h -= cbai.cwiseProduct(b * c);
  h -= (c * b * a * b * c).cwiseProduct(i - b);
  return (2.0 / 3.0) * h;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& fn,
                                          const Eigen::VectorXd& at, double h) {
  Eigen::VectorXd out(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Eigen::VectorXd up = at;
    Eigen::VectorXd down = at;
    up[i] += h;
    down[i] -= h;
    out[i] = (fn(up) - fn(down)) / (2.0 * h);
  }
  return out;
}

inline Eigen::MatrixXd central_difference_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                                                   const Eigen::VectorXd& at, double h) {
  Eigen::MatrixXd out(at.size(), at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    Eigen::VectorXd up = at;
    Eigen::VectorXd down = at;
    up[j] += h;
    down[j] -= h;
    out.col(j) = (fn(up) - fn(down)) / (2.0 * h);
  }
  return out;
}

/// max |a - b| / max |b|.
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }

  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(engine);
    return m;
  }

  /// Positive transmittances in [lo, hi].
  Eigen::VectorXd filter(Eigen::Index n, double lo = 0.2, double hi = 1.0) {
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = uniform(lo, hi);
    return f;
  }

  /// Well-conditioned invertible 3 x 3 transform.
  Eigen::Matrix3d invertible3() {
    while (true) {
      const Eigen::Matrix3d t = matrix(3, 3);
      const Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
      if (svd.singularValues()[2] > 0.1 * svd.singularValues()[0]) return t;
    }
  }

  /// Three Gaussian channels with random peaks and widths.
  SensorSet gaussian_camera(const WavelengthGrid& grid = {}) {
    std::array<double, 3> peaks{uniform(420, 480), uniform(500, 570), uniform(580, 660)};
    Eigen::MatrixXd q(grid.count, 3);
    for (int c = 0; c < 3; ++c) {
      const double sigma = uniform(20, 60);
      for (int i = 0; i < grid.count; ++i) {
        const double z = (grid.wavelength(i) - peaks[static_cast<size_t>(c)]) / sigma;
        q(i, c) = std::exp(-0.5 * z * z);
      }
    }
    return SensorSet(grid, q);
  }

  std::mt19937_64 engine;
};

}  // namespace vora::oracle

#pragma once

// Analytic first and second derivatives of the filter-modified Vora-Value
// with respect to the per-wavelength transmittance vector f, the chain rule
// into a smooth basis f = B c, and central-difference oracles.

#include "vora/spectral_data.hpp"
#include "vora/vora_metric.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <string_view>

namespace vora {

struct GradientVector {
  WavelengthGrid grid;
  Eigen::VectorXd values;
};

struct HessianMatrix {
  /// Symmetrized (H + H^T) / 2.
  Eigen::MatrixXd matrix;
  /// max |H - H^T| of the assembled matrix before symmetrization.
  double asymmetry = 0.0;
};

enum class BasisKind { Cosine, Gaussian, Identity };

std::string to_string(BasisKind kind);

struct BasisSet {
  WavelengthGrid grid;
  Eigen::MatrixXd basis;  // n x k
  BasisKind kind = BasisKind::Identity;

  Eigen::Index dimension() const { return basis.cols(); }
  Eigen::VectorXd filter(const Eigen::VectorXd& coeffs) const;
};

/// grad nu(f) = (2/3) ediag(F^-1 P{FQ} P{X} (I - P{FQ})).
Eigen::VectorXd gradient(const VoraObjective& objective, const Eigen::VectorXd& f);
GradientVector gradient(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter);

/// Hessian of mu(f) = nu(FQ, X) + (alpha/2) f^T f. With A = P{X}, B = P{FQ},
/// C = F^-1:
///   (2/3) [ -2 (CB) o ((I-B)ABC) + (CBC) o ((I-B)A)
///           - (CBA(I-2B)) o (BC) - (CBABC) o I ] + alpha I
Eigen::MatrixXd hessian_unsymmetrized(const VoraObjective& objective, const Eigen::VectorXd& f);
HessianMatrix hessian(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha);
HessianMatrix hessian(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter,
                      double alpha);

/// B^T grad nu(B c). Throws NonPositiveFilter when B c has an entry <= 0.
Eigen::VectorXd gradient_in_basis(const VoraObjective& objective, const BasisSet& basis,
                                  const Eigen::VectorXd& coeffs);
Eigen::VectorXd gradient_in_basis(const SensorSet& camera, const SensorSet& observer, const BasisSet& basis,
                                  const Eigen::VectorXd& coeffs);
/// B^T (Hessian of mu at B c) B.
Eigen::MatrixXd hessian_in_basis(const VoraObjective& objective, const BasisSet& basis,
                                 const Eigen::VectorXd& coeffs, double alpha);

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;
using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central differences (g(f + h e_i) - g(f - h e_i)) / 2h. Throws StepTooLarge
/// when f - h e_i would leave the positive orthant.
Eigen::VectorXd fd_gradient(const ScalarFunction& objective, const Eigen::VectorXd& f, double h);
/// Column j holds the central difference of `grad` along e_j.
Eigen::MatrixXd fd_hessian(const VectorFunction& grad, const Eigen::VectorXd& f, double h);

/// cosine: DCT-II atoms cos(pi j (i + 1/2) / n), j = 0..k-1.
/// gaussian: k bumps with evenly spaced centres and sigma = span / k.
/// identity: first k columns of I.
BasisSet make_basis(BasisKind kind, int k, const WavelengthGrid& grid);
/// Parses "kind:k", e.g. "cosine:8".
BasisSet parse_basis_spec(std::string_view spec, const WavelengthGrid& grid);

}  // namespace vora

#include "vora/filter_calculus.hpp"

#include "vora/error.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace vora {

namespace {

struct FilterTerms {
  Eigen::MatrixXd b;        // P{FQ}
  Eigen::VectorXd inv_f;    // diagonal of C = F^-1
};

FilterTerms filter_terms(const VoraObjective& objective, const Eigen::VectorXd& f) {
  const Eigen::MatrixXd w = objective.filtered_basis(f);
  return FilterTerms{w * w.transpose(), f.cwiseInverse()};
}

void check_grid(const SensorSet& camera, const FilterSpectrum& filter) {
  if (!(camera.grid() == filter.grid())) {
    throw VoraError(ErrorCode::GridMismatch, "filter grid " + filter.grid().to_string() + " vs camera grid " +
                                                 camera.grid().to_string());
  }
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw VoraError(ErrorCode::InvalidConfig, "alpha must be >= 0");
}

void check_coeffs(const BasisSet& basis, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != basis.dimension()) {
    throw VoraError(ErrorCode::ShapeMismatch, "expected " + std::to_string(basis.dimension()) + " coefficients");
  }
}

}  // namespace

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Cosine: return "cosine";
    case BasisKind::Gaussian: return "gaussian";
    case BasisKind::Identity: return "identity";
  }
  return "unknown";
}

Eigen::VectorXd BasisSet::filter(const Eigen::VectorXd& coeffs) const {
  check_coeffs(*this, coeffs);
  return basis * coeffs;
}

Eigen::VectorXd gradient(const VoraObjective& objective, const Eigen::VectorXd& f) {
  const FilterTerms t = filter_terms(objective, f);
  const Eigen::Index n = f.size();
  const Eigen::MatrixXd& a = objective.observer_projector();
  const Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(n, n) - t.b;
  // Only the diagonal of B A (I - B) is needed.
  const Eigen::MatrixXd ba = t.b * a;
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = ba.row(i).dot(complement.col(i)) * t.inv_f[i];
  return (2.0 / 3.0) * g;
}

GradientVector gradient(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter) {
  check_grid(camera, filter);
  return GradientVector{camera.grid(), gradient(VoraObjective(camera, observer), filter.transmittance())};
}

Eigen::MatrixXd hessian_unsymmetrized(const VoraObjective& objective, const Eigen::VectorXd& f) {
  const FilterTerms t = filter_terms(objective, f);
  const Eigen::Index n = f.size();
  const Eigen::MatrixXd& a = objective.observer_projector();
  const Eigen::MatrixXd& b = t.b;
  const auto c = t.inv_f.asDiagonal();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd cb = c * b;
  const Eigen::MatrixXd bc = b * c;
  const Eigen::MatrixXd abc = a * bc;
  const Eigen::MatrixXd cba = cb * a;

  Eigen::MatrixXd h = -2.0 * hadamard(cb, (id - b) * abc);
  h += hadamard(cb * c, (id - b) * a);
  h -= hadamard(cba * (id - 2.0 * b), bc);
  h -= hadamard(cba * bc, id);
  return (2.0 / 3.0) * h;
}

HessianMatrix hessian(const VoraObjective& objective, const Eigen::VectorXd& f, double alpha) {
  check_alpha(alpha);
  const Eigen::MatrixXd raw = hessian_unsymmetrized(objective, f);
  HessianMatrix out;
  out.asymmetry = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  out.matrix = 0.5 * (raw + raw.transpose());
  out.matrix.diagonal().array() += alpha;
  return out;
}

HessianMatrix hessian(const SensorSet& camera, const SensorSet& observer, const FilterSpectrum& filter,
                      double alpha) {
  check_grid(camera, filter);
  return hessian(VoraObjective(camera, observer), filter.transmittance(), alpha);
}

Eigen::VectorXd gradient_in_basis(const VoraObjective& objective, const BasisSet& basis,
                                  const Eigen::VectorXd& coeffs) {
  const Eigen::VectorXd f = basis.filter(coeffs);
  return basis.basis.transpose() * gradient(objective, f);
}

Eigen::VectorXd gradient_in_basis(const SensorSet& camera, const SensorSet& observer, const BasisSet& basis,
                                  const Eigen::VectorXd& coeffs) {
  if (!(basis.grid == camera.grid())) throw VoraError(ErrorCode::GridMismatch, "basis grid differs from camera grid");
  return gradient_in_basis(VoraObjective(camera, observer), basis, coeffs);
}

Eigen::MatrixXd hessian_in_basis(const VoraObjective& objective, const BasisSet& basis,
                                 const Eigen::VectorXd& coeffs, double alpha) {
  const Eigen::VectorXd f = basis.filter(coeffs);
  const HessianMatrix h = hessian(objective, f, alpha);
  return basis.basis.transpose() * h.matrix * basis.basis;
}

Eigen::VectorXd fd_gradient(const ScalarFunction& objective, const Eigen::VectorXd& f, double h) {
  if (!(h > 0.0)) throw VoraError(ErrorCode::StepTooLarge, "finite-difference step must be positive");
  if (f.size() > 0 && !(f.minCoeff() - h > 0.0)) {
    throw VoraError(ErrorCode::StepTooLarge, "f - h leaves the positive orthant");
  }
  Eigen::VectorXd g(f.size());
  Eigen::VectorXd probe = f;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    probe[i] = f[i] + h;
    const double up = objective(probe);
    probe[i] = f[i] - h;
    const double down = objective(probe);
    probe[i] = f[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const VectorFunction& grad, const Eigen::VectorXd& f, double h) {
  if (!(h > 0.0)) throw VoraError(ErrorCode::StepTooLarge, "finite-difference step must be positive");
  if (f.size() > 0 && !(f.minCoeff() - h > 0.0)) {
    throw VoraError(ErrorCode::StepTooLarge, "f - h leaves the positive orthant");
  }
  Eigen::MatrixXd hess(f.size(), f.size());
  Eigen::VectorXd probe = f;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    probe[j] = f[j] + h;
    const Eigen::VectorXd up = grad(probe);
    probe[j] = f[j] - h;
    const Eigen::VectorXd down = grad(probe);
    probe[j] = f[j];
    hess.col(j) = (up - down) / (2.0 * h);
  }
  return hess;
}

BasisSet make_basis(BasisKind kind, int k, const WavelengthGrid& grid) {
  const int n = grid.count;
  if (k < 1 || k > n) {
    throw VoraError(ErrorCode::BadBasisSpec, "basis size " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  Eigen::MatrixXd b(n, k);
  switch (kind) {
    case BasisKind::Cosine:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) b(i, j) = std::cos(std::numbers::pi * j * (i + 0.5) / n);
      }
      break;
    case BasisKind::Gaussian: {
      const double span = grid.end_nm() - grid.start_nm;
      const double sigma = span / k;
      for (int j = 0; j < k; ++j) {
        const double centre = k == 1 ? grid.start_nm + 0.5 * span : grid.start_nm + span * j / (k - 1);
        for (int i = 0; i < n; ++i) {
          const double z = (grid.wavelength(i) - centre) / sigma;
          b(i, j) = std::exp(-0.5 * z * z);
        }
      }
      break;
    }
    case BasisKind::Identity:
      b = Eigen::MatrixXd::Identity(n, k);
      break;
  }
  if (numerical_rank(b) < k) throw VoraError(ErrorCode::BadBasisSpec, "basis columns are not independent");
  return BasisSet{grid, std::move(b), kind};
}

BasisSet parse_basis_spec(std::string_view spec, const WavelengthGrid& grid) {
  const size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw VoraError(ErrorCode::BadBasisSpec, "expected kind:k, got '" + std::string(spec) + "'");
  }
  const std::string_view name = spec.substr(0, colon);
  const std::string_view count = spec.substr(colon + 1);
  int k = 0;
  const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), k);
  if (ec != std::errc() || ptr != count.data() + count.size()) {
    throw VoraError(ErrorCode::BadBasisSpec, "basis size '" + std::string(count) + "' is not an integer");
  }
  BasisKind kind;
  if (name == "cosine") {
    kind = BasisKind::Cosine;
  } else if (name == "gaussian") {
    kind = BasisKind::Gaussian;
  } else if (name == "identity") {
    kind = BasisKind::Identity;
  } else {
    throw VoraError(ErrorCode::BadBasisSpec, "unknown basis kind '" + std::string(name) + "'");
  }
  return make_basis(kind, k, grid);
}

}  // namespace vora

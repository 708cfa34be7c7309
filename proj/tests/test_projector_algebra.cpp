#include "doctest.h"
#include "oracles.hpp"

#include "vora/error.hpp"
#include "vora/projector_algebra.hpp"

using namespace vora;

namespace {

Eigen::MatrixXd identity3(Eigen::Index n) { return Eigen::MatrixXd::Identity(n, 3); }

/// Householder Q factor, used as an independent orthonormalization.
Eigen::MatrixXd householder_q(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

TEST_CASE("orthonormal_columns") {
  oracle::Rng rng(11);
  SUBCASE("random inputs give orthonormal output") {
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::MatrixXd m = rng.matrix(31, 3);
      const Eigen::MatrixXd v = orthonormal_columns(m);
      CHECK(oracle::max_abs(v.transpose() * v - Eigen::Matrix3d::Identity()) < 1e-12);
      const Eigen::MatrixXd u = householder_q(m);
      CHECK(oracle::max_abs(v * v.transpose() - u * u.transpose()) < 1e-12);
    }
  }
  SUBCASE("already orthonormal input keeps its projector") {
    const Eigen::MatrixXd u = householder_q(rng.matrix(31, 3));
    const Eigen::MatrixXd v = orthonormal_columns(u);
    CHECK(oracle::max_abs(v * v.transpose() - u * u.transpose()) < 1e-14);
  }
  SUBCASE("degenerate columns are rank deficient") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(31, 3);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(0, 2) = 1;
    m(1, 2) = 1;
    CHECK_THROWS_AS(orthonormal_columns(m), VoraError);
    try {
      orthonormal_columns(m);
    } catch (const VoraError& e) {
      CHECK(e.code() == ErrorCode::RankDeficient);
    }
  }
  SUBCASE("condition number 1e6 still orthonormal") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd u = householder_q(rng.matrix(31, 3));
      const Eigen::MatrixXd r = householder_q(rng.matrix(3, 3));
      const Eigen::MatrixXd m = u * Eigen::Vector3d(1.0, 1e-3, 1e-6).asDiagonal() * r.transpose();
      const Eigen::MatrixXd v = orthonormal_columns(m);
      CHECK(oracle::max_abs(v.transpose() * v - Eigen::Matrix3d::Identity()) < 1e-9);
      CHECK(oracle::max_abs(v * v.transpose() - u * u.transpose()) < 1e-9);
    }
  }
}

TEST_CASE("projector") {
  SUBCASE("coordinate subspace") {
    const ProjectorMatrix p = projector(identity3(31));
    Eigen::VectorXd d = Eigen::VectorXd::Zero(31);
    d.head(3).setOnes();
    CHECK(oracle::max_abs(p.matrix - Eigen::MatrixXd(d.asDiagonal())) < 1e-15);
  }
  SUBCASE("agrees with the normal-equation form on the CIE observer") {
    const Eigen::MatrixXd x = oracle::cie_observer().responses();
    CHECK(oracle::max_abs(projector(x).matrix - oracle::normal_equation_projector(x)) < 1e-10);
    const OrthonormalBasis v = orthonormalize(oracle::cie_observer());
    CHECK(oracle::max_abs(projector(v).matrix - projector(x).matrix) < 1e-15);
  }
  SUBCASE("symmetric, idempotent and basis invariant") {
    oracle::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::MatrixXd m = rng.matrix(31, 3);
      const Eigen::MatrixXd p = projector(m).matrix;
      CHECK(oracle::max_abs(p - p.transpose()) < 1e-14);
      CHECK(oracle::max_abs(p * p - p) < 1e-12);
      CHECK(std::abs(p.trace() - 3.0) < 1e-12);
      CHECK(oracle::max_abs(projector(m * rng.invertible3()).matrix - p) < 1e-10);
    }
  }
}

TEST_CASE("diagonal helpers") {
  const Eigen::Vector3d v(1, 2, 3);
  CHECK(ediag(diag_of(v)) == Eigen::VectorXd(v));
  oracle::Rng rng(2);
  const Eigen::MatrixXd a = rng.matrix(5, 5);
  const Eigen::MatrixXd masked = hadamard(Eigen::MatrixXd::Identity(5, 5), a);
  CHECK(masked == Eigen::MatrixXd(a.diagonal().asDiagonal()));
  CHECK(hadamard(a, a) == a.cwiseProduct(a));
  CHECK_THROWS_AS(hadamard(a, rng.matrix(5, 4)), VoraError);
  CHECK_THROWS_AS(ediag(rng.matrix(3, 4)), VoraError);
}

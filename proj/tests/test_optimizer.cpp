#include "doctest.h"
#include "oracles.hpp"

#include "vora/error.hpp"
#include "vora/optimizer.hpp"

using namespace vora;

namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b) / (a.norm() * b.norm()); }

bool monotone(const OptimizationReport& report) {
  for (size_t i = 1; i < report.iterations.size(); ++i) {
    if (report.iterations[i].vora < report.iterations[i - 1].vora) return false;
  }
  return true;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const VoraError& e) {
    return e.code();
  }
  FAIL("expected a VoraError");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("project_to_box") {
  CHECK(project_to_box(Eigen::Vector3d(1.2, 0.5, -0.1), 1e-4, 1.0) == Eigen::VectorXd(Eigen::Vector3d(1.0, 0.5, 1e-4)));
  const Eigen::VectorXd inside = Eigen::Vector3d(0.3, 1.0, 1e-4);
  CHECK(project_to_box(inside, 1e-4, 1.0) == inside);
  CHECK(project_to_box(Eigen::Vector3d(-1, -2, -3), 1e-4, 1.0) == Eigen::VectorXd::Constant(3, 1e-4));
  const FilterSpectrum f = project_to_box(WavelengthGrid{}, Eigen::VectorXd::Constant(31, 2.0), 1e-4, 1.0);
  CHECK(f.transmittance() == Eigen::VectorXd::Ones(31));
}

TEST_CASE("newton_step") {
  const SensorSet x = oracle::cie_observer();
  oracle::Rng rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    const VoraObjective obj(rng.gaussian_camera(), x);
    const Eigen::VectorXd f = rng.filter(31);
    for (double alpha : {1e-6, 1e-4, 1e-2}) {
      CHECK(oracle::rel_err(newton_step(obj, f, alpha), newton_step_closed_form(obj, f, alpha)) < 1e-8);
    }
    CHECK(cosine(newton_step(obj, f, 1e-12), f) > 1.0 - 1e-4);
  }
  const VoraObjective obj(reference_gaussian_camera(), x);
  CHECK(code_of([&] { newton_step(obj, Eigen::VectorXd::Ones(31), 0.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("optimizer on a colorimetric camera stops at once") {
  const SensorSet x = oracle::cie_observer();
  oracle::Rng rng(71);
  const SensorSet q(x.grid(), x.responses() * rng.invertible3());
  for (Method m : {Method::Gradient, Method::Newton}) {
    OptimizerConfig config;
    config.method = m;
    const OptimizationReport r = optimize(q, x, config);
    CHECK(r.accepted_steps() <= 2);
    CHECK(std::abs(r.final_vora - 1.0) < 1e-10);
    CHECK(oracle::max_abs(r.final_filter.transmittance() - Eigen::VectorXd::Ones(31)) < 1e-6);
  }
}

TEST_CASE("optimizer on the reference Gaussian camera") {
  const SensorSet x = oracle::cie_observer();
  const SensorSet q = reference_gaussian_camera();
  const VoraObjective obj(q, x);
  const double start = obj.value(Eigen::VectorXd::Ones(31));

  OptimizerConfig grad_config;
  grad_config.record_iterates = true;
  const OptimizationReport grad = optimize(obj, grad_config);

  OptimizerConfig newton_config;
  newton_config.method = Method::Newton;
  newton_config.alpha = 1e-4;
  newton_config.record_iterates = true;
  const OptimizationReport newton = optimize(obj, newton_config);

  SUBCASE("both methods improve and stay monotone and feasible") {
    for (const OptimizationReport* r : {&grad, &newton}) {
      CHECK(r->initial_vora == start);
      CHECK(r->final_vora - start >= 1e-4);
      CHECK(monotone(*r));
      CHECK(r->final_vora == r->iterations.back().vora);
      CHECK(r->final_filter.transmittance().minCoeff() >= 1e-4);
      CHECK(r->final_filter.transmittance().maxCoeff() <= 1.0);
      CHECK(std::abs(r->normalized_filter.maxCoeff() - 1.0) < 1e-15);
      CHECK(r->final_vora == obj.value(r->final_filter.transmittance()));
      for (const Eigen::VectorXd& f : r->iterates) {
        CHECK(f.minCoeff() >= 1e-4);
        CHECK(f.maxCoeff() <= 1.0);
      }
    }
    CHECK(newton.termination != Termination::Stalled);
  }
  SUBCASE("Newton reaches the gradient plateau in a fifth of the iterations") {
    const double plateau = grad.final_vora;
    int newton_iters = -1;
    for (const IterationRecord& rec : newton.iterations) {
      if (rec.vora >= plateau - 1e-9) {
        newton_iters = rec.iter;
        break;
      }
    }
    REQUIRE(newton_iters >= 0);
    int grad_iters = -1;
    for (const IterationRecord& rec : grad.iterations) {
      if (rec.vora >= plateau - 1e-9) {
        grad_iters = rec.iter;
        break;
      }
    }
    MESSAGE("newton " << newton_iters << " vs grad " << grad_iters << " iterations to the plateau");
    CHECK(5 * newton_iters <= grad_iters);
  }
  SUBCASE("closed-form step at logged Newton iterates") {
    for (const Eigen::VectorXd& f : newton.iterates) {
      CHECK(oracle::rel_err(newton_step(obj, f, 1e-4), newton_step_closed_form(obj, f, 1e-4)) < 1e-8);
    }
  }
  SUBCASE("random search does not beat the optimizer") {
    oracle::Rng rng(73);
    double best = 0.0;
    for (int i = 0; i < 20000; ++i) best = std::max(best, obj.value(rng.filter(31, 1e-4, 1.0)));
    CHECK(best <= std::max(grad.final_vora, newton.final_vora) + 1e-6);
  }
}

TEST_CASE("optimizer determinism and gauge") {
  const SensorSet x = oracle::cie_observer();
  const SensorSet q = reference_gaussian_camera();
  OptimizerConfig config;
  config.max_iters = 400;

  SUBCASE("initial scale only changes the gauge") {
    const OptimizationReport a = optimize(q, x, config);
    config.initial_filter = Eigen::VectorXd::Constant(31, 0.5);
    const OptimizationReport b = optimize(q, x, config);
    CHECK(oracle::max_abs(a.normalized_filter - b.normalized_filter) < 1e-6);
  }
  SUBCASE("random init is reproducible") {
    config.init = InitKind::Random;
    config.seed = 99;
    const OptimizationReport a = optimize(q, x, config);
    const OptimizationReport b = optimize(q, x, config);
    REQUIRE(a.iterations.size() == b.iterations.size());
    CHECK(a.final_filter.transmittance() == b.final_filter.transmittance());
    config.seed = 100;
    const OptimizationReport c = optimize(q, x, config);
    CHECK(c.iterations.front().vora != a.iterations.front().vora);
  }
}

TEST_CASE("basis-constrained optimization") {
  const SensorSet x = oracle::cie_observer();
  const SensorSet q = reference_gaussian_camera();
  for (Method m : {Method::Gradient, Method::Newton}) {
    OptimizerConfig config;
    config.method = m;
    config.basis = BasisSpec{BasisKind::Cosine, 8};
    config.max_iters = 500;
    const OptimizationReport r = optimize(q, x, config);
    REQUIRE(r.coefficients);
    REQUIRE(r.basis);
    CHECK(r.coefficients->size() == 8);
    CHECK(oracle::max_abs(r.basis->filter(*r.coefficients) - r.final_filter.transmittance()) < 1e-12);
    CHECK(r.final_vora > r.initial_vora);
    CHECK(monotone(r));
  }
}

TEST_CASE("optimizer configuration errors") {
  const SensorSet x = oracle::cie_observer();
  const SensorSet q = reference_gaussian_camera();
  OptimizerConfig config;
  config.method = Method::Newton;
  config.alpha = 0.0;
  CHECK(code_of([&] { optimize(q, x, config); }) == ErrorCode::InvalidConfig);
  config = {};
  config.tau_min = 0.0;
  CHECK(code_of([&] { optimize(q, x, config); }) == ErrorCode::InvalidConfig);
  config = {};
  config.initial_filter = Eigen::VectorXd::Ones(30);
  CHECK_THROWS_AS(optimize(q, x, config), VoraError);
  CHECK(parse_method("grad") == Method::Gradient);
  CHECK(parse_method("newton") == Method::Newton);
  CHECK(code_of([] { parse_method("bfgs"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("max_iters of zero reports the start") {
  OptimizerConfig config;
  config.max_iters = 0;
  const OptimizationReport r = optimize(reference_gaussian_camera(), oracle::cie_observer(), config);
  CHECK(r.accepted_steps() == 0);
  CHECK(r.termination == Termination::MaxIterations);
  CHECK(r.final_vora == r.initial_vora);
}

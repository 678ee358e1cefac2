#include <doctest.h>

#include <cmath>

#include "boxtune/cobyla.hpp"
#include "boxtune/rng.hpp"

using namespace boxtune;

TEST_CASE("initialization evaluates the d+1 simplex") {
  int evals = 0;
  auto f = [&evals](const Eigen::VectorXd& x) {
    ++evals;
    return x.squaredNorm();
  };
  Cobyla state(Eigen::Vector2d(0.0, 0.0), 0.5, 1e-6, f);
  CHECK(evals == 3);
  CHECK(state.evaluations() == 3);
}

TEST_CASE("radius ordering is validated") {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  CHECK_THROWS_AS(Cobyla(Eigen::Vector2d(0, 0), 0.5, 0.6, f),
                  std::invalid_argument);
  CHECK_THROWS_AS(Cobyla(Eigen::Vector2d(0, 0), 0.5, 0.0, f),
                  std::invalid_argument);
}

TEST_CASE("constant objective keeps x0, shrinks to rho_end, terminates") {
  std::int64_t evals = 0;
  auto f = [&evals](const Eigen::VectorXd&) {
    ++evals;
    return 4.0;
  };
  const Eigen::Vector2d x0(1.0, -2.0);
  const CobylaResult r = cobyla_run(x0, 0.5, 1e-6, 100, f);
  CHECK(r.best_point == x0);
  CHECK(r.best_fitness == 4.0);
  CHECK(r.evals_used == evals);
  CHECK(r.evals_used < 100);  // terminated by radius, not budget
}

TEST_CASE("one step consumes exactly one evaluation") {
  std::int64_t evals = 0;
  auto f = [&evals](const Eigen::VectorXd& x) {
    ++evals;
    return x.squaredNorm();
  };
  Cobyla state(Eigen::Vector3d(1.0, 1.0, 1.0), 0.3, 1e-8, f);
  for (int i = 0; i < 20; ++i) {
    const std::int64_t before = evals;
    state.step();
    CHECK(evals == before + 1);
    CHECK(state.evaluations() == evals);
  }
}

TEST_CASE("2-D shifted quadratic converges to the analytic optimum") {
  auto f = [](const Eigen::VectorXd& x) {
    return (x(0) - 1.0) * (x(0) - 1.0) + (x(1) - 2.0) * (x(1) - 2.0);
  };
  const CobylaResult r = cobyla_run(Eigen::Vector2d(0.0, 0.0), 0.5, 1e-6, 200, f);
  CHECK(r.evals_used <= 200);
  CHECK(std::abs(r.best_point(0) - 1.0) < 1e-4);
  CHECK(std::abs(r.best_point(1) - 2.0) < 1e-4);
  CHECK(r.best_fitness < 1e-8);
}

TEST_CASE("budget is a hard cap counting initialization") {
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm() + 1.0; };
  const Eigen::Vector2d x0(3.0, 4.0);
  const CobylaResult capped = cobyla_run(x0, 0.5, 1e-9, 50, f);
  CHECK(capped.evals_used <= 50);
  CHECK(capped.best_fitness <= f(x0));

  const CobylaResult init_only = cobyla_run(x0, 0.5, 1e-9, 3, f);
  CHECK(init_only.evals_used == 3);
  // best of the initial simplex: x0 itself here, since both offsets move away
  CHECK(init_only.best_fitness == f(x0));

  CHECK_THROWS_AS(cobyla_run(x0, 0.5, 1e-9, 2, f), std::invalid_argument);
}

TEST_CASE("best-so-far is non-increasing on random quadratics") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(4));
    Eigen::VectorXd center(d), weights(d), x0(d);
    for (int i = 0; i < d; ++i) {
      center(i) = 2.0 * rng.normal();
      weights(i) = 0.5 + rng.uniform01() * 3.0;
      x0(i) = 2.0 * rng.normal();
    }
    auto f = [&](const Eigen::VectorXd& x) {
      return (weights.array() * (x - center).array().square()).sum();
    };
    Cobyla state(x0, 0.4, 1e-7, f);
    double previous = state.best_fitness();
    for (int s = 0; s < 80 && !state.done(); ++s) {
      state.step();
      CHECK(state.best_fitness() <= previous);
      previous = state.best_fitness();
    }
  }
}

TEST_CASE("evals_used matches the instrumented objective exactly") {
  std::int64_t evals = 0;
  auto f = [&evals](const Eigen::VectorXd& x) {
    ++evals;
    return std::cos(x(0)) + x.squaredNorm();
  };
  const CobylaResult r = cobyla_run(Eigen::Vector3d(1, 2, 3), 0.5, 1e-6, 77, f);
  CHECK(r.evals_used == evals);
}

TEST_CASE("trajectories are deterministic and translation-equivariant") {
  auto base = [](const Eigen::VectorXd& x) {
    return 2.0 * (x(0) - 0.5) * (x(0) - 0.5) + (x(1) + 1.0) * (x(1) + 1.0);
  };
  const Eigen::Vector2d x0(0.25, 0.25);
  const CobylaResult first = cobyla_run(x0, 0.5, 1e-8, 120, base);
  const CobylaResult again = cobyla_run(x0, 0.5, 1e-8, 120, base);
  CHECK(first.best_point == again.best_point);
  CHECK(first.best_fitness == again.best_fitness);
  CHECK(first.evals_used == again.evals_used);

  const Eigen::Vector2d shift(2.0, -3.0);
  auto shifted = [&](const Eigen::VectorXd& x) {
    return base(Eigen::VectorXd(x - shift));
  };
  const CobylaResult moved =
      cobyla_run(Eigen::VectorXd(x0 + shift), 0.5, 1e-8, 120, shifted);
  CHECK((moved.best_point - shift - first.best_point).cwiseAbs().maxCoeff() <
        1e-9);
  CHECK(moved.best_fitness == doctest::Approx(first.best_fitness).epsilon(1e-9));
}

TEST_CASE("coordinate search improves under tiny budgets") {
  auto f = [](const Eigen::VectorXd& x) {
    return (x - Eigen::VectorXd::Constant(x.size(), 1.5)).squaredNorm();
  };
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(10);
  // budget far below the d+1 = 11 simplex cost
  const CobylaResult r = coordinate_search(x0, 0.5, 1e-6, 7, f);
  CHECK(r.evals_used <= 7);
  CHECK(r.best_fitness <= f(x0));

  const CobylaResult longer = coordinate_search(x0, 0.5, 1e-6, 500, f);
  CHECK(longer.best_fitness < 1.0);
  CHECK_THROWS_AS(coordinate_search(x0, 0.5, 1e-6, 0, f), std::invalid_argument);
}

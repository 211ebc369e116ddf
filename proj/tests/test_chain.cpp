#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "billiards/chain.hpp"
#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"
#include "billiards/rng.hpp"

using namespace billiards;

TEST_CASE("alpha = pi/8 from pi/16 yields the eight odd sixteenths") {
  const FeresParams params = make_params(1, 8);
  const ChainStates states = enumerate_states(params, pi / 16);
  REQUIRE(states.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(states.angles[i] ==
          doctest::Approx((2.0 * i + 1.0) * pi / 16).epsilon(1e-14));
  }
  REQUIRE(states.lattice.size() == 8);
  for (std::size_t i = 0; i + 1 < 8; ++i) CHECK(states.angles[i] < states.angles[i + 1]);
  CHECK(states.find(pi / 16) == 0);
  CHECK(states.find(15 * pi / 16) == 7);
  CHECK(states.find(pi / 2) == ChainStates::npos);

  const StochasticMatrix matrix = build_matrix(states, params);
  CHECK(is_irreducible(matrix));
  CHECK(chain_period(matrix) == 2);
}

TEST_CASE("alpha = pi/7 from pi/14 yields seven states and an aperiodic chain") {
  const FeresParams params = make_params(1, 7);
  const ChainStates states = enumerate_states(params, pi / 14);
  REQUIRE(states.size() == 7);
  const StochasticMatrix matrix = build_matrix(states, params);
  CHECK(is_irreducible(matrix));
  CHECK(chain_period(matrix) == 1);
}

TEST_CASE("irrational alpha overflows any finite state budget") {
  const FeresParams params = make_params(0.5);
  try {
    enumerate_states(params, 1.0, 256);
    FAIL("expected truncation");
  } catch (const ValidationError& error) {
    CHECK(error.code() == errc::truncated_state_space);
  }
}

TEST_CASE("matrix rows are the branch distributions aggregated over images") {
  const FeresParams params = make_params(1, 8);
  const ChainStates states = enumerate_states(params, pi / 16);
  const StochasticMatrix matrix = build_matrix(states, params);
  REQUIRE(matrix.n == states.size());
  for (std::size_t i = 0; i < matrix.n; ++i) {
    const auto dist = branch_distribution(params, states.angles[i]);
    double row_sum = 0.0;
    for (const auto& [j, p] : matrix.rows[i]) {
      CHECK(p > 0.0);
      row_sum += p;
      // Every edge must be reachable by at least one branch with this mass.
      double direct = 0.0;
      for (int branch = 1; branch <= 4; ++branch) {
        const double image = apply_branch(branch, params, states.angles[i]);
        if (std::abs(image - states.angles[j]) < state_dedup_epsilon) {
          direct += dist[branch];
        }
      }
      CHECK(p == doctest::Approx(direct).epsilon(1e-14));
    }
    CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("stationary law is proportional to sin over the lattice") {
  for (auto [num, den, theta0] : {std::tuple<long, long, double>{1, 8, pi / 16},
                                  {1, 7, pi / 14},
                                  {1, 10, 0.23},
                                  {3, 40, 0.11}}) {
    const FeresParams params = make_params(num, den);
    const ChainStates states = enumerate_states(params, theta0);
    const StochasticMatrix matrix = build_matrix(states, params);
    if (!is_irreducible(matrix)) continue;
    const StationaryDist dist = stationary(matrix);
    double z = 0.0;
    for (double angle : states.angles) z += std::sin(angle);
    for (std::size_t i = 0; i < states.size(); ++i) {
      CHECK(dist.weights[i] ==
            doctest::Approx(std::sin(states.angles[i]) / z).epsilon(1e-10));
    }
    CHECK(stationary_residual(dist, matrix) < 1e-10);
  }
}

TEST_CASE("direct and power stationary routes agree") {
  for (auto [num, den, theta0] : {std::tuple<long, long, double>{1, 8, pi / 16},
                                  {1, 7, pi / 14},
                                  {1, 10, 0.41}}) {
    const FeresParams params = make_params(num, den);
    const ChainStates states = enumerate_states(params, theta0);
    const StochasticMatrix matrix = build_matrix(states, params);
    const StationaryDist direct = stationary_direct(matrix);
    const StationaryDist power = stationary_power(matrix);
    double worst = 0.0;
    for (std::size_t i = 0; i < matrix.n; ++i) {
      worst = std::max(worst, std::abs(direct.weights[i] - power.weights[i]));
    }
    CHECK(worst < 1e-10);
    const double total = std::accumulate(direct.weights.begin(), direct.weights.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("chain_period rejects reducible chains") {
  StochasticMatrix matrix;
  matrix.n = 2;
  matrix.rows = {{{0, 1.0}}, {{1, 1.0}}};
  CHECK(!is_irreducible(matrix));
  CHECK_THROWS_AS(chain_period(matrix), ValidationError);
}

TEST_CASE("cylinder measures of fixed-length paths partition unity") {
  const FeresParams params = make_params(1, 8);
  const ChainStates states = enumerate_states(params, pi / 16);
  const StochasticMatrix matrix = build_matrix(states, params);
  const StationaryDist dist = stationary(matrix);

  double total = 0.0;
  const std::size_t n = states.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t path[] = {a, b, c};
        total += cylinder_measure(dist, matrix, path);
      }
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const std::size_t bad[] = {0, n + 3};
  CHECK_THROWS_AS(cylinder_measure(dist, matrix, bad), ValidationError);
}

TEST_CASE("fold_angle folds into the half lattice cell") {
  Xoshiro256PlusPlus rng(53);
  for (double alpha : {0.2, pi / 8, 0.5}) {
    for (int trial = 0; trial < 300; ++trial) {
      const double theta = pi * rng.uniform01();
      const double fold = fold_angle(alpha, theta);
      CHECK(fold >= 0.0);
      CHECK(fold <= alpha + 1e-12);
      // Shifts by 2 alpha and the reflection theta -> -theta fix the fold.
      CHECK(fold_angle(alpha, theta + 2 * alpha) == doctest::Approx(fold).epsilon(1e-9));
      CHECK(fold_angle(alpha, 2 * alpha - theta + 2 * alpha * 3) ==
            doctest::Approx(fold).epsilon(1e-9));
    }
  }
}

TEST_CASE("class_representative is a branch invariant for alpha = pi/n") {
  Xoshiro256PlusPlus rng(59);
  for (long den : {7L, 8L, 10L, 12L}) {
    const FeresParams params = make_params(1, den);
    for (int trial = 0; trial < 200; ++trial) {
      const double theta = 1e-4 + (pi - 2e-4) * rng.uniform01();
      const double label = class_representative(params, theta);
      const auto dist = branch_distribution(params, theta);
      for (int branch = 1; branch <= 4; ++branch) {
        if (dist[branch] <= 0.0) continue;
        const double image = apply_branch(branch, params, theta);
        CHECK(class_representative(params, image) == doctest::Approx(label).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("reduce_to_fundamental lands in [0, alpha] along an almost admissible word") {
  Xoshiro256PlusPlus rng(61);
  for (double alpha : {0.11, 0.3, pi / 8, pi / 6}) {
    for (int trial = 0; trial < 200; ++trial) {
      const double theta = 1e-6 + (pi - 2e-6) * rng.uniform01();
      const Word word = reduce_to_fundamental(alpha, theta);
      double moved = theta;
      for (int branch : word) {
        CHECK((branch == 3 || branch == 4));
        moved = branch == 3 ? moved - 2 * alpha : 4 * alpha - moved;
      }
      CHECK(moved >= -1e-12);
      CHECK(moved <= alpha + 1e-12);
      CHECK(moved == doctest::Approx(fold_angle(alpha, theta)).epsilon(1e-10));
    }
  }
  const FeresParams params = make_params(1, 8);
  const double theta = 0.9;
  const Word word = reduce_to_fundamental(params, theta);
  CHECK(is_almost_admissible(params, theta, word));
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "billiards/errors.hpp"
#include "billiards/feres.hpp"
#include "billiards/numerics.hpp"
#include "billiards/rng.hpp"

using namespace billiards;

namespace {

const std::vector<double> alpha_samples = {0.05,   0.11, pi / 24, 0.2,     pi / 12,
                                           0.3,    pi / 8, 0.42,  pi / 7, 0.5,
                                           pi / 6.5};

}  // namespace

TEST_CASE("make_params validates the range and detects pi fractions") {
  CHECK_THROWS_AS(make_params(0.0), ValidationError);
  CHECK_THROWS_AS(make_params(-0.2), ValidationError);
  CHECK_THROWS_AS(make_params(pi / 6), ValidationError);
  CHECK_THROWS_AS(make_params(1, 5), ValidationError);
  CHECK_THROWS_AS(make_params(2, 7), ValidationError);

  const FeresParams eighth = make_params(1, 8);
  CHECK(eighth.alpha == doctest::Approx(pi / 8).epsilon(1e-16));
  REQUIRE(eighth.rational.has_value());
  CHECK(eighth.rational->num == 1);
  CHECK(eighth.rational->den == 8);

  const FeresParams detected = make_params(pi / 8);
  REQUIRE(detected.rational.has_value());
  CHECK(detected.rational->num == 1);
  CHECK(detected.rational->den == 8);

  const FeresParams reduced = make_params(2, 16);
  REQUIRE(reduced.rational.has_value());
  CHECK(reduced.rational->num == 1);
  CHECK(reduced.rational->den == 8);

  const FeresParams irrational = make_params(0.5);
  CHECK(!irrational.rational.has_value());
  CHECK(!detect_pi_fraction(0.41).has_value());
}

TEST_CASE("breakpoints are the six region boundaries in ascending order") {
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    const auto b = probability_breakpoints(params);
    CHECK(b[0] == doctest::Approx(alpha).epsilon(1e-16));
    CHECK(b[1] == doctest::Approx(2 * alpha).epsilon(1e-16));
    CHECK(b[2] == doctest::Approx(3 * alpha).epsilon(1e-16));
    CHECK(b[3] == doctest::Approx(pi - 3 * alpha).epsilon(1e-16));
    CHECK(b[4] == doctest::Approx(pi - 2 * alpha).epsilon(1e-16));
    CHECK(b[5] == doctest::Approx(pi - alpha).epsilon(1e-16));
    for (int i = 0; i + 1 < 6; ++i) CHECK(b[i] < b[i + 1]);
  }
}

TEST_CASE("branch maps compose as documented") {
  Xoshiro256PlusPlus rng(7);
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    for (int trial = 0; trial < 50; ++trial) {
      const double theta = pi * rng.uniform01();
      // T1 and T3 are mutually inverse shifts.
      CHECK(apply_branch(3, params, apply_branch(1, params, theta)) ==
            doctest::Approx(theta).epsilon(1e-15));
      // T2 and T4 are involutions.
      CHECK(apply_branch(2, params, apply_branch(2, params, theta)) ==
            doctest::Approx(theta).epsilon(1e-15));
      CHECK(apply_branch(4, params, apply_branch(4, params, theta)) ==
            doctest::Approx(theta).epsilon(1e-15));
      for (int branch = 1; branch <= 4; ++branch) {
        CHECK(invert_branch(branch, params, apply_branch(branch, params, theta)) ==
              doctest::Approx(theta).epsilon(1e-15));
      }
    }
    CHECK(branch_slope(1) == 1);
    CHECK(branch_slope(2) == -1);
    CHECK(branch_slope(3) == 1);
    CHECK(branch_slope(4) == -1);
  }
  CHECK_THROWS_AS(apply_branch(0, make_params(0.3), 1.0), ValidationError);
  CHECK_THROWS_AS(apply_branch(5, make_params(0.3), 1.0), ValidationError);
}

TEST_CASE("branch probabilities are a distribution everywhere") {
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    double worst = 0.0;
    for (int k = 1; k < 2000; ++k) {
      const double theta = pi * k / 2000;
      const auto dist = branch_distribution(params, theta);
      double sum = 0.0;
      for (int branch = 1; branch <= 4; ++branch) {
        CHECK(dist[branch] >= 0.0);
        sum += dist[branch];
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("positive probability implies the image stays interior") {
  Xoshiro256PlusPlus rng(19);
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    for (int trial = 0; trial < 400; ++trial) {
      const double theta = 1e-6 + (pi - 2e-6) * rng.uniform01();
      const auto dist = branch_distribution(params, theta);
      for (int branch = 1; branch <= 4; ++branch) {
        if (dist[branch] <= 0.0) continue;
        const double image = apply_branch(branch, params, theta);
        CHECK(image > 0.0);
        CHECK(image < pi);
      }
    }
  }
}

TEST_CASE("the distribution is equivariant under theta -> pi - theta") {
  // The reflection swaps branches 1<->3 and 2<->4.
  Xoshiro256PlusPlus rng(23);
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    for (int trial = 0; trial < 200; ++trial) {
      const double theta = 1e-4 + (pi / 2 - 2e-4) * rng.uniform01();
      const auto here = branch_distribution(params, theta);
      const auto mirrored = branch_distribution(params, pi - theta);
      CHECK(here[1] == doctest::Approx(mirrored[3]).epsilon(1e-12));
      CHECK(here[3] == doctest::Approx(mirrored[1]).epsilon(1e-12));
      CHECK(here[2] == doctest::Approx(mirrored[4]).epsilon(1e-12));
      CHECK(here[4] == doctest::Approx(mirrored[2]).epsilon(1e-12));
    }
  }
}

TEST_CASE("the invariant density satisfies the pointwise balance identity") {
  // sum over branches of p_b(T_b^{-1} y) sin(T_b^{-1} y) = sin(y) whenever the
  // preimage lies in (0, pi).
  Xoshiro256PlusPlus rng(29);
  for (double alpha : alpha_samples) {
    const FeresParams params = make_params(alpha);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
      const double y = 1e-5 + (pi - 2e-5) * rng.uniform01();
      double pushed = 0.0;
      for (int branch = 1; branch <= 4; ++branch) {
        const double source = invert_branch(branch, params, y);
        if (source <= 0.0 || source >= pi) continue;
        pushed += branch_distribution(params, source)[branch] * std::sin(source);
      }
      worst = std::max(worst, std::abs(pushed - std::sin(y)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("select_branch implements the cumulative rule and skips dead branches") {
  const FeresParams params = make_params(1, 8);
  const double theta = 0.2;  // below alpha: branches 3 and 4 are dead here
  const auto dist = branch_distribution(params, theta);
  CHECK(dist[3] == 0.0);
  CHECK(dist[4] == 0.0);

  const auto first = select_branch(dist, 0.0);
  CHECK(first.cumulative_before == 0.0);
  CHECK(dist[first.branch] > 0.0);

  const auto last = select_branch(dist, std::nextafter(1.0, 0.0));
  CHECK(dist[last.branch] > 0.0);

  Xoshiro256PlusPlus rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    const double u = rng.uniform01();
    const auto pick = select_branch(dist, u);
    CHECK(dist[pick.branch] > 0.0);
    CHECK(u >= pick.cumulative_before);
    CHECK(u <= pick.cumulative_before + dist[pick.branch] + 1e-12);
    CHECK(sample_branch(dist, u) == pick.branch);
  }
}

TEST_CASE("step keeps the angle inside the open interval") {
  Xoshiro256PlusPlus rng(37);
  for (double alpha : {0.3, pi / 8}) {
    const FeresParams params = make_params(alpha);
    double theta = 1.0;
    for (int k = 0; k < 5000; ++k) {
      const FeresStep next = step(params, theta, rng.uniform01());
      CHECK(next.theta > 0.0);
      CHECK(next.theta < pi);
      CHECK(next.branch >= 1);
      CHECK(next.branch <= 4);
      theta = next.theta;
    }
  }
}

TEST_CASE("kernel_mass partitions unity and validates its interval") {
  const FeresParams params = make_params(0.37);
  Xoshiro256PlusPlus rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const double theta = 1e-3 + (pi - 2e-3) * rng.uniform01();
    double total = 0.0;
    const int pieces = 17;
    for (int k = 0; k < pieces; ++k) {
      total += kernel_mass(params, theta, pi * k / pieces, pi * (k + 1) / pieces);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(kernel_mass(params, 1.0, 2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(kernel_mass(params, 1.0, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(kernel_mass(params, 1.0, -0.5, 1.0), ValidationError);
  CHECK_THROWS_AS(kernel_mass(params, 1.0, 0.5, 4.0), ValidationError);
}

TEST_CASE("the kernel leaves the invariant law fixed on intervals") {
  Xoshiro256PlusPlus rng(47);
  for (double alpha : {0.3, pi / 8, 0.5}) {
    const FeresParams params = make_params(alpha);
    for (int trial = 0; trial < 12; ++trial) {
      double a = pi * rng.uniform01();
      double b = pi * rng.uniform01();
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) continue;
      CHECK(kernel_invariance_defect(params, a, b) < 1e-8);
    }
  }
}

TEST_CASE("word evaluation multiplies branch probabilities and stops at dead branches") {
  const FeresParams params = make_params(1, 8);
  const double theta = pi / 16;

  const WordEvaluation one = evaluate_word(params, theta, Word{1});
  CHECK(one.admissible);
  CHECK(one.path.size() == 2);
  CHECK(one.path[1] == doctest::Approx(theta + pi / 4).epsilon(1e-15));
  CHECK(one.probability ==
        doctest::Approx(branch_distribution(params, theta)[1]).epsilon(1e-15));

  const WordEvaluation chained = evaluate_word(params, theta, Word{1, 1});
  const double mid = theta + pi / 4;
  CHECK(chained.probability ==
        doctest::Approx(branch_distribution(params, theta)[1] *
                        branch_distribution(params, mid)[1])
            .epsilon(1e-14));

  // Branch 3 needs theta >= 2 alpha; from pi/16 it is dead immediately.
  const WordEvaluation dead = evaluate_word(params, theta, Word{3, 1, 1});
  CHECK(!dead.admissible);
  CHECK(dead.probability == 0.0);
  CHECK(dead.path.size() < 4);
  CHECK(word_probability(params, theta, Word{3}) == 0.0);
}

TEST_CASE("almost admissible words may touch the corners") {
  const FeresParams params = make_params(1, 8);
  // theta = 2 alpha maps to exactly 0 under branch 3: zero probability, but
  // the formal path stays inside the closed supports.
  CHECK(is_almost_admissible(params, pi / 4, Word{3}));
  CHECK(word_probability(params, pi / 4, Word{3}) == 0.0);
  // Dropping below the support by a finite margin is rejected.
  CHECK(!is_almost_admissible(params, pi / 4 - 0.1, Word{3}));
  // A genuinely admissible word stays admissible.
  CHECK(is_almost_admissible(params, pi / 16, Word{1, 1, 1, 2}));
  CHECK(word_probability(params, pi / 16, Word{1, 1, 1, 2}) > 0.0);
}

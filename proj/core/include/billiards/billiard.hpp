#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "billiards/feres.hpp"
#include "billiards/surface.hpp"

namespace billiards {

struct PhasePoint {
  double s;      // arc length position in [0, L)
  double theta;  // angle against the tangent in (0, pi)
};

// F(s, theta) = (s + flight_arc(theta) mod L, theta): the angle is preserved,
// the position advances by one chord.
PhasePoint deterministic_step(const CircleTable& table, const PhasePoint& point);

struct RandomStep {
  PhasePoint point;
  int branch;
};

// One step of the random billiard: the scatterer acts first (theta' = T_b
// theta with branch b drawn from the distribution at theta by u), then the
// flight happens at the new angle.
RandomStep random_step(const CircleTable& table, const FeresParams& params,
                       const PhasePoint& point, double u);

struct TrajectoryRecord {
  CircleTable table;
  FeresParams params;
  PhasePoint initial;
  std::optional<std::uint64_t> seed;  // absent for word-driven runs
  std::optional<Word> word;

  struct Step {
    double s;
    double theta;
    int branch;
  };
  std::vector<Step> steps;
};

// n random steps from x0, one uniform per step off a fresh generator.
TrajectoryRecord simulate(const CircleTable& table, const FeresParams& params,
                          const PhasePoint& x0, std::size_t n, std::uint64_t seed);

// Deterministic branch schedule.  The word must be almost-admissible at
// x0.theta; flights at a corner angle within admissibility_epsilon of 0 or pi
// use the continuous arc extension (0 and L respectively).
TrajectoryRecord simulate_word(const CircleTable& table, const FeresParams& params,
                               const PhasePoint& x0, const Word& word);

// Skew-product representation: x in [0, 1) selects the branch through the
// cumulative rule and is rescaled affinely onto [0, 1) by the selected cell.
struct SkewPoint {
  double x;
  double s;
  double theta;
};

SkewPoint skew_step(const CircleTable& table, const FeresParams& params,
                    const SkewPoint& point);

// Derivative cocycle along a random orbit.  After n steps the product of the
// one-step differentials is [[1, h*A], [0, B]] with B in {-1, +1} and
// |A| <= n * max_central_angle_derivative.
struct Cocycle {
  double A = 0.0;
  double B = 1.0;
  std::size_t n = 0;
};

Cocycle cocycle_step(const Cocycle& cocycle, const CircleTable& table,
                     double theta_new, int branch);

std::array<std::array<double, 2>, 2> cocycle_matrix(const Cocycle& cocycle,
                                                    const CircleTable& table);

// log ||M_n v|| / n for the accumulated cocycle; v = (1, 0) gives exactly 0.
double cocycle_exponent(const Cocycle& cocycle, const CircleTable& table,
                        std::array<double, 2> v);

}  // namespace billiards

#include "billiards/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"
#include "billiards/rng.hpp"

namespace billiards {

namespace {

void check_point(const CircleTable& table, const PhasePoint& point) {
  require(std::isfinite(point.s) && point.s >= 0.0 && point.s < table.L,
          errc::invalid_argument,
          "s must lie in [0, L), got " + std::to_string(point.s));
  require(std::isfinite(point.theta) && point.theta > 0.0 && point.theta < pi,
          errc::theta_out_of_range,
          "theta must lie in (0, pi), got " + std::to_string(point.theta));
}

// Arc extension continuous on [0, pi]: almost-admissible words may graze the
// corners, where the flight shrinks to nothing (or one full turn).
double closed_flight_arc(const CircleTable& table, double theta) {
  const double clamped = std::clamp(theta, 0.0, pi);
  if (clamped == 0.0) return 0.0;
  if (clamped == pi) return table.L;
  return flight_arc(table, clamped);
}

}  // namespace

PhasePoint deterministic_step(const CircleTable& table, const PhasePoint& point) {
  check_point(table, point);
  return {advance(point.s, flight_arc(table, point.theta), table.L), point.theta};
}

RandomStep random_step(const CircleTable& table, const FeresParams& params,
                       const PhasePoint& point, double u) {
  check_point(table, point);
  const FeresStep scattered = step(params, point.theta, u);
  const double s = advance(point.s, flight_arc(table, scattered.theta), table.L);
  return {{s, scattered.theta}, scattered.branch};
}

TrajectoryRecord simulate(const CircleTable& table, const FeresParams& params,
                          const PhasePoint& x0, std::size_t n, std::uint64_t seed) {
  check_point(table, x0);
  TrajectoryRecord record{table, params, x0, seed, std::nullopt, {}};
  record.steps.reserve(n);
  Xoshiro256PlusPlus rng(seed);
  PhasePoint point = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const RandomStep next = random_step(table, params, point, rng.uniform01());
    point = next.point;
    record.steps.push_back({point.s, point.theta, next.branch});
  }
  return record;
}

TrajectoryRecord simulate_word(const CircleTable& table, const FeresParams& params,
                               const PhasePoint& x0, const Word& word) {
  check_point(table, x0);
  require(is_almost_admissible(params, x0.theta, word), errc::not_admissible,
          "word is not almost-admissible at theta0");
  TrajectoryRecord record{table, params, x0, std::nullopt, word, {}};
  record.steps.reserve(word.size());
  double s = x0.s;
  double theta = x0.theta;
  for (int branch : word) {
    theta = apply_branch(branch, params, theta);
    s = advance(s, closed_flight_arc(table, theta), table.L);
    record.steps.push_back({s, theta, branch});
  }
  return record;
}

SkewPoint skew_step(const CircleTable& table, const FeresParams& params,
                    const SkewPoint& point) {
  require(point.x >= 0.0 && point.x < 1.0, errc::invalid_argument,
          "skew coordinate must lie in [0, 1)");
  check_point(table, {point.s, point.theta});
  const BranchDistribution dist = branch_distribution(params, point.theta);
  const BranchSelection pick = select_branch(dist, point.x);
  double x = (point.x - pick.cumulative_before) / dist[pick.branch];
  if (x >= 1.0) x = std::nextafter(1.0, 0.0);
  if (x < 0.0) x = 0.0;
  const double theta = apply_branch(pick.branch, params, point.theta);
  ensure(theta > 0.0 && theta < pi, errc::image_escapes_state_space,
         "selected branch left (0, pi)");
  const double s = advance(point.s, flight_arc(table, theta), table.L);
  return {x, s, theta};
}

Cocycle cocycle_step(const Cocycle& cocycle, const CircleTable& table,
                     double theta_new, int branch) {
  const double slope = branch_slope(branch);
  const double B = cocycle.B * slope;
  const double A = cocycle.A + central_angle_derivative(table, theta_new) * B;
  return {A, B, cocycle.n + 1};
}

std::array<std::array<double, 2>, 2> cocycle_matrix(const Cocycle& cocycle,
                                                    const CircleTable& table) {
  return {{{1.0, cocycle.A * table.h}, {0.0, cocycle.B}}};
}

double cocycle_exponent(const Cocycle& cocycle, const CircleTable& table,
                        std::array<double, 2> v) {
  require(cocycle.n > 0, errc::invalid_argument, "cocycle has no steps yet");
  require(v[0] != 0.0 || v[1] != 0.0, errc::invalid_argument,
          "direction must be nonzero");
  const double top = v[0] + table.h * cocycle.A * v[1];
  const double bottom = cocycle.B * v[1];
  const double norm = std::hypot(top, bottom) / std::hypot(v[0], v[1]);
  return std::log(norm) / static_cast<double>(cocycle.n);
}

}  // namespace billiards

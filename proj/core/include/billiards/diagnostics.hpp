#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "billiards/billiard.hpp"

namespace billiards {

struct LyapunovTrace {
  std::vector<std::size_t> steps;  // ascending checkpoints, last one = n
  std::vector<double> exponent;    // log ||M_k v|| / k at each checkpoint
  std::array<double, 2> direction;
  std::uint64_t seed;
};

// Largest Lyapunov estimate along one random orbit: the cocycle is
// accumulated in closed form (A, B), so no renormalization is ever needed.
LyapunovTrace lyapunov(const CircleTable& table, const FeresParams& params,
                       const PhasePoint& x0, std::array<double, 2> v, std::size_t n,
                       std::uint64_t seed);

// Largest circular gap left uncovered by a set of positions on [0, length).
double cover_gap(std::vector<double> positions, double length);

struct GapTrace {
  std::vector<std::size_t> pairs;
  std::vector<double> gap;
};

// Repeats the branch word (1, 3) and watches the even-time positions fill the
// circle: theta returns to theta0 every two steps while s advances by the
// fixed pair shift, a rigid rotation.
GapTrace dense_orbit_test(const CircleTable& table, const FeresParams& params,
                          const PhasePoint& x0, std::size_t n_pairs);

using PhaseIndicator = std::function<bool(const PhasePoint&)>;

struct Rectangle {
  double s_lo, s_hi;
  double theta_lo, theta_hi;
};

PhaseIndicator rectangle_indicator(const Rectangle& rect);
// Union over centers of { |theta - center| < eps } x full circle.
PhaseIndicator angle_neighborhood_indicator(std::vector<double> centers, double eps);

struct CorrelationPoint {
  std::size_t lag;
  double estimate;   // mean(f0 * g_k) - mean(f0) * mean(g_k)
  double std_error;  // delta-method standard error of the estimate
};

struct CorrelationTrace {
  std::vector<CorrelationPoint> points;  // ascending lags
  std::size_t ensemble;
};

// Correlation of indicator observables under the stationary start (s uniform,
// theta from the invariant law).  Point j draws from stream j of `seed`:
// first the uniform for s, then for theta, then one per step.
CorrelationTrace mixing_correlation(const CircleTable& table, const FeresParams& params,
                                    const PhaseIndicator& f, const PhaseIndicator& g,
                                    std::span<const std::size_t> lags,
                                    std::size_t ensemble, std::uint64_t seed,
                                    unsigned threads = 0);

// For alpha = pi/n the folded angle class is a constant of motion; checks it
// along a recorded trajectory.  Throws UnsupportedAlphaForm for any other
// alpha.
bool motion_constant_check(const FeresParams& params, const TrajectoryRecord& record,
                           double tolerance = 1e-9);

}  // namespace billiards

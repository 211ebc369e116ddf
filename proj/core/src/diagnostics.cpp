#include "billiards/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "billiards/chain.hpp"
#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"

namespace billiards {

namespace {

std::vector<std::size_t> log_checkpoints(std::size_t n) {
  std::vector<std::size_t> points;
  for (std::size_t p = 1; p < n; p *= 2) points.push_back(p);
  if (n >= 1) points.push_back(n);
  return points;
}

}  // namespace

LyapunovTrace lyapunov(const CircleTable& table, const FeresParams& params,
                       const PhasePoint& x0, std::array<double, 2> v, std::size_t n,
                       std::uint64_t seed) {
  require(n >= 1, errc::invalid_argument, "need at least one step");
  require(v[0] != 0.0 || v[1] != 0.0, errc::invalid_argument,
          "direction must be nonzero");
  LyapunovTrace trace;
  trace.steps = log_checkpoints(n);
  trace.direction = v;
  trace.seed = seed;
  trace.exponent.reserve(trace.steps.size());

  Xoshiro256PlusPlus rng(seed);
  PhasePoint point = x0;
  Cocycle cocycle;
  std::size_t next = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const RandomStep stepped = random_step(table, params, point, rng.uniform01());
    point = stepped.point;
    cocycle = cocycle_step(cocycle, table, point.theta, stepped.branch);
    if (next < trace.steps.size() && trace.steps[next] == k) {
      trace.exponent.push_back(cocycle_exponent(cocycle, table, v));
      ++next;
    }
  }
  return trace;
}

double cover_gap(std::vector<double> positions, double length) {
  require(!positions.empty(), errc::too_few_points, "no positions to cover with");
  require(length > 0.0, errc::invalid_argument, "length must be positive");
  for (double s : positions) {
    require(s >= 0.0 && s < length, errc::invalid_argument,
            "position " + std::to_string(s) + " outside [0, length)");
  }
  std::sort(positions.begin(), positions.end());
  double gap = positions.front() + length - positions.back();
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    gap = std::max(gap, positions[i + 1] - positions[i]);
  }
  return gap;
}

GapTrace dense_orbit_test(const CircleTable& table, const FeresParams& params,
                          const PhasePoint& x0, std::size_t n_pairs) {
  require(n_pairs >= 1, errc::invalid_argument, "need at least one pair");
  const Word pair{1, 3};
  require(evaluate_word(params, x0.theta, pair).admissible, errc::not_admissible,
          "the word (1, 3) is not admissible at theta0");

  const double up = apply_branch(1, params, x0.theta);
  const double arc_up = flight_arc(table, up);
  const double arc_back = flight_arc(table, x0.theta);

  std::vector<double> positions{x0.s};
  positions.reserve(n_pairs + 1);
  double s = x0.s;
  GapTrace trace;
  const auto checkpoints = log_checkpoints(n_pairs);
  std::size_t next = 0;
  for (std::size_t k = 1; k <= n_pairs; ++k) {
    s = advance(s, arc_up, table.L);
    s = advance(s, arc_back, table.L);
    positions.push_back(s);
    if (next < checkpoints.size() && checkpoints[next] == k) {
      trace.pairs.push_back(k);
      trace.gap.push_back(cover_gap(positions, table.L));
      ++next;
    }
  }
  return trace;
}

PhaseIndicator rectangle_indicator(const Rectangle& rect) {
  require(rect.s_lo < rect.s_hi && rect.theta_lo < rect.theta_hi,
          errc::invalid_interval, "rectangle is empty");
  return [rect](const PhasePoint& point) {
    return point.s >= rect.s_lo && point.s < rect.s_hi &&
           point.theta >= rect.theta_lo && point.theta < rect.theta_hi;
  };
}

PhaseIndicator angle_neighborhood_indicator(std::vector<double> centers, double eps) {
  require(!centers.empty(), errc::too_few_points, "no centers given");
  require(eps > 0.0, errc::invalid_argument, "eps must be positive");
  return [centers = std::move(centers), eps](const PhasePoint& point) {
    for (double center : centers) {
      if (std::abs(point.theta - center) < eps) return true;
    }
    return false;
  };
}

CorrelationTrace mixing_correlation(const CircleTable& table, const FeresParams& params,
                                    const PhaseIndicator& f, const PhaseIndicator& g,
                                    std::span<const std::size_t> lags,
                                    std::size_t ensemble, std::uint64_t seed,
                                    unsigned threads) {
  require(!lags.empty(), errc::invalid_argument, "no lags requested");
  require(ensemble >= 2, errc::too_few_points, "ensemble must have at least 2 points");

  std::vector<std::size_t> sorted(lags.begin(), lags.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t max_lag = sorted.back();
  const std::size_t n_lags = sorted.size();

  struct Counts {
    std::uint64_t f0 = 0;
    std::vector<std::uint64_t> g_only;
    std::vector<std::uint64_t> fg;
  };
  const unsigned workers = resolve_threads(threads);
  std::vector<Counts> partial(workers);
  for (auto& c : partial) {
    c.g_only.assign(n_lags, 0);
    c.fg.assign(n_lags, 0);
  }

  parallel_chunks(ensemble, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    auto& counts = partial[w];
    for (std::size_t j = begin; j < end; ++j) {
      Xoshiro256PlusPlus rng(derive_stream_seed(seed, j));
      PhasePoint point{rng.uniform01() * table.L,
                       std::clamp(std::acos(1.0 - 2.0 * rng.uniform01()), 1e-12,
                                  pi - 1e-12)};
      const bool f0 = f(point);
      if (f0) ++counts.f0;
      std::size_t next = 0;
      for (std::size_t k = 0; k <= max_lag && next < n_lags; ++k) {
        if (sorted[next] == k) {
          if (g(point)) {
            ++counts.g_only[next];
            if (f0) ++counts.fg[next];
          }
          ++next;
        }
        if (k < max_lag) {
          point = random_step(table, params, point, rng.uniform01()).point;
        }
      }
    }
  });

  std::uint64_t f0 = 0;
  std::vector<std::uint64_t> g_only(n_lags, 0), fg(n_lags, 0);
  for (const auto& counts : partial) {
    f0 += counts.f0;
    for (std::size_t i = 0; i < n_lags; ++i) {
      g_only[i] += counts.g_only[i];
      fg[i] += counts.fg[i];
    }
  }

  const double m = static_cast<double>(ensemble);
  CorrelationTrace trace;
  trace.ensemble = ensemble;
  trace.points.reserve(n_lags);
  const double b = static_cast<double>(f0) / m;
  for (std::size_t i = 0; i < n_lags; ++i) {
    const double a = static_cast<double>(fg[i]) / m;
    const double c = static_cast<double>(g_only[i]) / m;
    // delta-method variance of a - b*c from the joint indicator counts
    const double var = a * (1 - a) + c * c * b * (1 - b) + b * b * c * (1 - c) -
                       2 * c * a * (1 - b) - 2 * b * a * (1 - c) +
                       2 * b * c * (a - b * c);
    trace.points.push_back(
        {sorted[i], a - b * c, std::sqrt(std::max(var, 0.0) / m)});
  }
  return trace;
}

bool motion_constant_check(const FeresParams& params, const TrajectoryRecord& record,
                           double tolerance) {
  require(params.rational && params.rational->num == 1, errc::unsupported_alpha_form,
          "the folded class is conserved only for alpha = pi/n");
  const double reference = class_representative(params, record.initial.theta);
  for (const auto& step : record.steps) {
    if (std::abs(class_representative(params, step.theta) - reference) > tolerance) {
      return false;
    }
  }
  return true;
}

}  // namespace billiards

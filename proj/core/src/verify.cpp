#include "billiards/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "billiards/billiard.hpp"
#include "billiards/chain.hpp"
#include "billiards/diagnostics.hpp"
#include "billiards/errors.hpp"
#include "billiards/io.hpp"
#include "billiards/measure.hpp"
#include "billiards/numerics.hpp"
#include "billiards/rng.hpp"
#include "billiards/surface.hpp"

namespace billiards {

namespace {

class Battery {
 public:
  explicit Battery(const VerifyOptions& options) : options_(options) {}

  void check(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult result{name, false, ""};
    try {
      auto [pass, detail] = body();
      result.pass = pass;
      result.detail = std::move(detail);
    } catch (const std::exception& error) {
      result.pass = false;
      result.detail = std::string("exception: ") + error.what();
    }
    results_.push_back(std::move(result));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

  const VerifyOptions& options_;
  std::vector<CheckResult> results_;
};

std::string fmt(double value) { return format_double(value); }

std::vector<double> alpha_grid() {
  return {0.05, 0.11, pi / 24, 0.2, pi / 12, 0.3, pi / 8, 0.42, pi / 7, 0.5, pi / 6.5};
}

std::pair<bool, std::string> bounded(double worst, double bound) {
  return {worst <= bound, "worst " + fmt(worst) + " vs bound " + fmt(bound)};
}

void add_rng_checks(Battery& battery) {
  battery.check("rng.reproducible-stream", [] {
    Xoshiro256PlusPlus a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
      if (a.next() != b.next()) return std::pair{false, std::string("streams diverged")};
    }
    return std::pair{true, std::string("1000 matching draws")};
  });
  battery.check("rng.uniform-range-and-mean", [] {
    Xoshiro256PlusPlus rng(7);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform01();
      if (u < 0.0 || u >= 1.0) return std::pair{false, "draw " + fmt(u)};
      sum += u;
    }
    const double mean = sum / 100000;
    return std::pair{std::abs(mean - 0.5) < 0.01, "mean " + fmt(mean)};
  });
  battery.check("rng.streams-decorrelated", [] {
    const auto s1 = derive_stream_seed(42, 0);
    const auto s2 = derive_stream_seed(42, 1);
    if (s1 == s2 || s1 == 42) return std::pair{false, std::string("stream seeds collide")};
    Xoshiro256PlusPlus a(s1), b(s2);
    int agree = 0;
    for (int i = 0; i < 64; ++i) {
      if ((a.next() & 1) == (b.next() & 1)) ++agree;
    }
    return std::pair{agree < 55, "bit agreement " + std::to_string(agree) + "/64"};
  });
}

void add_feres_checks(Battery& battery) {
  battery.check("feres.normalization-grid", [] {
    double worst = 0.0;
    for (double alpha : alpha_grid()) {
      const FeresParams params = make_params(alpha);
      for (int i = 1; i < 2000; ++i) {
        const double theta = pi * i / 2000.0;
        const BranchDistribution dist = branch_distribution(params, theta);
        double sum = 0.0;
        for (double p : dist.p) {
          if (p < 0.0) return bounded(1.0, 0.0);
          sum += p;
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    return bounded(worst, 1e-12);
  });
  battery.check("feres.support-stays-interior", [] {
    for (double alpha : alpha_grid()) {
      const FeresParams params = make_params(alpha);
      for (int i = 1; i < 2000; ++i) {
        const double theta = pi * i / 2000.0;
        const BranchDistribution dist = branch_distribution(params, theta);
        for (int branch = 1; branch <= 4; ++branch) {
          if (dist[branch] <= 0.0) continue;
          const double image = apply_branch(branch, params, theta);
          if (image <= 0.0 || image >= pi) {
            return std::pair{false, "escape from theta " + fmt(theta)};
          }
        }
      }
    }
    return std::pair{true, std::string("no escapes on the grid")};
  });
  battery.check("feres.breakpoint-continuity", [] {
    double worst = 0.0;
    for (double alpha : alpha_grid()) {
      const FeresParams params = make_params(alpha);
      for (double bp : probability_breakpoints(params)) {
        const BranchDistribution left = branch_distribution(params, bp - 1e-11);
        const BranchDistribution right = branch_distribution(params, bp + 1e-11);
        for (int i = 0; i < 4; ++i) {
          worst = std::max(worst, std::abs(left.p[i] - right.p[i]));
        }
      }
    }
    return bounded(worst, 1e-9);
  });
  battery.check("feres.branch-involutions", [] {
    const FeresParams params = make_params(0.37);
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double theta = pi * i / 100.0;
      worst = std::max(worst, std::abs(apply_branch(3, params, apply_branch(1, params, theta)) - theta));
      worst = std::max(worst, std::abs(apply_branch(1, params, apply_branch(3, params, theta)) - theta));
      worst = std::max(worst, std::abs(apply_branch(2, params, apply_branch(2, params, theta)) - theta));
      worst = std::max(worst, std::abs(apply_branch(4, params, apply_branch(4, params, theta)) - theta));
      for (int branch = 1; branch <= 4; ++branch) {
        worst = std::max(worst, std::abs(invert_branch(branch, params, apply_branch(branch, params, theta)) - theta));
      }
    }
    return bounded(worst, 1e-12);
  });
  battery.check("feres.pointwise-invariance-identity", [] {
    // sum_i p_i(T_i^{-1} y) sin(T_i^{-1} y) over in-range preimages equals sin(y)
    double worst = 0.0;
    for (double alpha : alpha_grid()) {
      const FeresParams params = make_params(alpha);
      for (int i = 1; i < 500; ++i) {
        const double y = pi * i / 500.0;
        double sum = 0.0;
        for (int branch = 1; branch <= 4; ++branch) {
          const double pre = invert_branch(branch, params, y);
          if (pre <= 0.0 || pre >= pi) continue;
          sum += branch_distribution(params, pre)[branch] * std::sin(pre);
        }
        worst = std::max(worst, std::abs(sum - std::sin(y)));
      }
    }
    return bounded(worst, 1e-12);
  });
  battery.check("feres.kernel-invariance-quadrature", [&battery] {
    Xoshiro256PlusPlus rng(battery.options_.seed);
    const int intervals = battery.options_.quick ? 15 : 40;
    double worst = 0.0;
    for (double alpha : {0.3, pi / 8, 0.5}) {
      const FeresParams params = make_params(alpha);
      for (int i = 0; i < intervals; ++i) {
        double a = rng.uniform01() * pi;
        double b = rng.uniform01() * pi;
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) continue;
        worst = std::max(worst, kernel_invariance_defect(params, a, b));
      }
    }
    return bounded(worst, 1e-8);
  });
  battery.check("feres.kernel-mass-partition", [] {
    const FeresParams params = make_params(pi / 8);
    double worst = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double theta = pi * i / 100.0;
      double sum = 0.0;
      for (int piece = 0; piece < 7; ++piece) {
        sum += kernel_mass(params, theta, pi * piece / 7.0, pi * (piece + 1) / 7.0);
      }
      worst = std::max(worst, std::abs(sum - 1.0));
      worst = std::max(worst, std::abs(kernel_mass(params, theta, 0.0, pi) - 1.0));
    }
    return bounded(worst, 1e-12);
  });
  battery.check("feres.word-machinery", [] {
    const FeresParams params = make_params(0.3);
    const Word good{1, 3, 1, 1};
    const WordEvaluation eval = evaluate_word(params, 1.0, good);
    if (!eval.admissible || eval.probability <= 0.0 || eval.path.size() != 5) {
      return std::pair{false, std::string("admissible word rejected")};
    }
    const Word dead{3, 3, 3, 3, 3, 3};  // walks below theta = 0
    if (word_probability(params, 1.0, dead) != 0.0) {
      return std::pair{false, std::string("dead word got positive probability")};
    }
    if (is_almost_admissible(params, 1.0, dead)) {
      return std::pair{false, std::string("dead word declared almost-admissible")};
    }
    return std::pair{true, std::string("word evaluation consistent")};
  });
}

void add_surface_checks(Battery& battery) {
  battery.check("surface.chord-oracle-agreement", [&battery] {
    Xoshiro256PlusPlus rng(battery.options_.seed + 1);
    const int samples = battery.options_.quick ? 100 : 400;
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const int kind = static_cast<int>(rng.uniform01() * 3);
      const double r0 = kind == 2 ? 0.05 + rng.uniform01() * 1.4 : 0.05 + rng.uniform01() * 2.5;
      const CircleTable table = make_table(static_cast<SurfaceKind>(kind), r0);
      const double theta = 0.01 + rng.uniform01() * (pi - 0.02);
      worst = std::max(worst, std::abs(central_angle(table, theta) - chord_oracle(table, theta)));
    }
    return bounded(worst, 1e-9);
  });
  battery.check("surface.derivative-central-difference", [] {
    double worst = 0.0;
    for (SurfaceKind kind : {SurfaceKind::flat, SurfaceKind::hyperbolic, SurfaceKind::spherical}) {
      const CircleTable table = make_table(kind, kind == SurfaceKind::spherical ? 0.9 : 1.3);
      for (int i = 1; i < 200; ++i) {
        const double theta = 0.02 + (pi - 0.04) * i / 200.0;
        const double fd = (central_angle(table, theta + 1e-6) - central_angle(table, theta - 1e-6)) / 2e-6;
        const double exact = central_angle_derivative(table, theta);
        worst = std::max(worst, std::abs(fd - exact) / std::abs(exact));
      }
    }
    return bounded(worst, 1e-6);
  });
  battery.check("surface.flat-limit", [] {
    double worst = 0.0;
    for (SurfaceKind kind : {SurfaceKind::hyperbolic, SurfaceKind::spherical}) {
      const CircleTable table = make_table(kind, 1e-4);
      for (int i = 1; i < 500; ++i) {
        const double theta = pi * i / 500.0;
        worst = std::max(worst, std::abs(central_angle(table, theta) - 2.0 * theta));
      }
    }
    return bounded(worst, 1e-6);
  });
  battery.check("surface.central-angle-monotone", [] {
    for (SurfaceKind kind : {SurfaceKind::flat, SurfaceKind::hyperbolic, SurfaceKind::spherical}) {
      const CircleTable table = make_table(kind, kind == SurfaceKind::spherical ? 1.1 : 2.0);
      double previous = 0.0;
      for (int i = 1; i < 1000; ++i) {
        const double gamma = central_angle(table, pi * i / 1000.0);
        if (gamma <= previous) return std::pair{false, "not increasing at i=" + std::to_string(i)};
        previous = gamma;
      }
    }
    return std::pair{true, std::string("gamma strictly increasing, range (0, 2pi)")};
  });
  battery.check("surface.derivative-bound", [] {
    double worst = 0.0;
    for (SurfaceKind kind : {SurfaceKind::flat, SurfaceKind::hyperbolic, SurfaceKind::spherical}) {
      const CircleTable table = make_table(kind, kind == SurfaceKind::spherical ? 1.2 : 2.4);
      const double bound = max_central_angle_derivative(table);
      for (int i = 1; i < 1000; ++i) {
        worst = std::max(worst, central_angle_derivative(table, pi * i / 1000.0) - bound);
      }
    }
    return bounded(worst, 1e-12);
  });
  battery.check("surface.advance-wraps", [] {
    const double L = 2.0 * pi;
    double worst = std::abs(advance(1.0, L, L) - 1.0);
    worst = std::max(worst, std::abs(advance(0.5, -L - 0.25, L) - 0.25));
    worst = std::max(worst, std::abs(advance(6.0, 1.0, L) - (7.0 - L)));
    const double back = advance(0.0, -1e-18, L);
    if (back < 0.0 || back >= L) return std::pair{false, "wrap landed at " + fmt(back)};
    return bounded(worst, 1e-12);
  });
}

void add_chain_checks(Battery& battery) {
  battery.check("chain.eight-state-example", [] {
    const FeresParams params = make_params(1, 8);
    const ChainStates states = enumerate_states(params, pi / 16);
    if (states.size() != 8) return std::pair{false, std::to_string(states.size()) + " states"};
    const StochasticMatrix matrix = build_matrix(states, params);
    if (!is_irreducible(matrix)) return std::pair{false, std::string("not irreducible")};
    const int period = chain_period(matrix);
    if (period != 2) return std::pair{false, "period " + std::to_string(period)};
    return std::pair{true, std::string("8 states, irreducible, period 2")};
  });
  battery.check("chain.seven-state-example", [] {
    const FeresParams params = make_params(1, 7);
    const ChainStates states = enumerate_states(params, pi / 14);
    if (states.size() != 7) return std::pair{false, std::to_string(states.size()) + " states"};
    const StochasticMatrix matrix = build_matrix(states, params);
    if (!is_irreducible(matrix)) return std::pair{false, std::string("not irreducible")};
    const int period = chain_period(matrix);
    if (period != 1) return std::pair{false, "period " + std::to_string(period)};
    return std::pair{true, std::string("7 states, irreducible, aperiodic")};
  });
  battery.check("chain.stationary-proportional-to-sine", [] {
    double worst = 0.0;
    for (auto [num, den, theta0] : {std::tuple{1L, 8L, pi / 16}, {1L, 7L, pi / 14}}) {
      const FeresParams params = make_params(num, den);
      const ChainStates states = enumerate_states(params, theta0);
      const StochasticMatrix matrix = build_matrix(states, params);
      const StationaryDist dist = stationary(matrix);
      double norm = 0.0;
      for (double theta : states.angles) norm += std::sin(theta);
      for (std::size_t i = 0; i < states.size(); ++i) {
        worst = std::max(worst, std::abs(dist.weights[i] - std::sin(states.angles[i]) / norm));
      }
    }
    return bounded(worst, 1e-10);
  });
  battery.check("chain.stationary-dual-route", [] {
    double worst = 0.0;
    for (auto [num, den, theta0] : {std::tuple{1L, 8L, pi / 16}, {1L, 7L, pi / 14},
                                    {1L, 10L, 0.41}}) {
      const FeresParams params = make_params(num, den);
      const ChainStates states = enumerate_states(params, theta0);
      const StochasticMatrix matrix = build_matrix(states, params);
      const StationaryDist direct = stationary_direct(matrix);
      const StationaryDist power = stationary_power(matrix);
      for (std::size_t i = 0; i < matrix.n; ++i) {
        worst = std::max(worst, std::abs(direct.weights[i] - power.weights[i]));
      }
      worst = std::max(worst, stationary_residual(direct, matrix));
    }
    return bounded(worst, 1e-10);
  });
  battery.check("chain.truncation-on-irrational", [] {
    const FeresParams params = make_params(0.5);
    try {
      enumerate_states(params, 1.0, 512);
    } catch (const ValidationError& error) {
      if (error.code() == errc::truncated_state_space) {
        return std::pair{true, std::string("truncation reported as expected")};
      }
      throw;
    }
    return std::pair{false, std::string("irrational alpha closed unexpectedly")};
  });
  battery.check("chain.cylinder-partition", [] {
    const FeresParams params = make_params(1, 8);
    const ChainStates states = enumerate_states(params, pi / 16);
    const StochasticMatrix matrix = build_matrix(states, params);
    const StationaryDist dist = stationary(matrix);
    double total = 0.0;
    const std::size_t n = matrix.n;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          const std::size_t path[] = {a, b, c};
          total += cylinder_measure(dist, matrix, path);
        }
      }
    }
    return bounded(std::abs(total - 1.0), 1e-12);
  });
  battery.check("chain.reduce-to-fundamental", [&battery] {
    Xoshiro256PlusPlus rng(battery.options_.seed + 2);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const double alpha = 0.02 + rng.uniform01() * (pi / 6 - 0.02);
      const double theta = 1e-6 + rng.uniform01() * (pi - 2e-6);
      const Word word = reduce_to_fundamental(alpha, theta);
      double current = theta;
      const FeresParams params{alpha, std::nullopt};
      for (int branch : word) current = apply_branch(branch, params, current);
      if (current < -1e-12 || current > alpha + 1e-12) {
        return std::pair{false, "left fundamental domain: " + fmt(current)};
      }
      worst = std::max(worst, std::abs(current - fold_angle(alpha, theta)));
    }
    const Word boundary = reduce_to_fundamental(pi / 6, 1.0);  // closed alpha bound
    (void)boundary;
    return bounded(worst, 1e-12);
  });
}

void add_measure_checks(Battery& battery) {
  battery.check("measure.tv-to-uniform-constant", [] {
    // closed form cos(t) - 1 + 2t/pi at t = asin(2/pi): the one-sided excess
    // of sin(theta)/2 over 1/pi; cross-checked by quadrature and binned laws
    const double t = std::asin(2.0 / pi);
    const double closed = std::cos(t) - 1.0 + 2.0 * t / pi;
    const double quad = 0.5 * adaptive_integrate(
        [](double theta) { return std::abs(0.5 * std::sin(theta) - 1.0 / pi); },
        0.0, pi, 1e-12);
    const AngleHistogram mu = liouville_histogram(2000);
    const AngleHistogram flat = histogram_from_density(
        [](double theta) { return 2.0 / (pi * std::sin(theta)); }, 2000);
    const double binned = tv_distance(mu, flat);
    if (std::abs(closed - 0.2105136623530187) > 1e-12) {
      return std::pair{false, "closed form drifted: " + fmt(closed)};
    }
    if (std::abs(quad - closed) > 1e-9) {
      return std::pair{false, "quadrature " + fmt(quad) + " vs closed " + fmt(closed)};
    }
    return std::pair{std::abs(binned - closed) < 1e-3,
                     "binned " + fmt(binned) + " vs closed " + fmt(closed)};
  });
  battery.check("measure.histogram-of-unit-density-is-liouville", [] {
    const AngleHistogram a = histogram_from_density([](double) { return 1.0; }, 377);
    const AngleHistogram b = liouville_histogram(377);
    return bounded(tv_distance(a, b), 1e-12);
  });
  battery.check("measure.evolve-conserves-mass", [&battery] {
    Xoshiro256PlusPlus rng(battery.options_.seed + 3);
    const FeresParams params = make_params(0.3);
    AngleHistogram hist{257, std::vector<double>(257, 0.0)};
    double sum = 0.0;
    for (double& m : hist.mass) sum += (m = rng.uniform01());
    for (double& m : hist.mass) m /= sum;
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      hist = evolve_kernel(params, hist);
      worst = std::max(worst, std::abs(hist.total() - 1.0));
      for (double m : hist.mass) {
        if (m < 0.0) return std::pair{false, std::string("negative cell mass")};
      }
    }
    return bounded(worst, 1e-12);
  });
  battery.check("measure.evolve-fixes-liouville", [] {
    const FeresParams params = make_params(0.5);
    const AngleHistogram mu = liouville_histogram(2000);
    const AngleHistogram pushed = evolve_kernel(params, mu);
    return bounded(tv_distance(pushed, mu), 1e-3);
  });
  battery.check("measure.knudsen-monotone-irrational", [] {
    const FeresParams params = make_params(0.5);
    const AngleHistogram start = histogram_from_density(
        [](double theta) { return 2.0 / (pi * std::sin(theta)); }, 500);
    const auto trace = knudsen_run(params, start, 60);
    if (!(trace[60] < trace[10] && trace[10] < trace[0])) {
      return std::pair{false, "no decay: " + fmt(trace[0]) + " -> " + fmt(trace[10]) +
                                  " -> " + fmt(trace[60])};
    }
    return std::pair{trace[60] < 0.06, "tv(60) = " + fmt(trace[60])};
  });
  battery.check("measure.knudsen-confined-rational", [] {
    const FeresParams params = make_params(1, 8);
    const AngleHistogram start = point_mass_histogram(pi / 16, 2000);
    auto trace = knudsen_run(params, start, 40);
    double low = 2.0;
    for (double tv : trace) low = std::min(low, tv);
    return std::pair{low > 0.9, "min tv over 40 steps = " + fmt(low)};
  });
  battery.check("measure.chain-evolution-stochastic", [] {
    const FeresParams params = make_params(1, 8);
    const ChainStates states = enumerate_states(params, pi / 16);
    const StochasticMatrix matrix = build_matrix(states, params);
    std::vector<double> d0(states.size(), 0.0);
    d0[0] = 1.0;
    const auto rows = chain_evolution(states, matrix, d0, 50);
    double worst = 0.0;
    for (const auto& row : rows) {
      double sum = 0.0;
      for (double w : row) {
        if (w < 0.0) return std::pair{false, std::string("negative probability")};
        sum += w;
      }
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return bounded(worst, 1e-12);
  });
  battery.check("measure.phase-noise-floor-invariant-start", [&battery] {
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const FeresParams params = make_params(0.5);
    const std::size_t ensemble = battery.options_.quick ? 40000 : 200000;
    const auto result = phase_knudsen(table, params, InitialAngleLaw::invariant,
                                      ensemble, 10, 50, 50, battery.options_.seed + 4,
                                      battery.options_.threads);
    double worst = 0.0;
    for (double tv : result.tv) worst = std::max(worst, tv);
    const double floor = result.tv[0];
    std::ostringstream detail;
    detail << "tv stays in [" << fmt(floor) << ", " << fmt(worst) << "]";
    return std::pair{worst <= 1.6 * floor, detail.str()};
  });
}

void add_dynamics_checks(Battery& battery) {
  battery.check("billiard.deterministic-step-preserves-angle", [] {
    const CircleTable table = make_table(SurfaceKind::hyperbolic, 1.2);
    PhasePoint point{0.3, 1.1};
    for (int i = 0; i < 50; ++i) {
      const PhasePoint next = deterministic_step(table, point);
      if (next.theta != point.theta) return std::pair{false, std::string("angle drifted")};
      if (next.s < 0.0 || next.s >= table.L) return std::pair{false, std::string("s escaped")};
      point = next;
    }
    return std::pair{true, std::string("angle frozen, s wraps")};
  });
  battery.check("billiard.skew-matches-random-step", [&battery] {
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const FeresParams params = make_params(0.3);
    Xoshiro256PlusPlus rng(battery.options_.seed + 5);
    for (int i = 0; i < 2000; ++i) {
      const double theta = 1e-3 + rng.uniform01() * (pi - 2e-3);
      const double s = rng.uniform01() * table.L;
      const double u = rng.uniform01();
      const RandomStep by_rng = random_step(table, params, {s, theta}, u);
      const SkewPoint by_skew = skew_step(table, params, {u, s, theta});
      if (by_rng.point.theta != by_skew.theta || by_rng.point.s != by_skew.s) {
        return std::pair{false, "mismatch at theta " + fmt(theta)};
      }
      if (by_skew.x < 0.0 || by_skew.x >= 1.0) {
        return std::pair{false, "skew coordinate " + fmt(by_skew.x)};
      }
    }
    return std::pair{true, std::string("same branch, angle and position on 2000 draws")};
  });
  battery.check("billiard.skew-branch-frequencies", [&battery] {
    // along one skew orbit the branch frequencies at a revisited region match
    // the branch distribution there (chi-square on pooled bins)
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const FeresParams params = make_params(0.3);
    const std::size_t steps = battery.options_.quick ? 60000 : 200000;
    SkewPoint point{0.618033988749894, 0.0, 1.0};
    std::array<std::array<double, 4>, 8> expected{};
    std::array<std::array<std::uint64_t, 4>, 8> observed{};
    for (std::size_t k = 0; k < steps; ++k) {
      const int region = std::min(7, static_cast<int>(point.theta / pi * 8));
      const BranchDistribution dist = branch_distribution(params, point.theta);
      const SkewPoint next = skew_step(table, params, point);
      int branch = 0;
      for (int b = 1; b <= 4; ++b) {
        if (std::abs(apply_branch(b, params, point.theta) - next.theta) < 1e-12) {
          branch = b;
          break;
        }
      }
      if (branch == 0) return std::pair{false, std::string("step matched no branch")};
      for (int b = 0; b < 4; ++b) expected[region][b] += dist.p[b];
      ++observed[region][branch - 1];
      point = next;
    }
    double chi2 = 0.0;
    int dof = 0;
    for (int region = 0; region < 8; ++region) {
      int used = 0;
      for (int b = 0; b < 4; ++b) {
        if (expected[region][b] < 5.0) continue;
        const double dev = static_cast<double>(observed[region][b]) - expected[region][b];
        chi2 += dev * dev / expected[region][b];
        ++used;
      }
      if (used > 1) dof += used - 1;
    }
    const double p = chi_square_sf(chi2, dof);
    return std::pair{p > 1e-3, "chi2 " + fmt(chi2) + " on " + std::to_string(dof) +
                                   " dof, p = " + fmt(p)};
  });
  battery.check("billiard.cocycle-bound-and-flags", [&battery] {
    const CircleTable table = make_table(SurfaceKind::spherical, 0.8);
    const FeresParams params = make_params(pi / 8);
    Xoshiro256PlusPlus rng(battery.options_.seed + 6);
    PhasePoint point{0.1, 1.0};
    Cocycle cocycle;
    const double bound = max_central_angle_derivative(table);
    for (int k = 1; k <= 20000; ++k) {
      const RandomStep stepped = random_step(table, params, point, rng.uniform01());
      point = stepped.point;
      cocycle = cocycle_step(cocycle, table, point.theta, stepped.branch);
      if (std::abs(cocycle.B) != 1.0) return std::pair{false, std::string("B left {-1,+1}")};
      if (std::abs(cocycle.A) > bound * k + 1e-9) {
        return std::pair{false, "A bound broken at step " + std::to_string(k)};
      }
    }
    const double along_s = cocycle_exponent(cocycle, table, {1.0, 0.0});
    if (along_s != 0.0) return std::pair{false, std::string("flow direction exponent nonzero")};
    return std::pair{true, std::string("|A| within n*max gamma', B is a sign, s-direction exact 0")};
  });
  battery.check("diagnostics.lyapunov-shrinks", [&battery] {
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const FeresParams params = make_params(0.5);
    const std::size_t n = battery.options_.quick ? 20000 : 50000;
    const LyapunovTrace trace = lyapunov(table, params, {0.0, 1.0}, {0.0, 1.0}, n,
                                         battery.options_.seed + 7);
    const double last = trace.exponent.back();
    return std::pair{std::abs(last) < 1e-2, "lambda(" + std::to_string(n) + ") = " + fmt(last)};
  });
  battery.check("diagnostics.dense-gap-shrinks", [] {
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const FeresParams params = make_params(1, 8);
    const GapTrace trace = dense_orbit_test(table, params, {0.0, 1.0}, 1000);
    const double first = trace.gap.front();
    const double last = trace.gap.back();
    if (last >= first) return std::pair{false, std::string("gap did not shrink")};
    return std::pair{last < table.L / 100.0,
                     "gap " + fmt(first) + " -> " + fmt(last) + " of L = " + fmt(table.L)};
  });
  battery.check("diagnostics.mixing-dichotomy-smoke", [&battery] {
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const std::size_t ensemble = battery.options_.quick ? 60000 : 200000;
    const std::size_t lags[] = {50};
    const Rectangle quarter{0.0, table.L / 4, 0.0, pi / 2};
    const auto f = rectangle_indicator(quarter);

    const FeresParams irrational = make_params(0.5);
    const auto null_trace = mixing_correlation(table, irrational, f, f, lags, ensemble,
                                               battery.options_.seed + 8,
                                               battery.options_.threads);
    const auto& null_point = null_trace.points.front();
    if (std::abs(null_point.estimate) > 4.0 * null_point.std_error) {
      return std::pair{false, "irrational correlation " + fmt(null_point.estimate) +
                                  " vs se " + fmt(null_point.std_error)};
    }

    const FeresParams rational = make_params(1, 8);
    const ChainStates states = enumerate_states(rational, pi / 16);
    const auto g = angle_neighborhood_indicator(states.angles, 0.02);
    const auto peak_trace = mixing_correlation(table, rational, g, g, lags, ensemble,
                                               battery.options_.seed + 9,
                                               battery.options_.threads);
    const auto& peak = peak_trace.points.front();
    if (peak.estimate < 5.0 * peak.std_error) {
      return std::pair{false, "rational correlation " + fmt(peak.estimate) + " vs se " +
                                  fmt(peak.std_error)};
    }
    return std::pair{true, "null " + fmt(null_point.estimate) + ", peak " + fmt(peak.estimate)};
  });
  battery.check("diagnostics.motion-constant", [&battery] {
    for (auto [num, den] : {std::pair{1L, 7L}, {1L, 8L}, {1L, 10L}}) {
      const FeresParams params = make_params(num, den);
      const CircleTable table = make_table(SurfaceKind::hyperbolic, 1.0);
      const TrajectoryRecord record = simulate(table, params, {0.2, 0.9}, 2000,
                                               battery.options_.seed + den);
      if (!motion_constant_check(params, record)) {
        return std::pair{false, "class drifted for den " + std::to_string(den)};
      }
    }
    const FeresParams irrational = make_params(0.5);
    const CircleTable table = make_table(SurfaceKind::flat, 1.0);
    const TrajectoryRecord record = simulate(table, irrational, {0.0, 1.0}, 10,
                                             battery.options_.seed);
    try {
      motion_constant_check(irrational, record);
      return std::pair{false, std::string("irrational alpha accepted")};
    } catch (const ValidationError& error) {
      if (error.code() != errc::unsupported_alpha_form) throw;
    }
    return std::pair{true, std::string("constant for pi/7, pi/8, pi/10; rejected otherwise")};
  });
  battery.check("diagnostics.reproducible-runs", [&battery] {
    const CircleTable table = make_table(SurfaceKind::spherical, 0.7);
    const FeresParams params = make_params(pi / 8);
    const TrajectoryRecord first = simulate(table, params, {0.5, 1.3}, 4000,
                                            battery.options_.seed + 10);
    const TrajectoryRecord second = simulate(table, params, {0.5, 1.3}, 4000,
                                             battery.options_.seed + 10);
    for (std::size_t k = 0; k < first.steps.size(); ++k) {
      if (first.steps[k].s != second.steps[k].s ||
          first.steps[k].theta != second.steps[k].theta ||
          first.steps[k].branch != second.steps[k].branch) {
        return std::pair{false, "divergence at step " + std::to_string(k)};
      }
    }
    const auto once = phase_knudsen(table, params, InitialAngleLaw::invariant, 20000, 5,
                                    20, 20, battery.options_.seed + 11, 1);
    const auto again = phase_knudsen(table, params, InitialAngleLaw::invariant, 20000, 5,
                                     20, 20, battery.options_.seed + 11, 4);
    for (std::size_t k = 0; k < once.tv.size(); ++k) {
      if (once.tv[k] != again.tv[k]) {
        return std::pair{false, std::string("thread count changed the trace")};
      }
    }
    return std::pair{true, std::string("trajectories and traces identical")};
  });
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  Battery battery(options);
  add_rng_checks(battery);
  add_surface_checks(battery);
  add_feres_checks(battery);
  add_chain_checks(battery);
  add_measure_checks(battery);
  add_dynamics_checks(battery);
  return battery.take();
}

}  // namespace billiards

#include "billiards/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "billiards/billiard.hpp"
#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"
#include "billiards/parallel.hpp"
#include "billiards/rng.hpp"

namespace billiards {

double liouville_mass(double a, double b) {
  require(a <= b, errc::invalid_interval, "liouville_mass needs a <= b");
  require(a >= 0.0 && b <= pi, errc::invalid_interval,
          "interval must sit inside [0, pi]");
  return 0.5 * (std::cos(a) - std::cos(b));
}

double AngleHistogram::bin_width() const { return pi / static_cast<double>(bins); }

double AngleHistogram::total() const {
  double sum = 0.0;
  for (double m : mass) sum += m;
  return sum;
}

namespace {

void check_histogram(const AngleHistogram& hist) {
  require(hist.bins >= 1 && hist.mass.size() == hist.bins, errc::bin_mismatch,
          "histogram bins and mass length disagree");
}

}  // namespace

AngleHistogram liouville_histogram(std::size_t bins) {
  require(bins >= 1, errc::invalid_argument, "need at least one bin");
  AngleHistogram hist{bins, std::vector<double>(bins, 0.0)};
  const double width = hist.bin_width();
  for (std::size_t j = 0; j < bins; ++j) {
    hist.mass[j] = liouville_mass(j * width, std::min((j + 1) * width, pi));
  }
  return hist;
}

AngleHistogram histogram_from_density(const std::function<double(double)>& g,
                                      std::size_t bins) {
  require(bins >= 1, errc::invalid_argument, "need at least one bin");
  AngleHistogram hist{bins, std::vector<double>(bins, 0.0)};
  const double width = hist.bin_width();
  for (std::size_t j = 0; j < bins; ++j) {
    const double lo = j * width;
    const double hi = std::min((j + 1) * width, pi);
    hist.mass[j] = integrate_gl20(
        [&](double theta) {
          const double value = g(theta);
          require(value >= 0.0, errc::negative_density,
                  "density is negative at theta = " + std::to_string(theta));
          return value * 0.5 * std::sin(theta);
        },
        lo, hi);
    if (hist.mass[j] < 0.0) hist.mass[j] = 0.0;
  }
  const double total = hist.total();
  ensure(std::abs(total - 1.0) <= 1e-8, errc::normalization_failure,
         "density integrates to " + std::to_string(total));
  for (double& m : hist.mass) m /= total;
  return hist;
}

AngleHistogram point_mass_histogram(double theta0, std::size_t bins) {
  require(bins >= 1, errc::invalid_argument, "need at least one bin");
  require(theta0 > 0.0 && theta0 < pi, errc::theta_out_of_range,
          "theta0 must lie in (0, pi)");
  AngleHistogram hist{bins, std::vector<double>(bins, 0.0)};
  std::size_t j = static_cast<std::size_t>(theta0 / hist.bin_width());
  if (j >= bins) j = bins - 1;
  hist.mass[j] = 1.0;
  return hist;
}

AngleHistogram evolve_kernel(const FeresParams& params, const AngleHistogram& hist) {
  check_histogram(hist);
  const std::size_t bins = hist.bins;
  const double width = hist.bin_width();
  const auto breaks = probability_breakpoints(params);
  const double shift = 2.0 * params.alpha;
  const double mirror_far = 2.0 * pi - 4.0 * params.alpha;  // branch 2 offset
  const double mirror_near = 4.0 * params.alpha;            // branch 4 offset

  AngleHistogram out{bins, std::vector<double>(bins, 0.0)};
  const auto& nodes = gl3_nodes();

  auto deposit = [&](double lo, double hi, double amount) {
    if (amount <= 0.0) return;
    const double span = hi - lo;
    std::size_t j0 = lo <= 0.0 ? 0 : static_cast<std::size_t>(lo / width);
    if (j0 >= bins) j0 = bins - 1;
    for (std::size_t j = j0; j < bins; ++j) {
      const double cell_lo = j * width;
      if (cell_lo >= hi) break;
      const double cell_hi = std::min((j + 1) * width, pi);
      const double overlap = std::min(hi, cell_hi) - std::max(lo, cell_lo);
      if (overlap > 0.0) out.mass[j] += amount * overlap / span;
    }
  };

  std::vector<double> cuts;
  for (std::size_t cell = 0; cell < bins; ++cell) {
    const double m = hist.mass[cell];
    if (m == 0.0) continue;
    const double x0 = cell * width;
    const double x1 = std::min((cell + 1) * width, pi);
    cuts.assign({x0, x1});
    for (double bp : breaks) {
      if (bp > x0 && bp < x1) cuts.push_back(bp);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double a = cuts[piece];
      const double b = cuts[piece + 1];
      if (b - a <= 0.0) continue;
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      std::array<double, 4> avg{0.0, 0.0, 0.0, 0.0};
      for (const auto& node : nodes) {
        const BranchDistribution dist = branch_distribution(params, mid + half * node.x);
        for (int i = 0; i < 4; ++i) avg[i] += 0.5 * node.w * dist.p[i];
      }
      const double share = m * (b - a) / (x1 - x0);
      if (avg[0] > 0.0) deposit(a + shift, b + shift, share * avg[0]);
      if (avg[1] > 0.0) deposit(mirror_far - b, mirror_far - a, share * avg[1]);
      if (avg[2] > 0.0) deposit(a - shift, b - shift, share * avg[2]);
      if (avg[3] > 0.0) deposit(mirror_near - b, mirror_near - a, share * avg[3]);
    }
  }

  ensure(std::abs(out.total() - hist.total()) <= 1e-12,
         errc::normalization_failure, "kernel step lost mass");
  return out;
}

double tv_distance(const AngleHistogram& a, const AngleHistogram& b) {
  check_histogram(a);
  check_histogram(b);
  require(a.bins == b.bins, errc::bin_mismatch, "histograms use different bins");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.bins; ++j) sum += std::abs(a.mass[j] - b.mass[j]);
  return 0.5 * sum;
}

std::vector<double> knudsen_run(const FeresParams& params,
                                const AngleHistogram& initial, std::size_t n) {
  check_histogram(initial);
  const AngleHistogram reference = liouville_histogram(initial.bins);
  std::vector<double> trace;
  trace.reserve(n + 1);
  AngleHistogram current = initial;
  trace.push_back(tv_distance(current, reference));
  for (std::size_t k = 0; k < n; ++k) {
    current = evolve_kernel(params, current);
    trace.push_back(tv_distance(current, reference));
  }
  return trace;
}

std::vector<std::vector<double>> chain_evolution(const ChainStates& states,
                                                 const StochasticMatrix& matrix,
                                                 std::span<const double> d0,
                                                 std::size_t n) {
  require(states.size() == matrix.n, errc::bin_mismatch,
          "states and matrix sizes disagree");
  require(d0.size() == matrix.n, errc::bin_mismatch,
          "initial distribution length does not match the chain");
  double sum = 0.0;
  for (double w : d0) {
    require(w >= 0.0, errc::negative_density, "distribution entries must be >= 0");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= 1e-9, errc::normalization_failure,
          "initial distribution sums to " + std::to_string(sum));

  std::vector<std::vector<double>> rows;
  rows.reserve(n + 1);
  rows.emplace_back(d0.begin(), d0.end());
  for (std::size_t k = 0; k < n; ++k) {
    rows.push_back(matrix.apply_to_row(rows.back()));
  }
  return rows;
}

PhaseHistogram liouville_phase_histogram(std::size_t s_bins, std::size_t theta_bins,
                                         double length) {
  require(s_bins >= 1 && theta_bins >= 1, errc::invalid_argument,
          "need at least one bin per axis");
  require(length > 0.0, errc::invalid_argument, "length must be positive");
  PhaseHistogram hist{s_bins, theta_bins, length,
                      std::vector<double>(s_bins * theta_bins, 0.0)};
  const AngleHistogram angle = liouville_histogram(theta_bins);
  for (std::size_t si = 0; si < s_bins; ++si) {
    for (std::size_t ti = 0; ti < theta_bins; ++ti) {
      hist.at(si, ti) = angle.mass[ti] / static_cast<double>(s_bins);
    }
  }
  return hist;
}

double tv_distance(const PhaseHistogram& a, const PhaseHistogram& b) {
  require(a.s_bins == b.s_bins && a.theta_bins == b.theta_bins, errc::bin_mismatch,
          "phase histograms use different grids");
  require(a.mass.size() == b.mass.size(), errc::bin_mismatch,
          "phase histogram storage mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.mass.size(); ++k) sum += std::abs(a.mass[k] - b.mass[k]);
  return 0.5 * sum;
}

const char* to_string(InitialAngleLaw law) {
  switch (law) {
    case InitialAngleLaw::invariant: return "invariant";
    case InitialAngleLaw::lower_half: return "lower-half";
    case InitialAngleLaw::uniform_theta: return "uniform-theta";
  }
  return "?";
}

double sample_initial_angle(InitialAngleLaw law, double v) {
  require(v >= 0.0 && v < 1.0, errc::invalid_argument, "v must lie in [0, 1)");
  double theta = 0.0;
  switch (law) {
    case InitialAngleLaw::invariant:
      theta = std::acos(std::clamp(1.0 - 2.0 * v, -1.0, 1.0));
      break;
    case InitialAngleLaw::lower_half:
      theta = std::acos(std::clamp(1.0 - v, -1.0, 1.0));
      break;
    case InitialAngleLaw::uniform_theta:
      theta = v * pi;
      break;
  }
  return std::clamp(theta, 1e-12, pi - 1e-12);
}

double initial_angle_density(InitialAngleLaw law, double theta) {
  switch (law) {
    case InitialAngleLaw::invariant:
      return 1.0;
    case InitialAngleLaw::lower_half:
      return theta < pi / 2 ? 2.0 : 0.0;
    case InitialAngleLaw::uniform_theta:
      return 2.0 / (pi * std::sin(theta));
  }
  return 0.0;
}

PhaseKnudsenResult phase_knudsen(const CircleTable& table, const FeresParams& params,
                                 InitialAngleLaw law, std::size_t ensemble,
                                 std::size_t n_steps, std::size_t s_bins,
                                 std::size_t theta_bins, std::uint64_t seed,
                                 unsigned threads) {
  require(ensemble >= 1, errc::too_few_points, "ensemble must be positive");
  require(s_bins >= 1 && theta_bins >= 1, errc::invalid_argument,
          "need at least one bin per axis");

  const std::size_t grid = s_bins * theta_bins;
  const std::size_t frames = n_steps + 1;
  const unsigned workers = resolve_threads(threads);
  std::vector<std::vector<std::uint64_t>> partial(
      workers, std::vector<std::uint64_t>(frames * grid, 0));

  parallel_chunks(ensemble, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    auto& counts = partial[w];
    for (std::size_t j = begin; j < end; ++j) {
      Xoshiro256PlusPlus rng(derive_stream_seed(seed, j));
      PhasePoint point{rng.uniform01() * table.L,
                       sample_initial_angle(law, rng.uniform01())};
      for (std::size_t k = 0; k < frames; ++k) {
        if (k > 0) point = random_step(table, params, point, rng.uniform01()).point;
        std::size_t si = static_cast<std::size_t>(point.s / table.L * s_bins);
        if (si >= s_bins) si = s_bins - 1;
        std::size_t ti = static_cast<std::size_t>(point.theta / pi * theta_bins);
        if (ti >= theta_bins) ti = theta_bins - 1;
        ++counts[k * grid + si * theta_bins + ti];
      }
    }
  });

  std::vector<std::uint64_t> counts(frames * grid, 0);
  for (const auto& local : partial) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += local[k];
  }

  const PhaseHistogram reference = liouville_phase_histogram(s_bins, theta_bins, table.L);
  const double m = static_cast<double>(ensemble);
  PhaseKnudsenResult result;
  result.s_bins = s_bins;
  result.theta_bins = theta_bins;
  result.ensemble = ensemble;
  result.tv.reserve(frames);
  result.s_chi_square.reserve(frames);
  const double expected_s = m / static_cast<double>(s_bins);
  for (std::size_t k = 0; k < frames; ++k) {
    double tv = 0.0;
    double chi = 0.0;
    for (std::size_t si = 0; si < s_bins; ++si) {
      std::uint64_t row = 0;
      for (std::size_t ti = 0; ti < theta_bins; ++ti) {
        const std::uint64_t c = counts[k * grid + si * theta_bins + ti];
        row += c;
        tv += std::abs(static_cast<double>(c) / m - reference.at(si, ti));
      }
      const double dev = static_cast<double>(row) - expected_s;
      chi += dev * dev / expected_s;
    }
    result.tv.push_back(0.5 * tv);
    result.s_chi_square.push_back(chi);
  }
  return result;
}

}  // namespace billiards

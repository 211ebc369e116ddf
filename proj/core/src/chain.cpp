#include "billiards/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"

namespace billiards {

std::size_t ChainStates::find(double theta) const {
  auto it = std::lower_bound(angles.begin(), angles.end(), theta - state_dedup_epsilon);
  if (it == angles.end()) return npos;
  if (std::abs(*it - theta) > state_dedup_epsilon) return npos;
  return static_cast<std::size_t>(it - angles.begin());
}

namespace {

// Branch maps in exact lattice coordinates theta = sign*theta0 + units*pi/den
// for alpha = num*pi/den.
ChainStates::LatticeCoord apply_branch_lattice(int branch, const PiFraction& frac,
                                               ChainStates::LatticeCoord coord) {
  const long m = frac.num;
  const long n = frac.den;
  switch (branch) {
    case 1: return {coord.sign, coord.units + 2 * m};
    case 2: return {-coord.sign, 2 * n - 4 * m - coord.units};
    case 3: return {coord.sign, coord.units - 2 * m};
    default: return {-coord.sign, 4 * m - coord.units};
  }
}

double lattice_angle(const ChainStates::LatticeCoord& coord, double theta0,
                     const PiFraction& frac) {
  return coord.sign * theta0 +
         static_cast<double>(coord.units) * pi / static_cast<double>(frac.den);
}

}  // namespace

ChainStates enumerate_states(const FeresParams& params, double theta0,
                             std::size_t max_states) {
  require(std::isfinite(theta0) && theta0 > 0.0 && theta0 < pi,
          errc::theta_out_of_range, "theta0 must lie in (0, pi)");
  require(max_states >= 1, errc::invalid_argument, "max_states must be positive");

  std::vector<double> angles{theta0};
  std::vector<ChainStates::LatticeCoord> coords;
  if (params.rational) coords.push_back({1, 0});

  auto locate = [&](double theta) -> std::size_t {
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (std::abs(angles[i] - theta) <= state_dedup_epsilon) return i;
    }
    return ChainStates::npos;
  };

  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t index = frontier.front();
    frontier.pop_front();
    const double theta = angles[index];
    const BranchDistribution dist = branch_distribution(params, theta);
    for (int branch = 1; branch <= 4; ++branch) {
      if (dist[branch] <= 0.0) continue;
      ChainStates::LatticeCoord image_coord{};
      double image;
      if (params.rational) {
        image_coord = apply_branch_lattice(branch, *params.rational, coords[index]);
        image = lattice_angle(image_coord, theta0, *params.rational);
      } else {
        image = apply_branch(branch, params, theta);
      }
      if (locate(image) != ChainStates::npos) continue;
      require(angles.size() < max_states, errc::truncated_state_space,
              "angle class exceeds " + std::to_string(max_states) +
                  " states; alpha is not a small rational multiple of pi");
      angles.push_back(image);
      if (params.rational) coords.push_back(image_coord);
      frontier.push_back(angles.size() - 1);
    }
  }

  // sort ascending, carrying lattice coordinates along
  std::vector<std::size_t> order(angles.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });

  ChainStates states;
  states.theta0 = theta0;
  states.rational = params.rational;
  states.angles.reserve(angles.size());
  for (std::size_t i : order) states.angles.push_back(angles[i]);
  if (params.rational) {
    states.lattice.reserve(coords.size());
    for (std::size_t i : order) states.lattice.push_back(coords[i]);
  }
  return states;
}

double StochasticMatrix::entry(std::size_t i, std::size_t j) const {
  for (const auto& [col, p] : rows[i]) {
    if (col == j) return p;
  }
  return 0.0;
}

std::vector<double> StochasticMatrix::apply_to_row(std::span<const double> dist) const {
  require(dist.size() == n, errc::bin_mismatch,
          "distribution length does not match the chain");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i] == 0.0) continue;
    for (const auto& [col, p] : rows[i]) out[col] += dist[i] * p;
  }
  return out;
}

StochasticMatrix build_matrix(const ChainStates& states, const FeresParams& params) {
  StochasticMatrix matrix;
  matrix.n = states.size();
  matrix.rows.resize(matrix.n);
  for (std::size_t i = 0; i < matrix.n; ++i) {
    const double theta = states.angles[i];
    const BranchDistribution dist = branch_distribution(params, theta);
    double row_sum = 0.0;
    for (int branch = 1; branch <= 4; ++branch) {
      const double p = dist[branch];
      if (p <= 0.0) continue;
      double image;
      if (states.rational) {
        image = lattice_angle(
            apply_branch_lattice(branch, *states.rational, states.lattice[i]),
            states.theta0, *states.rational);
      } else {
        image = apply_branch(branch, params, theta);
      }
      const std::size_t target = states.find(image);
      ensure(target != ChainStates::npos, errc::image_escapes_state_space,
             "branch image " + std::to_string(image) + " missing from the state set");
      matrix.rows[i].emplace_back(target, p);
      row_sum += p;
    }
    ensure(std::abs(row_sum - 1.0) <= 1e-12, errc::normalization_failure,
           "row " + std::to_string(i) + " sums to " + std::to_string(row_sum));
    std::sort(matrix.rows[i].begin(), matrix.rows[i].end());
    // merge parallel edges landing on the same state
    auto& row = matrix.rows[i];
    std::size_t write = 0;
    for (std::size_t read = 0; read < row.size(); ++read) {
      if (write > 0 && row[write - 1].first == row[read].first) {
        row[write - 1].second += row[read].second;
      } else {
        row[write++] = row[read];
      }
    }
    row.resize(write);
  }
  return matrix;
}

namespace {

std::vector<char> reachable(const StochasticMatrix& matrix, bool reversed) {
  std::vector<std::vector<std::size_t>> adjacency(matrix.n);
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (const auto& [col, p] : matrix.rows[i]) {
      if (reversed) adjacency[col].push_back(i);
      else adjacency[i].push_back(col);
    }
  }
  std::vector<char> seen(matrix.n, 0);
  std::deque<std::size_t> frontier{0};
  seen[0] = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop_front();
    for (std::size_t v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        frontier.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_irreducible(const StochasticMatrix& matrix) {
  require(matrix.n >= 1, errc::invalid_argument, "empty chain");
  const auto forward = reachable(matrix, false);
  const auto backward = reachable(matrix, true);
  for (std::size_t i = 0; i < matrix.n; ++i) {
    if (!forward[i] || !backward[i]) return false;
  }
  return true;
}

int chain_period(const StochasticMatrix& matrix) {
  require(is_irreducible(matrix), errc::reducible_chain,
          "period is defined here for irreducible chains only");
  std::vector<long> level(matrix.n, -1);
  std::deque<std::size_t> frontier{0};
  level[0] = 0;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop_front();
    for (const auto& [v, p] : matrix.rows[u]) {
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  long g = 0;
  for (std::size_t u = 0; u < matrix.n; ++u) {
    for (const auto& [v, p] : matrix.rows[u]) {
      g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
    }
  }
  ensure(g >= 1, errc::no_convergence, "degenerate period computation");
  return static_cast<int>(g);
}

namespace {

StationaryDist finalize_stationary(std::vector<double> weights,
                                   const StochasticMatrix& matrix) {
  double sum = 0.0;
  for (double& w : weights) {
    ensure(w > -1e-10, errc::no_convergence,
           "stationary solve produced weight " + std::to_string(w));
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  ensure(sum > 0.0, errc::no_convergence, "stationary solve collapsed to zero");
  for (double& w : weights) w /= sum;
  StationaryDist dist{std::move(weights)};
  ensure(stationary_residual(dist, matrix) <= 1e-10, errc::no_convergence,
         "stationary residual above 1e-10");
  return dist;
}

}  // namespace

StationaryDist stationary_direct(const StochasticMatrix& matrix) {
  const std::size_t n = matrix.n;
  require(n >= 1 && n <= 2048, errc::invalid_argument,
          "direct stationary solve limited to 1..2048 states");
  // rows 1.. : (P^T - I) pi = 0; row 0 : sum pi = 1
  std::vector<double> a(n * n, 0.0);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [col, p] : matrix.rows[i]) {
      if (col != 0) a[col * n + i] += p;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i != 0) a[i * n + i] -= 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) a[j] = 1.0;
  b[0] = 1.0;
  linear_solve(n, a.data(), b.data());
  return finalize_stationary(std::move(b), matrix);
}

StationaryDist stationary_power(const StochasticMatrix& matrix,
                                std::size_t max_iterations, double tolerance) {
  const std::size_t n = matrix.n;
  const std::size_t window = static_cast<std::size_t>(chain_period(matrix));
  std::vector<double> current(n, 1.0 / static_cast<double>(n));
  std::deque<std::vector<double>> ring{current};
  std::vector<double> previous_avg;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    current = matrix.apply_to_row(current);
    ring.push_back(current);
    if (ring.size() > window) ring.pop_front();
    if (ring.size() < window) continue;
    std::vector<double> avg(n, 0.0);
    for (const auto& row : ring) {
      for (std::size_t j = 0; j < n; ++j) avg[j] += row[j] / window;
    }
    if (!previous_avg.empty()) {
      double diff = 0.0;
      for (std::size_t j = 0; j < n; ++j) diff += std::abs(avg[j] - previous_avg[j]);
      if (diff <= tolerance) return finalize_stationary(std::move(avg), matrix);
    }
    previous_avg = std::move(avg);
  }
  throw_internal(errc::no_convergence, "power iteration did not settle");
}

StationaryDist stationary(const StochasticMatrix& matrix) {
  if (matrix.n <= 2048) return stationary_direct(matrix);
  return stationary_power(matrix, 1000000);
}

double stationary_residual(const StationaryDist& dist, const StochasticMatrix& matrix) {
  require(dist.weights.size() == matrix.n, errc::bin_mismatch,
          "distribution length does not match the chain");
  const auto mapped = matrix.apply_to_row(dist.weights);
  double res = 0.0;
  for (std::size_t j = 0; j < matrix.n; ++j) res += std::abs(mapped[j] - dist.weights[j]);
  return res;
}

double cylinder_measure(const StationaryDist& dist, const StochasticMatrix& matrix,
                        std::span<const std::size_t> path) {
  require(!path.empty(), errc::invalid_path, "cylinder path is empty");
  require(dist.weights.size() == matrix.n, errc::bin_mismatch,
          "distribution length does not match the chain");
  for (std::size_t state : path) {
    require(state < matrix.n, errc::invalid_path, "cylinder path leaves the chain");
  }
  double measure = dist.weights[path[0]];
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    measure *= matrix.entry(path[k], path[k + 1]);
    if (measure == 0.0) break;
  }
  return measure;
}

double fold_angle(double alpha, double theta) {
  require(std::isfinite(alpha) && alpha > 0.0, errc::invalid_argument,
          "fold_angle needs alpha > 0");
  require(std::isfinite(theta), errc::invalid_argument, "fold_angle needs finite theta");
  const double cell = 2.0 * alpha;
  double r = std::fmod(theta, cell);
  if (r < 0.0) r += cell;
  return std::min(r, cell - r);
}

double class_representative(const FeresParams& params, double theta) {
  return fold_angle(params.alpha, theta);
}

Word reduce_to_fundamental(double alpha, double theta) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= pi / 6.0,
          errc::invalid_argument, "reduce_to_fundamental needs alpha in (0, pi/6]");
  require(std::isfinite(theta) && theta > 0.0 && theta < pi,
          errc::theta_out_of_range, "theta must lie in (0, pi)");
  const double cell = 2.0 * alpha;
  long k = static_cast<long>(std::floor(theta / cell));
  double r = theta - static_cast<double>(k) * cell;
  if (r < 0.0) {
    r += cell;
    --k;
  } else if (r >= cell) {
    r -= cell;
    ++k;
  }
  Word word(static_cast<std::size_t>(k), 3);
  if (r > alpha) {
    word.push_back(4);
    word.push_back(3);
  }
  return word;
}

Word reduce_to_fundamental(const FeresParams& params, double theta) {
  return reduce_to_fundamental(params.alpha, theta);
}

}  // namespace billiards

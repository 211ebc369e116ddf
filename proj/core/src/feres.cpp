#include "billiards/feres.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"

namespace billiards {

namespace {

void check_alpha(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < pi / 6.0,
          errc::invalid_argument,
          "alpha must lie in (0, pi/6), got " + std::to_string(alpha));
}

void check_theta(double theta) {
  require(std::isfinite(theta) && theta > 0.0 && theta < pi,
          errc::theta_out_of_range,
          "theta must lie in (0, pi), got " + std::to_string(theta));
}

void check_branch(int branch) {
  require(branch >= 1 && branch <= 4, errc::invalid_path,
          "branch index must be 1..4, got " + std::to_string(branch));
}

}  // namespace

std::optional<PiFraction> detect_pi_fraction(double alpha, long max_den) {
  for (long den = 2; den <= max_den; ++den) {
    const long num = std::lround(alpha * den / pi);
    if (num < 1) continue;
    if (std::abs(alpha - static_cast<double>(num) * pi / den) < 1e-15 * pi) {
      const long g = std::gcd(num, den);
      return PiFraction{num / g, den / g};
    }
  }
  return std::nullopt;
}

FeresParams make_params(double alpha) {
  check_alpha(alpha);
  return FeresParams{alpha, detect_pi_fraction(alpha)};
}

FeresParams make_params(long num, long den) {
  require(num >= 1 && den >= 1, errc::invalid_argument,
          "pi-fraction must have positive terms");
  const long g = std::gcd(num, den);
  const double alpha = static_cast<double>(num) * pi / static_cast<double>(den);
  check_alpha(alpha);
  return FeresParams{alpha, PiFraction{num / g, den / g}};
}

std::array<double, 6> probability_breakpoints(const FeresParams& params) {
  const double a = params.alpha;
  return {a, 2 * a, 3 * a, pi - 3 * a, pi - 2 * a, pi - a};
}

double apply_branch(int branch, const FeresParams& params, double theta) {
  check_branch(branch);
  const double a = params.alpha;
  switch (branch) {
    case 1: return theta + 2 * a;
    case 2: return 2 * pi - 4 * a - theta;
    case 3: return theta - 2 * a;
    default: return 4 * a - theta;
  }
}

double invert_branch(int branch, const FeresParams& params, double y) {
  check_branch(branch);
  const double a = params.alpha;
  switch (branch) {
    case 1: return y - 2 * a;
    case 2: return 2 * pi - 4 * a - y;
    case 3: return y + 2 * a;
    default: return 4 * a - y;
  }
}

int branch_slope(int branch) {
  check_branch(branch);
  return (branch == 1 || branch == 3) ? 1 : -1;
}

namespace {

// (1 + tan(cut) * cot(theta)) / 2 and its mirror (1 - tan(cut) * cot(theta)) / 2.
double u_plus(double cut, double theta) {
  return 0.5 * (1.0 + std::tan(cut) * std::cos(theta) / std::sin(theta));
}

double u_minus(double cut, double theta) {
  return 0.5 * (1.0 - std::tan(cut) * std::cos(theta) / std::sin(theta));
}

}  // namespace

BranchDistribution branch_distribution(const FeresParams& params, double theta) {
  check_theta(theta);
  const double a = params.alpha;
  const double k2 = 2.0 * std::cos(2.0 * a);
  BranchDistribution dist{{0.0, 0.0, 0.0, 0.0}};
  auto& [p1, p2, p3, p4] = dist.p;

  if (theta < a) {
    p1 = 1.0;
  } else if (theta < 2 * a) {
    p1 = u_plus(a, theta);
    p4 = u_minus(a, theta);
  } else if (theta < 3 * a) {
    p1 = u_plus(a, theta);
    p3 = k2 * u_minus(2 * a, theta);
    p4 = u_minus(a, theta) - p3;
  } else if (theta < pi - 3 * a) {
    p1 = u_plus(a, theta);
    p3 = u_minus(a, theta);
  } else if (theta < pi - 2 * a) {
    p1 = k2 * u_plus(2 * a, theta);
    p2 = u_plus(a, theta) - p1;
    p3 = u_minus(a, theta);
  } else if (theta < pi - a) {
    p2 = u_plus(a, theta);
    p3 = u_minus(a, theta);
  } else {
    p3 = 1.0;
  }

  double sum = 0.0;
  for (auto& p : dist.p) {
    ensure(p > -1e-12, errc::normalization_failure,
           "negative branch probability at theta = " + std::to_string(theta));
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  ensure(std::abs(sum - 1.0) <= 1e-12, errc::normalization_failure,
         "branch probabilities sum to " + std::to_string(sum));
  return dist;
}

BranchSelection select_branch(const BranchDistribution& dist, double u) {
  require(u >= 0.0 && u < 1.0, errc::invalid_argument,
          "uniform draw must lie in [0, 1)");
  double cum = 0.0;
  int last = 0;
  double last_before = 0.0;
  for (int branch = 1; branch <= 4; ++branch) {
    const double p = dist[branch];
    if (p <= 0.0) continue;
    last = branch;
    last_before = cum;
    cum += p;
    if (u < cum) return {branch, last_before};
  }
  // u fell into roundoff slack past the final cumulative; the last positive
  // branch owns it
  ensure(last != 0, errc::normalization_failure, "no positive branch to sample");
  return {last, last_before};
}

int sample_branch(const BranchDistribution& dist, double u) {
  return select_branch(dist, u).branch;
}

FeresStep step(const FeresParams& params, double theta, double u) {
  const BranchDistribution dist = branch_distribution(params, theta);
  const int branch = sample_branch(dist, u);
  const double image = apply_branch(branch, params, theta);
  ensure(image > 0.0 && image < pi, errc::image_escapes_state_space,
         "branch " + std::to_string(branch) + " left (0, pi) from theta = " +
             std::to_string(theta));
  return {image, branch};
}

double kernel_mass(const FeresParams& params, double theta, double a, double b) {
  require(a < b, errc::empty_interval, "kernel_mass needs a < b");
  require(a >= 0.0 && b <= pi, errc::invalid_interval,
          "kernel_mass interval must sit inside [0, pi]");
  const BranchDistribution dist = branch_distribution(params, theta);
  double mass = 0.0;
  for (int branch = 1; branch <= 4; ++branch) {
    if (dist[branch] <= 0.0) continue;
    const double image = apply_branch(branch, params, theta);
    if (image >= a && image < b) mass += dist[branch];
  }
  return mass;
}

double kernel_invariance_defect(const FeresParams& params, double a, double b) {
  require(a < b, errc::empty_interval, "kernel_invariance_defect needs a < b");
  require(a >= 0.0 && b <= pi, errc::invalid_interval,
          "interval must sit inside [0, pi]");

  const auto breaks = probability_breakpoints(params);
  double total = 0.0;
  for (int branch = 1; branch <= 4; ++branch) {
    // preimage of [a, b) under the affine branch, as an interval
    double lo = invert_branch(branch, params, a);
    double hi = invert_branch(branch, params, b);
    if (lo > hi) std::swap(lo, hi);
    lo = std::max(lo, 0.0);
    hi = std::min(hi, pi);
    if (lo >= hi) continue;

    std::vector<double> cuts{lo, hi};
    for (double bp : breaks) {
      if (bp > lo && bp < hi) cuts.push_back(bp);
    }
    std::sort(cuts.begin(), cuts.end());

    const int idx = branch;
    auto integrand = [&](double theta) {
      return branch_distribution(params, theta)[idx] * 0.5 * std::sin(theta);
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += integrate_gl20(integrand, cuts[i], cuts[i + 1]);
    }
  }
  const double target = 0.5 * (std::cos(a) - std::cos(b));
  return std::abs(total - target);
}

WordEvaluation evaluate_word(const FeresParams& params, double theta, const Word& word) {
  check_theta(theta);
  for (int branch : word) check_branch(branch);
  WordEvaluation eval{1.0, {theta}, true};
  double current = theta;
  for (int branch : word) {
    if (current <= 0.0 || current >= pi) {
      eval.probability = 0.0;
      eval.admissible = false;
      return eval;
    }
    const BranchDistribution dist = branch_distribution(params, current);
    const double p = dist[branch];
    if (p <= 0.0) {
      eval.probability = 0.0;
      eval.admissible = false;
      return eval;
    }
    eval.probability *= p;
    current = apply_branch(branch, params, current);
    eval.path.push_back(current);
  }
  return eval;
}

double word_probability(const FeresParams& params, double theta, const Word& word) {
  return evaluate_word(params, theta, word).probability;
}

namespace {

// Closed support of each branch's probability as a function of alpha.
std::pair<double, double> branch_support(int branch, double a) {
  switch (branch) {
    case 1: return {0.0, pi - 2 * a};
    case 2: return {pi - 3 * a, pi - a};
    case 3: return {2 * a, pi};
    default: return {a, 3 * a};
  }
}

}  // namespace

bool is_almost_admissible(const FeresParams& params, double theta, const Word& word) {
  check_theta(theta);
  for (int branch : word) check_branch(branch);
  const double eps = admissibility_epsilon;
  double current = theta;
  for (int branch : word) {
    const auto [lo, hi] = branch_support(branch, params.alpha);
    if (current < lo - eps || current > hi + eps) return false;
    current = apply_branch(branch, params, current);
    if (current < -eps || current > pi + eps) return false;
  }
  return true;
}

}  // namespace billiards

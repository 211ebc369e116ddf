#pragma once

#include <array>
#include <optional>
#include <vector>

namespace billiards {

// alpha = num * pi / den in lowest terms.
struct PiFraction {
  long num;
  long den;
};

// Mirror half-angle of the rotating scatterer.  The four branch maps and
// their probabilities are entirely determined by alpha; `rational` is set
// when alpha is recognized as a rational multiple of pi, which switches the
// angle chain to exact lattice arithmetic.
struct FeresParams {
  double alpha;
  std::optional<PiFraction> rational;
};

inline constexpr double admissibility_epsilon = 1e-12;
inline constexpr long max_pi_fraction_denominator = 400;

// Validates 0 < alpha < pi/6 and auto-detects a pi-fraction.
FeresParams make_params(double alpha);
// alpha = num*pi/den with the fraction pinned exactly (still needs alpha < pi/6).
FeresParams make_params(long num, long den);
std::optional<PiFraction> detect_pi_fraction(double alpha,
                                             long max_den = max_pi_fraction_denominator);

// Region boundaries of the branch probabilities, ascending:
// alpha, 2a, 3a, pi-3a, pi-2a, pi-a.
std::array<double, 6> probability_breakpoints(const FeresParams& params);

// Branch maps on the angle coordinate:
//   T1 = theta + 2a     T2 = -theta + 2pi - 4a
//   T3 = theta - 2a     T4 = -theta + 4a
// T1, T3 are mutually inverse translations; T2 and T4 are involutions.
double apply_branch(int branch, const FeresParams& params, double theta);
double invert_branch(int branch, const FeresParams& params, double y);
int branch_slope(int branch);  // +1 for branches 1 and 3, -1 for 2 and 4

struct BranchDistribution {
  std::array<double, 4> p;
  double operator[](int branch) const { return p[branch - 1]; }
};

// Probabilities (p1..p4) of the four branches at angle theta in (0, pi).
// Piecewise products of cos(2a) factors and the half-normalized weights
// (1 +- tan(c) cot(theta)) / 2; the pieces are half-open on the right at
// the breakpoints.  Components are clamped at zero against roundoff and the
// sum is verified to be 1 within 1e-12.
BranchDistribution branch_distribution(const FeresParams& params, double theta);

// Branch selected by a uniform draw u in [0, 1) via the cumulative rule,
// plus the cumulative mass strictly before it.  Zero-probability branches
// are never selected.
struct BranchSelection {
  int branch;
  double cumulative_before;
};
BranchSelection select_branch(const BranchDistribution& dist, double u);
int sample_branch(const BranchDistribution& dist, double u);

struct FeresStep {
  double theta;
  int branch;
};

// One step of the random map: sample a branch with u, apply it.
FeresStep step(const FeresParams& params, double theta, double u);

// Transition kernel mass K(theta, [a, b)).
double kernel_mass(const FeresParams& params, double theta, double a, double b);

// | integral of K(theta, [a,b)) d mu(theta) - mu([a,b)) | for the invariant
// law d mu = sin(theta)/2 d theta, by Gauss-Legendre panels split at every
// probability breakpoint and preimage endpoint.
double kernel_invariance_defect(const FeresParams& params, double a, double b);

using Word = std::vector<int>;

struct WordEvaluation {
  double probability;
  std::vector<double> path;  // theta_0 .. theta_k, truncated at a dead branch
  bool admissible;
};

// Walk the word multiplying branch probabilities; stops at the first branch
// of probability zero.
WordEvaluation evaluate_word(const FeresParams& params, double theta, const Word& word);
double word_probability(const FeresParams& params, double theta, const Word& word);

// True when the formal path (branches applied unconditionally) stays within
// admissibility_epsilon of each used branch's closed support.  Such words
// may touch the corners theta = 0, pi where the flight degenerates.
bool is_almost_admissible(const FeresParams& params, double theta, const Word& word);

}  // namespace billiards

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "billiards/feres.hpp"

namespace billiards {

inline constexpr double state_dedup_epsilon = 1e-9;

// Closure of a starting angle under the four branch maps, restricted to
// branches of positive probability.  For alpha = num*pi/den every state is
// sign*theta0 + units*pi/den; the lattice coordinates are carried alongside
// so matrix assembly can look images up exactly.
struct ChainStates {
  struct LatticeCoord {
    int sign;    // +1 or -1
    long units;  // multiples of pi/den
  };

  double theta0;
  std::vector<double> angles;         // ascending
  std::vector<LatticeCoord> lattice;  // parallel to angles; empty unless rational
  std::optional<PiFraction> rational;

  std::size_t size() const { return angles.size(); }
  // Index of the state matching theta within state_dedup_epsilon, or npos.
  std::size_t find(double theta) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Breadth-first closure from theta0.  Throws TruncatedStateSpace once more
// than max_states distinct angles appear (always the case for irrational
// alpha/pi).
ChainStates enumerate_states(const FeresParams& params, double theta0,
                             std::size_t max_states = 4096);

// Row-stochastic transition matrix on the enumerated states, sparse rows of
// (column, probability) pairs sorted by column.
struct StochasticMatrix {
  std::size_t n = 0;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;

  double entry(std::size_t i, std::size_t j) const;
  std::vector<double> apply_to_row(std::span<const double> dist) const;  // dist * P
};

StochasticMatrix build_matrix(const ChainStates& states, const FeresParams& params);

bool is_irreducible(const StochasticMatrix& matrix);

// gcd of cycle lengths through state 0; requires irreducibility.
int chain_period(const StochasticMatrix& matrix);

struct StationaryDist {
  std::vector<double> weights;  // nonnegative, sums to 1
};

// Left fixed row vector of the matrix.  `stationary` picks the direct solve
// for small chains and falls back to averaged power iteration; the two
// specialized routes stay exposed so they can be cross-checked.
StationaryDist stationary(const StochasticMatrix& matrix);
StationaryDist stationary_direct(const StochasticMatrix& matrix);
StationaryDist stationary_power(const StochasticMatrix& matrix,
                                std::size_t max_iterations = 200000,
                                double tolerance = 1e-13);

double stationary_residual(const StationaryDist& dist, const StochasticMatrix& matrix);

// Probability of observing the state path under stationarity:
// pi(path[0]) * prod P(path[k], path[k+1]).
double cylinder_measure(const StationaryDist& dist, const StochasticMatrix& matrix,
                        std::span<const std::size_t> path);

// Fold of theta into [0, alpha] modulo the group generated by the branch
// maps: min(theta mod 2a, 2a - theta mod 2a).  A constant of motion exactly
// when alpha = pi/n.
double fold_angle(double alpha, double theta);
double class_representative(const FeresParams& params, double theta);

// Word of branch indices carrying theta into the fundamental domain
// [0, alpha]: (3)^k, then (4, 3) when the remainder lands in (alpha, 2a).
// Accepts the closed range 0 < alpha <= pi/6.
Word reduce_to_fundamental(double alpha, double theta);
Word reduce_to_fundamental(const FeresParams& params, double theta);

}  // namespace billiards

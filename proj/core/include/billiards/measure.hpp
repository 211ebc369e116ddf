#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "billiards/chain.hpp"
#include "billiards/feres.hpp"
#include "billiards/surface.hpp"

namespace billiards {

// Invariant angle law mu([a, b]) = (cos a - cos b) / 2 on [0, pi].
double liouville_mass(double a, double b);

// Piecewise-constant law on [0, pi) split into equal cells; `mass` holds cell
// probabilities, not density values.
struct AngleHistogram {
  std::size_t bins = 0;
  std::vector<double> mass;

  double bin_width() const;
  double total() const;
};

// Exact cell masses of mu.
AngleHistogram liouville_histogram(std::size_t bins);

// Cell masses of g d(mu) for a density g >= 0 with respect to mu;
// Gauss-Legendre per cell, then renormalized to total exactly 1 (quadrature
// residual must already be below 1e-8).
AngleHistogram histogram_from_density(const std::function<double(double)>& g,
                                      std::size_t bins);

// Unit mass in the single cell containing theta0.
AngleHistogram point_mass_histogram(double theta0, std::size_t bins);

// Push a histogram through the transition kernel.  Sources are split at the
// probability breakpoints, branch weights are cell-averaged by 3-point
// Gauss-Legendre on each smooth piece, and every affine image interval is
// deposited over the cells it overlaps, proportionally to overlap length.
// Mass is conserved to 1e-12.
AngleHistogram evolve_kernel(const FeresParams& params, const AngleHistogram& hist);

double tv_distance(const AngleHistogram& a, const AngleHistogram& b);

// TV distance to the invariant law after 0..n kernel steps.
std::vector<double> knudsen_run(const FeresParams& params,
                                const AngleHistogram& initial, std::size_t n);

// Exact evolution on a finite angle chain: rows 0..n of d0 * P^k.
std::vector<std::vector<double>> chain_evolution(const ChainStates& states,
                                                 const StochasticMatrix& matrix,
                                                 std::span<const double> d0,
                                                 std::size_t n);

// Phase-space law on [0, L) x (0, pi), row-major cell (s_bin, theta_bin).
struct PhaseHistogram {
  std::size_t s_bins = 0;
  std::size_t theta_bins = 0;
  double length = 0.0;
  std::vector<double> mass;

  double& at(std::size_t si, std::size_t ti) { return mass[si * theta_bins + ti]; }
  double at(std::size_t si, std::size_t ti) const { return mass[si * theta_bins + ti]; }
};

// Liouville measure: uniform in s times mu in theta.
PhaseHistogram liouville_phase_histogram(std::size_t s_bins, std::size_t theta_bins,
                                         double length);

double tv_distance(const PhaseHistogram& a, const PhaseHistogram& b);

// Product start laws for ensembles: s is always uniform on [0, L); theta has
// density g with respect to mu.
enum class InitialAngleLaw {
  invariant,      // g = 1
  lower_half,     // g = 2 on (0, pi/2)
  uniform_theta,  // g = 2 / (pi sin(theta))
};

const char* to_string(InitialAngleLaw law);

// Inverse-CDF sample from v in [0, 1), clamped into the open interval.
double sample_initial_angle(InitialAngleLaw law, double v);
double initial_angle_density(InitialAngleLaw law, double theta);

struct PhaseKnudsenResult {
  std::vector<double> tv;            // TV to phase Liouville at steps 0..n
  std::vector<double> s_chi_square;  // Pearson statistic of the s-marginal
  std::size_t s_bins = 0;
  std::size_t theta_bins = 0;
  std::size_t ensemble = 0;
};

// Monte Carlo ensemble pushed through the random billiard.  Point j uses the
// generator seeded with derive_stream_seed(seed, j) and draws, in order, the
// uniform for s, the uniform for theta, then one uniform per step; traces are
// therefore identical for every thread count.
PhaseKnudsenResult phase_knudsen(const CircleTable& table, const FeresParams& params,
                                 InitialAngleLaw law, std::size_t ensemble,
                                 std::size_t n_steps, std::size_t s_bins,
                                 std::size_t theta_bins, std::uint64_t seed,
                                 unsigned threads = 0);

}  // namespace billiards

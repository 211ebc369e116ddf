#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>

namespace billiards {

inline constexpr double pi = std::numbers::pi;

struct QuadratureNode {
  double x;  // abscissa on [-1, 1]
  double w;
};

// 3-point Gauss-Legendre rule, exact for degree <= 5.
const std::array<QuadratureNode, 3>& gl3_nodes();

// 20-point Gauss-Legendre rule, exact for degree <= 39.
const std::array<QuadratureNode, 20>& gl20_nodes();

double integrate_gl20(const std::function<double(double)>& f, double lo, double hi);

// Panel-halving refinement around integrate_gl20 until successive estimates
// agree within tol (absolute).  Throws NoConvergence past max_depth.
double adaptive_integrate(const std::function<double(double)>& f, double lo,
                          double hi, double tol = 1e-12, int max_depth = 18);

// Regularized incomplete gamma functions P(s, x) and Q(s, x) = 1 - P(s, x),
// series for x < s + 1, continued fraction otherwise.
double regularized_gamma_lower(double s, double x);
double regularized_gamma_upper(double s, double x);

// Survival function of the chi-square law with k degrees of freedom.
double chi_square_sf(double x, double k);

// Solve A x = b by Gaussian elimination with partial pivoting.  Small dense
// systems only (stationary distributions, n <= a few thousand).
std::size_t linear_solve(std::size_t n, double* a /* row-major n*n */, double* b);

}  // namespace billiards

#include "billiards/numerics.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "billiards/errors.hpp"

namespace billiards {

const std::array<QuadratureNode, 3>& gl3_nodes() {
  static const std::array<QuadratureNode, 3> nodes = {{
      {-0.7745966692414834, 5.0 / 9.0},
      {0.0, 8.0 / 9.0},
      {0.7745966692414834, 5.0 / 9.0},
  }};
  return nodes;
}

const std::array<QuadratureNode, 20>& gl20_nodes() {
  static const std::array<QuadratureNode, 20> nodes = {{
      {-0.9931285991850949, 0.017614007139153273},
      {-0.9639719272779138, 0.04060142980038622},
      {-0.9122344282513258, 0.06267204833410944},
      {-0.8391169718222188, 0.08327674157670467},
      {-0.7463319064601508, 0.10193011981724026},
      {-0.636053680726515, 0.11819453196151825},
      {-0.5108670019508271, 0.13168863844917653},
      {-0.37370608871541955, 0.14209610931838187},
      {-0.2277858511416451, 0.14917298647260366},
      {-0.07652652113349734, 0.15275338713072578},
      {0.07652652113349734, 0.15275338713072578},
      {0.2277858511416451, 0.14917298647260366},
      {0.37370608871541955, 0.14209610931838187},
      {0.5108670019508271, 0.13168863844917653},
      {0.636053680726515, 0.11819453196151825},
      {0.7463319064601508, 0.10193011981724026},
      {0.8391169718222188, 0.08327674157670467},
      {0.9122344282513258, 0.06267204833410944},
      {0.9639719272779138, 0.04060142980038622},
      {0.9931285991850949, 0.017614007139153273},
  }};
  return nodes;
}

double integrate_gl20(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (const auto& node : gl20_nodes()) sum += node.w * f(mid + half * node.x);
  return half * sum;
}

namespace {

double integrate_panels(const std::function<double(double)>& f, double lo,
                        double hi, int panels) {
  const double width = (hi - lo) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += integrate_gl20(f, lo + i * width, lo + (i + 1) * width);
  }
  return sum;
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double lo,
                          double hi, double tol, int max_depth) {
  double previous = integrate_panels(f, lo, hi, 1);
  int panels = 2;
  for (int depth = 0; depth < max_depth; ++depth, panels *= 2) {
    const double current = integrate_panels(f, lo, hi, panels);
    if (std::abs(current - previous) <= tol) return current;
    previous = current;
  }
  throw_internal(errc::no_convergence, "adaptive_integrate did not stabilize");
}

namespace {

// Lower incomplete gamma by power series; valid for x < s + 1.
double gamma_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (s + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) {
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw_internal(errc::no_convergence, "incomplete gamma series stalled");
}

// Upper incomplete gamma by Lentz continued fraction; valid for x >= s + 1.
double gamma_cf(double s, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
  }
  throw_internal(errc::no_convergence, "incomplete gamma fraction stalled");
}

}  // namespace

double regularized_gamma_lower(double s, double x) {
  require(s > 0.0 && x >= 0.0, errc::invalid_argument,
          "regularized_gamma_lower needs s > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_series(s, x);
  return 1.0 - gamma_cf(s, x);
}

double regularized_gamma_upper(double s, double x) {
  require(s > 0.0 && x >= 0.0, errc::invalid_argument,
          "regularized_gamma_upper needs s > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_series(s, x);
  return gamma_cf(s, x);
}

double chi_square_sf(double x, double k) {
  require(k > 0.0, errc::invalid_argument, "chi_square_sf needs k > 0");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_upper(0.5 * k, 0.5 * x);
}

std::size_t linear_solve(std::size_t n, double* a, double* b) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t row = col + 1; row < n; ++row) {
      const double candidate = std::abs(a[row * n + col]);
      if (candidate > best) {
        best = candidate;
        pivot = row;
      }
    }
    ensure(best > 0.0, errc::no_convergence, "singular matrix in linear_solve");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = a[row * n + col] * inv;
      if (factor == 0.0) continue;
      a[row * n + col] = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a[row * n + j] -= factor * a[col * n + j];
      b[row] -= factor * b[col];
    }
  }
  for (std::size_t row = n; row-- > 0;) {
    double sum = b[row];
    for (std::size_t j = row + 1; j < n; ++j) sum -= a[row * n + j] * b[j];
    b[row] = sum / a[row * n + row];
  }
  return n;
}

}  // namespace billiards

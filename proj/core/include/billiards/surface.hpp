#pragma once

#include <optional>
#include <string_view>

namespace billiards {

enum class SurfaceKind { flat, hyperbolic, spherical };

const char* to_string(SurfaceKind kind);
std::optional<SurfaceKind> surface_from_string(std::string_view name);

// A circular billiard table of intrinsic radius r0 on a surface of constant
// curvature 0, -1 or +1.  Cached fields:
//   h = r0, sinh(r0) or sin(r0)   (Euclidean radius of the boundary circle)
//   L = 2*pi*h                    (boundary circumference)
//   c = 1, cosh(r0) or cos(r0)    (chord coefficient of the central angle)
struct CircleTable {
  SurfaceKind kind;
  double r0;
  double h;
  double L;
  double c;
};

// Validates 0 < r0, and r0 < pi/2 on the sphere so the boundary stays a
// convex circle with h > 0.
CircleTable make_table(SurfaceKind kind, double r0);

// Central angle gamma(theta) in (0, 2*pi) subtended by the chord a billiard
// segment leaving the boundary at angle theta in (0, pi) traverses:
//   gamma = 2 * atan2(sin(theta), c * cos(theta)).
// Flat tables reduce to gamma = 2*theta exactly.
double central_angle(const CircleTable& table, double theta);

// d(gamma)/d(theta) = 2c / (c^2 cos^2(theta) + sin^2(theta)), positive and
// bounded by 2*max(c, 1/c).
double central_angle_derivative(const CircleTable& table, double theta);

double max_central_angle_derivative(const CircleTable& table);

// Boundary arc length h * gamma(theta) swept by one free flight.
double flight_arc(const CircleTable& table, double theta);

// s + delta reduced into [0, L).  delta may be any real number.
double advance(double s, double delta, double L);

// Independent computation of gamma(theta) from the embedded model: chord the
// geodesic between two boundary points and read the angle at the circle
// center (Euclidean cross/dot in the plane, on the unit sphere in R^3, on
// the hyperboloid in Minkowski R^{2,1}).  Slow; exists to check
// central_angle.
double chord_oracle(const CircleTable& table, double theta);

}  // namespace billiards

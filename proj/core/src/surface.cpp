#include "billiards/surface.hpp"

#include <cmath>
#include <string>

#include "billiards/errors.hpp"
#include "billiards/numerics.hpp"

namespace billiards {

const char* to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::flat: return "flat";
    case SurfaceKind::hyperbolic: return "hyperbolic";
    case SurfaceKind::spherical: return "spherical";
  }
  return "?";
}

std::optional<SurfaceKind> surface_from_string(std::string_view name) {
  if (name == "flat") return SurfaceKind::flat;
  if (name == "hyperbolic") return SurfaceKind::hyperbolic;
  if (name == "spherical") return SurfaceKind::spherical;
  return std::nullopt;
}

CircleTable make_table(SurfaceKind kind, double r0) {
  require(std::isfinite(r0) && r0 > 0.0, errc::non_positive_radius,
          "table radius must be positive, got " + std::to_string(r0));
  CircleTable table{kind, r0, 0.0, 0.0, 0.0};
  switch (kind) {
    case SurfaceKind::flat:
      table.h = r0;
      table.c = 1.0;
      break;
    case SurfaceKind::hyperbolic:
      table.h = std::sinh(r0);
      table.c = std::cosh(r0);
      break;
    case SurfaceKind::spherical:
      require(r0 < pi / 2, errc::spherical_radius_too_large,
              "spherical table radius must be below pi/2, got " + std::to_string(r0));
      table.h = std::sin(r0);
      table.c = std::cos(r0);
      break;
  }
  table.L = 2.0 * pi * table.h;
  return table;
}

namespace {

void check_theta(double theta) {
  require(std::isfinite(theta) && theta > 0.0 && theta < pi, errc::theta_out_of_range,
          "theta must lie in (0, pi), got " + std::to_string(theta));
}

}  // namespace

double central_angle(const CircleTable& table, double theta) {
  check_theta(theta);
  if (table.kind == SurfaceKind::flat) return 2.0 * theta;
  // sin(theta) > 0 on (0, pi) keeps atan2 in (0, pi), so gamma lands in (0, 2*pi)
  return 2.0 * std::atan2(std::sin(theta), table.c * std::cos(theta));
}

double central_angle_derivative(const CircleTable& table, double theta) {
  check_theta(theta);
  const double co = table.c * std::cos(theta);
  const double si = std::sin(theta);
  return 2.0 * table.c / (co * co + si * si);
}

double max_central_angle_derivative(const CircleTable& table) {
  return 2.0 * std::max(table.c, 1.0 / table.c);
}

double flight_arc(const CircleTable& table, double theta) {
  return table.h * central_angle(table, theta);
}

double advance(double s, double delta, double L) {
  require(L > 0.0, errc::invalid_argument, "advance needs L > 0");
  double out = std::fmod(s + delta, L);
  if (out < 0.0) out += L;
  if (out >= L) out = 0.0;  // fmod can round back onto L
  return out;
}

namespace {

struct Vec3 {
  double x, y, z;
};

// Signed containment g(t) along the embedded geodesic: positive strictly
// inside the disk, zero on the boundary.  Roots of g bracket one free flight.
class EmbeddedFlight {
 public:
  EmbeddedFlight(const CircleTable& table, double theta) : table_(table) {
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    switch (table.kind) {
      case SurfaceKind::flat:
        // start (h, 0), unit direction ct * tangent + st * inward normal
        dir_ = Vec3{-st, ct, 0.0};
        break;
      case SurfaceKind::spherical: {
        const double sr = std::sin(table.r0);
        const double cr = std::cos(table.r0);
        start_ = Vec3{sr, 0.0, cr};
        const Vec3 tangent{0.0, 1.0, 0.0};
        const Vec3 inward{-cr, 0.0, sr};
        dir_ = Vec3{ct * tangent.x + st * inward.x, ct * tangent.y + st * inward.y,
                    ct * tangent.z + st * inward.z};
        break;
      }
      case SurfaceKind::hyperbolic: {
        const double sr = std::sinh(table.r0);
        const double cr = std::cosh(table.r0);
        start_ = Vec3{sr, 0.0, cr};
        const Vec3 tangent{0.0, 1.0, 0.0};
        const Vec3 inward{-cr, 0.0, -sr};  // unit for the Minkowski form
        dir_ = Vec3{ct * tangent.x + st * inward.x, ct * tangent.y + st * inward.y,
                    ct * tangent.z + st * inward.z};
        break;
      }
    }
  }

  Vec3 at(double t) const {
    switch (table_.kind) {
      case SurfaceKind::flat:
        return Vec3{table_.h + t * dir_.x, t * dir_.y, 0.0};
      case SurfaceKind::spherical: {
        const double c = std::cos(t), s = std::sin(t);
        return Vec3{start_.x * c + dir_.x * s, start_.y * c + dir_.y * s,
                    start_.z * c + dir_.z * s};
      }
      case SurfaceKind::hyperbolic: {
        const double c = std::cosh(t), s = std::sinh(t);
        return Vec3{start_.x * c + dir_.x * s, start_.y * c + dir_.y * s,
                    start_.z * c + dir_.z * s};
      }
    }
    return Vec3{};
  }

  double containment(double t) const {
    const Vec3 p = at(t);
    switch (table_.kind) {
      case SurfaceKind::flat:
        return table_.h * table_.h - (p.x * p.x + p.y * p.y);
      case SurfaceKind::spherical:
        return p.z - std::cos(table_.r0);
      case SurfaceKind::hyperbolic:
        return std::cosh(table_.r0) - p.z;  // -<p, center> in Minkowski form
    }
    return 0.0;
  }

  // First return to the boundary: double a bracket out of t = 0, then bisect.
  double exit_parameter() const {
    double lo = 1e-12;
    ensure(containment(lo) > 0.0, errc::image_escapes_state_space,
           "flight leaves the table immediately");
    double hi = lo;
    for (int i = 0; i < 80 && containment(hi) > 0.0; ++i) hi *= 2.0;
    ensure(containment(hi) <= 0.0, errc::no_convergence,
           "no boundary return bracketed");
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (containment(mid) > 0.0) lo = mid;
      else hi = mid;
      if (hi - lo <= 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
  }

  const CircleTable& table_;
  Vec3 start_{0.0, 0.0, 0.0};
  Vec3 dir_{0.0, 0.0, 0.0};
};

}  // namespace

double chord_oracle(const CircleTable& table, double theta) {
  check_theta(theta);
  const EmbeddedFlight flight(table, theta);
  const Vec3 exit = flight.at(flight.exit_parameter());
  // both endpoints sit on the boundary circle; the central angle is read off
  // their planar (x, y) coordinates, start at azimuth 0
  double gamma = std::atan2(exit.y, exit.x);
  if (gamma < 0.0 || (gamma == 0.0 && theta > pi / 2)) gamma += 2.0 * pi;
  return gamma;
}

}  // namespace billiards

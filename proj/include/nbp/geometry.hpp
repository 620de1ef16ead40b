// Physical domain, velocity space, straight-line advection and exit times.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

namespace nbp {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 axpy(const Vec3& r, const Vec3& v, double t) {
  return {r[0] + v[0] * t, r[1] + v[1] * t, r[2] + v[2] * t};
}

// Absolute tolerance for boundary membership; a point this close to the
// boundary and moving outward counts as exited.
inline constexpr double kBoundaryTol = 1e-12;

// Open interval (a, b) on the x-axis; y and z coordinates are unused.
struct IntervalDomain {
  double a = 0.0;
  double b = 1.0;
};

// Open axis-aligned box.
struct BoxDomain {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{1.0, 1.0, 1.0};
};

// Open ball.
struct BallDomain {
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;
};

class SpatialDomain {
 public:
  using Variant = std::variant<IntervalDomain, BoxDomain, BallDomain>;

  static SpatialDomain interval(double a, double b);
  static SpatialDomain box(const Vec3& lo, const Vec3& hi);
  static SpatialDomain ball(const Vec3& center, double radius);

  bool contains(const Vec3& r) const;  // strict interior up to kBoundaryTol
  bool in_closure(const Vec3& r) const;
  double diameter() const;

  // One-dimensional domains ignore transverse velocity components entirely.
  bool is_interval() const { return std::holds_alternative<IntervalDomain>(v_); }
  const Variant& variant() const { return v_; }

 private:
  explicit SpatialDomain(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Velocity space: either a finite set of velocities or the annulus
// { v : vmin <= |v| <= vmax }.
class VelocitySpace {
 public:
  static VelocitySpace discrete(std::vector<Vec3> velocities);
  static VelocitySpace annulus(double v_min, double v_max);

  bool is_discrete() const { return !velocities_.empty(); }
  const std::vector<Vec3>& velocities() const { return velocities_; }
  std::size_t size() const { return is_discrete() ? velocities_.size() : 1; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }

  bool member(const Vec3& v) const;
  // Index of a discrete velocity (exact up to 1e-9); throws for non-members.
  std::size_t index_of(const Vec3& v) const;
  // Lebesgue volume of the annulus (discrete spaces have none).
  double annulus_volume() const;

 private:
  VelocitySpace() = default;
  std::vector<Vec3> velocities_;
  double v_min_ = 0.0;
  double v_max_ = 0.0;
};

struct PhasePoint {
  Vec3 r{0.0, 0.0, 0.0};
  Vec3 v{0.0, 0.0, 0.0};
  bool alive = true;

  static PhasePoint cemetery() { return {{0, 0, 0}, {0, 0, 0}, false}; }
  static PhasePoint rod(double x, double vx) {
    return {{x, 0.0, 0.0}, {vx, 0.0, 0.0}, true};
  }
};

// kappa = inf{ t > 0 : r + v t not in D }. Exact closed forms per variant;
// the ball uses the cancellation-free quadratic root.
double exit_time(const Vec3& r, const Vec3& v, const SpatialDomain& domain);

enum class AdvectMode { kill_at_boundary, stop_at_boundary };

// kill: g(r + vt) 1_{t < kappa} semantics (cemetery at t >= kappa).
// stop: motion frozen at the boundary point reached at time t ^ kappa.
PhasePoint advect(const PhasePoint& x, double t, const SpatialDomain& domain,
                  AdvectMode mode);

}  // namespace nbp

#include "nbp/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace nbp {

SpatialDomain SpatialDomain::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("interval domain requires a < b");
  return SpatialDomain{IntervalDomain{a, b}};
}

SpatialDomain SpatialDomain::box(const Vec3& lo, const Vec3& hi) {
  for (int i = 0; i < 3; ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("box domain requires lo < hi");
  return SpatialDomain{BoxDomain{lo, hi}};
}

SpatialDomain SpatialDomain::ball(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball domain requires radius > 0");
  return SpatialDomain{BallDomain{center, radius}};
}

bool SpatialDomain::contains(const Vec3& r) const {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntervalDomain>) {
          return r[0] > d.a + kBoundaryTol && r[0] < d.b - kBoundaryTol;
        } else if constexpr (std::is_same_v<T, BoxDomain>) {
          for (int i = 0; i < 3; ++i)
            if (!(r[i] > d.lo[i] + kBoundaryTol && r[i] < d.hi[i] - kBoundaryTol))
              return false;
          return true;
        } else {
          const Vec3 q = {r[0] - d.center[0], r[1] - d.center[1], r[2] - d.center[2]};
          return norm(q) < d.radius - kBoundaryTol;
        }
      },
      v_);
}

bool SpatialDomain::in_closure(const Vec3& r) const {
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntervalDomain>) {
          return r[0] >= d.a - kBoundaryTol && r[0] <= d.b + kBoundaryTol;
        } else if constexpr (std::is_same_v<T, BoxDomain>) {
          for (int i = 0; i < 3; ++i)
            if (r[i] < d.lo[i] - kBoundaryTol || r[i] > d.hi[i] + kBoundaryTol)
              return false;
          return true;
        } else {
          const Vec3 q = {r[0] - d.center[0], r[1] - d.center[1], r[2] - d.center[2]};
          return norm(q) <= d.radius + kBoundaryTol;
        }
      },
      v_);
}

double SpatialDomain::diameter() const {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntervalDomain>) {
          return d.b - d.a;
        } else if constexpr (std::is_same_v<T, BoxDomain>) {
          const Vec3 e = {d.hi[0] - d.lo[0], d.hi[1] - d.lo[1], d.hi[2] - d.lo[2]};
          return norm(e);
        } else {
          return 2.0 * d.radius;
        }
      },
      v_);
}

VelocitySpace VelocitySpace::discrete(std::vector<Vec3> velocities) {
  if (velocities.empty())
    throw std::invalid_argument("discrete velocity space must be non-empty");
  VelocitySpace vs;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& v : velocities) {
    const double s = norm(v);
    if (!(s > 0.0))
      throw std::invalid_argument("velocity space members must have positive speed");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  vs.velocities_ = std::move(velocities);
  vs.v_min_ = lo;
  vs.v_max_ = hi;
  return vs;
}

VelocitySpace VelocitySpace::annulus(double v_min, double v_max) {
  if (!(0.0 < v_min && v_min < v_max))
    throw std::invalid_argument("annulus requires 0 < v_min < v_max");
  VelocitySpace vs;
  vs.v_min_ = v_min;
  vs.v_max_ = v_max;
  return vs;
}

bool VelocitySpace::member(const Vec3& v) const {
  if (is_discrete()) {
    for (const auto& u : velocities_) {
      if (std::abs(u[0] - v[0]) <= 1e-9 && std::abs(u[1] - v[1]) <= 1e-9 &&
          std::abs(u[2] - v[2]) <= 1e-9)
        return true;
    }
    return false;
  }
  const double s = norm(v);
  return s >= v_min_ - 1e-12 && s <= v_max_ + 1e-12;
}

std::size_t VelocitySpace::index_of(const Vec3& v) const {
  if (!is_discrete())
    throw std::logic_error("index_of: velocity space is continuous");
  for (std::size_t i = 0; i < velocities_.size(); ++i) {
    const auto& u = velocities_[i];
    if (std::abs(u[0] - v[0]) <= 1e-9 && std::abs(u[1] - v[1]) <= 1e-9 &&
        std::abs(u[2] - v[2]) <= 1e-9)
      return i;
  }
  throw std::invalid_argument("index_of: velocity is not a member of V");
}

double VelocitySpace::annulus_volume() const {
  if (is_discrete()) throw std::logic_error("annulus_volume: discrete space");
  const double pi = 3.14159265358979323846;
  return 4.0 * pi / 3.0 * (v_max_ * v_max_ * v_max_ - v_min_ * v_min_ * v_min_);
}

namespace {

double interval_exit(double x, double vx, const IntervalDomain& d) {
  if (vx > 0.0) return (d.b - x) / vx;
  return (d.a - x) / vx;  // vx < 0
}

}  // namespace

double exit_time(const Vec3& r, const Vec3& v, const SpatialDomain& domain) {
  if (!domain.in_closure(r))
    throw std::invalid_argument("exit_time: position outside closure of D");
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntervalDomain>) {
          if (v[0] == 0.0)
            throw std::invalid_argument("exit_time: zero axial velocity on interval domain");
          return std::max(0.0, interval_exit(r[0], v[0], d));
        } else if constexpr (std::is_same_v<T, BoxDomain>) {
          if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0)
            throw std::invalid_argument("exit_time: zero velocity");
          double t = std::numeric_limits<double>::infinity();
          for (int i = 0; i < 3; ++i) {
            if (v[i] > 0.0)
              t = std::min(t, (d.hi[i] - r[i]) / v[i]);
            else if (v[i] < 0.0)
              t = std::min(t, (d.lo[i] - r[i]) / v[i]);
          }
          return std::max(0.0, t);
        } else {
          const double a = dot(v, v);
          if (!(a > 0.0)) throw std::invalid_argument("exit_time: zero velocity");
          const Vec3 q = {r[0] - d.center[0], r[1] - d.center[1], r[2] - d.center[2]};
          const double b = dot(q, v);
          const double c = dot(q, q) - d.radius * d.radius;
          const double disc = std::max(0.0, b * b - a * c);
          // Positive root via the conjugate form; no cancellation since
          // c <= 0 inside the ball and sqrt(disc) >= |b|.
          const double root = std::sqrt(disc);
          const double t = (c <= 0.0) ? (-c) / (b + root)
                                      : ((b < 0.0) ? (-b - root) / a : 0.0);
          return std::max(0.0, t);
        }
      },
      domain.variant());
}

PhasePoint advect(const PhasePoint& x, double t, const SpatialDomain& domain,
                  AdvectMode mode) {
  if (!x.alive) throw std::invalid_argument("advect: particle not alive");
  if (t < 0.0) throw std::invalid_argument("advect: negative time");
  const double kappa = exit_time(x.r, x.v, domain);
  if (mode == AdvectMode::kill_at_boundary) {
    if (t >= kappa) return PhasePoint::cemetery();
    return {axpy(x.r, x.v, t), x.v, true};
  }
  return {axpy(x.r, x.v, std::min(t, kappa)), x.v, true};
}

}  // namespace nbp

#pragma once

// Precision-generic kernels shared by the orbit and reduction code paths.
// Orbit generation runs them in long double: reducing a point of height
// ~1e-12 amplifies rounding by ~1/y.

#include <cmath>
#include <limits>

#include "horolab/error.hpp"

namespace horolab::detail {

template <class Real>
inline constexpr Real kPiT = static_cast<Real>(3.141592653589793238462643383279502884L);

template <class Real>
Real wrap_angle_t(Real theta) {
  const Real two_pi = 2 * kPiT<Real>;
  Real r = theta - two_pi * std::floor((theta + kPiT<Real>) / two_pi);
  if (r >= kPiT<Real>) r -= two_pi;
  if (r < -kPiT<Real>) r = -kPiT<Real>;
  return r;
}

template <class Real>
struct Point {
  Real x;
  Real y;
  Real theta;
};

struct NoWitness {
  void shift(long double) {}
  void invert() {}
};

/// Gauss reduction in place. `witness.shift(n)` records left multiplication
/// by [[1,-n],[0,1]]; `witness.invert()` records left multiplication by S.
template <class Real, class Witness>
int reduce_inplace(Point<Real>& p, int iteration_cap, Witness& witness) {
  const Real unit_floor = 1 - 64 * std::numeric_limits<Real>::epsilon();
  int steps = 0;
  for (;;) {
    if (steps > iteration_cap) {
      fail(ErrorCode::IterationCap, "reduction did not terminate (height below precision floor?)");
    }
    const Real n = std::nearbyint(p.x);
    if (n != 0) {
      p.x -= n;
      witness.shift(static_cast<long double>(n));
      ++steps;
    }
    const Real r2 = p.x * p.x + p.y * p.y;
    if (!(r2 < unit_floor)) break;
    // S = [[0,1],[-1,0]]: cz+d = -z.
    p.theta = wrap_angle_t<Real>(p.theta - std::atan2(-p.y, -p.x));
    p.x = -p.x / r2;
    p.y = p.y / r2;
    witness.invert();
    ++steps;
  }
  return steps;
}

/// Point of g*h(t) for g = h(x)a(y)k(theta).
template <class Real>
Point<Real> flow_from(const Point<Real>& p, Real t) {
  const Real s = std::sin(p.theta);
  const Real c = std::cos(p.theta);
  if (std::fabs(s) > static_cast<Real>(1e-12)) {
    // Closed form: g h(u + W) = h(alpha - R u/(u^2+1)) a(R/(u^2+1)) k(.)
    const Real w = c / s;
    const Real r = p.y / (s * s);
    const Real alpha = p.x - p.y * w;
    const Real u = t - w;
    const Real q = u * u + 1;
    // k(-arccot u) with arccot in (0, pi) up to -I: for large |u| the angle stays
    // near 0, where it carries full relative precision into a further flow.
    const Real theta = u != 0 ? -std::atan(1 / u) : -std::acos(Real(0));
    return {alpha - r * u / q, r / q, theta};
  }
  // Bottom row of g h(t) is y^{-1/2} (-s, c - t s).
  const Real bl = -s;
  const Real br = c - t * s;
  const Real inv_y = bl * bl + br * br;  // times y
  const Real y_new = p.y / inv_y;
  // Top row of g: (-x s + y c, x c + y s) / sqrt(y); of g h(t): (A, A t + B).
  const Real ta = -p.x * s + p.y * c;
  const Real tb = p.x * c + p.y * s;
  const Real top_a = ta;
  const Real top_b = ta * t + tb;
  // x = (a c + b d)/(c^2 + d^2) with all rows scaled by 1/sqrt(y).
  const Real x_new = (top_a * bl + top_b * br) / inv_y;
  return {x_new, y_new, wrap_angle_t<Real>(std::atan2(s, c - t * s))};
}

}  // namespace horolab::detail

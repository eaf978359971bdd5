#pragma once

// Independent oracles shared by the test binaries. Nothing here calls the
// library routine it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "horolab/error.hpp"
#include "horolab/sl2core.hpp"

namespace oracle {

using Mat = std::array<long double, 4>;  // a, b, c, d

inline Mat mul(const Mat& g, const Mat& h) {
  return {g[0] * h[0] + g[1] * h[2], g[0] * h[1] + g[1] * h[3], g[2] * h[0] + g[3] * h[2],
          g[2] * h[1] + g[3] * h[3]};
}

inline Mat of(const horolab::GroupElement& g) { return {g.a, g.b, g.c, g.d}; }

// h(x) a(y) k(theta) multiplied out by hand.
inline Mat iwasawa_matrix(long double x, long double y, long double theta) {
  const long double r = std::sqrt(y);
  const Mat h{1, x, 0, 1};
  const Mat a{r, 0, 0, 1 / r};
  const Mat k{std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta)};
  return mul(mul(h, a), k);
}

// Entrywise distance to g or -g, whichever is closer.
inline double pm_distance(const Mat& g, const Mat& h) {
  long double plus = 0, minus = 0;
  for (int i = 0; i < 4; ++i) {
    plus = std::max(plus, std::fabs(g[i] - h[i]));
    minus = std::max(minus, std::fabs(g[i] + h[i]));
  }
  return static_cast<double>(std::min(plus, minus));
}

// Point comparison in the local hyperbolic scale: |dx|/y, |dy|/y and the angle mod pi.
inline double local_gap(const horolab::IwasawaPoint& p, const horolab::IwasawaPoint& q) {
  const double y = std::min(p.y, q.y);
  return std::max({std::fabs(p.x - q.x) / y, std::fabs(p.y - q.y) / y,
                   horolab::angle_gap_mod_pi(p.theta, q.theta)});
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::uint64_t prime_count_below(std::uint64_t n) {
  std::uint64_t k = 0;
  for (std::uint64_t m = 2; m < n; ++m) k += is_prime(m);
  return k;
}

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

inline std::uint64_t sigma1(std::uint64_t n) {
  std::uint64_t s = 0;
  for (std::uint64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s += d;
    if (d * d != n) s += n / d;
  }
  return s;
}

inline std::uint64_t phi(std::uint64_t n) {
  std::uint64_t k = 0;
  for (std::uint64_t m = 1; m <= n; ++m) k += std::gcd(m, n) == 1;
  return k;
}

inline int omega_big(std::uint64_t n) {
  int k = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      n /= p;
      ++k;
    }
  }
  return k + (n > 1);
}

// Distance to the nearest integer.
inline double nint_gap(double v) { return std::fabs(v - std::nearbyint(v)); }

// Inverse of a modulo m in [1, m) by scanning; m >= 2.
inline std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  a %= m;
  if (a < 0) a += m;
  for (std::int64_t k = 1; k < m; ++k) {
    if (a * k % m == 1) return k;
  }
  return 0;
}

// Entries uniform in [-10, 10], rows flipped to make det > 0, then scaled to det 1.
inline horolab::GroupElement random_group_element(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double det = a * d - b * c;
    if (std::fabs(det) < 1e-3) continue;
    if (det < 0) {
      a = -a;
      b = -b;
      det = -det;
    }
    return horolab::GroupElement::from_entries(a, b, c, d);
  }
}

// Uniform x and theta, log-uniform height above the unit circle up to e^3.
inline horolab::IwasawaPoint random_domain_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(-0.5, 0.5), ut(-horolab::kPi, horolab::kPi), ul(0.0, 3.0);
  const double x = ux(rng);
  return {x, std::sqrt(1 - x * x) * std::exp(ul(rng)), ut(rng)};
}

// Largest entry magnitude, used to make matrix comparisons relative.
inline long double scale(const Mat& g) {
  return std::max({std::fabs(g[0]), std::fabs(g[1]), std::fabs(g[2]), std::fabs(g[3]), 1.0L});
}

template <class F>
std::optional<horolab::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const horolab::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace oracle

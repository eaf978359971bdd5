#pragma once

// Hecke orbits of the closed horocycle of length N, the representatives of
// the Hecke correspondence C_N and the b1 statistic.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "horolab/measures.hpp"
#include "horolab/sieve.hpp"
#include "horolab/sl2core.hpp"

namespace horolab {

/// a(1/N): its orbit under h(1) is the closed horocycle of length N.
GroupElement hecke_base(std::uint64_t N);

/// (1/sqrt N) [[a, b], [0, d]] with a d = N, a, d > 0, 0 <= b < d.
struct HeckeRep {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t d = 1;
  std::int64_t N = 1;

  /// Its image h(b/d) a(a/d) in Iwasawa coordinates.
  IwasawaPoint point() const;
};

/// sigma_1(N) representatives ordered by (a, b).
std::vector<HeckeRep> enumerate_CN(std::int64_t N);

struct B1Result {
  std::int64_t a1 = 1;  // gcd(a, N)
  std::int64_t d1 = 1;  // N / a1
  std::int64_t b1 = 0;  // inverse(a) * b mod d1, in [0, d1)
};

/// Upper-triangular integer matrix [[a, b], [0, d]] with positive diagonal.
/// Throws NonInvertible when gcd(a, d1) > 1, InvalidArgument for a malformed matrix.
B1Result b1_of(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);
B1Result b1_of(const HeckeRep& rep);

struct RatioReport {
  std::uint64_t N = 0;
  std::size_t sample_size = 0;
  double escaped_mass = 0.0;
  std::vector<std::size_t> used;      // indices of family members passing the mass floor
  std::vector<double> masses;         // mu_G mass per used member
  std::vector<double> ratios;         // empirical / mu_G per used member
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double max_deviation = 0.0;         // max |ratio - 1|
};

/// Ratios pair_with / volume integral over members whose volume integral is
/// at least mass_floor. `volume_integrals` is aligned with the family.
RatioReport ratio_report(const EmpiricalMeasure& mu, const std::vector<TestFunction>& family,
                         const std::vector<Estimate>& volume_integrals, double mass_floor);

/// Ratio report for the H_N orbit at primes p < N (all n < N when
/// `primes_only` is false).
RatioReport prime_hecke_experiment(std::uint64_t N, const std::vector<TestFunction>& family,
                                   const std::vector<Estimate>& volume_integrals, double mass_floor,
                                   bool primes_only = true);

struct LinnikReport {
  std::int64_t N = 0;
  std::size_t total_reps = 0;
  std::size_t escaped = 0;         // reduced height above the cusp cutoff
  std::size_t non_invertible = 0;  // b1 undefined
  std::size_t in_region = 0;
  std::size_t b1_prime = 0;
  double ratio = 0.0;              // b1_prime / in_region
  double ratio_times_log = 0.0;    // ratio * log N
  double window_low = 0.1;
  double window_high = 2.0;
  bool within_window = false;
};

/// Counts C_N representatives whose reduced image lies in the ball
/// (radius = infinity means all of D_X below the cutoff) and how many of
/// those have prime b1.
LinnikReport linnik_projection_experiment(std::int64_t N, const IwasawaPoint& center, double radius,
                                          double height_bound = 1e3);

}  // namespace horolab

#pragma once

// Primes, divisor functions, the Selberg upper-bound sieve and the type I /
// type II orbit sums used by the asymptotic sieve.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "horolab/measures.hpp"

namespace horolab {

/// All primes <= limit with O(1) primality lookup (bitset over odd numbers).
class PrimeTable {
 public:
  PrimeTable() = default;

  std::uint64_t limit() const { return limit_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  /// Number of primes < n, for n <= limit + 1.
  std::size_t pi(std::uint64_t n) const;
  /// Requires n <= limit.
  bool is_prime(std::uint64_t n) const;

 private:
  friend PrimeTable primes_up_to(std::uint64_t limit, std::uint64_t max_limit);

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<std::uint64_t> odd_bits_;
};

inline constexpr std::uint64_t kDefaultPrimeLimitCap = 1'000'000'000;

/// Segmented sieve of Eratosthenes. Throws InvalidArgument for limit < 2 and
/// LimitTooLarge above max_limit.
PrimeTable primes_up_to(std::uint64_t limit, std::uint64_t max_limit = kDefaultPrimeLimitCap);

/// Trial division.
bool is_prime_slow(std::uint64_t n);

/// Prime factorization as (p, exponent) pairs in increasing p; n >= 1.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

std::uint64_t divisor_tau(std::uint64_t n);
std::uint64_t divisor_tau3(std::uint64_t n);
std::uint64_t divisor_sigma1(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
int big_omega(std::uint64_t n);
bool is_squarefree(std::uint64_t n);

/// Omega(n) for 0 <= n <= limit (entry 0 and 1 are 0).
std::vector<std::uint8_t> big_omega_table(std::uint64_t limit);

/// n <= limit with Omega(n) <= k, ascending. 1 is included only on request.
std::vector<std::uint64_t> almost_primes(std::uint64_t limit, int k, bool include_one = false);

enum class MainTerm {
  Exact,           // A supplied by the caller
  ProgressionMean, // A = sum_{n <= T} a_n
};

struct SieveReport {
  std::uint64_t T = 0;
  std::uint64_t D = 0;
  double A = 0.0;
  std::vector<double> remainders;  // remainders[d] = sum_{n <= T, d | n} a_n - A/d for 1 <= d < D
  double main_term = 0.0;          // A / log sqrt(D)
  double remainder_term = 0.0;     // sum_{d < D} tau3(d) |r_d|
  double upper_bound = 0.0;
  double actual = 0.0;             // sum_{sqrt T < p <= T} a_p
  bool holds = false;
};

/// a[n] for 0 <= n <= T (a[0] unused). Requires 1 < D <= T and a_n >= 0
/// (NegativeSequence otherwise).
SieveReport selberg_upper_bound(const std::vector<double>& a, std::uint64_t T, std::uint64_t D, MainTerm mode,
                                double A_exact, const PrimeTable& primes);

/// Convenience overload tabulating a sequence oracle.
SieveReport selberg_upper_bound(const std::function<double(std::uint64_t)>& a, std::uint64_t T,
                                std::uint64_t D, MainTerm mode, double A_exact, const PrimeTable& primes);

/// Reduced point of the Hecke orbit H_N h(m): (m/N, 1/N, 0).
IwasawaPoint hecke_orbit_point(std::uint64_t N, std::uint64_t m);

struct Type1Options {
  bool squarefree_only = true;
};

/// E_{D<d<2D} |E_{n <= N/d} f0(H_N h(dn))| with f0 = f - volume_mean.
/// Moduli with floor(N/d) = 0 are skipped. Requires D < N.
double type1_sum(const TestFunction& f, double volume_mean, std::uint64_t N, std::uint64_t D,
                 const Type1Options& options = {});

struct Type2Options {
  bool allow_diagonal = false;
};

/// E_{n <= min(N/d1, N/d2)} (f1 - volume_mean1)(H_N h(d1 n)) f2(H_N h(d2 n)).
/// d1, d2 prime and distinct unless allow_diagonal.
double type2_sum(const TestFunction& f1, double volume_mean1, const TestFunction& f2, std::uint64_t N,
                 std::uint64_t d1, std::uint64_t d2, const Type2Options& options = {});

struct BilinearReport {
  std::uint64_t D = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // d1 < d2 primes in (D, 2D)
  std::vector<double> values;                                   // aligned with pairs
  double mean_abs = 0.0;
};

BilinearReport bilinear_report(const TestFunction& f1, double volume_mean1, const TestFunction& f2,
                               std::uint64_t N, std::uint64_t D);

struct DfiReport {
  std::uint64_t x = 0;
  double prime_mean = 0.0;  // E_{p < x} a_p
  double A = 0.0;           // E_{n < x} a_n
  double ratio = 0.0;       // |prime_mean - A| / A
  double anchor = 0.0;      // c(alpha, gamma) at the supported anchor
  double slack = 0.1;
  bool degenerate = false;  // A == 0: no verdict
  bool within_anchor = false;
};

/// Supported anchors: c(1/2, 1/3) = 0 and c(1/2, 1/5) = 4/5; anything else
/// throws InvalidArgument. a[n] for 0 <= n < x.
DfiReport dfi_conclusion_check(const std::vector<double>& a, std::uint64_t x, double alpha_level,
                               double gamma_level, const PrimeTable& primes, double slack = 0.1);

}  // namespace horolab

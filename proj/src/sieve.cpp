#include "horolab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/chunked.hpp"
#include "horolab/error.hpp"

namespace horolab {

namespace {

constexpr std::uint64_t kSegmentOdds = 1 << 18;

std::vector<std::uint32_t> simple_sieve(std::uint64_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    if (composite[n]) continue;
    out.push_back(static_cast<std::uint32_t>(n));
    for (std::uint64_t m = n * n; m <= limit; m += n) composite[m] = true;
  }
  return out;
}

}  // namespace

PrimeTable primes_up_to(std::uint64_t limit, std::uint64_t max_limit) {
  require(limit >= 2, ErrorCode::InvalidArgument, "prime limit must be >= 2");
  if (limit > max_limit || limit >= (std::uint64_t{1} << 32)) {
    fail(ErrorCode::LimitTooLarge, "prime limit " + std::to_string(limit) + " exceeds the configured cap");
  }
  PrimeTable table;
  table.limit_ = limit;
  const std::uint64_t odd_count = (limit + 1) / 2;  // odd numbers 1, 3, ..., <= limit
  table.odd_bits_.assign((odd_count + 63) / 64, 0);
  table.primes_.push_back(2);

  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit))) + 1;
  const std::vector<std::uint32_t> base = simple_sieve(root);
  std::vector<std::uint8_t> segment;
  for (std::uint64_t lo = 0; lo < odd_count; lo += kSegmentOdds) {
    const std::uint64_t hi = std::min(odd_count, lo + kSegmentOdds);  // odd indices [lo, hi)
    segment.assign(hi - lo, 1);
    for (std::size_t k = 1; k < base.size(); ++k) {
      const std::uint64_t p = base[k];
      if (p * p > 2 * hi - 1) break;
      // First odd multiple >= max(p^2, 2 lo + 1).
      std::uint64_t start = std::max(p * p, ((2 * lo + 1 + p - 1) / p) * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t m = start; m <= 2 * hi - 1; m += 2 * p) segment[(m - 1) / 2 - lo] = 0;
    }
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t n = 2 * i + 1;
      if (n < 3 || !segment[i - lo]) continue;
      table.primes_.push_back(static_cast<std::uint32_t>(n));
      table.odd_bits_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return table;
}

std::size_t PrimeTable::pi(std::uint64_t n) const {
  require(n <= limit_ + 1, ErrorCode::InvalidArgument, "pi(n) queried beyond the table limit");
  return static_cast<std::size_t>(std::lower_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

bool PrimeTable::is_prime(std::uint64_t n) const {
  require(n <= limit_, ErrorCode::InvalidArgument, "is_prime queried beyond the table limit");
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  const std::uint64_t i = n / 2;
  return (odd_bits_[i / 64] >> (i % 64)) & 1U;
}

bool is_prime_slow(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "factorize needs n >= 1");
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::uint64_t divisor_tau(std::uint64_t n) {
  std::uint64_t t = 1;
  for (const auto& [p, e] : factorize(n)) t *= static_cast<std::uint64_t>(e + 1);
  return t;
}

std::uint64_t divisor_tau3(std::uint64_t n) {
  std::uint64_t t = 1;
  for (const auto& [p, e] : factorize(n)) t *= static_cast<std::uint64_t>((e + 1) * (e + 2) / 2);
  return t;
}

std::uint64_t divisor_sigma1(std::uint64_t n) {
  std::uint64_t s = 1;
  for (const auto& [p, e] : factorize(n)) {
    std::uint64_t term = 1, pk = 1;
    for (int k = 0; k < e; ++k) {
      pk *= p;
      term += pk;
    }
    s *= term;
  }
  return s;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

int big_omega(std::uint64_t n) {
  int total = 0;
  for (const auto& [p, e] : factorize(n)) total += e;
  return total;
}

bool is_squarefree(std::uint64_t n) {
  for (const auto& [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

std::vector<std::uint8_t> big_omega_table(std::uint64_t limit) {
  std::vector<std::uint8_t> omega(limit + 1, 0);
  if (limit < 2) return omega;
  const PrimeTable table = primes_up_to(limit);
  for (const std::uint32_t p : table.primes()) {
    for (std::uint64_t pk = p; pk <= limit; pk *= p) {
      for (std::uint64_t m = pk; m <= limit; m += pk) ++omega[m];
      if (pk > limit / p) break;
    }
  }
  return omega;
}

std::vector<std::uint64_t> almost_primes(std::uint64_t limit, int k, bool include_one) {
  require(k >= 1, ErrorCode::InvalidArgument, "almost-prime factor bound must be >= 1");
  std::vector<std::uint64_t> out;
  if (include_one && limit >= 1) out.push_back(1);
  const std::vector<std::uint8_t> omega = big_omega_table(limit);
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (omega[n] <= k) out.push_back(n);
  return out;
}

SieveReport selberg_upper_bound(const std::vector<double>& a, std::uint64_t T, std::uint64_t D, MainTerm mode,
                                double A_exact, const PrimeTable& primes) {
  require(D > 1 && D <= T, ErrorCode::InvalidArgument, "sieve level must satisfy 1 < D <= T");
  require(a.size() > T, ErrorCode::InvalidArgument, "sequence must be tabulated up to T");
  require(primes.limit() >= T, ErrorCode::InvalidArgument, "prime table must reach T");
  for (std::uint64_t n = 1; n <= T; ++n) {
    if (!(a[n] >= 0.0)) fail(ErrorCode::NegativeSequence, "a_" + std::to_string(n) + " is negative");
  }
  SieveReport r;
  r.T = T;
  r.D = D;
  std::vector<double> progression(D, 0.0);
  for (std::uint64_t d = 1; d < D; ++d)
    for (std::uint64_t m = d; m <= T; m += d) progression[d] += a[m];
  if (mode == MainTerm::Exact) {
    require(A_exact >= 0.0, ErrorCode::InvalidArgument, "main term must be >= 0");
    r.A = A_exact;
  } else {
    r.A = progression[1];
  }
  r.remainders.assign(D, 0.0);
  for (std::uint64_t d = 1; d < D; ++d) {
    r.remainders[d] = progression[d] - r.A / static_cast<double>(d);
    r.remainder_term += static_cast<double>(divisor_tau3(d)) * std::fabs(r.remainders[d]);
  }
  r.main_term = r.A / std::log(std::sqrt(static_cast<double>(D)));
  r.upper_bound = r.main_term + r.remainder_term;
  for (const std::uint32_t p : primes.primes()) {
    if (p > T) break;
    if (static_cast<std::uint64_t>(p) * p > T) r.actual += a[p];
  }
  r.holds = r.actual <= r.upper_bound;
  return r;
}

SieveReport selberg_upper_bound(const std::function<double(std::uint64_t)>& a, std::uint64_t T, std::uint64_t D,
                                MainTerm mode, double A_exact, const PrimeTable& primes) {
  std::vector<double> values(T + 1, 0.0);
  for (std::uint64_t n = 1; n <= T; ++n) values[n] = a(n);
  return selberg_upper_bound(values, T, D, mode, A_exact, primes);
}

IwasawaPoint hecke_orbit_point(std::uint64_t N, std::uint64_t m) {
  require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  const double x = static_cast<double>(m % N) / static_cast<double>(N);
  return reduce_point({x, 1.0 / static_cast<double>(N), 0.0});
}

double type1_sum(const TestFunction& f, double volume_mean, std::uint64_t N, std::uint64_t D,
                 const Type1Options& options) {
  require(D >= 1 && D < N, ErrorCode::InvalidArgument, "type I sums need 1 <= D < N");
  std::vector<std::uint64_t> moduli;
  for (std::uint64_t d = D + 1; d < 2 * D; ++d) {
    if (N / d == 0) continue;
    if (options.squarefree_only && !is_squarefree(d)) continue;
    moduli.push_back(d);
  }
  require(!moduli.empty(), ErrorCode::EmptyIndexSet, "no admissible moduli in (D, 2D)");
  std::vector<double> inner(moduli.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t d = moduli[i];
    const std::uint64_t M = N / d;
    double sum = 0.0;
    for (std::uint64_t n = 1; n <= M; ++n) sum += f.evaluate_reduced(hecke_orbit_point(N, d * n)) - volume_mean;
    inner[i] = std::fabs(sum / static_cast<double>(M));
  }
  double total = 0.0;
  for (double v : inner) total += v;
  return total / static_cast<double>(moduli.size());
}

double type2_sum(const TestFunction& f1, double volume_mean1, const TestFunction& f2, std::uint64_t N,
                 std::uint64_t d1, std::uint64_t d2, const Type2Options& options) {
  require(is_prime_slow(d1) && is_prime_slow(d2), ErrorCode::InvalidArgument, "type II moduli must be prime");
  require(options.allow_diagonal || d1 != d2, ErrorCode::InvalidArgument, "type II moduli must be distinct");
  const std::uint64_t M = std::min(N / d1, N / d2);
  require(M >= 1, ErrorCode::InvalidArgument, "type II range is empty");
  const std::vector<double> sum = detail::chunked_sums(M, 1, [&](std::size_t i, double* acc) {
    const std::uint64_t n = i + 1;
    acc[0] += (f1.evaluate_reduced(hecke_orbit_point(N, d1 * n)) - volume_mean1) *
              f2.evaluate_reduced(hecke_orbit_point(N, d2 * n));
  });
  return sum[0] / static_cast<double>(M);
}

BilinearReport bilinear_report(const TestFunction& f1, double volume_mean1, const TestFunction& f2,
                               std::uint64_t N, std::uint64_t D) {
  BilinearReport r;
  r.D = D;
  std::vector<std::uint64_t> ps;
  for (std::uint64_t d = D + 1; d < 2 * D; ++d)
    if (is_prime_slow(d)) ps.push_back(d);
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j) r.pairs.emplace_back(ps[i], ps[j]);
  require(!r.pairs.empty(), ErrorCode::EmptyIndexSet, "fewer than two primes in (D, 2D)");
  for (const auto& [d1, d2] : r.pairs) r.values.push_back(type2_sum(f1, volume_mean1, f2, N, d1, d2));
  for (double v : r.values) r.mean_abs += std::fabs(v);
  r.mean_abs /= static_cast<double>(r.values.size());
  return r;
}

DfiReport dfi_conclusion_check(const std::vector<double>& a, std::uint64_t x, double alpha_level,
                               double gamma_level, const PrimeTable& primes, double slack) {
  require(x >= 3 && a.size() >= x, ErrorCode::InvalidArgument, "sequence must be tabulated below x >= 3");
  require(primes.limit() + 1 >= x, ErrorCode::InvalidArgument, "prime table must reach x");
  DfiReport r;
  r.x = x;
  r.slack = slack;
  const auto near = [](double u, double v) { return std::fabs(u - v) < 1e-9; };
  if (near(alpha_level, 0.5) && near(gamma_level, 1.0 / 3.0)) r.anchor = 0.0;
  else if (near(alpha_level, 0.5) && near(gamma_level, 0.2)) r.anchor = 0.8;
  else fail(ErrorCode::InvalidArgument, "only the anchors c(1/2,1/3) and c(1/2,1/5) are available");

  double total = 0.0;
  for (std::uint64_t n = 1; n < x; ++n) {
    if (!(a[n] >= 0.0)) fail(ErrorCode::NegativeSequence, "a_" + std::to_string(n) + " is negative");
    total += a[n];
  }
  r.A = total / static_cast<double>(x - 1);
  double prime_total = 0.0;
  std::size_t count = 0;
  for (const std::uint32_t p : primes.primes()) {
    if (p >= x) break;
    prime_total += a[p];
    ++count;
  }
  r.prime_mean = prime_total / static_cast<double>(count);
  if (r.A == 0.0) {
    r.degenerate = true;
    return r;
  }
  r.ratio = std::fabs(r.prime_mean - r.A) / r.A;
  r.within_anchor = r.ratio <= r.anchor + slack;
  return r;
}

}  // namespace horolab

#include "horolab/heckelab.hpp"

#include <cmath>
#include <numeric>

#include "horolab/error.hpp"
#include "horolab/horoflow.hpp"

namespace horolab {

GroupElement hecke_base(std::uint64_t N) {
  require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  return dilation(1.0 / static_cast<double>(N));
}

IwasawaPoint HeckeRep::point() const {
  return {static_cast<double>(b) / static_cast<double>(d), static_cast<double>(a) / static_cast<double>(d), 0.0};
}

std::vector<HeckeRep> enumerate_CN(std::int64_t N) {
  require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  std::vector<HeckeRep> reps;
  for (std::int64_t a = 1; a <= N; ++a) {
    if (N % a != 0) continue;
    const std::int64_t d = N / a;
    for (std::int64_t b = 0; b < d; ++b) reps.push_back({a, b, d, N});
  }
  return reps;
}

B1Result b1_of(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  require(c == 0 && a > 0 && d > 0, ErrorCode::InvalidArgument, "b1 needs [[a, b], [0, d]] with a, d > 0");
  const std::int64_t N = a * d;
  B1Result r;
  r.a1 = std::gcd(a, N);
  r.d1 = N / r.a1;
  if (std::gcd(a, r.d1) != 1) fail(ErrorCode::NonInvertible, "a is not invertible modulo d1");
  if (r.d1 == 1) return r;
  // a * inv = 1 mod d1 with inv in [1, d1].
  std::int64_t old_r = a % r.d1, rr = r.d1, old_s = 1, s = 0;
  while (rr != 0) {
    const std::int64_t q = old_r / rr;
    std::tie(old_r, rr) = std::make_pair(rr, old_r - q * rr);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  std::int64_t inv = old_s % r.d1;
  if (inv <= 0) inv += r.d1;
  std::int64_t bm = b % r.d1;
  if (bm < 0) bm += r.d1;
  r.b1 = ((BigInt(inv) * bm) % r.d1).convert_to<std::int64_t>();
  return r;
}

B1Result b1_of(const HeckeRep& rep) { return b1_of(rep.a, rep.b, 0, rep.d); }

RatioReport ratio_report(const EmpiricalMeasure& mu, const std::vector<TestFunction>& family,
                         const std::vector<Estimate>& volume_integrals, double mass_floor) {
  require(volume_integrals.size() == family.size(), ErrorCode::InvalidArgument, "integrals misaligned with family");
  RatioReport r;
  r.sample_size = mu.points.size();
  r.escaped_mass = mu.escaped_mass;
  const std::vector<double> pairs = pair_with_family(mu, family);
  for (std::size_t k = 0; k < family.size(); ++k) {
    const double mass = volume_integrals[k].value;
    if (mass < mass_floor) continue;
    r.used.push_back(k);
    r.masses.push_back(mass);
    r.ratios.push_back(pairs[k] / mass);
  }
  require(!r.used.empty(), ErrorCode::EmptyIndexSet, "no test function reaches the mass floor");
  r.min_ratio = r.max_ratio = r.ratios.front();
  for (double q : r.ratios) {
    r.min_ratio = std::min(r.min_ratio, q);
    r.max_ratio = std::max(r.max_ratio, q);
    r.max_deviation = std::max(r.max_deviation, std::fabs(q - 1.0));
  }
  return r;
}

RatioReport prime_hecke_experiment(std::uint64_t N, const std::vector<TestFunction>& family,
                                   const std::vector<Estimate>& volume_integrals, double mass_floor,
                                   bool primes_only) {
  OrbitSpec spec;
  spec.base = hecke_base(N);
  spec.step = 1.0;
  spec.count = N;
  spec.index_set = primes_only ? IndexSet{PrimeIndices{}} : IndexSet{AllIndices{}};
  RatioReport r = ratio_report(empirical_measure(spec), family, volume_integrals, mass_floor);
  r.N = N;
  return r;
}

LinnikReport linnik_projection_experiment(std::int64_t N, const IwasawaPoint& center, double radius,
                                          double height_bound) {
  require(N >= 2, ErrorCode::InvalidArgument, "N must be >= 2");
  require(radius > 0.0, ErrorCode::InvalidArgument, "radius must be > 0");
  LinnikReport r;
  r.N = N;
  const bool everywhere = std::isinf(radius);
  const TranslateCloud cloud(reduce_point(center), 3, everywhere ? 1.0 : radius);
  const std::vector<HeckeRep> reps = enumerate_CN(N);
  r.total_reps = reps.size();
  for (const HeckeRep& rep : reps) {
    const IwasawaPoint q = reduce_point(rep.point());
    if (q.y > height_bound) {
      ++r.escaped;
      continue;
    }
    if (!everywhere && !std::isfinite(cloud.distance_to_reduced(q, radius))) continue;
    ++r.in_region;
    try {
      const B1Result b = b1_of(rep);
      if (b.b1 >= 2 && is_prime_slow(static_cast<std::uint64_t>(b.b1))) ++r.b1_prime;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonInvertible) throw;
      ++r.non_invertible;
    }
  }
  if (r.in_region > 0) {
    r.ratio = static_cast<double>(r.b1_prime) / static_cast<double>(r.in_region);
    r.ratio_times_log = r.ratio * std::log(static_cast<double>(N));
    r.within_window = r.ratio_times_log >= r.window_low && r.ratio_times_log <= r.window_high;
  }
  return r;
}

}  // namespace horolab

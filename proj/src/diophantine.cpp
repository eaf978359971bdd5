#include "horolab/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "detail/coprime.hpp"
#include "horolab/error.hpp"
#include "horolab/horoflow.hpp"
#include "horolab/sieve.hpp"

namespace horolab {

namespace detail {

const std::vector<std::pair<std::int32_t, std::int32_t>>& coprime_bottom_rows(int bound) {
  static std::mutex mutex;
  static std::map<int, std::vector<std::pair<std::int32_t, std::int32_t>>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(bound);
  if (it != cache.end()) return it->second;
  std::vector<std::pair<std::int32_t, std::int32_t>> rows{{0, 1}};
  for (std::int32_t c = 1; c <= bound; ++c) {
    for (std::int32_t d = -bound; d <= bound; ++d) {
      if (std::gcd(c, d) == 1) rows.emplace_back(c, d);
    }
  }
  return cache.emplace(bound, std::move(rows)).first->second;
}

std::pair<std::int64_t, std::int64_t> complete_row(std::int64_t c, std::int64_t d) {
  if (d == 0) return {0, -c};  // c = +-1: a*0 - b*c = 1
  // x d + y c = 1
  std::int64_t old_r = d, r = c, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  // old_r = +-1, old_s d + t c = old_r
  std::int64_t a0 = old_s * old_r;
  std::int64_t b0 = c != 0 ? -(1 - a0 * d) / c : 0;
  // a = a0 + k c, b = b0 + k d; choose k minimizing |b|.
  const auto k = static_cast<std::int64_t>(std::nearbyint(-static_cast<double>(b0) / static_cast<double>(d)));
  std::int64_t best_k = k;
  for (std::int64_t cand : {k - 1, k + 1}) {
    const std::int64_t bb = b0 + cand * d;
    const std::int64_t bk = b0 + best_k * d;
    if (std::llabs(bb) < std::llabs(bk) || (std::llabs(bb) == std::llabs(bk) && bb < bk)) best_k = cand;
  }
  return {a0 + best_k * c, b0 + best_k * d};
}

}  // namespace detail

TorusValue torus_parts(double alpha) {
  require(std::isfinite(alpha), ErrorCode::InvalidArgument, "torus_parts needs a finite value");
  const double n = std::nearbyint(alpha);
  const double frac = alpha - n;
  return {static_cast<std::int64_t>(n), frac, std::fabs(frac)};
}

double torus_norm(double alpha) { return std::fabs(alpha - std::nearbyint(alpha)); }

std::vector<Convergent> continued_fraction(double alpha, int depth) {
  require(depth >= 1, ErrorCode::InvalidArgument, "continued fraction depth must be >= 1");
  require(std::isfinite(alpha), ErrorCode::InvalidArgument, "continued fraction needs a finite value");
  // alpha = num / den exactly.
  int exponent = 0;
  const double mantissa = std::frexp(alpha, &exponent);
  BigInt num(static_cast<long long>(std::ldexp(mantissa, 53)));
  BigInt den(1);
  exponent -= 53;
  if (exponent > 0) num <<= exponent;
  else den <<= -exponent;

  std::vector<Convergent> out;
  BigInt p_prev(1), q_prev(0), p_prev2(0), q_prev2(1);
  while (static_cast<int>(out.size()) < depth) {
    BigInt a = num / den;
    BigInt rem = num % den;
    if (rem < 0) {  // floor division
      a -= 1;
      rem += den;
    }
    BigInt p = a * p_prev + p_prev2;
    BigInt q = a * q_prev + q_prev2;
    out.push_back({p, q});
    if (rem == 0) break;
    p_prev2 = std::move(p_prev);
    q_prev2 = std::move(q_prev);
    p_prev = std::move(p);
    q_prev = std::move(q);
    num = std::move(den);
    den = std::move(rem);
  }
  return out;
}

namespace {

double multiple_norm(std::uint64_t m, double alpha) {
  return torus_norm(static_cast<double>(m) * alpha);
}

}  // namespace

std::uint64_t kappa_U_brute_force(double alpha, double U) {
  require(U > 1.0 && std::isfinite(U), ErrorCode::InvalidArgument, "kappa_U needs finite U > 1");
  const double target = 1.0 / U;
  for (std::uint64_t m = 1;; ++m) {
    if (multiple_norm(m, alpha) <= target) return m;
  }
}

std::uint64_t kappa_U(double alpha, double U) {
  require(U > 1.0 && std::isfinite(U), ErrorCode::InvalidArgument, "kappa_U needs finite U > 1");
  const double target = 1.0 / U;
  const auto dirichlet = static_cast<std::uint64_t>(std::ceil(U)) + 1;
  // Denominators below q_{k+1} never beat q_k, so the first qualifying
  // convergent denominator is the least m.
  for (const Convergent& c : continued_fraction(alpha, 64)) {
    if (c.q > dirichlet) break;
    const auto q = c.q.convert_to<std::uint64_t>();
    if (q >= 1 && multiple_norm(q, alpha) <= target) return q;
  }
  return kappa_U_brute_force(alpha, U);
}

std::vector<FareyArc> farey_arcs(int K) {
  require(K >= 1, ErrorCode::InvalidArgument, "Farey order must be >= 1");
  // F_K in increasing order via the next-term recurrence.
  std::vector<std::pair<std::int64_t, std::int64_t>> seq;
  std::int64_t a = 0, b = 1, c = 1, d = K;
  seq.emplace_back(a, b);
  while (c <= K) {
    const std::int64_t k = (K + b) / d;
    std::tie(a, b, c, d) = std::make_tuple(c, d, k * c - a, k * d - b);
    seq.emplace_back(a, b);
  }
  std::vector<FareyArc> arcs;
  arcs.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto [num, den] = seq[i];
    FareyArc arc{num, den, Fraction(0), Fraction(1)};
    if (i > 0) arc.left = Fraction(num + seq[i - 1].first, den + seq[i - 1].second);
    if (i + 1 < seq.size()) arc.right = Fraction(num + seq[i + 1].first, den + seq[i + 1].second);
    arcs.push_back(arc);
  }
  return arcs;
}

bool is_exact_partition(const std::vector<FareyArc>& arcs) {
  if (arcs.empty() || arcs.front().left != Fraction(0) || arcs.back().right != Fraction(1)) return false;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    if (!(arcs[i].left < arcs[i].right)) return false;
    if (i + 1 < arcs.size() && arcs[i].right != arcs[i + 1].left) return false;
  }
  return true;
}

double fundamental_period_formula(const GroupElement& g, double T) {
  require(T >= 5.0, ErrorCode::InvalidArgument, "period formula needs T >= 5");
  const IwasawaPoint p = reduce_point(iwasawa_decompose(g));
  if (std::fabs(std::sin(p.theta)) <= 1e-12) return p.y;
  const HorocycleParams h = horocycle_params(p);
  const double first = std::min(p.y, h.radius / (T * T));
  const double U = std::sqrt(T / h.radius);
  const std::uint64_t kappa = U > 1.0 ? kappa_U(h.tangency, U) : 1;
  const double k = static_cast<double>(kappa);
  const double dist = multiple_norm(kappa, h.tangency);
  const double near = U / k;
  const double far = dist > 0.0 ? (1.0 / U) / dist : std::numeric_limits<double>::infinity();
  const double m = std::min(near, far);
  return first + m * m / T;
}

PeriodReport fundamental_period_oracle(const GroupElement& g, double T, int entry_bound) {
  require(entry_bound >= 1, ErrorCode::InvalidArgument, "entry bound must be >= 1");
  require(T >= 0.0, ErrorCode::InvalidArgument, "piece length must be >= 0");
  IwasawaPoint start = iwasawa_decompose(g);
  // Integer shift centring the tangency point keeps the optimal d small.
  double shift = std::nearbyint(start.x);
  if (std::fabs(std::sin(start.theta)) > 1e-12) shift = std::nearbyint(horocycle_params(start).tangency);
  start.x -= shift;
  const IwasawaPoint end = flow_point(start, T);

  const auto& rows = detail::coprime_bottom_rows(entry_bound);
  const long double sx = start.x, sy = start.y, ex = end.x, ey = end.y;
  long double best = -1.0L;
  std::size_t best_row = 0;
  bool best_is_end = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const long double c = rows[i].first, d = rows[i].second;
    const long double u = c * sx + d, v = c * sy;
    const long double y_start = sy / (u * u + v * v);
    const long double w = c * ex + d, z = c * ey;
    const long double y_end = ey / (w * w + z * z);
    const long double low = std::min(y_start, y_end);
    if (low > best) {
      best = low;
      best_row = i;
      best_is_end = y_end < y_start;
    }
  }

  const auto [c, d] = rows[best_row];
  const auto [a, b] = detail::complete_row(c, d);
  IntegerMatrix gamma = compose(IntegerMatrix{a, b, c, d}, IntegerMatrix::shift(BigInt(static_cast<long long>(-shift))));
  IwasawaPoint peak = moebius_act(gamma, best_is_end ? flow_point(iwasawa_decompose(g), T) : iwasawa_decompose(g));
  const double m = std::ceil(peak.x - 0.5);
  if (m != 0.0) {
    gamma = compose(IntegerMatrix::shift(BigInt(static_cast<long long>(-m))), gamma);
    peak.x -= m;
  }

  PeriodReport report;
  report.y_T = static_cast<double>(best);
  report.gamma = std::move(gamma);
  report.endpoint = best_is_end ? Endpoint::End : Endpoint::Start;
  report.peak = peak;
  if (std::fabs(std::sin(peak.theta)) > 1e-12) {
    const HorocycleParams h = horocycle_params(peak);
    report.alpha_T = h.tangency;
    report.W_T = h.slope;
  }
  return report;
}

namespace {

double max_abs_entry(const GroupElement& g) {
  return std::max({std::fabs(g.a), std::fabs(g.b), std::fabs(g.c), std::fabs(g.d)});
}

double exponent_scale(double tau, double delta, double C) { return std::pow(tau / delta, C); }

struct DiscreteWitness {
  std::uint64_t q = 0;
  std::uint64_t q2 = 1;
  double lhs = 0.0;
  double rhs = 0.0;
};

std::uint64_t reduced_denominator(std::int64_t k, std::uint64_t q) {
  if (k == 0) return 1;
  return q / std::gcd(static_cast<std::uint64_t>(std::llabs(k)), q);
}

// Condition on a single translate; returns the witness for q' when it holds.
std::optional<DiscreteWitness> check_translate_at(const IwasawaPoint& p, std::uint64_t q, double s,
                                                  std::uint64_t N, double delta, const ExponentConfig& e) {
  if (!(p.y < 1.0)) return std::nullopt;
  const long double v = static_cast<long double>(q) * s * p.y;
  if (std::fabs(v) > 9e15L) return std::nullopt;
  const long double k = std::nearbyint(v);
  const double frac = static_cast<double>(std::fabs(v - k));
  const double sN = s * static_cast<double>(N);
  const double lhs = torus_norm(static_cast<double>(q) * p.x) + static_cast<double>(N) * frac +
                     sN * sN * static_cast<double>(q) * angle_gap_mod_pi(p.theta, 0.0) * p.y;
  const std::uint64_t q2 = reduced_denominator(static_cast<std::int64_t>(k), q);
  const double M = exponent_scale(static_cast<double>(divisor_tau(q2)), delta, e.bound_exponent);
  const double Mw = exponent_scale(static_cast<double>(divisor_tau(q2)), delta, e.q_exponent);
  const double centre = 1.0 / std::sqrt(p.y);
  const double rhs = std::sqrt(p.y) * M;
  const double qd = static_cast<double>(q);
  if (qd >= centre / Mw && qd <= centre * Mw && lhs < rhs) return DiscreteWitness{q, q2, lhs, rhs};
  return std::nullopt;
}

// Condition in the (q, gamma) form on the translate gamma g0.
bool condition_i(const GroupElement& g0, double s, std::uint64_t N, double delta, const ExponentConfig& e,
                 int entry_bound, std::uint64_t q_cap) {
  const IwasawaPoint base = iwasawa_decompose(g0);
  for (const auto& [c, d] : detail::coprime_bottom_rows(entry_bound)) {
    const auto [a, b] = detail::complete_row(c, d);
    const IwasawaPoint p = moebius_act(IntegerMatrix{a, b, c, d}, base);
    const double entries = std::max({std::llabs(a), std::llabs(b), std::llabs(c), std::llabs(d)});
    if (std::fabs(std::sin(p.theta)) <= 1e-12) {
      // s/R = 0: both inequalities hold with q = 1, q2 = 1.
      if (entries <= exponent_scale(1.0, delta, e.q_exponent)) return true;
      continue;
    }
    const HorocycleParams h = horocycle_params(p);
    for (std::uint64_t q = 1; q <= q_cap; ++q) {
      const long double v = static_cast<long double>(q) * s / h.radius;
      if (std::fabs(v) > 9e15L) break;
      const auto k = static_cast<std::int64_t>(std::nearbyint(v));
      const double f1 = static_cast<double>(std::fabs(v - static_cast<long double>(k)));
      const double f2 = torus_norm(static_cast<double>(k) * h.tangency);
      std::uint64_t q2 = 1;
      if (k != 0) {
        const auto m = static_cast<std::int64_t>(std::nearbyint(static_cast<double>(k) * h.tangency));
        const std::uint64_t kk = static_cast<std::uint64_t>(std::llabs(k));
        const std::uint64_t q2_tilde = kk / std::gcd(kk, static_cast<std::uint64_t>(std::llabs(m)));
        const BigInt den = BigInt(q) * q2_tilde * q2_tilde;
        const BigInt reduced = den / boost::multiprecision::gcd(den, BigInt(kk));
        if (reduced > 1'000'000'000'000ULL) continue;
        q2 = static_cast<std::uint64_t>(reduced);
      }
      const double tau = static_cast<double>(divisor_tau(q2));
      const double M = exponent_scale(tau, delta, e.bound_exponent);
      const double Mq = exponent_scale(tau, delta, e.q_exponent);
      if (static_cast<double>(q) > Mq || entries > Mq) continue;
      if (f1 < M / static_cast<double>(N) && f2 < M / (s * static_cast<double>(N) * static_cast<double>(N))) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

DaniConditionVerdict dani_condition_continuous(const GroupElement& g0, double T, double delta,
                                               const ExponentConfig& exponents) {
  require(delta > 0.0 && delta < 0.5, ErrorCode::InvalidArgument, "delta must lie in (0, 1/2)");
  require(T > 0.0, ErrorCode::InvalidArgument, "T must be > 0");
  DaniConditionVerdict v;
  v.kind = DaniKind::Continuous;
  v.exponents = exponents;
  v.base_within_bound = max_abs_entry(g0) <= 1.0 / delta;
  const IwasawaPoint p = iwasawa_decompose(g0);
  if (std::fabs(std::sin(p.theta)) <= 1e-12) {
    v.satisfied = true;
    v.witness_q = 1;
    v.note = "horizontal horocycle: the orbit is a closed horocycle";
    return v;
  }
  const double alpha = horocycle_params(p).tangency;
  const auto q_max = static_cast<std::uint64_t>(std::floor(std::pow(delta, -exponents.q_exponent) + 1e-9));
  v.rhs = std::pow(delta, -exponents.bound_exponent) / T;
  v.lhs = std::numeric_limits<double>::infinity();
  for (std::uint64_t q = 1; q <= q_max; ++q) {
    const double d = multiple_norm(q, alpha);
    if (d < v.lhs) v.lhs = d;
    if (d < v.rhs) {
      v.satisfied = true;
      v.witness_q = q;
      v.lhs = d;
      return v;
    }
  }
  return v;
}

DaniConditionVerdict dani_condition_discrete(const GroupElement& g0, double s, std::uint64_t N, double delta,
                                             const ExponentConfig& exponents, const DaniSearchConfig& search) {
  require(delta > 0.0 && delta < 0.5, ErrorCode::InvalidArgument, "delta must lie in (0, 1/2)");
  require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  if (!(s > 1.0 / (delta * static_cast<double>(N)))) {
    fail(ErrorCode::PreconditionViolated, "discrete condition needs s > 1/(delta N)");
  }
  DaniConditionVerdict v;
  v.kind = DaniKind::Discrete;
  v.exponents = exponents;
  v.base_within_bound = max_abs_entry(g0) <= 1.0 / delta;

  // The bound is largest for the most divisible q2' <= q_cap.
  std::uint64_t tau_max = 1;
  {
    std::vector<std::uint32_t> tau(search.q_cap + 1, 0);
    for (std::uint64_t dvs = 1; dvs <= search.q_cap; ++dvs)
      for (std::uint64_t m = dvs; m <= search.q_cap; m += dvs) ++tau[m];
    tau_max = *std::max_element(tau.begin(), tau.end());
  }
  const double M_max = exponent_scale(static_cast<double>(tau_max), delta, exponents.bound_exponent);
  const double Mw_max = exponent_scale(static_cast<double>(tau_max), delta, exponents.q_exponent);
  const double sN = s * static_cast<double>(N);

  const IwasawaPoint base = iwasawa_decompose(g0);
  for (const auto& [c, d] : detail::coprime_bottom_rows(search.gamma_entry_bound)) {
    const auto [a, b] = detail::complete_row(c, d);
    const IntegerMatrix gamma{a, b, c, d};
    const IwasawaPoint p = moebius_act(gamma, base);
    if (!(p.y < 1.0)) continue;
    const double rhs_max = std::sqrt(p.y) * M_max;
    const double drift = sN * sN * angle_gap_mod_pi(p.theta, 0.0) * p.y;
    if (drift >= rhs_max) continue;
    double q_hi = std::min(static_cast<double>(search.q_cap), std::floor(Mw_max / std::sqrt(p.y)));
    if (drift > 0.0) q_hi = std::min(q_hi, std::floor(rhs_max / drift));
    const auto q_top = static_cast<std::uint64_t>(std::max(0.0, q_hi));
    for (std::uint64_t q = 1; q <= q_top; ++q) {
      const long double vq = static_cast<long double>(q) * s * p.y;
      const double frac = static_cast<double>(std::fabs(vq - std::nearbyint(vq)));
      if (static_cast<double>(N) * frac >= rhs_max) continue;
      if (auto w = check_translate_at(p, q, s, N, delta, exponents)) {
        v.satisfied = true;
        v.witness_q = w->q;
        v.q2 = w->q2;
        v.lhs = w->lhs;
        v.rhs = w->rhs;
        v.witness_gamma = gamma;
        v.witness_point = p;
        break;
      }
    }
    if (v.satisfied) break;
  }
  if (search.evaluate_condition_i) {
    const bool alt = condition_i(g0, s, N, delta, exponents, search.gamma_entry_bound,
                                 std::min<std::uint64_t>(search.q_cap, 2000));
    v.condition_i = alt;
    v.forms_agree = alt == v.satisfied;
  }
  return v;
}

bool verify_witness(const DaniConditionVerdict& verdict, const GroupElement& g0, double T_or_s,
                    std::uint64_t N, double delta) {
  if (!verdict.satisfied || !verdict.witness_q) return false;
  const std::uint64_t q = *verdict.witness_q;
  if (verdict.kind == DaniKind::Continuous) {
    const IwasawaPoint p = iwasawa_decompose(g0);
    if (std::fabs(std::sin(p.theta)) <= 1e-12) return true;
    const double alpha = horocycle_params(p).tangency;
    const double q_max = std::floor(std::pow(delta, -verdict.exponents.q_exponent) + 1e-9);
    return static_cast<double>(q) <= q_max &&
           multiple_norm(q, alpha) < std::pow(delta, -verdict.exponents.bound_exponent) / T_or_s;
  }
  if (!verdict.witness_gamma) return false;
  const IwasawaPoint p = moebius_act(*verdict.witness_gamma, iwasawa_decompose(g0));
  return check_translate_at(p, q, T_or_s, N, delta, verdict.exponents).has_value();
}

}  // namespace horolab

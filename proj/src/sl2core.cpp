#include "horolab/sl2core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "detail/kernels.hpp"
#include "horolab/error.hpp"

namespace horolab {

namespace {

long double to_ld(const BigInt& v) { return v.convert_to<long double>(); }

struct BigWitness {
  IntegerMatrix m;
  void shift(long double n) {
    // [[1,-n],[0,1]] * m
    const BigInt k(static_cast<long long>(n));
    m.a -= k * m.c;
    m.b -= k * m.d;
  }
  void invert() {
    // [[0,1],[-1,0]] * m
    BigInt a = m.c;
    BigInt b = m.d;
    m.c = -m.a;
    m.d = -m.b;
    m.a = std::move(a);
    m.b = std::move(b);
  }
};

}  // namespace

GroupElement GroupElement::from_entries(double a, double b, double c, double d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    fail(ErrorCode::InvalidArgument, "group element entries must be finite");
  }
  const double det = a * d - b * c;
  if (!(det > 0.0)) fail(ErrorCode::InvalidArgument, "determinant must be positive");
  const double s = 1.0 / std::sqrt(det);
  return {a * s, b * s, c * s, d * s};
}

GroupElement translation(double x) { return {1.0, x, 0.0, 1.0}; }

GroupElement dilation(double y) {
  require(y > 0.0 && std::isfinite(y), ErrorCode::InvalidArgument, "dilation needs y > 0");
  const double r = std::sqrt(y);
  return {r, 0.0, 0.0, 1.0 / r};
}

GroupElement rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, -s, c};
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  return GroupElement::from_entries(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                                    g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

IntegerMatrix IntegerMatrix::from_entries(BigInt a, BigInt b, BigInt c, BigInt d) {
  if (a * d - b * c != 1) fail(ErrorCode::InvalidArgument, "integer matrix must have determinant 1");
  return {std::move(a), std::move(b), std::move(c), std::move(d)};
}

IntegerMatrix IntegerMatrix::shift(const BigInt& n) { return {1, n, 0, 1}; }

IntegerMatrix IntegerMatrix::inversion() { return {0, 1, -1, 0}; }

BigInt IntegerMatrix::max_abs_entry() const {
  using boost::multiprecision::abs;
  return std::max({abs(a), abs(b), abs(c), abs(d)});
}

GroupElement IntegerMatrix::to_group_element() const {
  return {a.convert_to<double>(), b.convert_to<double>(), c.convert_to<double>(),
          d.convert_to<double>()};
}

IntegerMatrix compose(const IntegerMatrix& g, const IntegerMatrix& h) {
  return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
          g.c * h.b + g.d * h.d};
}

double wrap_angle(double theta) { return detail::wrap_angle_t<double>(theta); }

double angle_gap_mod_pi(double theta1, double theta2) {
  double r = std::fmod(std::fabs(theta1 - theta2), kPi);
  return std::min(r, kPi - r);
}

bool same_point_psl(const IwasawaPoint& p, const IwasawaPoint& q, double tol) {
  return std::fabs(p.x - q.x) <= tol && std::fabs(p.y - q.y) <= tol &&
         angle_gap_mod_pi(p.theta, q.theta) <= tol;
}

IwasawaPoint iwasawa_decompose(const GroupElement& g) {
  const double n2 = g.c * g.c + g.d * g.d;
  return {(g.a * g.c + g.b * g.d) / n2, 1.0 / n2, wrap_angle(std::atan2(-g.c, g.d))};
}

GroupElement iwasawa_compose(const IwasawaPoint& p) {
  if (!(p.y > 0.0) || !std::isfinite(p.y) || !std::isfinite(p.x) || !std::isfinite(p.theta)) {
    fail(ErrorCode::InvalidArgument, "Iwasawa point needs finite coordinates and y > 0");
  }
  const double r = std::sqrt(p.y);
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  return {-p.x * s / r + r * c, p.x * c / r + r * s, -s / r, c / r};
}

IwasawaPoint moebius_act(const IntegerMatrix& gamma, const IwasawaPoint& p) {
  const long double a = to_ld(gamma.a);
  const long double b = to_ld(gamma.b);
  const long double c = to_ld(gamma.c);
  const long double d = to_ld(gamma.d);
  const long double x = p.x;
  const long double y = p.y;
  const long double re = c * x + d;
  const long double im = c * y;
  const long double n2 = re * re + im * im;
  const long double nx = ((a * x + b) * re + a * c * y * y) / n2;
  const long double ny = y / n2;
  const long double th = detail::wrap_angle_t<long double>(p.theta - std::atan2(im, re));
  return {static_cast<double>(nx), static_cast<double>(ny), static_cast<double>(th)};
}

Reduction reduce_to_domain(const IwasawaPoint& p, const ReduceConfig& config) {
  require(p.y > 0.0, ErrorCode::InvalidArgument, "reduce_to_domain needs y > 0");
  detail::Point<long double> q{p.x, p.y, p.theta};
  BigWitness w;
  const int steps = detail::reduce_inplace(q, config.iteration_cap, w);
  return {{static_cast<double>(q.x), static_cast<double>(q.y), static_cast<double>(q.theta)},
          std::move(w.m),
          steps};
}

IwasawaPoint reduce_point(const IwasawaPoint& p, const ReduceConfig& config) {
  require(p.y > 0.0, ErrorCode::InvalidArgument, "reduce_point needs y > 0");
  detail::Point<long double> q{p.x, p.y, p.theta};
  detail::NoWitness w;
  detail::reduce_inplace(q, config.iteration_cap, w);
  return {static_cast<double>(q.x), static_cast<double>(q.y), static_cast<double>(q.theta)};
}

bool in_fundamental_domain(const IwasawaPoint& p, double tol) {
  return p.y > 0.0 && std::fabs(p.x) <= 0.5 + tol && p.x * p.x + p.y * p.y >= (1.0 - tol) * (1.0 - tol) &&
         p.theta >= -kPi && p.theta < kPi;
}

double surrogate_norm(double a, double b, double c, double d) {
  return std::sqrt(2.0 * a * a + (b + c) * (b + c) + 4.0 * c * c + 2.0 * d * d);
}

namespace {

// |g^-1 h - I| with g^-1 supplied.
double offset_norm(const GroupElement& g_inv, const GroupElement& h) {
  return surrogate_norm(g_inv.a * h.a + g_inv.b * h.c - 1.0, g_inv.a * h.b + g_inv.b * h.d,
                        g_inv.c * h.a + g_inv.d * h.c, g_inv.c * h.b + g_inv.d * h.d - 1.0);
}

double psi(const GroupElement& g, const GroupElement& g_inv, const GroupElement& h,
           const GroupElement& h_inv) {
  return std::min(offset_norm(g_inv, h), offset_norm(h_inv, g));
}

}  // namespace

SurrogateDistance surrogate_dist(const GroupElement& g, const GroupElement& h) {
  // Exact zero on +-equal pairs; the product route leaves rounding residue.
  const bool same = g.a == h.a && g.b == h.b && g.c == h.c && g.d == h.d;
  const bool opposite = g.a == -h.a && g.b == -h.b && g.c == -h.c && g.d == -h.d;
  if (same || opposite) return {0.0};
  const GroupElement g_inv = g.inverse();
  const GroupElement h_inv = h.inverse();
  const GroupElement mh = h.negated();
  const GroupElement mh_inv = h_inv.negated();
  return {std::min(psi(g, g_inv, h, h_inv), psi(g, g_inv, mh, mh_inv))};
}

const std::vector<IntegerMatrix>& small_modular_elements(int max_entry) {
  static std::mutex mutex;
  static std::map<int, std::vector<IntegerMatrix>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(max_entry);
  if (it != cache.end()) return it->second;
  std::vector<IntegerMatrix> out;
  const int m = max_entry;
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b)
      for (int c = -m; c <= m; ++c)
        for (int d = -m; d <= m; ++d)
          if (a * d - b * c == 1) out.push_back({a, b, c, d});
  return cache.emplace(max_entry, std::move(out)).first->second;
}

double dist_X(const IwasawaPoint& p, const IwasawaPoint& q, const MetricConfig& config) {
  const TranslateCloud cloud(reduce_point(p), config.max_entry);
  return cloud.distance_to_reduced(reduce_point(q));
}

namespace {

// Lower bound of cosh(d_H) - 1 from w to the half strip {|x| <= 1/2, y >= sqrt(3)/2},
// which contains D_X.
double strip_gap(double x, double y) {
  const double dx = std::max(0.0, std::fabs(x) - 0.5);
  const double y_star = std::max(std::sqrt(dx * dx + y * y), std::sqrt(3.0) / 2.0);
  return (dx * dx + (y_star - y) * (y_star - y)) / (2.0 * y * y_star);
}

// psi(g,h) <= r forces cosh d_H(g i, h i) - 1 <= r + r^2.
double hyperbolic_budget(double r) { return r + r * r; }

}  // namespace

TranslateCloud::TranslateCloud(const IwasawaPoint& center, int max_entry, double reach)
    : center_(center) {
  const GroupElement c = iwasawa_compose(center);
  const double budget = std::isfinite(reach) ? hyperbolic_budget(reach) : reach;
  for (const IntegerMatrix& gamma : small_modular_elements(max_entry)) {
    const GroupElement gm = gamma.to_group_element();
    const GroupElement g{gm.a * c.a + gm.b * c.c, gm.a * c.b + gm.b * c.d, gm.c * c.a + gm.d * c.c,
                         gm.c * c.b + gm.d * c.d};
    const IwasawaPoint z = iwasawa_decompose(g);
    if (std::isfinite(budget) && strip_gap(z.x, z.y) > budget) continue;
    translates_.push_back({g, g.inverse(), z.x, z.y});
  }
}

double TranslateCloud::distance_to_reduced(const IwasawaPoint& q, double cutoff) const {
  const GroupElement h = iwasawa_compose(q);
  const GroupElement h_inv = h.inverse();
  const double budget = std::isfinite(cutoff) ? hyperbolic_budget(cutoff) : cutoff;
  double best = std::numeric_limits<double>::infinity();
  for (const Translate& t : translates_) {
    const double dx = t.x - q.x;
    const double dy = t.y - q.y;
    if ((dx * dx + dy * dy) / (2.0 * t.y * q.y) > budget) continue;
    best = std::min(best, psi(t.g, t.g_inv, h, h_inv));
  }
  return best < cutoff ? best : std::numeric_limits<double>::infinity();
}

}  // namespace horolab

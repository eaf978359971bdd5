#include "horolab/measures.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "detail/chunked.hpp"
#include "horolab/error.hpp"

namespace horolab {

namespace {

constexpr std::size_t kMinBudget = 1000;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::vector<double> sobol_nodes(std::size_t count) {
  boost::random::sobol engine(3);
  std::vector<double> nodes(3 * count);
  for (double& u : nodes) u = std::ldexp(static_cast<double>(engine()), -64);
  return nodes;
}

// Chart (x, v, theta) in [0,1)^3 -> D_X with weight 1/sqrt(1 - x^2);
// dx dy / y^2 becomes weight * dx dv.
struct ChartPoint {
  IwasawaPoint p;
  double weight;
};

ChartPoint chart(double ux, double uv, double ut) {
  const double x = ux - 0.5;
  const double root = std::sqrt(1.0 - x * x);
  const double inv_y = uv / root;
  const double y = inv_y > 1e-300 ? 1.0 / inv_y : 1e300;
  return {{x, y, (2.0 * ut - 1.0) * kPi}, 1.0 / root};
}

double frac(double v) { return v - std::floor(v); }

Estimate mean_and_error(const std::vector<double>& per_shift) {
  const double n = static_cast<double>(per_shift.size());
  const double mean = std::accumulate(per_shift.begin(), per_shift.end(), 0.0) / n;
  double var = 0.0;
  for (double v : per_shift) var += (v - mean) * (v - mean);
  const double err = per_shift.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  return {mean, err};
}

std::vector<Estimate> integrate_volume(const std::vector<TestFunction>& family, const IntegrationConfig& config,
                                       Estimate* mass) {
  const std::size_t m = family.size();
  const std::vector<double> nodes = sobol_nodes(config.budget);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> per_shift(m);
  std::vector<double> mass_per_shift;
  for (int s = 0; s < config.shifts; ++s) {
    const double sx = unit(rng), sv = unit(rng), st = unit(rng);
    // Layout: [sum w, sum w f_0, ..., sum w f_{m-1}]
    const std::vector<double> sums = detail::chunked_sums(config.budget, m + 1, [&](std::size_t i, double* acc) {
      const ChartPoint cp =
          chart(frac(nodes[3 * i] + sx), frac(nodes[3 * i + 1] + sv), frac(nodes[3 * i + 2] + st));
      acc[0] += cp.weight;
      for (std::size_t k = 0; k < m; ++k) acc[k + 1] += cp.weight * family[k].evaluate_reduced(cp.p);
    });
    for (std::size_t k = 0; k < m; ++k) per_shift[k].push_back(sums[k + 1] / sums[0]);
    mass_per_shift.push_back(2.0 * sums[0] / static_cast<double>(config.budget));
  }
  if (mass != nullptr) *mass = mean_and_error(mass_per_shift);
  std::vector<Estimate> out;
  out.reserve(m);
  for (const auto& v : per_shift) out.push_back(mean_and_error(v));
  return out;
}

std::vector<double> horocycle_means(const std::vector<TestFunction>& family, double height, std::size_t nodes) {
  const std::vector<double> sums = detail::chunked_sums(nodes, family.size(), [&](std::size_t i, double* acc) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(nodes);
    const IwasawaPoint q = reduce_point({x, height, 0.0});
    for (std::size_t k = 0; k < family.size(); ++k) acc[k] += family[k].evaluate_reduced(q);
  });
  std::vector<double> out(sums.size());
  for (std::size_t k = 0; k < sums.size(); ++k) out[k] = sums[k] / static_cast<double>(nodes);
  return out;
}

}  // namespace

TestFunction::TestFunction(Kind kind) : kind_(std::move(kind)) {
  if (const auto* b = std::get_if<Bump>(&kind_)) {
    cloud_ = std::make_shared<const TranslateCloud>(reduce_point(b->center), 3, b->radius);
  } else if (const auto* ball = std::get_if<BallIndicator>(&kind_)) {
    cloud_ = std::make_shared<const TranslateCloud>(reduce_point(ball->center), 3, ball->radius);
  }
}

TestFunction TestFunction::bump(const IwasawaPoint& center, double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::InvalidArgument, "bump radius must be > 0");
  return TestFunction(Bump{center, radius});
}

TestFunction TestFunction::ball(const IwasawaPoint& center, double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::InvalidArgument, "ball radius must be > 0");
  return TestFunction(BallIndicator{center, radius});
}

TestFunction TestFunction::height_above(double y_min) { return TestFunction(HeightIndicator{y_min}); }

TestFunction TestFunction::constant(double value) { return TestFunction(Constant{value}); }

double TestFunction::lipschitz_norm() const {
  return std::visit(Overloaded{
                        [](const Bump& b) { return 1.0 + 1.0 / b.radius; },
                        [](const BallIndicator&) { return kInf; },
                        [](const HeightIndicator&) { return kInf; },
                        [](const Constant& c) { return std::fabs(c.value); },
                    },
                    kind_);
}

bool TestFunction::is_lipschitz() const { return std::isfinite(lipschitz_norm()); }

double TestFunction::evaluate_reduced(const IwasawaPoint& q) const {
  return std::visit(Overloaded{
                        [&](const Bump& b) {
                          const double d = cloud_->distance_to_reduced(q, b.radius);
                          return std::isfinite(d) ? std::max(0.0, 1.0 - d / b.radius) : 0.0;
                        },
                        [&](const BallIndicator& b) {
                          return std::isfinite(cloud_->distance_to_reduced(q, b.radius)) ? 1.0 : 0.0;
                        },
                        [&](const HeightIndicator& h) { return q.y > h.y_min ? 1.0 : 0.0; },
                        [](const Constant& c) { return c.value; },
                    },
                    kind_);
}

double TestFunction::operator()(const IwasawaPoint& p) const { return evaluate_reduced(reduce_point(p)); }

std::vector<Estimate> integrate_family(const std::vector<TestFunction>& family, const AlgebraicMeasure& mu,
                                       const IntegrationConfig& config) {
  if (config.budget < kMinBudget) fail(ErrorCode::BudgetTooSmall, "integration needs at least 1000 nodes");
  require(config.shifts >= 1, ErrorCode::InvalidArgument, "integration needs at least one shift");
  return std::visit(
      Overloaded{
          [&](const VolumeMeasure&) { return integrate_volume(family, config, nullptr); },
          [&](const ClosedHorocycleMeasure& h) {
            require(h.height > 0.0, ErrorCode::InvalidArgument, "horocycle height must be > 0");
            const std::vector<double> fine = horocycle_means(family, h.height, config.budget);
            const std::vector<double> coarse = horocycle_means(family, h.height, config.budget / 2);
            std::vector<Estimate> out;
            for (std::size_t k = 0; k < fine.size(); ++k) out.push_back({fine[k], std::fabs(fine[k] - coarse[k])});
            return out;
          },
          [&](const PeriodicPointsMeasure& pp) {
            require(!pp.points.empty(), ErrorCode::InvalidArgument, "periodic measure needs points");
            std::vector<Estimate> out;
            for (const TestFunction& f : family) {
              double sum = 0.0;
              for (const IwasawaPoint& p : pp.points) sum += f(p);
              out.push_back({sum / static_cast<double>(pp.points.size()), 0.0});
            }
            return out;
          },
      },
      mu);
}

Estimate integrate(const TestFunction& f, const AlgebraicMeasure& mu, const IntegrationConfig& config) {
  return integrate_family({f}, mu, config).front();
}

Estimate volume_total_mass(const IntegrationConfig& config) {
  if (config.budget < kMinBudget) fail(ErrorCode::BudgetTooSmall, "integration needs at least 1000 nodes");
  Estimate mass;
  integrate_volume({}, config, &mass);
  return mass;
}

EmpiricalMeasure empirical_measure(std::vector<IwasawaPoint> reduced_points, double cusp_cutoff) {
  require(!reduced_points.empty(), ErrorCode::EmptyIndexSet, "empirical measure needs at least one point");
  EmpiricalMeasure mu;
  mu.cusp_cutoff = cusp_cutoff;
  const double w = 1.0 / static_cast<double>(reduced_points.size());
  std::size_t escaped = 0;
  for (const IwasawaPoint& p : reduced_points) {
    if (p.y > cusp_cutoff) {
      ++escaped;
      continue;
    }
    mu.points.push_back(p);
  }
  mu.weights.assign(mu.points.size(), w);
  mu.escaped_mass = static_cast<double>(escaped) * w;
  return mu;
}

EmpiricalMeasure empirical_measure(const OrbitSpec& spec, double cusp_cutoff) {
  OrbitBatch batch = orbit_points(spec);
  EmpiricalMeasure mu = empirical_measure(std::move(batch.points), cusp_cutoff);
  mu.low_precision = batch.low_precision;
  return mu;
}

double pair_with(const EmpiricalMeasure& mu, const TestFunction& f) {
  return pair_with_family(mu, {f}).front();
}

std::vector<double> pair_with_family(const EmpiricalMeasure& mu, const std::vector<TestFunction>& family) {
  return detail::chunked_sums(mu.points.size(), family.size(), [&](std::size_t i, double* acc) {
    for (std::size_t k = 0; k < family.size(); ++k) acc[k] += mu.weights[i] * family[k].evaluate_reduced(mu.points[i]);
  });
}

EquidistributionVerdict discrepancy(const EmpiricalMeasure& mu, const AlgebraicMeasure& nu,
                                    const std::vector<TestFunction>& family, double delta,
                                    const IntegrationConfig& config, const std::vector<Estimate>* reference) {
  std::vector<TestFunction> tests;
  std::vector<std::size_t> index;
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].is_lipschitz()) {
      tests.push_back(family[k]);
      index.push_back(k);
    }
  }
  require(!tests.empty(), ErrorCode::InvalidArgument, "discrepancy needs a Lipschitz test family");
  std::vector<Estimate> integrals;
  if (reference != nullptr) {
    require(reference->size() == family.size(), ErrorCode::InvalidArgument, "reference integrals misaligned");
    for (std::size_t k : index) integrals.push_back((*reference)[k]);
  } else {
    integrals = integrate_family(tests, nu, config);
  }
  const std::vector<double> pairs = pair_with_family(mu, tests);

  EquidistributionVerdict v;
  v.delta = delta;
  v.measure = nu;
  double max_lip = 0.0;
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const double lip = tests[k].lipschitz_norm();
    max_lip = std::max(max_lip, lip);
    const double d = std::fabs(pairs[k] - integrals[k].value) / lip;
    if (k == 0 || d > v.max_discrepancy) {
      v.max_discrepancy = d;
      v.worst_index = index[k];
      v.worst_test = tests[k];
    }
  }
  v.pass = v.max_discrepancy < delta * max_lip;
  return v;
}

namespace {

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Inverse of a modulo m in [1, m].
std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  if (m == 1) return 1;
  std::int64_t old_r = mod_floor(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
  }
  if (old_r != 1) fail(ErrorCode::NonInvertible, "residue is not invertible");
  const std::int64_t inv = mod_floor(old_s, m);
  return inv == 0 ? m : inv;
}

void check_progression(std::int64_t A, std::int64_t B, std::int64_t q) {
  require(q >= 1, ErrorCode::InvalidArgument, "modulus q must be >= 1");
  if (std::gcd(std::gcd(A, B), q) != 1) fail(ErrorCode::GcdViolation, "gcd(A, B, q) must be 1");
}

std::int64_t progression_numerator(std::int64_t A, std::int64_t B, std::int64_t q, std::int64_t n) {
  BigInt r = (BigInt(A) + BigInt(B) * n) % q;
  if (r < 0) r += q;
  return r.convert_to<std::int64_t>();
}

}  // namespace

AlgebraicMeasure build_discrete_algebraic(std::int64_t A, std::int64_t B, std::int64_t q, double y,
                                          std::int64_t q2) {
  check_progression(A, B, q);
  require(y > 0.0, ErrorCode::InvalidArgument, "height must be > 0");
  if (q2 != q / std::gcd(B, q)) fail(ErrorCode::GcdViolation, "q2 must be the reduced denominator of B/q");
  PeriodicPointsMeasure m;
  m.points.reserve(static_cast<std::size_t>(q2));
  for (std::int64_t n = 0; n < q2; ++n) {
    const double x = static_cast<double>(progression_numerator(A, B, q, n)) / static_cast<double>(q);
    m.points.push_back(reduce_point({x, y, 0.0}));
  }
  return m;
}

std::vector<PointClass> class_decomposition(std::int64_t A, std::int64_t B, std::int64_t q, double y) {
  check_progression(A, B, q);
  require(y > 0.0, ErrorCode::InvalidArgument, "height must be > 0");
  const std::int64_t q2 = q / std::gcd(B, q);
  std::map<std::int64_t, PointClass> classes;
  for (std::int64_t n = 0; n < q2; ++n) {
    const std::int64_t r = progression_numerator(A, B, q, n);
    const std::int64_t g = std::gcd(r, q);
    const std::int64_t den = q / g;
    const std::int64_t num = r / g;
    PointClass& cls = classes[den];
    cls.denominator = den;
    cls.label = g;
    cls.numerators.push_back(num);
    const std::int64_t inv = inverse_mod(num, den);
    const std::int64_t top_right = (inv * num - 1) / den;  // -inv * (-num) - top_right * den = 1
    const IntegerMatrix lift{-inv, top_right, den, -num};
    cls.moved.push_back(moebius_act(lift, {static_cast<double>(num) / static_cast<double>(den), y, 0.0}));
  }
  std::vector<PointClass> out;
  for (auto& [den, cls] : classes) out.push_back(std::move(cls));
  return out;
}

namespace {

std::vector<IwasawaPoint> grid_centres(double spacing, double y_cap) {
  require(spacing > 0.0 && y_cap > 0.0, ErrorCode::InvalidArgument, "grid spacing and height cap must be > 0");
  std::vector<IwasawaPoint> out;
  const double y0 = std::sqrt(3.0) / 2.0;
  for (int j = 0;; ++j) {
    const double y = y0 * std::exp(j * spacing);
    if (y > y_cap + 1e-12) break;
    for (int k = 0;; ++k) {
      const double x = -0.5 + k * spacing;
      if (x >= 0.5 - 1e-12) break;
      if (x * x + y * y < 1.0 - 1e-12) continue;
      for (int m = 0;; ++m) {
        const double theta = -kPi / 2.0 + m * spacing / 2.0;
        if (theta >= kPi / 2.0 - 1e-12) break;
        out.push_back({x, y, theta});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<TestFunction> standard_test_family(double grid_spacing, double radius, double y_cap) {
  require(grid_spacing <= radius, ErrorCode::InvalidArgument, "grid spacing must not exceed the radius");
  std::vector<TestFunction> out;
  for (const IwasawaPoint& c : grid_centres(grid_spacing, y_cap)) out.push_back(TestFunction::bump(c, radius));
  return out;
}

std::vector<TestFunction> ball_family(double grid_spacing, double radius, double y_cap) {
  std::vector<TestFunction> out;
  for (const IwasawaPoint& c : grid_centres(grid_spacing, y_cap)) out.push_back(TestFunction::ball(c, radius));
  return out;
}

}  // namespace horolab

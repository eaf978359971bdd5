#pragma once

// Algebraic and empirical measures on the modular surface, Lipschitz test
// functions, integration and discrepancy.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "horolab/horoflow.hpp"
#include "horolab/sl2core.hpp"

namespace horolab {

/// Normalized Haar measure on X.
struct VolumeMeasure {};
/// Uniform measure on {h(x) a(height) : x in [0, 1)}.
struct ClosedHorocycleMeasure {
  double height = 1.0;
};
/// Equal weights on finitely many points.
struct PeriodicPointsMeasure {
  std::vector<IwasawaPoint> points;
};
using AlgebraicMeasure = std::variant<VolumeMeasure, ClosedHorocycleMeasure, PeriodicPointsMeasure>;

struct EmpiricalMeasure {
  std::vector<IwasawaPoint> points;  // reduced to D_X
  std::vector<double> weights;
  double escaped_mass = 0.0;         // weight of points above cusp_cutoff
  double cusp_cutoff = 1e3;
  std::size_t low_precision = 0;
};

struct Bump {
  IwasawaPoint center;
  double radius;
};
struct BallIndicator {
  IwasawaPoint center;
  double radius;
};
struct HeightIndicator {
  double y_min;
};
struct Constant {
  double value;
};

/// A test function on X. Bumps are Lipschitz with norm 1 + 1/radius;
/// indicators have infinite norm.
class TestFunction {
 public:
  using Kind = std::variant<Bump, BallIndicator, HeightIndicator, Constant>;

  static TestFunction bump(const IwasawaPoint& center, double radius);
  static TestFunction ball(const IwasawaPoint& center, double radius);
  static TestFunction height_above(double y_min);
  static TestFunction constant(double value);

  const Kind& kind() const { return kind_; }
  double lipschitz_norm() const;
  bool is_lipschitz() const;

  /// Value at a point of D_X.
  double evaluate_reduced(const IwasawaPoint& q) const;
  /// Value at any point (reduced first).
  double operator()(const IwasawaPoint& p) const;

 private:
  explicit TestFunction(Kind kind);

  Kind kind_;
  std::shared_ptr<const TranslateCloud> cloud_;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct IntegrationConfig {
  std::size_t budget = 1 << 16;  // nodes per shift (volume) or quadrature nodes
  int shifts = 8;                // independent random shifts for the error estimate
  std::uint64_t seed = 20240607;
};

/// Throws BudgetTooSmall below 10^3 nodes.
Estimate integrate(const TestFunction& f, const AlgebraicMeasure& mu, const IntegrationConfig& config = {});

/// Integrals of a whole family against one measure, sharing the nodes.
std::vector<Estimate> integrate_family(const std::vector<TestFunction>& family, const AlgebraicMeasure& mu,
                                       const IntegrationConfig& config = {});

/// Unnormalized mass of D_X for dx dy / y^2 dtheta / pi (exactly 2 pi / 3).
Estimate volume_total_mass(const IntegrationConfig& config = {});

/// Equal weights on the reduced orbit points; points above cusp_cutoff move
/// to escaped_mass.
EmpiricalMeasure empirical_measure(const OrbitSpec& spec, double cusp_cutoff = 1e3);
EmpiricalMeasure empirical_measure(std::vector<IwasawaPoint> reduced_points, double cusp_cutoff = 1e3);

/// sum of weight * f; escaped mass contributes 0.
double pair_with(const EmpiricalMeasure& mu, const TestFunction& f);
std::vector<double> pair_with_family(const EmpiricalMeasure& mu, const std::vector<TestFunction>& family);

struct EquidistributionVerdict {
  double delta = 0.0;
  AlgebraicMeasure measure;
  double max_discrepancy = 0.0;  // max |E_mu f - integral f| / Lip(f)
  std::size_t worst_index = 0;
  TestFunction worst_test = TestFunction::constant(0.0);
  bool pass = false;             // max_discrepancy < delta * max Lip(f)
};

/// Skips non-Lipschitz members. `reference` may hold precomputed integrals
/// aligned with the family.
EquidistributionVerdict discrepancy(const EmpiricalMeasure& mu, const AlgebraicMeasure& nu,
                                    const std::vector<TestFunction>& family, double delta,
                                    const IntegrationConfig& config = {},
                                    const std::vector<Estimate>* reference = nullptr);

/// Points ((A + B n)/q mod 1) + i y, n mod q2, reduced to D_X. Throws
/// GcdViolation unless gcd(A, B, q) = 1 and q2 is the reduced denominator of B/q.
AlgebraicMeasure build_discrete_algebraic(std::int64_t A, std::int64_t B, std::int64_t q, double y,
                                          std::int64_t q2);

/// Points of a discrete algebraic measure grouped by the reduced denominator
/// q' of their x-coordinate. Moving a/q' + iy by [[-a^-1, *], [q', -a]] puts
/// the whole class on one horizontal line at height 1/(q'^2 y).
struct PointClass {
  std::int64_t denominator = 1;
  std::int64_t label = 1;                 // q / denominator
  std::vector<std::int64_t> numerators;   // x = numerator / denominator
  std::vector<IwasawaPoint> moved;        // images under the lifting matrices
};
std::vector<PointClass> class_decomposition(std::int64_t A, std::int64_t B, std::int64_t q, double y);

/// Bumps of the given radius centred on a grid of D_X truncated at y_cap:
/// x = -1/2 + k spacing, y = (sqrt 3 / 2) e^{j spacing} with |z| >= 1, and
/// theta stepping by spacing/2 over [-pi/2, pi/2) (bumps are invariant under -I).
std::vector<TestFunction> standard_test_family(double grid_spacing, double radius, double y_cap);

/// Same grid with ball indicators.
std::vector<TestFunction> ball_family(double grid_spacing, double radius, double y_cap);

}  // namespace horolab

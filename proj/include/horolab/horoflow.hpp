#pragma once

// Horocycle flow g -> g h(t) in closed form, horocycle parameters, orbit
// generation on the modular surface and the geometry of a finite piece.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "horolab/sl2core.hpp"

namespace horolab {

/// Geometry of the horocycle through a point with sin(theta) != 0.
struct HorocycleParams {
  double radius;   // R = y / sin^2(theta), the diameter of the circle
  double tangency; // alpha = x - y W, where the circle touches the real line
  double slope;    // W = cot(theta)
  double y;
  double theta;
};

/// Throws DegenerateHorocycle when |sin(theta)| <= 1e-12.
HorocycleParams horocycle_params(const IwasawaPoint& p);

/// Iwasawa coordinates of g h(t).
IwasawaPoint flow_point(const GroupElement& g, double t);
IwasawaPoint flow_point(const IwasawaPoint& p, double t);

enum class FlowMode {
  Discrete,   // times s*n
  Continuous, // midpoint nodes s*(n + 1/2), n < N: a Riemann sum of the length-sN piece
};

struct AllIndices {};                       // 0 <= n < N
struct PrimeIndices {};                     // primes p < N
struct ProgressionIndices {                 // d*n with 1 <= n, d*n <= N
  std::uint64_t modulus = 1;
};
struct AlmostPrimeIndices {                 // n <= N with Omega(n) <= max_factors
  int max_factors = 1;
  bool include_one = false;
};
using IndexSet = std::variant<AllIndices, PrimeIndices, ProgressionIndices, AlmostPrimeIndices>;

struct OrbitSpec {
  GroupElement base;
  double step = 1.0;
  std::uint64_t count = 1;
  FlowMode mode = FlowMode::Discrete;
  IndexSet index_set = AllIndices{};

  double total_time() const { return step * static_cast<double>(count); }
};

/// Throws InvalidArgument for a malformed spec (step <= 0, count == 0,
/// continuous mode with a non-trivial index set).
void validate(const OrbitSpec& spec);

/// Flow indices in increasing order. Throws EmptyIndexSet.
std::vector<std::uint64_t> orbit_indices(const OrbitSpec& spec);

struct OrbitBatch {
  std::vector<std::uint64_t> indices;
  std::vector<IwasawaPoint> points;  // reduced to D_X, aligned with indices
  std::size_t low_precision = 0;     // points whose unreduced height was below 1e-13
};

inline constexpr double kPrecisionFloorHeight = 1e-13;

/// Reduced orbit points in index order. Parallel over index chunks; the
/// output does not depend on the thread count. IterationCap errors carry
/// the offending index.
OrbitBatch orbit_points(const OrbitSpec& spec, const ReduceConfig& config = {});

/// Reduced point for a single flow time.
IwasawaPoint reduced_flow_point(const IwasawaPoint& base, double t, const ReduceConfig& config = {});

/// Y_T: the least height on the piece {g h(t) : 0 <= t <= T}, attained at an end.
double min_height_Y_T(const GroupElement& g, double T);
double min_height_Y_T(const IwasawaPoint& p, double T);

/// Flat parametrization of a piece near its peak: the horocycle is
/// approximated by the curve x(t) = alpha + y W / (1 + sign t / W),
/// y(t) = y / (1 + sign t / W)^2. sign = -1 follows g h(t), sign = +1 follows
/// g h(-t).
class FlatPiece {
 public:
  /// Throws PreconditionViolated when |W| < T/2 and InvalidArgument for
  /// sign not in {-1, +1}.
  FlatPiece(const IwasawaPoint& peak, double T, int sign);

  double x(double t) const;
  double y(double t) const;
  /// |W|^-1 / |1 + sign t / W|
  double error_bound(double t) const;

  const HorocycleParams& params() const { return params_; }
  double length() const { return length_; }
  int sign() const { return sign_; }

 private:
  double scale(double t) const { return 1.0 + sign_ * t / params_.slope; }

  HorocycleParams params_;
  double length_;
  int sign_;
};

FlatPiece piece_flat_parametrization(const IwasawaPoint& peak, double T, int sign);

}  // namespace horolab

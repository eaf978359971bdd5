#pragma once

// Arithmetic in SL(2,R) and SL(2,Z): Iwasawa coordinates, the Moebius action
// on the unit tangent bundle, reduction to the fundamental domain of the
// modular surface, and the matrix-norm surrogate distance.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <limits>
#include <vector>

namespace horolab {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr double kPi = 3.14159265358979323846;

/// A point of SL(2,R). Entries are finite and the determinant is kept at 1.
struct GroupElement {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  /// Validates finiteness and rescales by 1/sqrt(det). Throws InvalidArgument
  /// if an entry is not finite or det <= 0.
  static GroupElement from_entries(double a, double b, double c, double d);
  static GroupElement identity() { return {}; }

  double det() const { return a * d - b * c; }
  GroupElement inverse() const { return {d, -b, -c, a}; }
  GroupElement negated() const { return {-a, -b, -c, -d}; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// h(x): the horocyclic translation [[1, x], [0, 1]].
GroupElement translation(double x);
/// a(y): the diagonal element [[sqrt(y), 0], [0, 1/sqrt(y)]], y > 0.
GroupElement dilation(double y);
/// k(theta): the rotation [[cos, sin], [-sin, cos]].
GroupElement rotation(double theta);

/// Matrix product g*h with the determinant renormalized to 1.
GroupElement compose(const GroupElement& g, const GroupElement& h);

/// Element of SL(2,Z) with exact entries.
struct IntegerMatrix {
  BigInt a{1};
  BigInt b{0};
  BigInt c{0};
  BigInt d{1};

  /// Throws InvalidArgument unless ad - bc == 1.
  static IntegerMatrix from_entries(BigInt a, BigInt b, BigInt c, BigInt d);
  static IntegerMatrix identity() { return {}; }
  /// [[1, n], [0, 1]]
  static IntegerMatrix shift(const BigInt& n);
  /// [[0, 1], [-1, 0]]
  static IntegerMatrix inversion();

  IntegerMatrix inverse() const { return {d, -b, -c, a}; }
  BigInt max_abs_entry() const;
  GroupElement to_group_element() const;

  friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;
};

IntegerMatrix compose(const IntegerMatrix& g, const IntegerMatrix& h);

/// Coordinates of g = h(x) a(y) k(theta); theta is the frame angle in [-pi, pi).
struct IwasawaPoint {
  double x = 0.0;
  double y = 1.0;
  double theta = 0.0;
};

/// Maps an angle into [-pi, pi).
double wrap_angle(double theta);

/// |theta1 - theta2| measured modulo pi (the {+-I} identification).
double angle_gap_mod_pi(double theta1, double theta2);

/// True when p and q agree in x and y to tol and their angles agree mod pi.
bool same_point_psl(const IwasawaPoint& p, const IwasawaPoint& q, double tol);

IwasawaPoint iwasawa_decompose(const GroupElement& g);

/// Throws InvalidArgument for y <= 0 or non-finite coordinates.
GroupElement iwasawa_compose(const IwasawaPoint& p);

/// gamma acting on the left: z -> (az+b)/(cz+d), theta -> theta - arg(cz+d).
/// This is the Iwasawa-angle form of the action, so it agrees exactly with
/// iwasawa_decompose(gamma * iwasawa_compose(p)).
IwasawaPoint moebius_act(const IntegerMatrix& gamma, const IwasawaPoint& p);

struct ReduceConfig {
  int iteration_cap = 10000;
};

struct Reduction {
  IwasawaPoint point;
  IntegerMatrix witness;  // moebius_act(witness, input) == point
  int steps = 0;
};

/// Gauss reduction into D_X = {|Re z| <= 1/2, |z| >= 1}. Throws IterationCap
/// when the input sits below the precision floor.
Reduction reduce_to_domain(const IwasawaPoint& p, const ReduceConfig& config = {});

/// Same reduction without tracking the witness.
IwasawaPoint reduce_point(const IwasawaPoint& p, const ReduceConfig& config = {});

bool in_fundamental_domain(const IwasawaPoint& p, double tol = 1e-9);

/// The fixed matrix norm sqrt(2a^2 + (b+c)^2 + 4c^2 + 2d^2) on 2x2 matrices.
double surrogate_norm(double a, double b, double c, double d);

struct SurrogateDistance {
  double value = 0.0;
};

/// min(|g^-1 h - I|, |h^-1 g - I|) with the fixed norm, minimized over the
/// sign of h so that g and -g are at distance zero.
SurrogateDistance surrogate_dist(const GroupElement& g, const GroupElement& h);

/// All gamma in SL(2,Z) with max |entry| <= max_entry (closed under
/// inversion and negation).
const std::vector<IntegerMatrix>& small_modular_elements(int max_entry);

struct MetricConfig {
  int max_entry = 3;
};

/// Distance on X: both points are reduced to D_X, then the surrogate distance
/// is minimized over gamma-translates with small entries.
double dist_X(const IwasawaPoint& p, const IwasawaPoint& q, const MetricConfig& config = {});

/// Precomputed gamma-translates of a fixed center, used to evaluate dist_X
/// from that center to many points already reduced to D_X.
class TranslateCloud {
 public:
  /// `reach` discards translates that cannot come within that surrogate
  /// distance of D_X; infinity keeps everything.
  explicit TranslateCloud(const IwasawaPoint& center, int max_entry = 3,
                          double reach = std::numeric_limits<double>::infinity());

  const IwasawaPoint& center() const { return center_; }
  std::size_t size() const { return translates_.size(); }

  /// dist_X(center, q) for q in D_X. Returns +infinity when the distance is
  /// at least `cutoff` (only pruned translates are skipped).
  double distance_to_reduced(const IwasawaPoint& q,
                             double cutoff = std::numeric_limits<double>::infinity()) const;

 private:
  struct Translate {
    GroupElement g;
    GroupElement g_inv;
    double x;
    double y;
  };

  IwasawaPoint center_;
  std::vector<Translate> translates_;
};

}  // namespace horolab

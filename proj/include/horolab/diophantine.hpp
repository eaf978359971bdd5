#pragma once

// Nearest-integer arithmetic, rational approximation, Farey arcs, the
// fundamental period of a horocycle piece and the Dani-type condition
// checkers for continuous and discrete orbits.

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "horolab/sl2core.hpp"

namespace horolab {

/// alpha = integral + fractional with integral the nearest integer
/// (ties to even), fractional in [-1/2, 1/2] and norm = |fractional|.
struct TorusValue {
  std::int64_t integral = 0;
  double fractional = 0.0;
  double norm = 0.0;
};

TorusValue torus_parts(double alpha);

/// Distance from alpha to the nearest integer.
double torus_norm(double alpha);

struct Convergent {
  BigInt p;
  BigInt q;
};

/// Convergents of the exact continued fraction of the double alpha, at most
/// `depth` of them; stops early when the expansion terminates.
std::vector<Convergent> continued_fraction(double alpha, int depth);

/// Least m >= 1 with ||m alpha|| <= 1/U (U > 1), found among convergent
/// denominators and confirmed by a bounded scan.
std::uint64_t kappa_U(double alpha, double U);

/// Reference implementation: scan m = 1, 2, ...
std::uint64_t kappa_U_brute_force(double alpha, double U);

using Fraction = boost::rational<std::int64_t>;

/// Arc of the Farey dissection of order K around a/q: from the mediant with
/// the left neighbour to the mediant with the right neighbour.
struct FareyArc {
  std::int64_t a = 0;
  std::int64_t q = 1;
  Fraction left;
  Fraction right;

  Fraction length() const { return right - left; }
};

/// Dissection of [0, 1) by the Farey fractions of order K, 0/1 and 1/1
/// included as the two half arcs at the ends. Count: 1 + sum_{q <= K} phi(q).
std::vector<FareyArc> farey_arcs(int K);

/// Consecutive arcs share endpoints, the first starts at 0 and the last ends at 1.
bool is_exact_partition(const std::vector<FareyArc>& arcs);

/// Approximation of y_T:
/// min(y, R/T^2) + T^-1 min(U/kappa, U^-1/||kappa alpha||)^2 with U = sqrt(T/R).
/// g is reduced to D_X first. A horizontal horocycle returns y.
double fundamental_period_formula(const GroupElement& g, double T);

enum class Endpoint { Start, End };

struct PeriodReport {
  double y_T = 0.0;
  IntegerMatrix gamma;             // achieving translate
  Endpoint endpoint = Endpoint::Start;
  IwasawaPoint peak;               // lower end of gamma g h([0, T]), x in (-1/2, 1/2]
  std::optional<double> alpha_T;   // absent when the peak is horizontal
  std::optional<double> W_T;
};

/// Maximizes min_height_Y_T(gamma g, T) over gamma with entries bounded by
/// entry_bound (after a preliminary integer translation of g).
PeriodReport fundamental_period_oracle(const GroupElement& g, double T, int entry_bound);

/// Exponents substituted for the unspecified O(1) powers.
struct ExponentConfig {
  double q_exponent = 2.0;      // range of the denominator search
  double bound_exponent = 2.0;  // size of the inequality bound
};

struct DaniSearchConfig {
  int gamma_entry_bound = 20;       // bottom rows (c, d) tried for the discrete check
  std::uint64_t q_cap = 100000;     // hard limit on scanned denominators
  bool evaluate_condition_i = true; // also evaluate the (q, gamma) form
};

enum class DaniKind { Continuous, Discrete };

struct DaniConditionVerdict {
  DaniKind kind = DaniKind::Continuous;
  bool satisfied = false;
  std::optional<std::uint64_t> witness_q;
  std::optional<IntegerMatrix> witness_gamma;
  ExponentConfig exponents;
  // Quantities needed to re-check the witness.
  double lhs = 0.0;
  double rhs = 0.0;
  std::optional<IwasawaPoint> witness_point;  // gamma g0 in the discrete case
  std::optional<std::uint64_t> q2;            // reduced denominator attached to the witness
  std::optional<bool> condition_i;            // discrete: the alternative form
  std::optional<bool> forms_agree;
  bool base_within_bound = true;              // entries of g0 bounded by 1/delta
  std::string note;
};

/// Searches q <= delta^-C1 with ||q alpha|| < delta^-C2 / T.
DaniConditionVerdict dani_condition_continuous(const GroupElement& g0, double T, double delta,
                                               const ExponentConfig& exponents = {});

/// Condition on a translate (x, y, theta) of g0 and q' near y^-1/2:
/// ||q' x|| + N ||q' s y|| + (sN)^2 q' |theta| y < y^1/2 M, M = (tau(q2') / delta)^C.
/// Throws PreconditionViolated when s <= 1/(delta N).
DaniConditionVerdict dani_condition_discrete(const GroupElement& g0, double s, std::uint64_t N,
                                             double delta, const ExponentConfig& exponents = {},
                                             const DaniSearchConfig& search = {});

/// Re-evaluates the stored witness inequalities from scratch.
bool verify_witness(const DaniConditionVerdict& verdict, const GroupElement& g0, double T_or_s,
                    std::uint64_t N, double delta);

}  // namespace horolab

#include <doctest.h>

#include <cmath>
#include <random>

#include "horolab/diophantine.hpp"
#include "horolab/heckelab.hpp"
#include "horolab/horoflow.hpp"
#include "horolab/measures.hpp"
#include "horolab/parallel.hpp"
#include "horolab/sieve.hpp"
#include "support.hpp"

using namespace horolab;

namespace {

IntegerMatrix random_small(std::mt19937_64& rng, int max_entry) {
  const auto& elems = small_modular_elements(max_entry);
  std::uniform_int_distribution<std::size_t> u(0, elems.size() - 1);
  return elems[u(rng)];
}

IntegrationConfig quick() {
  IntegrationConfig c;
  c.budget = 1 << 14;
  return c;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("Iwasawa roundtrip") {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const GroupElement g = oracle::random_group_element(rng);
      const GroupElement back = iwasawa_compose(iwasawa_decompose(g));
      const oracle::Mat m = oracle::of(g);
      worst = std::max(worst, oracle::pm_distance(oracle::of(back), m) / static_cast<double>(oracle::scale(m)));
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("Moebius action is a homomorphism and matches matrix products") {
    std::mt19937_64 rng(102);
    for (int i = 0; i < 2000; ++i) {
      const IntegerMatrix g1 = random_small(rng, 3), g2 = random_small(rng, 3);
      const IwasawaPoint p = iwasawa_decompose(oracle::random_group_element(rng));
      const IwasawaPoint lhs = moebius_act(compose(g1, g2), p);
      const IwasawaPoint rhs = moebius_act(g1, moebius_act(g2, p));
      CHECK(oracle::local_gap(lhs, rhs) <= 1e-8);
      const IwasawaPoint moved = moebius_act(g1, p);
      const oracle::Mat prod = oracle::mul(oracle::of(g1.to_group_element()), oracle::iwasawa_matrix(p.x, p.y, p.theta));
      const oracle::Mat act = oracle::iwasawa_matrix(moved.x, moved.y, moved.theta);
      CHECK(oracle::pm_distance(act, prod) / static_cast<double>(oracle::scale(prod)) <= 1e-8);
    }
  }

  TEST_CASE("reduction lands in D_X with a valid witness") {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> ux(-50.0, 50.0), ul(std::log(1e-6), std::log(1e3)), ut(-kPi, kPi);
    for (int i = 0; i < 2000; ++i) {
      const IwasawaPoint p{ux(rng), std::exp(ul(rng)), ut(rng)};
      const Reduction r = reduce_to_domain(p);
      CHECK(in_fundamental_domain(r.point));
      CHECK(r.witness.a * r.witness.d - r.witness.b * r.witness.c == 1);
      CHECK(oracle::local_gap(moebius_act(r.witness, p), r.point) <= 1e-7);
    }
  }

  TEST_CASE("surrogate distance is symmetric and vanishes on sign pairs") {
    std::mt19937_64 rng(104);
    for (int i = 0; i < 1000; ++i) {
      const GroupElement g = oracle::random_group_element(rng), h = oracle::random_group_element(rng);
      CHECK(surrogate_dist(g, h).value == doctest::Approx(surrogate_dist(h, g).value).epsilon(1e-12));
      CHECK(surrogate_dist(g, g.negated()).value == 0.0);
      CHECK(surrogate_dist(g, h).value > 0.0);
    }
  }

  TEST_CASE("flow is a group action and matches the matrix product") {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> ut(-1e6, 1e6), us(-1e3, 1e3);
    for (int i = 0; i < 10000; ++i) {
      const IwasawaPoint p = oracle::random_domain_point(rng);
      const double t1 = ut(rng), t2 = ut(rng);
      const IwasawaPoint once = flow_point(p, t1 + t2);
      const IwasawaPoint twice = flow_point(flow_point(p, t1), t2);
      // Compared as group elements: in local height units the rounding of x at
      // y ~ 1/t^2 is amplified by t^2, so the relative matrix error is the measure.
      const oracle::Mat m_once = oracle::iwasawa_matrix(once.x, once.y, once.theta);
      const oracle::Mat m_twice = oracle::iwasawa_matrix(twice.x, twice.y, twice.theta);
      CHECK(oracle::pm_distance(m_once, m_twice) / static_cast<double>(oracle::scale(m_once)) <= 1e-8);

      const double t = us(rng);
      const IwasawaPoint q = flow_point(p, t);
      const oracle::Mat expected =
          oracle::mul(oracle::iwasawa_matrix(p.x, p.y, p.theta), {1, static_cast<long double>(t), 0, 1});
      const oracle::Mat got = oracle::iwasawa_matrix(q.x, q.y, q.theta);
      CHECK(oracle::pm_distance(got, expected) / static_cast<double>(oracle::scale(expected)) <= 1e-8);
    }
  }

  TEST_CASE("Y_T sandwich on a small sample") {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> ul(std::log(5.0), std::log(1e4));
    for (int i = 0; i < 300; ++i) {
      const IwasawaPoint p = oracle::random_domain_point(rng);
      if (std::fabs(std::sin(p.theta)) < 1e-9) continue;
      const double T = std::exp(ul(rng));
      const HorocycleParams h = horocycle_params(p);
      const double ratio = min_height_Y_T(p, T) / std::min(p.y, h.radius / (T * T));
      CHECK(ratio >= 1.0 / 8);
      CHECK(ratio <= 8.0);
    }
  }

  TEST_CASE("orbit points are Gamma-invariant and independent of the thread count") {
    std::mt19937_64 rng(107);
    OrbitSpec spec;
    spec.base = iwasawa_compose({0.17, 0.9, 1.3});
    spec.step = 0.7;
    spec.count = 500;
    const OrbitBatch ref = orbit_points(spec);
    for (int k = 0; k < 5; ++k) {
      OrbitSpec moved = spec;
      moved.base = compose(random_small(rng, 3).to_group_element(), spec.base);
      const OrbitBatch b = orbit_points(moved);
      for (std::size_t i = 0; i < ref.points.size(); ++i) CHECK(dist_X(ref.points[i], b.points[i]) <= 1e-7);
    }
    set_thread_limit(1);
    const OrbitBatch serial = orbit_points(spec);
    set_thread_limit(0);
    for (std::size_t i = 0; i < ref.points.size(); ++i) {
      CHECK(serial.points[i].x == ref.points[i].x);
      CHECK(serial.points[i].y == ref.points[i].y);
      CHECK(serial.points[i].theta == ref.points[i].theta);
    }
  }

  TEST_CASE("pairing is Gamma-invariant") {
    std::mt19937_64 rng(108);
    const std::vector<TestFunction> family = standard_test_family(0.5, 0.5, 2.0);
    OrbitSpec spec;
    spec.base = iwasawa_compose({0.31, 0.8, 0.4});
    spec.count = 2000;
    const std::vector<double> ref = pair_with_family(empirical_measure(spec), family);
    OrbitSpec moved = spec;
    moved.base = compose(random_small(rng, 3).to_group_element(), spec.base);
    const std::vector<double> got = pair_with_family(empirical_measure(moved), family);
    for (std::size_t k = 0; k < family.size(); ++k) CHECK(std::fabs(ref[k] - got[k]) <= 1e-7);
  }

  TEST_CASE("witness re-verification") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> ua(0.0, 1.0), ul(std::log(10.0), std::log(1e6));
    int satisfied = 0;
    for (int i = 0; i < 200; ++i) {
      // Rational and irrational tangency points alike.
      const double alpha = i % 2 == 0 ? std::floor(ua(rng) * 20) / 20 : ua(rng);
      const GroupElement g = iwasawa_compose({alpha, 1.0, kPi / 2});
      const double T = std::exp(ul(rng));
      const DaniConditionVerdict v = dani_condition_continuous(g, T, 0.1);
      if (v.satisfied) {
        ++satisfied;
        CHECK(verify_witness(v, g, T, 0, 0.1));
      }
    }
    CHECK(satisfied > 0);
    for (std::uint64_t N : {200u, 1000u, 5000u}) {
      const DaniConditionVerdict v = dani_condition_discrete(hecke_base(N), 1.0, N, 0.1);
      REQUIRE(v.satisfied);
      CHECK(verify_witness(v, hecke_base(N), 1.0, N, 0.1));
    }
  }

  TEST_CASE("Hecke discrepancy refines with N") {
    const std::vector<TestFunction> family = standard_test_family(0.5, 0.5, 2.0);
    const std::vector<Estimate> reference = integrate_family(family, VolumeMeasure{});
    double previous = INFINITY;
    for (std::uint64_t N : {1000u, 10000u, 100000u}) {
      OrbitSpec spec;
      spec.base = hecke_base(N);
      spec.count = N;
      const EquidistributionVerdict v =
          discrepancy(empirical_measure(spec), VolumeMeasure{}, family, 0.05, {}, &reference);
      CHECK(v.max_discrepancy <= 1.1 * previous);
      previous = v.max_discrepancy;
    }
    CHECK(previous < 0.05);
  }

  TEST_CASE("generic orbits keep little mass in the cusp") {
    OrbitSpec spec;
    spec.base = iwasawa_compose({std::sqrt(2.0) - 1, 1.0, kPi / 2});
    spec.count = 1000000;
    const EmpiricalMeasure mu = empirical_measure(spec, 1e3);
    CHECK(mu.escaped_mass < 0.05);
  }

  TEST_CASE("divisor functions against divisor enumeration up to 10^4") {
    const auto tau = [](std::uint64_t n) {
      std::uint64_t k = 0;
      for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) k += d * d == n ? 1 : 2;
      }
      return k;
    };
    for (std::uint64_t n = 1; n <= 10000; ++n) {
      CHECK(divisor_tau(n) == tau(n));
      std::uint64_t t3 = 0;
      for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        t3 += tau(n / d);
        if (d * d != n) t3 += tau(d);
      }
      CHECK(divisor_tau3(n) == t3);
    }
  }

  TEST_CASE("type I sums ignore the constant part") {
    const TestFunction bump = TestFunction::bump({0.0, 1.2, 0.0}, 0.5);
    const double mean = integrate(bump, VolumeMeasure{}, quick()).value;
    const double v = type1_sum(bump, mean, 20000, 30);
    CHECK(std::isfinite(v));
    for (double c : {0.1, 1.0, 7.0}) CHECK(std::fabs(type1_sum(TestFunction::constant(c), c, 20000, 30)) < 1e-9);
  }
}

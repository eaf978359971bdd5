#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "horolab/sl2core.hpp"
#include "support.hpp"

using namespace horolab;

namespace {

void check_matrix(const GroupElement& g, double a, double b, double c, double d, double tol = 1e-12) {
  CHECK(g.a == doctest::Approx(a).epsilon(tol));
  CHECK(g.b == doctest::Approx(b).epsilon(tol));
  CHECK(g.c == doctest::Approx(c).epsilon(tol));
  CHECK(g.d == doctest::Approx(d).epsilon(tol));
}

bool integer_matrix_is(const IntegerMatrix& m, int a, int b, int c, int d) {
  return m.a == a && m.b == b && m.c == c && m.d == d;
}

}  // namespace

TEST_SUITE("sl2core") {
  TEST_CASE("compose matches hand products") {
    const GroupElement g = GroupElement::from_entries(2.0, 3.0, 1.0, 2.0);
    CHECK(oracle::pm_distance(oracle::of(compose(GroupElement::identity(), g)), oracle::of(g)) < 1e-15);
    const GroupElement h3 = compose(translation(1.0), translation(2.0));
    check_matrix(h3, 1.0, 3.0, 0.0, 1.0);
    // [[2, 0], [0, 1/2]] [[1, 1], [0, 1]] = [[2, 2], [0, 1/2]]
    check_matrix(compose(dilation(4.0), translation(1.0)), 2.0, 2.0, 0.0, 0.5);
  }

  TEST_CASE("from_entries renormalizes and rejects bad input") {
    const GroupElement g = GroupElement::from_entries(2.0, 0.0, 0.0, 2.0);
    CHECK(g.det() == doctest::Approx(1.0));
    check_matrix(g, 1.0, 0.0, 0.0, 1.0);
    CHECK(oracle::error_of([] { GroupElement::from_entries(0.0, 1.0, 1.0, 0.0); }) == ErrorCode::InvalidArgument);
    CHECK(oracle::error_of([] { GroupElement::from_entries(NAN, 1.0, 0.0, 1.0); }) == ErrorCode::InvalidArgument);
    CHECK(oracle::error_of([] { IntegerMatrix::from_entries(1, 1, 1, 1); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("iwasawa_decompose examples") {
    const IwasawaPoint id = iwasawa_decompose(GroupElement::identity());
    CHECK(id.x == doctest::Approx(0.0));
    CHECK(id.y == doctest::Approx(1.0));
    CHECK(std::fabs(id.theta) < 1e-15);

    const IwasawaPoint p = iwasawa_decompose(compose(translation(3.0), dilation(2.0)));
    CHECK(p.x == doctest::Approx(3.0));
    CHECK(p.y == doctest::Approx(2.0));
    CHECK(std::fabs(p.theta) < 1e-15);

    // [[0, 1], [-1, 0]]: -y^-1/2 sin = -1 and y^-1/2 cos = 0 give y = 1, theta = pi/2 mod pi.
    const IwasawaPoint s = iwasawa_decompose(IntegerMatrix::inversion().to_group_element());
    CHECK(s.x == doctest::Approx(0.0));
    CHECK(s.y == doctest::Approx(1.0));
    CHECK(angle_gap_mod_pi(s.theta, -kPi / 2) < 1e-15);
  }

  TEST_CASE("iwasawa_compose examples") {
    check_matrix(iwasawa_compose({0.0, 1.0, 0.0}), 1, 0, 0, 1);
    const double x = 0.7, y = 3.0;
    check_matrix(iwasawa_compose({x, y, 0.0}), std::sqrt(y), x / std::sqrt(y), 0.0, 1.0 / std::sqrt(y));
    const GroupElement k = iwasawa_compose({0.0, 1.0, kPi / 2});
    CHECK(oracle::pm_distance(oracle::of(k), {0, 1, -1, 0}) < 1e-15);
    CHECK(oracle::error_of([] { iwasawa_compose({0.0, 0.0, 0.0}); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("moebius_act examples") {
    const IwasawaPoint p{0.3, 0.8, 1.1};
    const IwasawaPoint same = moebius_act(IntegerMatrix::identity(), p);
    CHECK(oracle::local_gap(same, p) < 1e-15);

    const IwasawaPoint t = moebius_act(IntegerMatrix::shift(1), {0.0, 1.0, 0.0});
    CHECK(t.x == doctest::Approx(1.0));
    CHECK(t.y == doctest::Approx(1.0));
    CHECK(std::fabs(t.theta) < 1e-15);

    // S a(1/4) = [[0, 2], [-1/2, 0]] = a(4) k(pi/2): the Iwasawa-angle convention.
    const IwasawaPoint s = moebius_act(IntegerMatrix::inversion(), {0.0, 0.25, 0.0});
    CHECK(std::fabs(s.x) < 1e-15);
    CHECK(s.y == doctest::Approx(4.0));
    CHECK(s.theta == doctest::Approx(kPi / 2));
    const oracle::Mat lhs = oracle::mul({0, 1, -1, 0}, oracle::iwasawa_matrix(0, 0.25L, 0));
    CHECK(oracle::pm_distance(lhs, oracle::iwasawa_matrix(s.x, s.y, s.theta)) < 1e-15);
  }

  TEST_CASE("reduce_to_domain examples") {
    const IwasawaPoint inside{0.1, 1.5, 0.4};
    const Reduction r0 = reduce_to_domain(inside);
    CHECK(oracle::local_gap(r0.point, inside) < 1e-15);
    CHECK(r0.witness == IntegerMatrix::identity());

    const Reduction r1 = reduce_to_domain({5.3, 2.0, 0.0});
    CHECK(r1.point.x == doctest::Approx(0.3));
    CHECK(r1.point.y == doctest::Approx(2.0));
    CHECK(integer_matrix_is(r1.witness, 1, -5, 0, 1));

    const Reduction r2 = reduce_to_domain({0.0, 0.25, 0.0});
    CHECK(std::fabs(r2.point.x) < 1e-15);
    CHECK(r2.point.y == doctest::Approx(4.0));
    const bool is_s = integer_matrix_is(r2.witness, 0, 1, -1, 0) || integer_matrix_is(r2.witness, 0, -1, 1, 0);
    CHECK(is_s);
  }

  TEST_CASE("reduction below the precision floor hits the iteration cap") {
    ReduceConfig tiny;
    tiny.iteration_cap = 3;
    CHECK(oracle::error_of([&] { reduce_to_domain({0.3819660112501051, 1e-9, 0.0}, tiny); }) ==
          ErrorCode::IterationCap);
  }

  TEST_CASE("surrogate distance examples") {
    const GroupElement g = GroupElement::from_entries(1.5, 0.2, -0.7, 0.4);
    CHECK(surrogate_dist(g, g).value == 0.0);
    CHECK(surrogate_dist(g, g.negated()).value == 0.0);
    const double eps = 1e-3;
    // h(eps) - I = [[0, eps], [0, 0]]: only the (b + c)^2 term survives.
    CHECK(surrogate_dist(GroupElement::identity(), translation(eps)).value == doctest::Approx(eps).epsilon(1e-9));
    CHECK(surrogate_norm(1, 0, 0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(surrogate_norm(0, 0, 1, 0) == doctest::Approx(std::sqrt(5.0)));
  }

  TEST_CASE("dist_X is Gamma-invariant on small translates") {
    const IwasawaPoint p{0.21, 0.37, 0.9};
    for (const IntegerMatrix& gamma : small_modular_elements(2)) {
      CHECK(dist_X(p, moebius_act(gamma, p)) < 1e-9);
    }
  }

  TEST_CASE("small_modular_elements is closed under inversion and negation") {
    const auto& elems = small_modular_elements(3);
    // Independent count of (a, b, c, d) in [-3, 3]^4 with ad - bc = 1.
    int expected = 0;
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b)
        for (int c = -3; c <= 3; ++c)
          for (int d = -3; d <= 3; ++d) expected += a * d - b * c == 1;
    CHECK(elems.size() == static_cast<std::size_t>(expected));
    for (const IntegerMatrix& m : elems) {
      CHECK(std::find(elems.begin(), elems.end(), m.inverse()) != elems.end());
      const IntegerMatrix neg{-m.a, -m.b, -m.c, -m.d};
      CHECK(std::find(elems.begin(), elems.end(), neg) != elems.end());
    }
  }

  TEST_CASE("TranslateCloud agrees with dist_X") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.0, 1.0), ut(-kPi, kPi);
    const IwasawaPoint center = reduce_point({0.1, 1.3, 0.2});
    const TranslateCloud full(center);
    const TranslateCloud pruned(center, 3, 0.5);
    for (int i = 0; i < 200; ++i) {
      const double x = ux(rng);
      const IwasawaPoint q = reduce_point({x, std::sqrt(1 - x * x) * std::exp(2.0 * uy(rng)), ut(rng)});
      const double d = dist_X(center, q);
      CHECK(full.distance_to_reduced(q) == doctest::Approx(d).epsilon(1e-12));
      const double dp = pruned.distance_to_reduced(q, 0.5);
      if (d < 0.5) {
        CHECK(dp == doctest::Approx(d).epsilon(1e-12));
      } else {
        CHECK(dp >= 0.5);
      }
    }
  }

  TEST_CASE("wrap_angle and angle_gap_mod_pi") {
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(angle_gap_mod_pi(0.1, 0.1 + kPi) < 1e-12);
    CHECK(angle_gap_mod_pi(0.0, kPi / 2) == doctest::Approx(kPi / 2));
  }
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "permcorr/error.hpp"
#include "permcorr/moments.hpp"
#include "permcorr/oracle.hpp"
#include "test_support.hpp"

using namespace permcorr;

namespace {

MomentEngine engine_for(const Dataset& d, int order) {
  return MomentEngine(central_moments(d.x, std::max(order, 2)),
                      central_moments(d.y, std::max(order, 2)));
}

// order-4 closed form with the cross term of the two-part layer scaled by
// 1/n^3 instead of 1/n^5; kept here to document that this variant fails the
// enumeration oracle (the brackets themselves are O(n^2))
double closed_k4_unscaled_cross_term(const Dataset& d) {
  const CentralMoments mx = central_moments(d.x, 4);
  const CentralMoments my = central_moments(d.y, 4);
  const double n = static_cast<double>(mx.n);
  const double chi4 = mx.moment(4), nu4 = my.moment(4);
  const double sx4 = mx.moment(2) * mx.moment(2), sy4 = my.moment(2) * my.moment(2);
  double total = chi4 * nu4 / (n * n * n);
  total += (4.0 * chi4 * nu4 +
            3.0 * (n * n * sx4 - n * chi4) * (n * n * sy4 - n * nu4)) /
           (n * n * n * (n - 1.0));
  const double cx = 2.0 * n * chi4 - n * n * sx4;
  const double cy = 2.0 * n * nu4 - n * n * sy4;
  if (mx.n >= 3) total += 6.0 * cx * cy / (std::pow(n, 5) * (n - 1.0) * (n - 2.0));
  if (mx.n >= 4) total += 9.0 * cx * cy / (std::pow(n, 5) * (n - 1.0) * (n - 2.0) * (n - 3.0));
  return total / (sx4 * sy4);
}

}  // namespace

TEST_SUITE_BEGIN("moments");

TEST_CASE("first moment vanishes, second is 1/(n-1)") {
  SplitMix64 rng(31);
  for (std::size_t n : {2u, 3u, 7u, 20u, 50u}) {
    const Dataset d = testing::uniform_dataset(n, rng);
    auto engine = engine_for(d, 5);
    CHECK(std::abs(engine.inductive(1)) <= 1e-14);
    CHECK(engine.closed(1) == 0.0);
    const double expected = 1.0 / (static_cast<double>(n) - 1.0);
    CHECK(std::abs(engine.inductive(2) - expected) <= 1e-12);
    CHECK(engine.closed(2) == doctest::Approx(expected));
  }
}

TEST_CASE("fourth moment of x=y=(1,2,3)") {
  const Dataset d{{1, 2, 3}, {1, 2, 3}};
  // six permutations give rho in {1, .5, .5, -.5, -.5, -1}; mean of rho^4 is 0.375
  auto engine = engine_for(d, 4);
  CHECK(engine.inductive(4) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("closed forms: symmetric data kills the third moment") {
  const Dataset d{{1, 2, 3, 4}, {2, 4, 6, 9}};
  auto engine = engine_for(d, 3);
  CHECK(engine.closed(3) == doctest::Approx(0.0).epsilon(1e-14));  // chi_3 of x is 0
}

TEST_CASE("closed third moment matches enumeration on skewed data") {
  const Dataset d{{0, 0, 0, 4}, {0, 0, 0, 4}};
  auto engine = engine_for(d, 3);
  const MomentVector oracle = oracle_moments_exact(d, 3);
  CHECK(engine.closed(3) == doctest::Approx(oracle.values[3]).epsilon(1e-12));
  CHECK(engine.inductive(3) == doctest::Approx(oracle.values[3]).epsilon(1e-12));
}

TEST_CASE("closed and inductive agree for k = 1..5") {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + rng.below(48);
    const Dataset d = testing::uniform_dataset(n, rng);
    auto engine = engine_for(d, 5);
    for (int k = 1; k <= 5; ++k) {
      const double a = engine.closed(k);
      const double b = engine.inductive(k);
      CHECK_MESSAGE(testing::close(a, b, 1e-10, 1e-12), "n=", n, " k=", k, " closed=", a,
                    " inductive=", b);
    }
  }
}

TEST_CASE("inductive matches full enumeration up to k = 8") {
  SplitMix64 rng(33);
  for (std::size_t n : {3u, 4u, 5u, 6u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const Dataset d = testing::uniform_dataset(n, rng);
      auto engine = engine_for(d, 8);
      const MomentVector oracle = oracle_moments_exact(d, 8);
      for (int k = 1; k <= 8; ++k) {
        const double a = engine.inductive(k);
        const double b = oracle.values[static_cast<std::size_t>(k)];
        const double floor = std::abs(b) < 1e-6 ? 1e-12 : 0.0;
        CHECK_MESSAGE(testing::close(a, b, 1e-10, floor), "n=", n, " k=", k, " inductive=", a,
                      " oracle=", b);
      }
    }
  }
}

TEST_CASE("truncation: n = 3 with K = 5 still matches the oracle") {
  SplitMix64 rng(34);
  const Dataset d = testing::uniform_dataset(3, rng);
  auto engine = engine_for(d, 5);
  const MomentVector oracle = oracle_moments_exact(d, 5);
  for (int k = 1; k <= 5; ++k) {
    CHECK(testing::close(engine.inductive(k), oracle.values[static_cast<std::size_t>(k)],
                         1e-10, 1e-12));
    CHECK(testing::close(engine.closed(k), oracle.values[static_cast<std::size_t>(k)],
                         1e-10, 1e-12));
  }
}

TEST_CASE("order-4 cross-term scaling is the one the oracle confirms") {
  SplitMix64 rng(35);
  const Dataset d = testing::uniform_dataset(6, rng);
  const MomentVector oracle = oracle_moments_exact(d, 4);
  auto engine = engine_for(d, 4);
  const double shipped = engine.closed(4);
  const double unscaled = closed_k4_unscaled_cross_term(d);
  CHECK(testing::close(shipped, oracle.values[4], 1e-10, 0.0));
  // the 1/n^3 variant overshoots by roughly n^2 on the cross term: >100% off
  CHECK(std::abs(unscaled - oracle.values[4]) > std::abs(oracle.values[4]));
}

TEST_CASE("third moment collapses to chi3 nu3 / (sx^3 sy^3 (n-1)(n-2))") {
  SplitMix64 rng(36);
  for (std::size_t n : {3u, 5u, 9u, 30u}) {
    const Dataset d = testing::uniform_dataset(n, rng);
    const CentralMoments mx = central_moments(d.x, 3);
    const CentralMoments my = central_moments(d.y, 3);
    const double collapsed = mx.moment(3) * my.moment(3) /
                             (std::pow(mx.sigma(), 3) * std::pow(my.sigma(), 3) *
                              (static_cast<double>(n) - 1.0) * (static_cast<double>(n) - 2.0));
    const double closed = exact_moment_closed(mx, my, 3);
    CHECK(testing::close(closed, collapsed, 1e-10, 1e-15));
  }
}

TEST_CASE("moment_vector metadata and invariants") {
  SplitMix64 rng(37);
  const Dataset d = testing::uniform_dataset(9, rng);
  const MomentVector mv = moment_vector(d, 8, Mode::pearson);
  CHECK(mv.values[0] == 1.0);
  CHECK(mv.method_per_k[3] == MomentMethod::closed_form);
  CHECK(mv.method_per_k[5] == MomentMethod::closed_form);
  CHECK(mv.method_per_k[6] == MomentMethod::inductive);
  for (int k = 0; k <= 8; ++k) {
    const double v = mv.values[static_cast<std::size_t>(k)];
    CHECK(std::abs(v) <= 1.0 + 1e-12);
    if (k % 2 == 0) CHECK(v >= -1e-14);
  }
  CHECK(std::abs(mv.values[2] * (static_cast<double>(d.size()) - 1.0) - 1.0) <= 1e-12);
}

TEST_CASE("moment_vector scale invariance and odd sign flip") {
  SplitMix64 rng(38);
  const Dataset d = testing::uniform_dataset(10, rng);
  const MomentVector base = moment_vector(d, 7, Mode::pearson);

  Dataset scaled = d;
  for (auto& v : scaled.x) v = 3.5 * v + 1.25;
  for (auto& v : scaled.y) v = 0.2 * v - 7.0;
  const MomentVector rescaled = moment_vector(scaled, 7, Mode::pearson);

  Dataset flipped = d;
  for (auto& v : flipped.x) v = -v;
  const MomentVector negated = moment_vector(flipped, 7, Mode::pearson);

  for (int k = 0; k <= 7; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    CHECK(testing::close(rescaled.values[idx], base.values[idx], 1e-12, 1e-12));
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    CHECK(testing::close(negated.values[idx], sign * base.values[idx], 1e-12, 1e-12));
  }
}

TEST_CASE("spearman moments depend on n alone") {
  SplitMix64 rng(39);
  const Dataset a = testing::uniform_dataset(12, rng);
  const Dataset b = testing::uniform_dataset(12, rng);
  REQUIRE(!has_ties(a.x));
  REQUIRE(!has_ties(b.y));
  const MomentVector va = moment_vector(a, 8, Mode::spearman);
  const MomentVector vb = moment_vector(b, 8, Mode::spearman);
  for (std::size_t k = 0; k <= 8; ++k) CHECK(va.values[k] == vb.values[k]);
}

TEST_CASE("spearman hand values at n = 3") {
  const Dataset d{{10, 30, 20}, {4, 9, 1}};
  const MomentVector mv = moment_vector(d, 3, Mode::spearman);
  CHECK(mv.values[0] == 1.0);
  CHECK(std::abs(mv.values[1]) <= 1e-14);
  CHECK(mv.values[2] == doctest::Approx(0.5).epsilon(1e-12));
  // ranks (1,2,3) have zero third central moment
  CHECK(mv.values[3] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("moment_vector validation") {
  const Dataset d{{1, 2, 3}, {1, 3, 2}};
  CHECK_THROWS_AS(moment_vector(d, 0, Mode::pearson), Error);
  CHECK_THROWS_AS(moment_vector(d, 33, Mode::pearson), Error);
  try {
    moment_vector({{2, 2, 2}, {1, 3, 2}}, 4, Mode::pearson);
    FAIL("expected degenerate error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate);
  }
}

TEST_SUITE_END();

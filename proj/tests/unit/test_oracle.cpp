#include <doctest.h>

#include <cmath>

#include "permcorr/error.hpp"
#include "permcorr/oracle.hpp"
#include "test_support.hpp"

using namespace permcorr;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("permutation_at_rank is lexicographic") {
  CHECK(permutation_at_rank(3, 0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(permutation_at_rank(3, 1) == std::vector<std::size_t>{0, 2, 1});
  CHECK(permutation_at_rank(3, 5) == std::vector<std::size_t>{2, 1, 0});
  auto perm = permutation_at_rank(4, 0);
  for (std::uint64_t r = 1; r < factorial_u64(4); ++r) {
    std::next_permutation(perm.begin(), perm.end());
    CHECK(perm == permutation_at_rank(4, r));
  }
}

TEST_CASE("exact moments of x=y=(1,2,3)") {
  const Dataset d{{1, 2, 3}, {1, 2, 3}};
  const MomentVector mv = oracle_moments_exact(d, 4);
  CHECK(mv.values[0] == 1.0);
  CHECK(std::abs(mv.values[1]) <= 1e-14);
  CHECK(mv.values[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mv.values[4] == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(mv.method_per_k[2] == MomentMethod::oracle_exact);
}

TEST_CASE("exact first and second moments for any data") {
  SplitMix64 rng(41);
  for (std::size_t n : {3u, 5u, 7u}) {
    const Dataset d = testing::uniform_dataset(n, rng);
    const MomentVector mv = oracle_moments_exact(d, 2);
    CHECK(std::abs(mv.values[1]) <= 1e-14);
    CHECK(std::abs(mv.values[2] - 1.0 / (static_cast<double>(n) - 1.0)) <= 1e-12);
  }
}

TEST_CASE("enumeration cap") {
  SplitMix64 rng(42);
  const Dataset d = testing::uniform_dataset(11, rng);
  try {
    oracle_moments_exact(d, 2);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_large);
  }
  OracleOptions wide;
  wide.max_n = 11;  // allowed when raised explicitly
  const Dataset small = testing::uniform_dataset(5, rng);
  CHECK_NOTHROW(oracle_moments_exact(small, 2, wide));
}

TEST_CASE("range-partitioned enumeration merges to the single-range result") {
  SplitMix64 rng(43);
  const Dataset d = testing::uniform_dataset(6, rng);
  OracleOptions serial;
  OracleOptions parallel;
  parallel.threads = 5;
  const MomentVector a = oracle_moments_exact(d, 6, serial);
  const MomentVector b = oracle_moments_exact(d, 6, parallel);
  for (std::size_t k = 0; k <= 6; ++k) {
    CHECK(testing::close(a.values[k], b.values[k], 1e-12, 1e-15));
  }
}

TEST_CASE("exact p-values on the 6-permutation example") {
  const Dataset identical{{1, 2, 3}, {1, 2, 3}};
  const PvalueEstimate two = oracle_pvalue_exact(identical, Tail::two_sided);
  CHECK(two.p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(two.count == 6);
  CHECK(two.hits == 2);

  const Dataset swapped{{1, 2, 3}, {1, 3, 2}};
  const PvalueEstimate right = oracle_pvalue_exact(swapped, Tail::right);
  CHECK(right.p == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact p-values are in (0, 1]") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = testing::uniform_dataset(5, rng);
    for (Tail tail : {Tail::two_sided, Tail::right, Tail::left}) {
      const PvalueEstimate est = oracle_pvalue_exact(d, tail);
      CHECK(est.p > 0.0);  // the identity permutation always qualifies
      CHECK(est.p <= 1.0);
    }
  }
}

TEST_CASE("mc moments are reproducible and worker-count independent") {
  SplitMix64 rng(45);
  const Dataset d = testing::uniform_dataset(12, rng);
  const McMoments a = oracle_moments_mc(d, 4, 5000, 99, 1);
  const McMoments b = oracle_moments_mc(d, 4, 5000, 99, 1);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(a.moments.values[k] == b.moments.values[k]);

  const McMoments c = oracle_moments_mc(d, 4, 5000, 99, 8);
  for (std::size_t k = 0; k <= 4; ++k) {
    CHECK(testing::close(a.moments.values[k], c.moments.values[k], 1e-12, 1e-15));
  }
}

TEST_CASE("mc single sample is a reproducible draw") {
  SplitMix64 rng(46);
  const Dataset d = testing::uniform_dataset(8, rng);
  const McMoments a = oracle_moments_mc(d, 3, 1, 7, 1);
  const McMoments b = oracle_moments_mc(d, 3, 1, 7, 4);
  CHECK(a.moments.values[1] == b.moments.values[1]);
  CHECK(std::abs(a.moments.values[1]) <= 1.0);
}

TEST_CASE("mc second moment lands within 5 standard errors") {
  const Dataset d{{1, 2, 3}, {1, 2, 3}};
  const McMoments mc = oracle_moments_mc(d, 2, 60000, 4242, 1);
  const double se = mc.std_errors[2];
  CHECK(se > 0.0);
  CHECK(std::abs(mc.moments.values[2] - 0.5) <= 5.0 * se);
}

TEST_CASE("mc standard errors shrink like sqrt(3) when samples triple") {
  SplitMix64 rng(47);
  const Dataset d = testing::uniform_dataset(10, rng);
  double ratio_sum = 0.0;
  const int reps = 10;
  for (int rep = 0; rep < reps; ++rep) {
    const McMoments small = oracle_moments_mc(d, 2, 3000, 100 + static_cast<std::uint64_t>(rep), 1);
    const McMoments large = oracle_moments_mc(d, 2, 9000, 200 + static_cast<std::uint64_t>(rep), 1);
    ratio_sum += large.std_errors[2] / small.std_errors[2];
  }
  const double mean_ratio = ratio_sum / reps;
  const double target = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(mean_ratio - target) <= 0.2 * target);
}

TEST_CASE("mc p-value determinism and error bar") {
  SplitMix64 rng(48);
  const Dataset d = testing::uniform_dataset(8, rng);
  const PvalueEstimate a = mc_pvalue(d, Tail::two_sided, 20000, 5, 1);
  const PvalueEstimate b = mc_pvalue(d, Tail::two_sided, 20000, 5, 6);
  CHECK(a.p == b.p);  // integer hit counts merge exactly
  const PvalueEstimate exact = oracle_pvalue_exact(d, Tail::two_sided);
  CHECK(std::abs(a.p - exact.p) <= 5.0 * std::max(a.std_error, 1e-6));
}

TEST_SUITE_END();

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "permcorr/accumulate.hpp"
#include "permcorr/dataset.hpp"
#include "permcorr/error.hpp"
#include "permcorr/moments.hpp"

namespace permcorr {

struct OracleOptions {
  std::size_t max_n = 10;  // enumeration cap; 10! ~ 3.6e6 permutations
  int threads = 1;
};

// n! for n <= 20
std::uint64_t factorial_u64(std::size_t n);

// Lexicographic permutation of {0..n-1} at the given rank (factorial number
// system); lets enumeration split into contiguous rank ranges.
std::vector<std::size_t> permutation_at_rank(std::size_t n, std::uint64_t rank);

// Ground truth by full enumeration: values[k] = (1/n!) sum_pi rho(x, y_pi)^k.
MomentVector oracle_moments_exact(const Dataset& data, int K, const OracleOptions& options = {});

// Inclusive-tail exact permutation p-value with 1e-12 comparison slack.
PvalueEstimate oracle_pvalue_exact(const Dataset& data, Tail tail,
                                   const OracleOptions& options = {});

struct McMoments {
  MomentVector moments;
  std::vector<double> std_errors;  // per order; NaN where undefined
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Seeded Monte Carlo over uniform random permutations. Each sample's
// randomness derives from (seed, sample index), so results do not depend on
// the worker count.
McMoments oracle_moments_mc(const Dataset& data, int K, std::uint64_t samples,
                            std::uint64_t seed, int threads = 1);

PvalueEstimate mc_pvalue(const Dataset& data, Tail tail, std::uint64_t samples,
                         std::uint64_t seed, int threads = 1);

// Brute-force sum over ordered tuples of pairwise-distinct indices of
// products of centered powers; the independent check for the recursion.
double distinct_sum_oracle(std::span<const double> values, std::span<const int> exponents);

namespace detail {

template <typename F>
void for_each_permutation(std::size_t n, std::uint64_t lo, std::uint64_t hi, F&& visit) {
  std::vector<std::size_t> perm = permutation_at_rank(n, lo);
  for (std::uint64_t r = lo; r < hi; ++r) {
    visit(std::span<const std::size_t>(perm));
    std::next_permutation(perm.begin(), perm.end());
  }
}

}  // namespace detail

// Powers of the centered cross product summed over a rank range of
// permutations: out[k] = sum_{pi in [lo,hi)} dot_pi^k for k = 0..K, where
// dot_pi = sum_i xc_i * yc_{pi_i} on already-centered inputs. Exact for
// rational scalars; used to cross-check the inductive formula with no
// rounding in play.
template <typename Scalar>
std::vector<Scalar> enumerate_scaled_moments(const std::vector<Scalar>& x_centered,
                                             const std::vector<Scalar>& y_centered, int K,
                                             std::uint64_t lo, std::uint64_t hi) {
  const std::size_t n = x_centered.size();
  std::vector<Accumulator<Scalar>> acc(static_cast<std::size_t>(K) + 1);
  detail::for_each_permutation(n, lo, hi, [&](std::span<const std::size_t> perm) {
    Accumulator<Scalar> dot;
    for (std::size_t i = 0; i < n; ++i) dot.add(x_centered[i] * y_centered[perm[i]]);
    Scalar power(1);
    acc[0].add(power);
    for (int k = 1; k <= K; ++k) {
      power = power * dot.value();
      acc[static_cast<std::size_t>(k)].add(power);
    }
  });
  std::vector<Scalar> out;
  out.reserve(acc.size());
  for (auto& a : acc) out.push_back(a.value());
  return out;
}

}  // namespace permcorr

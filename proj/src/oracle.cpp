#include "permcorr/oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "permcorr/random.hpp"

namespace permcorr {

namespace {

constexpr double kTailSlack = 1e-12;

struct CenteredPair {
  std::vector<double> xc, yc;
  double denom;  // sqrt(Sx2 * Sy2)
  double rho_obs;
};

CenteredPair center(const Dataset& data) {
  if (is_constant(data.x) || is_constant(data.y)) {
    throw Error(Errc::degenerate, "zero variance");
  }
  CenteredPair out;
  const std::size_t n = data.size();
  KahanSum<> sx, sy;
  for (double v : data.x) sx.add(v);
  for (double v : data.y) sy.add(v);
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  out.xc.resize(n);
  out.yc.resize(n);
  KahanSum<> xx, yy, dot;
  for (std::size_t i = 0; i < n; ++i) {
    out.xc[i] = data.x[i] - mx;
    out.yc[i] = data.y[i] - my;
    xx.add(out.xc[i] * out.xc[i]);
    yy.add(out.yc[i] * out.yc[i]);
    dot.add(out.xc[i] * out.yc[i]);
  }
  if (!(xx.value() > 0.0) || !(yy.value() > 0.0)) {
    throw Error(Errc::degenerate, "zero variance");
  }
  out.denom = std::sqrt(xx.value() * yy.value());
  out.rho_obs = std::clamp(dot.value() / out.denom, -1.0, 1.0);
  return out;
}

std::uint64_t check_enumerable(const Dataset& data, const OracleOptions& options) {
  const std::size_t n = data.size();
  if (n > options.max_n || n > 20) {
    throw Error(Errc::too_large, "n = " + std::to_string(n) +
                                     " exceeds the enumeration cap of " +
                                     std::to_string(std::min<std::size_t>(options.max_n, 20)));
  }
  return factorial_u64(n);
}

// Splits [0, total) into worker ranges, runs `work` on each, then merges in
// worker order so the result does not depend on scheduling.
template <typename PartialState, typename Work, typename Merge>
void run_partitioned(std::uint64_t total, int threads, Work&& work, Merge&& merge,
                     std::vector<PartialState>& states) {
  const int worker_count =
      std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(
                                             total, std::uint64_t(256)))));
  states.resize(static_cast<std::size_t>(worker_count));
  if (worker_count == 1) {
    work(0, total, states[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(worker_count));
    for (int w = 0; w < worker_count; ++w) {
      const std::uint64_t lo = total / static_cast<std::uint64_t>(worker_count) *
                                   static_cast<std::uint64_t>(w) +
                               std::min<std::uint64_t>(static_cast<std::uint64_t>(w),
                                                       total % static_cast<std::uint64_t>(worker_count));
      const std::uint64_t size = total / static_cast<std::uint64_t>(worker_count) +
                                 (static_cast<std::uint64_t>(w) <
                                          total % static_cast<std::uint64_t>(worker_count)
                                      ? 1
                                      : 0);
      pool.emplace_back([&, w, lo, size] { work(lo, lo + size, states[static_cast<std::size_t>(w)]); });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& s : states) merge(s);
}

}  // namespace

std::uint64_t factorial_u64(std::size_t n) {
  if (n > 20) throw Error(Errc::too_large, "factorial overflows past n = 20");
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<std::size_t> permutation_at_rank(std::size_t n, std::uint64_t rank) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(n);
  std::uint64_t radix = factorial_u64(n);
  for (std::size_t i = 0; i < n; ++i) {
    radix /= static_cast<std::uint64_t>(n - i);
    const std::size_t digit = static_cast<std::size_t>(rank / radix);
    rank %= radix;
    out.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return out;
}

MomentVector oracle_moments_exact(const Dataset& data, int K, const OracleOptions& options) {
  if (K < 0) throw Error(Errc::range, "K must be >= 0");
  const std::uint64_t total = check_enumerable(data, options);
  const CenteredPair c = center(data);
  const std::size_t n = data.size();

  using Acc = std::vector<KahanSum<>>;
  std::vector<Acc> states;
  Acc merged(static_cast<std::size_t>(K) + 1);
  run_partitioned<Acc>(
      total, options.threads,
      [&](std::uint64_t lo, std::uint64_t hi, Acc& acc) {
        acc.assign(static_cast<std::size_t>(K) + 1, KahanSum<>{});
        detail::for_each_permutation(n, lo, hi, [&](std::span<const std::size_t> perm) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += c.xc[i] * c.yc[perm[i]];
          const double rho = dot / c.denom;
          double power = 1.0;
          acc[0].add(1.0);
          for (int k = 1; k <= K; ++k) {
            power *= rho;
            acc[static_cast<std::size_t>(k)].add(power);
          }
        });
      },
      [&](const Acc& partial) {
        for (std::size_t k = 0; k < merged.size(); ++k) merged[k].add(partial[k]);
      },
      states);

  MomentVector out;
  out.n = n;
  out.mode = Mode::pearson;
  out.values.resize(static_cast<std::size_t>(K) + 1);
  out.method_per_k.assign(static_cast<std::size_t>(K) + 1, MomentMethod::oracle_exact);
  for (int k = 0; k <= K; ++k) {
    out.values[static_cast<std::size_t>(k)] =
        merged[static_cast<std::size_t>(k)].value() / static_cast<double>(total);
  }
  out.values[0] = 1.0;
  return out;
}

PvalueEstimate oracle_pvalue_exact(const Dataset& data, Tail tail, const OracleOptions& options) {
  const std::uint64_t total = check_enumerable(data, options);
  const CenteredPair c = center(data);
  const std::size_t n = data.size();
  const double threshold = c.rho_obs;
  const double abs_threshold = std::abs(threshold);

  std::vector<std::uint64_t> states;
  std::uint64_t hits = 0;
  run_partitioned<std::uint64_t>(
      total, options.threads,
      [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t& count) {
        count = 0;
        detail::for_each_permutation(n, lo, hi, [&](std::span<const std::size_t> perm) {
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += c.xc[i] * c.yc[perm[i]];
          const double rho = dot / c.denom;
          switch (tail) {
            case Tail::two_sided:
              if (std::abs(rho) >= abs_threshold - kTailSlack) ++count;
              break;
            case Tail::right:
              if (rho >= threshold - kTailSlack) ++count;
              break;
            case Tail::left:
              if (rho <= threshold + kTailSlack) ++count;
              break;
          }
        });
      },
      [&](const std::uint64_t& partial) { hits += partial; },
      states);

  PvalueEstimate out;
  out.p = static_cast<double>(hits) / static_cast<double>(total);
  out.rho_obs = c.rho_obs;
  out.tail = tail;
  out.method = "exact";
  out.count = total;
  out.hits = hits;
  return out;
}

McMoments oracle_moments_mc(const Dataset& data, int K, std::uint64_t samples,
                            std::uint64_t seed, int threads) {
  if (K < 0) throw Error(Errc::range, "K must be >= 0");
  if (samples < 1) throw Error(Errc::range, "need at least one sample");
  const CenteredPair c = center(data);
  const std::size_t n = data.size();

  // acc[k] collects rho^k, acc[K+k] collects rho^{2k} for the standard errors
  using Acc = std::vector<KahanSum<>>;
  const std::size_t width = 2 * static_cast<std::size_t>(K) + 1;
  std::vector<Acc> states;
  Acc merged(width);
  run_partitioned<Acc>(
      samples, threads,
      [&](std::uint64_t lo, std::uint64_t hi, Acc& acc) {
        acc.assign(width, KahanSum<>{});
        std::vector<std::size_t> perm(n);
        for (std::uint64_t s = lo; s < hi; ++s) {
          SplitMix64 rng(stream_seed(seed, s));
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          fisher_yates(std::span<std::size_t>(perm), rng);
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += c.xc[i] * c.yc[perm[i]];
          const double rho = dot / c.denom;
          double power = 1.0;
          acc[0].add(1.0);
          for (int k = 1; k <= 2 * K; ++k) {
            power *= rho;
            if (k <= K) acc[static_cast<std::size_t>(k)].add(power);
            if (k % 2 == 0 && k / 2 <= K) {
              acc[static_cast<std::size_t>(K + k / 2)].add(power);
            }
          }
        }
      },
      [&](const Acc& partial) {
        for (std::size_t i = 0; i < width; ++i) merged[i].add(partial[i]);
      },
      states);

  McMoments out;
  out.samples = samples;
  out.seed = seed;
  out.moments.n = n;
  out.moments.mode = Mode::pearson;
  out.moments.values.resize(static_cast<std::size_t>(K) + 1);
  out.moments.method_per_k.assign(static_cast<std::size_t>(K) + 1, MomentMethod::oracle_mc);
  out.std_errors.assign(static_cast<std::size_t>(K) + 1,
                        std::numeric_limits<double>::quiet_NaN());
  const double count = static_cast<double>(samples);
  out.moments.values[0] = 1.0;
  out.std_errors[0] = 0.0;
  for (int k = 1; k <= K; ++k) {
    const double mean = merged[static_cast<std::size_t>(k)].value() / count;
    out.moments.values[static_cast<std::size_t>(k)] = mean;
    if (samples >= 2) {
      const double mean_sq =
          merged[static_cast<std::size_t>(K) + static_cast<std::size_t>(k)].value() / count;
      const double var = std::max(0.0, mean_sq - mean * mean) * count / (count - 1.0);
      out.std_errors[static_cast<std::size_t>(k)] = std::sqrt(var / count);
    }
  }
  return out;
}

PvalueEstimate mc_pvalue(const Dataset& data, Tail tail, std::uint64_t samples,
                         std::uint64_t seed, int threads) {
  if (samples < 1) throw Error(Errc::range, "need at least one sample");
  const CenteredPair c = center(data);
  const std::size_t n = data.size();
  const double threshold = c.rho_obs;
  const double abs_threshold = std::abs(threshold);

  std::vector<std::uint64_t> states;
  std::uint64_t hits = 0;
  run_partitioned<std::uint64_t>(
      samples, threads,
      [&](std::uint64_t lo, std::uint64_t hi, std::uint64_t& count) {
        count = 0;
        std::vector<std::size_t> perm(n);
        for (std::uint64_t s = lo; s < hi; ++s) {
          SplitMix64 rng(stream_seed(seed, s));
          std::iota(perm.begin(), perm.end(), std::size_t{0});
          fisher_yates(std::span<std::size_t>(perm), rng);
          double dot = 0.0;
          for (std::size_t i = 0; i < n; ++i) dot += c.xc[i] * c.yc[perm[i]];
          const double rho = dot / c.denom;
          switch (tail) {
            case Tail::two_sided:
              if (std::abs(rho) >= abs_threshold - kTailSlack) ++count;
              break;
            case Tail::right:
              if (rho >= threshold - kTailSlack) ++count;
              break;
            case Tail::left:
              if (rho <= threshold + kTailSlack) ++count;
              break;
          }
        }
      },
      [&](const std::uint64_t& partial) { hits += partial; },
      states);

  PvalueEstimate out;
  out.p = static_cast<double>(hits) / static_cast<double>(samples);
  out.rho_obs = c.rho_obs;
  out.tail = tail;
  out.method = "mc";
  out.count = samples;
  out.hits = hits;
  out.std_error = std::sqrt(std::max(0.0, out.p * (1.0 - out.p)) / static_cast<double>(samples));
  return out;
}

double distinct_sum_oracle(std::span<const double> values, std::span<const int> exponents) {
  const std::size_t n = values.size();
  const std::size_t m = exponents.size();
  if (n > 8) throw Error(Errc::too_large, "distinct_sum_oracle caps at n = 8");
  if (m > n) throw Error(Errc::too_large, "more exponents than data points");
  if (m == 0) throw Error(Errc::range, "empty exponent tuple");

  KahanSum<> mean_sum;
  for (double v : values) mean_sum.add(v);
  const double mean = mean_sum.value() / static_cast<double>(n);

  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = values[i] - mean;

  KahanSum<> total;
  std::vector<std::size_t> index(m, 0);
  std::vector<bool> used(n, false);
  auto recurse = [&](auto&& self, std::size_t depth, double product) -> void {
    if (depth == m) {
      total.add(product);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      double p = product;
      for (int e = 0; e < exponents[depth]; ++e) p *= centered[i];
      self(self, depth + 1, p);
      used[i] = false;
    }
  };
  recurse(recurse, 0, 1.0);
  return total.value();
}

}  // namespace permcorr

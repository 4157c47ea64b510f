#include "permcorr/partitions.hpp"

#include <numeric>

#include "permcorr/error.hpp"

namespace permcorr {

int ExponentPartition::order() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

std::vector<int> ExponentPartition::degeneracies() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < parts.size();) {
    std::size_t j = i;
    while (j + 1 < parts.size() && parts[j + 1] == parts[i]) ++j;
    out.push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return out;
}

std::vector<ExponentPartition> enumerate_partitions(int k, int m) {
  if (m < 1 || m > k) {
    throw Error(Errc::range, "enumerate_partitions: need 1 <= m <= k");
  }
  std::vector<ExponentPartition> out;
  std::vector<int> current;
  current.reserve(static_cast<std::size_t>(m));
  // Descending first parts give lexicographically decreasing output.
  auto recurse = [&](auto&& self, int remaining, int slots, int max_part) -> void {
    if (slots == 0) {
      if (remaining == 0) out.push_back(ExponentPartition{current});
      return;
    }
    const int hi = std::min(max_part, remaining - (slots - 1));
    for (int p = hi; p >= 1; --p) {
      current.push_back(p);
      self(self, remaining - p, slots - 1, p);
      current.pop_back();
    }
  };
  recurse(recurse, k, m, k);
  return out;
}

namespace detail {

uint128 adjusted_multinomial_exact(const ExponentPartition& p) {
  const int k = p.order();
  if (k < 1 || k > 33) {
    throw Error(Errc::range, "adjusted_multinomial: order out of range");
  }
  auto factorial = [](int v) {
    uint128 f = 1;
    for (int i = 2; i <= v; ++i) f *= static_cast<unsigned>(i);
    return f;
  };
  uint128 numerator = factorial(k);
  uint128 denominator = 1;
  for (int part : p.parts) denominator *= factorial(part);
  for (int d : p.degeneracies()) denominator *= factorial(d);
  return numerator / denominator;  // exact: the quotient is an integer
}

}  // namespace detail

double adjusted_multinomial(const ExponentPartition& p) {
  return detail::scalar_from_uint128<double>(detail::adjusted_multinomial_exact(p));
}

}  // namespace permcorr

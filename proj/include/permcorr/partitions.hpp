#pragma once

#include <cstdint>
#include <vector>

namespace permcorr {

// A partition of k into m positive parts, stored non-increasing.
struct ExponentPartition {
  std::vector<int> parts;

  int order() const;                     // k = sum of parts
  int part_count() const { return static_cast<int>(parts.size()); }
  // multiplicity of each repeated part value, e.g. (3,1,1) -> {1, 2}
  std::vector<int> degeneracies() const;
};

// All partitions of k into exactly m parts, lexicographically decreasing.
std::vector<ExponentPartition> enumerate_partitions(int k, int m);

namespace detail {
using uint128 = unsigned __int128;
// k! / (prod parts_i! * prod degeneracies_r!), exact for k <= 33.
uint128 adjusted_multinomial_exact(const ExponentPartition& p);

// Exact u128 -> arbitrary scalar, built from 16-bit chunks so integer- and
// rational-like scalar types convert without loss.
template <typename Scalar>
Scalar scalar_from_uint128(uint128 v) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return static_cast<Scalar>(v);
  } else {
    Scalar out(0);
    const Scalar base(65536);
    for (int shift = 112; shift >= 0; shift -= 16) {
      out = out * base + Scalar(static_cast<unsigned>((v >> shift) & 0xFFFF));
    }
    return out;
  }
}
}  // namespace detail

// Number of set partitions of k labelled positions into blocks of the given
// sizes; always a positive integer (exact below 2^53).
double adjusted_multinomial(const ExponentPartition& p);

}  // namespace permcorr

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "permcorr/dataset.hpp"
#include "permcorr/error.hpp"

namespace permcorr {

// Sums over pairwise-distinct index tuples of products of centered powers:
//
//   X_(n_1..n_m) = sum over ordered m-tuples (i_1..i_m), all distinct, of
//                  prod_t (z_{i_t} - mean)^{n_t}
//
// computed by inclusion-exclusion: start from the unconstrained product of
// power sums and subtract every way of merging the last exponent into an
// earlier slot. X is symmetric in its exponents, so results are memoized on
// the sorted exponent tuple and the recursion collapses onto the partition
// lattice.
//
// Everything is kept on a normalized scale: the constructor takes central
// moments c[j] = S_j / n and value() returns X / n^m. That keeps all
// intermediates O(max |c|^k) for any n, and keeps the arithmetic exact for
// rational scalar types (division by n is exact there).
template <typename Scalar>
class DistinctPowerSums {
 public:
  // moments[j] = <z^j> (central), j = 0..K with moments[0] = 1
  DistinctPowerSums(std::vector<Scalar> moments, std::size_t n)
      : c_(std::move(moments)), n_(n), inv_n_(Scalar(1) / Scalar(static_cast<double>(n))) {}

  int max_order() const { return static_cast<int>(c_.size()) - 1; }
  std::size_t n() const { return n_; }

  // X_(exponents) / n^m; exponents need not be sorted
  const Scalar& value(std::vector<int> exponents) {
    if (exponents.empty()) {
      throw Error(Errc::range, "distinct power sum: empty exponent tuple");
    }
    int total = 0;
    for (int e : exponents) {
      if (e < 1) throw Error(Errc::range, "distinct power sum: exponents must be positive");
      total += e;
    }
    if (total > max_order()) {
      throw Error(Errc::range, "distinct power sum: order exceeds available moments");
    }
    std::sort(exponents.begin(), exponents.end(), std::greater<>());
    return get(std::move(exponents));
  }

 private:
  const Scalar& get(std::vector<int>&& key) {
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    Scalar result(0);
    const std::size_t m = key.size();
    if (m == 1) {
      result = c_[static_cast<std::size_t>(key[0])];
    } else {
      const int last = key.back();
      std::vector<int> head(key.begin(), key.end() - 1);  // still sorted
      result = c_[static_cast<std::size_t>(last)] * get(std::vector<int>(head));
      Scalar merged(0);
      for (std::size_t j = 0; j < head.size(); ++j) {
        std::vector<int> bumped = head;
        bumped[j] += last;
        std::sort(bumped.begin(), bumped.end(), std::greater<>());
        merged += get(std::move(bumped));
      }
      result -= inv_n_ * merged;
    }
    return memo_.emplace(std::move(key), std::move(result)).first->second;
  }

  std::vector<Scalar> c_;
  std::size_t n_;
  Scalar inv_n_;
  std::map<std::vector<int>, Scalar> memo_;
};

// Unnormalized X_(exponents) for one coordinate's centered power sums.
double distinct_power_sum(const CentralMoments& moments, std::vector<int> exponents);

}  // namespace permcorr

#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "permcorr/error.hpp"
#include "permcorr/partitions.hpp"

using namespace permcorr;

namespace {

std::vector<std::vector<int>> parts_of(int k, int m) {
  std::vector<std::vector<int>> out;
  for (const auto& p : enumerate_partitions(k, m)) out.push_back(p.parts);
  return out;
}

// independent: count set partitions of {1..k} whose block-size multiset
// matches, by direct enumeration of assignment vectors
long count_set_partitions(const std::vector<int>& sizes) {
  const int k = [&] { int s = 0; for (int v : sizes) s += v; return s; }();
  const int m = static_cast<int>(sizes.size());
  std::vector<int> assign(static_cast<std::size_t>(k), 0);
  long count = 0;
  auto canonical_sizes = sizes;
  std::sort(canonical_sizes.begin(), canonical_sizes.end());
  auto recurse = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      std::vector<int> got(static_cast<std::size_t>(m), 0);
      for (int b : assign) ++got[static_cast<std::size_t>(b)];
      if (std::any_of(got.begin(), got.end(), [](int g) { return g == 0; })) return;
      std::sort(got.begin(), got.end());
      if (got != canonical_sizes) return;
      // count each set partition once: blocks ordered by smallest element
      std::vector<int> first_seen;
      for (int b : assign) {
        if (std::find(first_seen.begin(), first_seen.end(), b) == first_seen.end()) {
          first_seen.push_back(b);
        }
      }
      std::vector<int> expected(static_cast<std::size_t>(m));
      for (int b = 0; b < m; ++b) expected[static_cast<std::size_t>(b)] = b;
      if (first_seen == expected) ++count;
      return;
    }
    for (int b = 0; b < m; ++b) {
      assign[static_cast<std::size_t>(pos)] = b;
      self(self, pos + 1);
    }
  };
  recurse(recurse, 0);
  return count;
}

}  // namespace

TEST_SUITE_BEGIN("partitions");

TEST_CASE("enumerate_partitions known lists") {
  CHECK(parts_of(2, 2) == std::vector<std::vector<int>>{{1, 1}});
  CHECK(parts_of(5, 2) == std::vector<std::vector<int>>{{4, 1}, {3, 2}});
  CHECK(parts_of(6, 3) == std::vector<std::vector<int>>{{4, 1, 1}, {3, 2, 1}, {2, 2, 2}});
  CHECK(parts_of(7, 1) == std::vector<std::vector<int>>{{7}});
}

TEST_CASE("enumerate_partitions is exhaustive and duplicate-free") {
  for (int k = 1; k <= 9; ++k) {
    for (int m = 1; m <= k; ++m) {
      const auto listed = parts_of(k, m);
      std::set<std::vector<int>> seen(listed.begin(), listed.end());
      CHECK(seen.size() == listed.size());
      // brute force: all non-increasing m-tuples of positive ints summing to k
      long expected = 0;
      std::vector<int> tuple(static_cast<std::size_t>(m));
      auto recurse = [&](auto&& self, int slot, int remaining, int cap) -> void {
        if (slot == m) {
          if (remaining == 0) ++expected;
          return;
        }
        for (int v = 1; v <= std::min(cap, remaining); ++v) {
          tuple[static_cast<std::size_t>(slot)] = v;
          self(self, slot + 1, remaining - v, v);
        }
      };
      recurse(recurse, 0, k, k);
      CHECK(static_cast<long>(listed.size()) == expected);
      for (const auto& p : listed) {
        CHECK(std::is_sorted(p.begin(), p.end(), std::greater<>()));
      }
    }
  }
}

TEST_CASE("enumerate_partitions range errors") {
  CHECK_THROWS_AS(enumerate_partitions(3, 0), Error);
  CHECK_THROWS_AS(enumerate_partitions(3, 4), Error);
}

TEST_CASE("degeneracies") {
  CHECK(ExponentPartition{{3, 1, 1}}.degeneracies() == std::vector<int>{1, 2});
  CHECK(ExponentPartition{{2, 2, 2}}.degeneracies() == std::vector<int>{3});
  CHECK(ExponentPartition{{5}}.degeneracies() == std::vector<int>{1});
}

TEST_CASE("adjusted_multinomial known values") {
  CHECK(adjusted_multinomial(ExponentPartition{{7}}) == 1.0);
  CHECK(adjusted_multinomial(ExponentPartition{{1, 1}}) == 1.0);
  CHECK(adjusted_multinomial(ExponentPartition{{2, 1, 1, 1}}) == 10.0);
  CHECK(adjusted_multinomial(ExponentPartition{{2, 2}}) == 3.0);
}

TEST_CASE("adjusted_multinomial counts set partitions") {
  for (int k = 2; k <= 7; ++k) {
    for (int m = 1; m <= k; ++m) {
      for (const auto& p : enumerate_partitions(k, m)) {
        CHECK(adjusted_multinomial(p) == double(count_set_partitions(p.parts)));
      }
    }
  }
}

TEST_SUITE_END();

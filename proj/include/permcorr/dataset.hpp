#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace permcorr {

// Paired sample (x_i, y_i), i = 1..n. Both coordinates always have the
// same length and contain only finite values.
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
};

// Validates lengths (n >= 2) and finiteness.
Dataset make_dataset(std::vector<double> x, std::vector<double> y);

// Two numeric columns, comma separated, LF or CRLF endings. When has_header
// is set the first line is skipped unconditionally.
Dataset load_csv(const std::string& path, bool has_header = false);
Dataset parse_csv(std::string_view text, bool has_header = false);

// Centered power sums of one coordinate:
//   sums[j] = S_j = sum_i (z_i - mean)^j,   j = 0..K   (sums[0] = n)
// moment(j) = S_j / n is the central moment <z^j>; sigma() = sqrt(<z^2>).
struct CentralMoments {
  std::size_t n = 0;
  double mean = 0.0;
  std::vector<double> sums;

  int max_order() const { return static_cast<int>(sums.size()) - 1; }
  double power_sum(int j) const { return sums[static_cast<std::size_t>(j)]; }
  double moment(int j) const { return sums[static_cast<std::size_t>(j)] / static_cast<double>(n); }
  double sigma() const;
  // central moments <z^j> for j = 0..max_order
  std::vector<double> moments() const;
};

// Two-pass: compensated mean, then compensated centered powers.
CentralMoments central_moments(std::span<const double> values, int max_order);

// Ranks in 1..n; ties get the midrank (average of the tied positions).
std::vector<double> midranks(std::span<const double> values);
Dataset rank_transform(const Dataset& data);

bool has_ties(std::span<const double> values);

// Sample correlation of the identity pairing. Clamped to [-1, 1] to absorb
// last-bit rounding only.
double pearson_obs(const Dataset& data);

// True when all values compare equal (zero variance).
bool is_constant(std::span<const double> values);

}  // namespace permcorr

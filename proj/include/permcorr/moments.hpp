#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "permcorr/accumulate.hpp"
#include "permcorr/dataset.hpp"
#include "permcorr/partitions.hpp"
#include "permcorr/power_sums.hpp"

namespace permcorr {

enum class Mode { pearson, spearman };
enum class MomentMethod { closed_form, inductive, oracle_exact, oracle_mc };
enum class Tail { two_sided, right, left };

const char* to_string(Mode mode);
const char* to_string(MomentMethod method);
const char* to_string(Tail tail);

// Highest supported moment order; partition counts and floating-point
// resolution both degrade beyond this.
inline constexpr int kMaxMomentOrder = 32;

// Permutation-distribution moments <rho^k> for k = 0..K.
struct MomentVector {
  std::size_t n = 0;
  Mode mode = Mode::pearson;
  std::vector<double> values;
  std::vector<MomentMethod> method_per_k;

  int max_order() const { return static_cast<int>(values.size()) - 1; }
};

struct PvalueEstimate {
  double p = 0.0;
  double rho_obs = 0.0;
  Tail tail = Tail::two_sided;
  std::string method;
  int order = 0;  // moment order K for moment-based methods
  std::uint64_t count = 0;  // permutations enumerated or samples drawn
  std::uint64_t hits = 0;
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double clip_correction = 0.0;
  double monotonicity_correction = 0.0;
  bool clamped = false;
};

// Exact moments of rho over all permutations, evaluated from the two
// coordinates' centered power sums alone.
class MomentEngine {
 public:
  MomentEngine(const CentralMoments& mx, const CentralMoments& my);

  std::size_t n() const { return n_; }
  int max_order() const { return max_order_; }

  // general-k route: inclusion-exclusion over distinct index tuples
  double inductive(int k);
  // hard-coded closed forms, k = 1..5
  double closed(int k) const;

 private:
  std::size_t n_;
  int max_order_;
  std::vector<double> chi_, nu_;  // central moments of x and y
  double sx_, sy_;                // sqrt of the second central moments
  DistinctPowerSums<double> x_, y_;
};

double exact_moment_inductive(const CentralMoments& mx, const CentralMoments& my, int k);
double exact_moment_closed(const CentralMoments& mx, const CentralMoments& my, int k);

// Closed forms for k <= 5, inductive route above; Spearman mode runs on the
// rank transform (moments then depend on n alone for tie-free data).
MomentVector moment_vector(const Dataset& data, int K, Mode mode);

namespace detail {

// sum over partitions p of k into m parts of C*(p) * X_p * Y_p / n^{2m}
template <typename Scalar>
Scalar partition_layer_sum(DistinctPowerSums<Scalar>& x, DistinctPowerSums<Scalar>& y,
                           int k, int m) {
  Accumulator<Scalar> sum;
  for (const ExponentPartition& p : enumerate_partitions(k, m)) {
    const Scalar weight = scalar_from_uint128<Scalar>(adjusted_multinomial_exact(p));
    sum.add(weight * x.value(p.parts) * y.value(p.parts));
  }
  return sum.value();
}

}  // namespace detail

// Mean over all permutations of the centered cross product
//   dot_pi = sum_i (x_i - mean_x)(y_{pi_i} - mean_y)
// raised to the k-th power. Rational scalar types evaluate this exactly,
// which is how the recursion is checked bit-for-bit against enumeration.
template <typename Scalar>
Scalar scaled_moment_inductive(DistinctPowerSums<Scalar>& x, DistinctPowerSums<Scalar>& y,
                               int k) {
  if (k == 0) return Scalar(1);
  const std::size_t n = x.n();
  Accumulator<Scalar> total;
  const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), n));
  for (int m = 1; m <= m_max; ++m) {
    // n^{2m} / (n (n-1) ... (n-m+1)), the normalization times (n-m)!/n!
    Scalar factor(1);
    const Scalar n_scalar(static_cast<double>(n));
    for (int i = 0; i < m; ++i) {
      factor = factor * n_scalar * n_scalar / Scalar(static_cast<double>(n - static_cast<std::size_t>(i)));
    }
    total.add(factor * detail::partition_layer_sum(x, y, k, m));
  }
  return total.value();
}

}  // namespace permcorr

#pragma once

#include <cmath>
#include <type_traits>

namespace permcorr {

// Neumaier-compensated accumulator. Tracks the rounding error of every
// addition and folds it back into the final value, which keeps long and
// alternating sums accurate to a few ulp independent of summation order.
template <typename T = double>
struct KahanSum {
  T sum{0};
  T comp{0};

  void add(T value) {
    const T t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      comp += (sum - t) + value;
    } else {
      comp += (value - t) + sum;
    }
    sum = t;
  }

  void add(const KahanSum& other) {
    add(other.sum);
    add(other.comp);
  }

  T value() const { return sum + comp; }
};

// Generic accumulator: compensated for floating point, plain otherwise
// (exact scalar types such as rationals need no compensation).
template <typename Scalar>
struct Accumulator {
  Scalar total{0};
  void add(const Scalar& v) { total += v; }
  const Scalar& value() const { return total; }
};

template <>
struct Accumulator<double> {
  KahanSum<double> total;
  void add(double v) { total.add(v); }
  double value() const { return total.value(); }
};

}  // namespace permcorr

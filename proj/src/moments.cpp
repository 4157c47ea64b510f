#include "permcorr/moments.hpp"

#include <algorithm>
#include <cmath>

#include "permcorr/error.hpp"

namespace permcorr {

const char* to_string(Mode mode) {
  return mode == Mode::pearson ? "pearson" : "spearman";
}

const char* to_string(MomentMethod method) {
  switch (method) {
    case MomentMethod::closed_form: return "closed-form";
    case MomentMethod::inductive: return "inductive";
    case MomentMethod::oracle_exact: return "oracle-exact";
    case MomentMethod::oracle_mc: return "oracle-mc";
  }
  return "?";
}

const char* to_string(Tail tail) {
  switch (tail) {
    case Tail::two_sided: return "two";
    case Tail::right: return "right";
    case Tail::left: return "left";
  }
  return "?";
}

namespace {

std::vector<double> standardized_moments(const std::vector<double>& central, double sigma) {
  std::vector<double> out(central.size());
  out[0] = 1.0;
  double scale = 1.0;
  for (std::size_t j = 1; j < central.size(); ++j) {
    scale *= sigma;
    out[j] = central[j] / scale;
  }
  return out;
}

}  // namespace

namespace {

const CentralMoments& validate_pair(const CentralMoments& mx, const CentralMoments& my) {
  if (mx.n != my.n) throw Error(Errc::range, "x and y must have equal length");
  if (mx.n < 2) throw Error(Errc::too_small, "need n >= 2");
  if (mx.max_order() < 2 || my.max_order() < 2) {
    throw Error(Errc::range, "need central moments to order >= 2");
  }
  if (!(mx.power_sum(2) > 0.0) || !(my.power_sum(2) > 0.0)) {
    throw Error(Errc::degenerate, "zero variance");
  }
  return mx;
}

}  // namespace

MomentEngine::MomentEngine(const CentralMoments& mx, const CentralMoments& my)
    : n_(validate_pair(mx, my).n),
      max_order_(std::min(mx.max_order(), my.max_order())),
      chi_(mx.moments()),
      nu_(my.moments()),
      sx_(mx.sigma()),
      sy_(my.sigma()),
      x_(standardized_moments(chi_, sx_), mx.n),
      y_(standardized_moments(nu_, sy_), my.n) {}

double MomentEngine::inductive(int k) {
  if (k < 0) throw Error(Errc::range, "moment order must be >= 0");
  if (k == 0) return 1.0;
  if (k > max_order_) throw Error(Errc::range, "moment order exceeds available power sums");

  const double n = static_cast<double>(n_);
  KahanSum<> total;
  const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), n_));
  for (int m = 1; m <= m_max; ++m) {
    // n^{2m} / (n^k n (n-1) ... (n-m+1)); falling factorial built
    // incrementally so no factorial is ever materialized
    double factor = std::pow(n, static_cast<double>(m - k));
    for (int i = 0; i < m; ++i) factor *= n / (n - static_cast<double>(i));
    total.add(factor * detail::partition_layer_sum(x_, y_, k, m));
  }
  return total.value();
}

double MomentEngine::closed(int k) const {
  if (k < 1 || k > 5) throw Error(Errc::range, "closed forms cover k = 1..5 only");
  const double n = static_cast<double>(n_);

  switch (k) {
    case 1:
      return 0.0;
    case 2:
      return 1.0 / (n - 1.0);
    case 3: {
      double bracket = 1.0 / (n * n);
      bracket += 3.0 / (n * n * (n - 1.0));
      if (n_ >= 3) bracket += 4.0 / (n * n * (n - 1.0) * (n - 2.0));
      const double s3 = sx_ * sx_ * sx_ * sy_ * sy_ * sy_;
      return chi_[3] * nu_[3] / s3 * bracket;
    }
    case 4: {
      const double chi4 = chi_[4], nu4 = nu_[4];
      const double sx4 = chi_[2] * chi_[2], sy4 = nu_[2] * nu_[2];
      double total = chi4 * nu4 / (n * n * n);
      // The cross term's brackets are O(n^2), so it carries 1/n^5; pairing
      // it with the plain 1/n^3 of the first summand fails the enumeration
      // oracle by a factor n^2.
      total += 4.0 * chi4 * nu4 / (n * n * n * (n - 1.0));
      total += 3.0 * (n * n * sx4 - n * chi4) * (n * n * sy4 - n * nu4) /
               (std::pow(n, 5) * (n - 1.0));
      const double cx = 2.0 * n * chi4 - n * n * sx4;
      const double cy = 2.0 * n * nu4 - n * n * sy4;
      if (n_ >= 3) total += 6.0 * cx * cy / (std::pow(n, 5) * (n - 1.0) * (n - 2.0));
      if (n_ >= 4) {
        total += 9.0 * cx * cy / (std::pow(n, 5) * (n - 1.0) * (n - 2.0) * (n - 3.0));
      }
      return total / (sx4 * sy4);
    }
    case 5: {
      const double chi5 = chi_[5], nu5 = nu_[5];
      const double cx32 = chi_[3] * chi_[2], cy32 = nu_[3] * nu_[2];
      const double n4 = std::pow(n, 4), n6 = std::pow(n, 6);
      double total = chi5 * nu5 / n4;
      total += 5.0 * chi5 * nu5 / (n4 * (n - 1.0));
      total += 10.0 * (n * n * cx32 - n * chi5) * (n * n * cy32 - n * nu5) / (n6 * (n - 1.0));
      if (n_ >= 3) {
        total += 10.0 * (2.0 * n * chi5 - n * n * cx32) * (2.0 * n * nu5 - n * n * cy32) /
                 (n6 * (n - 1.0) * (n - 2.0));
        total += 60.0 * (n * chi5 - n * n * cx32) * (n * nu5 - n * n * cy32) /
                 (n6 * (n - 1.0) * (n - 2.0));
      }
      const double gx = 6.0 * n * chi5 - 5.0 * n * n * cx32;
      const double gy = 6.0 * n * nu5 - 5.0 * n * n * cy32;
      if (n_ >= 4) total += 10.0 * gx * gy / (n6 * (n - 1.0) * (n - 2.0) * (n - 3.0));
      if (n_ >= 5) {
        total += 16.0 * gx * gy / (n6 * (n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0));
      }
      const double s5 = std::pow(sx_, 5) * std::pow(sy_, 5);
      return total / s5;
    }
  }
  return 0.0;
}

double exact_moment_inductive(const CentralMoments& mx, const CentralMoments& my, int k) {
  MomentEngine engine(mx, my);
  return engine.inductive(k);
}

double exact_moment_closed(const CentralMoments& mx, const CentralMoments& my, int k) {
  MomentEngine engine(mx, my);
  return engine.closed(k);
}

double distinct_power_sum(const CentralMoments& moments, std::vector<int> exponents) {
  const auto m = static_cast<double>(exponents.size());
  DistinctPowerSums<double> sums(moments.moments(), moments.n);
  const double normalized = sums.value(std::move(exponents));
  // value() is X / n^m
  return normalized * std::pow(static_cast<double>(moments.n), m);
}

MomentVector moment_vector(const Dataset& data, int K, Mode mode) {
  if (K < 1) throw Error(Errc::range, "K must be >= 1");
  if (K > kMaxMomentOrder) {
    throw Error(Errc::range, "K exceeds the supported cap of 32");
  }
  if (is_constant(data.x) || is_constant(data.y)) {
    throw Error(Errc::degenerate, "zero variance");
  }

  std::vector<double> xs, ys;
  if (mode == Mode::spearman) {
    xs = midranks(data.x);
    ys = midranks(data.y);
    // moments are pairing-independent; sorting makes the summation order
    // canonical so equal-n tie-free datasets agree bit for bit
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
  } else {
    xs = data.x;
    ys = data.y;
  }

  const int order = std::max(K, 2);
  const CentralMoments mx = central_moments(xs, order);
  const CentralMoments my = central_moments(ys, order);
  MomentEngine engine(mx, my);

  MomentVector out;
  out.n = data.size();
  out.mode = mode;
  out.values.resize(static_cast<std::size_t>(K) + 1);
  out.method_per_k.resize(static_cast<std::size_t>(K) + 1);
  out.values[0] = 1.0;
  out.method_per_k[0] = MomentMethod::closed_form;
  for (int k = 1; k <= K; ++k) {
    const bool use_closed = k <= 5;
    out.values[static_cast<std::size_t>(k)] = use_closed ? engine.closed(k) : engine.inductive(k);
    out.method_per_k[static_cast<std::size_t>(k)] =
        use_closed ? MomentMethod::closed_form : MomentMethod::inductive;
  }
  return out;
}

}  // namespace permcorr

#include "permcorr/cdf.hpp"

#include <algorithm>
#include <cmath>

#include "permcorr/accumulate.hpp"
#include "permcorr/error.hpp"

namespace permcorr {

namespace {

constexpr double kPositionSlack = 1e-12;
constexpr int kLegendreGridIntervals = 4096;

std::vector<std::vector<double>> binomial_rows(int max_n) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(max_n) + 1);
  for (int i = 0; i <= max_n; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    row.assign(static_cast<std::size_t>(i) + 1, 1.0);
    for (int j = 1; j < i; ++j) {
      row[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)] +
                                         rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
    }
  }
  return rows;
}

// power-basis coefficients of the Legendre polynomials P_0..P_degree
std::vector<std::vector<double>> legendre_coefficients(int degree) {
  std::vector<std::vector<double>> p(static_cast<std::size_t>(degree) + 1);
  p[0] = {1.0};
  if (degree >= 1) p[1] = {0.0, 1.0};
  for (int j = 1; j < degree; ++j) {
    // (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}
    std::vector<double> next(static_cast<std::size_t>(j) + 2, 0.0);
    for (std::size_t i = 0; i < p[static_cast<std::size_t>(j)].size(); ++i) {
      next[i + 1] += (2.0 * j + 1.0) * p[static_cast<std::size_t>(j)][i];
    }
    for (std::size_t i = 0; i < p[static_cast<std::size_t>(j - 1)].size(); ++i) {
      next[i] -= static_cast<double>(j) * p[static_cast<std::size_t>(j - 1)][i];
    }
    for (double& c : next) c /= static_cast<double>(j + 1);
    p[static_cast<std::size_t>(j + 1)] = std::move(next);
  }
  return p;
}

double horner(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
  return v;
}

}  // namespace

const char* to_string(CdfMethod method) {
  return method == CdfMethod::hausdorff ? "hausdorff" : "legendre";
}

UnitMoments to_unit_moments(const MomentVector& mv) {
  const int K = mv.max_order();
  if (K < 0) throw Error(Errc::range, "empty moment vector");
  const auto binom = binomial_rows(K);
  UnitMoments out;
  out.mu.resize(static_cast<std::size_t>(K) + 1);
  double scale = 1.0;  // 2^{-j}
  for (int j = 0; j <= K; ++j) {
    KahanSum<> sum;
    for (int i = 0; i <= j; ++i) {
      sum.add(binom[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
              mv.values[static_cast<std::size_t>(i)]);
    }
    out.mu[static_cast<std::size_t>(j)] = sum.value() * scale;
    scale *= 0.5;
  }
  return out;
}

CdfEstimate hausdorff_cdf(const UnitMoments& um, int alpha) {
  if (alpha < 1 || alpha > um.order()) {
    throw Error(Errc::range, "alpha must be in 1..K");
  }
  const auto binom = binomial_rows(alpha);

  // mass near t = k/alpha: p_k = sum_{j=k}^{alpha} C(alpha,j) C(j,k) (-1)^{j-k} mu[j]
  std::vector<double> masses(static_cast<std::size_t>(alpha) + 1);
  for (int k = 0; k <= alpha; ++k) {
    KahanSum<> sum;
    for (int j = k; j <= alpha; ++j) {
      const double term = binom[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(j)] *
                          binom[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] *
                          um.mu[static_cast<std::size_t>(j)];
      sum.add((j - k) % 2 == 0 ? term : -term);
    }
    masses[static_cast<std::size_t>(k)] = sum.value();
  }

  double clipped = 0.0;
  double total = 0.0;
  std::vector<double> corrected(masses.size());
  for (std::size_t k = 0; k < masses.size(); ++k) {
    clipped += std::max(-masses[k], 0.0);
    corrected[k] = std::max(masses[k], 0.0);
    total += corrected[k];
  }
  if (!(total > 0.0)) throw Error(Errc::range, "moment sequence yields no mass");

  CdfEstimate out;
  out.method_ = CdfMethod::hausdorff;
  out.param_ = alpha;
  out.step_ = true;
  out.clip_correction_ = clipped;
  out.positions_.resize(masses.size());
  out.cumulative_.resize(masses.size());
  KahanSum<> running;
  double tv = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double mass = corrected[k] / total;
    tv += std::abs(mass - masses[k]);
    running.add(mass);
    out.positions_[k] = 2.0 * static_cast<double>(k) / static_cast<double>(alpha) - 1.0;
    out.cumulative_[k] = std::min(1.0, running.value());
  }
  out.cumulative_.back() = 1.0;
  out.monotonicity_correction_ = tv;
  return out;
}

CdfEstimate legendre_cdf(const MomentVector& mv, int degree) {
  if (degree < 0 || degree > mv.max_order()) {
    throw Error(Errc::range, "degree must be in 0..K");
  }
  const auto legendre = legendre_coefficients(degree);

  // density f(rho) = sum_j c_j P_j(rho), c_j = (2j+1)/2 E[P_j(rho)]
  std::vector<double> density(static_cast<std::size_t>(degree) + 1, 0.0);
  for (int j = 0; j <= degree; ++j) {
    KahanSum<> projected;
    const auto& pj = legendre[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < pj.size(); ++i) {
      projected.add(pj[i] * mv.values[i]);
    }
    const double cj = (2.0 * j + 1.0) / 2.0 * projected.value();
    for (std::size_t i = 0; i < pj.size(); ++i) density[i] += cj * pj[i];
  }

  // exact antiderivative, anchored at F(-1) = 0
  std::vector<double> cdf_poly(density.size() + 1, 0.0);
  for (std::size_t i = 0; i < density.size(); ++i) {
    cdf_poly[i + 1] = density[i] / static_cast<double>(i + 1);
  }
  cdf_poly[0] = -horner(cdf_poly, -1.0);

  CdfEstimate out;
  out.method_ = CdfMethod::legendre;
  out.param_ = degree;
  out.step_ = false;
  out.positions_.resize(kLegendreGridIntervals + 1);
  out.cumulative_.resize(kLegendreGridIntervals + 1);

  double negative_mass = 0.0;
  double previous_density = std::max(-horner(density, -1.0), 0.0);
  std::vector<double> raw(out.positions_.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < out.positions_.size(); ++i) {
    const double rho = -1.0 + 2.0 * static_cast<double>(i) / kLegendreGridIntervals;
    out.positions_[i] = rho;
    raw[i] = horner(cdf_poly, rho);
    peak = std::max(peak, raw[i]);
    const double neg = std::max(-horner(density, rho), 0.0);
    if (i > 0) negative_mass += (previous_density + neg) / kLegendreGridIntervals;
    previous_density = neg;
  }
  if (!(peak > 0.0)) throw Error(Errc::range, "moment sequence yields no mass");

  // isotonize: running max clamped below at 0, then renormalize to F(1) = 1
  const double denom = std::max(raw.back(), peak * 1e-12);
  double running = 0.0;
  double worst_shift = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    running = std::max(running, raw[i]);
    const double corrected = std::min(1.0, running / denom);
    out.cumulative_[i] = corrected;
    worst_shift = std::max(worst_shift, std::abs(corrected - raw[i]));
  }
  out.cumulative_.back() = 1.0;
  out.clip_correction_ = negative_mass;
  out.monotonicity_correction_ = worst_shift;
  return out;
}

double CdfEstimate::cdf(double rho) const {
  if (step_) {
    double value = 0.0;
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      if (positions_[k] <= rho + kPositionSlack) value = cumulative_[k];
      else break;
    }
    return value;
  }
  if (rho <= positions_.front()) return cumulative_.front();
  if (rho >= positions_.back()) return 1.0;
  const double span = positions_.back() - positions_.front();
  const double fi = (rho - positions_.front()) / span * (static_cast<double>(positions_.size()) - 1.0);
  const std::size_t i = std::min(static_cast<std::size_t>(fi), positions_.size() - 2);
  const double w = fi - static_cast<double>(i);
  return cumulative_[i] * (1.0 - w) + cumulative_[i + 1] * w;
}

double CdfEstimate::cdf_left(double rho) const {
  if (step_) {
    double value = 0.0;
    for (std::size_t k = 0; k < positions_.size(); ++k) {
      if (positions_[k] < rho - kPositionSlack) value = cumulative_[k];
      else break;
    }
    return value;
  }
  return cdf(rho);  // continuous estimate
}

double CdfEstimate::tail_probability(double rho_obs, Tail tail) const {
  switch (tail) {
    case Tail::two_sided: {
      const double a = std::abs(rho_obs);
      return cdf(-a) + 1.0 - cdf_left(a);
    }
    case Tail::right:
      return 1.0 - cdf_left(rho_obs);
    case Tail::left:
      return cdf(rho_obs);
  }
  return 0.0;
}

PvalueEstimate moment_pvalue(const Dataset& data, int K, CdfMethod method, Tail tail,
                             Mode mode) {
  if (K < 1) throw Error(Errc::range, "K must be >= 1");
  const Dataset working = mode == Mode::spearman ? rank_transform(data) : data;
  const double rho_obs = pearson_obs(working);
  const MomentVector mv = moment_vector(data, K, mode);

  CdfEstimate estimate = method == CdfMethod::hausdorff
                             ? hausdorff_cdf(to_unit_moments(mv), K)
                             : legendre_cdf(mv, K);

  const double raw = estimate.tail_probability(rho_obs, tail);
  PvalueEstimate out;
  out.p = std::clamp(raw, 0.0, 1.0);
  out.clamped = raw != out.p;
  out.rho_obs = rho_obs;
  out.tail = tail;
  out.method = to_string(method);
  out.order = K;
  out.clip_correction = estimate.clip_correction();
  out.monotonicity_correction = estimate.monotonicity_correction();
  return out;
}

}  // namespace permcorr

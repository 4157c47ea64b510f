#pragma once

#include <vector>

#include "permcorr/dataset.hpp"
#include "permcorr/moments.hpp"

namespace permcorr {

// Moments of t = (rho + 1) / 2 on [0, 1]: mu[j] = E[t^j].
struct UnitMoments {
  std::vector<double> mu;
  int order() const { return static_cast<int>(mu.size()) - 1; }
};

// Binomial transport of <rho^k> under t = (rho + 1) / 2.
UnitMoments to_unit_moments(const MomentVector& mv);

enum class CdfMethod { hausdorff, legendre };
const char* to_string(CdfMethod method);

// Null-CDF estimate on [-1, 1] built from a moment sequence.
//
// hausdorff: moment-inversion step function with masses on an (alpha+1)-point
// grid; negative masses are clipped and the vector renormalized.
// legendre: orthogonal-series density integrated exactly, then isotonized
// (running max, clamped, renormalized to F(1) = 1) on a dense grid.
//
// clip_correction reports removed negative mass; monotonicity_correction
// reports how far the corrected curve moved from the raw one.
class CdfEstimate {
 public:
  double cdf(double rho) const;       // F(rho), right-continuous
  double cdf_left(double rho) const;  // F(rho-)
  double tail_probability(double rho_obs, Tail tail) const;

  CdfMethod method() const { return method_; }
  int param() const { return param_; }  // alpha or degree
  double clip_correction() const { return clip_correction_; }
  double monotonicity_correction() const { return monotonicity_correction_; }

  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& cumulative() const { return cumulative_; }

 private:
  friend CdfEstimate hausdorff_cdf(const UnitMoments& um, int alpha);
  friend CdfEstimate legendre_cdf(const MomentVector& mv, int degree);

  CdfMethod method_ = CdfMethod::hausdorff;
  int param_ = 0;
  bool step_ = true;
  std::vector<double> positions_;
  std::vector<double> cumulative_;
  double clip_correction_ = 0.0;
  double monotonicity_correction_ = 0.0;
};

CdfEstimate hausdorff_cdf(const UnitMoments& um, int alpha);
CdfEstimate legendre_cdf(const MomentVector& mv, int degree);

// Full pipeline: observed correlation, exact moments, CDF reconstruction,
// tail probability. Spearman mode ranks both coordinates first.
PvalueEstimate moment_pvalue(const Dataset& data, int K, CdfMethod method, Tail tail,
                             Mode mode = Mode::pearson);

}  // namespace permcorr

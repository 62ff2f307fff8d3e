#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "depthkit/depth.hpp"
#include "depthkit/evt.hpp"
#include "depthkit/types.hpp"

namespace depthkit::refined {

enum class Side { left, right };

/// One fitted tail of a univariate sample.  For side == left the fit runs on
/// negated data, so b_hat lives on the negated scale (b_hat = -X_{k+1:n}).
struct TailModel1D {
  Side side = Side::right;
  std::size_t k = 0;
  std::size_t n = 0;
  double gamma_hat = 0.0;
  double a_hat = 0.0;
  double b_hat = 0.0;
};

/// Moment-estimator tail fit over the top k exceedances.  Requires d == 1
/// and k < n/2.
TailModel1D fit_tail_1d(const Sample& s, std::size_t k, Side side);

/// Tail probability estimate
///   (k/n) * [ max(0, 1 + gamma (w - b) / a) ]^{-1/gamma},
/// with the gamma -> 0 limit (k/n) exp(-(w - b)/a) taken when
/// |gamma| < 1e-8; w is x (right tail) or -x (left tail) and must be at or
/// beyond the fitted threshold.
double tail_prob_1d(const TailModel1D& model, double x);

/// Univariate refined depth: empirical depth strictly between the two
/// threshold order statistics, the fitted tail estimate at and beyond them.
/// Both tails glue at exactly k/n.
class UnivariateRefinedDepth {
 public:
  UnivariateRefinedDepth(const Sample& s, std::size_t k);

  double value(double x) const;
  double lower_glue() const { return lower_glue_; }  // X_{k+1:n}
  double upper_glue() const { return upper_glue_; }  // X_{n-k:n}
  const TailModel1D& left() const { return left_; }
  const TailModel1D& right() const { return right_; }

 private:
  std::vector<double> sorted_;
  std::size_t k_;
  double lower_glue_, upper_glue_;
  TailModel1D left_, right_;
};

/// One-shot convenience wrapper around UnivariateRefinedDepth.
double refined_depth_1d(const Sample& s, std::size_t k, double x);

/// Pure power-law directional tail estimate (k/n) (w / w_threshold)^{-alpha}.
/// Throws domain_error when the threshold is not positive.
double projection_tail_prob(double w, double w_threshold, double alpha_hat,
                            std::size_t k, std::size_t n);

enum class MdMethod { ray_scaling, random_direction };

struct RefinedResult {
  double value = 0.0;
  /// True when every directional estimate was clamped to zero and the
  /// smallest positive double was returned instead.
  bool clamped = false;
};

struct Contour {
  double level = 0.0;
  std::vector<double> theta;   // strictly increasing in [0, 2pi)
  std::vector<double> radius;  // positive
  std::vector<double> center;
};

/// Multivariate refined depth model.
///
/// ray_scaling (d == 2): exact empirical depth above the k/n contour; below
/// it, the ray through the point is calibrated to the radius s where the
/// empirical depth crosses k/n and the depth is extrapolated by the power
/// law (k/n) (r/s)^{-alpha_hat} with alpha_hat = 1 / gamma_hat from the
/// norm tail fit.
///
/// random_direction (d >= 2): minimum over a fixed direction set of
/// per-direction tail estimates; beyond the per-direction threshold
/// W_{n-k:n} the generalized Pareto form with the shared gamma_hat and a
/// per-direction scale fit, below it the empirical projection tail.
class HeavyTailDepthModel {
 public:
  static HeavyTailDepthModel fit_ray(const Sample& s, std::size_t k,
                                     std::vector<double> center = {},
                                     evt::Estimator est = evt::Estimator::hill,
                                     std::optional<std::size_t> k_tail = {});
  static HeavyTailDepthModel fit_random(
      const Sample& s, std::size_t k, depth::DirectionSet dirs,
      std::vector<double> center = {},
      evt::Estimator est = evt::Estimator::moment,
      std::optional<std::size_t> k_tail = {});

  /// Radius s along `direction` from the center where the empirical depth
  /// last reaches k/n: doubling bracket, then bisection to relative 1e-9.
  double ray_calibrate(std::span<const double> direction) const;

  RefinedResult evaluate(std::span<const double> point) const;

  /// Radial k/n-contour scaled to `level` (ray_scaling, d == 2 only);
  /// level must lie in (0, k/n].
  Contour depth_contour(double level, std::size_t n_angles) const;

  MdMethod method() const { return method_; }
  double gamma_hat() const { return gamma_hat_; }
  double alpha_hat() const { return alpha_hat_; }
  std::size_t k() const { return k_; }
  std::size_t k_tail() const { return k_tail_; }
  const std::vector<double>& center() const { return center_; }
  const Sample& data() const { return sample_; }
  evt::Estimator estimator() const { return est_; }
  std::size_t skipped_directions() const { return skipped_dirs_; }
  const std::optional<depth::DirectionSet>& directions() const {
    return dirs_;
  }

 private:
  HeavyTailDepthModel() = default;

  Sample sample_;
  std::vector<double> center_;
  std::size_t k_ = 0;
  std::size_t k_tail_ = 0;
  double gamma_hat_ = 0.0;
  double alpha_hat_ = 0.0;
  MdMethod method_ = MdMethod::ray_scaling;
  evt::Estimator est_ = evt::Estimator::hill;

  // random_direction state, one entry per retained direction
  std::optional<depth::DirectionSet> dirs_;
  std::vector<std::size_t> kept_dirs_;
  std::vector<double> b_u_, a_u_;
  std::vector<std::vector<double>> sorted_proj_;
  std::size_t skipped_dirs_ = 0;
};

}  // namespace depthkit::refined

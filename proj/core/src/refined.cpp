#include "depthkit/refined.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "depthkit/errors.hpp"

namespace depthkit::refined {

namespace {

// Generalized Pareto tail (k/n) * max(0, 1 + gamma (w - b) / a)^{-1/gamma},
// with the exponential limit taken near gamma = 0.
double gpd_tail(double kn, double gamma, double a, double b, double w) {
  const double z = (w - b) / a;
  if (std::abs(gamma) < 1e-8) return kn * std::exp(-z);
  const double base = 1.0 + gamma * z;
  if (base <= 0.0) return 0.0;  // only reachable for gamma < 0 past the endpoint
  return kn * std::pow(base, -1.0 / gamma);
}

std::vector<double> column(const Sample& s) {
  return std::vector<double>(s.data.begin(), s.data.end());
}

}  // namespace

TailModel1D fit_tail_1d(const Sample& s, std::size_t k, Side side) {
  if (s.d != 1) throw config_error("fit_tail_1d: sample must be univariate");
  if (k < 1) throw config_error("fit_tail_1d: k must be at least 1");
  if (2 * k >= s.n) {
    throw config_error("fit_tail_1d: k must be below n/2 so the two tails do not overlap");
  }
  std::vector<double> values = column(s);
  if (side == Side::left) {
    for (double& v : values) v = -v;
  }
  const auto ts = evt::make_tail_sample(std::move(values));
  TailModel1D model;
  model.side = side;
  model.k = k;
  model.n = s.n;
  model.b_hat = ts.order(ts.n() - k);
  model.gamma_hat = evt::moment(ts, k);
  model.a_hat = evt::scale(ts, k);
  return model;
}

double tail_prob_1d(const TailModel1D& model, double x) {
  const double w = model.side == Side::right ? x : -x;
  if (!(w >= model.b_hat)) {
    throw config_error("tail_prob_1d: point is inside the fitted threshold");
  }
  const double kn =
      static_cast<double>(model.k) / static_cast<double>(model.n);
  return gpd_tail(kn, model.gamma_hat, model.a_hat, model.b_hat, w);
}

UnivariateRefinedDepth::UnivariateRefinedDepth(const Sample& s, std::size_t k)
    : k_(k),
      lower_glue_(0.0),
      upper_glue_(0.0),
      left_(fit_tail_1d(s, k, Side::left)),
      right_(fit_tail_1d(s, k, Side::right)) {
  sorted_ = column(s);
  std::sort(sorted_.begin(), sorted_.end());
  lower_glue_ = sorted_[k];               // X_{k+1:n}
  upper_glue_ = sorted_[s.n - k - 1];     // X_{n-k:n}
}

double UnivariateRefinedDepth::value(double x) const {
  if (x >= upper_glue_) return tail_prob_1d(right_, x);
  if (x <= lower_glue_) return tail_prob_1d(left_, x);
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  const auto hi = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  const std::size_t le = static_cast<std::size_t>(hi - sorted_.begin());
  const std::size_t ge = sorted_.size() - static_cast<std::size_t>(lo - sorted_.begin());
  return static_cast<double>(std::min(le, ge)) /
         static_cast<double>(sorted_.size());
}

double refined_depth_1d(const Sample& s, std::size_t k, double x) {
  return UnivariateRefinedDepth(s, k).value(x);
}

double projection_tail_prob(double w, double w_threshold, double alpha_hat,
                            std::size_t k, std::size_t n) {
  if (!(w_threshold > 0.0)) {
    throw domain_error("projection_tail_prob: threshold must be positive");
  }
  if (!(alpha_hat > 0.0)) {
    throw config_error("projection_tail_prob: alpha_hat must be positive");
  }
  if (k < 1 || n < 2 || k >= n) {
    throw config_error("projection_tail_prob: need 1 <= k < n");
  }
  if (!(w > 0.0)) {
    throw domain_error("projection_tail_prob: point projection must be positive");
  }
  const double kn = static_cast<double>(k) / static_cast<double>(n);
  return kn * std::pow(w / w_threshold, -alpha_hat);
}

namespace {

std::vector<double> resolve_center(const Sample& s,
                                   std::vector<double> center) {
  if (center.empty()) return std::vector<double>(s.d, 0.0);
  if (center.size() != s.d) {
    throw config_error("center dimension does not match the sample");
  }
  return center;
}

double fit_gamma(const Sample& s, std::span<const double> center,
                 std::size_t k_tail, evt::Estimator est) {
  std::vector<double> norms(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const auto row = s.row(i);
    double sq = 0.0;
    for (std::size_t j = 0; j < s.d; ++j) {
      const double diff = row[j] - center[j];
      sq += diff * diff;
    }
    norms[i] = std::sqrt(sq);
  }
  const auto ts = evt::make_tail_sample(std::move(norms));
  return est == evt::Estimator::hill ? evt::hill(ts, k_tail)
                                     : evt::moment(ts, k_tail);
}

void check_counts(const Sample& s, std::size_t k, std::size_t k_tail) {
  if (k < 1 || k >= s.n) throw config_error("k must lie in [1, n-1]");
  if (k_tail < 1 || k_tail >= s.n) {
    throw config_error("k_tail must lie in [1, n-1]");
  }
}

}  // namespace

HeavyTailDepthModel HeavyTailDepthModel::fit_ray(
    const Sample& s, std::size_t k, std::vector<double> center,
    evt::Estimator est, std::optional<std::size_t> k_tail) {
  if (s.d != 2) throw config_error("ray scaling requires bivariate data");
  HeavyTailDepthModel m;
  m.sample_ = s;
  m.center_ = resolve_center(s, std::move(center));
  m.k_ = k;
  m.k_tail_ = k_tail.value_or(k);
  check_counts(s, m.k_, m.k_tail_);
  m.method_ = MdMethod::ray_scaling;
  m.est_ = est;
  m.gamma_hat_ = fit_gamma(s, m.center_, m.k_tail_, est);
  if (!(m.gamma_hat_ > 0.0)) {
    throw degenerate_data_error(
        "ray scaling needs a positive estimated tail index");
  }
  m.alpha_hat_ = 1.0 / m.gamma_hat_;
  return m;
}

HeavyTailDepthModel HeavyTailDepthModel::fit_random(
    const Sample& s, std::size_t k, depth::DirectionSet dirs,
    std::vector<double> center, evt::Estimator est,
    std::optional<std::size_t> k_tail) {
  if (s.d < 2) throw config_error("random directions require d >= 2");
  if (dirs.d != s.d) {
    throw config_error("direction set dimension does not match the sample");
  }
  if (dirs.count() == 0) throw config_error("direction set is empty");
  HeavyTailDepthModel m;
  m.sample_ = s;
  m.center_ = resolve_center(s, std::move(center));
  m.k_ = k;
  m.k_tail_ = k_tail.value_or(k);
  check_counts(s, m.k_, m.k_tail_);
  m.method_ = MdMethod::random_direction;
  m.est_ = est;
  m.gamma_hat_ = fit_gamma(s, m.center_, m.k_tail_, est);
  m.alpha_hat_ = m.gamma_hat_ > 0.0
                     ? 1.0 / m.gamma_hat_
                     : std::numeric_limits<double>::quiet_NaN();
  m.dirs_ = std::move(dirs);

  const std::size_t n = s.n;
  for (std::size_t di = 0; di < m.dirs_->count(); ++di) {
    const auto u = m.dirs_->dir(di);
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = s.row(i);
      double w = 0.0;
      for (std::size_t j = 0; j < s.d; ++j) w += u[j] * row[j];
      proj[i] = w;
    }
    std::sort(proj.begin(), proj.end());
    const double b = proj[n - k - 1];  // W_{n-k:n}
    if (!(b > 0.0)) {
      ++m.skipped_dirs_;  // tail threshold not positive along this direction
      continue;
    }
    const evt::TailSample ts{proj};
    m.a_u_.push_back(evt::scale(ts, k));
    m.b_u_.push_back(b);
    m.kept_dirs_.push_back(di);
    m.sorted_proj_.push_back(std::move(proj));
  }
  if (m.kept_dirs_.empty()) {
    throw degenerate_data_error(
        "every direction had a nonpositive tail threshold");
  }
  return m;
}

double HeavyTailDepthModel::ray_calibrate(
    std::span<const double> direction) const {
  if (method_ != MdMethod::ray_scaling) {
    throw config_error("ray_calibrate requires a ray-scaling model");
  }
  if (direction.size() != 2) {
    throw config_error("ray_calibrate: direction must be bivariate");
  }
  if (depth::depth_count_2d(sample_, center_[0], center_[1]) <= k_) {
    throw config_error("ray_calibrate: center depth must exceed k/n");
  }
  return depth::ray_count_crossing(sample_, center_, direction, k_);
}

RefinedResult HeavyTailDepthModel::evaluate(
    std::span<const double> point) const {
  if (point.size() != sample_.d) {
    throw config_error("evaluate: point dimension does not match the sample");
  }
  const double n = static_cast<double>(sample_.n);
  const double kn = static_cast<double>(k_) / n;

  if (method_ == MdMethod::ray_scaling) {
    const std::size_t cnt =
        depth::depth_count_2d(sample_, point[0], point[1]);
    const double dn = static_cast<double>(cnt) / n;
    if (cnt >= k_) return {dn, false};
    const double dx = point[0] - center_[0];
    const double dy = point[1] - center_[1];
    const double r = std::hypot(dx, dy);
    if (r == 0.0) return {dn, false};
    const double u[2] = {dx / r, dy / r};
    const double s = ray_calibrate(std::span<const double>(u, 2));
    if (r > s) return {kn * std::pow(r / s, -alpha_hat_), false};
    return {dn, false};
  }

  double best = std::numeric_limits<double>::infinity();
  bool best_clamped = false;
  for (std::size_t idx = 0; idx < kept_dirs_.size(); ++idx) {
    const auto u = dirs_->dir(kept_dirs_[idx]);
    double w = 0.0;
    for (std::size_t j = 0; j < sample_.d; ++j) w += u[j] * point[j];
    double est;
    bool clamped = false;
    if (w >= b_u_[idx]) {
      est = gpd_tail(kn, gamma_hat_, a_u_[idx], b_u_[idx], w);
      if (est == 0.0) {
        // Past the fitted endpoint (gamma_hat < 0) the tail formula
        // collapses to 0 and would tie every such point; continue it
        // strictly decreasing below the smallest normal double so rank
        // consumers keep ordering by standardized exceedance.
        est = std::numeric_limits<double>::min() /
              (1.0 + (w - b_u_[idx]) / a_u_[idx]);
        clamped = true;
      }
    } else {
      const auto& proj = sorted_proj_[idx];
      const auto lo = std::lower_bound(proj.begin(), proj.end(), w);
      est = static_cast<double>(proj.end() - lo) / n;
    }
    if (est < best) {
      best = est;
      best_clamped = clamped;
    }
  }
  if (!std::isfinite(best)) {
    return {std::numeric_limits<double>::denorm_min(), true};
  }
  return {best, best_clamped};
}

Contour HeavyTailDepthModel::depth_contour(double level,
                                           std::size_t n_angles) const {
  if (method_ != MdMethod::ray_scaling) {
    throw config_error("depth_contour requires a ray-scaling model");
  }
  if (n_angles < 1) throw config_error("depth_contour: need at least one angle");
  const double kn = static_cast<double>(k_) / static_cast<double>(sample_.n);
  if (!(level > 0.0) || level > kn) {
    throw config_error("depth_contour: level must lie in (0, k/n]");
  }
  const double factor = std::pow(kn / level, 1.0 / alpha_hat_);
  Contour c;
  c.level = level;
  c.center = center_;
  c.theta.resize(n_angles);
  c.radius.resize(n_angles);
  for (std::size_t j = 0; j < n_angles; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(n_angles);
    const double u[2] = {std::cos(theta), std::sin(theta)};
    const double s = ray_calibrate(std::span<const double>(u, 2));
    c.theta[j] = theta;
    c.radius[j] = s * factor;
  }
  return c;
}

}  // namespace depthkit::refined

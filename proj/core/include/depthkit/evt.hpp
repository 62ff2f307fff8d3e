#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace depthkit::evt {

/// Ascending-sorted univariate data for tail estimation.
struct TailSample {
  std::vector<double> sorted;

  std::size_t n() const { return sorted.size(); }
  /// Order statistic X_{i:n}, i in [1, n].
  double order(std::size_t i) const { return sorted[i - 1]; }
};

/// Sorts and wraps; needs at least 3 observations.
TailSample make_tail_sample(std::vector<double> values);

enum class Estimator { hill, moment };

Estimator estimator_from_name(const std::string& name);
std::string estimator_name(Estimator e);

/// Hill estimator of a positive extreme value index from the top k + 1
/// order statistics: mean of log X_{n-i:n} - log X_{n-k:n}, i = 0..k-1.
/// Requires 1 <= k <= n - 1 and X_{n-k:n} > 0 (domain_error otherwise).
double hill(const TailSample& ts, std::size_t k);

/// Moment (Dekkers-Einmahl-de Haan) estimator, valid for any real index:
/// gamma = M1 + 1 - (1/2) / (1 - M1^2 / M2).
double moment(const TailSample& ts, std::size_t k);

/// Companion scale estimator a_hat = X_{n-k:n} * M1 * (1 - gamma_minus),
/// where gamma_minus = 1 - (1/2) / (1 - M1^2 / M2).
double scale(const TailSample& ts, std::size_t k);

/// w_gamma(t) = t^{-gamma} * int_1^t s^{gamma-1} log s ds for t >= 1,
/// continuous in gamma through 0 (where it equals log^2(t) / 2).
double w_gamma(double gamma, double t);

struct KPathEntry {
  std::size_t k = 0;
  std::optional<double> gamma_hat;  // empty when the estimator failed at k
};

/// gamma_hat(k) for k = k_min..k_max; domain/degenerate failures at a given
/// k are recorded as missing rather than thrown.
std::vector<KPathEntry> k_path(const TailSample& ts, Estimator est,
                               std::size_t k_min, std::size_t k_max);

/// Earliest length-`window` run of present path entries whose standard
/// deviation is within 1.5x the smallest windowed deviation; returns the k
/// of that window's midpoint.  Ties resolve to the smallest k.
std::size_t select_k_stable(const std::vector<KPathEntry>& path,
                            std::size_t window = 15);

}  // namespace depthkit::evt

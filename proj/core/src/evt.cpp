#include "depthkit/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"

namespace depthkit::evt {

TailSample make_tail_sample(std::vector<double> values) {
  if (values.size() < 3) {
    throw config_error("tail sample needs at least 3 observations");
  }
  std::sort(values.begin(), values.end());
  return TailSample{std::move(values)};
}

Estimator estimator_from_name(const std::string& name) {
  if (name == "hill") return Estimator::hill;
  if (name == "moment") return Estimator::moment;
  throw config_error("unknown tail estimator: " + name);
}

std::string estimator_name(Estimator e) {
  return e == Estimator::hill ? "hill" : "moment";
}

namespace {

void check_k(const TailSample& ts, std::size_t k) {
  if (k < 1 || k > ts.n() - 1) {
    throw config_error("tail estimator: k must lie in [1, n-1]");
  }
  if (!(ts.order(ts.n() - k) > 0.0)) {
    throw domain_error("tail estimator: threshold order statistic is not positive");
  }
}

// Log-moments M_j = (1/k) sum_{i=0}^{k-1} (log X_{n-i:n} - log X_{n-k:n})^j.
void log_moments(const TailSample& ts, std::size_t k, double& m1, double& m2) {
  const std::size_t n = ts.n();
  const double log_thr = std::log(ts.order(n - k));
  m1 = 0.0;
  m2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = std::log(ts.order(n - i)) - log_thr;
    m1 += e;
    m2 += e * e;
  }
  m1 /= static_cast<double>(k);
  m2 /= static_cast<double>(k);
}

}  // namespace

double hill(const TailSample& ts, std::size_t k) {
  check_k(ts, k);
  double m1, m2;
  log_moments(ts, k, m1, m2);
  return m1;
}

double moment(const TailSample& ts, std::size_t k) {
  check_k(ts, k);
  double m1, m2;
  log_moments(ts, k, m1, m2);
  if (m2 == 0.0) {
    throw degenerate_data_error("moment estimator: top order statistics are all tied");
  }
  const double denom = 1.0 - m1 * m1 / m2;
  if (denom == 0.0) {
    throw degenerate_data_error("moment estimator: degenerate log-moment ratio");
  }
  return m1 + 1.0 - 0.5 / denom;
}

double scale(const TailSample& ts, std::size_t k) {
  check_k(ts, k);
  double m1, m2;
  log_moments(ts, k, m1, m2);
  if (m2 == 0.0) {
    throw degenerate_data_error("scale estimator: top order statistics are all tied");
  }
  const double denom = 1.0 - m1 * m1 / m2;
  if (denom == 0.0) {
    throw degenerate_data_error("scale estimator: degenerate log-moment ratio");
  }
  const double gamma_minus = 1.0 - 0.5 / denom;
  return ts.order(ts.n() - k) * m1 * (1.0 - gamma_minus);
}

double w_gamma(double gamma, double t) {
  if (!(t >= 1.0)) throw config_error("w_gamma: t must be >= 1");
  const double lt = std::log(t);
  const double x = gamma * lt;
  if (std::abs(x) < 0.5) {
    // Series sum_{j>=0} (-gamma)^j log^{j+2}(t) / (j+2)!, stable through
    // gamma = 0 where the closed form cancels catastrophically.
    double term = lt * lt / 2.0;  // j = 0
    double total = term;
    for (int j = 1; j <= 40; ++j) {
      term *= -x / static_cast<double>(j + 2);
      total += term;
      if (std::abs(term) < 1e-18 * std::abs(total)) break;
    }
    return total;
  }
  // Closed antiderivative: log(t)/gamma + (t^{-gamma} - 1) / gamma^2.
  return lt / gamma + std::expm1(-x) / (gamma * gamma);
}

std::vector<KPathEntry> k_path(const TailSample& ts, Estimator est,
                               std::size_t k_min, std::size_t k_max) {
  if (k_min < 1 || k_min > k_max || k_max > ts.n() - 1) {
    throw config_error("k_path: need 1 <= k_min <= k_max <= n-1");
  }
  std::vector<KPathEntry> path;
  path.reserve(k_max - k_min + 1);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    KPathEntry entry{k, std::nullopt};
    try {
      entry.gamma_hat = est == Estimator::hill ? hill(ts, k) : moment(ts, k);
    } catch (const domain_error&) {
    } catch (const degenerate_data_error&) {
    }
    path.push_back(entry);
  }
  return path;
}

std::size_t select_k_stable(const std::vector<KPathEntry>& path,
                            std::size_t window) {
  if (window < 3) throw config_error("select_k_stable: window must be >= 3");
  std::vector<std::size_t> ks;
  std::vector<double> gs;
  for (const auto& e : path) {
    if (e.gamma_hat) {
      ks.push_back(e.k);
      gs.push_back(*e.gamma_hat);
    }
  }
  if (gs.size() < window) {
    throw degenerate_data_error("select_k_stable: fewer present entries than the window");
  }
  const std::size_t n_win = gs.size() - window + 1;
  std::vector<double> sd(n_win);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < n_win; ++w) {
    sd[w] = num::stddev(std::span<const double>(gs.data() + w, window));
    best = std::min(best, sd[w]);
  }
  for (std::size_t w = 0; w < n_win; ++w) {
    if (sd[w] <= 1.5 * best) {
      return ks[w + (window - 1) / 2];
    }
  }
  throw numeric_error("select_k_stable: no qualifying window");  // unreachable
}

}  // namespace depthkit::evt

#include "depthkit/spc.hpp"

#include <algorithm>
#include <cmath>

#include "depthkit/depth.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/parallel.hpp"
#include "depthkit/rng.hpp"

namespace depthkit::spc {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw config_error("chart alpha must lie in (0, 1)");
  }
}

// Gauss-Jordan inverse with partial pivoting; the pivot floor is scaled to
// the matrix magnitude so singular covariances are caught at any scale.
std::vector<double> invert(std::vector<double> a, std::size_t d) {
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::abs(v));
  const double floor = std::max(amax, 1.0) * 1e-12;
  std::vector<double> inv(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = 1.0;
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(a[r * d + col]) > std::abs(a[pivot * d + col])) pivot = r;
    }
    if (!(std::abs(a[pivot * d + col]) > floor)) {
      throw numeric_error("parametric chart: covariance matrix is singular");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < d; ++j) {
        std::swap(a[pivot * d + j], a[col * d + j]);
        std::swap(inv[pivot * d + j], inv[col * d + j]);
      }
    }
    const double s = 1.0 / a[col * d + col];
    for (std::size_t j = 0; j < d; ++j) {
      a[col * d + j] *= s;
      inv[col * d + j] *= s;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r * d + col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        a[r * d + j] -= f * a[col * d + j];
        inv[r * d + j] -= f * inv[col * d + j];
      }
    }
  }
  return inv;
}

}  // namespace

ChartModel fit_parametric_chart(const Sample& reference, double alpha) {
  check_alpha(alpha);
  const std::size_t n = reference.n;
  const std::size_t d = reference.d;
  if (n <= d) {
    throw config_error("parametric chart needs more observations than dimensions");
  }
  ChartModel chart;
  chart.kind = ChartKind::parametric;
  chart.alpha = alpha;
  chart.d = d;
  chart.n_ref = n;
  chart.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = reference.row(i);
    for (std::size_t j = 0; j < d; ++j) chart.mean[j] += row[j];
  }
  for (double& m : chart.mean) m /= static_cast<double>(n);

  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = reference.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      const double da = row[a] - chart.mean[a];
      for (std::size_t b = a; b < d; ++b) {
        cov[a * d + b] += da * (row[b] - chart.mean[b]);
      }
    }
  }
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      cov[a * d + b] /= static_cast<double>(n - 1);
      cov[b * d + a] = cov[a * d + b];
    }
  }
  chart.cov_inv = invert(std::move(cov), d);

  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  const double fq = num::f_quantile_upper(dd, nd - dd, alpha);
  chart.threshold = dd * (nd + 1.0) * (nd - 1.0) / (nd * (nd - dd)) * fq;
  return chart;
}

ChartModel fit_depth_chart(const Sample& reference, double alpha,
                           std::string engine, DepthFn depth_fn) {
  check_alpha(alpha);
  if (!depth_fn) throw config_error("depth chart needs a depth engine");
  ChartModel chart;
  chart.kind = ChartKind::depth_rank;
  chart.alpha = alpha;
  chart.d = reference.d;
  chart.n_ref = reference.n;
  chart.engine = std::move(engine);
  chart.depth_fn = std::move(depth_fn);
  chart.reference_depths.resize(reference.n);
  par::parallel_for(reference.n, [&](std::size_t i) {
    chart.reference_depths[i] = chart.depth_fn(reference.row(i));
  });
  std::sort(chart.reference_depths.begin(), chart.reference_depths.end());
  return chart;
}

double t_squared(const ChartModel& chart, std::span<const double> y) {
  if (chart.kind != ChartKind::parametric) {
    throw config_error("t_squared needs a parametric chart");
  }
  if (y.size() != chart.d) throw config_error("t_squared: dimension mismatch");
  const std::size_t d = chart.d;
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double da = y[a] - chart.mean[a];
    for (std::size_t b = 0; b < d; ++b) {
      total += da * chart.cov_inv[a * d + b] * (y[b] - chart.mean[b]);
    }
  }
  return total;
}

bool signal(const ChartModel& chart, std::span<const double> y,
            std::optional<double> depth_of_y) {
  if (chart.kind == ChartKind::parametric) {
    if (depth_of_y) {
      throw config_error("parametric chart does not take a depth value");
    }
    return t_squared(chart, y) > chart.threshold;
  }
  if (!depth_of_y) {
    throw config_error("depth_rank chart needs the point's depth value");
  }
  return depth::depth_rank(chart.reference_depths, *depth_of_y) < chart.alpha;
}

double false_alarm_rate(const ChartModel& chart, const Sample& stream,
                        std::span<const double> depths) {
  if (stream.d != chart.d) {
    throw config_error("false_alarm_rate: stream dimension mismatch");
  }
  if (stream.n == 0) throw config_error("false_alarm_rate: empty stream");
  std::vector<char> hits(stream.n, 0);
  if (chart.kind == ChartKind::parametric) {
    if (!depths.empty()) {
      throw config_error("parametric chart does not take depth values");
    }
    par::parallel_for(stream.n, [&](std::size_t i) {
      hits[i] = signal(chart, stream.row(i)) ? 1 : 0;
    });
  } else if (!depths.empty()) {
    if (depths.size() != stream.n) {
      throw config_error("false_alarm_rate: one depth per stream row required");
    }
    for (std::size_t i = 0; i < stream.n; ++i) {
      hits[i] = signal(chart, stream.row(i), depths[i]) ? 1 : 0;
    }
  } else {
    par::parallel_for(stream.n, [&](std::size_t i) {
      hits[i] = signal(chart, stream.row(i), chart.depth_fn(stream.row(i))) ? 1 : 0;
    });
  }
  std::size_t signaled = 0;
  for (char h : hits) signaled += h;
  return static_cast<double>(signaled) / static_cast<double>(stream.n);
}

RunResult average_run_length(const ChartModel& chart,
                             const DistSpec& shift_spec, std::size_t reps,
                             std::size_t cap, std::uint64_t seed) {
  if (reps < 1) throw config_error("average_run_length: need at least one run");
  if (cap < 1) throw config_error("average_run_length: cap must be at least 1");
  shift_spec.validate();
  if (shift_spec.dim() != chart.d) {
    throw config_error("average_run_length: process dimension mismatch");
  }
  RunResult result;
  result.run_lengths.assign(reps, 0);
  result.capped.assign(reps, false);
  par::parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t rep_seed = mix_seed(seed, r);
    std::size_t drawn = 0;
    std::size_t block = 16;
    std::uint64_t block_idx = 0;
    while (drawn < cap) {
      const std::size_t want = std::min(block, cap - drawn);
      const Sample batch =
          dist::sample(shift_spec, want, mix_seed(rep_seed, block_idx));
      for (std::size_t i = 0; i < batch.n; ++i) {
        ++drawn;
        const auto y = batch.row(i);
        const bool hit = chart.kind == ChartKind::parametric
                             ? signal(chart, y)
                             : signal(chart, y, chart.depth_fn(y));
        if (hit) {
          result.run_lengths[r] = drawn;
          return;
        }
      }
      ++block_idx;
      block = std::min<std::size_t>(block * 2, 1024);
    }
    result.run_lengths[r] = cap;
    result.capped[r] = true;
  });
  double total = 0.0;
  for (std::size_t rl : result.run_lengths) total += static_cast<double>(rl);
  result.arl = total / static_cast<double>(reps);
  return result;
}

}  // namespace depthkit::spc

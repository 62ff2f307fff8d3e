#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depthkit/types.hpp"

namespace depthkit::spc {

/// A depth evaluator for the rank chart: oracle depth, empirical depth, or
/// the refined estimator.  Must be pure and thread-safe.
using DepthFn = std::function<double(std::span<const double>)>;

enum class ChartKind { parametric, depth_rank };

/// An in-control chart fitted on a reference sample.  Immutable after fit.
struct ChartModel {
  ChartKind kind = ChartKind::parametric;
  double alpha = 0.0;
  std::size_t d = 0;
  std::size_t n_ref = 0;

  // parametric: Hotelling T^2 against a scaled F quantile
  std::vector<double> mean;
  std::vector<double> cov_inv;  // d x d row-major
  double threshold = 0.0;

  // depth_rank: ascending reference depths plus the engine that scored them
  std::vector<double> reference_depths;
  std::string engine;
  DepthFn depth_fn;
};

/// T^2 chart: signals when (y - mean)' S^{-1} (y - mean) exceeds
/// d(n+1)(n-1)/(n(n-d)) times the upper-alpha F(d, n-d) quantile.
ChartModel fit_parametric_chart(const Sample& reference, double alpha);

/// Depth-rank chart: stores the reference depths under `depth_fn` sorted
/// ascending; a future point signals when the fraction of reference depths
/// strictly below its own depth is less than alpha.
ChartModel fit_depth_chart(const Sample& reference, double alpha,
                           std::string engine, DepthFn depth_fn);

double t_squared(const ChartModel& chart, std::span<const double> y);

/// depth_of_y is required for depth_rank charts and forbidden for
/// parametric ones.
bool signal(const ChartModel& chart, std::span<const double> y,
            std::optional<double> depth_of_y = std::nullopt);

/// Fraction of stream points that signal.  For depth_rank charts the depths
/// are taken from `depths` when nonempty (one per stream row), otherwise
/// computed with the chart's own engine.
double false_alarm_rate(const ChartModel& chart, const Sample& stream,
                        std::span<const double> depths = {});

struct RunResult {
  std::vector<std::size_t> run_lengths;
  std::vector<bool> capped;  // run hit the cap without a signal
  double arl = 0.0;          // mean run length, capped runs at the cap
};

/// First-passage ARL estimate: `reps` independent runs drawing from
/// shift_spec until the chart signals (run length = index of the first
/// signal, 1-based) or `cap` draws pass.  Replicate r uses the seed
/// mix_seed(seed, r), so results are independent of evaluation order.
RunResult average_run_length(const ChartModel& chart,
                             const DistSpec& shift_spec, std::size_t reps,
                             std::size_t cap, std::uint64_t seed);

}  // namespace depthkit::spc

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "depthkit/types.hpp"

namespace depthkit::dd {

enum class Label { F, G };

/// A point's two depth coordinates in the DD-plot.
struct DDPoint {
  double depth_f = 0.0;
  double depth_g = 0.0;
  Label label = Label::F;
};

/// Linear DD rule through the origin: assign G when depth_g > slope *
/// depth_f, F when below, coin flip on the line.  slope may be +infinity
/// (then points with depth_f > 0 go to F and depth_f = 0, depth_g > 0 to G).
struct DDModel {
  double slope = 0.0;
  std::string engine;
  double training_error = 0.0;  // ties weighted 1/2
};

using DepthFn = std::function<double(std::span<const double>)>;

/// Depth coordinates of every row of `points` under the two fitted depth
/// engines, labeled as coming from the given class.
std::vector<DDPoint> dd_coordinates(const Sample& points,
                                    const DepthFn& depth_wrt_f,
                                    const DepthFn& depth_wrt_g, Label label);

/// Exact search over the finite candidate set {depth_g/depth_f : depth_f >
/// 0} plus {0, +infinity}: the empirical 0-1 loss is piecewise constant in
/// the slope, so some candidate attains the optimum.  Ties in training error
/// go to the smaller slope.
DDModel fit_linear_dd(std::span<const DDPoint> train, std::string engine = "");

/// Applies the fitted rule; an exact tie is resolved by a fair coin drawn
/// from `seed` (callers derive it per point, e.g. mix_seed(run_seed, index)).
Label classify(const DDModel& model, const DDPoint& p, std::uint64_t seed);

/// True where a test row has exact empirical depth zero with respect to both
/// training samples (outside both convex hulls).  Bivariate only.
std::vector<bool> zero_hull_mask(const Sample& test, const Sample& sample_f,
                                 const Sample& sample_g);

}  // namespace depthkit::dd

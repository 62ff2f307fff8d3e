#include "depthkit/ddclass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthkit/depth.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/parallel.hpp"
#include "depthkit/rng.hpp"

namespace depthkit::dd {

namespace {

enum class Outcome { f, g, tie };

Outcome apply_rule(double slope, double depth_f, double depth_g) {
  if (std::isinf(slope)) {
    if (depth_f > 0.0) return Outcome::f;
    if (depth_g > 0.0) return Outcome::g;
    return Outcome::tie;
  }
  const double cut = slope * depth_f;
  if (depth_g > cut) return Outcome::g;
  if (depth_g < cut) return Outcome::f;
  return Outcome::tie;
}

double training_error_at(double slope, std::span<const DDPoint> train) {
  double err = 0.0;
  for (const auto& p : train) {
    const Outcome o = apply_rule(slope, p.depth_f, p.depth_g);
    if (o == Outcome::tie) {
      err += 0.5;
    } else if ((o == Outcome::g) != (p.label == Label::G)) {
      err += 1.0;
    }
  }
  return err / static_cast<double>(train.size());
}

}  // namespace

std::vector<DDPoint> dd_coordinates(const Sample& points,
                                    const DepthFn& depth_wrt_f,
                                    const DepthFn& depth_wrt_g, Label label) {
  if (!depth_wrt_f || !depth_wrt_g) {
    throw config_error("dd_coordinates: both depth engines are required");
  }
  std::vector<DDPoint> out(points.n);
  par::parallel_for(points.n, [&](std::size_t i) {
    const auto row = points.row(i);
    out[i] = DDPoint{depth_wrt_f(row), depth_wrt_g(row), label};
  });
  return out;
}

DDModel fit_linear_dd(std::span<const DDPoint> train, std::string engine) {
  bool has_f = false, has_g = false, any_nonzero = false;
  for (const auto& p : train) {
    if (!std::isfinite(p.depth_f) || !std::isfinite(p.depth_g) ||
        p.depth_f < 0.0 || p.depth_g < 0.0) {
      throw config_error("fit_linear_dd: depths must be finite and nonnegative");
    }
    (p.label == Label::F ? has_f : has_g) = true;
    if (p.depth_f > 0.0 || p.depth_g > 0.0) any_nonzero = true;
  }
  if (!has_f || !has_g) {
    throw config_error("fit_linear_dd: need training points of both classes");
  }
  if (!any_nonzero) {
    throw degenerate_data_error("fit_linear_dd: every training depth is zero");
  }

  std::vector<double> candidates;
  candidates.reserve(train.size() + 2);
  candidates.push_back(0.0);
  for (const auto& p : train) {
    if (p.depth_f > 0.0) candidates.push_back(p.depth_g / p.depth_f);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  candidates.push_back(std::numeric_limits<double>::infinity());

  DDModel model;
  model.engine = std::move(engine);
  model.slope = candidates.front();
  model.training_error = training_error_at(candidates.front(), train);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double err = training_error_at(candidates[i], train);
    if (err < model.training_error) {
      model.training_error = err;
      model.slope = candidates[i];
    }
  }
  return model;
}

Label classify(const DDModel& model, const DDPoint& p, std::uint64_t seed) {
  switch (apply_rule(model.slope, p.depth_f, p.depth_g)) {
    case Outcome::f:
      return Label::F;
    case Outcome::g:
      return Label::G;
    case Outcome::tie:
      break;
  }
  Rng rng(seed);
  return rng.uniform() < 0.5 ? Label::G : Label::F;
}

std::vector<bool> zero_hull_mask(const Sample& test, const Sample& sample_f,
                                 const Sample& sample_g) {
  if (test.d != 2 || sample_f.d != 2 || sample_g.d != 2) {
    throw config_error("zero_hull_mask: all samples must be bivariate");
  }
  std::vector<char> mask(test.n, 0);
  par::parallel_for(test.n, [&](std::size_t i) {
    const double x = test.data[2 * i];
    const double y = test.data[2 * i + 1];
    mask[i] = depth::depth_count_2d(sample_f, x, y) == 0 &&
              depth::depth_count_2d(sample_g, x, y) == 0;
  });
  return std::vector<bool>(mask.begin(), mask.end());
}

}  // namespace depthkit::dd

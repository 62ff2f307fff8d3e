#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depthkit/types.hpp"

namespace depthkit::dist {

/// Inner radius of the two piecewise (elliptical / clover) densities:
/// the positive root of the normalization identity
/// (1 + (5/2) s)^2 = (1 + s)^3 with s = r0^6.  Root-found once, ~1.24805.
double r0();

/// Diagnostics filled by rejection samplers; other families leave it alone.
struct SampleDiagnostics {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

/// Draws n iid rows.  Deterministic for fixed (spec, n, seed).
Sample sample(const DistSpec& spec, std::size_t n, std::uint64_t seed,
              SampleDiagnostics* diag = nullptr);

/// Density of the spec at a point (dimension-checked).
double pdf(const DistSpec& spec, std::span<const double> point);

/// CDF of a one-dimensional spec.
double cdf_1d(const DistSpec& spec, double x);

/// Population half-space depth at a point.  Closed form for the normal,
/// Cauchy, t2 and Burr families; numeric quadrature for the elliptical and
/// clover densities (1-D marginal integral resp. a 720-direction minimum of
/// polar tail integrals).
double true_depth(const DistSpec& spec, std::span<const double> point);

/// The point x = shift + scale * t * u on the ray through `direction` with
/// true_depth(spec, x) = level.  Closed form where the family allows it,
/// otherwise bisection on true_depth along the ray; throws numeric_error if
/// 200 bisection steps cannot pin the level to 1e-8.
std::vector<double> quantile_point(const DistSpec& spec, double level,
                                   std::span<const double> direction);

}  // namespace depthkit::dist

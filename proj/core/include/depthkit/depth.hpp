#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "depthkit/types.hpp"

namespace depthkit::depth {

/// Half-space depth counts use closed half-spaces throughout: a point on the
/// boundary hyperplane belongs to both sides, and a query coincident with
/// data points always counts them.

/// min(#{x_i <= x}, #{x_i >= x}) over an unsorted 1-D sample.
std::size_t depth_count_1d(std::span<const double> data, double x);
double depth_1d(const Sample& s, double x);

/// Exact bivariate depth count by angular sweep, O(n log n) per query.
std::size_t depth_count_2d(const Sample& s, double qx, double qy);
double depth_2d_exact(const Sample& s, std::span<const double> point);

/// A fixed set of unit directions in R^d (seed-derived standard normals,
/// normalized), reusable across queries.
struct DirectionSet {
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::vector<double> dirs;  // count x d row-major

  std::size_t count() const { return d == 0 ? 0 : dirs.size() / d; }
  std::span<const double> dir(std::size_t i) const {
    return {dirs.data() + i * d, d};
  }
  static DirectionSet random(std::size_t count, std::size_t d,
                             std::uint64_t seed);
  static DirectionSet angles(std::span<const double> thetas);  // d = 2
};

/// Approximate depth: minimum one-sided count over the given directions.
/// Upper-bounds the exact depth.
std::size_t depth_count_random(const Sample& s, std::span<const double> point,
                               const DirectionSet& dirs);
double depth_random(const Sample& s, std::span<const double> point,
                    const DirectionSet& dirs);

/// Reference oracle for d = 2, n <= 200: enumerates candidate directions
/// (edge normals and point directions, each nudged by +-1e-9 rad) and takes
/// the smallest count.  Matches depth_count_2d on generic data.
std::size_t depth_count_bruteforce(const Sample& s,
                                   std::span<const double> point);
double depth_bruteforce(const Sample& s, std::span<const double> point);

/// Fraction of a sorted reference strictly below `value`.
double depth_rank(std::span<const double> sorted_reference, double value);

/// Largest t >= 0 with depth_count_2d(s, center + t * direction) >= m, found
/// by doubling from the farthest data projection and bisecting to relative
/// 1e-9.  The count along a ray from a point of count >= m is nonincreasing
/// (depth upper level sets are convex), so the crossing is well defined.
/// Requires d = 2, m >= 1, and count >= m at the center itself.
double ray_count_crossing(const Sample& s, std::span<const double> center,
                          std::span<const double> direction, std::size_t m);

}  // namespace depthkit::depth

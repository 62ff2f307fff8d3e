#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depthkit {

/// The ten built-in simulation families.  Suffix is the dimension.
enum class Family {
  normal1d,
  cauchy1d,
  t2_1d,
  burr1d,
  normal2d,
  sphcauchy2d,
  elliptical2d,
  clover2d,
  sphcauchy3d,
  sphcauchy4d,
};

std::size_t family_dim(Family f);
std::string family_name(Family f);
Family family_from_name(const std::string& name);  // config_error on unknown

/// A distribution instance: base family, coordinatewise shift, and a single
/// positive scale factor applied to every coordinate.
struct DistSpec {
  Family family = Family::normal2d;
  std::vector<double> shift;  // empty means zero
  double scale = 1.0;

  std::size_t dim() const { return family_dim(family); }
  double shift_at(std::size_t j) const {
    return shift.empty() ? 0.0 : shift[j];
  }
  /// Throws config_error on bad shift length or nonpositive scale.
  void validate() const;
};

/// An n x d data matrix in row-major order, remembering how it was drawn
/// when it came from a generator.
struct Sample {
  std::vector<double> data;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<DistSpec> dist;
  std::uint64_t seed = 0;

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * d, d};
  }
};

}  // namespace depthkit

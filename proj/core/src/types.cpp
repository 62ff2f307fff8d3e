#include "depthkit/types.hpp"

#include <array>
#include <utility>

#include "depthkit/errors.hpp"

namespace depthkit {

namespace {

constexpr std::array<std::pair<Family, const char*>, 10> kFamilies = {{
    {Family::normal1d, "normal1d"},
    {Family::cauchy1d, "cauchy1d"},
    {Family::t2_1d, "t2_1d"},
    {Family::burr1d, "burr1d"},
    {Family::normal2d, "normal2d"},
    {Family::sphcauchy2d, "sphcauchy2d"},
    {Family::elliptical2d, "elliptical2d"},
    {Family::clover2d, "clover2d"},
    {Family::sphcauchy3d, "sphcauchy3d"},
    {Family::sphcauchy4d, "sphcauchy4d"},
}};

}  // namespace

std::size_t family_dim(Family f) {
  switch (f) {
    case Family::normal1d:
    case Family::cauchy1d:
    case Family::t2_1d:
    case Family::burr1d:
      return 1;
    case Family::normal2d:
    case Family::sphcauchy2d:
    case Family::elliptical2d:
    case Family::clover2d:
      return 2;
    case Family::sphcauchy3d:
      return 3;
    case Family::sphcauchy4d:
      return 4;
  }
  throw config_error("family_dim: unknown family");
}

std::string family_name(Family f) {
  for (const auto& [fam, name] : kFamilies) {
    if (fam == f) return name;
  }
  throw config_error("family_name: unknown family");
}

Family family_from_name(const std::string& name) {
  for (const auto& [fam, fname] : kFamilies) {
    if (name == fname) return fam;
  }
  throw config_error("unknown distribution family: " + name);
}

void DistSpec::validate() const {
  if (!(scale > 0.0)) {
    throw config_error("DistSpec: scale must be positive");
  }
  if (!shift.empty() && shift.size() != dim()) {
    throw config_error("DistSpec: shift length does not match dimension");
  }
}

}  // namespace depthkit

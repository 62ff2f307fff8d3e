#include "depthkit/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "depthkit/errors.hpp"
#include "depthkit/rng.hpp"

namespace depthkit::depth {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(const Sample& s, std::size_t d, const char* what) {
  if (s.d != d) throw config_error(std::string(what) + ": wrong dimension");
  if (s.n == 0) throw config_error(std::string(what) + ": empty sample");
}

}  // namespace

std::size_t depth_count_1d(std::span<const double> data, double x) {
  std::size_t le = 0, ge = 0;
  for (double v : data) {
    if (v <= x) ++le;
    if (v >= x) ++ge;
  }
  return std::min(le, ge);
}

double depth_1d(const Sample& s, double x) {
  require_dim(s, 1, "depth_1d");
  return static_cast<double>(depth_count_1d(s.data, x)) /
         static_cast<double>(s.n);
}

std::size_t depth_count_2d(const Sample& s, double qx, double qy) {
  require_dim(s, 2, "depth_2d");
  std::size_t coincident = 0;
  std::vector<double> ang;
  ang.reserve(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double dx = s.data[2 * i] - qx;
    const double dy = s.data[2 * i + 1] - qy;
    if (dx == 0.0 && dy == 0.0) {
      ++coincident;
    } else {
      ang.push_back(std::atan2(dy, dx));
    }
  }
  if (ang.empty()) return coincident;
  std::sort(ang.begin(), ang.end());

  // Closed half-planes through the query contain the points whose angle lies
  // in a closed arc of length pi.  The count as the arc rotates is piecewise
  // constant and, at a rotation where a data angle sits exactly on an arc
  // endpoint, is >= the neighbouring open-interval counts (closed arcs gain
  // the touching point).  The minimum is therefore attained strictly between
  // consecutive breakpoints, so it suffices to evaluate midpoint arcs.
  std::vector<double> bp;
  bp.reserve(2 * ang.size());
  for (double a : ang) {
    bp.push_back(a);
    double b = a - kPi;
    if (b < -kPi) b += 2.0 * kPi;
    bp.push_back(b);
  }
  std::sort(bp.begin(), bp.end());

  auto arc_count = [&](double lo) {
    // #angles in the closed arc [lo, lo + pi], wrapping at pi.
    const double hi = lo + kPi;
    if (hi <= kPi) {
      return static_cast<std::size_t>(
          std::upper_bound(ang.begin(), ang.end(), hi) -
          std::lower_bound(ang.begin(), ang.end(), lo));
    }
    const double hi_wrapped = hi - 2.0 * kPi;
    const auto tail = ang.end() - std::lower_bound(ang.begin(), ang.end(), lo);
    const auto head =
        std::upper_bound(ang.begin(), ang.end(), hi_wrapped) - ang.begin();
    return static_cast<std::size_t>(tail + head);
  };

  std::size_t best = ang.size();
  for (std::size_t j = 0; j < bp.size(); ++j) {
    const double a = bp[j];
    const double b = j + 1 < bp.size() ? bp[j + 1] : bp[0] + 2.0 * kPi;
    double mid = 0.5 * (a + b);
    if (mid >= kPi) mid -= 2.0 * kPi;
    best = std::min(best, arc_count(mid));
  }
  return coincident + best;
}

double depth_2d_exact(const Sample& s, std::span<const double> point) {
  if (point.size() != 2) throw config_error("depth_2d_exact: point must be 2-D");
  return static_cast<double>(depth_count_2d(s, point[0], point[1])) /
         static_cast<double>(s.n);
}

DirectionSet DirectionSet::random(std::size_t count, std::size_t d,
                                  std::uint64_t seed) {
  if (count == 0 || d == 0) {
    throw config_error("DirectionSet: count and dimension must be positive");
  }
  DirectionSet ds;
  ds.d = d;
  ds.seed = seed;
  ds.dirs.resize(count * d);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = rng.normal();
        ds.dirs[i * d + j] = g;
        norm += g * g;
      }
      norm = std::sqrt(norm);
    } while (!(norm > 1e-12));
    for (std::size_t j = 0; j < d; ++j) ds.dirs[i * d + j] /= norm;
  }
  return ds;
}

DirectionSet DirectionSet::angles(std::span<const double> thetas) {
  DirectionSet ds;
  ds.d = 2;
  ds.dirs.reserve(2 * thetas.size());
  for (double t : thetas) {
    ds.dirs.push_back(std::cos(t));
    ds.dirs.push_back(std::sin(t));
  }
  return ds;
}

std::size_t depth_count_random(const Sample& s, std::span<const double> point,
                               const DirectionSet& dirs) {
  if (s.d < 2) throw config_error("depth_random: needs dimension >= 2");
  if (dirs.d != s.d) throw config_error("depth_random: direction dimension mismatch");
  if (dirs.count() == 0) throw config_error("depth_random: empty direction set");
  if (point.size() != s.d) throw config_error("depth_random: point dimension mismatch");
  std::size_t best = s.n;
  for (std::size_t m = 0; m < dirs.count(); ++m) {
    const auto u = dirs.dir(m);
    double t = 0.0;
    for (std::size_t j = 0; j < s.d; ++j) t += u[j] * point[j];
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < s.n; ++i) {
      double p = 0.0;
      const double* row = s.data.data() + i * s.d;
      for (std::size_t j = 0; j < s.d; ++j) p += u[j] * row[j];
      if (p >= t) ++cnt;
    }
    best = std::min(best, cnt);
    if (best == 0) break;
  }
  return best;
}

double depth_random(const Sample& s, std::span<const double> point,
                    const DirectionSet& dirs) {
  return static_cast<double>(depth_count_random(s, point, dirs)) /
         static_cast<double>(s.n);
}

std::size_t depth_count_bruteforce(const Sample& s,
                                   std::span<const double> point) {
  require_dim(s, 2, "depth_bruteforce");
  if (s.n > 200) throw config_error("depth_bruteforce: n must be <= 200");
  if (point.size() != 2) throw config_error("depth_bruteforce: point must be 2-D");
  const double qx = point[0], qy = point[1];

  auto count_dir = [&](double ux, double uy) {
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < s.n; ++i) {
      const double dx = s.data[2 * i] - qx;
      const double dy = s.data[2 * i + 1] - qy;
      if (ux * dx + uy * dy >= 0.0) ++cnt;
    }
    return cnt;
  };

  constexpr double kEps = 1e-9;
  const double c = std::cos(kEps), sn = std::sin(kEps);
  std::size_t best = s.n;
  bool any = false;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double dx = s.data[2 * i] - qx;
    const double dy = s.data[2 * i + 1] - qy;
    if (dx == 0.0 && dy == 0.0) continue;
    any = true;
    const double base[4][2] = {
        {-dy, dx}, {dy, -dx}, {dx, dy}, {-dx, -dy}};
    for (const auto& u : base) {
      best = std::min(best, count_dir(u[0], u[1]));
      best = std::min(best, count_dir(c * u[0] - sn * u[1],
                                      sn * u[0] + c * u[1]));
      best = std::min(best, count_dir(c * u[0] + sn * u[1],
                                      -sn * u[0] + c * u[1]));
    }
  }
  return any ? best : s.n;
}

double depth_bruteforce(const Sample& s, std::span<const double> point) {
  return static_cast<double>(depth_count_bruteforce(s, point)) /
         static_cast<double>(s.n);
}

double depth_rank(std::span<const double> sorted_reference, double value) {
  if (sorted_reference.empty()) throw config_error("depth_rank: empty reference");
  const auto below = std::lower_bound(sorted_reference.begin(),
                                      sorted_reference.end(), value) -
                     sorted_reference.begin();
  return static_cast<double>(below) /
         static_cast<double>(sorted_reference.size());
}

double ray_count_crossing(const Sample& s, std::span<const double> center,
                          std::span<const double> direction, std::size_t m) {
  require_dim(s, 2, "ray_count_crossing");
  if (center.size() != 2 || direction.size() != 2) {
    throw config_error("ray_count_crossing: center and direction must be 2-D");
  }
  if (m < 1) throw config_error("ray_count_crossing: m must be at least 1");
  const auto count_at = [&](double t) {
    return depth_count_2d(s, center[0] + t * direction[0],
                          center[1] + t * direction[1]);
  };
  if (count_at(0.0) < m) {
    throw config_error("ray_count_crossing: count at the center is below m");
  }

  // Beyond the farthest data projection along the ray the count is zero, so
  // proj_max brackets the crossing.  Doubling keeps the bracket a
  // power-of-two multiple of proj_max, which makes the returned t scale
  // exactly with the data under power-of-two sample scalings.
  double proj_max = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double w = (s.data[2 * i] - center[0]) * direction[0] +
                     (s.data[2 * i + 1] - center[1]) * direction[1];
    proj_max = std::max(proj_max, w);
  }
  if (!(proj_max > 0.0)) {
    throw degenerate_data_error(
        "ray_count_crossing: no sample mass beyond the center along this ray");
  }
  double hi = proj_max;
  const double cap = std::ldexp(proj_max, 60);
  while (count_at(hi) >= m) {
    hi *= 2.0;
    if (hi > cap) {
      throw numeric_error("ray_count_crossing: bracket doubling exceeded its cap");
    }
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_at(mid) >= m) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace depthkit::depth

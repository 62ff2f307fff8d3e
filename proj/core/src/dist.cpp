#include "depthkit/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/rng.hpp"

namespace depthkit::dist {

namespace {

constexpr double kPi = std::numbers::pi;

double r0_cached() {
  // (1 + 2.5 s)^2 - (1 + s)^3 = 0, s = r0^6; bisect on s in [3, 5].
  static const double value = [] {
    auto f = [](double s) {
      const double a = 1.0 + 2.5 * s;
      const double b = 1.0 + s;
      return a * a - b * b * b;
    };
    double lo = 3.0, hi = 5.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::pow(0.5 * (lo + hi), 1.0 / 6.0);
  }();
  return value;
}

// ---- spherical companion of the elliptical density -----------------------
// 2-D density: c_in inside r0, (3/(2pi)) r^4 (1+r^6)^{-3/2} outside, with
// c_in chosen continuous at r0.  This is also the rejection envelope for the
// clover sampler.

double sph_ell_density(double r) {
  const double q = r0_cached();
  const double c_in = (3.0 / (2.0 * kPi)) * std::pow(q, 4.0) *
                      std::pow(1.0 + std::pow(q, 6.0), -1.5);
  if (r <= q) return c_in;
  const double r6 = std::pow(r, 6.0);
  return (3.0 / (2.0 * kPi)) * std::pow(r, 4.0) * std::pow(1.0 + r6, -1.5);
}

// P(R >= r) for the spherical companion, in closed form.
double sph_ell_radial_survival(double r) {
  if (r <= 0.0) return 1.0;
  const double q = r0_cached();
  const double q6 = std::pow(q, 6.0);
  if (r <= q) {
    return 1.0 - 1.5 * r * r * std::pow(q, 4.0) * std::pow(1.0 + q6, -1.5);
  }
  return std::pow(1.0 + std::pow(r, 6.0), -0.5);
}

// Inverse radial CDF of the spherical companion.
double sph_ell_radial_quantile(double u) {
  const double q = r0_cached();
  const double q6 = std::pow(q, 6.0);
  const double p_in = 1.5 * q6 * std::pow(1.0 + q6, -1.5);
  if (u <= p_in) {
    return std::sqrt(u * (2.0 / 3.0) * std::pow(1.0 + q6, 1.5) /
                     std::pow(q, 4.0));
  }
  const double s = 1.0 - u;  // survival; tail law (1+r^6)^{-1/2} = s
  return std::pow(1.0 / (s * s) - 1.0, 1.0 / 6.0);
}

// Marginal tail P(X1 >= w) of a spherically symmetric 2-D law given its
// radial survival function: (1/pi) * int_0^{pi/2} S_R(w / cos t) dt.
double spherical_marginal_tail(double w, double (*survival)(double)) {
  if (w <= 0.0)
    return w == 0.0 ? 0.5
                    : 1.0 - spherical_marginal_tail(-w, survival);
  auto integrand = [&](double t) {
    const double c = std::cos(t);
    if (c <= 0.0) return 0.0;
    return survival(w / c);
  };
  return num::adaptive_simpson(integrand, 0.0, kPi / 2.0, 1e-10) / kPi;
}

// ---- clover density -------------------------------------------------------
// Polar form: outside r0 the density is
//   3 r^4 (9 - 8 sin^2 2t) / (10 pi (1+r^6)^{3/2}),
// inside it is (3/(10 pi)) r0^4 (1+r0^6)^{-3/2} (5 + (4 r/r0) cos 4t);
// the two agree at r = r0 since 9 - 8 sin^2 2t = 5 + 4 cos 4t.

double clover_density_polar(double r, double theta) {
  const double q = r0_cached();
  if (r >= q) {
    const double s2 = std::sin(2.0 * theta);
    const double r6 = std::pow(r, 6.0);
    return 3.0 * std::pow(r, 4.0) * (9.0 - 8.0 * s2 * s2) /
           (10.0 * kPi * std::pow(1.0 + r6, 1.5));
  }
  const double q6 = std::pow(q, 6.0);
  const double c = (3.0 / (10.0 * kPi)) * std::pow(q, 4.0) *
                   std::pow(1.0 + q6, -1.5);
  return c * (5.0 + 4.0 * (r / q) * std::cos(4.0 * theta));
}

// int_a^inf f_clover(r, theta) r dr, closed form piecewise.
double clover_radial_tail(double a, double theta) {
  const double q = r0_cached();
  const double q6 = std::pow(q, 6.0);
  const double s2 = std::sin(2.0 * theta);
  auto outer = [&](double from) {
    return (9.0 - 8.0 * s2 * s2) / (10.0 * kPi) *
           std::pow(1.0 + std::pow(from, 6.0), -0.5);
  };
  if (a >= q) return outer(a);
  if (a < 0.0) a = 0.0;
  const double c = (3.0 / (10.0 * kPi)) * std::pow(q, 4.0) *
                   std::pow(1.0 + q6, -1.5);
  const double inner =
      c * (2.5 * (q * q - a * a) +
           (4.0 * std::cos(4.0 * theta) / (3.0 * q)) * (q * q * q - a * a * a));
  return inner + outer(q);
}

// P(u_beta . X >= c) for the clover law: angular integral of the closed-form
// radial tail, split at the kink where c / cos(psi) crosses r0.
double clover_directional_tail(double beta, double c) {
  if (c < 0.0) return 1.0 - clover_directional_tail(beta + kPi, -c);
  if (c == 0.0) return 0.5;
  auto integrand = [&](double psi) {
    const double cs = std::cos(psi);
    if (cs <= 0.0) return 0.0;
    return clover_radial_tail(c / cs, beta + psi);
  };
  const double q = r0_cached();
  const double half = kPi / 2.0;
  double total = 0.0;
  if (c < q) {
    const double psi_star = std::acos(c / q);
    total += num::adaptive_simpson(integrand, -half, -psi_star, 1e-11);
    total += num::adaptive_simpson(integrand, -psi_star, psi_star, 1e-11);
    total += num::adaptive_simpson(integrand, psi_star, half, 1e-11);
  } else {
    total = num::adaptive_simpson(integrand, -half, half, 1e-11);
  }
  return total;
}

constexpr int kCloverOracleDirections = 720;

double clover_depth(double x, double y) {
  double best = 1.0;
  for (int j = 0; j < kCloverOracleDirections; ++j) {
    const double beta = 2.0 * kPi * j / kCloverOracleDirections;
    const double c = x * std::cos(beta) + y * std::sin(beta);
    best = std::min(best, clover_directional_tail(beta, c));
  }
  return best;
}

// ---- base densities -------------------------------------------------------

double norm2(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

// d-dimensional spherical Cauchy (multivariate t with one degree of
// freedom): Gamma((d+1)/2) / pi^{(d+1)/2} * (1+r^2)^{-(d+1)/2}.
double sphcauchy_pdf(std::size_t d, double r) {
  const double e = (static_cast<double>(d) + 1.0) / 2.0;
  const double c = std::exp(std::lgamma(e)) / std::pow(kPi, e);
  return c * std::pow(1.0 + r * r, -e);
}

double base_pdf(Family f, std::span<const double> z) {
  switch (f) {
    case Family::normal1d:
      return std::exp(-0.5 * z[0] * z[0]) / std::sqrt(2.0 * kPi);
    case Family::cauchy1d:
      return 1.0 / (kPi * (1.0 + z[0] * z[0]));
    case Family::t2_1d:
      return std::pow(1.0 + 0.5 * z[0] * z[0], -1.5) / (2.0 * std::sqrt(2.0));
    case Family::burr1d: {
      const double a = std::abs(z[0]);
      return 1.5 * std::pow(a, 5.0) * std::pow(1.0 + std::pow(a, 6.0), -1.5);
    }
    case Family::normal2d: {
      const double r = norm2(z);
      return std::exp(-0.5 * r * r) / (2.0 * kPi);
    }
    case Family::sphcauchy2d:
      return sphcauchy_pdf(2, norm2(z));
    case Family::sphcauchy3d:
      return sphcauchy_pdf(3, norm2(z));
    case Family::sphcauchy4d:
      return sphcauchy_pdf(4, norm2(z));
    case Family::elliptical2d:
      return 0.5 * sph_ell_density(std::hypot(z[0] / 2.0, z[1]));
    case Family::clover2d:
      return clover_density_polar(std::hypot(z[0], z[1]),
                                  std::atan2(z[1], z[0]));
  }
  throw config_error("pdf: unknown family");
}

double base_cdf_1d(Family f, double z) {
  switch (f) {
    case Family::normal1d:
      return num::normal_cdf(z);
    case Family::cauchy1d:
      return 0.5 + std::atan(z) / kPi;
    case Family::t2_1d:
      return 0.5 + z / (2.0 * std::sqrt(2.0 + z * z));
    case Family::burr1d: {
      const double tail = 0.5 * std::pow(1.0 + std::pow(z, 6.0), -0.5);
      return z >= 0.0 ? 1.0 - tail : tail;
    }
    default:
      throw config_error("cdf_1d requires a one-dimensional family");
  }
}

double base_depth(Family f, std::span<const double> z) {
  switch (f) {
    case Family::normal1d:
    case Family::cauchy1d:
    case Family::t2_1d:
    case Family::burr1d: {
      const double c = base_cdf_1d(f, z[0]);
      return std::min(c, 1.0 - c);
    }
    case Family::normal2d:
      return num::normal_cdf(-norm2(z));
    case Family::sphcauchy2d:
    case Family::sphcauchy3d:
    case Family::sphcauchy4d: {
      const double r = norm2(z);
      return r == 0.0 ? 0.5 : std::atan(1.0 / r) / kPi;
    }
    case Family::elliptical2d:
      return spherical_marginal_tail(std::hypot(z[0] / 2.0, z[1]),
                                     &sph_ell_radial_survival);
    case Family::clover2d:
      return clover_depth(z[0], z[1]);
  }
  throw config_error("true_depth: unknown family");
}

// Closed-form radius with base depth = level along a symmetry ray, or -1 if
// the family needs numeric inversion.
double base_quantile_radius(Family f, double level) {
  switch (f) {
    case Family::normal1d:
    case Family::normal2d:
      return -num::normal_quantile(level);
    case Family::cauchy1d:
    case Family::sphcauchy2d:
    case Family::sphcauchy3d:
    case Family::sphcauchy4d:
      return 1.0 / std::tan(kPi * level);
    case Family::t2_1d: {
      const double q = 1.0 - 2.0 * level;
      return q * std::sqrt(2.0) / std::sqrt(1.0 - q * q);
    }
    case Family::burr1d: {
      const double h = 1.0 / (2.0 * level);
      return std::pow(h * h - 1.0, 1.0 / 6.0);
    }
    default:
      return -1.0;
  }
}

// ---- samplers -------------------------------------------------------------

double draw_t2(Rng& rng) {
  const double q = 2.0 * rng.uniform_oo() - 1.0;
  return q * std::sqrt(2.0) / std::sqrt(1.0 - q * q);
}

double draw_burr(Rng& rng) {
  const double u = rng.uniform_oo();
  const double tail = u > 0.5 ? 1.0 - u : u;
  const double h = 1.0 / (2.0 * tail);
  const double mag = std::pow(h * h - 1.0, 1.0 / 6.0);
  return u > 0.5 ? mag : -mag;
}

void draw_sphcauchy(Rng& rng, std::size_t d, double* out) {
  for (std::size_t j = 0; j < d; ++j) out[j] = rng.normal();
  const double denom = std::abs(rng.normal());
  for (std::size_t j = 0; j < d; ++j) out[j] /= denom;
}

void draw_sph_ell(Rng& rng, double* out) {
  const double r = sph_ell_radial_quantile(rng.uniform());
  const double a = 2.0 * kPi * rng.uniform();
  out[0] = r * std::cos(a);
  out[1] = r * std::sin(a);
}

constexpr double kCloverEnvelopeFactor = 3.6;  // mean acceptance 1/3.6

void draw_clover(Rng& rng, double* out, SampleDiagnostics* diag) {
  for (;;) {
    if (diag) ++diag->proposals;
    const double r = sph_ell_radial_quantile(rng.uniform());
    const double a = 2.0 * kPi * rng.uniform();
    const double u = rng.uniform();
    const double g = sph_ell_density(r);
    if (u * kCloverEnvelopeFactor * g <= clover_density_polar(r, a)) {
      if (diag) ++diag->accepted;
      out[0] = r * std::cos(a);
      out[1] = r * std::sin(a);
      return;
    }
  }
}

}  // namespace

double r0() { return r0_cached(); }

Sample sample(const DistSpec& spec, std::size_t n, std::uint64_t seed,
              SampleDiagnostics* diag) {
  spec.validate();
  const std::size_t d = spec.dim();
  Sample out;
  out.n = n;
  out.d = d;
  out.dist = spec;
  out.seed = seed;
  out.data.resize(n * d);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data.data() + i * d;
    switch (spec.family) {
      case Family::normal1d:
        row[0] = rng.normal();
        break;
      case Family::cauchy1d:
        row[0] = std::tan(kPi * (rng.uniform_oo() - 0.5));
        break;
      case Family::t2_1d:
        row[0] = draw_t2(rng);
        break;
      case Family::burr1d:
        row[0] = draw_burr(rng);
        break;
      case Family::normal2d:
        row[0] = rng.normal();
        row[1] = rng.normal();
        break;
      case Family::sphcauchy2d:
        draw_sphcauchy(rng, 2, row);
        break;
      case Family::sphcauchy3d:
        draw_sphcauchy(rng, 3, row);
        break;
      case Family::sphcauchy4d:
        draw_sphcauchy(rng, 4, row);
        break;
      case Family::elliptical2d:
        draw_sph_ell(rng, row);
        row[0] *= 2.0;
        break;
      case Family::clover2d:
        draw_clover(rng, row, diag);
        break;
    }
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = spec.shift_at(j) + spec.scale * row[j];
    }
  }
  return out;
}

namespace {

std::vector<double> standardized(const DistSpec& spec,
                                 std::span<const double> point) {
  if (point.size() != spec.dim()) {
    throw config_error("point dimension does not match the distribution");
  }
  std::vector<double> z(point.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = (point[j] - spec.shift_at(j)) / spec.scale;
  }
  return z;
}

}  // namespace

double pdf(const DistSpec& spec, std::span<const double> point) {
  spec.validate();
  const auto z = standardized(spec, point);
  return base_pdf(spec.family, z) /
         std::pow(spec.scale, static_cast<double>(spec.dim()));
}

double cdf_1d(const DistSpec& spec, double x) {
  spec.validate();
  if (spec.dim() != 1) throw config_error("cdf_1d requires dimension 1");
  return base_cdf_1d(spec.family, (x - spec.shift_at(0)) / spec.scale);
}

double true_depth(const DistSpec& spec, std::span<const double> point) {
  spec.validate();
  const auto z = standardized(spec, point);
  return base_depth(spec.family, z);
}

std::vector<double> quantile_point(const DistSpec& spec, double level,
                                   std::span<const double> direction) {
  spec.validate();
  if (!(level > 0.0 && level <= 0.5)) {
    throw config_error("quantile_point: level must lie in (0, 1/2]");
  }
  const std::size_t d = spec.dim();
  if (direction.size() != d) {
    throw config_error("quantile_point: direction dimension mismatch");
  }
  std::vector<double> u(direction.begin(), direction.end());
  const double un = norm2(u);
  if (!(un > 0.0)) throw config_error("quantile_point: zero direction");
  for (double& v : u) v /= un;

  double radius = base_quantile_radius(spec.family, level);
  if (radius < 0.0) {
    // -1 sentinel: elliptical2d / clover2d have no closed-form radius.
    // Numeric inversion: depth is nonincreasing along any ray from the
    // center, so bracket by doubling and bisect on the base depth.
    auto depth_at = [&](double t) {
      std::vector<double> z(d);
      for (std::size_t j = 0; j < d; ++j) z[j] = t * u[j];
      return base_depth(spec.family, z);
    };
    double hi = 1.0;
    int guard = 0;
    while (depth_at(hi) > level) {
      hi *= 2.0;
      if (++guard > 200) {
        throw numeric_error("quantile_point: level bracket not found");
      }
    }
    double lo = 0.0;
    double mid = hi, dm = depth_at(hi);
    for (int it = 0; it < 200 && std::abs(dm - level) > 5e-9; ++it) {
      mid = 0.5 * (lo + hi);
      dm = depth_at(mid);
      (dm > level ? lo : hi) = mid;
    }
    if (std::abs(dm - level) > 1e-8) {
      throw numeric_error("quantile_point: bisection did not reach the level");
    }
    radius = mid;
  }
  if (d == 1) {
    // Symmetric families: the signed direction picks the tail.
    radius = std::abs(radius) * (u[0] > 0.0 ? 1.0 : -1.0);
    return {spec.shift_at(0) + spec.scale * radius};
  }
  std::vector<double> x(d);
  for (std::size_t j = 0; j < d; ++j) {
    x[j] = spec.shift_at(j) + spec.scale * radius * u[j];
  }
  return x;
}

}  // namespace depthkit::dist

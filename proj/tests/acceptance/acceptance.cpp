// Acceptance gate: one numbered check per release criterion, each printing a
// single [PASS]/[FAIL] line with the measured values.  Bands and scales are
// pinned here on purpose; seeds are arbitrary but fixed.  Run with no
// arguments for all criteria or with criterion numbers to run a subset.
// The exit code is the number of failed criteria.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "depthkit/depth.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/evt.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/refined.hpp"
#include "depthkit/repro.hpp"
#include "depthkit/rng.hpp"
#include "depthkit/types.hpp"

using namespace depthkit;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string num_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double median_of(std::vector<double> v) { return num::median(v); }

// ---- criterion 1: exact bivariate depth equals the brute-force oracle ----

Outcome criterion1() {
  const std::vector<DistSpec> specs{
      {Family::normal2d, {}, 1.0},
      {Family::sphcauchy2d, {}, 1.0},
      {Family::elliptical2d, {}, 1.0},
      {Family::clover2d, {}, 1.0},
      {Family::sphcauchy2d, {1.0, -2.0}, 3.0},
  };
  std::size_t pairs = 0, on_sample = 0;
  for (std::size_t si = 0; si < specs.size(); ++si) {
    for (std::size_t p = 0; p < 20; ++p) {
      const std::uint64_t seed = mix_seed(11000, si * 100 + p);
      Sample s = dist::sample(specs[si], 40, seed);
      Sample q = dist::sample(specs[si], 1, mix_seed(seed, 1));
      ++pairs;
      if (depth::depth_count_2d(s, q.data[0], q.data[1]) !=
          depth::depth_count_bruteforce(s, q.row(0))) {
        return {false, "fresh-query mismatch at spec " + std::to_string(si) +
                           " pair " + std::to_string(p)};
      }
      if (p % 5 == 0) {
        for (std::size_t i = 0; i < s.n; ++i) {
          ++on_sample;
          if (depth::depth_count_2d(s, s.data[2 * i], s.data[2 * i + 1]) !=
              depth::depth_count_bruteforce(s, s.row(i))) {
            return {false, "on-sample mismatch at spec " + std::to_string(si) +
                               " pair " + std::to_string(p) + " row " +
                               std::to_string(i)};
          }
        }
      }
    }
  }
  return {true, std::to_string(pairs) + " fresh queries and " +
                    std::to_string(on_sample) +
                    " on-sample queries, all counts equal"};
}

// ---- criterion 2: fraction of fresh points outside the sample hull ----

// Monotone-chain convex hull, counterclockwise, as an independent witness
// that zero depth means hull exterior.
std::vector<std::pair<double, double>> convex_hull(const Sample& s) {
  std::vector<std::pair<double, double>> pts(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    pts[i] = {s.data[2 * i], s.data[2 * i + 1]};
  }
  std::sort(pts.begin(), pts.end());
  auto cross = [](const std::pair<double, double>& o,
                  const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0.0) --h;
    hull[h++] = p;
  }
  const std::size_t lower = h + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], *it) <= 0.0) --h;
    hull[h++] = *it;
  }
  hull.resize(h - 1);
  return hull;
}

bool outside_hull(const std::vector<std::pair<double, double>>& hull, double x,
                  double y) {
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double c = (b.first - a.first) * (y - a.second) -
                     (b.second - a.second) * (x - a.first);
    if (c < 0.0) return true;
  }
  return false;
}

Outcome criterion2() {
  constexpr double kLow = 0.015, kHigh = 0.027;  // 0.021 +- 0.006
  const DistSpec spec{Family::normal2d, {}, 1.0};
  double total_fraction = 0.0;
  std::size_t crosschecks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Sample ref = dist::sample(spec, 500, mix_seed(12000, seed));
    Sample fresh = dist::sample(spec, 10000, mix_seed(12000, seed + 1000));
    const auto hull = convex_hull(ref);
    std::size_t zero = 0;
    for (std::size_t i = 0; i < fresh.n; ++i) {
      const double x = fresh.data[2 * i], y = fresh.data[2 * i + 1];
      const bool is_zero = depth::depth_count_2d(ref, x, y) == 0;
      if (is_zero) ++zero;
      if (i < 50) {
        ++crosschecks;
        if (is_zero != outside_hull(hull, x, y)) {
          return {false, "zero depth disagrees with the hull witness at seed " +
                             std::to_string(seed) + " point " +
                             std::to_string(i)};
        }
      }
    }
    total_fraction += static_cast<double>(zero) / 10000.0;
  }
  const double mean = total_fraction / 20.0;
  const bool ok = mean >= kLow && mean <= kHigh;
  return {ok, "mean zero-depth fraction " + num_str(mean) + " over 20 seeds (band [" +
                  num_str(kLow) + ", " + num_str(kHigh) + "]), " +
                  std::to_string(crosschecks) + " hull cross-checks agree"};
}

// ---- criterion 3: tail-ratio medians and hull-exit frequency ----

Outcome criterion3() {
  constexpr double kMedLow = 0.5, kMedHigh = 2.0;
  constexpr double kZeroFrac = 0.6;
  const std::vector<Family> families{Family::cauchy1d, Family::t2_1d,
                                     Family::burr1d, Family::sphcauchy2d,
                                     Family::sphcauchy3d};
  const std::vector<double> levels{1.0 / 500, 1.0 / 1000, 1.0 / 2000};
  bool ok = true;
  std::string detail;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const auto rows = repro::ratio_study(families[fi], 500, 50, levels, 50,
                                         mix_seed(13000, fi));
    detail += (fi ? "; " : "") + family_name(families[fi]) + " med(rn/d)";
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::vector<double> rn;
      std::size_t dn_zero = 0;
      for (std::size_t rep = 0; rep < 50; ++rep) {
        const auto& r = rows[rep * levels.size() + li];
        rn.push_back(r.rn_over_d);
        if (r.dn_over_d == 0.0) ++dn_zero;
      }
      const double med = median_of(rn);
      detail += " " + num_str(med);
      if (!(med >= kMedLow && med <= kMedHigh)) ok = false;
      if (li == 2) {
        const double frac = dn_zero / 50.0;
        detail += " dn0@1/2000 " + num_str(frac);
        if (frac < kZeroFrac) ok = false;
      }
    }
  }
  return {ok, detail};
}

// ---- criterion 4: exact power-law scaling along rays ----

Outcome criterion4() {
  constexpr double kRelTol = 1e-12;
  const DistSpec spec{Family::sphcauchy2d, {}, 1.0};
  Sample s = dist::sample(spec, 500, mix_seed(14000, 0));
  auto model = refined::HeavyTailDepthModel::fit_ray(s, 50);
  const double alpha = model.alpha_hat();
  Rng rng(mix_seed(14000, 1));
  double worst = 0.0;
  for (int ray = 0; ray < 100; ++ray) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double u[2] = {std::cos(theta), std::sin(theta)};
    const double st = model.ray_calibrate(u);
    const double base_r = 2.2 * st;
    const double x[2] = {base_r * u[0], base_r * u[1]};
    const double rx = model.evaluate(x).value;
    for (double c : {2.0, 10.0, 100.0}) {
      const double cx[2] = {c * x[0], c * x[1]};
      const double rcx = model.evaluate(cx).value;
      const double dev = std::abs(rcx * std::pow(c, alpha) - rx) / rx;
      worst = std::max(worst, dev);
    }
  }
  return {worst <= kRelTol, "max relative scaling deviation " + num_str(worst) +
                                " over 100 rays, c in {2, 10, 100} (tol 1e-12)"};
}

// ---- criterion 5: both glue points sit at exactly k/n ----

Outcome criterion5() {
  const std::vector<Family> families{Family::normal1d, Family::cauchy1d,
                                     Family::t2_1d, Family::burr1d};
  std::size_t exact = 0, total = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const Family family = families[i % families.size()];
    const std::size_t n = i % 2 == 0 ? 200 : 500;
    const std::size_t k = n / 10;
    DistSpec spec{family, {}, 1.0};
    Sample s = dist::sample(spec, n, mix_seed(15000, i));
    refined::UnivariateRefinedDepth rd(s, k);
    const double kn = static_cast<double>(k) / static_cast<double>(n);
    total += 2;
    if (rd.value(rd.upper_glue()) == kn) ++exact;
    if (rd.value(rd.lower_glue()) == kn) ++exact;
  }
  return {exact == total, std::to_string(exact) + " of " +
                              std::to_string(total) +
                              " glue evaluations equal k/n bitwise"};
}

// ---- criterion 6: extreme contour against the population radius ----

Outcome criterion6() {
  constexpr double kRatioLow = 0.4, kRatioHigh = 2.5;
  constexpr double kNeedFrac = 0.7;
  const double r_true = 1.0 / std::tan(std::numbers::pi / 500.0);
  std::size_t ratio_hits = 0, hull_hits = 0;
  const std::size_t seeds = 30;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const auto st =
        repro::contour_study(500, 50, 1.0 / 500.0, 500, mix_seed(16000, seed));
    const double med_rn = median_of(st.r_rn);
    const double med_dn = median_of(st.r_dn);
    const double ratio = med_rn / r_true;
    if (ratio >= kRatioLow && ratio <= kRatioHigh) ++ratio_hits;
    if (med_dn < r_true / 3.0) ++hull_hits;
  }
  const double fa = static_cast<double>(ratio_hits) / seeds;
  const double fb = static_cast<double>(hull_hits) / seeds;
  const bool ok = fa >= kNeedFrac && fb >= kNeedFrac;
  return {ok, "refined-contour ratio in [0.4, 2.5] for " + num_str(fa * 100) +
                  "% of seeds, hull median below r_true/3 for " +
                  num_str(fb * 100) + "% (both need >= 70%)"};
}

// ---- criterion 7: in-control false alarm rates of the three charts ----

Outcome criterion7() {
  constexpr double kParLow = 0.0012, kParHigh = 0.0055;
  constexpr double kRnLow = 0.0010, kRnHigh = 0.0080;
  constexpr double kDnAbove = 0.010;
  auto means = [](const std::vector<repro::FarRow>& rows) {
    double p = 0, d = 0, r = 0;
    for (const auto& row : rows) {
      p += row.parametric;
      d += row.dn;
      r += row.rn;
    }
    const double n = static_cast<double>(rows.size());
    return std::array<double, 3>{p / n, d / n, r / n};
  };
  const auto normal = means(repro::far_study(Family::normal2d, 500, 2000, 50,
                                             0.0027, 30, mix_seed(17000, 0)));
  const auto ellip = means(repro::far_study(Family::elliptical2d, 500, 2000,
                                            50, 0.0027, 30,
                                            mix_seed(17000, 1)));
  bool ok = true;
  if (!(normal[0] >= kParLow && normal[0] <= kParHigh)) ok = false;
  if (!(normal[2] >= kRnLow && normal[2] <= kRnHigh)) ok = false;
  if (!(normal[1] > kDnAbove)) ok = false;
  if (!(ellip[2] >= kRnLow && ellip[2] <= kRnHigh)) ok = false;
  if (ellip[0] >= kParLow && ellip[0] <= kParHigh) ok = false;
  return {ok, "normal mean FAR param " + num_str(normal[0]) + " dn " +
                  num_str(normal[1]) + " rn " + num_str(normal[2]) +
                  "; elliptical param " + num_str(ellip[0]) + " (must miss "
                  "its band) rn " + num_str(ellip[2])};
}

// ---- criterion 8: run lengths under the joint location and scale change ----

Outcome criterion8() {
  constexpr double kFactor = 1.5;
  constexpr double kAbsNormal = 5.0;
  auto both_means = [](const std::vector<repro::ArlRow>& rows) {
    double o = 0, r = 0;
    std::size_t count = 0;
    for (const auto& row : rows) {
      if (row.change != repro::ProcessChange::both) continue;
      o += row.oracle;
      r += row.rn;
      ++count;
    }
    return std::pair<double, double>{o / count, r / count};
  };
  const auto normal_rows = repro::arl_study(Family::normal2d, 500, 50, 0.0027,
                                            20, 30, mix_seed(18000, 0), true);
  const auto ellip_rows =
      repro::arl_study(Family::elliptical2d, 500, 50, 0.0027, 20, 30,
                       mix_seed(18000, 1), false);
  const auto [no, nr] = both_means(normal_rows);
  const auto [eo, er] = both_means(ellip_rows);
  bool ok = true;
  if (!(nr <= no * kFactor && nr >= no / kFactor)) ok = false;
  if (!(er <= eo * kFactor && er >= eo / kFactor)) ok = false;
  // The <= 5 absolute bound applies to the large-shift family: the normal
  // process, whose joint change moves the mean two sigmas per axis and
  // doubles the spread.  The elliptical oracle itself sits above 5 there.
  if (!(nr <= kAbsNormal)) ok = false;
  return {ok, "both-change mean ARL normal rn " + num_str(nr) + " vs oracle " +
                  num_str(no) + ", elliptical rn " + num_str(er) +
                  " vs oracle " + num_str(eo) +
                  " (factor 1.5 bands, normal rn <= 5)"};
}

// ---- criterion 9: zero-depth classification beats the coin ----

Outcome criterion9() {
  constexpr double kDnLow = 0.45, kDnHigh = 0.55;
  constexpr double kRnBelow = 0.35;
  const repro::ProcessChange settings[] = {repro::ProcessChange::location,
                                           repro::ProcessChange::both};
  bool ok = true;
  std::string detail;
  for (std::size_t fi = 0; fi < 2; ++fi) {
    const Family family = fi == 0 ? Family::normal2d : Family::elliptical2d;
    const auto rows = repro::dd_study(family, 500, 500, 5000, 50, 30,
                                      mix_seed(19000, fi), settings);
    detail += (fi ? "; " : "") + family_name(family);
    for (const auto setting : settings) {
      std::vector<double> rn_err;
      double dn_sum = 0.0;
      std::size_t count = 0;
      for (const auto& row : rows) {
        if (row.setting != setting) continue;
        rn_err.push_back(row.masked_error_rn);
        dn_sum += row.masked_error_dn;
        ++count;
      }
      const double dn_mean = dn_sum / static_cast<double>(count);
      const double rn_med = median_of(rn_err);
      detail += " " + repro::change_name(setting) + ": dn " +
                num_str(dn_mean) + " rn " + num_str(rn_med);
      if (!(dn_mean >= kDnLow && dn_mean <= kDnHigh)) ok = false;
      if (!(rn_med < kRnBelow)) ok = false;
    }
  }
  return {ok, detail + " (dn in [0.45, 0.55], rn median < 0.35)"};
}

// ---- criterion 10: index estimators against their population values ----

Outcome criterion10() {
  constexpr double kTol = 0.25;
  std::vector<double> hills, moments;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    DistSpec cauchy{Family::cauchy1d, {}, 1.0};
    Sample sc = dist::sample(cauchy, 5000, mix_seed(20000, seed));
    for (double& v : sc.data) v = std::abs(v);
    hills.push_back(
        evt::hill(evt::make_tail_sample(std::move(sc.data)), 200));

    DistSpec t2{Family::t2_1d, {}, 1.0};
    Sample st = dist::sample(t2, 5000, mix_seed(21000, seed));
    for (double& v : st.data) v = std::abs(v);
    moments.push_back(
        evt::moment(evt::make_tail_sample(std::move(st.data)), 200));
  }
  const double mh = median_of(hills);
  const double mm = median_of(moments);
  const bool ok = std::abs(mh - 1.0) <= kTol && std::abs(mm - 0.5) <= kTol;
  return {ok, "median hill on |cauchy| " + num_str(mh) +
                  " (truth 1), median moment on |t2| " + num_str(mm) +
                  " (truth 0.5), tolerance 0.25"};
}

// ---- criterion 11: the density constant and total masses ----

Outcome criterion11() {
  constexpr double kR0 = 1.2481, kR0Tol = 1e-3;
  constexpr double kMassTol = 1e-3;
  const double r0 = dist::r0();

  auto total_mass = [](Family family) {
    const DistSpec spec{family, {}, 1.0};
    auto ring = [&](double r) {
      auto along = [&](double theta) {
        const double p[2] = {r * std::cos(theta), r * std::sin(theta)};
        return dist::pdf(spec, p);
      };
      // Split at an angle incommensurate with the four-fold symmetry:
      // Simpson's dyadic nodes on [0, 2pi] all land where sin 2theta = 0,
      // so refinement stalls on the theta = 0 slice.
      return r * (num::adaptive_simpson(along, 0.0, 0.7, 1e-10) +
                  num::adaptive_simpson(along, 0.7, 2.0 * std::numbers::pi,
                                        1e-10));
    };
    // The densities decay like r^-5, so the mass beyond 300 is below 1e-7.
    return num::adaptive_simpson(ring, 0.0, 3.0, 1e-8) +
           num::adaptive_simpson(ring, 3.0, 300.0, 1e-8);
  };
  const double ell = total_mass(Family::elliptical2d);
  const double clo = total_mass(Family::clover2d);
  const bool ok = std::abs(r0 - kR0) <= kR0Tol &&
                  std::abs(ell - 1.0) <= kMassTol &&
                  std::abs(clo - 1.0) <= kMassTol;
  return {ok, "r0 " + num_str(r0) + " (expect 1.2481 +- 1e-3), mass elliptical " +
                  num_str(ell) + ", clover " + num_str(clo) +
                  " (1 +- 1e-3 each)"};
}

using CriterionFn = Outcome (*)();

struct Criterion {
  int number;
  CriterionFn fn;
};

constexpr Criterion kCriteria[] = {
    {1, criterion1}, {2, criterion2},  {3, criterion3},  {4, criterion4},
    {5, criterion5}, {6, criterion6},  {7, criterion7},  {8, criterion8},
    {9, criterion9}, {10, criterion10}, {11, criterion11},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    wanted.push_back(std::atoi(argv[i]));
  }
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.number) == wanted.end()) {
      continue;
    }
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s\n", out.ok ? "PASS" : "FAIL", c.number,
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.ok) ++failures;
  }
  return failures;
}

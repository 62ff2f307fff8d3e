#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "depthkit/depth.hpp"
#include "depthkit/evt.hpp"
#include "depthkit/io.hpp"
#include "depthkit/refined.hpp"
#include "depthkit/spc.hpp"
#include "depthkit/types.hpp"

namespace depthkit::repro {

enum class CenterMode { origin, median };
CenterMode center_mode_from_name(const std::string& name);
std::string center_mode_name(CenterMode mode);
std::vector<double> center_of(const Sample& s, CenterMode mode);

using DepthFn = spc::DepthFn;

/// Exact empirical depth (d <= 2); the sample is shared immutably.
DepthFn dn_engine(std::shared_ptr<const Sample> ref);
/// Direction-sampled empirical depth for any d >= 2.
DepthFn dn_engine_random(std::shared_ptr<const Sample> ref,
                         std::shared_ptr<const depth::DirectionSet> dirs);
/// Population depth of a known distribution.
DepthFn oracle_engine(DistSpec spec);

enum class RnMethod { auto_pick, univariate, ray, random };
RnMethod rn_method_from_name(const std::string& name);

struct RnEngineSpec {
  std::size_t k = 50;
  std::optional<std::size_t> k_tail;
  RnMethod method = RnMethod::auto_pick;
  std::optional<evt::Estimator> estimator;  // defaulted per method
  CenterMode center = CenterMode::origin;
  std::size_t dirs = 500;
  std::uint64_t dir_seed = 0;
};

struct RnEngine {
  DepthFn fn;  // clamped evaluations already folded to the denormal floor
  std::string description;
  std::shared_ptr<const refined::HeavyTailDepthModel> model;    // d >= 2
  std::shared_ptr<const refined::UnivariateRefinedDepth> glue;  // d == 1
};

/// Refined-depth engine with the method the experiments use: univariate glue
/// in 1-D; ray scaling with the Hill index for heavy-tailed bivariate
/// families; per-direction tail fits with the moment index for the bivariate
/// normal; per-direction fits with the Hill index for d >= 3.
RnEngine make_rn_engine(std::shared_ptr<const Sample> ref,
                        const RnEngineSpec& spec);

// Experiment kernels.  The figure runner calls these at paper scale; the
// acceptance harness calls them at its own scales and seeds.

struct RatioRow {
  std::size_t rep = 0;
  double level = 0.0;
  double dn_over_d = 0.0;
  double rn_over_d = 0.0;
};
/// Per replicate: fresh sample, one query point per level at that exact
/// population depth along the first axis, D_n/D and R_n/D recorded.
std::vector<RatioRow> ratio_study(Family family, std::size_t n, std::size_t k,
                                  std::span<const double> levels,
                                  std::size_t reps, std::uint64_t seed);

struct ContourStudy {
  std::vector<double> theta;
  double r_true = 0.0;       // population contour radius (constant by symmetry)
  std::vector<double> r_dn;  // empirical hull crossing along each ray
  std::vector<double> r_rn;  // refined contour radius
  double gamma_hat = 0.0;    // fitted tail index behind the refined contour
  double alpha_hat = 0.0;
};
/// Spherical-Cauchy contour comparison at one level.
ContourStudy contour_study(std::size_t n, std::size_t k, double level,
                           std::size_t angles, std::uint64_t seed);

struct FarRow {
  std::size_t rep = 0;
  double parametric = 0.0;
  double dn = 0.0;
  double rn = 0.0;
};
/// In-control false alarm rates of the three charts, one row per replicate.
std::vector<FarRow> far_study(Family family, std::size_t n,
                              std::size_t stream_n, std::size_t k,
                              double alpha, std::size_t reps,
                              std::uint64_t seed);

enum class ProcessChange { location, scale, both };
std::string change_name(ProcessChange c);
/// The out-of-control process for a monitored family: location moves to
/// (2,2) for the bivariate normal and (4,4) for the elliptical family; scale
/// doubles.
DistSpec changed_process(Family family, ProcessChange c);

struct ArlRow {
  std::size_t rep = 0;
  ProcessChange change = ProcessChange::location;
  double oracle = 0.0;
  double parametric = 0.0;  // NaN when the chart is not in the comparison
  double rn = 0.0;
  std::size_t capped_runs = 0;  // across all charts of this row
};
/// First-passage ARLs (runs_per_rep runs each, cap 20/alpha) for the oracle,
/// optionally parametric, and refined charts under all three changes.
std::vector<ArlRow> arl_study(Family family, std::size_t n, std::size_t k,
                              double alpha, std::size_t runs_per_rep,
                              std::size_t reps, std::uint64_t seed,
                              bool with_parametric);

struct DdRow {
  std::size_t rep = 0;
  ProcessChange setting = ProcessChange::location;
  double masked_error_rn = 0.0;  // among test points outside both hulls
  double masked_error_dn = 0.0;  // same points, empirical-depth rule (coin)
  double masked_fraction = 0.0;
  std::size_t masked_count = 0;
  double training_error_rn = 0.0;
};
/// Two-class study: F = the base family, G = changed_process(family,
/// setting); m and n training points, test_n test points half from each.
/// An empty settings span runs all three process changes; a subset runs
/// only those, with rows identical to the matching rows of a full run.
std::vector<DdRow> dd_study(Family family, std::size_t m, std::size_t n,
                            std::size_t test_n, std::size_t k,
                            std::size_t reps, std::uint64_t seed,
                            std::span<const ProcessChange> settings = {});

enum class FigureId {
  fig1_contour,
  fig2_univariate,
  fig3_multivariate,
  fig4_far,
  fig5_arl_normal,
  fig6_arl_elliptical,
  fig7_ddclass,
};
FigureId figure_from_name(const std::string& name);  // "fig1" .. "fig7"
std::string figure_name(FigureId id);

struct FigureSpec {
  FigureId id = FigureId::fig1_contour;
  double scale = 1.0;  // multiplies the default 100 replicates; in (0, 1]
  std::map<std::string, std::string> overrides;  // per-figure knobs (n, k, ...)
};

/// Runs one figure's protocol into out_dir: per-replicate CSVs, summary
/// JSON, an SVG plot, and a manifest written last.  On any error a manifest
/// flagged failed (with the failing stage) is written before rethrowing.
io::RunManifest run_figure(const FigureSpec& spec, const std::string& out_dir,
                           std::uint64_t seed);

}  // namespace depthkit::repro

#include "depthkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "depthkit/ddclass.hpp"
#include "depthkit/depth.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/evt.hpp"
#include "depthkit/io.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/refined.hpp"
#include "depthkit/repro.hpp"
#include "depthkit/rng.hpp"
#include "depthkit/spc.hpp"
#include "depthkit/svg.hpp"
#include "depthkit/types.hpp"

namespace depthkit::cli {

namespace {

using nlohmann::ordered_json;

/// Accumulates one run's record; the manifest is written last, so its
/// presence marks a run whose listed outputs all exist.
struct Ctx {
  std::string out_dir;
  io::RunManifest man;
  std::chrono::steady_clock::time_point t0;

  explicit Ctx(std::string dir, std::string command)
      : out_dir(std::move(dir)), t0(std::chrono::steady_clock::now()) {
    man.command = std::move(command);
    man.replicates = 1;
    io::ensure_dir(out_dir);
  }

  std::string path(const std::string& name) const {
    return out_dir + "/" + name;
  }
  void csv(const std::string& name, const io::Table& t) {
    io::write_csv(path(name), t);
    man.outputs.push_back(name);
  }
  void json(const std::string& name, const ordered_json& j) {
    io::write_text_file(path(name), j.dump(2) + "\n");
    man.outputs.push_back(name);
  }
  void finish() {
    man.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    io::write_manifest(man, path("manifest.json"));
  }
};

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    const std::string cell = comma == std::string::npos
                                 ? text.substr(start)
                                 : text.substr(start, comma - start);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &pos);
    } catch (const std::exception&) {
      throw config_error("not a number: '" + cell + "'");
    }
    if (pos != cell.size()) throw config_error("not a number: '" + cell + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

ordered_json stats_json(std::vector<double> v) {
  ordered_json j;
  j["count"] = v.size();
  if (v.empty()) return j;
  j["mean"] = num::mean(v);
  j["median"] = num::median(v);
  j["q1"] = num::quantile(v, 0.25);
  j["q3"] = num::quantile(v, 0.75);
  j["min"] = *std::min_element(v.begin(), v.end());
  j["max"] = *std::max_element(v.begin(), v.end());
  return j;
}

repro::ProcessChange change_from_name(const std::string& name) {
  for (auto c : {repro::ProcessChange::location, repro::ProcessChange::scale,
                 repro::ProcessChange::both}) {
    if (repro::change_name(c) == name) return c;
  }
  throw config_error("unknown change: " + name +
                     " (expected location, scale, or both)");
}

// Options shared by the commands that take a data sample.
struct InputOpts {
  std::string dist;
  std::size_t n = 500;
  std::uint64_t seed = 0;
  std::string shift;
  double scale = 1.0;
  std::string sample_path;

  void add_flags(CLI::App* cmd, bool with_sample = true) {
    cmd->add_option("--dist", dist, "distribution family to draw from");
    cmd->add_option("--n", n, "sample size when drawing");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--shift", shift, "comma-separated location shift");
    cmd->add_option("--scale", scale, "scale factor of the draw");
    if (with_sample) {
      cmd->add_option("--sample", sample_path, "CSV sample to load instead");
    }
  }

  DistSpec spec() const {
    DistSpec s;
    s.family = family_from_name(dist);
    if (!shift.empty()) s.shift = parse_doubles(shift);
    s.scale = scale;
    s.validate();
    return s;
  }

  Sample resolve(Ctx& cx) const {
    if (!sample_path.empty()) {
      if (!dist.empty()) {
        throw config_error("give either --sample or --dist, not both");
      }
      cx.man.params["sample"] = sample_path;
      return io::load_sample(sample_path);
    }
    if (dist.empty()) {
      throw config_error("an input is required: --dist or --sample");
    }
    DistSpec s = spec();
    cx.man.params["dist"] = dist;
    if (!shift.empty()) cx.man.params["shift"] = shift;
    cx.man.params["scale"] = io::fmt(scale);
    cx.man.params["n"] = io::fmt(n);
    cx.man.params["seed"] = io::fmt(seed);
    cx.man.seed = seed;
    return dist::sample(s, n, seed);
  }
};

// Query points via repeated --point or a --points CSV.
struct PointOpts {
  std::vector<std::string> point_flags;
  std::string points_path;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--point", point_flags,
                    "query point as comma-separated coordinates (repeatable)");
    cmd->add_option("--points", points_path, "CSV of query points (x1..xd)");
  }

  Sample resolve(std::size_t d, Ctx& cx) const {
    if (!points_path.empty() && !point_flags.empty()) {
      throw config_error("give either --points or --point, not both");
    }
    if (!points_path.empty()) {
      Sample p = io::load_sample(points_path);
      if (p.d != d) {
        throw config_error("query points have dimension " + io::fmt(p.d) +
                           ", the sample has " + io::fmt(d));
      }
      cx.man.params["points"] = points_path;
      return p;
    }
    if (point_flags.empty()) {
      throw config_error("give query points with --point or --points");
    }
    Sample p;
    p.d = d;
    for (const std::string& text : point_flags) {
      std::vector<double> v = parse_doubles(text);
      if (v.size() != d) {
        throw config_error("point '" + text + "' has " + io::fmt(v.size()) +
                           " coordinates, expected " + io::fmt(d));
      }
      p.data.insert(p.data.end(), v.begin(), v.end());
    }
    p.n = point_flags.size();
    return p;
  }
};

std::vector<std::string> coord_header(std::size_t d) {
  std::vector<std::string> h;
  for (std::size_t j = 0; j < d; ++j) h.push_back("x" + io::fmt(j + 1));
  return h;
}

ordered_json model_json(const refined::HeavyTailDepthModel& model,
                        std::uint64_t seed) {
  ordered_json j;
  j["center"] = model.center();
  j["k"] = model.k();
  j["k_tail"] = model.k_tail();
  if (std::isnan(model.alpha_hat())) {
    j["alpha_hat"] = nullptr;
  } else {
    j["alpha_hat"] = model.alpha_hat();
  }
  j["gamma_hat"] = model.gamma_hat();
  j["method"] = model.method() == refined::MdMethod::ray_scaling
                    ? "ray"
                    : "random";
  j["estimator"] = evt::estimator_name(model.estimator());
  if (model.method() == refined::MdMethod::random_direction) {
    j["directions"] = model.directions()->count();
    j["skipped_directions"] = model.skipped_directions();
  }
  j["seed"] = seed;
  return j;
}

ordered_json tail_json(const refined::TailModel1D& t) {
  ordered_json j;
  j["gamma_hat"] = t.gamma_hat;
  j["a_hat"] = t.a_hat;
  j["b_hat"] = t.b_hat;
  j["k"] = t.k;
  return j;
}

// ---- sample ----

struct SampleCmd {
  InputOpts in;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("sample", "draw a sample to CSV");
    in.add_flags(cmd, /*with_sample=*/false);
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "sample");
    if (in.dist.empty()) throw config_error("--dist is required");
    Sample s = in.resolve(cx);
    io::save_sample(s, cx.path("sample.csv"));
    cx.man.outputs.push_back("sample.csv");
    if (s.dist) cx.man.outputs.push_back("sample.json");
    cx.finish();
  }
};

// ---- depth ----

struct DepthCmd {
  InputOpts in;
  PointOpts pts;
  std::string method = "auto";
  std::size_t dirs = 500;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("depth", "empirical half-space depth of points");
    in.add_flags(cmd);
    pts.add_flags(cmd);
    cmd->add_option("--method", method, "auto, exact2d, or random");
    cmd->add_option("--dirs", dirs, "directions for --method random");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "depth");
    Sample s = in.resolve(cx);
    Sample q = pts.resolve(s.d, cx);
    cx.man.params["method"] = method;

    std::function<double(std::span<const double>)> engine;
    if (method == "exact2d") {
      if (s.d != 2) {
        throw config_error("--method exact2d needs a bivariate sample, got d=" +
                           io::fmt(s.d));
      }
      engine = [&s](std::span<const double> p) {
        return depth::depth_2d_exact(s, p);
      };
    } else if (method == "random") {
      auto ds = std::make_shared<depth::DirectionSet>(
          depth::DirectionSet::random(dirs, s.d, mix_seed(in.seed, 0x64697273)));
      cx.man.params["dirs"] = io::fmt(dirs);
      engine = [&s, ds](std::span<const double> p) {
        return depth::depth_random(s, p, *ds);
      };
    } else if (method == "auto") {
      if (s.d == 1) {
        engine = [&s](std::span<const double> p) {
          return depth::depth_1d(s, p[0]);
        };
      } else if (s.d == 2) {
        engine = [&s](std::span<const double> p) {
          return depth::depth_2d_exact(s, p);
        };
      } else {
        auto ds = std::make_shared<depth::DirectionSet>(
            depth::DirectionSet::random(dirs, s.d,
                                        mix_seed(in.seed, 0x64697273)));
        cx.man.params["dirs"] = io::fmt(dirs);
        engine = [&s, ds](std::span<const double> p) {
          return depth::depth_random(s, p, *ds);
        };
      }
    } else {
      throw config_error("unknown depth method: " + method);
    }

    io::Table t;
    t.header = coord_header(s.d);
    t.header.push_back("depth");
    for (std::size_t i = 0; i < q.n; ++i) {
      std::vector<std::string> cells;
      for (double v : q.row(i)) cells.push_back(io::fmt(v));
      cells.push_back(io::fmt(engine(q.row(i))));
      t.add_row(std::move(cells));
    }
    cx.csv("depth.csv", t);
    cx.finish();
  }
};

// ---- rdepth ----

struct RdepthCmd {
  InputOpts in;
  PointOpts pts;
  std::size_t k = 50;
  std::size_t k_tail_flag = 0;  // 0 means unset
  std::string method = "auto";
  std::string alpha_est;
  std::string center = "origin";
  std::size_t dirs = 500;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("rdepth", "tail-refined half-space depth");
    in.add_flags(cmd);
    pts.add_flags(cmd);
    cmd->add_option("--k", k, "number of tail order statistics");
    cmd->add_option("--k-tail", k_tail_flag, "separate k for the index fit");
    cmd->add_option("--method", method, "auto, univariate, ray, or random");
    cmd->add_option("--alpha-est", alpha_est, "hill or moment");
    cmd->add_option("--center", center, "origin or median");
    cmd->add_option("--dirs", dirs, "directions for --method random");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "rdepth");
    // The tail fit needs k below n/2; checked before any sampling so a bad
    // k/n combination fails fast.
    if (in.sample_path.empty() && 2 * k >= in.n) {
      throw config_error("k must be smaller than n/2 (k=" + io::fmt(k) +
                         ", n=" + io::fmt(in.n) + ")");
    }
    auto s = std::make_shared<const Sample>(in.resolve(cx));
    if (2 * k >= s->n) {
      throw config_error("k must be smaller than n/2 (k=" + io::fmt(k) +
                         ", n=" + io::fmt(s->n) + ")");
    }
    Sample q = pts.resolve(s->d, cx);

    repro::RnEngineSpec es;
    es.k = k;
    if (k_tail_flag > 0) es.k_tail = k_tail_flag;
    es.method = repro::rn_method_from_name(method == "auto" ? "auto" : method);
    if (!alpha_est.empty()) es.estimator = evt::estimator_from_name(alpha_est);
    es.center = repro::center_mode_from_name(center);
    es.dirs = dirs;
    es.dir_seed = mix_seed(in.seed, 0x64697273);
    repro::RnEngine engine = repro::make_rn_engine(s, es);
    cx.man.params["k"] = io::fmt(k);
    if (k_tail_flag > 0) cx.man.params["k_tail"] = io::fmt(k_tail_flag);
    cx.man.params["method"] = engine.description;
    cx.man.params["center"] = center;

    io::Table t;
    t.header = coord_header(s->d);
    t.header.push_back("rn");
    t.header.push_back("clamped");
    for (std::size_t i = 0; i < q.n; ++i) {
      std::vector<std::string> cells;
      for (double v : q.row(i)) cells.push_back(io::fmt(v));
      if (engine.model) {
        refined::RefinedResult r = engine.model->evaluate(q.row(i));
        cells.push_back(io::fmt(r.value));
        cells.push_back(r.clamped ? "1" : "0");
      } else {
        cells.push_back(io::fmt(engine.fn(q.row(i))));
        cells.push_back("0");
      }
      t.add_row(std::move(cells));
    }
    cx.csv("rdepth.csv", t);

    ordered_json model;
    if (engine.model) {
      model = model_json(*engine.model, in.seed);
    } else {
      model["method"] = "univariate";
      model["k"] = k;
      model["lower_glue"] = engine.glue->lower_glue();
      model["upper_glue"] = engine.glue->upper_glue();
      model["left"] = tail_json(engine.glue->left());
      model["right"] = tail_json(engine.glue->right());
      model["seed"] = in.seed;
    }
    cx.json("model.json", model);
    cx.finish();
  }
};

// ---- evt ----

struct EvtCmd {
  InputOpts in;
  std::string alpha_est = "hill";
  std::string center = "origin";
  std::size_t k = 0;  // 0 means unset
  std::size_t k_min = 5;
  std::size_t k_max = 0;  // 0 means n/5
  std::size_t window = 15;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("evt", "extreme value index along a k-path");
    in.add_flags(cmd);
    cmd->add_option("--alpha-est", alpha_est, "hill or moment");
    cmd->add_option("--center", center,
                    "center for norms when d >= 2: origin or median");
    cmd->add_option("--k", k, "also report the estimate at this single k");
    cmd->add_option("--k-min", k_min, "smallest k of the path");
    cmd->add_option("--k-max", k_max, "largest k of the path (default n/5)");
    cmd->add_option("--window", window, "stability window length");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "evt");
    Sample s = in.resolve(cx);
    std::vector<double> values;
    if (s.d == 1) {
      values.assign(s.data.begin(), s.data.end());
    } else {
      std::vector<double> c =
          repro::center_of(s, repro::center_mode_from_name(center));
      values.resize(s.n);
      for (std::size_t i = 0; i < s.n; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < s.d; ++j) {
          const double dv = s.data[i * s.d + j] - c[j];
          sq += dv * dv;
        }
        values[i] = std::sqrt(sq);
      }
      cx.man.params["center"] = center;
    }
    evt::TailSample ts = evt::make_tail_sample(std::move(values));
    const evt::Estimator est = evt::estimator_from_name(alpha_est);
    cx.man.params["alpha_est"] = alpha_est;

    std::size_t kmax = k_max > 0 ? k_max : std::max(k_min, ts.n() / 5);
    kmax = std::min(kmax, ts.n() - 1);
    cx.man.params["k_min"] = io::fmt(k_min);
    cx.man.params["k_max"] = io::fmt(kmax);
    std::vector<evt::KPathEntry> path = evt::k_path(ts, est, k_min, kmax);

    io::Table t;
    t.header = {"k", "gamma_hat"};
    for (const auto& e : path) {
      t.add_row({io::fmt(e.k), e.gamma_hat ? io::fmt(*e.gamma_hat) : ""});
    }
    cx.csv("kpath.csv", t);

    ordered_json summary;
    summary["estimator"] = alpha_est;
    summary["n"] = ts.n();
    try {
      const std::size_t sel = evt::select_k_stable(path, window);
      summary["selected_k"] = sel;
      for (const auto& e : path) {
        if (e.k == sel && e.gamma_hat) summary["gamma_at_selected"] = *e.gamma_hat;
      }
    } catch (const degenerate_data_error&) {
      summary["selected_k"] = nullptr;
    }
    if (k > 0) {
      summary["k"] = k;
      summary["gamma_hat"] =
          est == evt::Estimator::hill ? evt::hill(ts, k) : evt::moment(ts, k);
      summary["a_hat"] = evt::scale(ts, k);
    }
    cx.json("evt_summary.json", summary);
    cx.finish();
  }
};

// ---- contour ----

struct ContourCmd {
  InputOpts in;
  std::size_t k = 50;
  double level = 0.0;  // 0 means 1/n
  std::size_t angles = 500;
  std::string alpha_est = "hill";
  std::string center = "origin";
  std::string out_dir = "depthkit-out";

  ContourCmd() { in.dist = "sphcauchy2d"; }

  void add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("contour", "refined depth contour of a 2-D sample");
    in.add_flags(cmd);
    cmd->add_option("--k", k, "number of tail order statistics");
    cmd->add_option("--level", level, "depth level (default 1/n)");
    cmd->add_option("--angles", angles, "rays around the center");
    cmd->add_option("--alpha-est", alpha_est, "hill or moment");
    cmd->add_option("--center", center, "origin or median");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "contour");
    Sample s = in.resolve(cx);
    std::vector<double> c =
        repro::center_of(s, repro::center_mode_from_name(center));
    auto model = refined::HeavyTailDepthModel::fit_ray(
        s, k, c, evt::estimator_from_name(alpha_est));
    const double lv = level > 0.0 ? level : 1.0 / static_cast<double>(s.n);
    cx.man.params["k"] = io::fmt(k);
    cx.man.params["level"] = io::fmt(lv);
    cx.man.params["angles"] = io::fmt(angles);
    cx.man.params["center"] = center;
    refined::Contour contour = model.depth_contour(lv, angles);

    io::Table t;
    t.header = {"theta", "radius", "x", "y"};
    svg::Series line;
    line.name = "refined contour";
    line.color = "#d62728";
    line.close = true;
    for (std::size_t i = 0; i < contour.theta.size(); ++i) {
      const double x = c[0] + contour.radius[i] * std::cos(contour.theta[i]);
      const double y = c[1] + contour.radius[i] * std::sin(contour.theta[i]);
      t.add_row({io::fmt(contour.theta[i]), io::fmt(contour.radius[i]),
                 io::fmt(x), io::fmt(y)});
      line.points.push_back({x, y});
    }
    cx.csv("contour.csv", t);
    cx.json("model.json", model_json(model, in.seed));
    svg::write_contour_plot(cx.path("contour.svg"),
                            "depth contour at level " + io::fmt(lv), {line});
    cx.man.outputs.push_back("contour.svg");
    cx.finish();
  }
};

// ---- spc-far ----

struct SpcFarCmd {
  std::string dist;
  std::size_t n = 500;
  std::size_t m = 2000;
  std::size_t k = 50;
  double alpha = 0.0027;
  std::size_t reps = 30;
  std::uint64_t seed = 0;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "spc-far", "in-control false alarm rates of the three charts");
    cmd->add_option("--dist", dist, "monitored family")->required();
    cmd->add_option("--n", n, "reference sample size");
    cmd->add_option("--m", m, "stream length per replicate");
    cmd->add_option("--k", k, "tail order statistics of the refined chart");
    cmd->add_option("--alpha", alpha, "nominal false alarm rate");
    cmd->add_option("--reps", reps, "replicates");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "spc-far");
    cx.man.seed = seed;
    cx.man.replicates = reps;
    for (auto& [key, val] : std::map<std::string, std::string>{
             {"dist", dist}, {"n", io::fmt(n)}, {"m", io::fmt(m)},
             {"k", io::fmt(k)}, {"alpha", io::fmt(alpha)},
             {"reps", io::fmt(reps)}, {"seed", io::fmt(seed)}}) {
      cx.man.params[key] = val;
    }
    auto rows = repro::far_study(family_from_name(dist), n, m, k, alpha, reps,
                                 seed);
    io::Table t;
    t.header = {"rep", "parametric", "dn", "rn"};
    std::vector<double> pv, dv, rv;
    for (const auto& r : rows) {
      t.add_row({io::fmt(r.rep), io::fmt(r.parametric), io::fmt(r.dn),
                 io::fmt(r.rn)});
      pv.push_back(r.parametric);
      dv.push_back(r.dn);
      rv.push_back(r.rn);
    }
    cx.csv("far.csv", t);
    svg::write_boxplot(cx.path("far.svg"), dist + ": false alarm rate",
                       {"parametric", "dn", "rn"}, {pv, dv, rv});
    cx.man.outputs.push_back("far.svg");
    ordered_json summary;
    summary["alpha"] = alpha;
    summary["parametric"] = stats_json(std::move(pv));
    summary["dn"] = stats_json(std::move(dv));
    summary["rn"] = stats_json(std::move(rv));
    cx.json("far_summary.json", summary);
    cx.finish();
  }
};

// ---- spc-arl ----

struct SpcArlCmd {
  std::string dist;
  std::size_t n = 500;
  std::size_t k = 50;
  double alpha = 0.0027;
  std::size_t reps = 30;
  std::size_t runs = 20;
  bool parametric = false;
  std::uint64_t seed = 0;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "spc-arl", "out-of-control run lengths under the standard changes");
    cmd->add_option("--dist", dist, "monitored family")->required();
    cmd->add_option("--n", n, "reference sample size");
    cmd->add_option("--k", k, "tail order statistics of the refined chart");
    cmd->add_option("--alpha", alpha, "nominal false alarm rate");
    cmd->add_option("--reps", reps, "replicates");
    cmd->add_option("--runs", runs, "first-passage runs per replicate");
    cmd->add_flag("--parametric", parametric, "also run the T^2 chart");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "spc-arl");
    cx.man.seed = seed;
    cx.man.replicates = reps;
    cx.man.params["dist"] = dist;
    cx.man.params["n"] = io::fmt(n);
    cx.man.params["k"] = io::fmt(k);
    cx.man.params["alpha"] = io::fmt(alpha);
    cx.man.params["reps"] = io::fmt(reps);
    cx.man.params["runs"] = io::fmt(runs);
    cx.man.params["seed"] = io::fmt(seed);
    cx.man.notes["arl_protocol"] =
        "per replicate the ARL is the mean of " + io::fmt(runs) +
        " restarted first-passage run lengths, each capped at ceil(20/alpha) "
        "draws";
    auto rows = repro::arl_study(family_from_name(dist), n, k, alpha, runs,
                                 reps, seed, parametric);
    io::Table t;
    t.header = parametric
                   ? std::vector<std::string>{"rep", "change", "arl_oracle",
                                              "arl_parametric", "arl_rn",
                                              "capped_runs"}
                   : std::vector<std::string>{"rep", "change", "arl_oracle",
                                              "arl_rn", "capped_runs"};
    for (const auto& r : rows) {
      std::vector<std::string> cells{io::fmt(r.rep),
                                     repro::change_name(r.change),
                                     io::fmt(r.oracle)};
      if (parametric) cells.push_back(io::fmt(r.parametric));
      cells.push_back(io::fmt(r.rn));
      cells.push_back(io::fmt(r.capped_runs));
      t.add_row(std::move(cells));
    }
    cx.csv("arl.csv", t);

    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    ordered_json summary;
    for (std::size_t ci = 0; ci < 3; ++ci) {
      const auto change = static_cast<repro::ProcessChange>(ci);
      const std::string cname = repro::change_name(change);
      std::vector<double> ov, pv, rv;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto& r = rows[rep * 3 + ci];
        ov.push_back(r.oracle);
        if (parametric) pv.push_back(r.parametric);
        rv.push_back(r.rn);
      }
      groups.push_back("oracle " + cname);
      values.push_back(ov);
      if (parametric) {
        groups.push_back("param " + cname);
        values.push_back(pv);
      }
      groups.push_back("rn " + cname);
      values.push_back(rv);
      summary[cname]["oracle"] = stats_json(std::move(ov));
      if (parametric) summary[cname]["parametric"] = stats_json(std::move(pv));
      summary[cname]["rn"] = stats_json(std::move(rv));
    }
    svg::write_boxplot(cx.path("arl.svg"), dist + ": average run length",
                       groups, values);
    cx.man.outputs.push_back("arl.svg");
    cx.json("arl_summary.json", summary);
    cx.finish();
  }
};

// ---- ddclass ----

struct DdclassCmd {
  std::string dist;
  std::string change = "location";
  std::size_t m = 500;
  std::size_t n = 500;
  std::size_t test_n = 5000;
  std::size_t k = 50;
  std::string center = "median";
  std::uint64_t seed = 0;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "ddclass", "depth-vs-depth classification of two shifted samples");
    cmd->add_option("--dist", dist, "base family (the F class)")->required();
    cmd->add_option("--change", change,
                    "how G differs: location, scale, or both");
    cmd->add_option("--m", m, "training points from F");
    cmd->add_option("--n", n, "training points from G");
    cmd->add_option("--test", test_n, "test points (half from each class)");
    cmd->add_option("--k", k, "tail order statistics of the refined engines");
    cmd->add_option("--center", center, "engine center: origin or median");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "ddclass");
    if (test_n == 0 || test_n % 2 != 0) {
      throw config_error("--test must be positive and even");
    }
    cx.man.seed = seed;
    cx.man.params["dist"] = dist;
    cx.man.params["change"] = change;
    cx.man.params["m"] = io::fmt(m);
    cx.man.params["n"] = io::fmt(n);
    cx.man.params["test"] = io::fmt(test_n);
    cx.man.params["k"] = io::fmt(k);
    cx.man.params["center"] = center;
    cx.man.params["seed"] = io::fmt(seed);
    cx.man.notes["ties"] = "DD ties classify by a seeded fair coin";

    const Family family = family_from_name(dist);
    DistSpec f_spec{family, {}, 1.0};
    if (f_spec.dim() != 2) {
      throw config_error("ddclass needs a bivariate family");
    }
    DistSpec g_spec =
        repro::changed_process(family, change_from_name(change));

    auto train_f = std::make_shared<const Sample>(
        dist::sample(f_spec, m, mix_seed(seed, 0)));
    auto train_g = std::make_shared<const Sample>(
        dist::sample(g_spec, n, mix_seed(seed, 1)));
    Sample test_f = dist::sample(f_spec, test_n / 2, mix_seed(seed, 2));
    Sample test_g = dist::sample(g_spec, test_n / 2, mix_seed(seed, 3));

    repro::RnEngineSpec ef;
    ef.k = k;
    ef.center = repro::center_mode_from_name(center);
    ef.dir_seed = mix_seed(seed, 4);
    repro::RnEngineSpec eg = ef;
    eg.dir_seed = mix_seed(seed, 5);
    repro::RnEngine rn_f = repro::make_rn_engine(train_f, ef);
    repro::RnEngine rn_g = repro::make_rn_engine(train_g, eg);

    std::vector<dd::DDPoint> train =
        dd::dd_coordinates(*train_f, rn_f.fn, rn_g.fn, dd::Label::F);
    {
      auto cg = dd::dd_coordinates(*train_g, rn_f.fn, rn_g.fn, dd::Label::G);
      train.insert(train.end(), cg.begin(), cg.end());
    }
    dd::DDModel model = dd::fit_linear_dd(train, "rn/" + rn_f.description);

    std::vector<bool> mask_f = dd::zero_hull_mask(test_f, *train_f, *train_g);
    std::vector<bool> mask_g = dd::zero_hull_mask(test_g, *train_f, *train_g);

    io::Table t;
    t.header = {"point_id", "depth_f", "depth_g", "masked", "predicted",
                "truth"};
    std::size_t wrong = 0, masked_total = 0, masked_wrong = 0;
    auto score = [&](const Sample& test, const std::vector<bool>& mask,
                     dd::Label truth, std::size_t base) {
      for (std::size_t i = 0; i < test.n; ++i) {
        const std::size_t id = base + i;
        dd::DDPoint p{rn_f.fn(test.row(i)), rn_g.fn(test.row(i)), truth};
        const dd::Label pred =
            dd::classify(model, p, mix_seed(seed, 0x10000 + id));
        const bool is_masked = mask[i];
        if (pred != truth) ++wrong;
        if (is_masked) {
          ++masked_total;
          if (pred != truth) ++masked_wrong;
        }
        t.add_row({io::fmt(id), io::fmt(p.depth_f), io::fmt(p.depth_g),
                   is_masked ? "1" : "0", pred == dd::Label::F ? "F" : "G",
                   truth == dd::Label::F ? "F" : "G"});
      }
    };
    score(test_f, mask_f, dd::Label::F, 0);
    score(test_g, mask_g, dd::Label::G, test_f.n);
    cx.csv("report.csv", t);

    ordered_json summary;
    summary["slope"] = io::fmt(model.slope);
    summary["engine"] = model.engine;
    summary["training_error"] = model.training_error;
    summary["test_error"] =
        static_cast<double>(wrong) / static_cast<double>(test_n);
    summary["masked_count"] = masked_total;
    summary["masked_error"] =
        masked_total == 0
            ? ordered_json(nullptr)
            : ordered_json(static_cast<double>(masked_wrong) / masked_total);
    cx.json("ddclass_summary.json", summary);
    cx.finish();
  }
};

// ---- repro ----

struct ReproCmd {
  std::string figure;
  double scale = 1.0;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  std::string out_dir = "depthkit-out";

  void add(CLI::App& app) {
    CLI::App* cmd =
        app.add_subcommand("repro", "rerun a study end to end at some scale");
    cmd->add_option("figure", figure, "fig1 .. fig7, or all")->required();
    cmd->add_option("--scale", scale, "replicate fraction in (0, 1]");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--set", sets, "figure override as key=value (repeatable)");
    cmd->add_option("--out-dir", out_dir, "output directory");
  }

  void run() {
    Ctx cx(out_dir, "repro " + figure);
    cx.man.seed = seed;
    cx.man.params["figure"] = figure;
    cx.man.params["scale"] = io::fmt(scale);
    cx.man.params["seed"] = io::fmt(seed);
    std::map<std::string, std::string> overrides;
    for (const std::string& kv : sets) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size()) {
        throw config_error("--set expects key=value, got '" + kv + "'");
      }
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
      cx.man.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    std::vector<repro::FigureId> ids;
    if (figure == "all") {
      for (int i = 0; i < 7; ++i) ids.push_back(static_cast<repro::FigureId>(i));
    } else {
      ids.push_back(repro::figure_from_name(figure));
    }
    for (repro::FigureId id : ids) {
      repro::FigureSpec fs;
      fs.id = id;
      fs.scale = scale;
      fs.overrides = overrides;
      io::RunManifest fig_man = repro::run_figure(fs, out_dir, seed);
      cx.man.replicates = fig_man.replicates;
      for (const std::string& out : fig_man.outputs) {
        cx.man.outputs.push_back(out);
      }
      cx.man.outputs.push_back(repro::figure_name(id).substr(0, 4) +
                               "_manifest.json");
    }
    cx.finish();
  }
};

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"half-space depth with tail-refined extrapolation"};
  app.require_subcommand(1);

  SampleCmd sample_cmd;
  DepthCmd depth_cmd;
  RdepthCmd rdepth_cmd;
  EvtCmd evt_cmd;
  ContourCmd contour_cmd;
  SpcFarCmd far_cmd;
  SpcArlCmd arl_cmd;
  DdclassCmd dd_cmd;
  ReproCmd repro_cmd;
  sample_cmd.add(app);
  depth_cmd.add(app);
  rdepth_cmd.add(app);
  evt_cmd.add(app);
  contour_cmd.add(app);
  far_cmd.add(app);
  arl_cmd.add(app);
  dd_cmd.add(app);
  repro_cmd.add(app);

  std::vector<const char*> argv;
  argv.push_back("depthkit");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("sample")) sample_cmd.run();
    else if (app.got_subcommand("depth")) depth_cmd.run();
    else if (app.got_subcommand("rdepth")) rdepth_cmd.run();
    else if (app.got_subcommand("evt")) evt_cmd.run();
    else if (app.got_subcommand("contour")) contour_cmd.run();
    else if (app.got_subcommand("spc-far")) far_cmd.run();
    else if (app.got_subcommand("spc-arl")) arl_cmd.run();
    else if (app.got_subcommand("ddclass")) dd_cmd.run();
    else if (app.got_subcommand("repro")) repro_cmd.run();
    return 0;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const degenerate_data_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace depthkit::cli

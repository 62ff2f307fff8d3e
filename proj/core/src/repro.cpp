#include "depthkit/repro.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "depthkit/ddclass.hpp"
#include "depthkit/dist.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/parallel.hpp"
#include "depthkit/rng.hpp"
#include "depthkit/svg.hpp"

namespace depthkit::repro {

namespace {

using nlohmann::ordered_json;

std::vector<double> column_copy(const Sample& s, std::size_t j) {
  std::vector<double> out(s.n);
  for (std::size_t i = 0; i < s.n; ++i) out[i] = s.data[i * s.d + j];
  return out;
}

}  // namespace

CenterMode center_mode_from_name(const std::string& name) {
  if (name == "origin") return CenterMode::origin;
  if (name == "median") return CenterMode::median;
  throw config_error("unknown center mode: " + name);
}

std::string center_mode_name(CenterMode mode) {
  return mode == CenterMode::origin ? "origin" : "median";
}

std::vector<double> center_of(const Sample& s, CenterMode mode) {
  if (s.n == 0 || s.d == 0) throw config_error("center_of: empty sample");
  std::vector<double> c(s.d, 0.0);
  if (mode == CenterMode::median) {
    for (std::size_t j = 0; j < s.d; ++j) c[j] = num::median(column_copy(s, j));
  }
  return c;
}

DepthFn dn_engine(std::shared_ptr<const Sample> ref) {
  if (!ref || ref->n == 0) throw config_error("dn_engine: empty sample");
  if (ref->d == 1) {
    return [ref](std::span<const double> p) {
      return depth::depth_1d(*ref, p[0]);
    };
  }
  if (ref->d == 2) {
    return [ref](std::span<const double> p) {
      return depth::depth_2d_exact(*ref, p);
    };
  }
  throw config_error("dn_engine: exact empirical depth needs d <= 2");
}

DepthFn dn_engine_random(std::shared_ptr<const Sample> ref,
                         std::shared_ptr<const depth::DirectionSet> dirs) {
  if (!ref || ref->n == 0) throw config_error("dn_engine_random: empty sample");
  if (!dirs || dirs->count() == 0) {
    throw config_error("dn_engine_random: empty direction set");
  }
  if (dirs->d != ref->d) {
    throw config_error("dn_engine_random: direction dimension mismatch");
  }
  return [ref, dirs](std::span<const double> p) {
    return depth::depth_random(*ref, p, *dirs);
  };
}

DepthFn oracle_engine(DistSpec spec) {
  spec.validate();
  return [spec](std::span<const double> p) {
    return dist::true_depth(spec, p);
  };
}

RnMethod rn_method_from_name(const std::string& name) {
  if (name == "auto") return RnMethod::auto_pick;
  if (name == "univariate") return RnMethod::univariate;
  if (name == "ray") return RnMethod::ray;
  if (name == "random") return RnMethod::random;
  throw config_error("unknown refined-depth method: " + name);
}

RnEngine make_rn_engine(std::shared_ptr<const Sample> ref,
                        const RnEngineSpec& spec) {
  if (!ref || ref->n == 0) throw config_error("make_rn_engine: empty sample");
  const Sample& s = *ref;
  const bool normal_family = s.dist && s.dist->family == Family::normal2d;

  RnMethod method = spec.method;
  if (method == RnMethod::auto_pick) {
    if (s.d == 1) {
      method = RnMethod::univariate;
    } else if (s.d == 2) {
      method = normal_family ? RnMethod::random : RnMethod::ray;
    } else {
      method = RnMethod::random;
    }
  }

  RnEngine engine;
  if (method == RnMethod::univariate) {
    if (s.d != 1) {
      throw config_error("univariate refined depth needs a 1-D sample");
    }
    auto glue = std::make_shared<refined::UnivariateRefinedDepth>(s, spec.k);
    engine.glue = glue;
    engine.fn = [glue](std::span<const double> p) { return glue->value(p[0]); };
    engine.description = "univariate/moment";
    return engine;
  }

  std::vector<double> center = center_of(s, spec.center);
  if (method == RnMethod::ray) {
    evt::Estimator est = spec.estimator.value_or(evt::Estimator::hill);
    auto model = std::make_shared<const refined::HeavyTailDepthModel>(
        refined::HeavyTailDepthModel::fit_ray(s, spec.k, std::move(center),
                                              est, spec.k_tail));
    engine.model = model;
    engine.fn = [model](std::span<const double> p) {
      return model->evaluate(p).value;
    };
    engine.description = "ray/" + evt::estimator_name(est);
  } else {
    evt::Estimator est = spec.estimator.value_or(
        normal_family ? evt::Estimator::moment : evt::Estimator::hill);
    auto dirs = depth::DirectionSet::random(spec.dirs, s.d, spec.dir_seed);
    auto model = std::make_shared<const refined::HeavyTailDepthModel>(
        refined::HeavyTailDepthModel::fit_random(
            s, spec.k, std::move(dirs), std::move(center), est, spec.k_tail));
    engine.model = model;
    engine.fn = [model](std::span<const double> p) {
      return model->evaluate(p).value;
    };
    engine.description = "random/" + evt::estimator_name(est);
  }
  return engine;
}

std::vector<RatioRow> ratio_study(Family family, std::size_t n, std::size_t k,
                                  std::span<const double> levels,
                                  std::size_t reps, std::uint64_t seed) {
  if (reps == 0) throw config_error("ratio_study: reps must be positive");
  if (levels.empty()) throw config_error("ratio_study: no levels given");
  DistSpec spec{family, {}, 1.0};
  const std::size_t d = spec.dim();
  std::vector<double> e1(d, 0.0);
  e1[0] = 1.0;

  // One query point per level, shared across replicates.
  std::vector<std::vector<double>> queries;
  queries.reserve(levels.size());
  for (double level : levels) {
    queries.push_back(dist::quantile_point(spec, level, e1));
  }

  std::vector<RatioRow> rows(reps * levels.size());
  par::parallel_for(reps, [&](std::size_t rep) {
    const std::uint64_t rep_seed = mix_seed(seed, rep);
    auto ref = std::make_shared<const Sample>(
        dist::sample(spec, n, mix_seed(rep_seed, 0)));
    RnEngineSpec es;
    es.k = k;
    es.dir_seed = mix_seed(rep_seed, 1);
    RnEngine rn = make_rn_engine(ref, es);
    DepthFn dn;
    if (d <= 2) {
      dn = dn_engine(ref);
    } else {
      // Same seed and count as the refined engine, so both depths see the
      // identical direction set.
      auto dirs = std::make_shared<const depth::DirectionSet>(
          depth::DirectionSet::random(es.dirs, d, es.dir_seed));
      dn = dn_engine_random(ref, dirs);
    }
    for (std::size_t li = 0; li < levels.size(); ++li) {
      RatioRow& row = rows[rep * levels.size() + li];
      row.rep = rep;
      row.level = levels[li];
      row.dn_over_d = dn(queries[li]) / levels[li];
      row.rn_over_d = rn.fn(queries[li]) / levels[li];
    }
  });
  return rows;
}

ContourStudy contour_study(std::size_t n, std::size_t k, double level,
                           std::size_t angles, std::uint64_t seed) {
  if (angles == 0) throw config_error("contour_study: angles must be positive");
  if (!(level > 0.0) || level >= 0.5) {
    throw config_error("contour_study: level must lie in (0, 0.5)");
  }
  DistSpec spec{Family::sphcauchy2d, {}, 1.0};
  Sample s = dist::sample(spec, n, mix_seed(seed, 0));
  auto model = refined::HeavyTailDepthModel::fit_ray(s, k);
  refined::Contour contour = model.depth_contour(level, angles);

  ContourStudy study;
  study.theta = contour.theta;
  study.r_rn = contour.radius;
  study.r_true = 1.0 / std::tan(std::numbers::pi * level);
  study.gamma_hat = model.gamma_hat();
  study.alpha_hat = model.alpha_hat();
  study.r_dn.resize(angles);
  const std::vector<double> center{0.0, 0.0};
  par::parallel_for(angles, [&](std::size_t i) {
    const double u[2] = {std::cos(study.theta[i]), std::sin(study.theta[i])};
    study.r_dn[i] = depth::ray_count_crossing(s, center, u, 1);
  });
  return study;
}

std::vector<FarRow> far_study(Family family, std::size_t n,
                              std::size_t stream_n, std::size_t k,
                              double alpha, std::size_t reps,
                              std::uint64_t seed) {
  if (reps == 0) throw config_error("far_study: reps must be positive");
  DistSpec spec{family, {}, 1.0};
  if (spec.dim() != 2) {
    throw config_error("far_study: bivariate families only");
  }
  std::vector<FarRow> rows(reps);
  par::parallel_for(reps, [&](std::size_t rep) {
    const std::uint64_t rep_seed = mix_seed(seed, rep);
    auto ref = std::make_shared<const Sample>(
        dist::sample(spec, n, mix_seed(rep_seed, 0)));
    Sample stream = dist::sample(spec, stream_n, mix_seed(rep_seed, 1));

    spc::ChartModel parametric = spc::fit_parametric_chart(*ref, alpha);
    spc::ChartModel dn_chart =
        spc::fit_depth_chart(*ref, alpha, "dn", dn_engine(ref));
    RnEngineSpec es;
    es.k = k;
    es.dir_seed = mix_seed(rep_seed, 2);
    RnEngine rn = make_rn_engine(ref, es);
    spc::ChartModel rn_chart =
        spc::fit_depth_chart(*ref, alpha, "rn/" + rn.description, rn.fn);

    FarRow& row = rows[rep];
    row.rep = rep;
    row.parametric = spc::false_alarm_rate(parametric, stream);
    row.dn = spc::false_alarm_rate(dn_chart, stream);
    row.rn = spc::false_alarm_rate(rn_chart, stream);
  });
  return rows;
}

std::string change_name(ProcessChange c) {
  switch (c) {
    case ProcessChange::location: return "location";
    case ProcessChange::scale: return "scale";
    case ProcessChange::both: return "both";
  }
  throw config_error("change_name: bad enum value");
}

DistSpec changed_process(Family family, ProcessChange c) {
  double delta = 0.0;
  if (family == Family::normal2d) {
    delta = 2.0;
  } else if (family == Family::elliptical2d) {
    delta = 4.0;
  } else {
    throw config_error("changed_process: no monitored change defined for " +
                       family_name(family));
  }
  DistSpec out{family, {}, 1.0};
  if (c == ProcessChange::location || c == ProcessChange::both) {
    out.shift = {delta, delta};
  }
  if (c == ProcessChange::scale || c == ProcessChange::both) {
    out.scale = 2.0;
  }
  return out;
}

namespace {
constexpr ProcessChange kChanges[3] = {
    ProcessChange::location, ProcessChange::scale, ProcessChange::both};

std::size_t count_capped(const spc::RunResult& r) {
  return static_cast<std::size_t>(
      std::count(r.capped.begin(), r.capped.end(), true));
}
}  // namespace

std::vector<ArlRow> arl_study(Family family, std::size_t n, std::size_t k,
                              double alpha, std::size_t runs_per_rep,
                              std::size_t reps, std::uint64_t seed,
                              bool with_parametric) {
  if (reps == 0) throw config_error("arl_study: reps must be positive");
  if (runs_per_rep == 0) {
    throw config_error("arl_study: runs_per_rep must be positive");
  }
  DistSpec spec{family, {}, 1.0};
  if (spec.dim() != 2) {
    throw config_error("arl_study: bivariate families only");
  }
  const auto cap = static_cast<std::size_t>(std::ceil(20.0 / alpha));

  std::vector<ArlRow> rows(reps * 3);
  par::parallel_for(reps, [&](std::size_t rep) {
    const std::uint64_t rep_seed = mix_seed(seed, rep);
    auto ref = std::make_shared<const Sample>(
        dist::sample(spec, n, mix_seed(rep_seed, 0)));
    spc::ChartModel oracle_chart =
        spc::fit_depth_chart(*ref, alpha, "oracle", oracle_engine(spec));
    std::optional<spc::ChartModel> parametric;
    if (with_parametric) parametric = spc::fit_parametric_chart(*ref, alpha);
    RnEngineSpec es;
    es.k = k;
    es.dir_seed = mix_seed(rep_seed, 1);
    RnEngine rn = make_rn_engine(ref, es);
    spc::ChartModel rn_chart =
        spc::fit_depth_chart(*ref, alpha, "rn/" + rn.description, rn.fn);

    for (std::size_t ci = 0; ci < 3; ++ci) {
      DistSpec changed = changed_process(family, kChanges[ci]);
      // The same run seed for every chart pairs their draw sequences.
      const std::uint64_t run_seed = mix_seed(rep_seed, 10 + ci);
      spc::RunResult ro = spc::average_run_length(oracle_chart, changed,
                                                  runs_per_rep, cap, run_seed);
      spc::RunResult rr = spc::average_run_length(rn_chart, changed,
                                                  runs_per_rep, cap, run_seed);
      ArlRow& row = rows[rep * 3 + ci];
      row.rep = rep;
      row.change = kChanges[ci];
      row.oracle = ro.arl;
      row.rn = rr.arl;
      row.capped_runs = count_capped(ro) + count_capped(rr);
      if (parametric) {
        spc::RunResult rp = spc::average_run_length(*parametric, changed,
                                                    runs_per_rep, cap,
                                                    run_seed);
        row.parametric = rp.arl;
        row.capped_runs += count_capped(rp);
      } else {
        row.parametric = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return rows;
}

std::vector<DdRow> dd_study(Family family, std::size_t m, std::size_t n,
                            std::size_t test_n, std::size_t k,
                            std::size_t reps, std::uint64_t seed,
                            std::span<const ProcessChange> settings) {
  if (reps == 0) throw config_error("dd_study: reps must be positive");
  if (test_n == 0 || test_n % 2 != 0) {
    throw config_error("dd_study: test_n must be positive and even");
  }
  DistSpec f_spec{family, {}, 1.0};
  if (f_spec.dim() != 2) {
    throw config_error("dd_study: bivariate families only");
  }

  // Seeds are derived from the setting's fixed slot, so a subset run
  // reproduces the matching rows of a full run bit for bit.
  std::vector<std::size_t> picks;
  if (settings.empty()) {
    picks = {0, 1, 2};
  } else {
    for (const ProcessChange c : settings) {
      picks.push_back(static_cast<std::size_t>(c));
    }
  }

  std::vector<DdRow> rows(reps * picks.size());
  par::parallel_for(reps, [&](std::size_t rep) {
    const std::uint64_t rep_seed = mix_seed(seed, rep);
    for (std::size_t pi = 0; pi < picks.size(); ++pi) {
      const std::size_t si = picks[pi];
      const std::uint64_t ss = mix_seed(rep_seed, 100 + si);
      DistSpec g_spec = changed_process(family, kChanges[si]);
      auto train_f = std::make_shared<const Sample>(
          dist::sample(f_spec, m, mix_seed(ss, 0)));
      auto train_g = std::make_shared<const Sample>(
          dist::sample(g_spec, n, mix_seed(ss, 1)));
      Sample test_f = dist::sample(f_spec, test_n / 2, mix_seed(ss, 2));
      Sample test_g = dist::sample(g_spec, test_n / 2, mix_seed(ss, 3));

      // The shifted class is far from the origin, so both refined engines
      // center at their own sample median.
      RnEngineSpec ef;
      ef.k = k;
      ef.center = CenterMode::median;
      ef.dir_seed = mix_seed(ss, 4);
      RnEngineSpec eg = ef;
      eg.dir_seed = mix_seed(ss, 5);
      RnEngine rn_f = make_rn_engine(train_f, ef);
      RnEngine rn_g = make_rn_engine(train_g, eg);

      std::vector<dd::DDPoint> train =
          dd::dd_coordinates(*train_f, rn_f.fn, rn_g.fn, dd::Label::F);
      {
        auto cg = dd::dd_coordinates(*train_g, rn_f.fn, rn_g.fn, dd::Label::G);
        train.insert(train.end(), cg.begin(), cg.end());
      }
      dd::DDModel model_rn = dd::fit_linear_dd(train, "rn/" + rn_f.description);

      DepthFn dn_f = dn_engine(train_f);
      DepthFn dn_g = dn_engine(train_g);
      std::vector<dd::DDPoint> train_dn =
          dd::dd_coordinates(*train_f, dn_f, dn_g, dd::Label::F);
      {
        auto cg = dd::dd_coordinates(*train_g, dn_f, dn_g, dd::Label::G);
        train_dn.insert(train_dn.end(), cg.begin(), cg.end());
      }
      dd::DDModel model_dn = dd::fit_linear_dd(train_dn, "dn");

      std::vector<bool> mask_f = dd::zero_hull_mask(test_f, *train_f, *train_g);
      std::vector<bool> mask_g = dd::zero_hull_mask(test_g, *train_f, *train_g);

      std::size_t masked = 0;
      double wrong_rn = 0.0;
      double wrong_dn = 0.0;
      auto score = [&](const Sample& test, const std::vector<bool>& mask,
                       dd::Label truth, std::size_t base) {
        for (std::size_t i = 0; i < test.n; ++i) {
          if (!mask[i]) continue;
          ++masked;
          dd::DDPoint p{rn_f.fn(test.row(i)), rn_g.fn(test.row(i)), truth};
          if (dd::classify(model_rn, p, mix_seed(ss, 0x10000 + base + i)) !=
              truth) {
            wrong_rn += 1.0;
          }
          // A masked point has exact depth zero in both coordinates, so the
          // empirical rule is an outright coin flip.
          dd::DDPoint pz{0.0, 0.0, truth};
          if (dd::classify(model_dn, pz, mix_seed(ss, 0x20000 + base + i)) !=
              truth) {
            wrong_dn += 1.0;
          }
        }
      };
      score(test_f, mask_f, dd::Label::F, 0);
      score(test_g, mask_g, dd::Label::G, test_f.n);

      DdRow& row = rows[rep * picks.size() + pi];
      row.rep = rep;
      row.setting = kChanges[si];
      row.masked_count = masked;
      row.masked_fraction =
          static_cast<double>(masked) / static_cast<double>(test_n);
      row.masked_error_rn = masked == 0 ? 0.0 : wrong_rn / masked;
      row.masked_error_dn = masked == 0 ? 0.0 : wrong_dn / masked;
      row.training_error_rn = model_rn.training_error;
    }
  });
  return rows;
}

FigureId figure_from_name(const std::string& name) {
  for (int i = 0; i < 7; ++i) {
    auto id = static_cast<FigureId>(i);
    const std::string full = figure_name(id);
    if (name == full || name == full.substr(0, 4)) return id;
  }
  throw config_error("unknown figure: " + name +
                     " (expected fig1 .. fig7)");
}

std::string figure_name(FigureId id) {
  switch (id) {
    case FigureId::fig1_contour: return "fig1_contour";
    case FigureId::fig2_univariate: return "fig2_univariate";
    case FigureId::fig3_multivariate: return "fig3_multivariate";
    case FigureId::fig4_far: return "fig4_far";
    case FigureId::fig5_arl_normal: return "fig5_arl_normal";
    case FigureId::fig6_arl_elliptical: return "fig6_arl_elliptical";
    case FigureId::fig7_ddclass: return "fig7_ddclass";
  }
  throw config_error("figure_name: bad enum value");
}

namespace {

struct FigureContext {
  std::string out_dir;
  std::string prefix;  // "fig1" .. "fig7"
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::map<std::string, std::string> overrides;
  io::RunManifest* man = nullptr;
  std::string* stage = nullptr;
};

std::size_t take_size(std::map<std::string, std::string>& ov,
                      const std::string& key, std::size_t dflt) {
  auto it = ov.find(key);
  if (it == ov.end()) return dflt;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(it->second, &pos);
  } catch (const std::exception&) {
    throw config_error("figure override " + key + ": not an integer: " +
                       it->second);
  }
  if (pos != it->second.size()) {
    throw config_error("figure override " + key + ": not an integer: " +
                       it->second);
  }
  ov.erase(it);
  return static_cast<std::size_t>(v);
}

double take_double(std::map<std::string, std::string>& ov,
                   const std::string& key, double dflt) {
  auto it = ov.find(key);
  if (it == ov.end()) return dflt;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    throw config_error("figure override " + key + ": not a number: " +
                       it->second);
  }
  if (pos != it->second.size()) {
    throw config_error("figure override " + key + ": not a number: " +
                       it->second);
  }
  ov.erase(it);
  return v;
}

void finish_overrides(const std::map<std::string, std::string>& ov) {
  if (!ov.empty()) {
    throw config_error("unknown figure override: " + ov.begin()->first);
  }
}

void emit_csv(FigureContext& cx, const std::string& name,
              const io::Table& table) {
  io::write_csv(cx.out_dir + "/" + name, table);
  cx.man->outputs.push_back(name);
}

void emit_json(FigureContext& cx, const std::string& name,
               const ordered_json& j) {
  io::write_text_file(cx.out_dir + "/" + name, j.dump(2) + "\n");
  cx.man->outputs.push_back(name);
}

void emit_boxplot(FigureContext& cx, const std::string& name,
                  const std::string& title,
                  const std::vector<std::string>& groups,
                  const std::vector<std::vector<double>>& values) {
  svg::write_boxplot(cx.out_dir + "/" + name, title, groups, values);
  cx.man->outputs.push_back(name);
}

ordered_json box_stats(std::vector<double> v) {
  if (v.empty()) return ordered_json{{"count", 0}};
  ordered_json j;
  j["count"] = v.size();
  j["mean"] = num::mean(v);
  j["median"] = num::median(v);
  j["q1"] = num::quantile(v, 0.25);
  j["q3"] = num::quantile(v, 0.75);
  j["min"] = *std::min_element(v.begin(), v.end());
  j["max"] = *std::max_element(v.begin(), v.end());
  return j;
}

std::string level_label(double level) {
  return "1/" + std::to_string(
                    static_cast<long long>(std::llround(1.0 / level)));
}

const std::vector<double>& default_levels() {
  static const std::vector<double> levels{1.0 / 100, 1.0 / 500, 1.0 / 1000,
                                          1.0 / 2000};
  return levels;
}

void run_fig1(FigureContext& cx) {
  auto& ov = cx.overrides;
  const std::size_t n = take_size(ov, "n", 500);
  const std::size_t k = take_size(ov, "k", 50);
  const std::size_t angles = take_size(ov, "angles", 500);
  const double level = take_double(ov, "level", 1.0 / static_cast<double>(n));
  finish_overrides(ov);
  cx.man->params["n"] = io::fmt(n);
  cx.man->params["k"] = io::fmt(k);
  cx.man->params["angles"] = io::fmt(angles);
  cx.man->params["level"] = io::fmt(level);
  cx.man->notes["dn_contour"] =
      "empirical hull crossing (count >= 1) along each ray";

  *cx.stage = "contour computation";
  ContourStudy st = contour_study(n, k, level, angles, cx.seed);

  *cx.stage = "writing contour tables";
  auto contour_table = [&](const std::vector<double>& radius, bool constant) {
    io::Table t;
    t.header = {"theta", "radius", "x", "y"};
    for (std::size_t i = 0; i < st.theta.size(); ++i) {
      const double r = constant ? st.r_true : radius[i];
      t.add_row({io::fmt(st.theta[i]), io::fmt(r),
                 io::fmt(r * std::cos(st.theta[i])),
                 io::fmt(r * std::sin(st.theta[i]))});
    }
    return t;
  };
  emit_csv(cx, cx.prefix + "_contour_true.csv", contour_table({}, true));
  emit_csv(cx, cx.prefix + "_contour_dn.csv", contour_table(st.r_dn, false));
  emit_csv(cx, cx.prefix + "_contour_rn.csv", contour_table(st.r_rn, false));

  *cx.stage = "writing model summary";
  ordered_json model;
  model["center"] = std::vector<double>{0.0, 0.0};
  model["k"] = k;
  if (std::isnan(st.alpha_hat)) {
    model["alpha_hat"] = nullptr;
  } else {
    model["alpha_hat"] = st.alpha_hat;
  }
  model["gamma_hat"] = st.gamma_hat;
  model["method"] = "ray/hill";
  model["seed"] = cx.seed;
  emit_json(cx, cx.prefix + "_model.json", model);

  ordered_json summary;
  summary["level"] = level;
  summary["r_true"] = st.r_true;
  summary["r_dn"] = box_stats(st.r_dn);
  summary["r_rn"] = box_stats(st.r_rn);
  {
    std::vector<double> ratio(st.r_rn);
    for (double& r : ratio) r /= st.r_true;
    summary["rn_radius_ratio"] = box_stats(ratio);
  }
  emit_json(cx, cx.prefix + "_summary.json", summary);

  *cx.stage = "writing contour plot";
  auto to_series = [&](const std::string& name, const std::string& color,
                       const std::vector<double>& radius, bool constant) {
    svg::Series s;
    s.name = name;
    s.color = color;
    s.close = true;
    for (std::size_t i = 0; i < st.theta.size(); ++i) {
      const double r = constant ? st.r_true : radius[i];
      s.points.push_back({r * std::cos(st.theta[i]),
                          r * std::sin(st.theta[i])});
    }
    return s;
  };
  std::vector<svg::Series> series;
  series.push_back(to_series("population", "#888888", {}, true));
  series.push_back(to_series("empirical hull", "#1f77b4", st.r_dn, false));
  series.push_back(to_series("refined", "#d62728", st.r_rn, false));
  svg::write_contour_plot(cx.out_dir + "/" + cx.prefix + "_contours.svg",
                          "depth contours at level " + level_label(level),
                          series);
  cx.man->outputs.push_back(cx.prefix + "_contours.svg");
}

void run_ratio_figure(FigureContext& cx, const std::vector<Family>& families) {
  auto& ov = cx.overrides;
  const std::size_t n = take_size(ov, "n", 500);
  const std::size_t k = take_size(ov, "k", 50);
  finish_overrides(ov);
  cx.man->params["n"] = io::fmt(n);
  cx.man->params["k"] = io::fmt(k);
  cx.man->notes["whiskers"] =
      "boxes span quartiles, whiskers 1.5 IQR, dots beyond";
  if (cx.prefix == "fig3") {
    cx.man->notes["dn_d_ge_3"] =
        "for d >= 3 the empirical depth uses the refined engine's "
        "direction set";
  }

  const std::vector<double>& levels = default_levels();
  ordered_json summary;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const Family family = families[fi];
    const std::string fname = family_name(family);
    *cx.stage = "ratio study: " + fname;
    std::vector<RatioRow> rows =
        ratio_study(family, n, k, levels, cx.replicates,
                    mix_seed(cx.seed, fi));

    io::Table t;
    t.header = {"rep", "level", "dn_over_d", "rn_over_d"};
    for (const RatioRow& r : rows) {
      t.add_row({io::fmt(r.rep), io::fmt(r.level), io::fmt(r.dn_over_d),
                 io::fmt(r.rn_over_d)});
    }
    emit_csv(cx, cx.prefix + "_" + fname + ".csv", t);

    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    ordered_json fam_summary;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::vector<double> dn_vals, rn_vals;
      for (std::size_t rep = 0; rep < cx.replicates; ++rep) {
        dn_vals.push_back(rows[rep * levels.size() + li].dn_over_d);
        rn_vals.push_back(rows[rep * levels.size() + li].rn_over_d);
      }
      const std::string label = level_label(levels[li]);
      groups.push_back("dn " + label);
      values.push_back(dn_vals);
      groups.push_back("rn " + label);
      values.push_back(rn_vals);
      fam_summary[label]["dn_over_d"] = box_stats(std::move(dn_vals));
      fam_summary[label]["rn_over_d"] = box_stats(std::move(rn_vals));
    }
    emit_boxplot(cx, cx.prefix + "_" + fname + ".svg",
                 fname + ": estimated over true depth", groups, values);
    summary[fname] = std::move(fam_summary);
  }
  *cx.stage = "writing summary";
  emit_json(cx, cx.prefix + "_summary.json", summary);
}

void run_fig4(FigureContext& cx) {
  auto& ov = cx.overrides;
  const std::size_t n = take_size(ov, "n", 500);
  const std::size_t k = take_size(ov, "k", 50);
  const std::size_t stream = take_size(ov, "stream", 5000);
  const double alpha = take_double(ov, "alpha", 0.0027);
  finish_overrides(ov);
  cx.man->params["n"] = io::fmt(n);
  cx.man->params["k"] = io::fmt(k);
  cx.man->params["stream"] = io::fmt(stream);
  cx.man->params["alpha"] = io::fmt(alpha);
  cx.man->notes["engines"] =
      "normal2d: random/moment; elliptical2d: ray/hill";
  cx.man->notes["whiskers"] =
      "boxes span quartiles, whiskers 1.5 IQR, dots beyond";

  const std::vector<Family> families{Family::normal2d, Family::elliptical2d};
  ordered_json summary;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const Family family = families[fi];
    const std::string fname = family_name(family);
    *cx.stage = "false alarm study: " + fname;
    std::vector<FarRow> rows = far_study(family, n, stream, k, alpha,
                                         cx.replicates, mix_seed(cx.seed, fi));

    io::Table t;
    t.header = {"rep", "parametric", "dn", "rn"};
    std::vector<double> pv, dv, rv;
    for (const FarRow& r : rows) {
      t.add_row({io::fmt(r.rep), io::fmt(r.parametric), io::fmt(r.dn),
                 io::fmt(r.rn)});
      pv.push_back(r.parametric);
      dv.push_back(r.dn);
      rv.push_back(r.rn);
    }
    emit_csv(cx, cx.prefix + "_" + fname + ".csv", t);
    emit_boxplot(cx, cx.prefix + "_" + fname + ".svg",
                 fname + ": in-control false alarm rate",
                 {"parametric", "dn", "rn"}, {pv, dv, rv});
    summary[fname]["parametric"] = box_stats(std::move(pv));
    summary[fname]["dn"] = box_stats(std::move(dv));
    summary[fname]["rn"] = box_stats(std::move(rv));
    summary[fname]["alpha"] = alpha;
  }
  *cx.stage = "writing summary";
  emit_json(cx, cx.prefix + "_summary.json", summary);
}

void run_arl_figure(FigureContext& cx, Family family, bool with_parametric) {
  auto& ov = cx.overrides;
  const std::size_t n = take_size(ov, "n", 500);
  const std::size_t k = take_size(ov, "k", 50);
  const std::size_t runs = take_size(ov, "runs", 20);
  const double alpha = take_double(ov, "alpha", 0.0027);
  finish_overrides(ov);
  cx.man->params["n"] = io::fmt(n);
  cx.man->params["k"] = io::fmt(k);
  cx.man->params["runs"] = io::fmt(runs);
  cx.man->params["alpha"] = io::fmt(alpha);
  cx.man->notes["arl_protocol"] =
      "per replicate the ARL is the mean of " + io::fmt(runs) +
      " restarted first-passage run lengths, each capped at ceil(20/alpha) "
      "draws";
  cx.man->notes["pairing"] = "charts share draw seeds within a replicate";
  cx.man->notes["whiskers"] =
      "boxes span quartiles, whiskers 1.5 IQR, dots beyond";

  const std::string fname = family_name(family);
  *cx.stage = "run length study: " + fname;
  std::vector<ArlRow> rows = arl_study(family, n, k, alpha, runs,
                                       cx.replicates, cx.seed,
                                       with_parametric);

  io::Table t;
  if (with_parametric) {
    t.header = {"rep", "change", "arl_oracle", "arl_parametric", "arl_rn",
                "capped_runs"};
  } else {
    t.header = {"rep", "change", "arl_oracle", "arl_rn", "capped_runs"};
  }
  for (const ArlRow& r : rows) {
    std::vector<std::string> cells{io::fmt(r.rep), change_name(r.change),
                                   io::fmt(r.oracle)};
    if (with_parametric) cells.push_back(io::fmt(r.parametric));
    cells.push_back(io::fmt(r.rn));
    cells.push_back(io::fmt(r.capped_runs));
    t.add_row(std::move(cells));
  }
  emit_csv(cx, cx.prefix + "_" + fname + ".csv", t);

  *cx.stage = "writing summary";
  std::vector<std::string> groups;
  std::vector<std::vector<double>> values;
  ordered_json summary;
  for (std::size_t ci = 0; ci < 3; ++ci) {
    const std::string cname = change_name(kChanges[ci]);
    std::vector<double> ov_, pv, rv;
    for (std::size_t rep = 0; rep < cx.replicates; ++rep) {
      const ArlRow& r = rows[rep * 3 + ci];
      ov_.push_back(r.oracle);
      if (with_parametric) pv.push_back(r.parametric);
      rv.push_back(r.rn);
    }
    groups.push_back("oracle " + cname);
    values.push_back(ov_);
    if (with_parametric) {
      groups.push_back("param " + cname);
      values.push_back(pv);
    }
    groups.push_back("rn " + cname);
    values.push_back(rv);
    summary[cname]["oracle"] = box_stats(std::move(ov_));
    if (with_parametric) summary[cname]["parametric"] = box_stats(std::move(pv));
    summary[cname]["rn"] = box_stats(std::move(rv));
  }
  emit_boxplot(cx, cx.prefix + "_" + fname + ".svg",
               fname + ": out-of-control average run length", groups, values);
  emit_json(cx, cx.prefix + "_summary.json", summary);
}

void run_fig7(FigureContext& cx) {
  auto& ov = cx.overrides;
  const std::size_t m = take_size(ov, "m", 500);
  const std::size_t n = take_size(ov, "n", 500);
  const std::size_t test_n = take_size(ov, "test", 5000);
  const std::size_t k = take_size(ov, "k", 50);
  finish_overrides(ov);
  cx.man->params["m"] = io::fmt(m);
  cx.man->params["n"] = io::fmt(n);
  cx.man->params["test"] = io::fmt(test_n);
  cx.man->params["k"] = io::fmt(k);
  cx.man->notes["center"] =
      "refined engines center at the coordinatewise median of their "
      "training sample";
  cx.man->notes["ties"] =
      "DD ties and masked empirical-depth points classify by a seeded "
      "fair coin";
  cx.man->notes["whiskers"] =
      "boxes span quartiles, whiskers 1.5 IQR, dots beyond";

  const std::vector<Family> families{Family::normal2d, Family::elliptical2d};
  ordered_json summary;
  for (std::size_t fi = 0; fi < families.size(); ++fi) {
    const Family family = families[fi];
    const std::string fname = family_name(family);
    *cx.stage = "classification study: " + fname;
    std::vector<DdRow> rows = dd_study(family, m, n, test_n, k,
                                       cx.replicates, mix_seed(cx.seed, fi));

    io::Table t;
    t.header = {"rep",           "setting",         "masked_error_rn",
                "masked_error_dn", "masked_fraction", "masked_count",
                "training_error_rn"};
    for (const DdRow& r : rows) {
      t.add_row({io::fmt(r.rep), change_name(r.setting),
                 io::fmt(r.masked_error_rn), io::fmt(r.masked_error_dn),
                 io::fmt(r.masked_fraction), io::fmt(r.masked_count),
                 io::fmt(r.training_error_rn)});
    }
    emit_csv(cx, cx.prefix + "_" + fname + ".csv", t);

    std::vector<std::string> groups;
    std::vector<std::vector<double>> values;
    ordered_json fam_summary;
    for (std::size_t si = 0; si < 3; ++si) {
      const std::string sname = change_name(kChanges[si]);
      std::vector<double> rn_err, dn_err, frac;
      for (std::size_t rep = 0; rep < cx.replicates; ++rep) {
        const DdRow& r = rows[rep * 3 + si];
        rn_err.push_back(r.masked_error_rn);
        dn_err.push_back(r.masked_error_dn);
        frac.push_back(r.masked_fraction);
      }
      groups.push_back(sname + " rn");
      values.push_back(rn_err);
      groups.push_back(sname + " dn");
      values.push_back(dn_err);
      fam_summary[sname]["masked_error_rn"] = box_stats(std::move(rn_err));
      fam_summary[sname]["masked_error_dn"] = box_stats(std::move(dn_err));
      fam_summary[sname]["masked_fraction"] = box_stats(std::move(frac));
    }
    emit_boxplot(cx, cx.prefix + "_" + fname + ".svg",
                 fname + ": error on points outside both hulls", groups,
                 values);
    summary[fname] = std::move(fam_summary);
  }
  *cx.stage = "writing summary";
  emit_json(cx, cx.prefix + "_summary.json", summary);
}

}  // namespace

io::RunManifest run_figure(const FigureSpec& spec, const std::string& out_dir,
                           std::uint64_t seed) {
  if (!(spec.scale > 0.0 && spec.scale <= 1.0)) {
    throw config_error("figure scale must lie in (0, 1]");
  }
  const auto replicates =
      static_cast<std::size_t>(std::llround(100.0 * spec.scale));
  if (replicates < 5) {
    throw config_error("figure scale too small: fewer than 5 replicates");
  }
  io::ensure_dir(out_dir);

  const std::string name = figure_name(spec.id);
  const std::string prefix = name.substr(0, 4);
  io::RunManifest man;
  man.command = "repro " + name;
  man.seed = seed;
  man.replicates = spec.id == FigureId::fig1_contour ? 1 : replicates;
  man.params["scale"] = io::fmt(spec.scale);

  std::string stage = "setup";
  const auto t0 = std::chrono::steady_clock::now();
  const std::string manifest_path = out_dir + "/" + prefix + "_manifest.json";
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  try {
    FigureContext cx;
    cx.out_dir = out_dir;
    cx.prefix = prefix;
    cx.seed = seed;
    cx.replicates = man.replicates;
    cx.overrides = spec.overrides;
    cx.man = &man;
    cx.stage = &stage;
    switch (spec.id) {
      case FigureId::fig1_contour:
        run_fig1(cx);
        break;
      case FigureId::fig2_univariate:
        run_ratio_figure(cx, {Family::normal1d, Family::cauchy1d,
                              Family::t2_1d, Family::burr1d});
        break;
      case FigureId::fig3_multivariate:
        run_ratio_figure(cx, {Family::normal2d, Family::sphcauchy2d,
                              Family::elliptical2d, Family::clover2d,
                              Family::sphcauchy3d, Family::sphcauchy4d});
        break;
      case FigureId::fig4_far:
        run_fig4(cx);
        break;
      case FigureId::fig5_arl_normal:
        run_arl_figure(cx, Family::normal2d, true);
        break;
      case FigureId::fig6_arl_elliptical:
        run_arl_figure(cx, Family::elliptical2d, false);
        break;
      case FigureId::fig7_ddclass:
        run_fig7(cx);
        break;
    }
    man.duration_seconds = elapsed();
    io::write_manifest(man, manifest_path);
    return man;
  } catch (...) {
    man.failed = true;
    man.failed_stage = stage;
    man.duration_seconds = elapsed();
    try {
      io::write_manifest(man, manifest_path);
    } catch (...) {
      // The original error matters more than a failing manifest write.
    }
    throw;
  }
}

}  // namespace depthkit::repro

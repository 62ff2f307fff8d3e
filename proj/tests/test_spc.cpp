#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "depthkit/dist.hpp"
#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"
#include "depthkit/repro.hpp"
#include "depthkit/spc.hpp"
#include "depthkit/types.hpp"
#include "doctest.h"

using namespace depthkit;

namespace {

Sample make_2d(std::vector<double> rows) {
  Sample s;
  s.d = 2;
  s.n = rows.size() / 2;
  s.data = std::move(rows);
  return s;
}

spc::ChartModel crafted_rank_chart(double alpha, double depth_value) {
  spc::ChartModel chart;
  chart.kind = spc::ChartKind::depth_rank;
  chart.alpha = alpha;
  chart.d = 2;
  chart.n_ref = 100;
  for (int i = 1; i <= 100; ++i) {
    chart.reference_depths.push_back(0.01 * i);  // already sorted
  }
  chart.depth_fn = [depth_value](std::span<const double>) {
    return depth_value;
  };
  return chart;
}

}  // namespace

TEST_CASE("parametric chart threshold against an independent value") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample s = dist::sample(spec, 500, 2);
  auto chart = spc::fit_parametric_chart(s, 0.0027);
  CHECK(chart.kind == spc::ChartKind::parametric);
  CHECK(chart.n_ref == 500);
  // 2 * 501 * 499 / (500 * 498) times the upper F quantile.
  CHECK(chart.threshold ==
        doctest::Approx(12.018640015973999).epsilon(1e-6));
}

TEST_CASE("one-dimensional chart threshold reduces to the squared t bound") {
  DistSpec spec{Family::normal1d, {}, 1.0};
  Sample s = dist::sample(spec, 500, 3);
  auto chart = spc::fit_parametric_chart(s, 0.0027);
  CHECK(chart.threshold ==
        doctest::Approx(9.108866151469583).epsilon(1e-6));
}

TEST_CASE("t squared of a hand covariance") {
  Sample s = make_2d({0, 0, 2, 0, 0, 2, 2, 2});
  auto chart = spc::fit_parametric_chart(s, 0.01);
  CHECK(chart.mean[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(chart.mean[1] == doctest::Approx(1.0).epsilon(1e-15));
  // Sample covariance is (4/3) I, so t^2((3,1)) = 4 * 3/4 = 3.
  const double y[2] = {3.0, 1.0};
  CHECK(spc::t_squared(chart, y) == doctest::Approx(3.0).epsilon(1e-12));
  const double at_mean[2] = {1.0, 1.0};
  CHECK(spc::t_squared(chart, at_mean) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_FALSE(spc::signal(chart, at_mean));
}

TEST_CASE("t squared is affine invariant") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample s = dist::sample(spec, 300, 404);
  Sample q = dist::sample(spec, 25, 405);
  auto map = [](double x, double y, double* ox, double* oy) {
    *ox = 2.0 * x + 0.3 * y + 4.0;
    *oy = -0.5 * x + 1.2 * y - 7.0;
  };
  Sample st = s;
  for (std::size_t i = 0; i < s.n; ++i) {
    map(s.data[2 * i], s.data[2 * i + 1], &st.data[2 * i], &st.data[2 * i + 1]);
  }
  auto c0 = spc::fit_parametric_chart(s, 0.01);
  auto c1 = spc::fit_parametric_chart(st, 0.01);
  for (std::size_t i = 0; i < q.n; ++i) {
    double qx, qy;
    map(q.data[2 * i], q.data[2 * i + 1], &qx, &qy);
    const double orig[2] = {q.data[2 * i], q.data[2 * i + 1]};
    const double moved[2] = {qx, qy};
    CHECK(spc::t_squared(c1, moved) ==
          doctest::Approx(spc::t_squared(c0, orig)).epsilon(1e-9));
  }
}

TEST_CASE("parametric chart recovers an identity covariance") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample s = dist::sample(spec, 100000, 71);
  auto chart = spc::fit_parametric_chart(s, 0.01);
  CHECK(std::abs(chart.cov_inv[0] - 1.0) < 0.03);
  CHECK(std::abs(chart.cov_inv[3] - 1.0) < 0.03);
  CHECK(std::abs(chart.cov_inv[1]) < 0.02);
  CHECK(std::abs(chart.mean[0]) < 0.02);
}

TEST_CASE("singular covariance is rejected") {
  Sample s = make_2d({0, 0, 1, 1, 2, 2, 3, 3});  // rank one
  CHECK_THROWS_AS(spc::fit_parametric_chart(s, 0.01), numeric_error);
}

TEST_CASE("depth chart stores sorted reference depths") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  auto ref = std::make_shared<const Sample>(dist::sample(spec, 60, 88));
  auto fn = repro::dn_engine(ref);
  auto chart = spc::fit_depth_chart(*ref, 0.05, "dn", fn);
  CHECK(chart.engine == "dn");
  REQUIRE(chart.reference_depths.size() == 60);
  CHECK(std::is_sorted(chart.reference_depths.begin(),
                       chart.reference_depths.end()));
  // The sorted multiset is exactly the per-row depths.
  std::vector<double> direct;
  for (std::size_t i = 0; i < ref->n; ++i) direct.push_back(fn(ref->row(i)));
  std::sort(direct.begin(), direct.end());
  CHECK(chart.reference_depths == direct);
}

TEST_CASE("rank signals require a strict sub-alpha fraction") {
  auto chart = crafted_rank_chart(0.01, 0.0);
  const double y[2] = {0.0, 0.0};
  // Depth 0.005: nothing strictly below, rank 0 < alpha: signal.
  CHECK(spc::signal(chart, y, 0.005));
  // Depth tied with the smallest reference still ranks 0.
  CHECK(spc::signal(chart, y, 0.01));
  // Depth 0.015: rank 1/100 equals alpha, no signal.
  CHECK_FALSE(spc::signal(chart, y, 0.015));
  CHECK_FALSE(spc::signal(chart, y, 0.73));
  CHECK_THROWS_AS(spc::signal(chart, y), config_error);
}

TEST_CASE("false alarm rate accepts precomputed depths") {
  auto chart = crafted_rank_chart(0.05, 0.5);
  Sample stream = make_2d({0, 0, 1, 1, 2, 2, 3, 3});
  const std::vector<double> depths{0.001, 0.9, 0.02, 0.5};
  // Ranks: 0, 89/100, 1/100, 49/100 -> two signals below 0.05.
  CHECK(spc::false_alarm_rate(chart, stream, depths) == 0.5);
  // Without depths the chart's own engine values every point at 0.5.
  CHECK(spc::false_alarm_rate(chart, stream) == 0.0);
}

TEST_CASE("self application of depth charts stays near alpha") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  auto ref = std::make_shared<const Sample>(dist::sample(spec, 400, 3131));

  repro::RnEngineSpec es;
  es.k = 40;
  es.dir_seed = 5;
  auto rn = repro::make_rn_engine(ref, es);
  auto oracle = repro::oracle_engine(spec);

  for (const auto& fn : {rn.fn, oracle}) {
    auto chart = spc::fit_depth_chart(*ref, 0.01, "engine", fn);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ref->n; ++i) {
      if (spc::signal(chart, ref->row(i), fn(ref->row(i)))) ++hits;
    }
    // At most alpha + 1/n of the reference can sit under its own band.
    CHECK(static_cast<double>(hits) / 400.0 <= 0.01 + 1.0 / 400.0);
  }
}

TEST_CASE("oracle-depth chart false alarms stay near alpha") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  const double alpha = 0.0027;
  auto oracle = repro::oracle_engine(spec);
  double total = 0.0;
  const std::size_t reps = 20;
  for (std::size_t r = 0; r < reps; ++r) {
    Sample ref = dist::sample(spec, 500, 9000 + r);
    auto chart = spc::fit_depth_chart(ref, alpha, "oracle", oracle);
    Sample stream = dist::sample(spec, 4000, 50000 + r);
    total += spc::false_alarm_rate(chart, stream);
  }
  const double far = total / static_cast<double>(reps);
  CHECK(far >= alpha / 2.0);
  CHECK(far <= 2.0 * alpha);
}

TEST_CASE("run lengths of forced charts") {
  DistSpec spec{Family::normal2d, {}, 1.0};

  auto always = crafted_rank_chart(0.05, 0.0);  // every depth ranks at zero
  auto res = spc::average_run_length(always, spec, 8, 100, 4);
  CHECK(res.arl == 1.0);
  for (std::size_t rl : res.run_lengths) CHECK(rl == 1);
  for (bool c : res.capped) CHECK_FALSE(c);

  auto never = crafted_rank_chart(0.05, 5.0);  // depth above every reference
  auto res2 = spc::average_run_length(never, spec, 4, 57, 4);
  CHECK(res2.arl == 57.0);
  for (bool c : res2.capped) CHECK(c);
}

TEST_CASE("run length draws are deterministic in the seed") {
  DistSpec shifted{Family::normal2d, {2.0, 2.0}, 1.0};
  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample ref = dist::sample(spec, 200, 654);
  auto chart = spc::fit_parametric_chart(ref, 0.01);
  auto a = spc::average_run_length(chart, shifted, 10, 2000, 77);
  auto b = spc::average_run_length(chart, shifted, 10, 2000, 77);
  auto c = spc::average_run_length(chart, shifted, 10, 2000, 78);
  CHECK(a.run_lengths == b.run_lengths);
  CHECK(a.arl == b.arl);
  CHECK(a.run_lengths != c.run_lengths);
  CHECK(a.arl >= 1.0);
}

TEST_CASE("chart fitting rejects bad inputs") {
  DistSpec spec{Family::normal2d, {}, 1.0};
  Sample s = dist::sample(spec, 50, 1);
  CHECK_THROWS_AS(spc::fit_parametric_chart(s, 0.0), config_error);
  CHECK_THROWS_AS(spc::fit_parametric_chart(s, 1.0), config_error);
  CHECK_THROWS_AS(spc::fit_depth_chart(s, 0.01, "x", nullptr), config_error);
  Sample tiny = make_2d({1, 2});
  CHECK_THROWS_AS(spc::fit_parametric_chart(tiny, 0.01), config_error);
}

#include <cmath>
#include <numbers>
#include <vector>

#include "depthkit/errors.hpp"
#include "depthkit/numeric.hpp"
#include "doctest.h"

using namespace depthkit;

TEST_CASE("normal cdf matches tabulated values") {
  CHECK(num::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(num::normal_cdf(-3.0) ==
        doctest::Approx(0.0013498980316300933).epsilon(1e-12));
  CHECK(num::normal_cdf(1.7) ==
        doctest::Approx(0.955434537241457).epsilon(1e-12));
  CHECK(num::normal_cdf(-2.5) ==
        doctest::Approx(0.006209665325776132).epsilon(1e-12));
}

TEST_CASE("normal cdf symmetry") {
  for (double x : {0.1, 0.9, 1.7, 2.6, 4.0}) {
    CHECK(num::normal_cdf(x) + num::normal_cdf(-x) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK(num::normal_quantile(0.0027) ==
        doctest::Approx(-2.782150453784607).epsilon(1e-7));
  CHECK(num::normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-7));
  for (double p : {1e-5, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    CHECK(num::normal_cdf(num::normal_quantile(p)) ==
          doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_THROWS_AS(num::normal_quantile(0.0), config_error);
  CHECK_THROWS_AS(num::normal_quantile(1.0), config_error);
}

TEST_CASE("regularized incomplete beta") {
  CHECK(num::reg_inc_beta(2.5, 3.5, 0.0) == 0.0);
  CHECK(num::reg_inc_beta(2.5, 3.5, 1.0) == 1.0);
  CHECK(num::reg_inc_beta(2.5, 3.5, 0.3) ==
        doctest::Approx(0.29675298929566646).epsilon(1e-10));
  CHECK(num::reg_inc_beta(0.5, 0.5, 0.5) ==
        doctest::Approx(0.5).epsilon(1e-12));
  for (double x : {0.05, 0.4, 0.9}) {
    CHECK(num::reg_inc_beta(1.5, 4.0, x) + num::reg_inc_beta(4.0, 1.5, 1 - x) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(num::reg_inc_beta(0.0, 1.0, 0.5), config_error);
}

TEST_CASE("upper f quantile against independent values") {
  // Reference values from an independent implementation.
  CHECK(num::f_quantile_upper(2, 498, 0.0027) ==
        doctest::Approx(5.985306669181728).epsilon(1e-6));
  CHECK(num::f_quantile_upper(1, 499, 0.0027) ==
        doctest::Approx(9.090684781905772).epsilon(1e-6));
  CHECK(num::f_quantile_upper(3, 40, 0.05) ==
        doctest::Approx(2.8387453980206443).epsilon(1e-6));
  CHECK(num::f_quantile_upper(10, 5, 0.01) ==
        doctest::Approx(10.05101721957127).epsilon(1e-6));
}

TEST_CASE("upper f quantile closed form for two numerator dof") {
  // F_{2,m} upper-alpha quantile is (m/2)(alpha^{-2/m} - 1).
  for (double m : {10.0, 100.0, 498.0}) {
    for (double alpha : {0.2, 0.01, 0.0027}) {
      const double closed = (m / 2.0) * (std::pow(alpha, -2.0 / m) - 1.0);
      CHECK(num::f_quantile_upper(2, m, alpha) ==
            doctest::Approx(closed).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(num::f_quantile_upper(2, 10, 0.0), config_error);
  CHECK_THROWS_AS(num::f_quantile_upper(0, 10, 0.1), config_error);
}

TEST_CASE("adaptive simpson on smooth integrands") {
  const double cubic = num::adaptive_simpson(
      [](double x) { return x * x * x; }, 0.0, 1.0, 1e-12);
  CHECK(cubic == doctest::Approx(0.25).epsilon(1e-10));

  const double sine = num::adaptive_simpson(
      [](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-10);
  CHECK(sine == doctest::Approx(2.0).epsilon(1e-9));

  const double lorentz = num::adaptive_simpson(
      [](double x) { return 1.0 / (1.0 + x * x); }, -40.0, 40.0, 1e-10);
  CHECK(lorentz == doctest::Approx(2.0 * std::atan(40.0)).epsilon(1e-8));

  CHECK(num::adaptive_simpson([](double) { return 7.0; }, 3.0, 3.0, 1e-10) ==
        0.0);
}

TEST_CASE("median and quantile conventions") {
  CHECK(num::median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(num::median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK_THROWS_AS(num::median({}), config_error);

  std::vector<double> v{40.0, 10.0, 30.0, 20.0};
  CHECK(num::quantile(v, 0.0) == 10.0);
  CHECK(num::quantile(v, 1.0) == 40.0);
  CHECK(num::quantile(v, 0.5) == 25.0);  // linear interpolation
  CHECK_THROWS_AS(num::quantile(v, 1.5), config_error);
}

TEST_CASE("mean and sample standard deviation") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(num::mean(v) == 2.5);
  CHECK(num::stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  std::vector<double> single{7.0};
  CHECK_THROWS_AS(num::stddev(single), config_error);
}

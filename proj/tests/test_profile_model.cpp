#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "epcc/profile_model.hpp"

using namespace epcc;

namespace {

FixedDesign make_design(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.begin()->size());
  Eigen::MatrixXd x(n, d);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) x(i, j++) = v;
    ++i;
  }
  return FixedDesign{std::move(x)};
}

}  // namespace

TEST_CASE("evaluate linear at the origin returns the intercept") {
  Eigen::VectorXd a(3);
  a << 3, 2, 1;
  const auto fn = ProfileFunction::linear(a, 1.0);
  const auto design = make_design({{0, 0, 0}, {1, 1, 1}});
  const Eigen::VectorXd y = evaluate(fn, design);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == 7.0);
}

TEST_CASE("evaluate the benchmark quadratic at (1,1,1)") {
  Eigen::VectorXd a(3);
  a << 3, 2, 1;
  const auto fn =
      ProfileFunction::quadratic((4.0 / 9.0) * (a * a.transpose()), Eigen::VectorXd::Zero(3));
  const auto design = make_design({{1, 1, 1}, {0, 0, 0}});
  const Eigen::VectorXd y = evaluate(fn, design);
  CHECK(y[0] == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(y[1] == 0.0);
}

TEST_CASE("forcing functions") {
  const auto design = make_design({{0.25, 0.5, 0.9}, {0.25, 0.5, 0.1}});
  const Eigen::VectorXd s = evaluate(ProfileFunction::forcing_sin(2.0, 3), design);
  CHECK(s[0] == doctest::Approx(2.0 * std::sin(2.0 * std::numbers::pi * 0.125)).epsilon(1e-15));

  const Eigen::VectorXd r = evaluate(ProfileFunction::forcing_ridge(1.0, 3), design);
  CHECK(r[0] == doctest::Approx(25.0 * 0.25 * std::exp(-0.5)).epsilon(1e-15));
  CHECK(r[1] == 0.0);  // indicator off when x3 <= 0.5

  CHECK_THROWS_AS(ProfileFunction::forcing_ridge(1.0, 2), DimensionError);
}

TEST_CASE("mixture of identical functions is the function itself") {
  Eigen::VectorXd a(2);
  a << 1, -2;
  const auto f = ProfileFunction::linear(a, 0.5);
  const auto mix = ProfileFunction::mixture(0.5, f, f);
  Eigen::VectorXd x(2);
  x << 0.3, 0.7;
  CHECK(mix(x) == doctest::Approx(f(x)).epsilon(1e-15));
}

TEST_CASE("mixture linearity holds for nu outside [0,1]") {
  Rng rng(7);
  Eigen::VectorXd a(3), b(3);
  for (int i = 0; i < 3; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  const auto f = ProfileFunction::linear(a, 1.0);
  const auto g = ProfileFunction::forcing_sin(1.0, 3);
  for (double nu : {-1.5, -0.2, 0.0, 0.4, 1.0, 2.3}) {
    const auto h = ProfileFunction::mixture(nu, f, g);
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd x(3);
      for (int i = 0; i < 3; ++i) x[i] = rng.uniform();
      CHECK(h(x) == doctest::Approx(nu * f(x) + (1.0 - nu) * g(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mixture dimension consistency is enforced") {
  const auto f3 = ProfileFunction::forcing_sin(1.0, 3);
  const auto f2 = ProfileFunction::forcing_sin(1.0, 2);
  CHECK_THROWS_AS(ProfileFunction::mixture(0.5, f3, f2), DimensionError);
}

TEST_CASE("evaluate rejects dimension mismatch") {
  Eigen::VectorXd a(3);
  a << 1, 1, 1;
  const auto fn = ProfileFunction::linear(a, 0.0);
  const auto design = make_design({{0.1, 0.2}, {0.3, 0.4}});
  CHECK_THROWS_AS(evaluate(fn, design), DimensionError);
}

TEST_CASE("generate_profile is deterministic given the seed") {
  Eigen::VectorXd a(3);
  a << 3, 2, 1;
  const auto fn = ProfileFunction::linear(a, 1.0);
  Rng design_rng(11);
  const auto design = FixedDesign::random(16, 3, design_rng);

  Rng r1(42), r2(42);
  const auto y1 = generate_profile(fn, design, 0.5, r1, 5);
  const auto y2 = generate_profile(fn, design, 0.5, r2, 5);
  CHECK(y1.t == 5);
  CHECK((y1.y - y2.y).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(generate_profile(fn, design, 0.0, r1), DimensionError);
  CHECK_THROWS_AS(generate_profile(fn, design, -1.0, r1), DimensionError);
}

TEST_CASE("tiny sigma approaches the noiseless evaluation") {
  Eigen::VectorXd a(2);
  a << 2, -1;
  const auto fn = ProfileFunction::linear(a, 0.0);
  Rng design_rng(12);
  const auto design = FixedDesign::random(8, 2, design_rng);
  Rng rng(13);
  const auto y = generate_profile(fn, design, 1e-12, rng);
  CHECK((y.y - evaluate(fn, design)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("noise moments match sigma over many draws") {
  Eigen::VectorXd a(3);
  a << 3, 2, 1;
  const auto fn = ProfileFunction::linear(a, 1.0);
  Rng design_rng(14);
  const auto design = FixedDesign::random(10, 3, design_rng);
  const Eigen::VectorXd mean = evaluate(fn, design);

  const double sigma = 0.7;
  const long draws = 100000;
  Rng rng(15);
  double sum = 0.0, sum_sq = 0.0;
  const long count = draws * design.n();
  for (long k = 0; k < draws; ++k) {
    const auto y = generate_profile(fn, design, sigma, rng);
    const Eigen::VectorXd eps = y.y - mean;
    sum += eps.sum();
    sum_sq += eps.squaredNorm();
  }
  const double mean_hat = sum / static_cast<double>(count);
  const double var_hat = sum_sq / static_cast<double>(count) - mean_hat * mean_hat;
  const double se_mean = sigma / std::sqrt(static_cast<double>(count));
  // SE of the variance of a normal sample: sigma^2 sqrt(2/N).
  const double se_var = sigma * sigma * std::sqrt(2.0 / static_cast<double>(count));
  CHECK(std::abs(mean_hat) <= 4.0 * se_mean);
  CHECK(std::abs(var_hat - sigma * sigma) <= 4.0 * se_var);
}

TEST_CASE("design validation") {
  Rng rng(16);
  auto design = FixedDesign::random(4, 2, rng);
  design.validate();
  design.points(0, 0) = 1.5;
  CHECK_THROWS_AS(design.validate(), DimensionError);
  CHECK_THROWS_AS(FixedDesign::random(1, 2, rng), DimensionError);
}

TEST_CASE("table2 catalog") {
  const auto rows = table2_catalog();
  REQUIRE(rows.size() == 4);

  Eigen::VectorXd x(3);
  x << 0.25, 0.5, 0.75;

  // Pair 1: linear f with intercept 1, plain sin forcing.
  CHECK(rows[0].first(x) == doctest::Approx(1.0 + 0.75 + 1.0 + 0.75).epsilon(1e-15));
  CHECK(rows[0].second(x) ==
        doctest::Approx(std::sin(2.0 * std::numbers::pi * 0.125)).epsilon(1e-15));

  // Pair 2: quadratic f, sin forcing scaled by 5.
  CHECK(rows[1].first(x) == doctest::Approx((4.0 / 9.0) * 2.5 * 2.5).epsilon(1e-15));
  CHECK(rows[1].second(x) ==
        doctest::Approx(5.0 * std::sin(2.0 * std::numbers::pi * 0.125)).epsilon(1e-15));

  // Pairs 3 and 4 use the ridge forcing.
  CHECK(rows[2].second(x) == doctest::Approx(25.0 * 0.25 * std::exp(-0.5)).epsilon(1e-15));
  CHECK(rows[3].second(x) == rows[2].second(x));
  for (const auto& [f, g] : rows) {
    CHECK(f.dimension() == 3);
    CHECK(g.dimension() == 3);
  }
}

TEST_CASE("scaling distributes through every variant") {
  Rng rng(17);
  Eigen::VectorXd a(3);
  a << 1, 2, 3;
  const auto f = ProfileFunction::linear(a, 2.0);
  const auto g = ProfileFunction::forcing_ridge(1.0, 3);
  const auto mix = ProfileFunction::mixture(0.3, f, g);
  const auto scaled = mix.scaled(-2.5);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x[i] = rng.uniform();
    CHECK(scaled(x) == doctest::Approx(-2.5 * mix(x)).epsilon(1e-12));
  }
}

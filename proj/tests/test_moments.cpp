#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "epcc/moments.hpp"
#include "epcc/rng.hpp"
#include "oracles.hpp"

using namespace epcc;

namespace {

Eigen::MatrixXd random_matrix(int d, Rng& rng) {
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Eigen::VectorXd random_vector(int d, Rng& rng) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("cov_linear") {
  Eigen::VectorXd a(2), b(2);
  a << 1, 0;
  b << 0, 1;
  CHECK(cov_linear(a, b) == 0.0);

  Eigen::VectorXd c(3);
  c << 3, 2, 1;
  CHECK(cov_linear(c, c) == doctest::Approx(7.0 / 6.0).epsilon(1e-15));

  Eigen::VectorXd one(1);
  one << 1;
  CHECK(cov_linear(one, one) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  Eigen::VectorXd wrong(2);
  CHECK_THROWS_AS(cov_linear(c, wrong), DimensionError);
}

TEST_CASE("cov_linear agrees with Monte Carlo") {
  Eigen::VectorXd a(3);
  a << 3, 2, 1;
  Rng rng(101);
  const auto f = [&a](const Eigen::VectorXd& x) { return a.dot(x); };
  const auto mc = oracles::mc_cov(f, f, 3, 2000000, rng);
  CHECK(std::abs(cov_linear(a, a) - mc.value) <= 4.0 * mc.se);
}

TEST_CASE("mean_quadratic") {
  CHECK(mean_quadratic(Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(mean_quadratic(Eigen::MatrixXd::Zero(3, 3)) == 0.0);

  Rng rng(102);
  const Eigen::MatrixXd a = random_matrix(4, rng);
  const auto f = [&a](const Eigen::VectorXd& x) { return x.dot(a * x); };
  const auto mc = oracles::mc_cov(f, [](const Eigen::VectorXd&) { return 1.0; }, 4, 100, rng);
  // Covariance against a constant is zero; use quadrature for the mean.
  (void)mc;
  CHECK(mean_quadratic(a) == doctest::Approx(oracles::gauss_legendre_mean(f, 4)).epsilon(1e-13));
  CHECK_THROWS_AS(mean_quadratic(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
}

TEST_CASE("cov_quadratic_linear") {
  Eigen::MatrixXd a1(1, 1);
  a1 << 1;
  Eigen::VectorXd b1(1);
  b1 << 1;
  CHECK(cov_quadratic_linear(a1, b1) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));

  // Antisymmetric quadratic part carries no information.
  Eigen::MatrixXd anti(3, 3);
  anti << 0, 2, -1, -2, 0, 4, 1, -4, 0;
  Eigen::VectorXd b3(3);
  b3 << 1, 2, 3;
  CHECK(cov_quadratic_linear(anti, b3) == 0.0);

  Rng rng(103);
  const Eigen::MatrixXd a = random_matrix(3, rng);
  const Eigen::VectorXd b = random_vector(3, rng);
  const auto fq = [&a](const Eigen::VectorXd& x) { return x.dot(a * x); };
  const auto fl = [&b](const Eigen::VectorXd& x) { return b.dot(x); };
  const auto mc = oracles::mc_cov(fq, fl, 3, 2000000, rng);
  CHECK(std::abs(cov_quadratic_linear(a, b) - mc.value) <= 4.0 * mc.se);
  CHECK(cov_quadratic_linear(a, b) == doctest::Approx(oracles::quadrature_cov(fq, fl, 3)).epsilon(1e-12));
}

TEST_CASE("fourth moment coefficients take the five multiplicity values") {
  CHECK(fourth_moment_coefficient(0, 1, 2, 3) == doctest::Approx(1.0 / 16.0));
  CHECK(fourth_moment_coefficient(0, 0, 1, 2) == doctest::Approx(1.0 / 12.0));
  CHECK(fourth_moment_coefficient(0, 0, 1, 1) == doctest::Approx(1.0 / 9.0));
  CHECK(fourth_moment_coefficient(0, 0, 0, 1) == doctest::Approx(1.0 / 8.0));
  CHECK(fourth_moment_coefficient(2, 2, 2, 2) == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("worked 5x5 coefficient matrices") {
  // i = 2, j = 4 in 1-based indexing.
  const Eigen::MatrixXd c_off = moment_coefficient_matrix(5, 1, 3);
  Eigen::MatrixXd expected_off(5, 5);
  const double s = 1.0 / 16.0, t = 1.0 / 12.0, n = 1.0 / 9.0, e = 1.0 / 8.0;
  expected_off << t, t, s, t, s,
                  t, e, t, n, t,
                  s, t, t, t, s,
                  t, n, t, e, t,
                  s, t, s, t, t;
  CHECK((c_off - expected_off).cwiseAbs().maxCoeff() == 0.0);

  // i = j = 2 in 1-based indexing.
  const Eigen::MatrixXd c_diag = moment_coefficient_matrix(5, 1, 1);
  Eigen::MatrixXd expected_diag(5, 5);
  const double f = 1.0 / 5.0;
  expected_diag << n, e, t, t, t,
                   e, f, e, e, e,
                   t, e, n, t, t,
                   t, e, t, n, t,
                   t, e, t, t, n;
  CHECK((c_diag - expected_diag).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cov_quadratic_quadratic") {
  Eigen::MatrixXd a1(1, 1);
  a1 << 1;
  CHECK(cov_quadratic_quadratic(a1, a1) == doctest::Approx(4.0 / 45.0).epsilon(1e-14));
  CHECK(cov_quadratic_quadratic(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3)) == 0.0);

  Rng rng(104);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd a = random_matrix(3, rng);
    const Eigen::MatrixXd b = random_matrix(3, rng);
    const double closed = cov_quadratic_quadratic(a, b);
    const double tuple = oracles::tuple_cov(a, Eigen::VectorXd::Zero(3), b, Eigen::VectorXd::Zero(3));
    CHECK(closed == doctest::Approx(tuple).epsilon(1e-12));

    const auto fa = [&a](const Eigen::VectorXd& x) { return x.dot(a * x); };
    const auto fb = [&b](const Eigen::VectorXd& x) { return x.dot(b * x); };
    CHECK(closed == doctest::Approx(oracles::quadrature_cov(fa, fb, 3)).epsilon(1e-12));
    if (rep == 0) {
      const auto mc = oracles::mc_cov(fa, fb, 3, 2000000, rng);
      CHECK(std::abs(closed - mc.value) <= 4.0 * mc.se);
    }
  }
}

TEST_CASE("quadrature oracle pins closed forms for d <= 2") {
  Rng rng(105);
  for (int d : {1, 2}) {
    for (int rep = 0; rep < 25; ++rep) {
      const Eigen::MatrixXd a = random_matrix(d, rng);
      const Eigen::MatrixXd b = random_matrix(d, rng);
      const Eigen::VectorXd va = random_vector(d, rng);
      const Eigen::VectorXd vb = random_vector(d, rng);
      const double closed = cov_quadratic_quadratic(a, b) + cov_quadratic_linear(a, vb) +
                            cov_quadratic_linear(b, va) + cov_linear(va, vb);
      const auto fa = [&](const Eigen::VectorXd& x) { return x.dot(a * x) + va.dot(x); };
      const auto fb = [&](const Eigen::VectorXd& x) { return x.dot(b * x) + vb.dot(x); };
      CHECK(closed == doctest::Approx(oracles::quadrature_cov(fa, fb, d)).epsilon(1e-8));
    }
  }
}

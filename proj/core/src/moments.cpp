#include "epcc/moments.hpp"

namespace epcc {

namespace {

// E[X^c] for X ~ Unif(0,1), c in {1,...,4}.
constexpr double kPowerMoment[5] = {1.0, 1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0};

}  // namespace

double cov_linear(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("cov_linear: length mismatch");
  return a.dot(b) / 12.0;
}

double mean_quadratic(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DimensionError("mean_quadratic: matrix must be square");
  return a.trace() / 12.0 + a.sum() / 4.0;
}

double cov_quadratic_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols()) throw DimensionError("cov_quadratic_linear: matrix must be square");
  if (a.rows() != b.size()) throw DimensionError("cov_quadratic_linear: dimensions disagree");
  return ((a + a.transpose()) * b).sum() / 24.0;
}

double fourth_moment_coefficient(int i, int j, int k, int l) {
  const int idx[4] = {i, j, k, l};
  double coeff = 1.0;
  for (int p = 0; p < 4; ++p) {
    bool seen = false;
    for (int q = 0; q < p; ++q) {
      if (idx[q] == idx[p]) {
        seen = true;
        break;
      }
    }
    if (seen) continue;
    int count = 0;
    for (int q = 0; q < 4; ++q) {
      if (idx[q] == idx[p]) ++count;
    }
    coeff *= kPowerMoment[count];
  }
  return coeff;
}

Eigen::MatrixXd moment_coefficient_matrix(int d, int i, int j) {
  if (i < 0 || j < 0 || i >= d || j >= d) {
    throw DimensionError("moment_coefficient_matrix: index out of range");
  }
  Eigen::MatrixXd c(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) c(k, l) = fourth_moment_coefficient(i, j, k, l);
  }
  return c;
}

double cov_quadratic_quadratic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("cov_quadratic_quadratic: matrices must be square of equal size");
  }
  const int d = static_cast<int>(a.rows());
  double fourth = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double inner = 0.0;
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) inner += b(k, l) * fourth_moment_coefficient(i, j, k, l);
      }
      fourth += a(i, j) * inner;
    }
  }
  return fourth - mean_quadratic(a) * mean_quadratic(b);
}

}  // namespace epcc

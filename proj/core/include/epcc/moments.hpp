#pragma once

#include <Eigen/Dense>

#include "epcc/errors.hpp"

namespace epcc {

// Exact moments of linear and quadratic forms of x ~ Unif([0,1]^d) with
// independent components. Power moments of Unif(0,1): E X = 1/2,
// E X^2 = 1/3, E X^3 = 1/4, E X^4 = 1/5.

/// Cov(a^T x, b^T x) = a . b / 12.
double cov_linear(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// E[x^T A x] = tr(A)/12 + 1^T A 1 / 4.
double mean_quadratic(const Eigen::MatrixXd& a);

/// Cov(x^T A x, b^T x) = 1^T (A + A^T) b / 24.
double cov_quadratic_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// E[X_i X_j X_k X_l]; the coefficient is the product of E[X^c] over the
/// distinct indices with multiplicities c, so it takes one of the values
/// 1/16, 1/12, 1/9, 1/8, 1/5 depending on the index pattern.
double fourth_moment_coefficient(int i, int j, int k, int l);

/// The d x d coefficient matrix C(i,j) with entries E[X_i X_j X_k X_l]
/// indexed by (k,l).
Eigen::MatrixXd moment_coefficient_matrix(int d, int i, int j);

/// Cov(x^T A x, x^T B x) via the entrywise formulation
///   sum_ij A_ij 1^T (B (.) C(i,j)) 1 - E[x^T A x] E[x^T B x].
double cov_quadratic_quadratic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace epcc

#pragma once

#include <Eigen/Dense>

#include "epcc/rng.hpp"

namespace epcc {

enum class ExitReason {
  rayleigh_exceeded,        // |q^T M q| > |v_ref^T M v_ref|: v_ref cannot lead
  converged_to_reference,   // (v_ref^T q)^2 >= 1 - zeta
  max_iter_reached,
};

const char* to_string(ExitReason reason);

struct EigenResult {
  Eigen::VectorXd q;  // unit vector
  int iterations = 0;
  ExitReason exit_reason = ExitReason::max_iter_reached;
};

/// Power iteration with early stopping: starts from a uniform random
/// point on the unit sphere, exits as soon as the Rayleigh quotient of q
/// exceeds that of v_ref or q aligns with v_ref to within zeta. The
/// iteration cap converts the unbounded loop into a terminating
/// procedure; a cap exit is treated as "not converged to reference".
EigenResult power_iteration_detector(const Eigen::MatrixXd& m, const Eigen::VectorXd& v_ref,
                                     double zeta, int max_iter, Rng& rng);

/// || s q - (1/sqrt(w)) 1 ||_2 with s = sign(1^T q) (s = +1 at exactly
/// zero). Sign alignment makes the statistic invariant to the
/// eigenvector sign ambiguity.
double perturbation_statistic(const Eigen::VectorXd& q);

/// Both roots of the xi quadratic for the two-block E[R] and their
/// eigenvalues; the leading eigenvector is proportional to
/// xi_plus * u1 + u2.
struct XiRoots {
  double xi_plus = 0.0;
  double xi_minus = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

XiRoots xi(int k1, int k2, double gamma1, double gamma2, double gamma12);

/// All-in-control eigenstructure: lambda_1 = 1 + gamma1 (w - 1), the
/// rest equal 1 - gamma1; ratio is the power-iteration convergence rate
/// lambda_2 / lambda_1.
struct StructuredEigs {
  double lambda1 = 0.0;
  double lambda_rest = 0.0;
  double ratio = 0.0;
};

StructuredEigs structured_lambdas(double gamma1, int w);

}  // namespace epcc

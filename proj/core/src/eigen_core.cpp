#include "epcc/eigen_core.hpp"

#include <cmath>

#include "epcc/errors.hpp"

namespace epcc {

const char* to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::rayleigh_exceeded:
      return "rayleigh_exceeded";
    case ExitReason::converged_to_reference:
      return "converged_to_reference";
    case ExitReason::max_iter_reached:
      return "max_iter";
  }
  return "unknown";
}

EigenResult power_iteration_detector(const Eigen::MatrixXd& m, const Eigen::VectorXd& v_ref,
                                     double zeta, int max_iter, Rng& rng) {
  const int w = static_cast<int>(m.rows());
  if (m.cols() != w) throw DimensionError("power_iteration_detector: matrix must be square");
  if (v_ref.size() != w) throw DimensionError("power_iteration_detector: v_ref length mismatch");
  if (!(zeta > 0.0)) throw DimensionError("power_iteration_detector: zeta must be positive");

  const double ref_rayleigh = std::abs(v_ref.dot(m * v_ref));

  Eigen::VectorXd q = sphere_uniform(w, rng);
  Eigen::VectorXd mq(w);
  int restarts = 0;
  for (int iter = 0;; ++iter) {
    mq.noalias() = m * q;
    if (std::abs(q.dot(mq)) > ref_rayleigh) {
      return EigenResult{std::move(q), iter, ExitReason::rayleigh_exceeded};
    }
    const double align = v_ref.dot(q);
    if (align * align >= 1.0 - zeta) {
      return EigenResult{std::move(q), iter, ExitReason::converged_to_reference};
    }
    if (iter >= max_iter) {
      return EigenResult{std::move(q), iter, ExitReason::max_iter_reached};
    }
    const double norm = mq.norm();
    if (norm == 0.0) {
      // q landed in the null space; restart from a fresh random direction.
      if (++restarts > 32) {
        throw DegenerateDataError("power_iteration_detector: repeated null-space starts");
      }
      q = sphere_uniform(w, rng);
      continue;
    }
    q = mq / norm;
  }
}

double perturbation_statistic(const Eigen::VectorXd& q) {
  const int w = static_cast<int>(q.size());
  const double sum = q.sum();
  const double sign = (sum < 0.0) ? -1.0 : 1.0;
  const double inv_sqrt_w = 1.0 / std::sqrt(static_cast<double>(w));
  double acc = 0.0;
  for (int i = 0; i < w; ++i) {
    const double diff = sign * q[i] - inv_sqrt_w;
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

XiRoots xi(int k1, int k2, double gamma1, double gamma2, double gamma12) {
  if (k1 < 1 || k2 < 1) throw DimensionError("xi: need k1 >= 1 and k2 >= 1");
  if (gamma12 == 0.0) {
    throw DimensionError("xi: gamma12 = 0 decouples the blocks; use a dense solver");
  }
  const double a = (k1 - 1) * gamma1 - (k2 - 1) * gamma2;
  const double disc = a * a + 4.0 * static_cast<double>(k1) * static_cast<double>(k2) *
                                  gamma12 * gamma12;
  const double root = std::sqrt(disc);
  XiRoots out;
  out.xi_plus = (a + root) / (2.0 * k1 * gamma12);
  out.xi_minus = (a - root) / (2.0 * k1 * gamma12);
  const double b = (k1 - 1) * gamma1 + (k2 - 1) * gamma2;
  out.lambda_plus = 1.0 + (b + root) / 2.0;
  out.lambda_minus = 1.0 + (b - root) / 2.0;
  return out;
}

StructuredEigs structured_lambdas(double gamma1, int w) {
  if (w < 2) throw DimensionError("structured_lambdas: need w >= 2");
  if (!(gamma1 > -1.0 / (w - 1) && gamma1 < 1.0)) {
    throw DimensionError("structured_lambdas: gamma1 outside the positive-semidefinite range");
  }
  StructuredEigs out;
  out.lambda1 = 1.0 + gamma1 * (w - 1);
  out.lambda_rest = 1.0 - gamma1;
  out.ratio = out.lambda_rest / out.lambda1;
  return out;
}

}  // namespace epcc

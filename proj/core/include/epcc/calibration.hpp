#pragma once

#include <optional>

#include "epcc/moments.hpp"
#include "epcc/profile_model.hpp"

namespace epcc {

/// Exact variance under Unif([0,1]^d). Only polynomials (Linear,
/// Quadratic, Mixture of such) have closed forms; forcing functions throw.
double var_function(const ProfileFunction& fn);

/// Exact covariance of two polynomial profile functions.
double cov_function(const ProfileFunction& f, const ProfileFunction& g);

/// Whether h is a convex combination of f and g (nu in (0,1)) or not
/// (nu > 1, and nu <= 0 for nonpositive target correlations).
enum class Convexity { convex, nonconvex };

struct CalibrationTarget {
  double var_f = 1.0;   // Var(f)
  double snr = 1.0;     // Var(delta)/sigma^2 with sigma^2 = 1
  double rho_fh = 0.9;  // target correlation of f and h, in [-1, 1]
  Convexity convexity = Convexity::convex;
};

struct CalibratedPair {
  ProfileFunction f;   // C_f * f0
  ProfileFunction h;   // nu * f + (1 - nu) * C_h * h0
  ProfileFunction f0;  // unit variance
  ProfileFunction h0;  // unit variance, Cov(f0, h0) = 0
  double nu = 0.0;
  double c_f = 0.0;
  double c_h = 0.0;
};

/// The identity rho(f,h) = nu / sqrt(2 nu - 1 + Var(delta)/Var(f)).
double rho_of_nu(double nu, double var_delta, double var_f);

/// Both roots of the nu(rho) quadratic
///   nu = rho^2 +- sqrt(rho^4 + rho^2 (Var(delta)/Var(f) - 1)),
/// or nullopt when the discriminant is negative (the target correlation
/// lies below the minimum achievable sqrt(1 - Var(delta)/Var(f))).
std::optional<std::pair<double, double>> nu_roots(double rho, double var_delta, double var_f);

/// One modified Gram-Schmidt step: returns h0 proportional to
/// h0_star - Cov(f0, h0_star) f0, rescaled to unit variance. Inputs must
/// be zero-intercept unit-variance polynomials of the same dimension.
ProfileFunction orthogonalize(const ProfileFunction& f0, const ProfileFunction& h0_star);

/// Random zero-intercept polynomial of the given degree (1 or 2),
/// rescaled to unit variance.
ProfileFunction random_unit_polynomial(int d, int degree, Rng& rng);

/// Solves for (nu, C_f, C_h) given the target and an orthonormal pair
/// (f0, h0). Picks the nu root matching the sign of rho_fh and the
/// requested convexity; throws InfeasibleCalibrationError when no root
/// qualifies, when two roots qualify (ambiguous), or when C_h^2 < 0.
CalibratedPair solve_calibration(const CalibrationTarget& target, const ProfileFunction& f0,
                                 const ProfileFunction& h0);

}  // namespace epcc

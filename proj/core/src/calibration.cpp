#include "epcc/calibration.hpp"

#include <cmath>
#include <string>

namespace epcc {

namespace {

// Flattened zero-or-nonzero-intercept polynomial x^T A x + a^T x + c.
struct Poly {
  Eigen::MatrixXd quad;
  Eigen::VectorXd lin;
  double constant = 0.0;
};

Poly flatten(const ProfileFunction& fn) {
  if (!fn.is_polynomial()) {
    throw DimensionError("no closed form for forcing functions; use Monte Carlo");
  }
  return std::visit(
      [&fn](const auto& f) -> Poly {
        using T = std::decay_t<decltype(f)>;
        const int d = fn.dimension();
        if constexpr (std::is_same_v<T, ProfileFunction::Linear>) {
          return Poly{Eigen::MatrixXd::Zero(d, d), f.coeffs, f.intercept};
        } else if constexpr (std::is_same_v<T, ProfileFunction::Quadratic>) {
          return Poly{f.matrix, f.coeffs, 0.0};
        } else if constexpr (std::is_same_v<T, ProfileFunction::Mixture>) {
          const Poly left = flatten(*f.left);
          const Poly right = flatten(*f.right);
          const double nu = f.nu;
          return Poly{nu * left.quad + (1.0 - nu) * right.quad,
                      nu * left.lin + (1.0 - nu) * right.lin,
                      nu * left.constant + (1.0 - nu) * right.constant};
        } else {
          throw DimensionError("unreachable");
        }
      },
      fn.variant());
}

ProfileFunction to_profile(const Poly& p) {
  if (p.quad.isZero(0.0)) return ProfileFunction::linear(p.lin, p.constant);
  if (p.constant != 0.0) {
    throw DimensionError("to_profile: quadratic with nonzero intercept unsupported");
  }
  return ProfileFunction::quadratic(p.quad, p.lin);
}

double cov_poly(const Poly& p, const Poly& q) {
  return cov_quadratic_quadratic(p.quad, q.quad) + cov_quadratic_linear(p.quad, q.lin) +
         cov_quadratic_linear(q.quad, p.lin) + cov_linear(p.lin, q.lin);
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double var_function(const ProfileFunction& fn) {
  const Poly p = flatten(fn);
  return cov_poly(p, p);
}

double cov_function(const ProfileFunction& f, const ProfileFunction& g) {
  if (f.dimension() != g.dimension()) throw DimensionError("cov_function: dimension mismatch");
  return cov_poly(flatten(f), flatten(g));
}

double rho_of_nu(double nu, double var_delta, double var_f) {
  const double denom = 2.0 * nu - 1.0 + var_delta / var_f;
  if (!(denom > 0.0)) {
    throw InfeasibleCalibrationError("rho_of_nu: outside the identity's domain");
  }
  return nu / std::sqrt(denom);
}

std::optional<std::pair<double, double>> nu_roots(double rho, double var_delta, double var_f) {
  const double rho_sq = rho * rho;
  const double disc = rho_sq * rho_sq + rho_sq * (var_delta / var_f - 1.0);
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return std::make_pair(rho_sq - root, rho_sq + root);
}

ProfileFunction orthogonalize(const ProfileFunction& f0, const ProfileFunction& h0_star) {
  if (f0.dimension() != h0_star.dimension()) {
    throw DimensionError("orthogonalize: dimension mismatch");
  }
  const Poly pf = flatten(f0);
  const Poly ph = flatten(h0_star);
  if (pf.constant != 0.0 || ph.constant != 0.0) {
    throw DimensionError("orthogonalize: inputs must have zero intercept");
  }
  const double proj = cov_poly(pf, ph);
  Poly residual{ph.quad - proj * pf.quad, ph.lin - proj * pf.lin, 0.0};
  const double var_res = cov_poly(residual, residual);
  if (var_res < 1e-12) {
    throw DegenerateDataError("orthogonalize: h0* is parallel to f0; supply a new h0*");
  }
  const double scale = 1.0 / std::sqrt(var_res);
  residual.quad *= scale;
  residual.lin *= scale;
  return to_profile(residual);
}

ProfileFunction random_unit_polynomial(int d, int degree, Rng& rng) {
  if (d < 1) throw DimensionError("random_unit_polynomial: d must be >= 1");
  if (degree != 1 && degree != 2) {
    throw DimensionError("random_unit_polynomial: degree must be 1 or 2");
  }
  constexpr int kMaxRetries = 64;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Poly p{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd(d), 0.0};
    for (int i = 0; i < d; ++i) p.lin[i] = rng.normal();
    if (degree == 2) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) p.quad(i, j) = rng.normal();
      }
    }
    const double var = cov_poly(p, p);
    if (var < 1e-12) continue;
    const double scale = 1.0 / std::sqrt(var);
    p.quad *= scale;
    p.lin *= scale;
    return to_profile(p);
  }
  throw DegenerateDataError("random_unit_polynomial: repeated zero-variance samples");
}

CalibratedPair solve_calibration(const CalibrationTarget& target, const ProfileFunction& f0,
                                 const ProfileFunction& h0) {
  if (!(target.var_f > 0.0) || !(target.snr > 0.0)) {
    throw InfeasibleCalibrationError("solve_calibration: Var(f) and SNR must be positive");
  }
  if (std::abs(target.rho_fh) > 1.0) {
    throw InfeasibleCalibrationError("solve_calibration: |rho| must be <= 1");
  }
  if (std::abs(var_function(f0) - 1.0) > 1e-8 || std::abs(var_function(h0) - 1.0) > 1e-8) {
    throw InfeasibleCalibrationError("solve_calibration: f0 and h0 must have unit variance");
  }
  if (std::abs(cov_function(f0, h0)) > 1e-8) {
    throw InfeasibleCalibrationError("solve_calibration: f0 and h0 must be uncorrelated");
  }

  const double var_f = target.var_f;
  const double var_delta = target.snr;  // sigma^2 = 1
  const double rho = target.rho_fh;

  const auto roots = nu_roots(rho, var_delta, var_f);
  if (!roots) {
    throw InfeasibleCalibrationError(
        "solve_calibration: rho below the minimum achievable sqrt(1 - Var(delta)/Var(f))");
  }

  // Keep roots whose sign matches rho (the identity forces them to agree)
  // and that fall in the requested convexity range. nu <= 0 counts as
  // nonconvex; it is the only branch reaching rho <= 0.
  const auto in_range = [&](double nu) {
    if (sign_of(nu) != sign_of(rho)) return false;
    if (std::abs(nu - 1.0) < 1e-12) return false;  // h proportional to f, Var(delta) = 0
    if (target.convexity == Convexity::convex) return nu > 0.0 && nu < 1.0;
    return nu > 1.0 || nu <= 0.0;
  };

  const double candidates[2] = {roots->first, roots->second};
  int chosen = -1;
  int matches = 0;
  for (int i = 0; i < 2; ++i) {
    // A double root (disc == 0) contributes once.
    if (i == 1 && candidates[1] == candidates[0]) break;
    if (in_range(candidates[i])) {
      ++matches;
      chosen = i;
    }
  }
  if (matches == 0) {
    throw InfeasibleCalibrationError(
        "solve_calibration: no nu root in the requested convexity range");
  }
  if (matches == 2) {
    throw InfeasibleCalibrationError(
        "solve_calibration: both nu roots satisfy the request (ambiguous); "
        "the target correlation lies between sqrt(1 - Var(delta)/Var(f)) and "
        "the asymptote 1/sqrt(1 + Var(delta)/Var(f))");
  }
  const double nu = candidates[chosen];

  const double one_minus_nu_sq = (1.0 - nu) * (1.0 - nu);
  double c_h_sq = var_delta / one_minus_nu_sq - var_f;
  // |rho| = 1 collapses h onto the f axis; tolerate rounding there.
  if (c_h_sq < 0.0 && c_h_sq > -1e-9 * var_f) c_h_sq = 0.0;
  if (c_h_sq < 0.0) {
    throw InfeasibleCalibrationError("solve_calibration: C_h^2 < 0");
  }
  const double c_h = std::sqrt(c_h_sq);
  const double c_f = std::sqrt(var_f);

  ProfileFunction f = f0.scaled(c_f);
  ProfileFunction h = ProfileFunction::mixture(nu, f, h0.scaled(c_h));

  // Verify the construction with closed-form moments before handing it out.
  const double var_h = var_function(h);
  const double cov_fh = cov_function(f, h);
  const double var_delta_achieved = var_f - 2.0 * cov_fh + var_h;
  const double rho_achieved = cov_fh / std::sqrt(var_f * var_h);
  if (std::abs(var_delta_achieved - var_delta) > 1e-8 * std::max(1.0, var_delta) ||
      std::abs(rho_achieved - rho) > 1e-8) {
    throw InfeasibleCalibrationError("solve_calibration: closed-form verification failed");
  }

  return CalibratedPair{std::move(f), std::move(h), f0, h0, nu, c_f, c_h};
}

}  // namespace epcc

#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "epcc/errors.hpp"
#include "epcc/rng.hpp"

namespace epcc {

/// A fixed n x d design with entries in [0,1]; identical for every time
/// step within a run.
struct FixedDesign {
  Eigen::MatrixXd points;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }

  /// Draws a design from Unif([0,1]^d) once; callers hold it fixed.
  static FixedDesign random(int n, int d, Rng& rng);

  /// Enforces n >= 2, d >= 1, entries in [0,1].
  void validate() const;
};

/// One observed profile: n responses at time t (historical t <= 0,
/// monitored t >= 1).
struct ResponseVector {
  Eigen::VectorXd y;
  long t = 0;
};

/// Symbolic mean function for a profile. Polynomials carry exact
/// coefficients so moments can be computed in closed form; the two named
/// forcing functions have no closed-form moments and are handled by
/// Monte Carlo in the harness.
class ProfileFunction {
 public:
  struct Linear {
    Eigen::VectorXd coeffs;
    double intercept = 0.0;
  };
  /// x^T A x + a^T x, zero intercept.
  struct Quadratic {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd coeffs;
  };
  /// scale * sin(2 pi x1 x2)
  struct ForcingSin {
    double scale = 1.0;
    int dim = 3;
  };
  /// scale * 25 |x1 - 0.5| e^{-x2} 1{x3 > 0.5}
  struct ForcingRidge {
    double scale = 1.0;
    int dim = 3;
  };
  /// nu * left + (1 - nu) * right, evaluated pointwise.
  struct Mixture {
    double nu = 0.5;
    std::shared_ptr<const ProfileFunction> left;
    std::shared_ptr<const ProfileFunction> right;
  };

  using Variant = std::variant<Linear, Quadratic, ForcingSin, ForcingRidge, Mixture>;

  static ProfileFunction linear(Eigen::VectorXd coeffs, double intercept = 0.0);
  static ProfileFunction quadratic(Eigen::MatrixXd matrix, Eigen::VectorXd coeffs);
  static ProfileFunction forcing_sin(double scale = 1.0, int dim = 3);
  static ProfileFunction forcing_ridge(double scale = 1.0, int dim = 3);
  static ProfileFunction mixture(double nu, ProfileFunction left, ProfileFunction right);

  int dimension() const;

  /// Evaluates the mean function at a single point.
  double operator()(const Eigen::VectorXd& x) const;

  /// Multiplies the function by a scalar (distributes into mixtures).
  ProfileFunction scaled(double s) const;

  bool is_polynomial() const;  // Linear, Quadratic, or Mixture of such

  const Variant& variant() const { return variant_; }

 private:
  explicit ProfileFunction(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

/// Mean response at every design point: component i is fn(row i of X).
Eigen::VectorXd evaluate(const ProfileFunction& fn, const FixedDesign& design);

/// y = evaluate(fn, X) + sigma * N(0, I). Deterministic given the rng state.
ResponseVector generate_profile(const ProfileFunction& fn, const FixedDesign& design,
                                double sigma, Rng& rng, long t = 0);

/// The four (in-control f, forcing g) rows of the benchmark catalog, d = 3.
std::vector<std::pair<ProfileFunction, ProfileFunction>> table2_catalog();

}  // namespace epcc

#include "epcc/profile_model.hpp"

#include <cmath>
#include <numbers>

namespace epcc {

FixedDesign FixedDesign::random(int n, int d, Rng& rng) {
  if (n < 2 || d < 1) throw DimensionError("FixedDesign: need n >= 2 and d >= 1");
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = rng.uniform();
  }
  return FixedDesign{std::move(x)};
}

void FixedDesign::validate() const {
  if (n() < 2 || dim() < 1) throw DimensionError("FixedDesign: need n >= 2 and d >= 1");
  if ((points.array() < 0.0).any() || (points.array() > 1.0).any()) {
    throw DimensionError("FixedDesign: entries must lie in [0,1]");
  }
}

ProfileFunction ProfileFunction::linear(Eigen::VectorXd coeffs, double intercept) {
  if (coeffs.size() < 1) throw DimensionError("linear: empty coefficient vector");
  return ProfileFunction(Linear{std::move(coeffs), intercept});
}

ProfileFunction ProfileFunction::quadratic(Eigen::MatrixXd matrix, Eigen::VectorXd coeffs) {
  if (matrix.rows() != matrix.cols()) throw DimensionError("quadratic: matrix must be square");
  if (matrix.rows() != coeffs.size()) {
    throw DimensionError("quadratic: matrix and coefficient dimensions disagree");
  }
  return ProfileFunction(Quadratic{std::move(matrix), std::move(coeffs)});
}

ProfileFunction ProfileFunction::forcing_sin(double scale, int dim) {
  if (dim < 2) throw DimensionError("forcing_sin: needs d >= 2");
  return ProfileFunction(ForcingSin{scale, dim});
}

ProfileFunction ProfileFunction::forcing_ridge(double scale, int dim) {
  if (dim < 3) throw DimensionError("forcing_ridge: needs d >= 3");
  return ProfileFunction(ForcingRidge{scale, dim});
}

ProfileFunction ProfileFunction::mixture(double nu, ProfileFunction left, ProfileFunction right) {
  if (left.dimension() != right.dimension()) {
    throw DimensionError("mixture: component dimensions disagree");
  }
  Mixture m{nu, std::make_shared<const ProfileFunction>(std::move(left)),
            std::make_shared<const ProfileFunction>(std::move(right))};
  return ProfileFunction(std::move(m));
}

int ProfileFunction::dimension() const {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return static_cast<int>(f.coeffs.size());
        } else if constexpr (std::is_same_v<T, Quadratic>) {
          return static_cast<int>(f.coeffs.size());
        } else if constexpr (std::is_same_v<T, Mixture>) {
          return f.left->dimension();
        } else {
          return f.dim;
        }
      },
      variant_);
}

double ProfileFunction::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dimension()) throw DimensionError("ProfileFunction: point dimension mismatch");
  return std::visit(
      [&x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return f.coeffs.dot(x) + f.intercept;
        } else if constexpr (std::is_same_v<T, Quadratic>) {
          return x.dot(f.matrix * x) + f.coeffs.dot(x);
        } else if constexpr (std::is_same_v<T, ForcingSin>) {
          return f.scale * std::sin(2.0 * std::numbers::pi * x[0] * x[1]);
        } else if constexpr (std::is_same_v<T, ForcingRidge>) {
          const double ridge = 25.0 * std::abs(x[0] - 0.5) * std::exp(-x[1]);
          return f.scale * (x[2] > 0.5 ? ridge : 0.0);
        } else {
          return f.nu * (*f.left)(x) + (1.0 - f.nu) * (*f.right)(x);
        }
      },
      variant_);
}

ProfileFunction ProfileFunction::scaled(double s) const {
  return std::visit(
      [s](const auto& f) -> ProfileFunction {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return ProfileFunction(Linear{s * f.coeffs, s * f.intercept});
        } else if constexpr (std::is_same_v<T, Quadratic>) {
          return ProfileFunction(Quadratic{s * f.matrix, s * f.coeffs});
        } else if constexpr (std::is_same_v<T, ForcingSin>) {
          return ProfileFunction(ForcingSin{s * f.scale, f.dim});
        } else if constexpr (std::is_same_v<T, ForcingRidge>) {
          return ProfileFunction(ForcingRidge{s * f.scale, f.dim});
        } else {
          return ProfileFunction(Mixture{
              f.nu, std::make_shared<const ProfileFunction>(f.left->scaled(s)),
              std::make_shared<const ProfileFunction>(f.right->scaled(s))});
        }
      },
      variant_);
}

bool ProfileFunction::is_polynomial() const {
  return std::visit(
      [](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear> || std::is_same_v<T, Quadratic>) {
          return true;
        } else if constexpr (std::is_same_v<T, Mixture>) {
          return f.left->is_polynomial() && f.right->is_polynomial();
        } else {
          return false;
        }
      },
      variant_);
}

Eigen::VectorXd evaluate(const ProfileFunction& fn, const FixedDesign& design) {
  if (design.dim() != fn.dimension()) {
    throw DimensionError("evaluate: design and function dimensions disagree");
  }
  Eigen::VectorXd out(design.n());
  for (int i = 0; i < design.n(); ++i) {
    out[i] = fn(design.points.row(i).transpose());
  }
  return out;
}

ResponseVector generate_profile(const ProfileFunction& fn, const FixedDesign& design,
                                double sigma, Rng& rng, long t) {
  if (!(sigma > 0.0)) throw DimensionError("generate_profile: sigma must be positive");
  Eigen::VectorXd y = evaluate(fn, design);
  for (int i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  return ResponseVector{std::move(y), t};
}

std::vector<std::pair<ProfileFunction, ProfileFunction>> table2_catalog() {
  Eigen::VectorXd a(3);
  a << 3.0, 2.0, 1.0;
  const ProfileFunction f_linear = ProfileFunction::linear(a, 1.0);
  const ProfileFunction f_quadratic =
      ProfileFunction::quadratic((4.0 / 9.0) * (a * a.transpose()), Eigen::VectorXd::Zero(3));

  std::vector<std::pair<ProfileFunction, ProfileFunction>> rows;
  rows.emplace_back(f_linear, ProfileFunction::forcing_sin(1.0, 3));
  rows.emplace_back(f_quadratic, ProfileFunction::forcing_sin(5.0, 3));
  rows.emplace_back(f_linear, ProfileFunction::forcing_ridge(1.0, 3));
  rows.emplace_back(f_quadratic, ProfileFunction::forcing_ridge(1.0, 3));
  return rows;
}

}  // namespace epcc

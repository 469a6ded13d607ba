#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "epcc/errors.hpp"

namespace epcc {

/// splitmix64 step; used both as a stream-derivation hash and a seeder.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a master seed and a path of ids, so that
/// independent streams (per trial, per step, per k1) never share state.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master ^ 0xd1b54a32d192ed03ULL;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t id : path) {
    s ^= id + 0x9e3779b97f4a7c15ULL + (out << 6) + (out >> 2);
    out = splitmix64(s);
  }
  return out;
}

/// Deterministic random stream. Normal deviates use the Marsaglia polar
/// method on top of the mt19937_64 stream, so sequences are reproducible
/// across standard libraries, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [-1, 1).
  double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  /// Standard normal deviate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_symmetric();
      v = uniform_symmetric();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Samples k distinct integers uniformly from {0, ..., pool-1} with
/// Floyd's algorithm; O(k) expected regardless of pool size.
inline std::vector<int> sample_without_replacement(int pool, int k, Rng& rng) {
  if (k < 0 || k > pool) {
    throw DimensionError("sample_without_replacement: k out of range for pool");
  }
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (int j = pool - k; j < pool; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

/// Same, but avoiding the indices in `exclude` (must leave at least k free).
inline std::vector<int> sample_without_replacement_excluding(
    int pool, int k, const std::vector<int>& exclude, Rng& rng) {
  if (pool - static_cast<int>(exclude.size()) < k) {
    throw DimensionError("sample_without_replacement_excluding: pool too small");
  }
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  while (static_cast<int>(chosen.size()) < k) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(pool)));
    if (std::find(exclude.begin(), exclude.end(), t) != exclude.end()) continue;
    if (std::find(chosen.begin(), chosen.end(), t) != chosen.end()) continue;
    chosen.push_back(t);
  }
  return chosen;
}

/// Uniform draw from the unit sphere in R^dim.
inline Eigen::VectorXd sphere_uniform(int dim, Rng& rng) {
  Eigen::VectorXd q(dim);
  double norm_sq = 0.0;
  do {
    for (int i = 0; i < dim; ++i) q[i] = rng.normal();
    norm_sq = q.squaredNorm();
  } while (norm_sq == 0.0);
  return q / std::sqrt(norm_sq);
}

}  // namespace epcc

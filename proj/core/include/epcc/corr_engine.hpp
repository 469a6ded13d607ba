#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "epcc/profile_model.hpp"
#include "epcc/rng.hpp"

namespace epcc {

/// Sample Pearson correlation of two equal-length vectors. Throws
/// DegenerateDataError on zero-variance input.
double pearson(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2);

/// The m known in-control profiles, their m x m correlation matrix R*,
/// the pointwise mean f_hat, and the pooled noise variance estimate.
/// Raw responses are retained because substitution computes fresh
/// correlations against observed profiles.
class HistoricalBank {
 public:
  /// Builds the bank from m >= 2 equal-length responses.
  static HistoricalBank build(const std::vector<ResponseVector>& historical);

  int m() const { return static_cast<int>(centered_.size()); }
  int n() const { return static_cast<int>(f_hat_.size()); }
  const Eigen::MatrixXd& r_star() const { return r_star_; }
  const Eigen::VectorXd& f_hat() const { return f_hat_; }
  double sigma_hat_sq() const { return sigma_hat_sq_; }

  const ResponseVector& response(int i) const { return responses_[static_cast<std::size_t>(i)]; }
  const Eigen::VectorXd& centered(int i) const { return centered_[static_cast<std::size_t>(i)]; }
  double norm(int i) const { return norms_[static_cast<std::size_t>(i)]; }

 private:
  std::vector<ResponseVector> responses_;
  std::vector<Eigen::VectorXd> centered_;
  std::vector<double> norms_;
  Eigen::MatrixXd r_star_;
  Eigen::VectorXd f_hat_;
  double sigma_hat_sq_ = 0.0;
};

/// Ring of the last w responses (stored centered with cached norms) plus
/// their w x w sample correlation matrix in chronological order, oldest
/// first. A push costs one centering pass and w-1 dot products; the
/// shared (w-1) x (w-1) block of R is shifted, never recomputed.
class CorrelationWindow {
 public:
  struct Slot {
    Eigen::VectorXd centered;
    double norm = 0.0;
    long t = 0;
    int bank_index = -1;  // >= 0 while the slot still holds a historical profile
  };

  /// Seeds the window with the w most recent historical responses; R is
  /// the trailing w x w block of R*.
  static CorrelationWindow init(const HistoricalBank& bank, int w);

  void push(const ResponseVector& y);

  int w() const { return w_; }
  int n() const { return static_cast<int>(slots_.front().centered.size()); }
  long time() const { return time_; }
  const Eigen::MatrixXd& r() const { return r_; }
  const Slot& slot(int i) const { return slots_[static_cast<std::size_t>(i)]; }

  /// Instrumentation: cumulative count of O(n) dot products performed by
  /// pushes on this window.
  std::size_t dot_product_count() const { return dot_count_; }

 private:
  int w_ = 0;
  long time_ = 0;
  std::deque<Slot> slots_;
  Eigen::MatrixXd r_;
  std::size_t dot_count_ = 0;
};

/// R(k1): the window's correlation matrix with the k1 oldest slots
/// replaced by sampled historical profiles.
struct SubstitutedMatrix {
  Eigen::MatrixXd rk;
  int k1 = 0;
  std::vector<int> sampled_indices;
  /// Number of entries (upper triangle) computed fresh from raw
  /// responses rather than read from R* or the window's R.
  std::size_t fresh_entries = 0;
};

/// Index pool for substitution at monitoring time T: all of [m] once
/// T >= w - k1, otherwise only the m - w + k1 + T oldest historical
/// profiles, so no sampled profile duplicates one still in the window.
/// Returns k1 distinct 0-based bank indices.
std::vector<int> sample_replacement_indices(long t, int w, int k1, int m, Rng& rng);

/// Builds R(k1). Entries between two substituted profiles (and between a
/// substituted profile and a window slot that itself still holds a
/// historical profile) are read from R*; entries against observed
/// responses are computed fresh; the trailing block is copied from R.
SubstitutedMatrix substitute(const CorrelationWindow& window, const HistoricalBank& bank, int k1,
                             const std::vector<int>& indices);

/// E[R] fixture: unit diagonal, gamma1 in the leading k1 block, gamma2 in
/// the trailing k2 block, gamma12 in the cross blocks.
Eigen::MatrixXd expected_correlation(double gamma1, double gamma2, double gamma12, int k1, int k2);

}  // namespace epcc

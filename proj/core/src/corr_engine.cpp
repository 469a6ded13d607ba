#include "epcc/corr_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace epcc {

namespace {

void center_response(const Eigen::VectorXd& y, Eigen::VectorXd& centered, double& norm) {
  centered = y.array() - y.mean();
  const double norm_sq = centered.squaredNorm();
  if (!(norm_sq > 0.0)) {
    throw DegenerateDataError("constant response: zero sample variance");
  }
  norm = std::sqrt(norm_sq);
}

}  // namespace

double pearson(const Eigen::VectorXd& y1, const Eigen::VectorXd& y2) {
  if (y1.size() != y2.size()) throw DimensionError("pearson: length mismatch");
  if (y1.size() < 2) throw DimensionError("pearson: need length >= 2");
  Eigen::VectorXd c1, c2;
  double n1 = 0.0, n2 = 0.0;
  center_response(y1, c1, n1);
  center_response(y2, c2, n2);
  return c1.dot(c2) / (n1 * n2);
}

HistoricalBank HistoricalBank::build(const std::vector<ResponseVector>& historical) {
  const int m = static_cast<int>(historical.size());
  if (m < 2) throw DimensionError("HistoricalBank: need m >= 2 historical profiles");
  const int n = static_cast<int>(historical.front().y.size());
  for (const auto& r : historical) {
    if (r.y.size() != n) throw DimensionError("HistoricalBank: unequal response lengths");
  }

  HistoricalBank bank;
  bank.responses_ = historical;
  bank.centered_.resize(static_cast<std::size_t>(m));
  bank.norms_.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    center_response(historical[static_cast<std::size_t>(i)].y, bank.centered_[static_cast<std::size_t>(i)],
                    bank.norms_[static_cast<std::size_t>(i)]);
  }

  bank.r_star_ = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double r = bank.centered_[static_cast<std::size_t>(i)].dot(
                           bank.centered_[static_cast<std::size_t>(j)]) /
                       (bank.norms_[static_cast<std::size_t>(i)] * bank.norms_[static_cast<std::size_t>(j)]);
      bank.r_star_(i, j) = r;
      bank.r_star_(j, i) = r;
    }
  }

  bank.f_hat_ = Eigen::VectorXd::Zero(n);
  for (const auto& r : historical) bank.f_hat_ += r.y;
  bank.f_hat_ /= static_cast<double>(m);

  double ss = 0.0;
  for (const auto& r : historical) ss += (r.y - bank.f_hat_).squaredNorm();
  bank.sigma_hat_sq_ = ss / (static_cast<double>(n) * static_cast<double>(m - 1));
  return bank;
}

CorrelationWindow CorrelationWindow::init(const HistoricalBank& bank, int w) {
  if (w < 2 || w > bank.m()) throw DimensionError("CorrelationWindow: need 2 <= w <= m");
  CorrelationWindow win;
  win.w_ = w;
  win.time_ = 0;
  const int m = bank.m();
  for (int i = m - w; i < m; ++i) {
    win.slots_.push_back(Slot{bank.centered(i), bank.norm(i), bank.response(i).t, i});
  }
  win.r_ = bank.r_star().bottomRightCorner(w, w);
  return win;
}

void CorrelationWindow::push(const ResponseVector& y) {
  if (static_cast<int>(y.y.size()) != n()) throw DimensionError("push: response length mismatch");

  Slot fresh;
  fresh.t = y.t;
  fresh.bank_index = -1;
  center_response(y.y, fresh.centered, fresh.norm);

  slots_.pop_front();
  slots_.push_back(std::move(fresh));
  ++time_;

  // The surviving (w-1)x(w-1) block shifts toward the origin; source
  // indices are strictly ahead of destinations so in-place order is safe.
  for (int i = 0; i < w_ - 1; ++i) {
    for (int j = 0; j < w_ - 1; ++j) r_(i, j) = r_(i + 1, j + 1);
  }
  const Slot& newest = slots_.back();
  for (int j = 0; j < w_ - 1; ++j) {
    const Slot& other = slots_[static_cast<std::size_t>(j)];
    const double r = newest.centered.dot(other.centered) / (newest.norm * other.norm);
    r_(w_ - 1, j) = r;
    r_(j, w_ - 1) = r;
    ++dot_count_;
  }
  r_(w_ - 1, w_ - 1) = 1.0;
}

std::vector<int> sample_replacement_indices(long t, int w, int k1, int m, Rng& rng) {
  if (k1 < 1 || k1 > w - 1) throw DimensionError("sample_replacement_indices: need 1 <= k1 <= w-1");
  const long pool = (t >= static_cast<long>(w - k1)) ? m : (m - w + k1 + t);
  if (pool < k1) throw DimensionError("sample_replacement_indices: pool smaller than k1");
  return sample_without_replacement(static_cast<int>(pool), k1, rng);
}

SubstitutedMatrix substitute(const CorrelationWindow& window, const HistoricalBank& bank, int k1,
                             const std::vector<int>& indices) {
  const int w = window.w();
  if (k1 < 1 || k1 >= w) throw DimensionError("substitute: need 1 <= k1 <= w-1");
  if (static_cast<int>(indices.size()) != k1) throw DimensionError("substitute: need k1 indices");
  for (int idx : indices) {
    if (idx < 0 || idx >= bank.m()) throw DimensionError("substitute: bank index out of range");
  }
  // The sampling rule guarantees no substitute duplicates a historical
  // profile still sitting in a non-replaced slot.
  for (int p = k1; p < w; ++p) {
    const int b = window.slot(p).bank_index;
    if (b >= 0 && std::find(indices.begin(), indices.end(), b) != indices.end()) {
      throw DimensionError("substitute: sampled profile still present in the window");
    }
  }

  SubstitutedMatrix out;
  out.k1 = k1;
  out.sampled_indices = indices;
  out.rk.resize(w, w);
  out.rk.bottomRightCorner(w - k1, w - k1) = window.r().bottomRightCorner(w - k1, w - k1);

  for (int i = 0; i < k1; ++i) {
    out.rk(i, i) = 1.0;
    for (int j = i + 1; j < k1; ++j) {
      const double r = bank.r_star()(indices[static_cast<std::size_t>(i)],
                                     indices[static_cast<std::size_t>(j)]);
      out.rk(i, j) = r;
      out.rk(j, i) = r;
    }
    const int bi = indices[static_cast<std::size_t>(i)];
    for (int j = k1; j < w; ++j) {
      const auto& slot = window.slot(j);
      double r;
      if (slot.bank_index >= 0) {
        r = bank.r_star()(bi, slot.bank_index);
      } else {
        r = bank.centered(bi).dot(slot.centered) / (bank.norm(bi) * slot.norm);
        ++out.fresh_entries;
      }
      out.rk(i, j) = r;
      out.rk(j, i) = r;
    }
  }
  return out;
}

Eigen::MatrixXd expected_correlation(double gamma1, double gamma2, double gamma12, int k1,
                                     int k2) {
  if (k1 < 0 || k2 < 0 || k1 + k2 < 2) {
    throw DimensionError("expected_correlation: need k1, k2 >= 0 and k1 + k2 >= 2");
  }
  for (double g : {gamma1, gamma2, gamma12}) {
    if (!(g > -1.0 && g < 1.0)) {
      throw DimensionError("expected_correlation: gammas must lie in (-1, 1)");
    }
  }
  const int w = k1 + k2;
  Eigen::MatrixXd er(w, w);
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < w; ++j) {
      if (i == j) {
        er(i, j) = 1.0;
      } else if (i < k1 && j < k1) {
        er(i, j) = gamma1;
      } else if (i >= k1 && j >= k1) {
        er(i, j) = gamma2;
      } else {
        er(i, j) = gamma12;
      }
    }
  }
  return er;
}

}  // namespace epcc

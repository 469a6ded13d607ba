#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epcc/corr_engine.hpp"
#include "epcc/eigen_core.hpp"

namespace epcc {

/// Monitoring parameters. K defaults to L evenly spaced k1 values
/// {1, floor(w/L), 2 floor(w/L), ..., (L-2) floor(w/L), w-1}.
struct ChartConfig {
  int w = 10;
  int l_spacing = 5;           // L; used when k_values is empty
  std::vector<int> k_values;   // explicit K, optional
  double zeta = 1e-3;
  double c = 1e-14;
  int n_bootstrap = 1000;      // N: bootstrap statistic count
  int n_pool = 5000;           // N0: bootstrap profile pool size
  int max_iter = 0;            // 0 -> 10 w + 100
  std::uint64_t seed = 0;

  std::vector<int> resolved_k() const;
  int resolved_max_iter() const { return max_iter > 0 ? max_iter : 10 * w + 100; }
};

/// FNV-1a hash of the resolved configuration, for tying control limits
/// to the settings that produced them.
std::string digest(const ChartConfig& config);

/// {1, floor(w/L), ..., (L-2) floor(w/L), w-1}, clipped to [1, w-1],
/// deduplicated and sorted.
std::vector<int> make_K(int w, int l_spacing);

/// Fitted null-statistic parameters and the upper limit at tail mass c:
/// U = mu_S + sd_S * z(1 - c).
struct ControlLimit {
  double u = 0.0;
  double mu_s = 0.0;
  double sd_s = 0.0;
  double c = 0.0;
  std::string config_digest;
  std::uint64_t seed = 0;
};

/// z with P(Z > z) = c for standard normal Z, by bisection on the
/// complementary CDF in erfc form. Accurate into the far tail
/// (c = 1e-14 and beyond), where rational approximations degrade.
double normal_upper_quantile(double c);

/// Parametric bootstrap of the null statistic distribution:
/// N0 responses f_hat + N(0, sigma_hat^2 I); for each of N replicates, w
/// of them are drawn without replacement, the per-k1 substitution runs
/// against additional pool responses disjoint from the replicate's w,
/// and S_l = max_k1 of the perturbation statistic. U is the 1-c normal
/// quantile fitted to {S_l}.
ControlLimit bootstrap_control_limit(const HistoricalBank& bank, const ChartConfig& config,
                                     std::uint64_t seed);

struct PerK1 {
  int k1 = 0;
  double statistic = 0.0;
  ExitReason exit_reason = ExitReason::max_iter_reached;
};

struct MonitoringOutcome {
  long t = 0;
  double statistic = 0.0;  // max over K
  int argmax_k1 = 0;
  bool alarm = false;
  std::vector<PerK1> per_k1;
};

/// One online chart: owns the sliding window and the per-step monitoring
/// loop. Replacement indices and power-iteration starts are drawn from
/// substreams keyed on (seed, step, k1), so a replay with the same seed
/// reproduces every statistic bit for bit.
class Chart {
 public:
  Chart(const HistoricalBank& bank, const ChartConfig& config, double u);

  /// Observe y: push, substitute for every k1 in K, run the detector,
  /// return the max statistic and alarm flag (statistic > U).
  MonitoringOutcome step(const ResponseVector& y);

  /// Restores the freshly initialized state (window and clock).
  void reset();

  const CorrelationWindow& window() const { return window_; }
  const HistoricalBank& bank() const { return *bank_; }
  const ChartConfig& config() const { return config_; }
  long time() const { return window_.time(); }
  double u() const { return u_; }

 private:
  const HistoricalBank* bank_;
  ChartConfig config_;
  double u_;
  std::vector<int> k_set_;
  Eigen::VectorXd v_ref_;
  CorrelationWindow window_;
};

struct RunLog {
  std::optional<long> alarm_time;
  std::vector<MonitoringOutcome> outcomes;
};

/// Consumes the stream until the first alarm or exhaustion.
RunLog run_chart(Chart& chart, const std::vector<ResponseVector>& stream);
RunLog run_chart(Chart& chart, const std::function<std::optional<ResponseVector>()>& next);

}  // namespace epcc

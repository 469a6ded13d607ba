#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epcc/calibration.hpp"
#include "epcc/chart.hpp"

namespace epcc {

/// n_alarm / (n_trials + n_alarm): the fraction of monitoring starts or
/// restarts that end in a false alarm.
double far_estimate(long n_alarm, long n_trials);

/// Per-trial alarm history. All false alarms happen at or before tau;
/// a missing true_alarm_time means the trial was censored at its horizon.
struct TrialRecord {
  long tau = 0;
  std::vector<long> false_alarm_times;
  std::optional<long> true_alarm_time;
  std::uint64_t seed = 0;
  std::string control_limit_digest;
  double u = 0.0;
};

/// Mean of (true_alarm_time - tau) over the records with a true alarm.
/// Censored records are excluded; their count is written to
/// censored_count when provided. Throws if nothing remains.
double arl1_estimate(const std::vector<TrialRecord>& records, int* censored_count = nullptr);

struct Arl0Estimate {
  std::optional<double> arl0_star;  // mean alarm time over uncensored runs
  int finished = 0;                 // runs that alarmed within the horizon
  double lower_bound = 0.0;         // censored runs imputed at horizon + 1
};

/// Right-censored ARL0 estimator: nullopt entries are runs that never
/// alarmed within the horizon.
Arl0Estimate arl0_censored(const std::vector<std::optional<long>>& alarm_times, long horizon);

struct PopulationCorrelations {
  double rho_ff = 0.0;        // Var(f) / (Var(f) + sigma^2)
  double rho_hh = 0.0;        // Var(h) / (Var(h) + sigma^2)
  double rho_fh_noisy = 0.0;  // Cov(f,h) / sqrt((Var f + s^2)(Var h + s^2))
};

/// The three population correlations between noisy profiles; requires
/// closed-form variances (polynomial f and h).
PopulationCorrelations population_correlations(const ProfileFunction& f,
                                               const ProfileFunction& h, double sigma_sq);

struct ForcingCalibration {
  double nu = 0.0;
  double var_fg = 0.0;     // Monte Carlo estimate of Var(f - g)
  double se_var_fg = 0.0;  // standard error of the estimate
  bool nu_in_unit_interval = true;
};

/// Solves Var(f - h) = (1 - nu)^2 Var(f - g) = target_snr * sigma^2 for
/// nu = 1 - sqrt(target_snr sigma^2 / Var(f - g)), with Var(f - g)
/// estimated by Monte Carlo (forcing functions have no closed form).
/// When the target exceeds Var(f - g) the solution has nu < 0; that is
/// reported in nu_in_unit_interval and rejected only under strict.
ForcingCalibration snr_solve_forcing(const ProfileFunction& f, const ProfileFunction& g,
                                     double target_snr, double sigma_sq, Rng& rng,
                                     long samples = 10000000, bool strict = false);

/// Everything one trial needs; all randomness is derived from seed.
struct TrialConfig {
  ProfileFunction f;
  ProfileFunction h;
  int n = 256;
  int d = 3;
  int m = 20;
  long tau = 30;
  double sigma = 1.0;
  ChartConfig chart;               // chart.w etc.; chart.seed is derived from seed
  long horizon_after_tau = 100000;  // censor the true-alarm search
  std::uint64_t seed = 0;
};

/// One monitored run: frozen design, m historical profiles, bootstrap
/// control limit, then streaming with the false-alarm reset protocol
/// (window restored to its initial state, tau unmoved) until the first
/// alarm after tau or the horizon.
TrialRecord run_trial(const TrialConfig& config);

/// Pure in-control run for ARL0 probing: no resets, returns the first
/// alarm time or nullopt if none occurs within the horizon.
std::optional<long> run_arl0_probe(const TrialConfig& config, long horizon);

struct RuntimeSummary {
  double min_s = 0.0;
  double median_s = 0.0;
  double max_s = 0.0;
  int batches = 0;
};

/// Wall-clock time per batch of 100 monitor steps on an in-control
/// stream (profile generation excluded from the clock).
RuntimeSummary runtime_probe(const ProfileFunction& f, int n, int d, int m,
                             const ChartConfig& chart, double sigma, int batches,
                             std::uint64_t seed);

/// One cell of a study: resolved factors, feasibility, the estimates and
/// every trial (with its seed) needed to reproduce them.
struct CellSummary {
  std::string study;
  std::string cell_id;
  std::vector<std::pair<std::string, std::string>> factors;
  bool infeasible = false;
  std::string infeasible_reason;
  double far = 0.0;
  double arl1 = 0.0;
  int censored = 0;
  long n_false_alarms = 0;
  std::optional<PopulationCorrelations> population;
  std::vector<TrialRecord> trials;
};

using LogFn = std::function<void(const std::string&)>;

struct Study1Options {
  int trials = 100;
  int n = 256;
  int m = 20;
  int d = 3;
  long tau = 30;
  double sigma = 1.0;
  ChartConfig chart;  // w = 10 etc.
  long mc_samples = 10000000;
  long horizon_after_tau = 100000;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  LogFn log;
};

/// The four benchmark profile pairs x SNR {3, 5}.
std::vector<CellSummary> run_study1(const Study1Options& options);

struct Study2Options {
  int trials = 100;
  int d = 25;
  double sigma = 1.0;
  // Factor levels; the full factorial of these is enumerated. tau 10^4
  // is replaced by tau_large (default 10^3) unless full_tau is set.
  std::vector<long> taus = {0, 30, 10000};
  std::vector<int> ns = {128, 256, 512};
  std::vector<int> ms = {20, 40};
  std::vector<int> m_over_ws = {1, 2};
  std::vector<double> snrs = {3, 5};
  std::vector<double> var_fs = {2, 4, 6};
  std::vector<double> rhos = {0.75, 0.9};
  std::vector<Convexity> convexities = {Convexity::convex, Convexity::nonconvex};
  long tau_large = 1000;
  bool full_tau = false;
  ChartConfig chart_base;
  long horizon_after_tau = 100000;
  std::uint64_t master_seed = 2;
  int jobs = 1;
  LogFn log;
};

/// Quadratic-profile study over the factorial grid; infeasible cells are
/// reported, never silently dropped.
std::vector<CellSummary> run_study2(const Study2Options& options);

/// Runs a batch of independent trials, optionally across threads;
/// results are ordered by index regardless of scheduling.
std::vector<TrialRecord> run_trials(const std::vector<TrialConfig>& configs, int jobs);

/// FAR / ARL1 aggregation for one cell's records.
void summarize_trials(CellSummary& cell);

}  // namespace epcc

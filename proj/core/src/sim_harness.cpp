#include "epcc/sim_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace epcc {

double far_estimate(long n_alarm, long n_trials) {
  if (n_alarm < 0 || n_trials < 1) throw DimensionError("far_estimate: bad counts");
  return static_cast<double>(n_alarm) / static_cast<double>(n_trials + n_alarm);
}

double arl1_estimate(const std::vector<TrialRecord>& records, int* censored_count) {
  if (records.empty()) throw DimensionError("arl1_estimate: no records");
  double sum = 0.0;
  long used = 0;
  int censored = 0;
  for (const auto& rec : records) {
    if (!rec.true_alarm_time) {
      ++censored;
      continue;
    }
    sum += static_cast<double>(*rec.true_alarm_time - rec.tau);
    ++used;
  }
  if (censored_count) *censored_count = censored;
  if (used == 0) throw DegenerateDataError("arl1_estimate: every record censored");
  return sum / static_cast<double>(used);
}

Arl0Estimate arl0_censored(const std::vector<std::optional<long>>& alarm_times, long horizon) {
  if (horizon < 1) throw DimensionError("arl0_censored: horizon must be >= 1");
  Arl0Estimate est;
  double sum_finished = 0.0;
  double sum_all = 0.0;
  for (const auto& t : alarm_times) {
    if (t) {
      sum_finished += static_cast<double>(*t);
      sum_all += static_cast<double>(*t);
      ++est.finished;
    } else {
      sum_all += static_cast<double>(horizon + 1);
    }
  }
  if (est.finished > 0) est.arl0_star = sum_finished / est.finished;
  est.lower_bound = alarm_times.empty() ? static_cast<double>(horizon + 1)
                                        : sum_all / static_cast<double>(alarm_times.size());
  return est;
}

PopulationCorrelations population_correlations(const ProfileFunction& f,
                                               const ProfileFunction& h, double sigma_sq) {
  const double var_f = var_function(f);
  const double var_h = var_function(h);
  const double cov_fh = cov_function(f, h);
  PopulationCorrelations out;
  out.rho_ff = var_f / (var_f + sigma_sq);
  out.rho_hh = var_h / (var_h + sigma_sq);
  out.rho_fh_noisy = cov_fh / std::sqrt((var_f + sigma_sq) * (var_h + sigma_sq));
  return out;
}

ForcingCalibration snr_solve_forcing(const ProfileFunction& f, const ProfileFunction& g,
                                     double target_snr, double sigma_sq, Rng& rng, long samples,
                                     bool strict) {
  if (!(target_snr > 0.0) || !(sigma_sq > 0.0)) {
    throw InfeasibleCalibrationError("snr_solve_forcing: target and sigma^2 must be positive");
  }
  if (f.dimension() != g.dimension()) {
    throw DimensionError("snr_solve_forcing: dimension mismatch");
  }
  const int d = f.dimension();
  Eigen::VectorXd x(d);
  double mean = 0.0;
  double m2 = 0.0;  // Welford accumulation of Var(f - g)
  double m4 = 0.0;  // fourth central-moment sum for the SE of the variance
  for (long s = 1; s <= samples; ++s) {
    for (int i = 0; i < d; ++i) x[i] = rng.uniform();
    const double delta = f(x) - g(x);
    const double d1 = delta - mean;
    mean += d1 / static_cast<double>(s);
    const double d2 = delta - mean;
    m2 += d1 * d2;
    m4 += d1 * d1 * d1 * d2;  // coarse; only used for the SE report
  }
  const double var_fg = m2 / static_cast<double>(samples - 1);
  const double fourth = m4 / static_cast<double>(samples);
  // SE of a sample variance: sqrt((mu4 - var^2) / N).
  const double se = std::sqrt(std::max(0.0, fourth - var_fg * var_fg) /
                              static_cast<double>(samples));

  if (!(var_fg > 0.0)) {
    throw InfeasibleCalibrationError("snr_solve_forcing: Var(f - g) is zero");
  }
  ForcingCalibration out;
  out.var_fg = var_fg;
  out.se_var_fg = se;
  out.nu = 1.0 - std::sqrt(target_snr * sigma_sq / var_fg);
  out.nu_in_unit_interval = out.nu > 0.0 && out.nu < 1.0;
  if (strict && !out.nu_in_unit_interval) {
    throw InfeasibleCalibrationError(
        "snr_solve_forcing: target SNR exceeds Var(f - g); nu falls outside (0,1)");
  }
  return out;
}

TrialRecord run_trial(const TrialConfig& config) {
  Rng design_rng(derive_seed(config.seed, {1}));
  const FixedDesign design = FixedDesign::random(config.n, config.d, design_rng);

  Rng hist_rng(derive_seed(config.seed, {2}));
  std::vector<ResponseVector> historical;
  historical.reserve(static_cast<std::size_t>(config.m));
  for (int i = 0; i < config.m; ++i) {
    historical.push_back(
        generate_profile(config.f, design, config.sigma, hist_rng, 1 - config.m + i));
  }
  const HistoricalBank bank = HistoricalBank::build(historical);

  ChartConfig chart_config = config.chart;
  chart_config.seed = derive_seed(config.seed, {5});
  const ControlLimit limit =
      bootstrap_control_limit(bank, chart_config, derive_seed(config.seed, {3}));

  Chart chart(bank, chart_config, limit.u);
  Rng noise_rng(derive_seed(config.seed, {4}));

  TrialRecord record;
  record.tau = config.tau;
  record.seed = config.seed;
  record.control_limit_digest = limit.config_digest;
  record.u = limit.u;

  for (long t = 1;; ++t) {
    const ProfileFunction& fn = (t <= config.tau) ? config.f : config.h;
    const ResponseVector y = generate_profile(fn, design, config.sigma, noise_rng, t);
    const MonitoringOutcome outcome = chart.step(y);
    if (outcome.alarm) {
      if (t <= config.tau) {
        record.false_alarm_times.push_back(t);
        chart.reset();
      } else {
        record.true_alarm_time = t;
        break;
      }
    }
    if (t >= config.tau + config.horizon_after_tau) break;  // censored
  }
  return record;
}

std::optional<long> run_arl0_probe(const TrialConfig& config, long horizon) {
  Rng design_rng(derive_seed(config.seed, {1}));
  const FixedDesign design = FixedDesign::random(config.n, config.d, design_rng);

  Rng hist_rng(derive_seed(config.seed, {2}));
  std::vector<ResponseVector> historical;
  historical.reserve(static_cast<std::size_t>(config.m));
  for (int i = 0; i < config.m; ++i) {
    historical.push_back(
        generate_profile(config.f, design, config.sigma, hist_rng, 1 - config.m + i));
  }
  const HistoricalBank bank = HistoricalBank::build(historical);

  ChartConfig chart_config = config.chart;
  chart_config.seed = derive_seed(config.seed, {5});
  const ControlLimit limit =
      bootstrap_control_limit(bank, chart_config, derive_seed(config.seed, {3}));

  Chart chart(bank, chart_config, limit.u);
  Rng noise_rng(derive_seed(config.seed, {4}));
  for (long t = 1; t <= horizon; ++t) {
    const ResponseVector y = generate_profile(config.f, design, config.sigma, noise_rng, t);
    if (chart.step(y).alarm) return t;
  }
  return std::nullopt;
}

RuntimeSummary runtime_probe(const ProfileFunction& f, int n, int d, int m,
                             const ChartConfig& chart_config, double sigma, int batches,
                             std::uint64_t seed) {
  if (batches < 1) throw DimensionError("runtime_probe: need at least one batch");
  Rng design_rng(derive_seed(seed, {1}));
  const FixedDesign design = FixedDesign::random(n, d, design_rng);
  Rng hist_rng(derive_seed(seed, {2}));
  std::vector<ResponseVector> historical;
  for (int i = 0; i < m; ++i) {
    historical.push_back(generate_profile(f, design, sigma, hist_rng, 1 - m + i));
  }
  const HistoricalBank bank = HistoricalBank::build(historical);
  ChartConfig cfg = chart_config;
  cfg.seed = derive_seed(seed, {5});
  // The limit's value is irrelevant to step cost; avoid alarms entirely.
  Chart chart(bank, cfg, 1e9);

  Rng noise_rng(derive_seed(seed, {4}));
  constexpr int kStepsPerBatch = 100;
  std::vector<ResponseVector> stream;
  stream.reserve(static_cast<std::size_t>(kStepsPerBatch * (batches + 1)));
  for (int i = 0; i < kStepsPerBatch * (batches + 1); ++i) {
    stream.push_back(generate_profile(f, design, sigma, noise_rng, i + 1));
  }

  // Warm-up batch, unclocked.
  std::size_t pos = 0;
  for (int i = 0; i < kStepsPerBatch; ++i) chart.step(stream[pos++]);

  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < kStepsPerBatch; ++i) chart.step(stream[pos++]);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::sort(times.begin(), times.end());
  RuntimeSummary out;
  out.batches = batches;
  out.min_s = times.front();
  out.max_s = times.back();
  out.median_s = times[times.size() / 2];
  return out;
}

std::vector<TrialRecord> run_trials(const std::vector<TrialConfig>& configs, int jobs) {
  std::vector<TrialRecord> records(configs.size());
  if (jobs <= 1 || configs.size() <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) records[i] = run_trial(configs[i]);
    return records;
  }
  std::atomic<std::size_t> next{0};
  const int workers = std::min<int>(jobs, static_cast<int>(configs.size()));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&configs, &records, &next]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= configs.size()) break;
        records[i] = run_trial(configs[i]);
      }
    });
  }
  for (auto& th : threads) th.join();
  return records;
}

void summarize_trials(CellSummary& cell) {
  long n_false = 0;
  for (const auto& rec : cell.trials) {
    n_false += static_cast<long>(rec.false_alarm_times.size());
  }
  cell.n_false_alarms = n_false;
  cell.far = far_estimate(n_false, static_cast<long>(cell.trials.size()));
  try {
    cell.arl1 = arl1_estimate(cell.trials, &cell.censored);
  } catch (const DegenerateDataError&) {
    cell.censored = static_cast<int>(cell.trials.size());
    cell.arl1 = std::numeric_limits<double>::quiet_NaN();
  }
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::vector<CellSummary> run_study1(const Study1Options& options) {
  const auto catalog = table2_catalog();
  const double snrs[2] = {3.0, 5.0};

  std::vector<CellSummary> cells;
  for (std::size_t pair_index = 0; pair_index < catalog.size(); ++pair_index) {
    const auto& [f, g] = catalog[pair_index];

    // Var(f - g) is a property of the pair; estimate it once and reuse
    // across SNR levels and trials.
    Rng mc_rng(derive_seed(options.master_seed, {0xFACE, pair_index}));
    ForcingCalibration base = snr_solve_forcing(f, g, 1.0, options.sigma * options.sigma, mc_rng,
                                                options.mc_samples);

    for (double snr : snrs) {
      CellSummary cell;
      cell.study = "study1";
      cell.cell_id = "pair" + std::to_string(pair_index + 1) + "_snr" + format_double(snr);
      cell.factors = {{"pair", std::to_string(pair_index + 1)},
                      {"snr", format_double(snr)},
                      {"tau", std::to_string(options.tau)},
                      {"n", std::to_string(options.n)},
                      {"m", std::to_string(options.m)},
                      {"w", std::to_string(options.chart.w)}};

      const double nu =
          1.0 - std::sqrt(snr * options.sigma * options.sigma / base.var_fg);
      cell.factors.emplace_back("nu", format_double(nu));
      const ProfileFunction h = ProfileFunction::mixture(nu, f, g);

      std::vector<TrialConfig> configs;
      configs.reserve(static_cast<std::size_t>(options.trials));
      for (int trial = 0; trial < options.trials; ++trial) {
        TrialConfig tc{f,
                       h,
                       options.n,
                       options.d,
                       options.m,
                       options.tau,
                       options.sigma,
                       options.chart,
                       options.horizon_after_tau,
                       derive_seed(options.master_seed,
                                   {0x57D1, pair_index, static_cast<std::uint64_t>(snr),
                                    static_cast<std::uint64_t>(trial)})};
        configs.push_back(std::move(tc));
      }
      cell.trials = run_trials(configs, options.jobs);
      summarize_trials(cell);
      if (options.log) {
        std::ostringstream os;
        os << cell.cell_id << ": FAR=" << cell.far << " ARL1=" << cell.arl1
           << " censored=" << cell.censored;
        options.log(os.str());
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<CellSummary> run_study2(const Study2Options& options) {
  std::vector<CellSummary> cells;
  std::uint64_t cell_index = 0;
  for (long tau_level : options.taus) {
    const long tau = (tau_level == 10000 && !options.full_tau) ? options.tau_large : tau_level;
    for (int n : options.ns) {
      for (int m : options.ms) {
        for (int m_over_w : options.m_over_ws) {
          for (double snr : options.snrs) {
            for (double var_f : options.var_fs) {
              for (double rho : options.rhos) {
                for (Convexity conv : options.convexities) {
                  ++cell_index;
                  const int w = m / m_over_w;
                  CellSummary cell;
                  cell.study = "study2";
                  {
                    std::ostringstream id;
                    id << "tau" << tau_level << "_n" << n << "_m" << m << "_mw" << m_over_w
                       << "_snr" << snr << "_varf" << var_f << "_rho" << rho << "_"
                       << (conv == Convexity::convex ? "convex" : "nonconvex");
                    cell.cell_id = id.str();
                  }
                  cell.factors = {{"tau", std::to_string(tau)},
                                  {"n", std::to_string(n)},
                                  {"m", std::to_string(m)},
                                  {"m_over_w", std::to_string(m_over_w)},
                                  {"w", std::to_string(w)},
                                  {"snr", format_double(snr)},
                                  {"var_f", format_double(var_f)},
                                  {"rho_fh", format_double(rho)},
                                  {"convexity",
                                   conv == Convexity::convex ? "convex" : "nonconvex"},
                                  {"d", std::to_string(options.d)}};

                  Rng cal_rng(derive_seed(options.master_seed, {0xCA1B, cell_index}));
                  CalibrationTarget target{var_f, snr, rho, conv};
                  std::optional<CalibratedPair> pair;
                  try {
                    const ProfileFunction f0 = random_unit_polynomial(options.d, 2, cal_rng);
                    const ProfileFunction h0_star =
                        random_unit_polynomial(options.d, 2, cal_rng);
                    const ProfileFunction h0 = orthogonalize(f0, h0_star);
                    pair = solve_calibration(target, f0, h0);
                  } catch (const InfeasibleCalibrationError& err) {
                    cell.infeasible = true;
                    cell.infeasible_reason = err.what();
                  }

                  if (!cell.infeasible) {
                    cell.population =
                        population_correlations(pair->f, pair->h, options.sigma * options.sigma);
                    cell.factors.emplace_back("nu", format_double(pair->nu));

                    ChartConfig chart = options.chart_base;
                    chart.w = w;
                    std::vector<TrialConfig> configs;
                    configs.reserve(static_cast<std::size_t>(options.trials));
                    for (int trial = 0; trial < options.trials; ++trial) {
                      TrialConfig tc{pair->f,
                                     pair->h,
                                     n,
                                     options.d,
                                     m,
                                     tau,
                                     options.sigma,
                                     chart,
                                     options.horizon_after_tau,
                                     derive_seed(options.master_seed,
                                                 {0x57D2, cell_index,
                                                  static_cast<std::uint64_t>(trial)})};
                      configs.push_back(std::move(tc));
                    }
                    cell.trials = run_trials(configs, options.jobs);
                    summarize_trials(cell);
                  }
                  if (options.log) {
                    std::ostringstream os;
                    os << cell.cell_id;
                    if (cell.infeasible) {
                      os << ": infeasible (" << cell.infeasible_reason << ")";
                    } else {
                      os << ": FAR=" << cell.far << " ARL1=" << cell.arl1
                         << " censored=" << cell.censored;
                    }
                    options.log(os.str());
                  }
                  cells.push_back(std::move(cell));
                }
              }
            }
          }
        }
      }
    }
  }
  return cells;
}

}  // namespace epcc

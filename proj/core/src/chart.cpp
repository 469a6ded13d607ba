#include "epcc/chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace epcc {

std::vector<int> make_K(int w, int l_spacing) {
  if (w < 2) throw DimensionError("make_K: need w >= 2");
  if (l_spacing < 1) throw DimensionError("make_K: need L >= 1");
  std::vector<int> k;
  k.push_back(1);
  const int step = w / l_spacing;
  for (int i = 1; i <= l_spacing - 2; ++i) k.push_back(i * step);
  k.push_back(w - 1);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  std::erase_if(k, [w](int v) { return v < 1 || v > w - 1; });
  return k;
}

std::vector<int> ChartConfig::resolved_k() const {
  if (k_values.empty()) return make_K(w, l_spacing);
  std::vector<int> k = k_values;
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  if (k.empty() || k.front() < 1 || k.back() > w - 1) {
    throw DimensionError("ChartConfig: K must be a nonempty subset of {1, ..., w-1}");
  }
  return k;
}

std::string digest(const ChartConfig& config) {
  char buf[320];
  std::string k_str;
  for (int k : config.resolved_k()) {
    k_str += std::to_string(k);
    k_str += ',';
  }
  std::snprintf(buf, sizeof(buf), "w=%d;K=%s;zeta=%.17g;c=%.17g;N=%d;N0=%d;max_iter=%d",
                config.w, k_str.c_str(), config.zeta, config.c, config.n_bootstrap,
                config.n_pool, config.resolved_max_iter());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

double normal_upper_quantile(double c) {
  if (!(c > 0.0 && c < 1.0)) throw DimensionError("normal_upper_quantile: c must be in (0,1)");
  const auto upper_tail = [](double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); };
  double lo = -45.0, hi = 45.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (upper_tail(mid) > c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// Correlation matrix machinery shared by the bootstrap replicates: all
// profiles live in one centered pool, so every entry is a cached dot.
double pool_corr(const std::vector<Eigen::VectorXd>& centered, const std::vector<double>& norms,
                 int a, int b) {
  return centered[static_cast<std::size_t>(a)].dot(centered[static_cast<std::size_t>(b)]) /
         (norms[static_cast<std::size_t>(a)] * norms[static_cast<std::size_t>(b)]);
}

}  // namespace

ControlLimit bootstrap_control_limit(const HistoricalBank& bank, const ChartConfig& config,
                                     std::uint64_t seed) {
  if (!(bank.sigma_hat_sq() > 0.0)) {
    throw DegenerateDataError("bootstrap_control_limit: sigma_hat^2 = 0 (degenerate bank)");
  }
  const std::vector<int> k_set = config.resolved_k();
  const int w = config.w;
  const int n = bank.n();
  const int n_rep = config.n_bootstrap;
  const int n_pool = config.n_pool;
  if (n_rep < 2) throw DimensionError("bootstrap_control_limit: need N >= 2");
  if (n_pool < w + k_set.back()) {
    throw DimensionError("bootstrap_control_limit: need N0 >= w + max(K)");
  }

  const double sigma_hat = std::sqrt(bank.sigma_hat_sq());
  Rng pool_rng(derive_seed(seed, {0xB00757A9ULL}));
  std::vector<Eigen::VectorXd> centered(static_cast<std::size_t>(n_pool));
  std::vector<double> norms(static_cast<std::size_t>(n_pool));
  for (int s = 0; s < n_pool; ++s) {
    Eigen::VectorXd y = bank.f_hat();
    for (int i = 0; i < n; ++i) y[i] += sigma_hat * pool_rng.normal();
    Eigen::VectorXd c = y.array() - y.mean();
    const double norm_sq = c.squaredNorm();
    if (!(norm_sq > 0.0)) {
      throw DegenerateDataError("bootstrap_control_limit: degenerate bootstrap response");
    }
    centered[static_cast<std::size_t>(s)] = std::move(c);
    norms[static_cast<std::size_t>(s)] = std::sqrt(norm_sq);
  }

  const Eigen::VectorXd v_ref =
      Eigen::VectorXd::Constant(w, 1.0 / std::sqrt(static_cast<double>(w)));
  const int max_iter = config.resolved_max_iter();

  Eigen::MatrixXd r_l(w, w);
  Eigen::MatrixXd r_k(w, w);
  std::vector<double> stats(static_cast<std::size_t>(n_rep));
  for (int l = 0; l < n_rep; ++l) {
    Rng rng_l(derive_seed(seed, {0xB0075EED, static_cast<std::uint64_t>(l)}));
    const std::vector<int> idx = sample_without_replacement(n_pool, w, rng_l);
    for (int a = 0; a < w; ++a) {
      r_l(a, a) = 1.0;
      for (int b = a + 1; b < w; ++b) {
        const double r = pool_corr(centered, norms, idx[static_cast<std::size_t>(a)],
                                   idx[static_cast<std::size_t>(b)]);
        r_l(a, b) = r;
        r_l(b, a) = r;
      }
    }

    double s_max = 0.0;
    for (int k1 : k_set) {
      const std::vector<int> sub =
          sample_without_replacement_excluding(n_pool, k1, idx, rng_l);
      r_k.bottomRightCorner(w - k1, w - k1) = r_l.bottomRightCorner(w - k1, w - k1);
      for (int a = 0; a < k1; ++a) {
        r_k(a, a) = 1.0;
        for (int b = a + 1; b < k1; ++b) {
          const double r = pool_corr(centered, norms, sub[static_cast<std::size_t>(a)],
                                     sub[static_cast<std::size_t>(b)]);
          r_k(a, b) = r;
          r_k(b, a) = r;
        }
        for (int b = k1; b < w; ++b) {
          const double r = pool_corr(centered, norms, sub[static_cast<std::size_t>(a)],
                                     idx[static_cast<std::size_t>(b)]);
          r_k(a, b) = r;
          r_k(b, a) = r;
        }
      }
      const EigenResult res = power_iteration_detector(r_k, v_ref, config.zeta, max_iter, rng_l);
      s_max = std::max(s_max, perturbation_statistic(res.q));
    }
    stats[static_cast<std::size_t>(l)] = s_max;
  }

  double mu = 0.0;
  for (double s : stats) mu += s;
  mu /= static_cast<double>(n_rep);
  double ss = 0.0;
  for (double s : stats) ss += (s - mu) * (s - mu);
  const double sd = std::sqrt(ss / static_cast<double>(n_rep - 1));

  ControlLimit limit;
  limit.mu_s = mu;
  limit.sd_s = sd;
  limit.c = config.c;
  limit.seed = seed;
  limit.config_digest = digest(config);
  if (sd == 0.0) {
    // All bootstrap statistics identical; callers should treat sd_s = 0
    // as a warning sign.
    limit.u = mu + 1e-12;
  } else {
    limit.u = mu + sd * normal_upper_quantile(config.c);
  }
  return limit;
}

Chart::Chart(const HistoricalBank& bank, const ChartConfig& config, double u)
    : bank_(&bank),
      config_(config),
      u_(u),
      k_set_(config.resolved_k()),
      v_ref_(Eigen::VectorXd::Constant(config.w,
                                       1.0 / std::sqrt(static_cast<double>(config.w)))),
      window_(CorrelationWindow::init(bank, config.w)) {}

MonitoringOutcome Chart::step(const ResponseVector& y) {
  window_.push(y);
  const long t = window_.time();

  MonitoringOutcome outcome;
  outcome.t = t;
  outcome.per_k1.reserve(k_set_.size());
  const int max_iter = config_.resolved_max_iter();
  for (int k1 : k_set_) {
    Rng rng_k(derive_seed(config_.seed,
                          {0x57E9u, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k1)}));
    const std::vector<int> idx =
        sample_replacement_indices(t, config_.w, k1, bank_->m(), rng_k);
    const SubstitutedMatrix sub = substitute(window_, *bank_, k1, idx);
    const EigenResult res =
        power_iteration_detector(sub.rk, v_ref_, config_.zeta, max_iter, rng_k);
    const double stat = perturbation_statistic(res.q);
    outcome.per_k1.push_back(PerK1{k1, stat, res.exit_reason});
    if (outcome.per_k1.size() == 1 || stat > outcome.statistic) {
      outcome.statistic = stat;
      outcome.argmax_k1 = k1;
    }
  }
  outcome.alarm = outcome.statistic > u_;
  return outcome;
}

void Chart::reset() { window_ = CorrelationWindow::init(*bank_, config_.w); }

RunLog run_chart(Chart& chart, const std::vector<ResponseVector>& stream) {
  std::size_t pos = 0;
  return run_chart(chart, [&stream, &pos]() -> std::optional<ResponseVector> {
    if (pos >= stream.size()) return std::nullopt;
    return stream[pos++];
  });
}

RunLog run_chart(Chart& chart, const std::function<std::optional<ResponseVector>()>& next) {
  RunLog log;
  while (true) {
    std::optional<ResponseVector> y = next();
    if (!y) break;
    MonitoringOutcome outcome = chart.step(*y);
    const bool alarm = outcome.alarm;
    const long t = outcome.t;
    log.outcomes.push_back(std::move(outcome));
    if (alarm) {
      log.alarm_time = t;
      break;
    }
  }
  return log;
}

}  // namespace epcc

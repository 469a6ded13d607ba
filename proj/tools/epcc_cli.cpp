// epcc: eigenvector perturbation control chart tools.
//
// Verbs: calibrate (bootstrap a control limit from historical profiles),
// monitor (stream profiles against a limit), simulate (batch studies),
// profile-gen (emit synthetic streams), report (aggregate trial CSVs),
// replay (re-execute a run from its manifest).
//
// Exit codes: 0 success / clean end of stream, 1 I/O or schema error,
// 2 degenerate data, 3 alarm raised while monitoring.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "epcc/io.hpp"

namespace {

using epcc::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitAlarm = 3;

void print_error_json(const std::string& message) {
  json err{{"error", message}};
  std::cerr << err.dump() << std::endl;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag_seed, std::uint64_t fallback) {
  // Flag wins over environment, environment over the stored/default value.
  if (flag_seed) return *flag_seed;
  if (const char* env = std::getenv("EPCC_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return fallback;
}

epcc::ChartConfig chart_config_from_args(const json& args) {
  epcc::ChartConfig config;
  config.w = args.value("w", config.w);
  config.l_spacing = args.value("L", config.l_spacing);
  if (args.contains("K") && !args.at("K").empty()) {
    config.k_values = args.at("K").get<std::vector<int>>();
  }
  config.zeta = args.value("zeta", config.zeta);
  config.c = args.value("c", config.c);
  config.n_bootstrap = args.value("N", config.n_bootstrap);
  config.n_pool = args.value("N0", config.n_pool);
  config.max_iter = args.value("max_iter", 0);
  return config;
}

void write_manifest(const std::string& command, const json& args, std::uint64_t seed,
                    const std::string& path) {
  epcc::write_text_file(path, epcc::make_manifest(command, args, seed).dump(2) + "\n");
}

// ---- calibrate ---------------------------------------------------------

int run_calibrate(const json& args) {
  const std::string historical_path = args.at("historical").get<std::string>();
  const std::string out_path = args.at("out").get<std::string>();
  const std::uint64_t seed = args.at("seed").get<std::uint64_t>();

  std::vector<epcc::ResponseVector> historical;
  try {
    historical = epcc::read_profiles_file(historical_path);
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  if (historical.size() < 2) {
    print_error_json("insufficient historical profiles (need at least 2)");
    return kExitDegenerate;
  }

  epcc::ChartConfig config = chart_config_from_args(args);
  config.seed = seed;
  try {
    const auto bank = epcc::HistoricalBank::build(historical);
    const auto limit = epcc::bootstrap_control_limit(bank, config, seed);
    if (limit.sd_s == 0.0) {
      print_error_json("warning: bootstrap statistics are all identical (sd_S = 0)");
    }
    json out = epcc::to_json(limit);
    out["config"] = epcc::to_json(config);
    epcc::write_text_file(out_path, out.dump(2) + "\n");
    write_manifest("calibrate", args, seed, out_path + ".manifest.json");
  } catch (const epcc::DegenerateDataError& err) {
    print_error_json(err.what());
    return kExitDegenerate;
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  return kExitOk;
}

// ---- monitor -----------------------------------------------------------

int run_monitor(const json& args) {
  const std::string historical_path = args.at("historical").get<std::string>();
  const std::string limit_path = args.at("limit").get<std::string>();
  const std::string stream_path = args.at("stream").get<std::string>();
  const std::string out_path = args.value("out", std::string{});

  try {
    const auto historical = epcc::read_profiles_file(historical_path);
    if (historical.size() < 2) {
      print_error_json("insufficient historical profiles (need at least 2)");
      return kExitDegenerate;
    }
    const auto bank = epcc::HistoricalBank::build(historical);

    const json limit_json = json::parse(epcc::read_text_file(limit_path));
    const auto limit = epcc::control_limit_from_json(limit_json);
    epcc::ChartConfig config = epcc::chart_config_from_json(limit_json.at("config"));
    if (epcc::digest(config) != limit.config_digest) {
      print_error_json("control limit digest does not match its stored config");
      return kExitError;
    }
    config.seed = limit.seed;

    std::ifstream stream_file;
    std::istream* stream_in = &std::cin;
    if (stream_path != "-") {
      stream_file.open(stream_path);
      if (!stream_file) {
        print_error_json("cannot open stream '" + stream_path + "'");
        return kExitError;
      }
      stream_in = &stream_file;
    }

    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
      out_file.open(out_path);
      if (!out_file) {
        print_error_json("cannot write '" + out_path + "'");
        return kExitError;
      }
      out = &out_file;
    }

    epcc::Chart chart(bank, config, limit.u);
    epcc::ProfileStreamReader reader(*stream_in);
    while (true) {
      std::optional<epcc::ResponseVector> y;
      try {
        y = reader.next();
      } catch (const std::exception& err) {
        print_error_json(err.what());
        return kExitError;
      }
      if (!y) break;
      if (y->y.size() != bank.n()) {
        print_error_json("row " + std::to_string(reader.rows_read()) + " has " +
                         std::to_string(y->y.size()) + " values, expected " +
                         std::to_string(bank.n()));
        return kExitError;
      }
      const auto outcome = chart.step(*y);
      epcc::write_outcome_ndjson(*out, outcome);
      if (outcome.alarm) return kExitAlarm;
    }
  } catch (const epcc::DegenerateDataError& err) {
    print_error_json(err.what());
    return kExitDegenerate;
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  return kExitOk;
}

// ---- simulate ----------------------------------------------------------

std::vector<epcc::Convexity> parse_convexities(const std::vector<std::string>& names) {
  std::vector<epcc::Convexity> out;
  for (const auto& name : names) {
    if (name == "convex") {
      out.push_back(epcc::Convexity::convex);
    } else if (name == "nonconvex") {
      out.push_back(epcc::Convexity::nonconvex);
    } else {
      throw epcc::Error("unknown convexity '" + name + "'");
    }
  }
  return out;
}

void write_study_outputs(const std::string& out_dir, const std::vector<epcc::CellSummary>& cells) {
  {
    std::ofstream trials(out_dir + "/trials.csv");
    if (!trials) throw epcc::Error("cannot write trials.csv in '" + out_dir + "'");
    epcc::write_trials_csv(trials, cells);
  }
  epcc::write_text_file(out_dir + "/cells.json", epcc::cells_to_json(cells).dump(2) + "\n");
  {
    std::ofstream f(out_dir + "/fig2_population_correlations.csv");
    epcc::write_population_correlations_csv(f, cells);
  }
  {
    std::ofstream f(out_dir + "/fig3_far.csv");
    epcc::write_far_csv(f, cells);
  }
  {
    std::ofstream f(out_dir + "/fig4_arl1.csv");
    epcc::write_arl1_csv(f, cells);
  }
}

int run_simulate(const json& args) {
  const std::string study = args.at("study").get<std::string>();
  const std::string out_dir = args.at("out_dir").get<std::string>();
  const std::uint64_t seed = args.at("seed").get<std::uint64_t>();
  const bool quiet = args.value("quiet", false);

  epcc::LogFn log;
  if (!quiet) {
    log = [](const std::string& line) { std::cerr << line << std::endl; };
  }

  try {
    std::vector<epcc::CellSummary> cells;
    if (study == "study1") {
      epcc::Study1Options options;
      options.trials = args.value("trials", options.trials);
      options.n = args.value("n", options.n);
      options.m = args.value("m", options.m);
      options.d = args.value("d", options.d);
      options.tau = args.value("tau", options.tau);
      options.chart = chart_config_from_args(args);
      options.mc_samples = args.value("mc_samples", options.mc_samples);
      options.horizon_after_tau = args.value("horizon", options.horizon_after_tau);
      options.master_seed = seed;
      options.jobs = args.value("jobs", 1);
      options.log = log;
      cells = epcc::run_study1(options);
    } else if (study == "study2" || study == "custom") {
      epcc::Study2Options options;
      options.trials = args.value("trials", options.trials);
      options.d = args.value("d", 25);
      if (args.contains("taus")) options.taus = args.at("taus").get<std::vector<long>>();
      if (args.contains("ns")) options.ns = args.at("ns").get<std::vector<int>>();
      if (args.contains("ms")) options.ms = args.at("ms").get<std::vector<int>>();
      if (args.contains("mws")) options.m_over_ws = args.at("mws").get<std::vector<int>>();
      if (args.contains("snrs")) options.snrs = args.at("snrs").get<std::vector<double>>();
      if (args.contains("varfs")) options.var_fs = args.at("varfs").get<std::vector<double>>();
      if (args.contains("rhos")) options.rhos = args.at("rhos").get<std::vector<double>>();
      if (args.contains("convexities")) {
        options.convexities =
            parse_convexities(args.at("convexities").get<std::vector<std::string>>());
      }
      options.tau_large = args.value("tau_large", options.tau_large);
      options.full_tau = args.value("full_tau", false);
      options.chart_base = chart_config_from_args(args);
      options.horizon_after_tau = args.value("horizon", options.horizon_after_tau);
      options.master_seed = seed;
      options.jobs = args.value("jobs", 1);
      options.log = log;
      if (study == "custom" && !args.contains("taus")) {
        throw epcc::Error("custom study requires explicit factor lists (at least --taus)");
      }
      cells = epcc::run_study2(options);
    } else {
      print_error_json("unknown study '" + study + "'");
      return kExitError;
    }
    write_study_outputs(out_dir, cells);
    write_manifest("simulate", args, seed, out_dir + "/manifest.json");
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  return kExitOk;
}

// ---- profile-gen ---------------------------------------------------------

int run_profile_gen(const json& args) {
  const std::uint64_t seed = args.at("seed").get<std::uint64_t>();
  try {
    const auto fn = epcc::profile_function_from_json(json::parse(
        epcc::read_text_file(args.at("fn").get<std::string>())));
    std::optional<epcc::ProfileFunction> ooc;
    if (args.contains("ooc") && !args.at("ooc").get<std::string>().empty()) {
      ooc = epcc::profile_function_from_json(
          json::parse(epcc::read_text_file(args.at("ooc").get<std::string>())));
    }
    const int n = args.at("n").get<int>();
    const int d = args.value("d", fn.dimension());
    const double sigma = args.value("sigma", 1.0);
    const long steps = args.at("steps").get<long>();
    const long tau = args.value("tau", steps);
    const int m = args.value("m", 0);
    if (d != fn.dimension()) throw epcc::DimensionError("d does not match the function");

    epcc::Rng design_rng(epcc::derive_seed(seed, {1}));
    const auto design = epcc::FixedDesign::random(n, d, design_rng);

    if (m > 0) {
      epcc::Rng hist_rng(epcc::derive_seed(seed, {2}));
      std::vector<epcc::ResponseVector> historical;
      for (int i = 0; i < m; ++i) {
        historical.push_back(epcc::generate_profile(fn, design, sigma, hist_rng, 1 - m + i));
      }
      std::ofstream h(args.at("historical_out").get<std::string>());
      if (!h) throw epcc::Error("cannot write historical output");
      epcc::write_profiles_csv(h, historical);
    }

    epcc::Rng noise_rng(epcc::derive_seed(seed, {4}));
    std::vector<epcc::ResponseVector> stream;
    for (long t = 1; t <= steps; ++t) {
      const epcc::ProfileFunction& active = (ooc && t > tau) ? *ooc : fn;
      stream.push_back(epcc::generate_profile(active, design, sigma, noise_rng, t));
    }
    const std::string out_path = args.at("out").get<std::string>();
    std::ofstream out(out_path);
    if (!out) throw epcc::Error("cannot write '" + out_path + "'");
    epcc::write_profiles_csv(out, stream);
    write_manifest("profile-gen", args, seed, out_path + ".manifest.json");
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  return kExitOk;
}

// ---- report -------------------------------------------------------------

struct TrialRow {
  std::string cell_id;
  long tau = 0;
  std::optional<long> true_alarm_time;
  long n_false_alarms = 0;
};

int run_report(const json& args) {
  const std::vector<std::string> inputs = args.at("inputs").get<std::vector<std::string>>();
  const std::string out_path = args.at("out").get<std::string>();
  try {
    std::map<std::string, std::vector<TrialRow>> by_cell;
    for (const auto& path : inputs) {
      std::ifstream in(path);
      if (!in) throw epcc::Error("cannot open '" + path + "'");
      std::string header;
      if (!std::getline(in, header)) throw epcc::Error("empty trials file '" + path + "'");
      std::vector<std::string> cols;
      {
        std::stringstream hs(header);
        std::string col;
        while (std::getline(hs, col, ',')) cols.push_back(col);
      }
      const auto col_index = [&cols, &path](const std::string& name) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
          if (cols[i] == name) return i;
        }
        throw epcc::Error("missing column '" + name + "' in '" + path + "'");
      };
      const std::size_t id_col = col_index("cell_id");
      const std::size_t tau_col = col_index("tau");
      const std::size_t alarm_col = col_index("true_alarm_time");
      const std::size_t false_col = col_index("n_false_alarms");

      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() < cols.size()) fields.resize(cols.size());
        TrialRow row;
        row.cell_id = fields[id_col];
        row.tau = std::stol(fields[tau_col]);
        if (!fields[alarm_col].empty()) row.true_alarm_time = std::stol(fields[alarm_col]);
        row.n_false_alarms = std::stol(fields[false_col]);
        by_cell[row.cell_id].push_back(row);
      }
    }

    std::ofstream out(out_path);
    if (!out) throw epcc::Error("cannot write '" + out_path + "'");
    out << "cell_id,trials,far,arl1,censored\n";
    for (const auto& [cell_id, rows] : by_cell) {
      long n_false = 0;
      long censored = 0;
      double arl1_sum = 0.0;
      long arl1_count = 0;
      for (const auto& row : rows) {
        n_false += row.n_false_alarms;
        if (row.true_alarm_time) {
          arl1_sum += static_cast<double>(*row.true_alarm_time - row.tau);
          ++arl1_count;
        } else {
          ++censored;
        }
      }
      out << cell_id << ',' << rows.size() << ','
          << epcc::far_estimate(n_false, static_cast<long>(rows.size())) << ',';
      if (arl1_count > 0) out << arl1_sum / static_cast<double>(arl1_count);
      out << ',' << censored << '\n';
    }
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
  return kExitOk;
}

// ---- replay -------------------------------------------------------------

int dispatch(const std::string& command, const json& args);

int run_replay(const json& args) {
  try {
    const json manifest = json::parse(epcc::read_text_file(args.at("manifest").get<std::string>()));
    return dispatch(manifest.at("command").get<std::string>(), manifest.at("args"));
  } catch (const std::exception& err) {
    print_error_json(err.what());
    return kExitError;
  }
}

int dispatch(const std::string& command, const json& args) {
  if (command == "calibrate") return run_calibrate(args);
  if (command == "monitor") return run_monitor(args);
  if (command == "simulate") return run_simulate(args);
  if (command == "profile-gen") return run_profile_gen(args);
  if (command == "report") return run_report(args);
  print_error_json("unknown command '" + command + "'");
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "epcc: eigenvector perturbation control chart for nonparametric profile monitoring.\n"
      "File formats are documented in FORMATS.md."};
  app.require_subcommand(1);

  // Shared chart options.
  int w = 10, l_spacing = 5, n_bootstrap = 1000, n_pool = 5000, max_iter = 0;
  double zeta = 1e-3, tail_c = 1e-14;
  std::vector<int> k_values;
  std::optional<std::uint64_t> seed_flag;

  const auto add_chart_options = [&](CLI::App* cmd) {
    cmd->add_option("--w", w, "Window size")->capture_default_str();
    cmd->add_option("--L", l_spacing, "Number of evenly spaced k1 values")->capture_default_str();
    cmd->add_option("--K", k_values, "Explicit k1 values (overrides --L)");
    cmd->add_option("--zeta", zeta, "Power iteration tolerance")->capture_default_str();
    cmd->add_option("--c", tail_c, "Control limit tail mass")->capture_default_str();
    cmd->add_option("--N", n_bootstrap, "Bootstrap statistic count")->capture_default_str();
    cmd->add_option("--N0", n_pool, "Bootstrap profile pool size")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "Power iteration cap (0 = 10w + 100)");
  };
  const auto chart_args_json = [&](json& args) {
    args["w"] = w;
    args["L"] = l_spacing;
    if (!k_values.empty()) args["K"] = k_values;
    args["zeta"] = zeta;
    args["c"] = tail_c;
    args["N"] = n_bootstrap;
    args["N0"] = n_pool;
    args["max_iter"] = max_iter;
  };

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Bootstrap a control limit from historical in-control profiles (CSV/NDJSON)");
  std::string cal_historical, cal_out = "control_limit.json";
  calibrate->add_option("--historical", cal_historical, "Historical profiles, one per row")
      ->required();
  calibrate->add_option("--out", cal_out, "Control limit JSON path")->capture_default_str();
  add_chart_options(calibrate);
  calibrate->add_option("--seed", seed_flag, "Master seed (overrides EPCC_SEED)");

  // monitor
  auto* monitor = app.add_subcommand(
      "monitor", "Stream profiles against a calibrated limit; NDJSON per step, exit 3 on alarm");
  std::string mon_historical, mon_limit, mon_stream = "-", mon_out;
  monitor->add_option("--historical", mon_historical, "Historical profiles")->required();
  monitor->add_option("--limit", mon_limit, "Control limit JSON from calibrate")->required();
  monitor->add_option("--stream", mon_stream, "Profile stream file, or - for stdin")
      ->capture_default_str();
  monitor->add_option("--out", mon_out, "NDJSON output path (default stdout)");

  // simulate
  auto* simulate =
      app.add_subcommand("simulate", "Run a batch study; tidy CSV + JSON summaries per cell");
  std::string sim_study, sim_out_dir = ".";
  int sim_trials = 100, sim_jobs = 1, sim_n = 256, sim_m = 20, sim_d = -1;
  long sim_tau = 30, sim_tau_large = 1000, sim_horizon = 100000, sim_mc = 10000000;
  bool sim_full_tau = false, sim_quiet = false;
  std::vector<long> sim_taus;
  std::vector<int> sim_ns, sim_ms, sim_mws;
  std::vector<double> sim_snrs, sim_varfs, sim_rhos;
  std::vector<std::string> sim_convexities;
  simulate->add_option("--study", sim_study, "study1, study2, or custom")->required();
  simulate->add_option("--out-dir", sim_out_dir, "Output directory")->capture_default_str();
  simulate->add_option("--trials", sim_trials, "Trials per cell")->capture_default_str();
  simulate->add_option("--jobs", sim_jobs, "Parallel trial workers")->capture_default_str();
  simulate->add_option("--n", sim_n, "Design points per profile (study1)");
  simulate->add_option("--m", sim_m, "Historical profiles (study1)");
  simulate->add_option("--d", sim_d, "Predictor dimension (study1: 3, study2: 25)");
  simulate->add_option("--tau", sim_tau, "Change point (study1)");
  simulate->add_option("--mc-samples", sim_mc, "Monte Carlo samples for forcing calibration");
  simulate->add_option("--taus", sim_taus, "study2 tau levels");
  simulate->add_option("--ns", sim_ns, "study2 n levels");
  simulate->add_option("--ms", sim_ms, "study2 m levels");
  simulate->add_option("--mws", sim_mws, "study2 m/w levels");
  simulate->add_option("--snrs", sim_snrs, "study2 SNR levels");
  simulate->add_option("--varfs", sim_varfs, "study2 Var(f) levels");
  simulate->add_option("--rhos", sim_rhos, "study2 rho(f,h) levels");
  simulate->add_option("--convexities", sim_convexities, "study2 convexity levels");
  simulate->add_option("--tau-large", sim_tau_large,
                       "Replacement for the tau = 10^4 level at desk scale");
  simulate->add_flag("--full-tau", sim_full_tau, "Run the full tau = 10^4 level");
  simulate->add_option("--horizon", sim_horizon, "Censoring horizon after tau");
  simulate->add_flag("--quiet", sim_quiet, "Suppress per-cell progress on stderr");
  add_chart_options(simulate);
  simulate->add_option("--seed", seed_flag, "Master seed (overrides EPCC_SEED)");

  // profile-gen
  auto* profile_gen = app.add_subcommand(
      "profile-gen", "Emit a synthetic profile stream from a function manifest (JSON)");
  std::string gen_fn, gen_ooc, gen_out = "stream.csv", gen_historical_out = "historical.csv";
  int gen_n = 256, gen_m = 0;
  long gen_steps = 100, gen_tau = -1;
  double gen_sigma = 1.0;
  profile_gen->add_option("--fn", gen_fn, "In-control function JSON")->required();
  profile_gen->add_option("--ooc", gen_ooc, "Out-of-control function JSON (used after --tau)");
  profile_gen->add_option("--tau", gen_tau, "Last in-control step (default: whole stream)");
  profile_gen->add_option("--n", gen_n, "Design points")->capture_default_str();
  profile_gen->add_option("--m", gen_m, "Also emit m historical profiles");
  profile_gen->add_option("--sigma", gen_sigma, "Noise standard deviation")->capture_default_str();
  profile_gen->add_option("--steps", gen_steps, "Stream length")->capture_default_str();
  profile_gen->add_option("--out", gen_out, "Stream CSV path")->capture_default_str();
  profile_gen->add_option("--historical-out", gen_historical_out, "Historical CSV path")
      ->capture_default_str();
  profile_gen->add_option("--seed", seed_flag, "Master seed (overrides EPCC_SEED)");

  // report
  auto* report = app.add_subcommand("report", "Aggregate per-trial CSVs into per-cell estimates");
  std::vector<std::string> rep_inputs;
  std::string rep_out = "report.csv";
  report->add_option("--trials", rep_inputs, "trials.csv files")->required();
  report->add_option("--out", rep_out, "Aggregated CSV path")->capture_default_str();

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute a run from its manifest");
  std::string replay_manifest;
  replay->add_option("--manifest", replay_manifest, "Manifest JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  if (calibrate->parsed()) {
    json args{{"historical", cal_historical}, {"out", cal_out}};
    chart_args_json(args);
    args["seed"] = resolve_seed(seed_flag, 0);
    return dispatch("calibrate", args);
  }
  if (monitor->parsed()) {
    json args{{"historical", mon_historical},
              {"limit", mon_limit},
              {"stream", mon_stream},
              {"out", mon_out}};
    return dispatch("monitor", args);
  }
  if (simulate->parsed()) {
    json args{{"study", sim_study},   {"out_dir", sim_out_dir}, {"trials", sim_trials},
              {"jobs", sim_jobs},     {"n", sim_n},             {"m", sim_m},
              {"tau", sim_tau},       {"mc_samples", sim_mc},   {"tau_large", sim_tau_large},
              {"full_tau", sim_full_tau}, {"horizon", sim_horizon}, {"quiet", sim_quiet}};
    if (sim_d > 0) args["d"] = sim_d;
    if (!sim_taus.empty()) args["taus"] = sim_taus;
    if (!sim_ns.empty()) args["ns"] = sim_ns;
    if (!sim_ms.empty()) args["ms"] = sim_ms;
    if (!sim_mws.empty()) args["mws"] = sim_mws;
    if (!sim_snrs.empty()) args["snrs"] = sim_snrs;
    if (!sim_varfs.empty()) args["varfs"] = sim_varfs;
    if (!sim_rhos.empty()) args["rhos"] = sim_rhos;
    if (!sim_convexities.empty()) args["convexities"] = sim_convexities;
    chart_args_json(args);
    args["seed"] = resolve_seed(seed_flag, 1);
    return dispatch("simulate", args);
  }
  if (profile_gen->parsed()) {
    json args{{"fn", gen_fn},       {"n", gen_n},     {"sigma", gen_sigma},
              {"steps", gen_steps}, {"out", gen_out}, {"m", gen_m},
              {"historical_out", gen_historical_out}};
    if (!gen_ooc.empty()) args["ooc"] = gen_ooc;
    if (gen_tau >= 0) args["tau"] = gen_tau;
    args["seed"] = resolve_seed(seed_flag, 2);
    return dispatch("profile-gen", args);
  }
  if (report->parsed()) {
    json args{{"inputs", rep_inputs}, {"out", rep_out}};
    return dispatch("report", args);
  }
  if (replay->parsed()) {
    return run_replay(json{{"manifest", replay_manifest}});
  }
  return kExitError;
}

#include "epcc/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace epcc {

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  if (rows == 0) throw DimensionError("matrix_from_json: empty matrix");
  const auto cols = j.at(0).size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw DimensionError("matrix_from_json: ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j.at(i).at(c).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return v;
}

}  // namespace

json to_json(const ProfileFunction& fn) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ProfileFunction::Linear>) {
          return json{{"type", "linear"}, {"coeffs", vector_to_json(f.coeffs)},
                      {"intercept", f.intercept}};
        } else if constexpr (std::is_same_v<T, ProfileFunction::Quadratic>) {
          return json{{"type", "quadratic"}, {"matrix", matrix_to_json(f.matrix)},
                      {"coeffs", vector_to_json(f.coeffs)}};
        } else if constexpr (std::is_same_v<T, ProfileFunction::ForcingSin>) {
          return json{{"type", "forcing_sin"}, {"scale", f.scale}, {"dim", f.dim}};
        } else if constexpr (std::is_same_v<T, ProfileFunction::ForcingRidge>) {
          return json{{"type", "forcing_ridge"}, {"scale", f.scale}, {"dim", f.dim}};
        } else {
          return json{{"type", "mixture"}, {"nu", f.nu}, {"left", to_json(*f.left)},
                      {"right", to_json(*f.right)}};
        }
      },
      fn.variant());
}

ProfileFunction profile_function_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "linear") {
    return ProfileFunction::linear(vector_from_json(j.at("coeffs")),
                                   j.value("intercept", 0.0));
  }
  if (type == "quadratic") {
    return ProfileFunction::quadratic(matrix_from_json(j.at("matrix")),
                                      vector_from_json(j.at("coeffs")));
  }
  if (type == "forcing_sin") {
    return ProfileFunction::forcing_sin(j.value("scale", 1.0), j.value("dim", 3));
  }
  if (type == "forcing_ridge") {
    return ProfileFunction::forcing_ridge(j.value("scale", 1.0), j.value("dim", 3));
  }
  if (type == "mixture") {
    return ProfileFunction::mixture(j.at("nu").get<double>(),
                                    profile_function_from_json(j.at("left")),
                                    profile_function_from_json(j.at("right")));
  }
  throw DimensionError("profile_function_from_json: unknown type '" + type + "'");
}

json to_json(const ChartConfig& config) {
  return json{{"w", config.w},
              {"L", config.l_spacing},
              {"K", config.resolved_k()},
              {"zeta", config.zeta},
              {"c", config.c},
              {"N", config.n_bootstrap},
              {"N0", config.n_pool},
              {"max_iter", config.resolved_max_iter()},
              {"seed", config.seed}};
}

ChartConfig chart_config_from_json(const json& j) {
  ChartConfig config;
  config.w = j.value("w", config.w);
  config.l_spacing = j.value("L", config.l_spacing);
  if (j.contains("K")) config.k_values = j.at("K").get<std::vector<int>>();
  config.zeta = j.value("zeta", config.zeta);
  config.c = j.value("c", config.c);
  config.n_bootstrap = j.value("N", config.n_bootstrap);
  config.n_pool = j.value("N0", config.n_pool);
  config.max_iter = j.value("max_iter", 0);
  config.seed = j.value("seed", config.seed);
  return config;
}

json to_json(const ControlLimit& limit) {
  return json{{"u", limit.u},       {"mu_s", limit.mu_s},
              {"sd_s", limit.sd_s}, {"c", limit.c},
              {"config_digest", limit.config_digest}, {"seed", limit.seed}};
}

ControlLimit control_limit_from_json(const json& j) {
  ControlLimit limit;
  limit.u = j.at("u").get<double>();
  limit.mu_s = j.at("mu_s").get<double>();
  limit.sd_s = j.at("sd_s").get<double>();
  limit.c = j.at("c").get<double>();
  limit.config_digest = j.value("config_digest", "");
  limit.seed = j.value("seed", std::uint64_t{0});
  return limit;
}

json to_json(const CalibratedPair& pair) {
  return json{{"f", to_json(pair.f)},   {"h", to_json(pair.h)},
              {"f0", to_json(pair.f0)}, {"h0", to_json(pair.h0)},
              {"nu", pair.nu},          {"c_f", pair.c_f},
              {"c_h", pair.c_h}};
}

CalibratedPair calibrated_pair_from_json(const json& j) {
  return CalibratedPair{profile_function_from_json(j.at("f")),
                        profile_function_from_json(j.at("h")),
                        profile_function_from_json(j.at("f0")),
                        profile_function_from_json(j.at("h0")),
                        j.at("nu").get<double>(),
                        j.at("c_f").get<double>(),
                        j.at("c_h").get<double>()};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

bool parse_csv_row(const std::string& line, Eigen::VectorXd& out) {
  std::vector<double> values;
  const char* p = line.data();
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    const char* field_end = p;
    while (field_end < end && *field_end != ',') ++field_end;
    const char* num_end = field_end;
    while (num_end > p && (num_end[-1] == ' ' || num_end[-1] == '\t' || num_end[-1] == '\r')) {
      --num_end;
    }
    double v = 0.0;
    const auto result = std::from_chars(p, num_end, v);
    if (result.ec != std::errc{} || result.ptr != num_end || num_end == p) return false;
    values.push_back(v);
    p = (field_end < end) ? field_end + 1 : end;
  }
  if (values.empty()) return false;
  out = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return true;
}

}  // namespace

std::optional<ResponseVector> ProfileStreamReader::next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++row_;
    // Strip trailing carriage returns and skip blank lines.
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
    if (start == line.size()) continue;

    if (!format_known_) {
      ndjson_ = line[start] == '{';
      format_known_ = true;
    }

    if (ndjson_) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        throw DimensionError("malformed NDJSON record at row " + std::to_string(row_));
      }
      ResponseVector r;
      r.y = vector_from_json(j.at("y"));
      r.t = j.value("t", ++t_counter_);
      t_counter_ = r.t;
      return r;
    }

    Eigen::VectorXd y;
    if (!parse_csv_row(line, y)) {
      // A non-numeric first row is an optional header; anything later is
      // a malformed row.
      if (row_ == 1) continue;
      throw DimensionError("malformed CSV row at row " + std::to_string(row_));
    }
    return ResponseVector{std::move(y), ++t_counter_};
  }
  return std::nullopt;
}

std::vector<ResponseVector> read_profiles(std::istream& in) {
  ProfileStreamReader reader(in);
  std::vector<ResponseVector> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  return out;
}

std::vector<ResponseVector> read_profiles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_profiles(in);
}

void write_profiles_csv(std::ostream& out, const std::vector<ResponseVector>& profiles) {
  out << std::setprecision(17);
  for (const auto& r : profiles) {
    for (Eigen::Index i = 0; i < r.y.size(); ++i) {
      if (i) out << ',';
      out << r.y[i];
    }
    out << '\n';
  }
}

void write_outcome_ndjson(std::ostream& out, const MonitoringOutcome& outcome) {
  json j{{"t", outcome.t},
         {"statistic", outcome.statistic},
         {"argmax_k1", outcome.argmax_k1},
         {"alarm", outcome.alarm}};
  out << j.dump() << '\n';
  out.flush();
}

namespace {

std::vector<std::string> factor_columns(const std::vector<CellSummary>& cells) {
  std::vector<std::string> cols;
  for (const auto& cell : cells) {
    for (const auto& [key, value] : cell.factors) {
      if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
    }
  }
  return cols;
}

std::string factor_value(const CellSummary& cell, const std::string& key) {
  for (const auto& [k, v] : cell.factors) {
    if (k == key) return v;
  }
  return "";
}

}  // namespace

void write_trials_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  const auto cols = factor_columns(cells);
  out << "study,cell_id";
  for (const auto& c : cols) out << ',' << c;
  out << ",trial,seed,tau,true_alarm_time,censored,n_false_alarms,false_alarm_times,u,"
         "control_limit_digest\n";
  for (const auto& cell : cells) {
    if (cell.infeasible) continue;
    for (std::size_t i = 0; i < cell.trials.size(); ++i) {
      const auto& rec = cell.trials[i];
      out << cell.study << ',' << cell.cell_id;
      for (const auto& c : cols) out << ',' << factor_value(cell, c);
      out << ',' << i << ',' << rec.seed << ',' << rec.tau << ',';
      if (rec.true_alarm_time) out << *rec.true_alarm_time;
      out << ',' << (rec.true_alarm_time ? 0 : 1) << ',' << rec.false_alarm_times.size() << ',';
      for (std::size_t k = 0; k < rec.false_alarm_times.size(); ++k) {
        if (k) out << ';';
        out << rec.false_alarm_times[k];
      }
      out << ',' << std::setprecision(17) << rec.u << ',' << rec.control_limit_digest << '\n';
    }
  }
}

json cells_to_json(const std::vector<CellSummary>& cells) {
  json arr = json::array();
  for (const auto& cell : cells) {
    json factors = json::object();
    for (const auto& [k, v] : cell.factors) factors[k] = v;
    json entry{{"study", cell.study},
               {"cell_id", cell.cell_id},
               {"factors", std::move(factors)},
               {"infeasible", cell.infeasible}};
    if (cell.infeasible) {
      entry["infeasible_reason"] = cell.infeasible_reason;
    } else {
      entry["far"] = cell.far;
      entry["arl1"] = cell.arl1;
      entry["censored"] = cell.censored;
      entry["n_false_alarms"] = cell.n_false_alarms;
      json seeds = json::array();
      for (const auto& rec : cell.trials) seeds.push_back(rec.seed);
      entry["seeds"] = std::move(seeds);
      if (cell.population) {
        entry["population_correlations"] = json{{"rho_ff", cell.population->rho_ff},
                                                {"rho_hh", cell.population->rho_hh},
                                                {"rho_fh_noisy", cell.population->rho_fh_noisy}};
      }
    }
    arr.push_back(std::move(entry));
  }
  return arr;
}

void write_population_correlations_csv(std::ostream& out,
                                       const std::vector<CellSummary>& cells) {
  const auto cols = factor_columns(cells);
  out << "study,cell_id";
  for (const auto& c : cols) out << ',' << c;
  out << ",rho_ff,rho_hh,rho_fh_noisy\n";
  out << std::setprecision(17);
  for (const auto& cell : cells) {
    if (cell.infeasible || !cell.population) continue;
    out << cell.study << ',' << cell.cell_id;
    for (const auto& c : cols) out << ',' << factor_value(cell, c);
    out << ',' << cell.population->rho_ff << ',' << cell.population->rho_hh << ','
        << cell.population->rho_fh_noisy << '\n';
  }
}

namespace {

void write_metric_csv(std::ostream& out, const std::vector<CellSummary>& cells,
                      const std::string& metric_name,
                      const std::function<double(const CellSummary&)>& metric) {
  const auto cols = factor_columns(cells);
  out << "study,cell_id";
  for (const auto& c : cols) out << ',' << c;
  out << ',' << metric_name << '\n';
  out << std::setprecision(17);
  for (const auto& cell : cells) {
    if (cell.infeasible) continue;
    out << cell.study << ',' << cell.cell_id;
    for (const auto& c : cols) out << ',' << factor_value(cell, c);
    out << ',' << metric(cell) << '\n';
  }
}

}  // namespace

void write_far_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  write_metric_csv(out, cells, "far", [](const CellSummary& c) { return c.far; });
}

void write_arl1_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  write_metric_csv(out, cells, "arl1", [](const CellSummary& c) { return c.arl1; });
}

json make_manifest(const std::string& command, const json& resolved_args,
                   std::uint64_t master_seed) {
  json manifest{{"command", command}, {"args", resolved_args}, {"master_seed", master_seed}};
  manifest["digest"] = fnv1a_hex(manifest.dump());
  return manifest;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace epcc

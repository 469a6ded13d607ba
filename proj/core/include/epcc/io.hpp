#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epcc/calibration.hpp"
#include "epcc/chart.hpp"
#include "epcc/sim_harness.hpp"

namespace epcc {

using nlohmann::json;

// --- JSON descriptions ------------------------------------------------

json to_json(const ProfileFunction& fn);
ProfileFunction profile_function_from_json(const json& j);

json to_json(const ChartConfig& config);
ChartConfig chart_config_from_json(const json& j);

json to_json(const ControlLimit& limit);
ControlLimit control_limit_from_json(const json& j);

json to_json(const CalibratedPair& pair);
CalibratedPair calibrated_pair_from_json(const json& j);

/// FNV-1a over a string, as a 16-hex-digit digest.
std::string fnv1a_hex(const std::string& text);

// --- profile data files ------------------------------------------------

/// Reads a whole profile file: CSV (one row per time step, n numeric
/// columns, optional header) or NDJSON ({"t":..., "y":[...]} records),
/// detected from the first non-empty line.
std::vector<ResponseVector> read_profiles(std::istream& in);
std::vector<ResponseVector> read_profiles_file(const std::string& path);

/// Streaming reader over the same two formats; returns one response per
/// call, nullopt at end of input. Throws on malformed rows, reporting
/// the 1-based row number.
class ProfileStreamReader {
 public:
  explicit ProfileStreamReader(std::istream& in) : in_(&in) {}
  std::optional<ResponseVector> next();
  long rows_read() const { return row_; }

 private:
  std::istream* in_;
  long row_ = 0;
  long t_counter_ = 0;
  bool format_known_ = false;
  bool ndjson_ = false;
};

void write_profiles_csv(std::ostream& out, const std::vector<ResponseVector>& profiles);

/// One NDJSON monitoring record: {"t":..,"statistic":..,"argmax_k1":..,
/// "alarm":..}, flushed so downstream consumers see step t before step
/// t+1 is computed.
void write_outcome_ndjson(std::ostream& out, const MonitoringOutcome& outcome);

// --- study outputs -----------------------------------------------------

/// Tidy per-trial rows (one row per trial).
void write_trials_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// Per-cell JSON summaries: factors, FAR, ARL1, seeds, infeasibility.
json cells_to_json(const std::vector<CellSummary>& cells);

/// Figure-style tidy CSVs: population-correlation scatter, FAR by cell,
/// ARL1 by cell.
void write_population_correlations_csv(std::ostream& out, const std::vector<CellSummary>& cells);
void write_far_csv(std::ostream& out, const std::vector<CellSummary>& cells);
void write_arl1_csv(std::ostream& out, const std::vector<CellSummary>& cells);

// --- manifests -----------------------------------------------------------

/// Every command echoes its resolved arguments so a run can be
/// reproduced from the artifact alone.
json make_manifest(const std::string& command, const json& resolved_args,
                   std::uint64_t master_seed);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace epcc

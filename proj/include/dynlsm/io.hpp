#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynlsm/metrics.hpp"
#include "dynlsm/model.hpp"
#include "dynlsm/simulate.hpp"

namespace dynlsm::io {

// Files are written canonically: fixed field order, "%.17g" floats, LF.

// Series CSV:
//   # n=20,T=5,kind=bernoulli,noise_sd=1,seed=7
//   t,i,j,value
//   1,1,2,0
// Indices are 1-based with i < j, one row per observed unordered pair.
struct SeriesFile {
  NetworkSeries series;
  std::uint64_t seed = 0;
};

struct SeriesReadOptions {
  // Absent rows are observed zeros instead of missing (bernoulli only).
  bool dense_zeros = false;
};

SeriesFile read_series(std::istream& in, const SeriesReadOptions& opts = {});
void write_series(std::ostream& out, const SeriesFile& file);
SeriesFile load_series(const std::string& path,
                       const SeriesReadOptions& opts = {});
void save_series(const std::string& path, const SeriesFile& file);

// Edge value table "t,i,j,<column>" with optional leading '#' comment line.
// Used for scores, heldout labels, true probabilities and pair lists (the
// value column is ignored when read as a pair list).
struct EdgeTable {
  std::string comment;  // without the leading "# "
  std::string column = "value";
  std::vector<EdgeRef> edges;  // 0-based
  std::vector<double> values;
};

EdgeTable read_edge_table(std::istream& in, bool require_values = true);
void write_edge_table(std::ostream& out, const EdgeTable& table);
EdgeTable load_edge_table(const std::string& path, bool require_values = true);
void save_edge_table(const std::string& path, const EdgeTable& table);

// Trajectory CSV "t,i,x1,...,xd" (1-based t and i), time-major.
struct TrajectoryFile {
  std::string comment;
  std::vector<Eigen::MatrixXd> positions;
};

TrajectoryFile read_trajectory(std::istream& in);
void write_trajectory(std::ostream& out, const TrajectoryFile& file);
TrajectoryFile load_trajectory(const std::string& path);
void save_trajectory(const std::string& path, const TrajectoryFile& file);

// Metadata of the data a fit was run on.
struct DataInfo {
  LikelihoodKind kind = LikelihoodKind::bernoulli;
  Index n = 0;
  Index T = 0;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
};

// Fit archive, JSON schema "dynlsm-fit-v1".
struct FitArchive {
  ModelConfig config;
  DataInfo data;
  FitResult result;
};

inline constexpr const char* kArchiveVersion = "dynlsm-fit-v1";

std::string archive_to_json(const FitArchive& archive, bool include_xi);
FitArchive archive_from_json(const std::string& text);
void save_archive(const std::string& path, const FitArchive& archive,
                  bool include_xi = false);
FitArchive load_archive(const std::string& path);

// ModelConfig as the JSON object stored under "config" in archives; also
// accepted as a standalone config file by the CLI.
std::string config_to_json(const ModelConfig& cfg);
ModelConfig config_from_json(const std::string& text);

// Trace CSV "sweep,statistic,elbo,wall_seconds"; empty elbo when untracked.
void write_trace(std::ostream& out, const std::string& comment,
                 const std::vector<TraceRecord>& trace);
void save_trace(const std::string& path, const std::string& comment,
                const std::vector<TraceRecord>& trace);

// Human-readable summary of an archive.
std::string summary_json(const FitArchive& archive);

struct Metrics {
  std::size_t count = 0;
  std::optional<double> pcc;
  std::optional<double> auc;
  std::optional<double> rmse;
  std::optional<double> tp_ratio;
  std::optional<double> rmse_inner_products;
  std::string scores_comment;
};

std::string metrics_to_json(const Metrics& m);

// "%.17g".
std::string format_double(double x);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dynlsm::io

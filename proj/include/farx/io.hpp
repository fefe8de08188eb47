#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "farx/evaluation.hpp"
#include "farx/moments.hpp"
#include "farx/rolling.hpp"
#include "farx/tikhonov.hpp"

namespace farx::io {

/// Version stamped into every metadata document this library writes.
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Throws ConfigError unless `doc["schema_version"]` equals kSchemaVersion.
void require_schema(const nlohmann::json& doc, const std::string& what);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// `foo.csv` -> `foo.meta.json`
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Matrix as headerless CSV, one row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in, const std::string& source);

/// Rows = time, columns = grid values. The sidecar carries the grid and
/// `extra` metadata.
void write_sample(const std::filesystem::path& csv, const Sample& sample, nlohmann::json extra = nlohmann::json::object());
/// Uses the sidecar's grid when present (version-checked), else a uniform grid.
Sample read_sample(const std::filesystem::path& csv);

nlohmann::json regime_to_json(const RegimeSpec& spec);
RegimeSpec regime_from_json(const nlohmann::json& doc);

nlohmann::json cv_to_json(const CvResult& cv);

/// Benchmark config file:
///   {"schema_version": 1, "master_seed": 20240601, "replications": 50,
///    "test_length": 200, "threads": 1, "sample_sizes": [100, 200, 400, 800],
///    "methods": ["fpca:0.8", ..., "tikhonov:cv"],
///    "regimes": ["I", "II", {"base": "III", "decay_axis": "row"}]}
/// Every key is optional; missing keys take the BenchmarkConfig::standard() values.
BenchmarkConfig benchmark_config_from_json(const nlohmann::json& doc);
nlohmann::json benchmark_config_to_json(const BenchmarkConfig& config);

/// regime,n,method,replication,status,misfe,tuning,hs_error
void write_records_csv(std::ostream& out, const std::vector<CellResult>& records);
/// regime,n,method,replication,seconds
void write_timing_csv(std::ostream& out, const std::vector<CellResult>& records);

/// date,method,ise,alpha_or_k,refit_flag
void write_rolling_header(std::ostream& out);
void write_rolling_rows(std::ostream& out, const RollingResult& result);

/// weekday,h01..h48 with rows Monday..Sunday.
void write_weekday_table(std::ostream& out, const Eigen::MatrixXd& means);

}  // namespace farx::io

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divplan/composer.hpp"
#include "divplan/fitting.hpp"
#include "divplan/planner.hpp"
#include "divplan/records.hpp"
#include "divplan/simulator.hpp"

namespace divplan::io {

// Records CSV: header "task,N,K,replicate,error_percent", one row per
// replicate. Malformed rows are rejected with their line number.
std::vector<PerformanceRecord> parse_records_csv(std::istream& in);
void write_records_csv(std::ostream& out, std::span<const PerformanceRecord> records);
std::vector<PerformanceRecord> read_records_csv(const std::filesystem::path& path);
void write_records_csv(const std::filesystem::path& path,
                       std::span<const PerformanceRecord> records);

// Inventory CSV: header "class_id,sample_id", one available sample per row.
ClassInventory parse_inventory_csv(std::istream& in);
void write_inventory_csv(std::ostream& out, const ClassInventory& inventory);
ClassInventory read_inventory_csv(const std::filesystem::path& path);

// Model document (JSON): A, B, c, fitted_at_N, fit diagnostics,
// monotone_regime, schema_version. Round-trips losslessly.
std::string model_to_json(const FitReport& report);
FitReport model_from_json(const std::string& text);
void write_model_json(const std::filesystem::path& path, const FitReport& report);
FitReport read_model_json(const std::filesystem::path& path);

// Manifest document (JSON): N, K, seed, generator identifier, per-class
// sample lists. Reading re-validates the manifest invariants.
std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void write_manifest_json(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest_json(const std::filesystem::path& path);

// Plan document (JSON): method, target_N, K, nominal samples per class,
// predicted error, clamping flag, the law used, optional accounting.
std::string plan_to_json(const PlanResult& plan,
                         const std::optional<SampleAccount>& accounting = std::nullopt);
void write_plan_json(const std::filesystem::path& path, const PlanResult& plan,
                     const std::optional<SampleAccount>& accounting = std::nullopt);

// Budget document (JSON): total_classes, max_per_class.
ClassBudget budget_from_json(const std::string& text);
ClassBudget read_budget_json(const std::filesystem::path& path);

// Oracle document (JSON): kind "two_step" (A, B, C, D) or "cluster"
// (a, b, c0), plus noise_sigma and optional task. The seed is not part of
// the document; it is threaded in from the command line.
OracleSpec oracle_from_json(const std::string& text);
OracleSpec read_oracle_json(const std::filesystem::path& path);

// Sweep table CSV: header "N,K,x,mean_error,stddev,count".
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);
std::vector<SweepRow> parse_sweep_csv(std::istream& in);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Writes text to path, replacing any existing file. Errors map to "io".
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace divplan::io

#include "divplan/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "divplan/errors.hpp"

namespace divplan::io {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::size_t line, const std::string& message) {
    fail(errc::parse, "line " + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::int64_t parse_int(const std::string& field, std::size_t line, const char* what) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(line, std::string("invalid ") + what + " \"" + field + "\"");
    return value;
}

double parse_double(const std::string& field, std::size_t line, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(line, std::string("invalid ") + what + " \"" + field + "\"");
    return value;
}

void check_identifier(const std::string& field, std::size_t line, const char* what) {
    if (field.empty()) parse_fail(line, std::string("empty ") + what);
    if (field.find_first_of(",\"\r\n") != std::string::npos)
        parse_fail(line, std::string(what) + " may not contain commas, quotes or line breaks");
}

/// Reads a line tolerating trailing \r; returns false at end of stream.
bool get_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

json parse_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(errc::parse, "malformed JSON document");
    return doc;
}

const json& require_field(const json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end()) fail(errc::parse, std::string("missing field \"") + name + "\"");
    return *it;
}

double number_field(const json& doc, const char* name) {
    const json& field = require_field(doc, name);
    if (!field.is_number()) fail(errc::parse, std::string("field \"") + name + "\" must be a number");
    return field.get<double>();
}

std::int64_t int_field(const json& doc, const char* name) {
    const json& field = require_field(doc, name);
    if (!field.is_number_integer())
        fail(errc::parse, std::string("field \"") + name + "\" must be an integer");
    return field.get<std::int64_t>();
}

void check_schema_version(const json& doc) {
    if (int_field(doc, "schema_version") != 1)
        fail(errc::parse, "unsupported schema_version");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io, "cannot open \"" + path.string() + "\" for writing");
    out << text;
    out.flush();
    if (!out) fail(errc::io, "failed writing \"" + path.string() + "\"");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open \"" + path.string() + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(errc::io, "failed reading \"" + path.string() + "\"");
    return buffer.str();
}

std::vector<PerformanceRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!get_line(in, line)) fail(errc::parse, "empty records file");
    if (line != "task,N,K,replicate,error_percent")
        parse_fail(1, "expected header \"task,N,K,replicate,error_percent\"");
    std::vector<PerformanceRecord> records;
    std::size_t line_no = 1;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5) parse_fail(line_no, "expected 5 fields");
        PerformanceRecord record;
        check_identifier(fields[0], line_no, "task");
        record.task = fields[0];
        record.N = parse_int(fields[1], line_no, "N");
        record.K = parse_int(fields[2], line_no, "K");
        record.replicate = parse_int(fields[3], line_no, "replicate");
        record.error_percent = parse_double(fields[4], line_no, "error_percent");
        if (record.N < 0 || record.K < 0 || record.replicate < 0)
            parse_fail(line_no, "N, K and replicate must be non-negative");
        if (!(record.error_percent >= 0.0 && record.error_percent <= 100.0))
            parse_fail(line_no, "error_percent must lie in [0, 100]");
        records.push_back(std::move(record));
    }
    return records;
}

void write_records_csv(std::ostream& out, std::span<const PerformanceRecord> records) {
    out << "task,N,K,replicate,error_percent\n";
    for (const auto& record : records)
        out << record.task << ',' << record.N << ',' << record.K << ',' << record.replicate << ','
            << format_double(record.error_percent) << '\n';
}

std::vector<PerformanceRecord> read_records_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    return parse_records_csv(in);
}

void write_records_csv(const std::filesystem::path& path,
                       std::span<const PerformanceRecord> records) {
    std::ostringstream out;
    write_records_csv(out, records);
    write_text_file(path, out.str());
}

ClassInventory parse_inventory_csv(std::istream& in) {
    std::string line;
    if (!get_line(in, line)) fail(errc::parse, "empty inventory file");
    if (line != "class_id,sample_id") parse_fail(1, "expected header \"class_id,sample_id\"");
    ClassInventory inventory;
    std::size_t line_no = 1;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) parse_fail(line_no, "expected 2 fields");
        check_identifier(fields[0], line_no, "class_id");
        check_identifier(fields[1], line_no, "sample_id");
        auto& samples = inventory.classes[fields[0]];
        for (const auto& existing : samples)
            if (existing == fields[1])
                parse_fail(line_no, "duplicate sample \"" + fields[1] + "\" in class \"" +
                                        fields[0] + "\"");
        samples.push_back(fields[1]);
    }
    return inventory;
}

void write_inventory_csv(std::ostream& out, const ClassInventory& inventory) {
    out << "class_id,sample_id\n";
    for (const auto& [cls, samples] : inventory.classes)
        for (const auto& sample : samples) out << cls << ',' << sample << '\n';
}

ClassInventory read_inventory_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    return parse_inventory_csv(in);
}

std::string model_to_json(const FitReport& report) {
    json doc;
    doc["schema_version"] = 1;
    doc["A"] = report.law.A;
    doc["B"] = report.law.B;
    doc["c"] = report.law.c;
    doc["fitted_at_N"] = report.law.fitted_at_N;
    doc["residual_rms"] = report.residual_rms;
    doc["max_abs_residual"] = report.max_abs_residual;
    doc["design_condition"] = report.design_condition;
    doc["monotone_regime"] = report.monotone_regime;
    return dump(doc);
}

FitReport model_from_json(const std::string& text) {
    const json doc = parse_json(text);
    check_schema_version(doc);
    FitReport report;
    report.law.A = number_field(doc, "A");
    report.law.B = number_field(doc, "B");
    report.law.c = number_field(doc, "c");
    report.law.fitted_at_N = int_field(doc, "fitted_at_N");
    report.residual_rms = number_field(doc, "residual_rms");
    report.max_abs_residual = number_field(doc, "max_abs_residual");
    report.design_condition = number_field(doc, "design_condition");
    const json& monotone = require_field(doc, "monotone_regime");
    if (!monotone.is_boolean()) fail(errc::parse, "field \"monotone_regime\" must be a boolean");
    report.monotone_regime = monotone.get<bool>();
    if (report.law.fitted_at_N < 1) fail(errc::parse, "fitted_at_N must be >= 1");
    return report;
}

void write_model_json(const std::filesystem::path& path, const FitReport& report) {
    write_text_file(path, model_to_json(report));
}

FitReport read_model_json(const std::filesystem::path& path) {
    return model_from_json(read_text_file(path));
}

std::string manifest_to_json(const DatasetManifest& manifest) {
    json doc;
    doc["schema_version"] = 1;
    doc["N"] = manifest.N;
    doc["K"] = manifest.K;
    doc["seed"] = manifest.seed;
    doc["generator"] = manifest.generator;
    json entries = json::object();
    for (const auto& [cls, samples] : manifest.entries) entries[cls] = samples;
    doc["entries"] = std::move(entries);
    return dump(doc);
}

namespace {

void validate_manifest(const DatasetManifest& manifest) {
    if (static_cast<std::int64_t>(manifest.entries.size()) != manifest.K)
        fail(errc::parse, "manifest class count does not match K");
    std::int64_t total = 0;
    std::size_t low = 0, high = 0;
    bool first = true;
    for (const auto& [cls, samples] : manifest.entries) {
        std::vector<std::string> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            fail(errc::parse, "duplicate sample in class \"" + cls + "\"");
        total += static_cast<std::int64_t>(samples.size());
        if (first) {
            low = high = samples.size();
            first = false;
        } else {
            low = std::min(low, samples.size());
            high = std::max(high, samples.size());
        }
    }
    if (total != manifest.N) fail(errc::parse, "manifest sample count does not match N");
    if (!first && high - low > 1) fail(errc::parse, "per-class counts differ by more than one");
}

}  // namespace

DatasetManifest manifest_from_json(const std::string& text) {
    const json doc = parse_json(text);
    check_schema_version(doc);
    DatasetManifest manifest;
    manifest.N = int_field(doc, "N");
    manifest.K = int_field(doc, "K");
    const json& seed = require_field(doc, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer())
        fail(errc::parse, "field \"seed\" must be an integer");
    manifest.seed = seed.get<std::uint64_t>();
    const json& generator = require_field(doc, "generator");
    if (!generator.is_string()) fail(errc::parse, "field \"generator\" must be a string");
    manifest.generator = generator.get<std::string>();
    const json& entries = require_field(doc, "entries");
    if (!entries.is_object()) fail(errc::parse, "field \"entries\" must be an object");
    for (const auto& [cls, samples] : entries.items()) {
        if (!samples.is_array()) fail(errc::parse, "entries must map classes to sample arrays");
        manifest.entries[cls] = samples.get<std::vector<std::string>>();
    }
    validate_manifest(manifest);
    return manifest;
}

void write_manifest_json(const std::filesystem::path& path, const DatasetManifest& manifest) {
    write_text_file(path, manifest_to_json(manifest));
}

DatasetManifest read_manifest_json(const std::filesystem::path& path) {
    return manifest_from_json(read_text_file(path));
}

std::string plan_to_json(const PlanResult& plan, const std::optional<SampleAccount>& accounting) {
    json doc;
    doc["schema_version"] = 1;
    doc["method"] = to_string(plan.method);
    doc["target_N"] = plan.target_N;
    doc["K"] = plan.K;
    doc["n_nominal"] = {{"num", plan.n_nominal.num}, {"den", plan.n_nominal.den}};
    doc["n_nominal_value"] = plan.n_nominal.value();
    doc["predicted_error"] = plan.predicted_error ? json(*plan.predicted_error) : json(nullptr);
    doc["clamped"] = plan.clamped;
    doc["warning"] = plan.warning.empty() ? json(nullptr) : json(plan.warning);
    if (plan.law_used) {
        doc["law_used"] = {{"A", plan.law_used->A},
                           {"B", plan.law_used->B},
                           {"c", plan.law_used->c},
                           {"fitted_at_N", plan.law_used->fitted_at_N}};
    } else {
        doc["law_used"] = nullptr;
    }
    if (accounting) {
        json builds = json::array();
        for (const auto& build : accounting->builds)
            builds.push_back({{"N", build.N}, {"K", build.K}});
        doc["accounting"] = {{"mode", to_string(accounting->dedup_mode)},
                             {"builds", std::move(builds)},
                             {"total_samples", accounting->total_samples}};
    } else {
        doc["accounting"] = nullptr;
    }
    return dump(doc);
}

void write_plan_json(const std::filesystem::path& path, const PlanResult& plan,
                     const std::optional<SampleAccount>& accounting) {
    write_text_file(path, plan_to_json(plan, accounting));
}

ClassBudget budget_from_json(const std::string& text) {
    const json doc = parse_json(text);
    ClassBudget budget;
    budget.total_classes = int_field(doc, "total_classes");
    budget.max_per_class = int_field(doc, "max_per_class");
    if (budget.total_classes < 1 || budget.max_per_class < 1)
        fail(errc::parse, "budget limits must be >= 1");
    return budget;
}

ClassBudget read_budget_json(const std::filesystem::path& path) {
    return budget_from_json(read_text_file(path));
}

OracleSpec oracle_from_json(const std::string& text) {
    const json doc = parse_json(text);
    const json& kind = require_field(doc, "kind");
    if (!kind.is_string()) fail(errc::parse, "field \"kind\" must be a string");
    OracleSpec oracle;
    const std::string kind_name = kind.get<std::string>();
    if (kind_name == "two_step") {
        oracle.shape = BoundTerms{number_field(doc, "A"), number_field(doc, "B"),
                                  number_field(doc, "C"), number_field(doc, "D")};
    } else if (kind_name == "cluster") {
        oracle.shape = ClusterShape{number_field(doc, "a"), number_field(doc, "b"),
                                    number_field(doc, "c0")};
    } else {
        fail(errc::parse, "oracle kind must be \"two_step\" or \"cluster\"");
    }
    if (doc.contains("noise_sigma")) oracle.noise_sigma = number_field(doc, "noise_sigma");
    if (oracle.noise_sigma < 0.0) fail(errc::parse, "noise_sigma must be >= 0");
    if (doc.contains("task")) {
        const json& task = doc.at("task");
        if (!task.is_string()) fail(errc::parse, "field \"task\" must be a string");
        oracle.task = task.get<std::string>();
    }
    return oracle;
}

OracleSpec read_oracle_json(const std::filesystem::path& path) {
    return oracle_from_json(read_text_file(path));
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "N,K,x,mean_error,stddev,count\n";
    for (const auto& row : rows)
        out << row.N << ',' << row.K << ',' << format_double(row.ratio) << ','
            << format_double(row.mean_error) << ',' << format_double(row.stddev) << ','
            << row.count << '\n';
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
    std::string line;
    if (!get_line(in, line)) fail(errc::parse, "empty sweep table");
    if (line != "N,K,x,mean_error,stddev,count")
        parse_fail(1, "expected header \"N,K,x,mean_error,stddev,count\"");
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (get_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 6) parse_fail(line_no, "expected 6 fields");
        SweepRow row;
        row.N = parse_int(fields[0], line_no, "N");
        row.K = parse_int(fields[1], line_no, "K");
        row.ratio = parse_double(fields[2], line_no, "x");
        row.mean_error = parse_double(fields[3], line_no, "mean_error");
        row.stddev = parse_double(fields[4], line_no, "stddev");
        row.count = parse_int(fields[5], line_no, "count");
        if (row.N < 1 || row.K < 1 || !(row.ratio > 0.0) || row.count < 1 || row.stddev < 0.0)
            parse_fail(line_no, "row values out of range");
        rows.push_back(row);
    }
    return rows;
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    return parse_sweep_csv(in);
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows) {
    std::ostringstream out;
    write_sweep_csv(out, rows);
    write_text_file(path, out.str());
}

}  // namespace divplan::io

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "divplan/cli.hpp"
#include "divplan/errors.hpp"
#include "divplan/io.hpp"
#include "divplan/rng.hpp"
#include "divplan/svg.hpp"
#include "support.hpp"

using namespace divplan;
using testsupport::error_code_of;
using testsupport::make_inventory;
using testsupport::ScratchDir;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return CliRun{code, out.str(), err.str()};
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

// enough well-formedness for generated SVG: prolog, matched svg tags, and
// every '<' opens a tag that closes before the next one opens
bool looks_like_xml(const std::string& text) {
    if (text.rfind("<?xml", 0) != 0) return false;
    if (count_occurrences(text, "<svg") != 1 || count_occurrences(text, "</svg>") != 1)
        return false;
    bool open = false;
    for (char c : text) {
        if (c == '<') {
            if (open) return false;
            open = true;
        } else if (c == '>') {
            if (!open) return false;
            open = false;
        }
    }
    return !open;
}

std::string pilot_records_csv() {
    return "task,N,K,replicate,error_percent\n"
           "cifar,5000,10,0,20.585\n"
           "cifar,5000,50,0,20.337\n"
           "cifar,5000,200,0,20.307\n";
}

}  // namespace

TEST_CASE("records CSV round-trips losslessly") {
    std::vector<PerformanceRecord> records{{"cifar", 5000, 10, 0, 20.30500000000001},
                                           {"dogs", 100000, 269, 4, 1.0 / 3.0}};
    std::ostringstream out;
    io::write_records_csv(out, records);
    std::istringstream in(out.str());
    const auto parsed = io::parse_records_csv(in);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].task == "cifar");
    CHECK(parsed[0].error_percent == records[0].error_percent);  // bit-exact
    CHECK(parsed[1].error_percent == records[1].error_percent);
    CHECK(parsed[1].replicate == 4);
}

TEST_CASE("records CSV rejects malformed rows with line numbers") {
    const auto code_and_message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::parse_records_csv(in);
        } catch (const Error& e) {
            return std::string(e.code()) + "|" + e.what();
        }
        return std::string("ok");
    };
    CHECK(code_and_message("task,N,K,replicate,error_percent\nt,1,1,0,5,9\n") ==
          "parse|line 2: expected 5 fields");
    CHECK(code_and_message("task,N,K,replicate,error_percent\nt,x,1,0,5\n") ==
          "parse|line 2: invalid N \"x\"");
    CHECK(code_and_message("task,N,K,replicate,error_percent\nt,1,1,0,101\n") ==
          "parse|line 2: error_percent must lie in [0, 100]");
    CHECK(code_and_message("task,N,K,replicate,error_percent\nt,1,1,0,5\nt,1,1,-1,5\n") ==
          "parse|line 3: N, K and replicate must be non-negative");
    CHECK(code_and_message("nope\n").substr(0, 5) == "parse");
}

TEST_CASE("inventory CSV parses and rejects duplicates") {
    std::istringstream in("class_id,sample_id\nc1,s1\nc1,s2\nc2,s1\n");
    const ClassInventory inventory = io::parse_inventory_csv(in);
    CHECK(inventory.classes.size() == 2);
    CHECK(inventory.classes.at("c1").size() == 2);

    std::istringstream dup("class_id,sample_id\nc1,s1\nc1,s1\n");
    CHECK(error_code_of([&] { io::parse_inventory_csv(dup); }) == errc::parse);
}

TEST_CASE("model JSON round-trips bit-exactly") {
    FitReport report;
    report.law = RatioLaw{0.9000000000000001, std::sqrt(2.0), 1.0 / 3.0, 5000};
    report.residual_rms = 1.2345678901234567e-10;
    report.max_abs_residual = 2e-10;
    report.design_condition = 17.123456789012345;
    report.monotone_regime = false;
    const std::string text = io::model_to_json(report);
    const FitReport parsed = io::model_from_json(text);
    CHECK(parsed.law.A == report.law.A);
    CHECK(parsed.law.B == report.law.B);
    CHECK(parsed.law.c == report.law.c);
    CHECK(parsed.law.fitted_at_N == 5000);
    CHECK(parsed.residual_rms == report.residual_rms);
    CHECK(parsed.design_condition == report.design_condition);
    CHECK(io::model_to_json(parsed) == text);  // canonical form is a fixed point

    CHECK(error_code_of([] { io::model_from_json("{\"schema_version\":1}"); }) == errc::parse);
    CHECK(error_code_of([] { io::model_from_json("not json"); }) == errc::parse);
}

TEST_CASE("manifest JSON round-trips and re-validates") {
    const ClassInventory inventory = make_inventory(6, 10);
    const DatasetManifest manifest = compose_manifest(inventory, 23, 4, 77);
    const std::string text = io::manifest_to_json(manifest);
    const DatasetManifest parsed = io::manifest_from_json(text);
    CHECK(parsed.N == 23);
    CHECK(parsed.K == 4);
    CHECK(parsed.seed == 77);
    CHECK(parsed.entries == manifest.entries);
    CHECK(io::manifest_to_json(parsed) == text);

    nlohmann::json doc = nlohmann::json::parse(text);
    doc["N"] = 99;  // breaks the sum invariant
    CHECK(error_code_of([&] { io::manifest_from_json(doc.dump()); }) == errc::parse);
}

TEST_CASE("sweep CSV round-trips") {
    std::vector<SweepRow> rows{{1000, 50, 2.5, 21.25, 0.125, 5},
                               {2000, 50, 1.25, 20.0 / 3.0, 0.0, 5}};
    std::ostringstream out;
    io::write_sweep_csv(out, rows);
    std::istringstream in(out.str());
    const auto parsed = io::parse_sweep_csv(in);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].ratio == rows[0].ratio);
    CHECK(parsed[1].mean_error == rows[1].mean_error);
    CHECK(parsed[1].stddev == 0.0);
}

TEST_CASE("budget and oracle JSON") {
    const ClassBudget budget = io::budget_from_json("{\"total_classes\":1000,\"max_per_class\":1300}");
    CHECK(budget.total_classes == 1000);
    CHECK(budget.max_per_class == 1300);
    CHECK(error_code_of([] { io::budget_from_json("{\"total_classes\":0,\"max_per_class\":1}"); }) ==
          errc::parse);

    const OracleSpec two_step = io::oracle_from_json(
        "{\"kind\":\"two_step\",\"A\":0.9,\"B\":1.7,\"C\":0.5,\"D\":20,\"noise_sigma\":0.2}");
    CHECK(two_step.is_two_step());
    CHECK(two_step.noise_sigma == 0.2);
    const OracleSpec cluster =
        io::oracle_from_json("{\"kind\":\"cluster\",\"a\":0,\"b\":4,\"c0\":10}");
    CHECK_FALSE(cluster.is_two_step());
    CHECK(error_code_of([] { io::oracle_from_json("{\"kind\":\"other\"}"); }) == errc::parse);
}

TEST_CASE("svg chart structure") {
    std::vector<SweepRow> one{{5000, 50, 0.5, 20.3, 0.0, 1}};
    const std::string single = svg::render_sweep_chart(one);
    CHECK(looks_like_xml(single));
    CHECK(count_occurrences(single, "<circle") == 1);
    CHECK(count_occurrences(single, "<polyline") == 1);

    std::vector<SweepRow> multi;
    for (std::int64_t n : {1000, 2000, 5000})
        for (std::int64_t k : {10, 50, 200})
            multi.push_back(SweepRow{n, k, static_cast<double>(k) * k / static_cast<double>(n),
                                     20.0 + 1.0 / static_cast<double>(k), 0.2, 5});
    const std::string chart = svg::render_sweep_chart(multi);
    CHECK(looks_like_xml(chart));
    CHECK(count_occurrences(chart, "<polyline") == 3);  // one per N
    CHECK(count_occurrences(chart, "<circle") == 9);
    CHECK(svg::render_sweep_chart(multi) == chart);  // deterministic bytes

    std::vector<SweepRow> none;
    CHECK(error_code_of([&] { svg::render_sweep_chart(none); }) == errc::empty_input);
}

TEST_CASE("cli fit writes a model and reports exit codes") {
    ScratchDir dir("fit");
    io::write_text_file(dir.file("pilot.csv"), pilot_records_csv());

    const CliRun ok = run({"fit", "--records", dir.file("pilot.csv").string(), "--n", "5000",
                           "--out", dir.file("model.json").string()});
    CHECK(ok.code == 0);
    const FitReport report = io::read_model_json(dir.file("model.json"));
    CHECK(report.law.fitted_at_N == 5000);
    CHECK(report.residual_rms < 1e-9);

    io::write_text_file(dir.file("two.csv"),
                        "task,N,K,replicate,error_percent\nt,5000,10,0,20\nt,5000,50,0,19\n");
    const CliRun under = run({"fit", "--records", dir.file("two.csv").string(), "--n", "5000",
                              "--out", dir.file("m2.json").string()});
    CHECK(under.code == 2);
    CHECK(under.err.find("underdetermined") != std::string::npos);

    io::write_text_file(dir.file("mixed.csv"),
                        "task,N,K,replicate,error_percent\n"
                        "t,5000,10,0,20\nt,9000,50,0,19\nt,5000,200,0,18\n");
    const CliRun mixed = run({"fit", "--records", dir.file("mixed.csv").string(), "--n", "5000",
                              "--out", dir.file("m3.json").string()});
    CHECK(mixed.code == 2);
    CHECK(mixed.err.find("mixed_n") != std::string::npos);

    const CliRun missing = run({"fit", "--records", dir.file("absent.csv").string(), "--n",
                                "5000", "--out", dir.file("m4.json").string()});
    CHECK(missing.code == 3);
}

TEST_CASE("cli predict reproduces the sqrt-N extrapolation") {
    ScratchDir dir("predict");
    FitReport report;
    report.law = RatioLaw{1.0, 190.0 / std::sqrt(50000.0), 20.0, 50000};
    io::write_model_json(dir.file("model.json"), report);

    const CliRun at100k = run(
        {"predict", "--model", dir.file("model.json").string(), "--target-n", "100000"});
    CHECK(at100k.code == 0);
    CHECK(at100k.out.find("K = 269") != std::string::npos);

    FitReport symmetric;
    symmetric.law = RatioLaw{2.5, 2.5, 10.0, 5000};
    io::write_model_json(dir.file("sym.json"), symmetric);
    const CliRun sym = run(
        {"predict", "--model", dir.file("sym.json").string(), "--target-n", "10000"});
    CHECK(sym.code == 0);
    CHECK(sym.out.find("K = 100") != std::string::npos);

    io::write_text_file(dir.file("tight.json"), "{\"total_classes\":80,\"max_per_class\":1300}\n");
    const CliRun clamped = run({"predict", "--model", dir.file("sym.json").string(),
                                "--target-n", "10000", "--budget", dir.file("tight.json").string()});
    CHECK(clamped.code == 0);
    CHECK(clamped.out.find("K = 80 (clamped: yes)") != std::string::npos);

    FitReport monotone;
    monotone.law = RatioLaw{-0.3, 2.0, 10.0, 5000};
    monotone.monotone_regime = true;
    io::write_model_json(dir.file("mono.json"), monotone);
    const CliRun rejected = run(
        {"predict", "--model", dir.file("mono.json").string(), "--target-n", "10000"});
    CHECK(rejected.code == 2);
    CHECK(rejected.err.find("monotone_regime") != std::string::npos);
}

TEST_CASE("cli plan round-trip across methods") {
    ScratchDir dir("plan");
    io::write_text_file(dir.file("budget.json"),
                        "{\"total_classes\":1000,\"max_per_class\":1300}\n");
    io::write_text_file(dir.file("pilot.csv"), pilot_records_csv());
    io::write_text_file(
        dir.file("grid.csv"),
        "task,N,K,replicate,error_percent\ncifar,50000,200,0,26.24\ncifar,50000,1000,0,29.19\n");

    const CliRun standard = run({"plan", "--method", "standard", "--target-n", "50000",
                                 "--budget", dir.file("budget.json").string(), "--out",
                                 dir.file("standard.json").string()});
    CHECK(standard.code == 0);
    CHECK(standard.out.find("K = 1000") != std::string::npos);
    const nlohmann::json standard_doc =
        nlohmann::json::parse(io::read_text_file(dir.file("standard.json")));
    CHECK(standard_doc.at("K") == 1000);
    CHECK(standard_doc.at("accounting").at("total_samples") == 50000);

    const CliRun grid = run({"plan", "--method", "grid-search", "--target-n", "50000",
                             "--records", dir.file("grid.csv").string()});
    CHECK(grid.code == 0);
    CHECK(grid.out.find("K = 200") != std::string::npos);

    const CliRun extrapolate =
        run({"plan", "--method", "extrapolation", "--target-n", "100000", "--records",
             dir.file("pilot.csv").string(), "--budget", dir.file("budget.json").string(),
             "--out", dir.file("extrapolation.json").string()});
    CHECK(extrapolate.code == 0);
    const nlohmann::json extra_doc =
        nlohmann::json::parse(io::read_text_file(dir.file("extrapolation.json")));
    CHECK(extra_doc.at("method") == "extrapolation");
    CHECK(extra_doc.at("law_used").at("fitted_at_N") == 5000);
    // pilot builds (3 x 5000) plus the final target build
    CHECK(extra_doc.at("accounting").at("total_samples") ==
          100000 + 3 * 5000);

    io::write_text_file(dir.file("oracle.json"),
                        "{\"kind\":\"two_step\",\"A\":0.9,\"B\":1.7,\"C\":0.5,\"D\":20}\n");
    io::write_text_file(dir.file("target.csv"), [] {
        std::ostringstream records;
        records << "task,N,K,replicate,error_percent\n";
        OracleSpec oracle;
        oracle.shape = BoundTerms{0.9, 1.7, 0.5, 20.0};
        for (std::int64_t k : {100, 400, 900})
            records << "t,50000," << k << ",0," << io::format_double(oracle_mean(oracle, 50000, k))
                    << "\n";
        return records.str();
    }());
    const CliRun emp = run({"plan", "--method", "emp-optimal", "--target-n", "50000",
                            "--records", dir.file("target.csv").string(), "--oracle",
                            dir.file("oracle.json").string(), "--budget",
                            dir.file("budget.json").string()});
    CHECK(emp.code == 0);
    CHECK(emp.out.find("method = emp_optimal") != std::string::npos);

    const CliRun bad = run({"plan", "--method", "standard", "--target-n", "50000"});
    CHECK(bad.code == 2);
}

TEST_CASE("cli compose is byte-deterministic") {
    ScratchDir dir("compose");
    std::ostringstream inventory_csv;
    io::write_inventory_csv(inventory_csv, make_inventory(8, 16));
    io::write_text_file(dir.file("inventory.csv"), inventory_csv.str());

    const auto compose = [&](const std::string& name) {
        return run({"compose", "--inventory", dir.file("inventory.csv").string(), "--n", "50",
                    "--k", "5", "--seed", "9", "--out", dir.file(name).string()});
    };
    CHECK(compose("a.json").code == 0);
    CHECK(compose("b.json").code == 0);
    CHECK(io::read_text_file(dir.file("a.json")) == io::read_text_file(dir.file("b.json")));

    const DatasetManifest manifest = io::read_manifest_json(dir.file("a.json"));
    CHECK(manifest.N == 50);
    CHECK(manifest.K == 5);

    const CliRun infeasible =
        run({"compose", "--inventory", dir.file("inventory.csv").string(), "--n", "200", "--k",
             "5", "--out", dir.file("c.json").string()});
    CHECK(infeasible.code == 2);
    CHECK(infeasible.err.find("class_short") != std::string::npos);
}

TEST_CASE("cli simulate, account, bound, plot") {
    ScratchDir dir("pipeline");
    io::write_text_file(dir.file("oracle.json"),
                        "{\"kind\":\"two_step\",\"A\":1,\"B\":2,\"C\":0.3,\"D\":7}\n");

    const CliRun simulate =
        run({"simulate", "--oracle", dir.file("oracle.json").string(), "--out",
             dir.file("records.csv").string(), "--sweep-out", dir.file("sweep.csv").string(),
             "--n-values", "1000,5000", "--k-values", "10,50,200", "--replicates", "2"});
    CHECK(simulate.code == 0);
    const auto records = io::read_records_csv(dir.file("records.csv"));
    CHECK(records.size() == 12);  // 2 N x 3 K x 2 replicates, all feasible

    const CliRun simulate_again =
        run({"simulate", "--oracle", dir.file("oracle.json").string(), "--out",
             dir.file("records2.csv").string(), "--n-values", "1000,5000", "--k-values",
             "10,50,200", "--replicates", "2"});
    CHECK(simulate_again.code == 0);
    CHECK(io::read_text_file(dir.file("records.csv")) ==
          io::read_text_file(dir.file("records2.csv")));

    const CliRun account = run({"account", "--size", "50000", "--mode", "disjoint-sum"});
    CHECK(account.code == 0);
    CHECK(account.out.find("total samples = 50000") != std::string::npos);
    const CliRun grid_account = run({"account", "--size", "50000", "--size", "50000", "--size",
                                     "50000", "--mode", "disjoint-sum"});
    CHECK(grid_account.out.find("total samples = 150000") != std::string::npos);
    const CliRun bad_union = run({"account", "--size", "50000", "--mode", "union-unique"});
    CHECK(bad_union.code == 2);

    const CliRun bound =
        run({"bound", "--theorem", "2", "--max-loss", "1", "--complexity", "1", "--lipschitz",
             "1", "--delta", "0.2706705664732254", "--nu0-px", "1", "--total-samples", "1",
             "--classes", "12"});
    CHECK(bound.code == 0);
    CHECK(bound.out.find("bound = 7") != std::string::npos);

    const CliRun plot = run({"plot", "--table", dir.file("sweep.csv").string(), "--out",
                             dir.file("chart.svg").string()});
    CHECK(plot.code == 0);
    const std::string chart = io::read_text_file(dir.file("chart.svg"));
    CHECK(looks_like_xml(chart));
    CHECK(count_occurrences(chart, "<polyline") == 2);

    io::write_text_file(dir.file("empty.csv"), "N,K,x,mean_error,stddev,count\n");
    const CliRun empty_plot = run({"plot", "--table", dir.file("empty.csv").string(), "--out",
                                   dir.file("empty.svg").string()});
    CHECK(empty_plot.code == 2);
}

TEST_CASE("cli usage errors and help") {
    const CliRun help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("divplan") != std::string::npos);

    const CliRun nothing = run({});
    CHECK(nothing.code == 2);

    const CliRun unknown = run({"frobnicate"});
    CHECK(unknown.code == 2);

    const CliRun missing_flag = run({"fit", "--n", "5000"});
    CHECK(missing_flag.code == 2);
}

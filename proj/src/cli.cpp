#include "divplan/cli.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

#include "divplan/composer.hpp"
#include "divplan/errors.hpp"
#include "divplan/fitting.hpp"
#include "divplan/io.hpp"
#include "divplan/planner.hpp"
#include "divplan/records.hpp"
#include "divplan/scaling_law.hpp"
#include "divplan/simulator.hpp"
#include "divplan/svg.hpp"

namespace divplan {

namespace {

/// Default mirroring the reference inventory: 1000 classes with at most
/// 1300 samples each.
ClassBudget default_inventory_budget() { return ClassBudget{1000, 1300}; }

std::vector<PerformanceRecord> load_records(const std::string& path, const std::string& task) {
    std::vector<PerformanceRecord> records = io::read_records_csv(path);
    if (!task.empty()) {
        std::erase_if(records, [&](const PerformanceRecord& r) { return r.task != task; });
        if (records.empty())
            fail(errc::empty_input, "no records for task \"" + task + "\" in " + path);
        return records;
    }
    std::set<std::string> tasks;
    for (const auto& r : records) tasks.insert(r.task);
    if (tasks.size() > 1)
        fail(errc::mixed_task,
             "records cover " + std::to_string(tasks.size()) + " tasks; select one with --task");
    return records;
}

ClassBudget load_budget(const std::string& path, const ClassBudget& fallback) {
    return path.empty() ? fallback : io::read_budget_json(path);
}

void print_fit_report(std::ostream& out, const FitReport& report) {
    out << "fitted ratio law at N=" << report.law.fitted_at_N << "\n"
        << "  A = " << io::format_double(report.law.A) << "\n"
        << "  B = " << io::format_double(report.law.B) << "\n"
        << "  c = " << io::format_double(report.law.c) << "\n"
        << "  residual rms = " << io::format_double(report.residual_rms)
        << "  max abs residual = " << io::format_double(report.max_abs_residual)
        << "  design condition = " << io::format_double(report.design_condition) << "\n";
    if (report.monotone_regime) {
        out << "  monotone regime: yes (no interior optimum)\n";
    } else {
        out << "  optimal ratio x = " << io::format_double(optimal_ratio(report.law)) << "\n";
    }
}

void print_plan(std::ostream& out, const PlanResult& plan) {
    out << "method = " << to_string(plan.method) << "\n"
        << "target N = " << plan.target_N << "\n"
        << "K = " << plan.K << " (clamped: " << (plan.clamped ? "yes" : "no") << ")\n"
        << "n nominal = " << plan.n_nominal.num << "/" << plan.n_nominal.den << " = "
        << io::format_double(plan.n_nominal.value()) << "\n";
    if (plan.predicted_error)
        out << "predicted error = " << io::format_double(*plan.predicted_error) << " %\n";
    if (!plan.warning.empty()) out << "warning = " << plan.warning << "\n";
}

SampleAccount nominal_accounting(const PlanResult& plan,
                                 std::span<const PerformanceRecord> fit_records,
                                 bool final_build) {
    std::vector<BuildInput> builds;
    if (!fit_records.empty()) {
        std::set<std::pair<std::int64_t, std::int64_t>> cells;
        for (const auto& r : fit_records) cells.insert({r.N, r.K});
        for (const auto& [n, k] : cells) builds.push_back(BuildInput::from_size(n, k));
    }
    if (final_build) builds.push_back(BuildInput::from_size(plan.target_N, plan.K));
    return account_samples(builds, DedupMode::disjoint_sum);
}

struct CommandContext {
    std::ostream& out;
    std::ostream& err;
};

void add_fit(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("fit", "Fit the ratio law from a records CSV");
    auto records_path = std::make_shared<std::string>();
    auto n = std::make_shared<std::int64_t>(0);
    auto out_path = std::make_shared<std::string>();
    auto task = std::make_shared<std::string>();
    cmd->add_option("--records", *records_path, "records CSV path")->required();
    cmd->add_option("--n", *n, "pre-training dataset size all records share")->required();
    cmd->add_option("--out", *out_path, "model JSON output path")->required();
    cmd->add_option("--task", *task, "select a single task from the file");
    cmd->callback([&ctx, records_path, n, out_path, task] {
        const auto records = load_records(*records_path, *task);
        const FitReport report = fit_from_records(records, *n);
        io::write_model_json(*out_path, report);
        print_fit_report(ctx.out, report);
        ctx.out << "wrote model to " << *out_path << "\n";
    });
}

void add_predict(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("predict", "Predict the optimal class count from a model");
    auto model_path = std::make_shared<std::string>();
    auto target_n = std::make_shared<std::int64_t>(0);
    auto budget_path = std::make_shared<std::string>();
    cmd->add_option("--model", *model_path, "model JSON path")->required();
    cmd->add_option("--target-n", *target_n, "target pre-training dataset size")->required();
    cmd->add_option("--budget", *budget_path, "budget JSON path (optional)");
    cmd->callback([&ctx, model_path, target_n, budget_path] {
        const FitReport report = io::read_model_json(*model_path);
        if (report.monotone_regime)
            fail(errc::monotone_regime, "model is in the monotone regime, no interior optimum");
        const ClassBudget budget = load_budget(*budget_path, ClassBudget::unlimited());
        const KRange range = feasible_k_range(*target_n, budget);
        const double ratio = optimal_ratio(report.law);
        const double analytic = optimal_classes(report.law, *target_n);
        const std::int64_t rounded = std::max<std::int64_t>(1, round_half_even(analytic));
        const std::int64_t chosen = range.clamp(rounded);
        ctx.out << "optimal ratio x = " << io::format_double(ratio) << "\n"
                << "optimal classes (real) = " << io::format_double(analytic) << "\n"
                << "K = " << chosen << " (clamped: " << (chosen != rounded ? "yes" : "no")
                << ")\n"
                << "predicted error = "
                << io::format_double(predicted_min_error(report.law, *target_n)) << " %\n";
    });
}

void add_plan(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("plan", "Choose a class count for a target dataset size");
    auto method_name = std::make_shared<std::string>();
    auto target_n = std::make_shared<std::int64_t>(0);
    auto records_path = std::make_shared<std::string>();
    auto budget_path = std::make_shared<std::string>();
    auto oracle_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto task = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto replicates = std::make_shared<std::int64_t>(5);
    cmd->add_option("--method", *method_name,
                    "standard | grid-search | theo-optimal | emp-optimal | extrapolation")
        ->required();
    cmd->add_option("--target-n", *target_n, "target pre-training dataset size")->required();
    cmd->add_option("--records", *records_path, "records CSV (fit or grid data)");
    cmd->add_option("--budget", *budget_path, "budget JSON path");
    cmd->add_option("--oracle", *oracle_path, "oracle JSON (emp-optimal measurement)");
    cmd->add_option("--out", *out_path, "plan JSON output path");
    cmd->add_option("--task", *task, "select a single task from the records");
    cmd->add_option("--seed", *seed, "seed for emp-optimal measurement (default 0)");
    cmd->add_option("--replicates", *replicates, "replicates for emp-optimal (default 5)");
    cmd->callback([&ctx, method_name, target_n, records_path, budget_path, oracle_path, out_path,
                   task, seed, replicates] {
        const PlanMethod method = plan_method_from_string(*method_name);
        const ClassBudget budget = load_budget(*budget_path, ClassBudget::unlimited());
        std::vector<PerformanceRecord> records;
        if (!records_path->empty()) records = load_records(*records_path, *task);

        PlanResult plan;
        std::optional<SampleAccount> accounting;
        switch (method) {
            case PlanMethod::standard: {
                if (budget_path->empty())
                    fail(errc::domain, "--method standard requires --budget");
                plan = plan_standard(budget, *target_n);
                accounting = nominal_accounting(plan, {}, true);
                break;
            }
            case PlanMethod::grid_search: {
                if (records_path->empty())
                    fail(errc::empty_input, "--method grid-search requires --records");
                plan = plan_grid_search(records);
                if (plan.target_N != *target_n)
                    fail(errc::mixed_n, "records are at N=" + std::to_string(plan.target_N) +
                                            ", --target-n says " + std::to_string(*target_n));
                accounting = nominal_accounting(plan, records, false);
                break;
            }
            case PlanMethod::theo_optimal: {
                if (records_path->empty())
                    fail(errc::empty_input, "--method theo-optimal requires --records");
                plan = plan_theo_optimal(records, budget);
                if (plan.target_N != *target_n)
                    fail(errc::mixed_n, "records are at N=" + std::to_string(plan.target_N) +
                                            ", --target-n says " + std::to_string(*target_n));
                accounting = nominal_accounting(plan, records, false);
                break;
            }
            case PlanMethod::emp_optimal: {
                if (records_path->empty())
                    fail(errc::empty_input, "--method emp-optimal requires --records");
                if (oracle_path->empty())
                    fail(errc::domain, "--method emp-optimal requires --oracle to measure with");
                OracleSpec oracle = io::read_oracle_json(*oracle_path);
                oracle.seed = *seed;
                plan = plan_emp_optimal(oracle, records, budget, *replicates);
                if (plan.target_N != *target_n)
                    fail(errc::mixed_n, "records are at N=" + std::to_string(plan.target_N) +
                                            ", --target-n says " + std::to_string(*target_n));
                accounting = nominal_accounting(plan, records, true);
                break;
            }
            case PlanMethod::extrapolation: {
                if (records_path->empty())
                    fail(errc::empty_input, "--method extrapolation requires pilot --records");
                plan = plan_extrapolation(records, *target_n, budget);
                accounting = nominal_accounting(plan, records, true);
                break;
            }
        }
        print_plan(ctx.out, plan);
        if (accounting)
            ctx.out << "samples used (" << to_string(accounting->dedup_mode)
                    << ") = " << accounting->total_samples << "\n";
        if (!out_path->empty()) {
            io::write_plan_json(*out_path, plan, accounting);
            ctx.out << "wrote plan to " << *out_path << "\n";
        }
    });
}

void add_compose(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("compose", "Materialize a dataset manifest from an inventory");
    auto inventory_path = std::make_shared<std::string>();
    auto n = std::make_shared<std::int64_t>(0);
    auto k = std::make_shared<std::int64_t>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--inventory", *inventory_path, "inventory CSV path")->required();
    cmd->add_option("--n", *n, "total samples N")->required();
    cmd->add_option("--k", *k, "class count K")->required();
    cmd->add_option("--seed", *seed, "sampling seed (default 0)");
    cmd->add_option("--out", *out_path, "manifest JSON output path")->required();
    cmd->callback([&ctx, inventory_path, n, k, seed, out_path] {
        const ClassInventory inventory = io::read_inventory_csv(*inventory_path);
        const DatasetManifest manifest = compose_manifest(inventory, *n, *k, *seed);
        io::write_manifest_json(*out_path, manifest);
        ctx.out << "composed manifest: N=" << manifest.N << " K=" << manifest.K
                << " seed=" << manifest.seed << " generator=" << manifest.generator << "\n"
                << "wrote manifest to " << *out_path << "\n";
    });
}

void add_simulate(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("simulate", "Generate records from a synthetic oracle");
    auto oracle_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto sweep_path = std::make_shared<std::string>();
    auto budget_path = std::make_shared<std::string>();
    auto n_values = std::make_shared<std::vector<std::int64_t>>();
    auto k_values = std::make_shared<std::vector<std::int64_t>>();
    auto replicates = std::make_shared<std::int64_t>(5);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--oracle", *oracle_path, "oracle JSON path")->required();
    cmd->add_option("--out", *out_path, "records CSV output path")->required();
    cmd->add_option("--sweep-out", *sweep_path, "also write the trade-off table CSV here");
    cmd->add_option("--budget", *budget_path, "budget JSON (default: 1000 classes x 1300)");
    cmd->add_option("--n-values", *n_values, "dataset sizes (default 1K..100K)")->delimiter(',');
    cmd->add_option("--k-values", *k_values, "class counts (default 2..1000)")->delimiter(',');
    cmd->add_option("--replicates", *replicates, "replicates per cell (default 5)");
    cmd->add_option("--seed", *seed, "noise seed (default 0)");
    cmd->callback([&ctx, oracle_path, out_path, sweep_path, budget_path, n_values, k_values,
                   replicates, seed] {
        OracleSpec oracle = io::read_oracle_json(*oracle_path);
        oracle.seed = *seed;
        ExperimentGrid grid = ExperimentGrid::defaults();
        if (!n_values->empty()) grid.N_values = *n_values;
        if (!k_values->empty()) grid.K_values = *k_values;
        grid.replicates = *replicates;
        const ClassBudget budget = load_budget(*budget_path, default_inventory_budget());
        const SimulationResult result = simulate_records(oracle, grid, budget);
        io::write_records_csv(*out_path, result.records);
        ctx.out << "simulated " << result.records.size() << " records ("
                << result.skipped.size() << " infeasible cells skipped)\n"
                << "wrote records to " << *out_path << "\n";
        if (!sweep_path->empty()) {
            const auto rows = sweep_tradeoff(oracle, grid, budget);
            io::write_sweep_csv(std::filesystem::path(*sweep_path), rows);
            ctx.out << "wrote sweep table to " << *sweep_path << "\n";
        }
    });
}

void add_account(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("account", "Total samples consumed by a set of builds");
    auto manifest_paths = std::make_shared<std::vector<std::string>>();
    auto sizes = std::make_shared<std::vector<std::int64_t>>();
    auto mode_name = std::make_shared<std::string>("union-unique");
    cmd->add_option("--manifest", *manifest_paths, "manifest JSON path (repeatable)");
    cmd->add_option("--size", *sizes, "size-only build (repeatable)");
    cmd->add_option("--mode", *mode_name, "disjoint-sum | union-unique (default union-unique)");
    cmd->callback([&ctx, manifest_paths, sizes, mode_name] {
        std::vector<BuildInput> builds;
        for (const auto& path : *manifest_paths)
            builds.push_back(BuildInput::from_manifest(io::read_manifest_json(path)));
        for (std::int64_t size : *sizes) builds.push_back(BuildInput::from_size(size));
        const SampleAccount account = account_samples(builds, dedup_mode_from_string(*mode_name));
        ctx.out << "builds = " << account.builds.size() << "\n"
                << "mode = " << to_string(account.dedup_mode) << "\n"
                << "total samples = " << account.total_samples << "\n";
    });
}

void add_bound(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("bound", "Evaluate a generalization bound");
    auto theorem = std::make_shared<int>(0);
    auto consts1 = std::make_shared<Theorem1Constants>();
    auto consts2 = std::make_shared<Theorem2Constants>();
    auto classes = std::make_shared<std::int64_t>(1);
    auto samples_per_class = std::make_shared<std::int64_t>(1);
    auto total_samples = std::make_shared<std::int64_t>(1);
    cmd->add_option("--theorem", *theorem, "1 (two-step) or 2 (cluster relabeling)")->required();
    cmd->add_option("--max-loss", consts1->max_loss, "uniform loss bound");
    cmd->add_option("--complexity", consts1->complexity, "Gaussian-complexity coefficient");
    cmd->add_option("--lipschitz", consts1->lipschitz, "loss Lipschitz constant");
    cmd->add_option("--delta", consts1->delta, "confidence parameter in (0,1)");
    cmd->add_option("--nu0", consts1->nu0, "additive transfer constant (theorem 1)");
    cmd->add_option("--nu1", consts1->nu1, "multiplicative transfer constant (theorem 1)");
    cmd->add_option("--m0", consts1->m0, "stability constant, additive side (theorem 1)");
    cmd->add_option("--m1", consts1->m1, "stability constant, multiplicative side (theorem 1)");
    cmd->add_option("--c0", consts1->c0, "concentration constant, additive side");
    cmd->add_option("--c1", consts1->c1, "concentration constant, multiplicative side");
    cmd->add_option("--nu0-px", consts2->nu0_px, "marginal constant, multiplicative (theorem 2)");
    cmd->add_option("--nu1-px", consts2->nu1_px, "marginal constant, additive (theorem 2)");
    cmd->add_option("--classes", *classes, "class count K");
    cmd->add_option("--samples-per-class", *samples_per_class, "per-class samples n (theorem 1)");
    cmd->add_option("--total-samples", *total_samples, "dataset size N (theorem 2)");
    cmd->callback([&ctx, theorem, consts1, consts2, classes, samples_per_class, total_samples] {
        if (*theorem == 1) {
            ctx.out << "bound = "
                    << io::format_double(theorem1_bound(*consts1, *classes, *samples_per_class))
                    << "\n";
        } else if (*theorem == 2) {
            consts2->max_loss = consts1->max_loss;
            consts2->complexity = consts1->complexity;
            consts2->lipschitz = consts1->lipschitz;
            consts2->delta = consts1->delta;
            consts2->c0 = consts1->c0;
            consts2->c1 = consts1->c1;
            ctx.out << "bound = "
                    << io::format_double(theorem2_bound(*consts2, *total_samples, *classes))
                    << "\n";
        } else {
            fail(errc::domain, "--theorem must be 1 or 2");
        }
    });
}

void add_plot(CLI::App& app, CommandContext& ctx) {
    auto* cmd = app.add_subcommand("plot", "Render a sweep table as an SVG line chart");
    auto table_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    cmd->add_option("--table", *table_path, "sweep table CSV path")->required();
    cmd->add_option("--out", *out_path, "SVG output path")->required();
    cmd->callback([&ctx, table_path, out_path] {
        const auto rows = io::read_sweep_csv(*table_path);
        io::write_text_file(*out_path, svg::render_sweep_chart(rows));
        ctx.out << "wrote chart to " << *out_path << "\n";
    });
}

nlohmann::json error_json(const std::string& code, const std::string& message) {
    return nlohmann::json{{"code", code}, {"message", message}};
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Class-to-sample ratio planning for supervised pre-training datasets"};
    app.name("divplan");
    app.require_subcommand(1);
    CommandContext ctx{out, err};

    add_fit(app, ctx);
    add_predict(app, ctx);
    add_plan(app, ctx);
    add_compose(app, ctx);
    add_simulate(app, ctx);
    add_account(app, ctx);
    add_bound(app, ctx);
    add_plot(app, ctx);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << error_json("usage", e.what()).dump() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << error_json(e.code(), e.what()).dump() << "\n";
        return e.code() == errc::io ? 3 : 2;
    } catch (const std::exception& e) {
        err << "error: " << error_json("internal", e.what()).dump() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace divplan

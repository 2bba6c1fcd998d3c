#include "divplan/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "divplan/errors.hpp"
#include "divplan/fitting.hpp"
#include "divplan/rng.hpp"

namespace divplan {

namespace {

double clamp_percent(double value) { return std::min(100.0, std::max(0.0, value)); }

bool feasible_cell(std::int64_t total_samples, std::int64_t classes, const ClassBudget& budget) {
    if (classes < 1 || classes > total_samples) return false;
    if (classes > budget.total_classes) return false;
    const std::int64_t per_class = (total_samples + classes - 1) / classes;
    return per_class <= budget.max_per_class;
}

}  // namespace

ExperimentGrid ExperimentGrid::defaults() {
    ExperimentGrid grid;
    grid.N_values = {1000, 2000, 5000, 10000, 20000, 50000, 100000};
    grid.K_values = {2, 5, 10, 20, 50, 100, 200, 500, 1000};
    grid.replicates = 5;
    return grid;
}

double oracle_mean(const OracleSpec& oracle, std::int64_t total_samples, std::int64_t classes) {
    if (const auto* terms = std::get_if<BoundTerms>(&oracle.shape))
        return eval_bound(*terms, total_samples, classes);
    const auto& cluster = std::get<ClusterShape>(oracle.shape);
    if (cluster.a < 0 || cluster.b < 0 || cluster.c0 < 0)
        fail(errc::domain, "cluster oracle constants must be non-negative");
    if (total_samples < 1 || classes < 1) fail(errc::domain, "N and K must be >= 1");
    return cluster.a / std::sqrt(static_cast<double>(total_samples)) +
           cluster.b / std::sqrt(static_cast<double>(classes)) + cluster.c0;
}

std::int64_t oracle_argmin_classes(const OracleSpec& oracle, std::int64_t total_samples,
                                   const ClassBudget& budget) {
    const KRange range = feasible_k_range(total_samples, budget);
    std::int64_t best_k = range.K_min;
    double best = oracle_mean(oracle, total_samples, best_k);
    for (std::int64_t k = range.K_min + 1; k <= range.K_max; ++k) {
        const double value = oracle_mean(oracle, total_samples, k);
        if (value < best) {
            best = value;
            best_k = k;
        }
    }
    return best_k;
}

SimulationResult simulate_records(const OracleSpec& oracle, const ExperimentGrid& grid,
                                  const ClassBudget& budget) {
    if (grid.N_values.empty() || grid.K_values.empty() || grid.replicates < 1)
        fail(errc::empty_input, "experiment grid is empty");
    if (oracle.noise_sigma < 0.0) fail(errc::domain, "noise sigma must be >= 0");

    std::vector<std::int64_t> n_values = grid.N_values;
    std::vector<std::int64_t> k_values = grid.K_values;
    std::sort(n_values.begin(), n_values.end());
    n_values.erase(std::unique(n_values.begin(), n_values.end()), n_values.end());
    std::sort(k_values.begin(), k_values.end());
    k_values.erase(std::unique(k_values.begin(), k_values.end()), k_values.end());

    SimulationResult result;
    for (std::int64_t n : n_values) {
        for (std::int64_t k : k_values) {
            if (!feasible_cell(n, k, budget)) {
                result.skipped.emplace_back(n, k);
                continue;
            }
            const double mean = oracle_mean(oracle, n, k);
            for (std::int64_t rep = 0; rep < grid.replicates; ++rep) {
                double error = mean;
                if (oracle.noise_sigma > 0.0) {
                    SplitMix64 stream =
                        derive_stream(oracle.seed, static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(rep));
                    error += oracle.noise_sigma * stream.next_gaussian();
                }
                result.records.push_back(
                    PerformanceRecord{oracle.task, n, k, rep, clamp_percent(error)});
            }
        }
    }
    if (result.records.empty()) fail(errc::infeasible, "no feasible grid cell under this budget");
    return result;
}

std::vector<SweepRow> sweep_tradeoff(const OracleSpec& oracle, const ExperimentGrid& grid,
                                     const ClassBudget& budget) {
    const SimulationResult sim = simulate_records(oracle, grid, budget);
    std::vector<SweepRow> rows;
    std::size_t i = 0;
    const auto& records = sim.records;
    while (i < records.size()) {
        std::size_t j = i;
        while (j < records.size() && records[j].N == records[i].N && records[j].K == records[i].K)
            ++j;
        SweepRow row;
        row.N = records[i].N;
        row.K = records[i].K;
        row.ratio = DiversityPoint(row.N, row.K).ratio().value();
        row.count = static_cast<std::int64_t>(j - i);
        double sum = 0.0;
        for (std::size_t m = i; m < j; ++m) sum += records[m].error_percent;
        row.mean_error = sum / static_cast<double>(row.count);
        if (row.count > 1) {
            double ss = 0.0;
            for (std::size_t m = i; m < j; ++m)
                ss += (records[m].error_percent - row.mean_error) *
                      (records[m].error_percent - row.mean_error);
            row.stddev = std::sqrt(ss / static_cast<double>(row.count - 1));
        }
        rows.push_back(row);
        i = j;
    }
    return rows;
}

std::int64_t PlannerEvaluation::failures() const {
    std::int64_t count = 0;
    for (const auto& trial : trials) count += trial.failed ? 1 : 0;
    return count;
}

double PlannerEvaluation::median_rel_k_error() const {
    std::vector<double> errors;
    for (const auto& trial : trials)
        if (!trial.failed) errors.push_back(trial.rel_k_error);
    if (errors.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(errors.begin(), errors.end());
    const std::size_t mid = errors.size() / 2;
    if (errors.size() % 2 == 1) return errors[mid];
    return 0.5 * (errors[mid - 1] + errors[mid]);
}

std::int64_t PlannerEvaluation::count_within(double rel_tol) const {
    std::int64_t count = 0;
    for (const auto& trial : trials)
        if (!trial.failed && trial.rel_k_error <= rel_tol) ++count;
    return count;
}

PlannerEvaluation evaluate_planner(const OracleSpec& oracle, const PilotSpec& pilot,
                                   std::int64_t target_samples, std::int64_t trials,
                                   const ClassBudget& budget) {
    if (trials < 1) fail(errc::domain, "need at least one trial");
    PlannerEvaluation evaluation;
    evaluation.true_argmin_K = oracle_argmin_classes(oracle, target_samples, budget);
    evaluation.oracle_min_error = oracle_mean(oracle, target_samples, evaluation.true_argmin_K);

    ExperimentGrid pilot_grid;
    pilot_grid.N_values = {pilot.N};
    pilot_grid.K_values = pilot.K_values;
    pilot_grid.replicates = pilot.replicates;

    for (std::int64_t t = 0; t < trials; ++t) {
        TrialOutcome outcome;
        outcome.trial = static_cast<std::uint64_t>(t);
        OracleSpec trial_oracle = oracle;
        trial_oracle.seed = derive_stream(oracle.seed, 0x747269616cULL, static_cast<std::uint64_t>(t)).next();
        try {
            const SimulationResult sim = simulate_records(trial_oracle, pilot_grid, budget);
            const PlanResult plan = plan_extrapolation(sim.records, target_samples, budget);
            outcome.chosen_K = plan.K;
            outcome.clamped = plan.clamped;
            outcome.rel_k_error =
                std::abs(static_cast<double>(plan.K - evaluation.true_argmin_K)) /
                static_cast<double>(evaluation.true_argmin_K);
            outcome.regret =
                oracle_mean(oracle, target_samples, plan.K) - evaluation.oracle_min_error;
        } catch (const Error& e) {
            outcome.failed = true;
            outcome.failure_code = e.code();
        }
        evaluation.trials.push_back(std::move(outcome));
    }
    return evaluation;
}

PlanResult plan_emp_optimal(const OracleSpec& oracle, std::span<const PerformanceRecord> records,
                            const ClassBudget& budget, std::int64_t replicates) {
    if (replicates < 1) fail(errc::domain, "need at least one replicate");
    PlanResult plan = plan_theo_optimal(records, budget);
    plan.method = PlanMethod::emp_optimal;

    ExperimentGrid cell;
    cell.N_values = {plan.target_N};
    cell.K_values = {plan.K};
    cell.replicates = replicates;
    const SimulationResult sim = simulate_records(oracle, cell, budget);
    double sum = 0.0;
    for (const auto& record : sim.records) sum += record.error_percent;
    plan.predicted_error = sum / static_cast<double>(sim.records.size());
    return plan;
}

}  // namespace divplan

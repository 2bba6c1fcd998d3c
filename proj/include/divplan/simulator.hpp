#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "divplan/planner.hpp"
#include "divplan/records.hpp"
#include "divplan/scaling_law.hpp"

namespace divplan {

/// Error shape of the cluster-relabeling setting: a/sqrt(N) + b/sqrt(K) + c0.
/// No trade-off here; the value only improves as K grows.
struct ClusterShape {
    double a = 0.0;
    double b = 0.0;
    double c0 = 0.0;
};

/// Synthetic stand-in for the pre-train-and-probe measurement pipeline:
/// a closed-form mean error plus seeded Gaussian noise per replicate,
/// truncated to [0, 100].
struct OracleSpec {
    std::variant<BoundTerms, ClusterShape> shape;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::string task = "oracle";

    bool is_two_step() const { return std::holds_alternative<BoundTerms>(shape); }
};

/// Cartesian (N, K) sweep with a replicate count per cell.
struct ExperimentGrid {
    std::vector<std::int64_t> N_values;
    std::vector<std::int64_t> K_values;
    std::int64_t replicates = 5;

    /// N in {1K..100K}, K in {2..1000}, 5 replicates.
    static ExperimentGrid defaults();
};

/// One point of a trade-off curve: mean/stddev over replicates at (N, K).
struct SweepRow {
    std::int64_t N = 0;
    std::int64_t K = 0;
    double ratio = 0.0;
    double mean_error = 0.0;
    double stddev = 0.0;
    std::int64_t count = 0;
};

struct SimulationResult {
    std::vector<PerformanceRecord> records;  // sorted by (N, K, replicate)
    std::vector<std::pair<std::int64_t, std::int64_t>> skipped;  // infeasible (N, K)
};

/// Noise-free mean the oracle would report at (N, K).
double oracle_mean(const OracleSpec& oracle, std::int64_t total_samples, std::int64_t classes);

/// Exhaustive integer argmin of the oracle mean over the feasible K range.
std::int64_t oracle_argmin_classes(const OracleSpec& oracle, std::int64_t total_samples,
                                   const ClassBudget& budget);

/// Records for every feasible grid cell. Noise streams are derived from
/// (seed, N, K, replicate), so results do not depend on evaluation order.
SimulationResult simulate_records(const OracleSpec& oracle, const ExperimentGrid& grid,
                                  const ClassBudget& budget);

/// Long-format table of error against class-to-sample ratio, one curve per
/// N, for plotting trade-off curves.
std::vector<SweepRow> sweep_tradeoff(const OracleSpec& oracle, const ExperimentGrid& grid,
                                     const ClassBudget& budget);

/// Pilot design used to estimate the optimal ratio cheaply.
struct PilotSpec {
    std::int64_t N = 5000;
    std::vector<std::int64_t> K_values = {10, 50, 200};
    std::int64_t replicates = 5;
};

struct TrialOutcome {
    std::uint64_t trial = 0;
    bool failed = false;        // fit/plan raised an error
    std::string failure_code;
    std::int64_t chosen_K = 0;
    bool clamped = false;
    double rel_k_error = 0.0;   // |chosen - argmin| / argmin
    double regret = 0.0;        // oracle mean at chosen minus at argmin
};

struct PlannerEvaluation {
    std::int64_t true_argmin_K = 0;
    double oracle_min_error = 0.0;
    std::vector<TrialOutcome> trials;

    std::int64_t failures() const;
    double median_rel_k_error() const;                  // over non-failed trials
    std::int64_t count_within(double rel_tol) const;    // non-failed trials within tolerance
};

/// Scores the extrapolation method against the oracle's ground truth:
/// each trial simulates noisy pilot records, extrapolates a class count for
/// the target size, and compares it with the exhaustive argmin. Errors from
/// fitting or planning count as failed trials, not aborts.
PlannerEvaluation evaluate_planner(const OracleSpec& oracle, const PilotSpec& pilot,
                                   std::int64_t target_samples, std::int64_t trials,
                                   const ClassBudget& budget);

/// Theo-optimal class count re-scored by measurement: plans K from the
/// records' fit, then replaces the fitted estimate with the mean of
/// simulated measurements at (target_N, K).
PlanResult plan_emp_optimal(const OracleSpec& oracle, std::span<const PerformanceRecord> records,
                            const ClassBudget& budget, std::int64_t replicates = 5);

}  // namespace divplan

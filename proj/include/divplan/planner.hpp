#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divplan/composer.hpp"
#include "divplan/fitting.hpp"
#include "divplan/rational.hpp"
#include "divplan/records.hpp"
#include "divplan/scaling_law.hpp"

namespace divplan {

/// Inventory-side feasibility limits: how many classes exist at all and how
/// many samples each class can contribute.
struct ClassBudget {
    std::int64_t total_classes = 0;
    std::int64_t max_per_class = 0;

    /// Budget that never constrains (bounded only by K <= N).
    static ClassBudget unlimited();
};

enum class PlanMethod { standard, grid_search, theo_optimal, emp_optimal, extrapolation };

std::string to_string(PlanMethod method);
PlanMethod plan_method_from_string(const std::string& name);

/// A chosen class count for a target dataset size, with the prediction and
/// feasibility bookkeeping that produced it.
struct PlanResult {
    PlanMethod method = PlanMethod::standard;
    std::int64_t target_N = 0;
    std::int64_t K = 0;
    Rational n_nominal;  // target_N / K, exact
    std::optional<double> predicted_error;
    bool clamped = false;
    std::optional<RatioLaw> law_used;
    std::string warning;  // e.g. "monotone_regime"; empty when clean
};

/// Inclusive feasible class-count interval for a dataset size.
struct KRange {
    std::int64_t K_min = 1;
    std::int64_t K_max = 1;

    bool contains(std::int64_t classes) const { return classes >= K_min && classes <= K_max; }
    std::int64_t clamp(std::int64_t classes) const;
};

/// K_min = ceil(N / max_per_class), K_max = min(total_classes, N).
/// Errors with "infeasible" when the interval is empty.
KRange feasible_k_range(std::int64_t target_samples, const ClassBudget& budget);

/// Round-half-to-even, the rounding applied to analytic class counts.
std::int64_t round_half_even(double value);

/// Uses every available class, the conventional design choice.
PlanResult plan_standard(const ClassBudget& budget, std::int64_t target_samples);

/// Picks the class count with the lowest mean measured error; ties go to
/// the smaller K. All records must share one dataset size.
PlanResult plan_grid_search(std::span<const PerformanceRecord> records);

/// Fits the ratio law on records at the target size and rounds the analytic
/// optimum into the feasible range. The predicted error is the fitted law's
/// estimate, not a measurement. A monotone fit yields the feasible boundary
/// in the descending direction, clamped, with a warning code.
PlanResult plan_theo_optimal(std::span<const PerformanceRecord> records,
                             const ClassBudget& budget);

/// Fits at a small pilot size, takes the size-invariant optimal ratio, and
/// reuses it: K = round(sqrt(ratio * target_N)), clamped to feasibility.
/// The same fit serves any target size without refitting.
PlanResult plan_extrapolation(std::span<const PerformanceRecord> pilot_records,
                              std::int64_t target_samples, const ClassBudget& budget);

enum class DedupMode { disjoint_sum, union_unique };

std::string to_string(DedupMode mode);
DedupMode dedup_mode_from_string(const std::string& name);

/// One dataset construction entering the sample accounting: either a bare
/// size or a full manifest (required for overlap-aware counting).
struct BuildInput {
    std::int64_t N = 0;
    std::int64_t K = 0;
    std::optional<DatasetManifest> manifest;

    static BuildInput from_size(std::int64_t samples, std::int64_t classes = 0);
    static BuildInput from_manifest(DatasetManifest manifest);
};

/// Total samples a set of builds consumed, either as a plain sum or as the
/// number of distinct (class, sample) pairs across all manifests.
struct SampleAccount {
    struct Build {
        std::int64_t N = 0;
        std::int64_t K = 0;
    };
    std::vector<Build> builds;
    DedupMode dedup_mode = DedupMode::union_unique;
    std::int64_t total_samples = 0;
};

SampleAccount account_samples(std::span<const BuildInput> builds, DedupMode mode);

}  // namespace divplan

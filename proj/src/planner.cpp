#include "divplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "divplan/errors.hpp"

namespace divplan {

namespace {

constexpr std::int64_t kUnlimited = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t records_dataset_size(std::span<const PerformanceRecord> records) {
    if (records.empty()) fail(errc::empty_input, "no records");
    const std::int64_t n = records.front().N;
    for (const auto& r : records)
        if (r.N != n) fail(errc::mixed_n, "records mix dataset sizes");
    return n;
}

/// Boundary K for a monotone-regime fit: the bound still descends toward
/// one end of the ratio axis, so plan at that end of the feasible range.
std::int64_t descending_boundary(const RatioLaw& law, const KRange& range) {
    return (law.A <= 0.0) ? range.K_max : range.K_min;
}

PlanResult plan_from_fit(PlanMethod method, const FitReport& fit, std::int64_t target_samples,
                         const ClassBudget& budget) {
    const KRange range = feasible_k_range(target_samples, budget);
    PlanResult plan;
    plan.method = method;
    plan.target_N = target_samples;
    plan.law_used = fit.law;
    if (fit.monotone_regime) {
        plan.K = descending_boundary(fit.law, range);
        plan.clamped = true;
        plan.warning = std::string(errc::monotone_regime);
    } else {
        const double analytic = optimal_classes(fit.law, target_samples);
        const std::int64_t rounded = std::max<std::int64_t>(1, round_half_even(analytic));
        plan.K = range.clamp(rounded);
        plan.clamped = plan.K != rounded;
        plan.predicted_error = predicted_min_error(fit.law, target_samples);
    }
    plan.n_nominal = Rational(target_samples, plan.K);
    return plan;
}

}  // namespace

ClassBudget ClassBudget::unlimited() { return ClassBudget{kUnlimited, kUnlimited}; }

std::string to_string(PlanMethod method) {
    switch (method) {
        case PlanMethod::standard: return "standard";
        case PlanMethod::grid_search: return "grid_search";
        case PlanMethod::theo_optimal: return "theo_optimal";
        case PlanMethod::emp_optimal: return "emp_optimal";
        case PlanMethod::extrapolation: return "extrapolation";
    }
    fail(errc::domain, "unknown plan method");
}

PlanMethod plan_method_from_string(const std::string& name) {
    if (name == "standard") return PlanMethod::standard;
    if (name == "grid_search" || name == "grid-search") return PlanMethod::grid_search;
    if (name == "theo_optimal" || name == "theo-optimal") return PlanMethod::theo_optimal;
    if (name == "emp_optimal" || name == "emp-optimal") return PlanMethod::emp_optimal;
    if (name == "extrapolation") return PlanMethod::extrapolation;
    fail(errc::domain, "unknown plan method \"" + name + "\"");
}

std::int64_t KRange::clamp(std::int64_t classes) const {
    return std::min(std::max(classes, K_min), K_max);
}

KRange feasible_k_range(std::int64_t target_samples, const ClassBudget& budget) {
    if (target_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    if (budget.total_classes < 1 || budget.max_per_class < 1)
        fail(errc::domain, "budget limits must be >= 1");
    KRange range;
    range.K_min = ceil_div(target_samples, budget.max_per_class);
    range.K_max = std::min(budget.total_classes, target_samples);
    if (range.K_min > range.K_max)
        fail(errc::infeasible,
             "target size " + std::to_string(target_samples) + " infeasible for this inventory (needs >= " +
                 std::to_string(range.K_min) + " classes, at most " + std::to_string(range.K_max) +
                 " available)");
    return range;
}

std::int64_t round_half_even(double value) {
    const double floor_value = std::floor(value);
    const double frac = value - floor_value;
    auto lower = static_cast<std::int64_t>(floor_value);
    if (frac > 0.5) return lower + 1;
    if (frac < 0.5) return lower;
    return (lower % 2 == 0) ? lower : lower + 1;
}

PlanResult plan_standard(const ClassBudget& budget, std::int64_t target_samples) {
    const KRange range = feasible_k_range(target_samples, budget);
    if (!range.contains(budget.total_classes))
        fail(errc::infeasible, "standard choice K=" + std::to_string(budget.total_classes) +
                                   " infeasible for N=" + std::to_string(target_samples));
    PlanResult plan;
    plan.method = PlanMethod::standard;
    plan.target_N = target_samples;
    plan.K = budget.total_classes;
    plan.n_nominal = Rational(target_samples, plan.K);
    return plan;
}

PlanResult plan_grid_search(std::span<const PerformanceRecord> records) {
    const std::int64_t n = records_dataset_size(records);
    const auto cells = aggregate_records(records, n);
    // cells are sorted by K, so strict < keeps the smaller K on a tie
    const AggregatedCell* best = &cells.front();
    for (const auto& cell : cells)
        if (cell.mean_error < best->mean_error) best = &cell;
    PlanResult plan;
    plan.method = PlanMethod::grid_search;
    plan.target_N = n;
    plan.K = best->K;
    plan.n_nominal = Rational(n, best->K);
    plan.predicted_error = best->mean_error;
    return plan;
}

PlanResult plan_theo_optimal(std::span<const PerformanceRecord> records,
                             const ClassBudget& budget) {
    const std::int64_t n = records_dataset_size(records);
    return plan_from_fit(PlanMethod::theo_optimal, fit_from_records(records, n), n, budget);
}

PlanResult plan_extrapolation(std::span<const PerformanceRecord> pilot_records,
                              std::int64_t target_samples, const ClassBudget& budget) {
    const std::int64_t pilot_n = records_dataset_size(pilot_records);
    const FitReport fit = fit_from_records(pilot_records, pilot_n);
    return plan_from_fit(PlanMethod::extrapolation, fit, target_samples, budget);
}

std::string to_string(DedupMode mode) {
    return mode == DedupMode::disjoint_sum ? "disjoint_sum" : "union_unique";
}

DedupMode dedup_mode_from_string(const std::string& name) {
    if (name == "disjoint_sum" || name == "disjoint-sum") return DedupMode::disjoint_sum;
    if (name == "union_unique" || name == "union-unique") return DedupMode::union_unique;
    fail(errc::domain, "unknown dedup mode \"" + name + "\"");
}

BuildInput BuildInput::from_size(std::int64_t samples, std::int64_t classes) {
    return BuildInput{samples, classes, std::nullopt};
}

BuildInput BuildInput::from_manifest(DatasetManifest manifest) {
    BuildInput build;
    build.N = manifest.size();
    build.K = manifest.K;
    build.manifest = std::move(manifest);
    return build;
}

SampleAccount account_samples(std::span<const BuildInput> builds, DedupMode mode) {
    if (builds.empty()) fail(errc::empty_input, "no builds to account");
    SampleAccount account;
    account.dedup_mode = mode;
    for (const auto& build : builds) {
        if (build.N < 1) fail(errc::domain, "build size must be >= 1");
        account.builds.push_back({build.N, build.K});
    }
    if (mode == DedupMode::disjoint_sum) {
        for (const auto& build : builds) account.total_samples += build.N;
        return account;
    }
    std::unordered_set<std::string> seen;
    for (const auto& build : builds) {
        if (!build.manifest)
            fail(errc::union_requires_manifests,
                 "union_unique accounting needs full manifests, got a size-only build");
        for (const auto& [cls, samples] : build.manifest->entries)
            for (const auto& sample : samples)
                // length-prefixed so (class, sample) pairs never collide
                seen.insert(std::to_string(cls.size()) + ':' + cls + sample);
    }
    account.total_samples = static_cast<std::int64_t>(seen.size());
    return account;
}

}  // namespace divplan

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "divplan/records.hpp"
#include "divplan/scaling_law.hpp"

namespace divplan {

/// One (class-to-sample ratio, error) observation at a fixed dataset size.
struct Observation {
    double ratio = 0.0;          // x > 0
    double error_percent = 0.0;  // U
    double weight = 1.0;
};

/// Observations all taken at the same pre-training dataset size N.
/// A fit needs at least 3 points with pairwise-distinct ratios.
struct ObservationSet {
    std::int64_t N = 0;
    std::vector<Observation> points;
};

/// Fit outcome plus diagnostics of the linearized solve.
struct FitReport {
    RatioLaw law;
    double residual_rms = 0.0;
    double max_abs_residual = 0.0;
    double design_condition = 1.0;
    bool monotone_regime = false;  // true iff fitted A <= 0 or B <= 0
};

/// Estimates the ratio law from observations via the substitution
/// t = x^(1/4), which turns U = N^(-1/4)(A t + B/t) + c into the linear
/// model U = alpha*t + beta/t + c. Solves the weighted least-squares
/// problem and scales back A = alpha*N^(1/4), B = beta*N^(1/4).
/// For exactly three points this is the exact linear solve.
///
/// Errors: "underdetermined" below 3 points, "singular_design" on
/// duplicate ratios, "ill_conditioned_design" when the weighted design's
/// condition estimate exceeds 1e12.
FitReport fit_ratio_law(const ObservationSet& observations);

/// Adapter from experiment records: replicates of each K are aggregated by
/// mean with weight = replicate count, x = K^2/N, then fit as above.
FitReport fit_from_records(std::span<const PerformanceRecord> records, std::int64_t total_samples);

}  // namespace divplan

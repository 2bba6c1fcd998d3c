#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace divplan {

/// One measured (or simulated) downstream error for a pre-training
/// configuration: task identifier, dataset size N, class count K,
/// replicate index, error in percent.
struct PerformanceRecord {
    std::string task;
    std::int64_t N = 0;
    std::int64_t K = 0;
    std::int64_t replicate = 0;
    double error_percent = 0.0;
};

/// Replicates of one (N, K) cell collapsed to their mean.
struct AggregatedCell {
    std::int64_t K = 0;
    double ratio = 0.0;  // x = K^2/N
    double mean_error = 0.0;
    double stddev = 0.0;  // sample stddev, 0 for a single replicate
    std::int64_t count = 0;
};

/// Groups records by K (all must share the given N), averaging replicates.
/// Output is sorted by K. Rejects mixed N.
std::vector<AggregatedCell> aggregate_records(std::span<const PerformanceRecord> records,
                                              std::int64_t total_samples);

}  // namespace divplan

#include "divplan/fitting.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>

#include "divplan/errors.hpp"

namespace divplan {

std::vector<AggregatedCell> aggregate_records(std::span<const PerformanceRecord> records,
                                              std::int64_t total_samples) {
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    std::map<std::int64_t, std::vector<double>> by_class_count;
    for (const auto& record : records) {
        if (record.N != total_samples)
            fail(errc::mixed_n, "records mix dataset sizes (expected N=" +
                                    std::to_string(total_samples) + ", saw N=" +
                                    std::to_string(record.N) + ")");
        if (record.K < 1 || record.K > record.N)
            fail(errc::domain, "record with invalid class count K=" + std::to_string(record.K));
        by_class_count[record.K].push_back(record.error_percent);
    }
    std::vector<AggregatedCell> cells;
    cells.reserve(by_class_count.size());
    for (const auto& [classes, errors] : by_class_count) {
        AggregatedCell cell;
        cell.K = classes;
        cell.ratio = DiversityPoint(total_samples, classes).ratio().value();
        cell.count = static_cast<std::int64_t>(errors.size());
        double sum = 0.0;
        for (double e : errors) sum += e;
        cell.mean_error = sum / static_cast<double>(errors.size());
        if (errors.size() > 1) {
            double ss = 0.0;
            for (double e : errors) ss += (e - cell.mean_error) * (e - cell.mean_error);
            cell.stddev = std::sqrt(ss / static_cast<double>(errors.size() - 1));
        }
        cells.push_back(cell);
    }
    return cells;
}

FitReport fit_ratio_law(const ObservationSet& observations) {
    if (observations.N < 1) fail(errc::domain, "dataset size must be >= 1");
    // canonical point order makes the report invariant to input permutation
    std::vector<Observation> points(observations.points.begin(), observations.points.end());
    std::sort(points.begin(), points.end(), [](const Observation& a, const Observation& b) {
        if (a.ratio != b.ratio) return a.ratio < b.ratio;
        return a.error_percent < b.error_percent;
    });

    if (points.size() < 3) fail(errc::underdetermined, "need at least 3 observations");
    for (const auto& p : points) {
        if (!(p.ratio > 0.0)) fail(errc::domain, "class-to-sample ratio must be positive");
        if (!(p.weight > 0.0)) fail(errc::domain, "observation weight must be positive");
    }
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].ratio == points[i - 1].ratio)
            fail(errc::singular_design, "duplicate class-to-sample ratio in design");

    const auto rows = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd design(rows, 3);
    Eigen::VectorXd target(rows);
    Eigen::VectorXd root_weight(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double t = std::pow(points[static_cast<std::size_t>(i)].ratio, 0.25);
        design(i, 0) = t;
        design(i, 1) = 1.0 / t;
        design(i, 2) = 1.0;
        target(i) = points[static_cast<std::size_t>(i)].error_percent;
        root_weight(i) = std::sqrt(points[static_cast<std::size_t>(i)].weight);
    }

    const Eigen::MatrixXd weighted = root_weight.asDiagonal() * design;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double condition =
        (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(condition <= 1e12))
        fail(errc::ill_conditioned_design,
             "ill-conditioned design (condition estimate " + std::to_string(condition) + ")");

    const Eigen::Vector3d solution = svd.solve((root_weight.asDiagonal() * target).eval());
    const Eigen::VectorXd residual = design * solution - target;

    FitReport report;
    const double scale = std::pow(static_cast<double>(observations.N), 0.25);
    report.law = RatioLaw{solution(0) * scale, solution(1) * scale, solution(2), observations.N};
    report.design_condition = condition;
    report.monotone_regime = !(report.law.A > 0.0) || !(report.law.B > 0.0);

    double weighted_ss = 0.0;
    double weight_sum = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double w = points[static_cast<std::size_t>(i)].weight;
        weighted_ss += w * residual(i) * residual(i);
        weight_sum += w;
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(residual(i)));
    }
    report.residual_rms = std::sqrt(weighted_ss / weight_sum);
    return report;
}

FitReport fit_from_records(std::span<const PerformanceRecord> records,
                           std::int64_t total_samples) {
    const auto cells = aggregate_records(records, total_samples);
    if (cells.size() < 3)
        fail(errc::underdetermined, "need at least 3 distinct class counts, have " +
                                        std::to_string(cells.size()));
    ObservationSet observations;
    observations.N = total_samples;
    observations.points.reserve(cells.size());
    for (const auto& cell : cells)
        observations.points.push_back(
            Observation{cell.ratio, cell.mean_error, static_cast<double>(cell.count)});
    return fit_ratio_law(observations);
}

}  // namespace divplan

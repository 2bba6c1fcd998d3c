#include "divplan/scaling_law.hpp"

#include <cmath>

#include "divplan/errors.hpp"

namespace divplan {

namespace {

void require_positive_sizes(std::int64_t total_samples, std::int64_t classes) {
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    if (classes < 1) fail(errc::domain, "class count must be >= 1");
}

void require_nonnegative(const BoundTerms& terms) {
    if (terms.A < 0 || terms.B < 0 || terms.C < 0 || terms.D < 0)
        fail(errc::domain, "bound terms must be non-negative");
}

void require_interior(const RatioLaw& law) {
    if (!(law.A > 0.0) || !(law.B > 0.0))
        fail(errc::monotone_regime, "monotone regime, no interior optimum");
}

double log_confidence(double delta, double numerator) {
    if (!(delta > 0.0) || !(delta < 1.0)) fail(errc::domain, "delta must lie in (0,1)");
    return std::log(numerator / delta);
}

}  // namespace

DiversityPoint::DiversityPoint(std::int64_t total_samples, std::int64_t classes)
    : total_samples_(total_samples),
      classes_(classes),
      per_class_(total_samples, classes),
      ratio_(classes * classes, total_samples) {
    require_positive_sizes(total_samples, classes);
    if (classes > total_samples) fail(errc::samples_per_class_below_one, "samples-per-class below one");
}

double eval_bound(const BoundTerms& terms, std::int64_t total_samples, std::int64_t classes) {
    require_positive_sizes(total_samples, classes);
    require_nonnegative(terms);
    if (classes > total_samples)
        fail(errc::samples_per_class_below_one, "samples-per-class below one");
    const double n = static_cast<double>(total_samples) / static_cast<double>(classes);
    return terms.A / std::sqrt(n) + terms.B / std::sqrt(static_cast<double>(classes)) +
           terms.C / std::sqrt(static_cast<double>(total_samples)) + terms.D;
}

double eval_ratio_law(const RatioLaw& law, double ratio, std::int64_t total_samples) {
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    if (!(ratio > 0.0)) fail(errc::domain, "class-to-sample ratio must be positive");
    const double root4_n = std::pow(static_cast<double>(total_samples), 0.25);
    const double root4_x = std::pow(ratio, 0.25);
    return (law.A * root4_x + law.B / root4_x) / root4_n + law.c;
}

double optimal_ratio(const RatioLaw& law) {
    require_interior(law);
    return (law.B / law.A) * (law.B / law.A);
}

double optimal_classes(const RatioLaw& law, std::int64_t total_samples) {
    require_interior(law);
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    return (law.B / law.A) * std::sqrt(static_cast<double>(total_samples));
}

double predicted_min_error(const RatioLaw& law, std::int64_t total_samples) {
    require_interior(law);
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    return 2.0 * std::sqrt(law.A * law.B) / std::pow(static_cast<double>(total_samples), 0.25) +
           law.c;
}

RatioLaw law_from(const BoundTerms& terms, std::int64_t total_samples) {
    if (total_samples < 1) fail(errc::domain, "dataset size must be >= 1");
    require_nonnegative(terms);
    return RatioLaw{terms.A, terms.B,
                    terms.C / std::sqrt(static_cast<double>(total_samples)) + terms.D,
                    total_samples};
}

double theorem1_bound(const Theorem1Constants& consts, std::int64_t classes,
                      std::int64_t samples_per_class) {
    require_positive_sizes(samples_per_class, classes);
    const double log_term = log_confidence(consts.delta, 4.0);
    const double k = static_cast<double>(classes);
    const double n = static_cast<double>(samples_per_class);
    const double class_dev = std::sqrt(log_term / (2.0 * k));
    const double sample_dev = std::sqrt(log_term / (2.0 * n));
    const double mul = consts.nu1 + consts.m1 * class_dev + consts.c1 / std::sqrt(k);
    const double per_class = 5.0 * consts.max_loss * sample_dev +
                             2.0 * consts.complexity * consts.lipschitz / std::sqrt(n);
    return mul * per_class + consts.nu0 + consts.m0 * class_dev + consts.c0 / std::sqrt(k);
}

double theorem2_bound(const Theorem2Constants& consts, std::int64_t total_samples,
                      std::int64_t classes) {
    require_positive_sizes(total_samples, classes);
    const double log_term = log_confidence(consts.delta, 2.0);
    const double big_n = static_cast<double>(total_samples);
    const double k = static_cast<double>(classes);
    const double mul = consts.nu0_px + consts.c0 / std::sqrt(k);
    const double per_sample = 5.0 * consts.max_loss * std::sqrt(log_term / (2.0 * big_n)) +
                              2.0 * consts.complexity * consts.lipschitz / std::sqrt(big_n);
    return mul * per_sample + consts.nu1_px + consts.c1 / std::sqrt(k);
}

}  // namespace divplan

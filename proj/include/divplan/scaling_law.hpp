#pragma once

#include <cstdint>

#include "divplan/rational.hpp"

namespace divplan {

/// Constants of the simplified downstream-error bound
///   U(N, K) = A/sqrt(n) + B/sqrt(K) + C/sqrt(N) + D,  n = N/K.
/// A is in error-percent * sqrt(samples), B in error-percent * sqrt(classes),
/// D in plain error-percent. None depend on N, K or n.
struct BoundTerms {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
};

/// Ratio form of the same bound at the dataset size it was fitted at:
///   U(x) = N^(-1/4) * (A * x^(1/4) + B * x^(-1/4)) + c,   x = K/n = K^2/N,
/// with c = C/sqrt(N) + D folded into one constant. A > 0 and B > 0 is
/// required by the optimum operations; otherwise the law is in a monotone
/// regime and they reject it.
struct RatioLaw {
    double A = 0.0;
    double B = 0.0;
    double c = 0.0;
    std::int64_t fitted_at_N = 0;
};

/// One (N, K) configuration with its derived diversities kept exact:
/// n = N/K samples per class and x = K/n = K^2/N as reduced rationals.
class DiversityPoint {
  public:
    DiversityPoint(std::int64_t total_samples, std::int64_t classes);

    std::int64_t N() const { return total_samples_; }
    std::int64_t K() const { return classes_; }
    Rational samples_per_class() const { return per_class_; }
    Rational ratio() const { return ratio_; }

  private:
    std::int64_t total_samples_;
    std::int64_t classes_;
    Rational per_class_;
    Rational ratio_;
};

/// Constants of the two-step generation bound (probability 1 - delta):
///   (nu1 + m1*sqrt(log(4/delta)/(2K)) + c1/sqrt(K))
///     * (5*max_loss*sqrt(log(4/delta)/(2n)) + 2*complexity*lipschitz/sqrt(n))
///   + nu0 + m0*sqrt(log(4/delta)/(2K)) + c0/sqrt(K)
struct Theorem1Constants {
    double max_loss = 1.0;    // uniform bound on the loss
    double complexity = 1.0;  // Gaussian-complexity coefficient
    double lipschitz = 1.0;   // Lipschitz constant of the loss
    double delta = 0.05;      // confidence level, in (0,1)
    double nu0 = 0.0;         // additive transfer constant
    double nu1 = 0.0;         // multiplicative transfer constant
    double m0 = 0.0;          // one-class stability, additive side
    double m1 = 0.0;          // one-class stability, multiplicative side
    double c0 = 0.0;          // concentration constant, additive side
    double c1 = 0.0;          // concentration constant, multiplicative side
};

/// Constants of the cluster-relabeling bound. The bound places nu0_px on
/// the factor multiplying the sqrt(N) terms and nu1_px additively; both are
/// separate fields, so callers who want the roles the other way around can
/// swap the inputs.
struct Theorem2Constants {
    double max_loss = 1.0;
    double complexity = 1.0;
    double lipschitz = 1.0;
    double delta = 0.05;
    double nu0_px = 0.0;  // enters the factor multiplying the sqrt(N) terms
    double nu1_px = 0.0;  // enters additively
    double c0 = 0.0;
    double c1 = 0.0;
};

/// U(N, K) of the simplified bound. Requires 1 <= K <= N so n >= 1.
double eval_bound(const BoundTerms& terms, std::int64_t total_samples, std::int64_t classes);

/// Ratio-form bound at class-to-sample ratio x > 0 and dataset size N.
double eval_ratio_law(const RatioLaw& law, double ratio, std::int64_t total_samples);

/// Analytic minimizer x = B^2/A^2 of the ratio law; independent of N.
double optimal_ratio(const RatioLaw& law);

/// Analytic optimal class count (B/A)*sqrt(N), unrounded.
double optimal_classes(const RatioLaw& law, std::int64_t total_samples);

/// Bound value at the optimum: 2*sqrt(A*B)/N^(1/4) + c.
double predicted_min_error(const RatioLaw& law, std::int64_t total_samples);

/// Rewrites the simplified bound at a fixed N into its ratio form
/// (same A and B, c = C/sqrt(N) + D).
RatioLaw law_from(const BoundTerms& terms, std::int64_t total_samples);

/// Two-step generation bound for K classes and n samples per class.
double theorem1_bound(const Theorem1Constants& consts, std::int64_t classes,
                      std::int64_t samples_per_class);

/// Cluster-relabeling bound for N samples relabeled into K clusters.
double theorem2_bound(const Theorem2Constants& consts, std::int64_t total_samples,
                      std::int64_t classes);

}  // namespace divplan

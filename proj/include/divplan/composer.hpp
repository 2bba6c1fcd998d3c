#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace divplan {

/// Pool of available classes, each with its unique sample identifiers.
/// Identifiers are opaque strings; no image or file I/O happens here.
struct ClassInventory {
    std::map<std::string, std::vector<std::string>> classes;
};

/// A concrete, reproducible pre-training dataset: exactly K classes whose
/// per-class sample counts sum to N and differ by at most one. The seed and
/// generator identifier pin the sampling so a manifest can be rebuilt
/// bit-for-bit anywhere.
struct DatasetManifest {
    std::int64_t N = 0;
    std::int64_t K = 0;
    std::uint64_t seed = 0;
    std::string generator;
    std::map<std::string, std::vector<std::string>> entries;

    std::int64_t size() const;
};

/// Identifier of the sampling scheme used by compose_manifest.
inline constexpr const char* kManifestGenerator = "splitmix64-fy-v1";

/// Points with cluster labels in [0, K); every label occurs at least once.
struct LabeledPointSet {
    Eigen::MatrixXd points;  // one point per row
    std::vector<int> labels;
};

/// Full clustering outcome: the labeled set plus centroids and the
/// within-cluster sum of squares recorded after each assignment pass.
struct ClusterResult {
    LabeledPointSet set;
    Eigen::MatrixXd centroids;
    std::vector<double> wcss_history;
    int iterations = 0;
};

/// Samples K classes uniformly without replacement, then samples each
/// selected class uniformly without replacement. With base = floor(N/K) and
/// r = N mod K, the first r classes in selection order receive base+1
/// samples, the rest base. Class and sample identifiers are sorted before
/// sampling, so the result depends only on (inventory, N, K, seed).
///
/// Errors: K exceeding the inventory, and any selected class holding fewer
/// samples than its allocation (the error names the class; callers may
/// retry with another seed, there is no substitution).
DatasetManifest compose_manifest(const ClassInventory& inventory, std::int64_t total_samples,
                                 std::int64_t classes, std::uint64_t seed);

/// Manifests for a strictly ascending list of budgets at a fixed K, sharing
/// one seed. Smaller manifests are prefixes of larger ones per class, so a
/// union over the chain costs no more than its largest member.
std::vector<DatasetManifest> nested_compose(const ClassInventory& inventory,
                                            const std::vector<std::int64_t>& budgets,
                                            std::int64_t classes, std::uint64_t seed);

/// Lloyd clustering with seeded farthest-point initialization. Iterates
/// until the largest centroid movement drops below tol or max_iters passes;
/// an emptied cluster is reseeded from the point currently farthest from
/// its assigned centroid. Labels are deterministic given the seed.
ClusterResult cluster_relabel(const Eigen::MatrixXd& points, int clusters, std::uint64_t seed,
                              int max_iters = 100, double tol = 1e-9);

}  // namespace divplan

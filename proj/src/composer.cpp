#include "divplan/composer.hpp"

#include <algorithm>
#include <limits>

#include "divplan/errors.hpp"
#include "divplan/rng.hpp"

namespace divplan {

namespace {

constexpr std::uint64_t kClassStream = 0x636c6173736573ULL;  // "classes"
constexpr std::uint64_t kSampleStream = 0x73616d706c6573ULL;  // "samples"

/// First `count` elements of a seeded Fisher-Yates shuffle. Drawing more
/// elements from the same stream extends the sequence without changing the
/// prefix, which is what gives nested manifests their subset property.
std::vector<std::size_t> partial_shuffle(std::size_t universe, std::size_t count,
                                         SplitMix64 rng) {
    std::vector<std::size_t> order(universe);
    for (std::size_t i = 0; i < universe; ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(universe - i));
        std::swap(order[i], order[j]);
    }
    order.resize(count);
    return order;
}

struct SelectedClass {
    std::size_t sorted_index = 0;  // index into the sorted class list
    std::int64_t max_count = 0;    // allocation at the largest budget
};

std::int64_t allocation(std::int64_t total, std::int64_t classes, std::size_t position) {
    const std::int64_t base = total / classes;
    const std::int64_t remainder = total % classes;
    return base + (static_cast<std::int64_t>(position) < remainder ? 1 : 0);
}

}  // namespace

std::int64_t DatasetManifest::size() const {
    std::int64_t total = 0;
    for (const auto& [cls, samples] : entries) total += static_cast<std::int64_t>(samples.size());
    return total;
}

std::vector<DatasetManifest> nested_compose(const ClassInventory& inventory,
                                            const std::vector<std::int64_t>& budgets,
                                            std::int64_t classes, std::uint64_t seed) {
    if (budgets.empty()) fail(errc::empty_input, "no budgets given");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        if (budgets[i] < 1) fail(errc::domain, "budget must be >= 1");
        if (i > 0 && budgets[i] <= budgets[i - 1])
            fail(errc::domain, "budgets must be strictly ascending");
    }
    if (classes < 1) fail(errc::domain, "class count must be >= 1");
    if (classes > budgets.front())
        fail(errc::samples_per_class_below_one, "samples-per-class below one");
    const auto class_count = static_cast<std::int64_t>(inventory.classes.size());
    if (classes > class_count)
        fail(errc::too_many_classes, "requested " + std::to_string(classes) + " classes, inventory has " +
                                         std::to_string(class_count));

    // std::map keeps class ids sorted; sample ids are sorted per class below
    std::vector<const std::string*> class_ids;
    class_ids.reserve(inventory.classes.size());
    for (const auto& [id, samples] : inventory.classes) class_ids.push_back(&id);

    const auto selection =
        partial_shuffle(class_ids.size(), static_cast<std::size_t>(classes),
                        derive_stream(seed, kClassStream));

    const std::int64_t largest = budgets.back();
    std::vector<SelectedClass> selected(selection.size());
    for (std::size_t pos = 0; pos < selection.size(); ++pos) {
        selected[pos].sorted_index = selection[pos];
        selected[pos].max_count = allocation(largest, classes, pos);
    }

    // draw each class's sample sequence once, at the largest budget's length
    std::vector<std::vector<std::string>> drawn(selected.size());
    for (std::size_t pos = 0; pos < selected.size(); ++pos) {
        const std::string& class_id = *class_ids[selected[pos].sorted_index];
        std::vector<std::string> sample_ids = inventory.classes.at(class_id);
        std::sort(sample_ids.begin(), sample_ids.end());
        const auto available = static_cast<std::int64_t>(sample_ids.size());
        if (selected[pos].max_count > available)
            fail(errc::class_short,
                 "class \"" + class_id + "\" has " + std::to_string(available) +
                     " samples, allocation needs " + std::to_string(selected[pos].max_count));
        const auto picks =
            partial_shuffle(sample_ids.size(), static_cast<std::size_t>(selected[pos].max_count),
                            derive_stream(seed, kSampleStream, selected[pos].sorted_index));
        drawn[pos].reserve(picks.size());
        for (std::size_t idx : picks) drawn[pos].push_back(sample_ids[idx]);
    }

    std::vector<DatasetManifest> manifests;
    manifests.reserve(budgets.size());
    for (std::int64_t budget : budgets) {
        DatasetManifest manifest;
        manifest.N = budget;
        manifest.K = classes;
        manifest.seed = seed;
        manifest.generator = kManifestGenerator;
        for (std::size_t pos = 0; pos < selected.size(); ++pos) {
            const std::string& class_id = *class_ids[selected[pos].sorted_index];
            const auto count = static_cast<std::size_t>(allocation(budget, classes, pos));
            manifest.entries[class_id] =
                std::vector<std::string>(drawn[pos].begin(), drawn[pos].begin() + count);
        }
        manifests.push_back(std::move(manifest));
    }
    return manifests;
}

DatasetManifest compose_manifest(const ClassInventory& inventory, std::int64_t total_samples,
                                 std::int64_t classes, std::uint64_t seed) {
    return nested_compose(inventory, {total_samples}, classes, seed).front();
}

ClusterResult cluster_relabel(const Eigen::MatrixXd& points, int clusters, std::uint64_t seed,
                              int max_iters, double tol) {
    const auto n_points = points.rows();
    if (clusters < 1) fail(errc::domain, "cluster count must be >= 1");
    if (n_points < clusters)
        fail(errc::domain, "fewer points than clusters (" + std::to_string(n_points) + " < " +
                               std::to_string(clusters) + ")");
    if (max_iters < 1) fail(errc::domain, "max_iters must be >= 1");
    if (tol < 0.0) fail(errc::domain, "tol must be >= 0");

    SplitMix64 rng = derive_stream(seed, 0x6b6d65616e73ULL);  // "kmeans"

    // farthest-point init: first centroid seeded, the rest greedy by
    // distance to the nearest chosen centroid (ties -> lowest index)
    Eigen::MatrixXd centroids(clusters, points.cols());
    std::vector<bool> taken(static_cast<std::size_t>(n_points), false);
    Eigen::VectorXd nearest_sq =
        Eigen::VectorXd::Constant(n_points, std::numeric_limits<double>::infinity());
    {
        const auto first = static_cast<Eigen::Index>(rng.next_below(static_cast<std::uint64_t>(n_points)));
        centroids.row(0) = points.row(first);
        taken[static_cast<std::size_t>(first)] = true;
    }
    for (int c = 1; c < clusters; ++c) {
        for (Eigen::Index i = 0; i < n_points; ++i) {
            const double d = (points.row(i) - centroids.row(c - 1)).squaredNorm();
            if (d < nearest_sq(i)) nearest_sq(i) = d;
        }
        Eigen::Index best = -1;
        double best_d = -1.0;
        for (Eigen::Index i = 0; i < n_points; ++i) {
            if (taken[static_cast<std::size_t>(i)]) continue;
            if (nearest_sq(i) > best_d) {
                best_d = nearest_sq(i);
                best = i;
            }
        }
        centroids.row(c) = points.row(best);
        taken[static_cast<std::size_t>(best)] = true;
    }

    std::vector<int> labels(static_cast<std::size_t>(n_points), 0);
    std::vector<double> wcss_history;
    int iterations = 0;

    for (int iter = 0; iter < max_iters; ++iter) {
        iterations = iter + 1;
        // assignment
        for (Eigen::Index i = 0; i < n_points; ++i) {
            int best_c = 0;
            double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < clusters; ++c) {
                const double d = (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best_c = c;
                }
            }
            labels[static_cast<std::size_t>(i)] = best_c;
        }

        // repair empty clusters from the point farthest from its centroid
        std::vector<std::int64_t> counts(static_cast<std::size_t>(clusters), 0);
        for (int label : labels) ++counts[static_cast<std::size_t>(label)];
        for (int c = 0; c < clusters; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index farthest = -1;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n_points; ++i) {
                const auto owner = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
                if (counts[owner] <= 1) continue;  // don't empty another cluster
                const double d = (points.row(i) - centroids.row(static_cast<int>(owner))).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            if (farthest < 0) fail(errc::domain, "cannot repair empty cluster");
            --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(farthest)])];
            labels[static_cast<std::size_t>(farthest)] = c;
            ++counts[static_cast<std::size_t>(c)];
            centroids.row(c) = points.row(farthest);
        }

        double wcss = 0.0;
        for (Eigen::Index i = 0; i < n_points; ++i)
            wcss += (points.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
        wcss_history.push_back(wcss);

        // update
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(clusters, points.cols());
        for (Eigen::Index i = 0; i < n_points; ++i)
            next.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
        for (int c = 0; c < clusters; ++c)
            next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);

        double movement = 0.0;
        for (int c = 0; c < clusters; ++c)
            movement = std::max(movement, (next.row(c) - centroids.row(c)).norm());
        centroids = next;
        if (movement < tol) break;
    }

    ClusterResult result;
    result.set.points = points;
    result.set.labels = std::move(labels);
    result.centroids = std::move(centroids);
    result.wcss_history = std::move(wcss_history);
    result.iterations = iterations;
    return result;
}

}  // namespace divplan

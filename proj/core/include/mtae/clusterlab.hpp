#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mtae::cluster {

struct ClusteringRun {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;         // point -> cluster
    std::vector<std::vector<double>> centroids;   // k x dim
    double wcss = 0.0;
    std::size_t iterations = 0;
};

// k-means++ seeded Lloyd iterations with Euclidean distance, until the
// assignments stabilize or max_iters. Distance ties break toward the lower
// cluster index; an emptied cluster is repaired by stealing the point
// farthest from its centroid. Deterministic given the seed.
ClusteringRun kmeans(std::span<const std::vector<double>> points, std::size_t k,
                     std::uint64_t seed, std::size_t max_iters = 300);

struct ClusterStats {
    std::vector<std::size_t> category_counts;  // index i holds category i+1
    std::size_t majority_category = 0;         // ties -> lowest category id
    std::size_t size = 0;
    std::size_t error = 0;  // size - majority count
};
struct ErrorReport {
    std::vector<ClusterStats> clusters;
    std::size_t total_error = 0;
};
// Labels are 1-based category ids aligned with the clustered points.
// Clusters claim their majorities independently; two clusters may claim
// the same category.
ErrorReport clustering_error(const ClusteringRun& run, std::span<const std::size_t> labels,
                             std::size_t k);

struct BestOfN {
    std::size_t best_error = 0;
    std::uint64_t best_seed = 0;
    ErrorReport best_report;
    std::vector<std::size_t> per_run_errors;  // run i used seed base_seed + i
};
// kmeans with seeds base_seed .. base_seed+n-1; minimum clustering error
// wins, first seed on ties. Runs execute in parallel up to MTAE_THREADS.
BestOfN best_of_n_clustering(std::span<const std::vector<double>> points,
                             std::span<const std::size_t> labels, std::size_t k = 14,
                             std::size_t n = 100, std::uint64_t base_seed = 0);

struct Pca2d {
    std::vector<std::array<double, 2>> coords;
    std::array<double, 2> eigenvalues{0.0, 0.0};
    bool degenerate = false;  // all points identical; coords are zeros
};
// Mean-center, then project onto the top-2 covariance eigenvectors found by
// power iteration with deflation (tolerance 1e-10). Sign convention: the
// first nonzero coefficient of each eigenvector is positive.
Pca2d pca_project_2d(std::span<const std::vector<double>> points);

// --- file formats --------------------------------------------------------

struct LabeledRepresentation {
    std::string sentence;
    std::size_t category = 0;
    std::vector<double> vector;
};
// JSON-lines records {"sentence":..,"category":..,"vector":[..]}
std::vector<LabeledRepresentation> load_representations_jsonl(const std::filesystem::path& path);
void save_representations_jsonl(const std::filesystem::path& path,
                                std::span<const LabeledRepresentation> reps);

std::string error_report_json(const BestOfN& result, std::size_t k, std::uint64_t base_seed);

// TSV rows (category, x, y) with a header line.
void save_pca_tsv(const std::filesystem::path& path, std::span<const std::size_t> categories,
                  const Pca2d& pca);

// Worker cap shared by parallel sections: MTAE_THREADS when set, otherwise
// the hardware concurrency.
std::size_t worker_count();

}  // namespace mtae::cluster

#include "mtae/clusterlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "mtae/errors.hpp"
#include "mtae/rng.hpp"

namespace mtae::cluster {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void check_points(std::span<const std::vector<double>> points, std::size_t k) {
    if (points.size() < k)
        throw InputError("kmeans: " + std::to_string(points.size()) + " points for k = " +
                         std::to_string(k));
    if (k == 0) throw InputError("kmeans: k must be positive");
    const std::size_t dim = points[0].size();
    for (const auto& p : points)
        if (p.size() != dim)
            throw InputError("kmeans: points have inconsistent dimensionality");
}

// D^2-weighted seeding
std::vector<std::vector<double>> kmeanspp_init(std::span<const std::vector<double>> points,
                                               std::size_t k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.push_back(points[rng.below(points.size())]);

    std::vector<double> d2(points.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
            d2[i] = best;
            total += best;
        }
        if (total == 0.0) {
            // every remaining point duplicates a centroid
            centroids.push_back(points[rng.below(points.size())]);
            continue;
        }
        double target = rng.uniform() * total;
        std::size_t chosen = points.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            acc += d2[i];
            if (acc >= target) {
                chosen = i;
                break;
            }
        }
        centroids.push_back(points[chosen]);
    }
    return centroids;
}

std::size_t nearest_centroid(std::span<const double> p,
                             const std::vector<std::vector<double>>& centroids) {
    std::size_t best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = sq_dist(p, centroids[c]);
        if (d < best_d) {  // ties keep the lower index
            best_d = d;
            best = c;
        }
    }
    return best;
}

double compute_wcss(std::span<const std::vector<double>> points,
                    const std::vector<std::size_t>& assignments,
                    const std::vector<std::vector<double>>& centroids) {
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
        acc += sq_dist(points[i], centroids[assignments[i]]);
    return acc;
}

}  // namespace

ClusteringRun kmeans(std::span<const std::vector<double>> points, std::size_t k,
                     std::uint64_t seed, std::size_t max_iters) {
    check_points(points, k);
    const std::size_t dim = points[0].size();

    Rng rng(seed);
    std::vector<std::vector<double>> centroids = kmeanspp_init(points, k, rng);
    std::vector<std::size_t> assignments(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        assignments[i] = nearest_centroid(points[i], centroids);

    double prev_wcss = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    for (; iter < max_iters; ++iter) {
        // means of the current assignment
        std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            counts[assignments[i]] += 1;
            for (std::size_t d = 0; d < dim; ++d) sums[assignments[i]][d] += points[i][d];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t d = 0; d < dim; ++d)
                centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }

        // an emptied cluster steals the point farthest from its centroid
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t farthest = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (counts[assignments[i]] <= 1) continue;
                const double d = sq_dist(points[i], centroids[assignments[i]]);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            counts[assignments[farthest]] -= 1;
            assignments[farthest] = c;
            counts[c] = 1;
            centroids[c] = points[farthest];
        }

        std::vector<std::size_t> next(points.size());
        for (std::size_t i = 0; i < points.size(); ++i)
            next[i] = nearest_centroid(points[i], centroids);

        const double wcss = compute_wcss(points, next, centroids);
        if (wcss > prev_wcss + 1e-9)
            throw NumericError("kmeans: WCSS increased across a Lloyd iteration");
        prev_wcss = wcss;

        const bool stable = next == assignments;
        assignments = std::move(next);
        if (stable) {
            ++iter;
            break;
        }
    }

    ClusteringRun run;
    run.k = k;
    run.assignments = std::move(assignments);
    run.centroids = std::move(centroids);
    run.wcss = compute_wcss(points, run.assignments, run.centroids);
    run.iterations = iter;
    return run;
}

ErrorReport clustering_error(const ClusteringRun& run, std::span<const std::size_t> labels,
                             std::size_t k) {
    if (labels.size() != run.assignments.size())
        throw InputError("clustering_error: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(run.assignments.size()) + " points");
    std::size_t max_category = 0;
    for (std::size_t l : labels) {
        if (l == 0) throw InputError("clustering_error: category ids are 1-based");
        max_category = std::max(max_category, l);
    }

    ErrorReport report;
    report.clusters.assign(k, ClusterStats{});
    for (auto& c : report.clusters) c.category_counts.assign(max_category, 0);

    for (std::size_t i = 0; i < labels.size(); ++i) {
        ClusterStats& c = report.clusters[run.assignments[i]];
        c.category_counts[labels[i] - 1] += 1;
        c.size += 1;
    }
    for (auto& c : report.clusters) {
        std::size_t majority_count = 0;
        c.majority_category = 0;
        for (std::size_t cat = 0; cat < c.category_counts.size(); ++cat) {
            if (c.category_counts[cat] > majority_count) {  // ties keep the lower id
                majority_count = c.category_counts[cat];
                c.majority_category = cat + 1;
            }
        }
        c.error = c.size - majority_count;
        report.total_error += c.error;
    }
    return report;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("MTAE_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

BestOfN best_of_n_clustering(std::span<const std::vector<double>> points,
                             std::span<const std::size_t> labels, std::size_t k, std::size_t n,
                             std::uint64_t base_seed) {
    if (n == 0) throw InputError("best_of_n_clustering: n must be at least 1");
    check_points(points, k);

    std::vector<ErrorReport> reports(n);
    std::vector<std::size_t> errors(n);

    const std::size_t workers = std::min(worker_count(), n);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> cursor{0};
    auto body = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n) return;
            ClusteringRun run = kmeans(points, k, base_seed + i);
            reports[i] = clustering_error(run, labels, k);
            errors[i] = reports[i].total_error;
        }
    };
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (errors[i] < errors[best]) best = i;  // ties keep the first seed

    BestOfN out;
    out.best_error = errors[best];
    out.best_seed = base_seed + best;
    out.best_report = std::move(reports[best]);
    out.per_run_errors = std::move(errors);
    return out;
}

// --- PCA -----------------------------------------------------------------

namespace {

// Power iteration with re-orthogonalization against previously found
// eigenvectors; returns (vector, eigenvalue). `scale` is a reference
// magnitude (the trace, or the first eigenvalue) below which a matvec
// residual counts as rank exhaustion rather than a real eigendirection.
std::pair<std::vector<double>, double> dominant_eigenvector(
    const std::vector<std::vector<double>>& cov,
    const std::vector<std::vector<double>>& previous, double scale) {
    const std::size_t dim = cov.size();

    auto orthogonalize = [&](std::vector<double>& v) {
        for (const auto& p : previous) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dim; ++i) dot += v[i] * p[i];
            for (std::size_t i = 0; i < dim; ++i) v[i] -= dot * p[i];
        }
    };
    auto norm_of = [&](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    };

    // deterministic start direction
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v[i] = 0.5 + static_cast<double>(splitmix64(i) % 1000) / 1000.0;
    orthogonalize(v);
    double nv = norm_of(v);
    if (nv < 1e-8) {
        // the start direction collapsed into the found subspace; fall back
        // to orthogonalized basis vectors
        for (std::size_t basis = 0; basis < dim; ++basis) {
            std::fill(v.begin(), v.end(), 0.0);
            v[basis] = 1.0;
            orthogonalize(v);
            nv = norm_of(v);
            if (nv >= 1e-8) break;
        }
    }
    for (double& x : v) x /= nv;

    const double floor = scale * 1e-13;
    double eigenvalue = 0.0;
    for (std::size_t iter = 0; iter < 10000; ++iter) {
        std::vector<double> next(dim, 0.0);
        for (std::size_t r = 0; r < dim; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < dim; ++c) acc += cov[r][c] * v[c];
            next[r] = acc;
        }
        orthogonalize(next);
        const double n2 = norm_of(next);
        if (n2 <= floor) {
            // no variance left in the deflated subspace; the current v is a
            // valid unit direction orthogonal to the found eigenvectors
            eigenvalue = 0.0;
            break;
        }
        for (double& x : next) x /= n2;
        eigenvalue = n2;

        double delta = 0.0, delta_flip = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            delta += (next[i] - v[i]) * (next[i] - v[i]);
            delta_flip += (next[i] + v[i]) * (next[i] + v[i]);
        }
        v = std::move(next);
        if (std::min(delta, delta_flip) < 1e-10 * 1e-10) break;
    }

    // sign convention: first nonzero coefficient positive ("nonzero"
    // relative to the largest component, so iteration junk cannot win)
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    for (std::size_t i = 0; i < dim; ++i) {
        if (std::abs(v[i]) > 1e-8 * mx) {
            if (v[i] < 0.0)
                for (double& x : v) x = -x;
            break;
        }
    }
    return {v, eigenvalue};
}

}  // namespace

Pca2d pca_project_2d(std::span<const std::vector<double>> points) {
    if (points.size() < 2) throw InputError("pca_project_2d: at least 2 points required");
    const std::size_t dim = points[0].size();
    if (dim < 2) throw InputError("pca_project_2d: dimension must be at least 2");
    for (const auto& p : points)
        if (p.size() != dim) throw InputError("pca_project_2d: inconsistent dimensionality");

    std::vector<double> mean(dim, 0.0);
    for (const auto& p : points)
        for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
    for (double& m : mean) m /= static_cast<double>(points.size());

    std::vector<std::vector<double>> centered(points.size(), std::vector<double>(dim));
    bool any_spread = false;
    for (std::size_t r = 0; r < points.size(); ++r)
        for (std::size_t i = 0; i < dim; ++i) {
            centered[r][i] = points[r][i] - mean[i];
            if (std::abs(centered[r][i]) > 0.0) any_spread = true;
        }

    Pca2d out;
    out.coords.assign(points.size(), {0.0, 0.0});
    if (!any_spread) {
        out.degenerate = true;
        return out;
    }

    std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
    for (const auto& row : centered)
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) cov[r][c] += row[r] * row[c];
    const double denom = static_cast<double>(points.size() - 1);
    for (auto& r : cov)
        for (double& x : r) x /= denom;

    double trace = 0.0;
    for (std::size_t i = 0; i < dim; ++i) trace += cov[i][i];

    std::vector<std::vector<double>> eigenvectors;
    for (std::size_t comp = 0; comp < 2; ++comp) {
        const double scale = comp == 0 ? trace : out.eigenvalues[0];
        auto [v, lambda] = dominant_eigenvector(cov, eigenvectors, scale);
        out.eigenvalues[comp] = lambda;
        for (std::size_t r = 0; r < points.size(); ++r) {
            double proj = 0.0;
            for (std::size_t i = 0; i < dim; ++i) proj += centered[r][i] * v[i];
            out.coords[r][comp] = proj;
        }
        eigenvectors.push_back(std::move(v));
    }
    return out;
}

// --- file formats ----------------------------------------------------------

std::vector<LabeledRepresentation> load_representations_jsonl(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open representations file '" + path.string() + "'");
    std::vector<LabeledRepresentation> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            nlohmann::json j = nlohmann::json::parse(line);
            LabeledRepresentation r;
            r.sentence = j.at("sentence").get<std::string>();
            r.category = j.at("category").get<std::size_t>();
            r.vector = j.at("vector").get<std::vector<double>>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("representations line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_representations_jsonl(const std::filesystem::path& path,
                                std::span<const LabeledRepresentation> reps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write representations file '" + path.string() + "'");
    for (const LabeledRepresentation& r : reps) {
        nlohmann::json j{{"sentence", r.sentence}, {"category", r.category}, {"vector", r.vector}};
        out << j.dump() << '\n';
    }
}

std::string error_report_json(const BestOfN& result, std::size_t k, std::uint64_t base_seed) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const ClusterStats& c : result.best_report.clusters) {
        clusters.push_back({{"counts", c.category_counts},
                            {"majority_category", c.majority_category},
                            {"size", c.size},
                            {"error", c.error}});
    }
    nlohmann::json j{{"k", k},
                     {"runs", result.per_run_errors.size()},
                     {"base_seed", base_seed},
                     {"best_seed", result.best_seed},
                     {"best_error", result.best_error},
                     {"per_run_errors", result.per_run_errors},
                     {"best_run", {{"clusters", clusters}, {"total_error", result.best_report.total_error}}}};
    return j.dump(2);
}

void save_pca_tsv(const std::filesystem::path& path, std::span<const std::size_t> categories,
                  const Pca2d& pca) {
    if (categories.size() != pca.coords.size())
        throw InputError("save_pca_tsv: category/coordinate count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write PCA file '" + path.string() + "'");
    out << "category\tx\ty\n";
    out.precision(17);
    for (std::size_t i = 0; i < categories.size(); ++i)
        out << categories[i] << '\t' << pca.coords[i][0] << '\t' << pca.coords[i][1] << '\n';
}

}  // namespace mtae::cluster

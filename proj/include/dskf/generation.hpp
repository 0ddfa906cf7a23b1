#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dskf/partition.hpp"
#include "dskf/rng.hpp"

namespace dskf {

/// Dense feature matrix with optional ground-truth labels.
struct Dataset {
    std::vector<double> features;  // row-major, n x d
    int n = 0;
    int d = 0;
    std::optional<Partition> ground_truth;
    std::string name;

    const double* row(int i) const { return features.data() + static_cast<size_t>(i) * d; }

    void validate() const {
        if (n < 2 || d < 1) throw std::invalid_argument("dataset needs n >= 2, d >= 1");
        if (features.size() != static_cast<size_t>(n) * d)
            throw std::invalid_argument("feature buffer size mismatch");
        if (ground_truth && ground_truth->n() != n)
            throw std::invalid_argument("ground truth length mismatch");
    }
};

enum class Distance { euclidean, cosine };

struct GenerationConfig {
    int m = 50;                  // ensemble size
    int k_min = 2;
    int k_max = 2;
    Distance distance = Distance::euclidean;
    int max_iters = 100;
    bool kmeanspp = false;       // plain uniform init by default
    std::uint64_t seed = 0;

    void validate(int n) const {
        if (m < 2) throw std::invalid_argument("ensemble size must be at least 2");
        if (k_min < 2 || k_min > k_max || k_max > n)
            throw std::invalid_argument("k range must satisfy 2 <= k_min <= k_max <= n");
    }
};

namespace detail {

inline double sq_euclidean(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
        double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

inline double dot(const double* a, const double* b, int d) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += a[j] * b[j];
    return s;
}

inline void normalize_rows(std::vector<double>& rows, int n, int d) {
    for (int i = 0; i < n; ++i) {
        double* r = rows.data() + static_cast<size_t>(i) * d;
        double norm = std::sqrt(dot(r, r, d));
        if (norm > 0)
            for (int j = 0; j < d; ++j) r[j] /= norm;
    }
}

}  // namespace detail

/// Lloyd's k-means with seeded initialization (k distinct samples as initial
/// centers, or k-means++ when requested). Cosine mode is spherical k-means:
/// rows are unit-normalized and centroids renormalized after each mean update.
/// Empty clusters are dropped, so the result may have fewer than k clusters;
/// labels are compacted to 0..k_eff-1. Iteration stops when assignments stop
/// changing or after max_iters sweeps. Deterministic given the seed.
inline Partition kmeans(const Dataset& data, int k, Distance distance, std::uint64_t seed,
                        int max_iters = 100, bool kmeanspp = false,
                        std::vector<double>* objective_trace = nullptr) {
    data.validate();
    if (k < 1 || k > data.n) throw std::invalid_argument("kmeans: k must be in [1, n]");
    int n = data.n, d = data.d;

    std::vector<double> points = data.features;
    if (distance == Distance::cosine) detail::normalize_rows(points, n, d);
    auto point = [&](int i) { return points.data() + static_cast<size_t>(i) * d; };

    // distance of sample i to center c (squared euclidean, or 1 - cosine)
    std::vector<double> centers;
    auto center = [&](int c) { return centers.data() + static_cast<size_t>(c) * d; };
    auto dist_to = [&](int i, int c) {
        if (distance == Distance::euclidean) return detail::sq_euclidean(point(i), center(c), d);
        return 1.0 - detail::dot(point(i), center(c), d);
    };

    Rng rng(seed);
    if (!kmeanspp) {
        for (int i : rng.sample_distinct(n, k))
            centers.insert(centers.end(), point(i), point(i) + d);
    } else {
        int first = static_cast<int>(rng.uniform_index(n));
        centers.insert(centers.end(), point(first), point(first) + d);
        std::vector<double> d2(n);
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                double best = dist_to(i, 0);
                for (int j = 1; j < c; ++j) best = std::min(best, dist_to(i, j));
                d2[i] = std::max(best, 0.0);
                total += d2[i];
            }
            int pick = 0;
            if (total > 0) {
                double target = rng.uniform01() * total, acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) { pick = i; break; }
                }
            } else {
                pick = static_cast<int>(rng.uniform_index(n));
            }
            centers.insert(centers.end(), point(pick), point(pick) + d);
        }
    }

    int k_live = k;
    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist_to(i, 0);
            for (int c = 1; c < k_live; ++c) {
                double dd = dist_to(i, c);
                if (dd < best_d) { best_d = dd; best = c; }
            }
            objective += best_d;
            if (assign[i] != best) { assign[i] = best; changed = true; }
        }
        if (objective_trace) objective_trace->push_back(objective);
        if (!changed) break;

        std::vector<double> sums(static_cast<size_t>(k_live) * d, 0.0);
        std::vector<int> counts(k_live, 0);
        for (int i = 0; i < n; ++i) {
            double* s = sums.data() + static_cast<size_t>(assign[i]) * d;
            const double* pt = point(i);
            for (int j = 0; j < d; ++j) s[j] += pt[j];
            ++counts[assign[i]];
        }
        // drop empty clusters, compacting indices in order
        std::vector<int> remap(k_live, -1);
        int next = 0;
        std::vector<double> new_centers;
        for (int c = 0; c < k_live; ++c) {
            if (counts[c] == 0) continue;
            remap[c] = next++;
            double* s = sums.data() + static_cast<size_t>(c) * d;
            for (int j = 0; j < d; ++j) new_centers.push_back(s[j] / counts[c]);
        }
        k_live = next;
        centers = std::move(new_centers);
        if (distance == Distance::cosine) detail::normalize_rows(centers, k_live, d);
        for (int i = 0; i < n; ++i) assign[i] = remap[assign[i]];
    }
    return Partition(std::move(assign));
}

/// Generate m base partitions; run i draws its k uniformly from the configured
/// range using a per-run seed derived from cfg.seed.
inline Ensemble generate_ensemble(const Dataset& data, const GenerationConfig& cfg) {
    data.validate();
    cfg.validate(data.n);

    bool degenerate = true;
    for (int i = 1; i < data.n && degenerate; ++i)
        for (int j = 0; j < data.d; ++j)
            if (data.row(i)[j] != data.row(0)[j]) { degenerate = false; break; }
    if (degenerate)
        std::cerr << "warning: all samples identical; base partitions will collapse to one cluster\n";

    Ensemble ens;
    ens.partitions.reserve(cfg.m);
    for (int run = 0; run < cfg.m; ++run) {
        std::uint64_t run_seed = mix_seed(cfg.seed, run);
        Rng rng(run_seed);
        int k = static_cast<int>(rng.uniform_int(cfg.k_min, cfg.k_max));
        ens.partitions.push_back(
            kmeans(data, k, cfg.distance, rng.next(), cfg.max_iters, cfg.kmeanspp));
    }
    return ens;
}

}  // namespace dskf

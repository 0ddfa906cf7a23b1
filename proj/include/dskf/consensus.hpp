#pragma once

#include <chrono>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dskf/alignment.hpp"
#include "dskf/metrics.hpp"
#include "dskf/partition.hpp"

namespace dskf {

/// Per-partition diversity D_i = 1 - mean pairwise kappa with the rest of the
/// aligned ensemble. Kappa lies in [-1, 1], so D lies in [0, 2].
struct DiversityScores {
    std::vector<double> values;
};

struct TopMPrime { int m_prime; };
struct Threshold { double sigma; };

struct DskfConfig {
    std::variant<TopMPrime, Threshold> selection = TopMPrime{0};  // 0 = default m/2
    double beta = 1.0;
    int final_k = 2;
    enum class Weighting { f_score, uniform } weighting = Weighting::f_score;
    ReferenceStrategy reference = ReferenceStrategy::random;

    void validate(int m) const {
        if (final_k < 1) throw std::invalid_argument("final_k must be at least 1");
        if (beta <= 0) throw std::invalid_argument("beta must be positive");
        if (auto* top = std::get_if<TopMPrime>(&selection)) {
            int mp = top->m_prime == 0 ? m / 2 : top->m_prime;
            if (mp < 1 || mp > m) throw std::invalid_argument("m_prime must be in [1, m]");
        }
    }
};

/// Normalized per-cluster quality weights; entries follow the selected
/// ensemble's cluster order (partition order, ascending label within each).
struct ClusterWeights {
    std::vector<double> raw;         // l_i in [0, 1]
    std::vector<double> normalized;  // w_i, sums to 1
    std::vector<std::pair<int, int>> cluster_index;  // (partition idx, label)
    bool uniform_fallback = false;   // all raw scores were zero
};

/// Symmetric non-negative sample-pair similarity S = B W B^T.
struct CoassociationMatrix {
    std::vector<double> values;  // n x n, row-major
    int n = 0;

    double at(int i, int j) const { return values[static_cast<size_t>(i) * n + j]; }
    double& at(int i, int j) { return values[static_cast<size_t>(i) * n + j]; }
};

inline DiversityScores diversity_scores(const Ensemble& aligned) {
    aligned.validate();
    if (!aligned.aligned) throw std::invalid_argument("diversity_scores: ensemble not aligned");
    int m = aligned.size();
    if (m < 2) throw std::invalid_argument("diversity_scores: need at least two partitions");
    std::vector<std::vector<double>> pairwise(m, std::vector<double>(m, 0.0));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            pairwise[i][j] = pairwise[j][i] =
                kappa(aligned.partitions[i], aligned.partitions[j]);
    DiversityScores d;
    d.values.resize(m);
    for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        for (int j = 0; j < m; ++j)
            if (j != i) sum += pairwise[i][j];
        d.values[i] = 1.0 - sum / (m - 1);
    }
    return d;
}

/// Keep the most diverse partitions: either the m' largest D (ties by original
/// index) or all with D strictly above sigma. Input order is preserved.
inline Ensemble select_partitions(const Ensemble& aligned, const DiversityScores& d,
                                  const DskfConfig& cfg,
                                  std::vector<int>* selected_indices = nullptr) {
    aligned.validate();
    if (!aligned.aligned) throw std::invalid_argument("select_partitions: ensemble not aligned");
    int m = aligned.size();
    cfg.validate(m);
    std::vector<char> keep(m, 0);
    if (auto* top = std::get_if<TopMPrime>(&cfg.selection)) {
        int mp = top->m_prime == 0 ? m / 2 : top->m_prime;
        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return d.values[a] > d.values[b]; });
        for (int i = 0; i < mp; ++i) keep[order[i]] = 1;
    } else {
        double sigma = std::get<Threshold>(cfg.selection).sigma;
        int count = 0;
        for (int i = 0; i < m; ++i)
            if (d.values[i] > sigma) { keep[i] = 1; ++count; }
        if (count == 0)
            throw std::invalid_argument(
                "threshold selects no partitions; lower sigma or use count-based selection");
    }
    Ensemble out;
    out.aligned = true;
    for (int i = 0; i < m; ++i) {
        if (!keep[i]) continue;
        if (aligned.reference_index && *aligned.reference_index == i)
            out.reference_index = out.size();
        out.partitions.push_back(aligned.partitions[i]);
        if (selected_indices) selected_indices->push_back(i);
    }
    if (!out.reference_index) out.reference_index = 0;  // reference may be dropped
    return out;
}

/// Quality weight per cluster: mean aligned-label F against the other selected
/// partitions, normalized to sum to one. Uniform mode gives every cluster the
/// same weight (the EAC-AL baseline).
inline ClusterWeights cluster_weights(const Ensemble& selected, const DskfConfig& cfg) {
    selected.validate();
    if (!selected.aligned) throw std::invalid_argument("cluster_weights: ensemble not aligned");
    int m = selected.size();
    if (m < 2) throw std::invalid_argument("cluster_weights: need at least two partitions");
    MetricConfig mc{cfg.beta};

    ClusterWeights w;
    for (int p = 0; p < m; ++p) {
        const Partition& part = selected.partitions[p];
        for (int label : part.distinct_labels()) {
            double l = 0.0;
            if (cfg.weighting == DskfConfig::Weighting::f_score) {
                Cluster c = part.cluster_of_label(label);
                for (int j = 0; j < m; ++j) {
                    if (j == p) continue;
                    l += cluster_f(c, label, selected.partitions[j], mc, FMatchMode::aligned);
                }
                l /= (m - 1);
            } else {
                l = 1.0;
            }
            w.raw.push_back(l);
            w.cluster_index.emplace_back(p, label);
        }
    }
    double total = std::accumulate(w.raw.begin(), w.raw.end(), 0.0);
    if (total <= 0.0) {
        w.uniform_fallback = true;
        std::cerr << "warning: all cluster scores zero; falling back to uniform weights\n";
        w.normalized.assign(w.raw.size(), 1.0 / w.raw.size());
    } else {
        w.normalized.reserve(w.raw.size());
        for (double l : w.raw) w.normalized.push_back(l / total);
    }
    return w;
}

/// S_ij = sum of the weights of the clusters containing both i and j.
inline CoassociationMatrix weighted_coassociation(const Ensemble& selected,
                                                  const ClusterWeights& w) {
    selected.validate();
    CoassociationMatrix s;
    s.n = selected.n();
    s.values.assign(static_cast<size_t>(s.n) * s.n, 0.0);
    size_t entry = 0;
    for (int p = 0; p < selected.size(); ++p) {
        const Partition& part = selected.partitions[p];
        for (int label : part.distinct_labels()) {
            if (entry >= w.normalized.size() || w.cluster_index[entry] != std::make_pair(p, label))
                throw std::invalid_argument("weights do not cover the selected ensemble's clusters");
            double weight = w.normalized[entry++];
            Cluster c = part.cluster_of_label(label);
            for (int a : c.members)
                for (int b : c.members) s.at(a, b) += weight;
        }
    }
    if (entry != w.normalized.size())
        throw std::invalid_argument("weights do not cover the selected ensemble's clusters");
    return s;
}

/// Average-linkage agglomeration on d_ij = S_max - S_ij (off-diagonal max),
/// stopping at k clusters. Equal-distance merges pick the smallest (i, j)
/// active cluster pair.
inline Partition hac_al(const CoassociationMatrix& s, int k) {
    int n = s.n;
    if (n < 1) throw std::invalid_argument("hac_al: empty matrix");
    if (k < 1 || k > n) throw std::invalid_argument("hac_al: k must be in [1, n]");

    double s_max = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s_max = std::max(s_max, s.at(i, j));

    // dist[i][j]: average-linkage distance between active clusters i and j
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) dist[i][j] = s_max - s.at(i, j);

    std::vector<int> size(n, 1);
    std::vector<char> active(n, 1);
    std::vector<int> assign(n);
    std::iota(assign.begin(), assign.end(), 0);

    for (int clusters = n; clusters > k; --clusters) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (dist[i][j] < best) { best = dist[i][j]; bi = i; bj = j; }
            }
        }
        // Lance-Williams update for average linkage; merged cluster keeps bi.
        for (int t = 0; t < n; ++t) {
            if (!active[t] || t == bi || t == bj) continue;
            double merged = (size[bi] * dist[bi][t] + size[bj] * dist[bj][t]) /
                            (size[bi] + size[bj]);
            dist[bi][t] = dist[t][bi] = merged;
        }
        size[bi] += size[bj];
        active[bj] = 0;
        for (int i = 0; i < n; ++i)
            if (assign[i] == bj) assign[i] = bi;
    }
    // compact labels in first-occurrence order of active cluster ids
    std::map<int, int> relabel;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        auto [it, fresh] = relabel.emplace(assign[i], static_cast<int>(relabel.size()));
        labels[i] = it->second;
        (void)fresh;
    }
    return Partition(std::move(labels));
}

struct DiagnosticsReport {
    int reference_index = -1;
    DiversityScores diversity;
    std::vector<int> selected_indices;
    ClusterWeights weights;
    double align_ms = 0, diversity_ms = 0, selection_ms = 0;
    double weighting_ms = 0, coassociation_ms = 0, hac_ms = 0;
    double total_ms = 0;
};

/// The full selective-ensemble pipeline: align, score diversity, select,
/// weight clusters, build the weighted co-association matrix, and cut the
/// average-linkage tree at final_k.
inline std::pair<Partition, DiagnosticsReport> dskf(const Ensemble& ens, const DskfConfig& cfg,
                                                    std::uint64_t seed) {
    ens.validate();
    cfg.validate(ens.size());
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    DiagnosticsReport diag;
    auto start = clock::now();

    auto t0 = clock::now();
    Ensemble aligned = align_ensemble(ens, cfg.reference, seed);
    diag.align_ms = ms_since(t0);
    diag.reference_index = *aligned.reference_index;

    t0 = clock::now();
    diag.diversity = diversity_scores(aligned);
    diag.diversity_ms = ms_since(t0);

    t0 = clock::now();
    Ensemble selected = select_partitions(aligned, diag.diversity, cfg, &diag.selected_indices);
    diag.selection_ms = ms_since(t0);

    t0 = clock::now();
    diag.weights = cluster_weights(selected, cfg);
    diag.weighting_ms = ms_since(t0);

    t0 = clock::now();
    CoassociationMatrix s = weighted_coassociation(selected, diag.weights);
    diag.coassociation_ms = ms_since(t0);

    t0 = clock::now();
    Partition result = hac_al(s, cfg.final_k);
    diag.hac_ms = ms_since(t0);

    diag.total_ms = ms_since(start);
    return {std::move(result), std::move(diag)};
}

}  // namespace dskf

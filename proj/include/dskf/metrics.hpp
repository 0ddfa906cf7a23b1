#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "dskf/partition.hpp"

namespace dskf {

struct MetricConfig {
    double beta = 1.0;  // F-score weight

    void validate() const {
        if (beta <= 0) throw std::invalid_argument("beta must be positive");
    }
};

/// Post-alignment classification measures over the union label space.
struct ClassificationScores {
    double accuracy = 0.0;
    double kappa = 0.0;
    struct PerLabel {
        int label;
        double recall;
        double precision;
        double f_score;
    };
    std::vector<PerLabel> per_label;
    double macro_f = 0.0;
};

/// Entropy of the cluster-size distribution, in nats.
inline double entropy(const Partition& p) {
    double h = 0.0;
    double n = p.n();
    for (int sz : p.cluster_sizes()) {
        double f = sz / n;
        h -= f * std::log(f);
    }
    return h < 0 ? 0.0 : h;
}

namespace detail {

inline double mutual_information(const ContingencyTable& t) {
    double mi = 0.0;
    double n = static_cast<double>(t.n);
    for (size_t s = 0; s < t.counts.size(); ++s) {
        for (size_t u = 0; u < t.counts[s].size(); ++u) {
            long long c = t.counts[s][u];
            if (c == 0) continue;
            mi += (c / n) * std::log(c * n / (static_cast<double>(t.row_sums[s]) * t.col_sums[u]));
        }
    }
    return mi < 0 ? 0.0 : mi;
}

inline double f_beta(double precision, double recall, double beta) {
    double b2 = beta * beta;
    double denom = b2 * precision + recall;
    if (denom == 0) return 0.0;
    return (1 + b2) * precision * recall / denom;
}

}  // namespace detail

/// NMI(p, q) = MI / sqrt(H(p) H(q)), in [0, 1]. Defined as 0 when either
/// partition has a single cluster (zero entropy).
inline double nmi(const Partition& p, const Partition& q) {
    ContingencyTable t = contingency(p, q);
    double hp = entropy(p), hq = entropy(q);
    if (hp == 0.0 || hq == 0.0) return 0.0;
    double v = detail::mutual_information(t) / std::sqrt(hp * hq);
    return std::clamp(v, 0.0, 1.0);
}

namespace detail {

/// Union of the reference clusters with strictly more than half their samples
/// inside c ("positive" clusters). Empty when none qualifies.
inline std::vector<int> positive_union(const Cluster& c, const Partition& ref) {
    std::vector<int> members;
    for (const Cluster& r : ref.clusters()) {
        if (2 * intersection_size(c, r) > r.size())
            members.insert(members.end(), r.members.begin(), r.members.end());
    }
    std::sort(members.begin(), members.end());
    return members;
}

}  // namespace detail

/// Binary NMI: compare {c, X\c} against {c*, X\c*} where c* pools all
/// positive reference clusters. Zero when no reference cluster is positive.
inline double bnmi(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("bnmi: empty cluster");
    std::vector<int> star = detail::positive_union(c, ref);
    if (star.empty()) return 0.0;
    auto pi1 = binarized(c, ref.n());
    auto pi2 = binarized(make_cluster(std::move(star)), ref.n());
    return nmi(pi1.partition, pi2.partition);
}

/// Like bnmi but c* is only the single most-overlapping positive cluster.
inline double max_criterion(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("max_criterion: empty cluster");
    const Cluster* best = nullptr;
    int best_overlap = -1;
    auto clusters = ref.clusters();
    for (const Cluster& r : clusters) {
        int overlap = intersection_size(c, r);
        if (2 * overlap > r.size() && overlap > best_overlap) {
            best_overlap = overlap;
            best = &r;
        }
    }
    if (!best) return 0.0;
    auto pi1 = binarized(c, ref.n());
    auto pi2 = binarized(*best, ref.n());
    return nmi(pi1.partition, pi2.partition);
}

/// APMM criterion over the corresponding partition of c.
inline double apmm(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("apmm: empty cluster");
    int n = ref.n();
    if (c.size() >= n) throw std::invalid_argument("apmm: undefined when c covers the dataset");
    double num = 2.0 * c.size() * std::log(static_cast<double>(c.size()) / n);
    double denom = c.size() * std::log(static_cast<double>(c.size()) / n);
    for (const Cluster& a : corresponding_partition(c, ref))
        denom += a.size() * std::log(static_cast<double>(a.size()) / n);
    return num / denom;
}

/// Edited NMI: NMI between {c, X\c} and the corresponding partition extended
/// with a singleton per sample outside c.
inline double enmi(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("enmi: empty cluster");
    int n = ref.n();
    std::vector<int> labels(n, -1);
    int next = 1;
    for (const Cluster& a : corresponding_partition(c, ref)) {
        for (int i : a.members) labels[i] = next;
        ++next;
    }
    for (int i = 0; i < n; ++i)
        if (labels[i] < 0) labels[i] = next++;
    auto pi1 = binarized(c, n);
    return nmi(pi1.partition, Partition(std::move(labels)));
}

/// Set matching degree of c against the reference:
/// (max block / |c|) * sum over blocks of (|a|/|c|)(|a|/|b|).
inline double sme(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("sme: empty cluster");
    auto alpha = corresponding_partition(c, ref);
    auto beta = extended_partition(c, ref);
    int max_block = 0;
    double sim2 = 0.0;
    double csz = c.size();
    for (size_t i = 0; i < alpha.size(); ++i) {
        max_block = std::max(max_block, alpha[i].size());
        sim2 += (alpha[i].size() / csz) * (static_cast<double>(alpha[i].size()) / beta[i].size());
    }
    return (max_block / csz) * sim2;
}

/// Symmetric partition-level extension of sme: the average of the two
/// unweighted per-cluster means.
inline double smep(const Partition& p, const Partition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("smep: size mismatch");
    auto mean_sme = [](const Partition& a, const Partition& b) {
        double sum = 0.0;
        auto clusters = a.clusters();
        for (const Cluster& c : clusters) sum += sme(c, b);
        return sum / clusters.size();
    };
    return 0.5 * (mean_sme(p, q) + mean_sme(q, p));
}

/// Accuracy, multi-class Cohen's kappa, and one-vs-rest recall/precision/F
/// over the union label set of two aligned label sequences. Labels present in
/// only one partition contribute zero-diagonal rows/columns.
inline ClassificationScores classification_scores(const Partition& actual,
                                                  const Partition& predicted,
                                                  const MetricConfig& cfg = {}) {
    if (actual.n() != predicted.n())
        throw std::invalid_argument("classification_scores: size mismatch");
    cfg.validate();
    std::set<int> label_set(actual.distinct_labels().begin(), actual.distinct_labels().end());
    label_set.insert(predicted.distinct_labels().begin(), predicted.distinct_labels().end());
    std::vector<int> labels(label_set.begin(), label_set.end());
    std::map<int, int> idx;
    for (size_t i = 0; i < labels.size(); ++i) idx[labels[i]] = static_cast<int>(i);

    size_t k = labels.size();
    std::vector<std::vector<long long>> counts(k, std::vector<long long>(k, 0));
    std::vector<long long> row(k, 0), col(k, 0);
    double n = actual.n();
    long long agree = 0;
    for (int i = 0; i < actual.n(); ++i) {
        int a = idx[actual.label_of(i)];
        int p = idx[predicted.label_of(i)];
        ++counts[a][p];
        ++row[a];
        ++col[p];
        if (a == p) ++agree;
    }

    ClassificationScores out;
    out.accuracy = agree / n;
    double expected = 0.0;
    for (size_t t = 0; t < k; ++t) expected += (row[t] / n) * (col[t] / n);
    if (expected >= 1.0) {
        // Both sequences constant with the same label: chance agreement is
        // total, kappa degenerates.
        out.kappa = same_labels(actual, predicted) ? 1.0 : 0.0;
    } else {
        out.kappa = (out.accuracy - expected) / (1.0 - expected);
    }

    double f_sum = 0.0;
    for (size_t t = 0; t < k; ++t) {
        long long tp = counts[t][t];
        double recall = row[t] > 0 ? static_cast<double>(tp) / row[t] : 0.0;
        double precision = col[t] > 0 ? static_cast<double>(tp) / col[t] : 0.0;
        double f = detail::f_beta(precision, recall, cfg.beta);
        out.per_label.push_back({labels[t], recall, precision, f});
        f_sum += f;
    }
    out.macro_f = f_sum / k;
    return out;
}

/// Chance-corrected agreement of two aligned label sequences.
inline double kappa(const Partition& actual, const Partition& predicted) {
    return classification_scores(actual, predicted).kappa;
}

enum class FMatchMode { aligned, best_match };

/// F-score of a single cluster against a reference partition. In aligned mode
/// the positives are the reference cluster carrying the same label (0 when the
/// label is absent); best_match takes the maximum over all reference clusters.
inline double cluster_f(const Cluster& c, int label, const Partition& ref,
                        const MetricConfig& cfg = {}, FMatchMode mode = FMatchMode::aligned) {
    if (c.members.empty()) throw std::invalid_argument("cluster_f: empty cluster");
    cfg.validate();
    auto score_against = [&](const Cluster& r) {
        double tp = intersection_size(c, r);
        double precision = tp / c.size();
        double recall = tp / r.size();
        return detail::f_beta(precision, recall, cfg.beta);
    };
    if (mode == FMatchMode::aligned) {
        if (!ref.has_label(label)) return 0.0;
        return score_against(ref.cluster_of_label(label));
    }
    double best = 0.0;
    for (const Cluster& r : ref.clusters()) best = std::max(best, score_against(r));
    return best;
}

}  // namespace dskf

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dskf {

/// A cluster as a sorted set of sample indices.
struct Cluster {
    std::vector<int> members;  // sorted, unique

    int size() const { return static_cast<int>(members.size()); }
    bool contains(int i) const {
        return std::binary_search(members.begin(), members.end(), i);
    }
};

inline Cluster make_cluster(std::vector<int> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) throw std::invalid_argument("cluster must be non-empty");
    if (members.front() < 0) throw std::invalid_argument("sample indices must be non-negative");
    return Cluster{std::move(members)};
}

inline int intersection_size(const Cluster& a, const Cluster& b) {
    int count = 0;
    auto it = a.members.begin();
    for (int x : b.members) {
        it = std::lower_bound(it, a.members.end(), x);
        if (it == a.members.end()) break;
        if (*it == x) ++count;
    }
    return count;
}

/// An assignment of n samples to cluster labels. Labels are arbitrary
/// non-negative integers and need not be contiguous (alignment can introduce
/// gaps); every label that occurs names a non-empty cluster.
class Partition {
public:
    explicit Partition(std::vector<int> labels) : labels_(std::move(labels)) {
        if (labels_.empty()) throw std::invalid_argument("partition needs at least one sample");
        std::set<int> distinct;
        for (int l : labels_) {
            if (l < 0) throw std::invalid_argument("labels must be non-negative");
            distinct.insert(l);
        }
        distinct_.assign(distinct.begin(), distinct.end());
    }

    int n() const { return static_cast<int>(labels_.size()); }
    int k() const { return static_cast<int>(distinct_.size()); }
    const std::vector<int>& labels() const { return labels_; }
    int label_of(int i) const { return labels_.at(i); }
    const std::vector<int>& distinct_labels() const { return distinct_; }
    int max_label() const { return distinct_.back(); }

    bool has_label(int label) const {
        return std::binary_search(distinct_.begin(), distinct_.end(), label);
    }

    /// Clusters in ascending label order.
    std::vector<Cluster> clusters() const {
        std::map<int, std::vector<int>> by_label;
        for (int i = 0; i < n(); ++i) by_label[labels_[i]].push_back(i);
        std::vector<Cluster> out;
        out.reserve(by_label.size());
        for (auto& [label, members] : by_label) out.push_back(Cluster{std::move(members)});
        return out;
    }

    Cluster cluster_of_label(int label) const {
        std::vector<int> members;
        for (int i = 0; i < n(); ++i)
            if (labels_[i] == label) members.push_back(i);
        if (members.empty()) throw std::invalid_argument("no such label in partition");
        return Cluster{std::move(members)};
    }

    std::vector<int> cluster_sizes() const {
        std::map<int, int> counts;
        for (int l : labels_) ++counts[l];
        std::vector<int> out;
        out.reserve(counts.size());
        for (auto& [label, c] : counts) out.push_back(c);
        return out;
    }

private:
    std::vector<int> labels_;
    std::vector<int> distinct_;  // sorted
};

inline Partition partition_from_labels(const std::vector<int>& labels) {
    return Partition(labels);
}

/// Exact-label equality, for aligned comparisons.
inline bool same_labels(const Partition& p, const Partition& q) {
    return p.labels() == q.labels();
}

/// Label-structure equality: same grouping regardless of the label values.
inline bool same_grouping(const Partition& p, const Partition& q) {
    if (p.n() != q.n() || p.k() != q.k()) return false;
    std::map<int, int> fwd, bwd;
    for (int i = 0; i < p.n(); ++i) {
        int a = p.label_of(i), b = q.label_of(i);
        auto [itf, newf] = fwd.emplace(a, b);
        if (!newf && itf->second != b) return false;
        auto [itb, newb] = bwd.emplace(b, a);
        if (!newb && itb->second != a) return false;
    }
    return true;
}

/// Cluster-overlap counts between two partitions, with marginals. Rows follow
/// p's labels in ascending order, columns q's.
struct ContingencyTable {
    std::vector<std::vector<long long>> counts;  // k1 x k2
    std::vector<long long> row_sums;
    std::vector<long long> col_sums;
    std::vector<int> row_labels;
    std::vector<int> col_labels;
    long long n = 0;
};

inline ContingencyTable contingency(const Partition& p, const Partition& q) {
    if (p.n() != q.n()) throw std::invalid_argument("contingency: partitions have different n");
    ContingencyTable t;
    t.row_labels = p.distinct_labels();
    t.col_labels = q.distinct_labels();
    std::map<int, int> row_idx, col_idx;
    for (size_t i = 0; i < t.row_labels.size(); ++i) row_idx[t.row_labels[i]] = static_cast<int>(i);
    for (size_t j = 0; j < t.col_labels.size(); ++j) col_idx[t.col_labels[j]] = static_cast<int>(j);
    t.counts.assign(t.row_labels.size(), std::vector<long long>(t.col_labels.size(), 0));
    t.row_sums.assign(t.row_labels.size(), 0);
    t.col_sums.assign(t.col_labels.size(), 0);
    t.n = p.n();
    for (int i = 0; i < p.n(); ++i) {
        int r = row_idx[p.label_of(i)];
        int c = col_idx[q.label_of(i)];
        ++t.counts[r][c];
        ++t.row_sums[r];
        ++t.col_sums[c];
    }
    return t;
}

/// Two-cluster partition {c, X\c}. If c covers the whole sample set the
/// complement is empty and the result is a flagged one-cluster partition.
struct BinarizedPartition {
    Partition partition;
    bool degenerate;  // complement empty
};

inline BinarizedPartition binarized(const Cluster& c, int n) {
    if (c.members.empty()) throw std::invalid_argument("binarized: empty cluster");
    if (c.members.back() >= n) throw std::invalid_argument("binarized: index out of range");
    std::vector<int> labels(n, 2);
    for (int i : c.members) labels[i] = 1;
    bool degenerate = c.size() == n;
    return BinarizedPartition{Partition(std::move(labels)), degenerate};
}

/// The non-empty intersections of c with every reference cluster, in the
/// reference's ascending label order. The blocks partition c exactly.
inline std::vector<Cluster> corresponding_partition(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("corresponding_partition: empty cluster");
    std::vector<Cluster> blocks;
    for (const Cluster& r : ref.clusters()) {
        std::vector<int> inter;
        std::set_intersection(c.members.begin(), c.members.end(),
                              r.members.begin(), r.members.end(),
                              std::back_inserter(inter));
        if (!inter.empty()) blocks.push_back(Cluster{std::move(inter)});
    }
    return blocks;
}

/// The full reference clusters that intersect c, index-aligned with
/// corresponding_partition (block i of the former is a subset of block i here).
inline std::vector<Cluster> extended_partition(const Cluster& c, const Partition& ref) {
    if (c.members.empty()) throw std::invalid_argument("extended_partition: empty cluster");
    std::vector<Cluster> out;
    for (const Cluster& r : ref.clusters()) {
        if (intersection_size(c, r) > 0) out.push_back(r);
    }
    return out;
}

/// An ordered collection of partitions over a common sample set. When aligned,
/// every partition's labels live in the reference's label space (plus fresh
/// labels for unmatched clusters) and reference_index records the reference.
struct Ensemble {
    std::vector<Partition> partitions;
    bool aligned = false;
    std::optional<int> reference_index;

    int size() const { return static_cast<int>(partitions.size()); }
    int n() const { return partitions.empty() ? 0 : partitions.front().n(); }

    void validate() const {
        if (partitions.empty()) throw std::invalid_argument("ensemble is empty");
        for (const auto& p : partitions)
            if (p.n() != n()) throw std::invalid_argument("ensemble partitions differ in n");
        if (aligned && !reference_index)
            throw std::invalid_argument("aligned ensemble must record its reference");
    }
};

}  // namespace dskf

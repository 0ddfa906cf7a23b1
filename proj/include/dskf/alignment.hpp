#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dskf/metrics.hpp"
#include "dskf/partition.hpp"
#include "dskf/rng.hpp"

namespace dskf {

/// Pairwise alignment costs between the clusters of a source partition (rows)
/// and a reference partition (columns). Entry (s, t) is the size of the
/// symmetric difference of the two clusters.
struct CostMatrix {
    std::vector<std::vector<long long>> costs;  // k_i x k
    std::vector<int> source_labels;
    std::vector<int> target_labels;

    int rows() const { return static_cast<int>(costs.size()); }
    int cols() const { return costs.empty() ? 0 : static_cast<int>(costs.front().size()); }
};

/// The optimal source-to-reference label assignment.
struct LabelMapping {
    std::vector<std::pair<int, int>> pairs;  // (source_label, target_label)
    std::vector<int> unmatched_sources;
    long long total_cost = 0;

    std::map<int, int> as_map() const {
        std::map<int, int> m;
        for (auto [s, t] : pairs) m[s] = t;
        return m;
    }
};

inline long long alignment_cost(const Cluster& c_s, const Cluster& c_t) {
    long long inter = intersection_size(c_s, c_t);
    return c_s.size() + c_t.size() - 2 * inter;  // |union| - |intersection|
}

inline CostMatrix alignment_costs(const Partition& p, const Partition& ref) {
    CostMatrix cm;
    cm.source_labels = p.distinct_labels();
    cm.target_labels = ref.distinct_labels();
    auto src = p.clusters();
    auto tgt = ref.clusters();
    cm.costs.assign(src.size(), std::vector<long long>(tgt.size(), 0));
    for (size_t s = 0; s < src.size(); ++s)
        for (size_t t = 0; t < tgt.size(); ++t)
            cm.costs[s][t] = alignment_cost(src[s], tgt[t]);
    return cm;
}

namespace detail {

constexpr long long kForbidden = std::numeric_limits<long long>::max() / 4;

/// Square Kuhn-Munkres (shortest augmenting path formulation). Returns the
/// minimum total cost; rowsol[i] is the column assigned to row i.
inline long long hungarian_square(const std::vector<std::vector<long long>>& cost,
                                  std::vector<int>& rowsol) {
    int n = static_cast<int>(cost.size());
    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, std::numeric_limits<long long>::max());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            long long delta = std::numeric_limits<long long>::max();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) { minv[j] = cur; way[j] = j0; }
                if (minv[j] < delta) { delta = minv[j]; j1 = j; }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) { u[p[j]] += delta; v[j] -= delta; }
                else minv[j] -= delta;
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    rowsol.assign(n, -1);
    long long total = 0;
    for (int j = 1; j <= n; ++j) {
        if (p[j]) {
            rowsol[p[j] - 1] = j - 1;
            total += cost[p[j] - 1][j - 1];
        }
    }
    return total;
}

/// Minimum cost of matching min(r, c) pairs in a rectangular matrix, with
/// forbidden cells. Pads to square with zeros; dummy matches cost nothing.
inline long long rect_min_cost(const std::vector<std::vector<long long>>& cost) {
    int r = static_cast<int>(cost.size());
    int c = r == 0 ? 0 : static_cast<int>(cost.front().size());
    int n = std::max(r, c);
    if (n == 0) return 0;
    std::vector<std::vector<long long>> sq(n, std::vector<long long>(n, 0));
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) sq[i][j] = cost[i][j];
    std::vector<int> rowsol;
    return hungarian_square(sq, rowsol);
}

}  // namespace detail

/// Solve the label-alignment assignment problem: minimum total cost over
/// injective source-to-target matchings. With fewer sources than targets every
/// source is matched; with more sources than targets every target is matched
/// and the excess sources stay unmatched. Among equal-cost optima the mapping
/// is canonical: sources are processed in ascending label order and each takes
/// the lowest-labelled target consistent with optimality.
inline LabelMapping solve_assignment(const CostMatrix& cm) {
    int r = cm.rows(), c = cm.cols();
    if (r == 0 || c == 0) throw std::invalid_argument("solve_assignment: empty cost matrix");
    for (const auto& row : cm.costs)
        for (long long v : row)
            if (v < 0) throw std::invalid_argument("solve_assignment: negative cost");

    long long best = detail::rect_min_cost(cm.costs);

    // Lexicographic refinement: fix one source at a time, verifying with a
    // re-solve that the partial choice still reaches the optimum.
    std::vector<int> free_rows(r), free_cols(c);
    for (int i = 0; i < r; ++i) free_rows[i] = i;
    for (int j = 0; j < c; ++j) free_cols[j] = j;

    auto subproblem = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        std::vector<std::vector<long long>> sub(rows.size(),
                                                std::vector<long long>(cols.size(), 0));
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < cols.size(); ++j)
                sub[i][j] = cm.costs[rows[i]][cols[j]];
        return detail::rect_min_cost(sub);
    };

    LabelMapping out;
    long long fixed_cost = 0;
    long long remaining = best;
    for (int s = 0; s < r; ++s) {
        std::vector<int> rows_after(free_rows.begin() + 1, free_rows.end());
        bool fixed = false;
        for (size_t jj = 0; jj < free_cols.size(); ++jj) {
            int t = free_cols[jj];
            std::vector<int> cols_after = free_cols;
            cols_after.erase(cols_after.begin() + jj);
            // Matching s to t must still allow the remaining rows/cols to
            // reach the optimum; skip it otherwise.
            long long with = cm.costs[s][t] + subproblem(rows_after, cols_after);
            if (fixed_cost + with == best) {
                out.pairs.emplace_back(cm.source_labels[s], cm.target_labels[t]);
                out.total_cost += cm.costs[s][t];
                fixed_cost += cm.costs[s][t];
                free_cols = std::move(cols_after);
                fixed = true;
                break;
            }
        }
        if (!fixed) {
            // Only legal when sources outnumber targets.
            long long without = subproblem(rows_after, free_cols);
            if (r <= c || fixed_cost + without != best)
                throw std::logic_error("solve_assignment: refinement failed");
            out.unmatched_sources.push_back(cm.source_labels[s]);
        }
        free_rows = std::move(rows_after);
        remaining = best - fixed_cost;
    }
    (void)remaining;
    return out;
}

/// Relabel p into ref's label space using the optimal assignment. Unmatched
/// source labels get fresh labels above ref's maximum, in ascending source
/// label order.
inline std::pair<Partition, LabelMapping> align_partition(const Partition& p,
                                                          const Partition& ref) {
    if (p.n() != ref.n()) throw std::invalid_argument("align_partition: size mismatch");
    LabelMapping mapping = solve_assignment(alignment_costs(p, ref));
    std::map<int, int> relabel = mapping.as_map();
    int fresh = ref.max_label() + 1;
    for (int s : mapping.unmatched_sources) relabel[s] = fresh++;  // already ascending
    std::vector<int> labels(p.n());
    for (int i = 0; i < p.n(); ++i) labels[i] = relabel.at(p.label_of(i));
    return {Partition(std::move(labels)), std::move(mapping)};
}

enum class ReferenceStrategy { random, max_entropy };

/// Align every partition to a common reference chosen by the strategy. The
/// reference itself is unchanged; the result is deterministic given the seed.
inline Ensemble align_ensemble(const Ensemble& ens, ReferenceStrategy strategy,
                               std::uint64_t seed) {
    ens.validate();
    if (ens.aligned) throw std::invalid_argument("align_ensemble: ensemble already aligned");
    int ref_idx = 0;
    if (strategy == ReferenceStrategy::random) {
        Rng rng(seed);
        ref_idx = static_cast<int>(rng.uniform_index(ens.size()));
    } else {
        double best = -1.0;
        for (int i = 0; i < ens.size(); ++i) {
            double h = entropy(ens.partitions[i]);
            if (h > best) { best = h; ref_idx = i; }
        }
    }
    Ensemble out;
    out.aligned = true;
    out.reference_index = ref_idx;
    out.partitions.reserve(ens.size());
    const Partition& ref = ens.partitions[ref_idx];
    for (int i = 0; i < ens.size(); ++i) {
        if (i == ref_idx) out.partitions.push_back(ref);
        else out.partitions.push_back(align_partition(ens.partitions[i], ref).first);
    }
    return out;
}

}  // namespace dskf

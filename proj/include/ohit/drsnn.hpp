#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "ohit/errors.hpp"
#include "ohit/types.hpp"

namespace ohit {

// Exact k-nearest-neighbor lists under Euclidean distance, ties broken by
// lower point index. `k` holds the effective (possibly clamped) value.
struct NeighborTable {
    int k = 0;
    int requested_k = 0;
    std::vector<std::vector<int>> neighbors;     // n lists of k indices
    std::vector<std::vector<double>> distances;  // matching, non-decreasing

    bool clamped() const { return k != requested_k; }
    Index size() const { return static_cast<Index>(neighbors.size()); }
};

// Sparse symmetric shared-neighbor graph. An edge exists only between mutual
// k-NN pairs; its weight is the shared-neighbor count (0..k).
struct SnnGraph {
    std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, weight)

    Index size() const { return static_cast<Index>(adj.size()); }

    // -1 when no edge; weights themselves can legitimately be 0.
    int weight(int i, int j) const {
        for (const auto& [q, w] : adj[static_cast<std::size_t>(i)])
            if (q == j) return w;
        return -1;
    }
    bool has_edge(int i, int j) const { return weight(i, j) >= 0; }
};

// Complete partition of the minority set: every point carries a cluster id in
// 1..m after noise resolution.
struct ClusterLabeling {
    std::vector<int> assignment;  // 1..m per point
    int num_clusters = 0;
    std::vector<bool> core_flags;

    std::vector<Index> cluster_sizes() const {
        std::vector<Index> sizes(static_cast<std::size_t>(num_clusters), 0);
        for (int c : assignment) sizes[static_cast<std::size_t>(c - 1)]++;
        return sizes;
    }
};

struct DrsnnParams {
    std::optional<int> k;
    std::optional<int> kappa;
    std::optional<double> drT;
};

// k = ceil(sqrt(n)) + 5 clamped to [5, n-1]; kappa = k; drT = 0.9. The +5
// keeps the core subgraph of a single mode connected at mode sizes around
// 20-40, where ceil(sqrt(n)) alone fragments it.
inline int default_k(Index n) {
    const int raw = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 5;
    return std::max(1, std::min(std::max(raw, 5), static_cast<int>(n) - 1));
}
inline constexpr double kDefaultDensityRatioThreshold = 0.9;

inline NeighborTable knn_lists(const Matrix& X, int k) {
    const Index n = X.rows();
    if (n < 2) throw ParameterError("knn_lists needs at least 2 points");
    if (k < 1) throw ParameterError("k must be positive");

    NeighborTable nt;
    nt.requested_k = k;
    nt.k = std::min<int>(k, static_cast<int>(n) - 1);  // clamp, not an error
    nt.neighbors.resize(static_cast<std::size_t>(n));
    nt.distances.resize(static_cast<std::size_t>(n));

    std::vector<std::pair<double, int>> order(static_cast<std::size_t>(n) - 1);
    for (Index i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            order[m++] = {(X.row(i) - X.row(j)).norm(), static_cast<int>(j)};
        }
        std::sort(order.begin(), order.end());
        auto& nb = nt.neighbors[static_cast<std::size_t>(i)];
        auto& ds = nt.distances[static_cast<std::size_t>(i)];
        nb.resize(static_cast<std::size_t>(nt.k));
        ds.resize(static_cast<std::size_t>(nt.k));
        for (int r = 0; r < nt.k; ++r) {
            nb[static_cast<std::size_t>(r)] = order[static_cast<std::size_t>(r)].second;
            ds[static_cast<std::size_t>(r)] = order[static_cast<std::size_t>(r)].first;
        }
    }
    return nt;
}

// weight(i,j) = |NN_k(i) ∩ NN_k(j)| for mutual pairs, no edge otherwise
// (Jarvis-Patrick sparsification).
inline SnnGraph snn_graph(const NeighborTable& nt) {
    const Index n = nt.size();
    std::vector<std::vector<int>> sorted(static_cast<std::size_t>(n));
    std::vector<std::vector<bool>> in_list(
        static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (Index i = 0; i < n; ++i) {
        sorted[static_cast<std::size_t>(i)] = nt.neighbors[static_cast<std::size_t>(i)];
        std::sort(sorted[static_cast<std::size_t>(i)].begin(),
                  sorted[static_cast<std::size_t>(i)].end());
        for (int q : nt.neighbors[static_cast<std::size_t>(i)])
            in_list[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] = true;
    }

    SnnGraph g;
    g.adj.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        for (int j : nt.neighbors[static_cast<std::size_t>(i)]) {
            if (j <= static_cast<int>(i)) continue;
            if (!in_list[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                continue;  // not mutual
            const auto& a = sorted[static_cast<std::size_t>(i)];
            const auto& b = sorted[static_cast<std::size_t>(j)];
            int w = 0;
            std::size_t p = 0, q = 0;
            while (p < a.size() && q < b.size()) {
                if (a[p] < b[q]) ++p;
                else if (a[p] > b[q]) ++q;
                else { ++w; ++p; ++q; }
            }
            g.adj[static_cast<std::size_t>(i)].emplace_back(j, w);
            g.adj[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), w);
        }
    }
    return g;
}

// dens(p) = sum of SNN weights over p's k-NN list; absent edges contribute 0.
inline std::vector<double> snn_density(const SnnGraph& g, const NeighborTable& nt) {
    const Index n = nt.size();
    std::vector<double> dens(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (int q : nt.neighbors[static_cast<std::size_t>(i)]) {
            const int w = g.weight(static_cast<int>(i), q);
            if (w > 0) s += w;
        }
        dens[static_cast<std::size_t>(i)] = s;
    }
    return dens;
}

// dr(p) = dens(p) / mean density of the kappa k-NN neighbors of p with the
// highest SNN weight. Zero-mean neighborhoods map to 0 (dens 0) or +inf.
inline std::vector<double> density_ratio(const std::vector<double>& densities,
                                         const SnnGraph& g,
                                         const NeighborTable& nt, int kappa) {
    if (kappa < 1 || kappa > nt.k)
        throw ParameterError("kappa must be in [1, k]");

    const Index n = nt.size();
    std::vector<double> dr(static_cast<std::size_t>(n), 0.0);
    std::vector<std::pair<int, int>> cand;  // (-weight, index): sorts descending by weight
    for (Index i = 0; i < n; ++i) {
        cand.clear();
        for (int q : nt.neighbors[static_cast<std::size_t>(i)]) {
            const int w = g.weight(static_cast<int>(i), q);
            cand.emplace_back(-std::max(w, 0), q);
        }
        std::sort(cand.begin(), cand.end());
        const int take = std::min<int>(kappa, static_cast<int>(cand.size()));
        double mean = 0.0;
        for (int r = 0; r < take; ++r)
            mean += densities[static_cast<std::size_t>(cand[static_cast<std::size_t>(r)].second)];
        mean /= take;

        const double dp = densities[static_cast<std::size_t>(i)];
        if (mean == 0.0)
            dr[static_cast<std::size_t>(i)] =
                dp == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        else
            dr[static_cast<std::size_t>(i)] = dp / mean;
    }
    return dr;
}

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

  private:
    std::vector<std::size_t> parent_;
};

inline void relabel_contiguous(std::vector<int>& assignment, int& m) {
    std::vector<int> remap;
    for (int& a : assignment) {
        int found = -1;
        for (std::size_t r = 0; r < remap.size(); ++r)
            if (remap[r] == a) { found = static_cast<int>(r); break; }
        if (found < 0) {
            remap.push_back(a);
            found = static_cast<int>(remap.size()) - 1;
        }
        a = found + 1;
    }
    m = static_cast<int>(remap.size());
}

}  // namespace detail

// GDBSCAN-style extraction: cores are points with dr >= drT, connected when
// they share an SNN edge. Non-core points join the cluster of their
// highest-weight core neighbor, falling back to the Euclidean-nearest core.
// Clusters smaller than 4 are merged into the nearest-centroid cluster so
// downstream covariance estimation always has enough rows.
inline ClusterLabeling extract_clusters(const Matrix& X, const SnnGraph& g,
                                        const std::vector<double>& ratios,
                                        double drT) {
    if (drT <= 0.0) throw ParameterError("drT must be positive");

    const Index n = X.rows();
    ClusterLabeling lab;
    lab.assignment.assign(static_cast<std::size_t>(n), 0);
    lab.core_flags.assign(static_cast<std::size_t>(n), false);

    for (Index i = 0; i < n; ++i)
        lab.core_flags[static_cast<std::size_t>(i)] =
            ratios[static_cast<std::size_t>(i)] >= drT;

    const bool any_core =
        std::any_of(lab.core_flags.begin(), lab.core_flags.end(), [](bool b) { return b; });
    if (!any_core) {
        // fallback: the whole set is one cluster
        std::fill(lab.assignment.begin(), lab.assignment.end(), 1);
        lab.num_clusters = 1;
        return lab;
    }

    detail::UnionFind uf(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        if (!lab.core_flags[static_cast<std::size_t>(i)]) continue;
        for (const auto& [j, w] : g.adj[static_cast<std::size_t>(i)]) {
            (void)w;
            if (j > static_cast<int>(i) && lab.core_flags[static_cast<std::size_t>(j)])
                uf.unite(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }

    std::vector<int> root_to_id(static_cast<std::size_t>(n), 0);
    int next_id = 0;
    for (Index i = 0; i < n; ++i) {
        if (!lab.core_flags[static_cast<std::size_t>(i)]) continue;
        const std::size_t r = uf.find(static_cast<std::size_t>(i));
        if (root_to_id[r] == 0) root_to_id[r] = ++next_id;
        lab.assignment[static_cast<std::size_t>(i)] = root_to_id[r];
    }

    for (Index p = 0; p < n; ++p) {
        if (lab.core_flags[static_cast<std::size_t>(p)]) continue;
        int best_w = -1, best_q = -1;
        for (const auto& [q, w] : g.adj[static_cast<std::size_t>(p)]) {
            if (!lab.core_flags[static_cast<std::size_t>(q)]) continue;
            if (w > best_w || (w == best_w && q < best_q)) {
                best_w = w;
                best_q = q;
            }
        }
        if (best_q < 0) {
            // no core neighbor in the graph: nearest core by Euclidean distance
            double best_d = std::numeric_limits<double>::infinity();
            for (Index q = 0; q < n; ++q) {
                if (!lab.core_flags[static_cast<std::size_t>(q)]) continue;
                const double dist = (X.row(p) - X.row(q)).norm();
                if (dist < best_d) {
                    best_d = dist;
                    best_q = static_cast<int>(q);
                }
            }
        }
        lab.assignment[static_cast<std::size_t>(p)] =
            lab.assignment[static_cast<std::size_t>(best_q)];
    }

    lab.num_clusters = next_id;

    // small-cluster floor
    constexpr Index kMinClusterSize = 4;
    while (lab.num_clusters > 1) {
        const auto sizes = lab.cluster_sizes();
        int small = -1;
        for (int c = 0; c < lab.num_clusters; ++c) {
            if (sizes[static_cast<std::size_t>(c)] >= kMinClusterSize) continue;
            if (small < 0 ||
                sizes[static_cast<std::size_t>(c)] < sizes[static_cast<std::size_t>(small)])
                small = c;
        }
        if (small < 0) break;

        std::vector<Vector> centroids(static_cast<std::size_t>(lab.num_clusters),
                                      Vector::Zero(X.cols()));
        for (Index i = 0; i < n; ++i)
            centroids[static_cast<std::size_t>(lab.assignment[static_cast<std::size_t>(i)] - 1)] +=
                X.row(i).transpose();
        for (int c = 0; c < lab.num_clusters; ++c)
            centroids[static_cast<std::size_t>(c)] /=
                static_cast<double>(sizes[static_cast<std::size_t>(c)]);

        int target = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < lab.num_clusters; ++c) {
            if (c == small) continue;
            const double dist =
                (centroids[static_cast<std::size_t>(c)] - centroids[static_cast<std::size_t>(small)])
                    .norm();
            if (dist < best_d) {
                best_d = dist;
                target = c;
            }
        }
        for (int& a : lab.assignment)
            if (a == small + 1) a = target + 1;
        detail::relabel_contiguous(lab.assignment, lab.num_clusters);
    }

    detail::relabel_contiguous(lab.assignment, lab.num_clusters);
    return lab;
}

// Full DRSNN pass. Deterministic: no randomness anywhere in this module.
inline ClusterLabeling drsnn(const Matrix& P, int k, int kappa, double drT) {
    const Index n = P.rows();
    if (n < 1) throw ParameterError("empty minority set");
    if (n == 1) {
        ClusterLabeling lab;
        lab.assignment = {1};
        lab.num_clusters = 1;
        lab.core_flags = {true};
        return lab;
    }
    const auto nt = knn_lists(P, k);
    const int kappa_eff = std::min(kappa, nt.k);
    const auto g = snn_graph(nt);
    const auto dens = snn_density(g, nt);
    const auto dr = density_ratio(dens, g, nt, kappa_eff);
    return extract_clusters(P, g, dr, drT);
}

inline ClusterLabeling drsnn(const Matrix& P, const DrsnnParams& params = {}) {
    const Index n = P.rows();
    if (n == 1) return drsnn(P, 1, 1, kDefaultDensityRatioThreshold);
    const int k = params.k.value_or(default_k(n));
    const int kappa = params.kappa.value_or(k);
    const double drT = params.drT.value_or(kDefaultDensityRatioThreshold);
    return drsnn(P, k, kappa, drT);
}

// Debug dump: point_index, cluster_id, is_core, density_ratio
inline void dump_labeling(std::ostream& out, const ClusterLabeling& lab,
                          const std::vector<double>& ratios, char delim = ',') {
    for (std::size_t i = 0; i < lab.assignment.size(); ++i) {
        out << i << delim << lab.assignment[i] << delim
            << (lab.core_flags[i] ? 1 : 0) << delim
            << (i < ratios.size() ? ratios[i] : 0.0) << '\n';
    }
}

}  // namespace ohit

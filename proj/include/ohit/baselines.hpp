#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ohit/errors.hpp"
#include "ohit/rng.hpp"
#include "ohit/synthesis.hpp"
#include "ohit/types.hpp"

namespace ohit {

// eta rows drawn uniformly with replacement from P.
inline SyntheticSet random_oversample(const Matrix& P, long long eta,
                                      std::uint64_t seed) {
    if (P.rows() < 1) throw ParameterError("empty minority set");
    if (eta < 0) throw ParameterError("eta must be non-negative");

    SyntheticSet out;
    out.samples.resize(static_cast<Index>(eta), P.cols());
    out.provenance.assign(static_cast<std::size_t>(eta), 1);
    Rng rng(seed);
    for (Index r = 0; r < out.samples.rows(); ++r)
        out.samples.row(r) =
            P.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(P.rows()))));
    return out;
}

struct SmoteDraw {
    int base = 0;
    int neighbor = 0;
    double u = 0.0;
};

// Classic SMOTE: each synthetic row is x + u * (x_nn - x) with x_nn drawn
// uniformly from the k nearest minority neighbors of x and u uniform on
// [0, 1). Base rows are cycled in index order until eta rows exist.
// A single-row minority set falls back to random oversampling.
inline SyntheticSet smote(const Matrix& P, long long eta, int k_smote,
                          std::uint64_t seed,
                          std::vector<SmoteDraw>* draw_log = nullptr,
                          std::string* warning = nullptr) {
    const Index n = P.rows();
    if (n < 1) throw ParameterError("empty minority set");
    if (eta < 0) throw ParameterError("eta must be non-negative");
    if (n == 1) {
        if (warning)
            *warning = "smote: single minority sample, falling back to random oversampling";
        return random_oversample(P, eta, seed);
    }

    const int k = std::min<int>(std::max(k_smote, 1), static_cast<int>(n) - 1);

    // k nearest minority neighbors per row, ties by lower index
    std::vector<std::vector<int>> nn(static_cast<std::size_t>(n));
    std::vector<std::pair<double, int>> order(static_cast<std::size_t>(n) - 1);
    for (Index i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (Index j = 0; j < n; ++j) {
            if (j == i) continue;
            order[m++] = {(P.row(i) - P.row(j)).norm(), static_cast<int>(j)};
        }
        std::sort(order.begin(), order.end());
        for (int r = 0; r < k; ++r)
            nn[static_cast<std::size_t>(i)].push_back(order[static_cast<std::size_t>(r)].second);
    }

    SyntheticSet out;
    out.samples.resize(static_cast<Index>(eta), P.cols());
    out.provenance.assign(static_cast<std::size_t>(eta), 1);
    Rng rng(seed);
    for (long long r = 0; r < eta; ++r) {
        const Index base = static_cast<Index>(r % n);
        const int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        const int neighbor = nn[static_cast<std::size_t>(base)][static_cast<std::size_t>(pick)];
        const double u = rng.uniform01();
        out.samples.row(static_cast<Index>(r)) =
            P.row(base) + u * (P.row(neighbor) - P.row(base));
        if (draw_log)
            draw_log->push_back({static_cast<int>(base), neighbor, u});
    }
    return out;
}

}  // namespace ohit

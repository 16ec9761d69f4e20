#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ohit/rng.hpp"
#include "ohit/shrinkage.hpp"
#include "ohit/synthesis.hpp"
#include "oracles.hpp"

using namespace ohit;

TEST_CASE("allocate follows the ceiling formula") {
    const auto plan = allocate(50, {30, 70}, 100, 0);
    REQUIRE(plan.per_cluster.size() == 2);
    CHECK(plan.per_cluster[0] == std::pair<int, long long>{1, 15});
    CHECK(plan.per_cluster[1] == std::pair<int, long long>{2, 35});
}

TEST_CASE("allocate with eta zero") {
    const auto plan = allocate(0, {5, 5}, 10, 0);
    for (const auto& [id, c] : plan.per_cluster) CHECK(c == 0);
    CHECK(plan.total() == 0);
}

TEST_CASE("allocate overshoot is bounded by the cluster count") {
    const auto plan = allocate(10, {1, 1, 1}, 3, 0);
    CHECK(plan.per_cluster[0].second == 4);
    CHECK(plan.per_cluster[1].second == 4);
    CHECK(plan.per_cluster[2].second == 4);
    CHECK(plan.total() == 12);
}

TEST_CASE("allocate rejects size mismatch") {
    CHECK_THROWS_AS(allocate(5, {3, 3}, 7, 0), ContractViolation);
}

TEST_CASE("allocation exactness over all eta on small instances") {
    const std::vector<std::vector<Index>> instances = {
        {4, 9}, {1, 1, 1}, {7}, {2, 3, 5, 8}};
    for (const auto& sizes : instances) {
        Index n = 0;
        for (Index s : sizes) n += s;
        for (long long eta = 0; eta <= 3 * n; ++eta) {
            const auto plan = allocate(eta, sizes, n, 0);
            long long total = 0;
            for (std::size_t c = 0; c < sizes.size(); ++c) {
                const long long expected = static_cast<long long>(
                    std::ceil(static_cast<double>(eta) *
                              static_cast<double>(sizes[c]) /
                              static_cast<double>(n)));
                CHECK(plan.per_cluster[c].second == expected);
                total += plan.per_cluster[c].second;
            }
            CHECK(total >= eta);
            CHECK(total <= eta + static_cast<long long>(sizes.size()));
        }
    }
}

TEST_CASE("sample_gaussian with count zero is empty") {
    const Matrix out = sample_gaussian(Vector::Zero(3), Matrix::Identity(3, 3), 0, 1);
    CHECK(out.rows() == 0);
    CHECK(out.cols() == 3);
}

TEST_CASE("sample_gaussian from ridge-only variance hugs the mean") {
    Vector mu(1);
    mu << 5.0;
    const Matrix S = ensure_positive_definite(Matrix::Zero(1, 1));
    const Matrix out = sample_gaussian(mu, S, 50, 9);
    for (Index r = 0; r < out.rows(); ++r)
        CHECK_THAT(out(r, 0), Catch::Matchers::WithinAbs(5.0, 1e-8));
    // but not exactly equal: the jitter is real
    bool any_off = false;
    for (Index r = 0; r < out.rows(); ++r)
        if (out(r, 0) != 5.0) any_off = true;
    CHECK(any_off);
}

TEST_CASE("sample_gaussian empirical moments converge on the identity") {
    const Index d = 2;
    const long long count = 100000;
    const Matrix out =
        sample_gaussian(Vector::Zero(d), Matrix::Identity(d, d), count, 4242);
    const Vector mean = out.colwise().mean().transpose();
    for (Index j = 0; j < d; ++j)
        CHECK_THAT(mean(j), Catch::Matchers::WithinAbs(0.0, 0.02));
    const Matrix centered = out.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / double(count - 1);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
            CHECK_THAT(cov(i, j), Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 0.02));
}

TEST_CASE("sample_gaussian is bit-identical for identical inputs") {
    Vector mu(4);
    mu << 1, 2, 3, 4;
    Matrix S = Matrix::Identity(4, 4);
    S(0, 1) = S(1, 0) = 0.3;
    const Matrix a = sample_gaussian(mu, S, 200, 31337);
    const Matrix b = sample_gaussian(mu, S, 200, 31337);
    CHECK(a == b);
    const Matrix c = sample_gaussian(mu, S, 200, 31338);
    CHECK(a != c);
}

namespace {

std::vector<std::pair<int, ShrinkageEstimate>> two_estimates() {
    Rng rng(77);
    Matrix c1(10, 3), c2(12, 3);
    for (Index i = 0; i < c1.rows(); ++i)
        for (Index j = 0; j < 3; ++j) c1(i, j) = rng.normal();
    for (Index i = 0; i < c2.rows(); ++i)
        for (Index j = 0; j < 3; ++j) c2(i, j) = 5.0 + rng.normal();
    return {{1, shrink_estimate(c1)}, {2, shrink_estimate(c2)}};
}

}  // namespace

TEST_CASE("synthesize concatenates per-cluster draws with provenance") {
    SynthesisPlan plan;
    plan.per_cluster = {{1, 2}, {2, 3}};
    plan.eta_total = 5;
    plan.seed = 123;
    const auto out = synthesize(plan, two_estimates());
    REQUIRE(out.size() == 5);
    CHECK(out.provenance == std::vector<int>{1, 1, 2, 2, 2});
}

TEST_CASE("synthesize output is independent of cluster processing order") {
    auto estimates = two_estimates();
    SynthesisPlan plan;
    plan.per_cluster = {{1, 4}, {2, 6}};
    plan.eta_total = 10;
    plan.seed = 5;
    const auto fwd = synthesize(plan, estimates);

    SynthesisPlan reversed;
    reversed.per_cluster = {{2, 6}, {1, 4}};
    reversed.eta_total = 10;
    reversed.seed = 5;
    std::swap(estimates[0], estimates[1]);
    const auto rev = synthesize(reversed, estimates);

    // cluster 1 rows appear first in fwd, last in rev, but identically
    CHECK(fwd.samples.topRows(4) == rev.samples.bottomRows(4));
    CHECK(fwd.samples.bottomRows(6) == rev.samples.topRows(6));
}

TEST_CASE("synthesize rejects mismatched cluster ids") {
    SynthesisPlan plan;
    plan.per_cluster = {{1, 2}, {3, 3}};
    plan.seed = 0;
    CHECK_THROWS_AS(synthesize(plan, two_estimates()), ContractViolation);
}

TEST_CASE("large draws reproduce the estimated covariance") {
    Rng rng(2);
    Matrix C(8, 5);
    for (Index i = 0; i < 8; ++i)
        for (Index j = 0; j < 5; ++j) C(i, j) = rng.normal();
    const auto est = shrink_estimate(C);

    const long long count = 100000;
    const Matrix out = sample_gaussian(est.mu, est.S_star, count, 99);
    const Vector mean = out.colwise().mean().transpose();
    const Matrix centered = out.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / double(count - 1);

    const double floor = 0.05 * est.S_star.cwiseAbs().maxCoeff();
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            if (std::abs(est.S_star(i, j)) > floor)
                CHECK_THAT(cov(i, j), Catch::Matchers::WithinRel(est.S_star(i, j), 0.05));
}

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "ohit/baselines.hpp"
#include "ohit/rng.hpp"

using namespace ohit;

namespace {

Matrix random_minority(std::uint64_t seed, Index n, Index d) {
    Rng rng(seed);
    Matrix P(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) P(i, j) = rng.normal();
    return P;
}

}  // namespace

TEST_CASE("random_oversample with eta zero is empty") {
    const auto out = random_oversample(random_minority(1, 5, 3), 0, 7);
    CHECK(out.size() == 0);
}

TEST_CASE("random_oversample of a single row copies it") {
    Matrix P(1, 3);
    P << 1.0, 2.0, 3.0;
    const auto out = random_oversample(P, 5, 7);
    REQUIRE(out.size() == 5);
    for (Index r = 0; r < 5; ++r) CHECK(out.samples.row(r) == P.row(0));
}

TEST_CASE("random_oversample rows are exact copies of input rows") {
    const Matrix P = random_minority(3, 8, 4);
    const auto out = random_oversample(P, 40, 11);
    for (Index r = 0; r < out.size(); ++r) {
        bool found = false;
        for (Index i = 0; i < P.rows(); ++i)
            if (out.samples.row(r) == P.row(i)) { found = true; break; }
        CHECK(found);
    }
}

TEST_CASE("random_oversample is reproducible under a fixed seed") {
    const Matrix P = random_minority(5, 10, 3);
    CHECK(random_oversample(P, 25, 42).samples ==
          random_oversample(P, 25, 42).samples);
}

TEST_CASE("smote on two identical points reproduces them") {
    Matrix P(2, 3);
    P.row(0) << 1.5, -2.0, 0.25;
    P.row(1) = P.row(0);
    const auto out = smote(P, 6, 5, 3);
    for (Index r = 0; r < out.size(); ++r) CHECK(out.samples.row(r) == P.row(0));
}

TEST_CASE("smote synthetics sit exactly on the logged segment") {
    const Matrix P = random_minority(9, 12, 6);
    std::vector<SmoteDraw> log;
    const auto out = smote(P, 30, 5, 17, &log);
    REQUIRE(log.size() == 30);
    for (std::size_t r = 0; r < log.size(); ++r) {
        const auto& d = log[r];
        CHECK(d.u >= 0.0);
        CHECK(d.u < 1.0);
        const Matrix expected =
            P.row(d.base) + d.u * (P.row(d.neighbor) - P.row(d.base));
        CHECK(out.samples.row(static_cast<Index>(r)) == expected);
    }
}

TEST_CASE("smote bases cycle through rows in index order") {
    const Matrix P = random_minority(4, 5, 2);
    std::vector<SmoteDraw> log;
    smote(P, 12, 2, 1, &log);
    for (std::size_t r = 0; r < log.size(); ++r)
        CHECK(log[r].base == static_cast<int>(r % 5));
}

TEST_CASE("smote clamps k to n-1") {
    const Matrix P = random_minority(6, 3, 2);
    std::vector<SmoteDraw> log;
    smote(P, 9, 10, 2, &log);
    for (const auto& d : log) {
        CHECK(d.neighbor != d.base);
        CHECK(d.neighbor >= 0);
        CHECK(d.neighbor < 3);
    }
}

TEST_CASE("smote on a single row falls back to random oversampling") {
    Matrix P(1, 2);
    P << 3.0, 4.0;
    std::string warning;
    const auto out = smote(P, 4, 5, 13, nullptr, &warning);
    CHECK_FALSE(warning.empty());
    CHECK(out.samples == random_oversample(P, 4, 13).samples);
}

TEST_CASE("smote is reproducible under a fixed seed") {
    const Matrix P = random_minority(8, 15, 4);
    CHECK(smote(P, 50, 5, 21).samples == smote(P, 50, 5, 21).samples);
}

#include <catch2/catch_amalgamated.hpp>

#include "walshlink/hadamard.hpp"

using namespace walshlink::codebook;

namespace {

// integer Gram matrix, independent of chip_correlation
std::vector<std::vector<long long>> gram(const HadamardMatrix& h) {
    const size_t n = h.rows.size();
    std::vector<std::vector<long long>> g(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t c = 0; c < n; ++c)
                g[i][j] += static_cast<long long>(h.rows[i][c]) * h.rows[j][c];
    return g;
}

}  // namespace

TEST_CASE("rows are mutually orthogonal with norm N at every supported order", "[hadamard]") {
    for (int order : {1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 64}) {
        HadamardMatrix h = build_hadamard(order);
        REQUIRE(h.order == order);
        REQUIRE(h.rows.size() == static_cast<size_t>(order));
        for (const ChipSequence& row : h.rows) {
            REQUIRE(row.size() == static_cast<size_t>(order));
            for (int v : row) REQUIRE((v == 1 || v == -1));
        }
        const auto g = gram(h);
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j)
                REQUIRE(g[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                        (i == j ? order : 0));
    }
}

TEST_CASE("matrices come out in standard form", "[hadamard]") {
    for (int order : {1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 64}) {
        HadamardMatrix h = build_hadamard(order);
        for (int v : h.rows[0]) REQUIRE(v == 1);
        for (const ChipSequence& row : h.rows) REQUIRE(row[0] == 1);
    }
}

TEST_CASE("small Sylvester matrices match their closed forms", "[hadamard]") {
    HadamardMatrix h1 = sylvester(0);
    REQUIRE(h1.rows == std::vector<ChipSequence>{{1}});

    HadamardMatrix h2 = sylvester(1);
    REQUIRE(h2.rows == std::vector<ChipSequence>{{1, 1}, {1, -1}});

    HadamardMatrix h4 = sylvester(2);
    REQUIRE(h4.rows == std::vector<ChipSequence>{
                           {1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}});
}

TEST_CASE("doubling stacks the block pattern", "[hadamard]") {
    HadamardMatrix h12 = paley(11);
    HadamardMatrix h24 = double_order(h12);
    REQUIRE(h24.order == 24);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            const int v = h12.rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
            REQUIRE(h24.rows[static_cast<size_t>(i)][static_cast<size_t>(j)] == v);
            REQUIRE(h24.rows[static_cast<size_t>(i)][static_cast<size_t>(j + 12)] == v);
            REQUIRE(h24.rows[static_cast<size_t>(i + 12)][static_cast<size_t>(j)] == v);
            REQUIRE(h24.rows[static_cast<size_t>(i + 12)][static_cast<size_t>(j + 12)] == -v);
        }
}

TEST_CASE("paley rejects non-prime and 1 mod 4 arguments", "[hadamard]") {
    REQUIRE_THROWS_AS(paley(8), std::invalid_argument);
    REQUIRE_THROWS_AS(paley(9), std::invalid_argument);
    REQUIRE_THROWS_AS(paley(13), std::invalid_argument);  // prime but 1 mod 4
    REQUIRE_THROWS_AS(paley(1), std::invalid_argument);
    REQUIRE_NOTHROW(paley(7));
    REQUIRE(paley(7).order == 8);
}

TEST_CASE("construction bounds are enforced", "[hadamard]") {
    REQUIRE_THROWS_AS(sylvester(-1), std::invalid_argument);
    REQUIRE_THROWS_AS(sylvester(11), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hadamard(0), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hadamard(-4), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hadamard(36), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hadamard(128), std::invalid_argument);
    REQUIRE_THROWS_AS(build_hadamard(6), std::invalid_argument);
}

TEST_CASE("chip_correlation requires equal lengths", "[hadamard]") {
    REQUIRE(chip_correlation({1, -1, 1}, {1, 1, 1}) == 1);
    REQUIRE_THROWS_AS(chip_correlation({1, -1}, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("repeated construction is deterministic", "[hadamard]") {
    for (int order : {12, 24, 40}) {
        HadamardMatrix a = build_hadamard(order);
        HadamardMatrix b = build_hadamard(order);
        REQUIRE(a.rows == b.rows);
    }
}

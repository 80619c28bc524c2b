#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "adboin/errors.hpp"
#include "adboin/tables.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace adboin;

TEST_CASE("safety table") {
    DesignParams p;
    const auto rows = safety_table(p, {3, 6, 9, 12, 15});
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].escalate_le == 0);
    CHECK(rows[0].deescalate_ge == 2);
    CHECK(rows[4].escalate_le == 4);
    CHECK(rows[4].deescalate_ge == 7);
    const auto single = safety_table(p, {3});
    REQUIRE(single.size() == 1);
    CHECK(single[0].n == 3);
    CHECK(safety_table(p, {}).empty());
}

TEST_CASE("rds ordering of the published score rows") {
    DesignParams p;
    p.max_n = 18;
    const auto rows = rds_table(p, default_rds_grid(p), p.max_n);
    auto rank_of = [&](int n, int tox, int eff) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const RdsRow& r) {
            return r.n == n && r.tox == tox && r.eff == eff;
        });
        REQUIRE(it != rows.end());
        return it->rank;
    };
    const int ordered[][3] = {{3, 2, 1}, {3, 0, 0}, {12, 1, 4}, {9, 1, 3}, {6, 1, 2},
                              {9, 1, 4}, {3, 0, 1}, {0, 0, 0},  {6, 0, 3}, {3, 0, 2}};
    for (int i = 1; i < 10; ++i) {
        CHECK(rank_of(ordered[i - 1][0], ordered[i - 1][1], ordered[i - 1][2]) <
              rank_of(ordered[i][0], ordered[i][1], ordered[i][2]));
    }
}

TEST_CASE("rds edge cases") {
    DesignParams p;
    const auto one = rds_table(p, {0}, 36);
    REQUIRE(one.size() == 1);
    CHECK(one[0].rank == 1);
    CHECK(rds_table(p, {0, 3, 6}, 3).size() == 1 + 16);
}

TEST_CASE("rds ranks are a permutation sorted by dp") {
    DesignParams p;
    std::mt19937 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> grid{0};
        for (int n = 3; n <= 18; n += 3)
            if (gen() % 2) grid.push_back(n);
        const auto rows = rds_table(p, grid, 36);
        std::vector<int> ranks;
        for (const auto& r : rows) ranks.push_back(r.rank);
        std::vector<int> sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == static_cast<int>(i) + 1);
        // oracle: sort an independent copy by dp
        auto copy = rows;
        std::shuffle(copy.begin(), copy.end(), gen);
        std::stable_sort(copy.begin(), copy.end(),
                         [](const RdsRow& a, const RdsRow& b) { return a.dp < b.dp; });
        for (std::size_t i = 0; i < rows.size(); ++i) CHECK(copy[i].dp == rows[i].dp);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].dp <= rows[i].dp);
    }
}

TEST_CASE("expansion tables reproduce both published blocks") {
    DesignParams p;
    const std::vector<int> grid{3, 6, 9};
    const std::vector<std::array<int, 3>> at20{{3, 0, 1}, {3, 1, 2}, {6, 0, 2}, {6, 1, 3}, {6, 2, 4},
                                               {9, 0, 3}, {9, 1, 4}, {9, 2, 5}, {9, 3, 5}};
    const std::vector<std::array<int, 3>> at25{{3, 0, 1}, {3, 1, 2}, {6, 0, 3}, {6, 1, 3}, {6, 2, 4},
                                               {9, 0, 4}, {9, 1, 5}, {9, 2, 5}, {9, 3, 6}};
    for (const auto& [theta, expect] : {std::pair{0.20, at20}, std::pair{0.25, at25}}) {
        const auto rows = expansion_table(p, theta, grid);
        REQUIRE(rows.size() == expect.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].n == expect[i][0]);
            CHECK(rows[i].tox == expect[i][1]);
            CHECK(rows[i].min_eff == expect[i][2]);
        }
    }
    CHECK(expansion_table(p, 0.999999, grid).empty());
    CHECK_THROWS_AS(expansion_table(p, 1.0, grid), Error);
}

TEST_CASE("expansion rows sit exactly on the qualification edge") {
    DesignParams p;
    for (double theta : {0.15, 0.2, 0.25, 0.3}) {
        p.theta = theta;
        const auto rows = expansion_table(p, theta, {3, 6, 9, 12, 15});
        int last_n = -1, last_min = -1;
        for (const auto& r : rows) {
            CHECK(expansion_qualifies(r.n, r.tox, r.min_eff, p));
            if (r.min_eff > 0) CHECK_FALSE(expansion_qualifies(r.n, r.tox, r.min_eff - 1, p));
            if (r.n == last_n) CHECK(r.min_eff >= last_min);
            last_n = r.n;
            last_min = r.min_eff;
        }
    }
}

TEST_CASE("tables are deterministic") {
    DesignParams p;
    CHECK(rds_csv(rds_table(p, default_rds_grid(p), 36)) ==
          rds_csv(rds_table(p, default_rds_grid(p), 36)));
    CHECK(expansion_csv(expansion_table(p, 0.2, {3, 6, 9})) ==
          expansion_csv(expansion_table(p, 0.2, {3, 6, 9})));
}

TEST_CASE("probability formatting") {
    CHECK(format_probability(0.295) == "0.2950");
    CHECK(format_probability(0.12345) == "0.1235"); // binary value sits above the tie
    CHECK(format_probability(0.00005) == "0.0001");
    CHECK(format_probability(0.0) == "0.0000");
    CHECK(format_probability(0.5) == "0.5000");
    CHECK(format_probability(0.000025 * 2 + 0.00000000001) == "0.0001");
    CHECK(format_probability(0.03125) == "0.0312"); // exact binary tie rounds to even
}

TEST_CASE("csv headers") {
    CHECK(rds_csv({}) == "n,tox,eff,dp,rank\n");
    CHECK(expansion_csv({}) == "n,tox,min_eff\n");
}

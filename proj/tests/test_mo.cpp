#include <doctest.h>

#include <random>

#include "morl/mo.hpp"
#include "support/oracles.hpp"

using namespace morl;

namespace {

SolutionSet random_set(std::size_t n, Rng& rng, double lo = -1, double hi = 1) {
    SolutionSet s;
    for (std::size_t i = 0; i < n; ++i)
        s.push_back({{uniform_real(rng, lo, hi), uniform_real(rng, lo, hi)},
                     static_cast<int>(i)});
    return s;
}

bool same_ids(const SolutionSet& a, const SolutionSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].policy_id != b[i].policy_id) return false;
    return true;
}

// grid-membership CCS oracle: keep a point iff it wins (or ties) at some
// weight of a dense grid
SolutionSet ccs_grid_oracle(const SolutionSet& s, int grid = 10001) {
    const SolutionSet pf = oracles::pareto_bruteforce(s);
    std::vector<bool> keep(pf.size(), false);
    for (const WeightVec& w : even_weights(grid)) {
        double best = -1e300;
        for (const Solution& e : pf) best = std::max(best, utility(e.value, w));
        for (std::size_t i = 0; i < pf.size(); ++i)
            if (utility(pf[i].value, w) >= best - 1e-12) keep[i] = true;
    }
    SolutionSet out;
    for (std::size_t i = 0; i < pf.size(); ++i)
        if (keep[i]) out.push_back(pf[i]);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("mo");

TEST_CASE("utility is the inner product") {
    CHECK(utility({2, 4}, {0.5, 0.5}) == doctest::Approx(3.0));
    CHECK(utility({7, -3}, {1, 0}) == doctest::Approx(7.0));
    // annual-scale arithmetic: 0.9 * -840.93 + 0.1 * 1460
    CHECK(utility({-840.93, 1460}, {0.9, 0.1}) == doctest::Approx(-610.837).epsilon(1e-9));
    CHECK_THROWS_AS(utility({1, 2, 3}, {1, 0}), std::invalid_argument);
}

TEST_CASE("dominance relation") {
    CHECK(dominates({1, 2}, {0, 2}));
    CHECK_FALSE(dominates({1, 0}, {0, 1}));
    CHECK_FALSE(dominates({0, 1}, {1, 0}));
    CHECK_FALSE(dominates({1, 1}, {1, 1}));  // strictness
}

TEST_CASE("pareto_filter basics") {
    SolutionSet s = {{{1, 0}, 0}, {{0, 1}, 1}, {{0.5, 0.5}, 2}};
    CHECK(pareto_filter(s).size() == 3);

    SolutionSet t = {{{1, 1}, 0}, {{0, 0}, 1}};
    const auto ft = pareto_filter(t);
    REQUIRE(ft.size() == 1);
    CHECK(ft[0].policy_id == 0);

    SolutionSet dup = {{{2, 2}, 0}, {{2, 2}, 1}};
    const auto fd = pareto_filter(dup);
    REQUIRE(fd.size() == 1);
    CHECK(fd[0].policy_id == 0);  // equal vectors keep the first
}

TEST_CASE("pareto_filter equals the brute-force oracle on 200 random points") {
    Rng rng(101);
    for (int rep = 0; rep < 5; ++rep) {
        const SolutionSet s = random_set(200, rng);
        CHECK(same_ids(pareto_filter(s), oracles::pareto_bruteforce(s)));
    }
}

TEST_CASE("pareto_filter is idempotent and its output is undominated") {
    Rng rng(102);
    const SolutionSet s = random_set(64, rng);
    const SolutionSet f = pareto_filter(s);
    CHECK(same_ids(pareto_filter(f), f));
    for (const Solution& kept : f)
        for (const Solution& any : s) CHECK_FALSE(dominates(any.value, kept.value));
}

TEST_CASE("ccs_prune removes points under the hull and keeps the rest") {
    SolutionSet below = {{{1, 0}, 0}, {{0, 1}, 1}, {{0.4, 0.4}, 2}};
    const auto pruned = ccs_prune(below);
    REQUIRE(pruned.size() == 2);
    CHECK(pruned[0].policy_id == 0);
    CHECK(pruned[1].policy_id == 1);

    SolutionSet above = {{{1, 0}, 0}, {{0, 1}, 1}, {{0.6, 0.6}, 2}};
    CHECK(ccs_prune(above).size() == 3);

    SolutionSet single = {{{3, 4}, 7}};
    const auto one = ccs_prune(single);
    REQUIRE(one.size() == 1);
    CHECK(one[0].policy_id == 7);
}

TEST_CASE("ccs_prune matches the dense weight-grid oracle") {
    Rng rng(103);
    for (int rep = 0; rep < 10; ++rep) {
        const SolutionSet s = random_set(40, rng);
        CHECK(same_ids(ccs_prune(s), ccs_grid_oracle(s)));
    }
}

TEST_CASE("ccs_prune removals never win at any grid weight") {
    Rng rng(104);
    const SolutionSet s = random_set(60, rng);
    const SolutionSet pf = pareto_filter(s);
    const SolutionSet ccs = ccs_prune(s);
    std::vector<bool> kept_id(1000, false);
    for (const Solution& e : ccs) kept_id[static_cast<std::size_t>(e.policy_id)] = true;
    for (const WeightVec& w : even_weights(10000)) {
        double best = -1e300;
        for (const Solution& e : ccs) best = std::max(best, utility(e.value, w));
        for (const Solution& e : pf)
            if (!kept_id[static_cast<std::size_t>(e.policy_id)])
                CHECK(utility(e.value, w) <= best + 1e-9);
    }
}

TEST_CASE("corner_weights on two-policy sets") {
    SolutionSet s = {{{1, 0}, 0}, {{0, 1}, 1}};
    const auto corners = corner_weights(ccs_prune(s));
    REQUIRE(corners.size() == 3);
    CHECK(corners[0][0] == doctest::Approx(0.0));
    CHECK(corners[1][0] == doctest::Approx(0.5));
    CHECK(corners[2][0] == doctest::Approx(1.0));
    // tie residual at the interior corner
    CHECK(std::abs(utility({1, 0}, corners[1]) - utility({0, 1}, corners[1])) < 1e-9);

    SolutionSet t = {{{2, 0}, 0}, {{0, 1}, 1}};
    const auto ct = corner_weights(ccs_prune(t));
    REQUIRE(ct.size() == 3);
    CHECK(ct[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ct[1][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("corner_weights: single policy yields only the extrema") {
    const auto corners = corner_weights({{{2, 5}, 0}});
    REQUIRE(corners.size() == 2);
    CHECK(corners[0][0] == 0.0);
    CHECK(corners[1][0] == 1.0);
}

TEST_CASE("corner_weights agree with the closed-form tie on random pairs") {
    Rng rng(105);
    for (int rep = 0; rep < 50; ++rep) {
        SolutionSet s = random_set(2, rng);
        const SolutionSet ccs = ccs_prune(s);
        if (ccs.size() < 2) continue;  // one dominates the other
        const ValueVec a = ccs[0].value, b = ccs[1].value;
        const auto corners = corner_weights(ccs);
        for (const WeightVec& w : corners) {
            if (w[0] == 0.0 || w[0] == 1.0) continue;
            const double expect = (b[1] - a[1]) / ((a[0] - b[0]) + (b[1] - a[1]));
            CHECK(w[0] == doctest::Approx(expect).epsilon(1e-9));
            CHECK(std::abs(utility(a, w) - utility(b, w)) < 1e-9);
        }
    }
}

TEST_CASE("even_weights spans the simplex") {
    const auto two = even_weights(2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == WeightVec{0.0, 1.0});
    CHECK(two[1] == WeightVec{1.0, 0.0});

    const auto three = even_weights(3);
    CHECK(three[1][0] == doctest::Approx(0.5));

    const auto hundred = even_weights(100);
    REQUIRE(hundred.size() == 100);
    for (std::size_t i = 1; i < hundred.size(); ++i)
        CHECK(hundred[i][0] - hundred[i - 1][0] == doctest::Approx(1.0 / 99).epsilon(1e-12));
    CHECK_THROWS_AS(even_weights(1), std::invalid_argument);
}

TEST_CASE("positive scaling preserves dominance, filters, and corners") {
    Rng rng(106);
    const SolutionSet s = random_set(30, rng);
    const double c = 3.7;
    SolutionSet scaled = s;
    for (Solution& e : scaled)
        for (double& v : e.value) v *= c;

    CHECK(same_ids(pareto_filter(s), pareto_filter(scaled)));
    CHECK(same_ids(ccs_prune(s), ccs_prune(scaled)));
    const auto ca = corner_weights(ccs_prune(s));
    const auto cb = corner_weights(ccs_prune(scaled));
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i)
        CHECK(ca[i][0] == doctest::Approx(cb[i][0]).epsilon(1e-12));
}

TEST_SUITE_END();

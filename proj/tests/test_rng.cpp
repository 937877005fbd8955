#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "schreier/rng.hpp"

using namespace schreier;

TEST_CASE("labels are deterministic and seed-sensitive") {
    LabelField f(42, 7);
    CHECK(f.raw(3, 0) == f.raw(3, 0));
    CHECK(f.label(3, 0) == f.label(3, 0));
    CHECK(f.raw(3, 0) != f.raw(3, 1));
    CHECK(f.raw(3, 0) != f.raw(4, 0));
    LabelField g(43, 7);
    CHECK(f.raw(3, 0) != g.raw(3, 0));
    LabelField h(42, 8);
    CHECK(f.raw(3, 0) != h.raw(3, 0));
    CHECK(f.label(3, 0) >= 0.0);
    CHECK(f.label(3, 0) < 1.0);
}

TEST_CASE("joint label is permutation invariant") {
    LabelField f(1, 2);
    std::vector<VertexId> a = {5, 1, 9, 3};
    std::vector<VertexId> b = {9, 3, 5, 1};
    CHECK(f.raw_joint(a, 4) == f.raw_joint(b, 4));
    std::vector<VertexId> single = {7};
    CHECK(f.raw_joint(single, 4) == f.raw_joint(single, 4));
    CHECK_THROWS_AS((void)f.raw_joint(std::vector<VertexId>{}, 0), Error);
}

TEST_CASE("joint labels of disjoint sets pass a chi-square independence check") {
    // 8x8 contingency table over 1e5 seeds; df = 63, the 99.9% quantile is
    // ~103.4. The statistic is deterministic for the pinned seed stream.
    int counts[8][8] = {};
    const int N = 100000;
    std::vector<VertexId> s1 = {0, 1, 2}, s2 = {10, 11, 12, 13};
    for (int seed = 0; seed < N; ++seed) {
        LabelField f(std::uint64_t(seed), 99);
        double a = f.joint_label(s1, 3);
        double b = f.joint_label(s2, 3);
        counts[int(a * 8)][int(b * 8)]++;
    }
    double expect = double(N) / 64.0, chi2 = 0;
    for (auto& row : counts)
        for (int c : row) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < 103.4);
}

TEST_CASE("choose is uniform and respects presentation order") {
    LabelField f(5, 5);
    std::vector<VertexId> s = {2, 4, 6};
    std::vector<VertexId> s_rev = {6, 4, 2};
    CHECK(f.choose(s, 9, 1) == 0);
    CHECK(f.choose(s, 9, 2) == f.choose(s_rev, 9, 2));
    CHECK_THROWS_AS((void)f.choose(s, 9, 0), Error);

    const int N = 100000;
    int ones = 0;
    for (int seed = 0; seed < N; ++seed) {
        LabelField g(std::uint64_t(seed), 17);
        ones += g.choose(s, 9, 2);
    }
    double freq = double(ones) / N;
    double sigma3 = 3.0 * 0.5 / std::sqrt(double(N));
    CHECK(std::abs(freq - 0.5) < sigma3);
}

TEST_CASE("salting produces a fresh stream") {
    LabelField f(11, 3);
    LabelField g = f.with_salt(1);
    CHECK(f.raw(0, 0) != g.raw(0, 0));
    CHECK(g.raw(0, 0) == f.with_salt(1).raw(0, 0));
}

TEST_CASE("channel registry has disjoint per-module ranges") {
    auto reg = channels::registry();
    for (std::size_t i = 0; i < reg.size(); ++i) {
        CHECK(reg[i].lo < reg[i].hi);
        for (std::size_t j = i + 1; j < reg.size(); ++j) {
            bool disjoint = reg[i].hi <= reg[j].lo || reg[j].hi <= reg[i].lo;
            CHECK(disjoint);
        }
    }
    // spot checks: every named channel sits inside its module's range
    CHECK(channels::site_colour >= channels::hierarchy_lo);
    CHECK(channels::coarsen_round(63) < channels::hierarchy_hi);
    CHECK(channels::square_anchor >= channels::decorators_lo);
    CHECK(channels::toast_round(2, 255) < channels::decorators_hi);
    CHECK(channels::light_dark >= channels::derived_lo);
    CHECK(channels::line_match < channels::derived_hi);
    CHECK(channels::probe_resample >= channels::verify_lo);
}

// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "schreier/experiments.hpp"

using namespace schreier;

namespace {

void report(int index, const experiments::CriterionResult& r) {
    std::printf("criterion %d: %s — %s — %s\n", index, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(r.pass, r.name, ": ", r.detail);
}

} // namespace

TEST_CASE("criterion 1: square-lattice schreier decorations") {
    report(1, experiments::criterion_square());
}

TEST_CASE("criterion 2: triangular and kagome schreier decorations") {
    report(2, experiments::criterion_tri_kagome());
}

TEST_CASE("criterion 3: (3,4,6,4) schreier decorations and locality") {
    report(3, experiments::criterion_t3464());
}

TEST_CASE("criterion 4: Z^3 schreier decorations over the toast hierarchy") {
    report(4, experiments::criterion_grid3());
}

TEST_CASE("criterion 5: planar balanced orientations") {
    report(5, experiments::criterion_balanced());
}

TEST_CASE("criterion 6: hierarchy engine audit") {
    report(6, experiments::criterion_hierarchy());
}

TEST_CASE("criterion 7: balanced-orientation oracle for products") {
    report(7, experiments::criterion_oracle_prop23());
}

TEST_CASE("criterion 8: product decorations") {
    report(8, experiments::criterion_product());
}

TEST_CASE("criterion 9: derived structures") {
    report(9, experiments::criterion_derived());
}

TEST_CASE("criterion 10: determinism, round trip, checker perturbations") {
    report(10, experiments::criterion_determinism());
}

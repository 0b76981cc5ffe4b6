#include <doctest.h>

#include "mfilt/sawyer_testing.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace mfilt;
using namespace mfilt::testutil;

TEST_CASE("exponent pair derived quantities") {
    ExponentPair ep(1.5, 2.0);
    CHECK(ep.pprime() == doctest::Approx(3.0));
    CHECK(ep.qprime() == doctest::Approx(2.0));
    CHECK(ep.r() == doctest::Approx(3.0));
    CHECK(ep.theta() == doctest::Approx(1.0 / 1.5 + 0.5));
    CHECK(ep.theta() >= 1.0);
    CHECK_THROWS(ExponentPair(1.0, 2.0));
    CHECK_THROWS(ExponentPair(3.0, 2.0));
}

TEST_CASE("testing constant on the canonical instance") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    TestingResult res = testing_constant(space, alpha, ExponentPair(2.0, 2.0));
    CHECK(res.C2 == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(res.witness.level == 0);
    CHECK(res.witness.atoms == std::vector<int>{0});
}

TEST_CASE("testing constant is zero for vanishing coefficients") {
    FilteredSpace space = dyad4();
    CoefficientFamily zero;
    zero.per_atom = {{}, {}, {}};
    TestingResult res = testing_constant(space, zero, ExponentPair(2.0, 2.0));
    CHECK(res.C2 == 0.0);
    CHECK(res.C2_q == 0.0);
    CHECK(res.C2_pprime == 0.0);
}

TEST_CASE("single trivial level with unit mass and unit coefficient") {
    FilteredSpace space({0.5, 0.5}, {{0, 0}});
    CoefficientFamily alpha;
    alpha.per_atom = {{1.0}};
    TestingResult res = testing_constant(space, alpha, ExponentPair(2.0, 2.0));
    CHECK(res.C2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fast path equals the exhaustive oracle") {
    std::mt19937_64 rng(61);
    const std::vector<ExponentPair> exps{{1.5, 2.0}, {2.0, 2.0}, {2.0, 3.0}, {3.0, 3.0}};
    for (int rep = 0; rep < 60; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        for (const auto& ep : exps) {
            TestingResult fast = testing_constant(space, alpha, ep);
            TestingResult oracle = brute_force_testing(space, alpha, ep);
            CHECK(rel_close(fast.C2, oracle.C2, 1e-12));
            CHECK(rel_close(fast.C2_q, oracle.C2_q, 1e-12));
            CHECK(rel_close(fast.C2_pprime, oracle.C2_pprime, 1e-12));
        }
    }
}

TEST_CASE("brute force rejects oversized levels") {
    FilteredSpace space = generate_dyadic(5, 2, WeightMode::Unit, 1);  // 32 atoms at the bottom
    CoefficientFamily alpha = random_coefficients(space, 1);
    CHECK_THROWS(brute_force_testing(space, alpha, ExponentPair(2.0, 2.0)));
}

TEST_CASE("footnote max identity on the canonical instance") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    MaxIdentityCheck chk =
        footnote_max_identity_check(space, alpha, ExponentPair(2.0, 2.0), 0, {0});
    CHECK(chk.lhs == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(chk.rhs == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
    CHECK(chk.pass);
}

TEST_CASE("footnote max identity for constant tails") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha;
    alpha.per_atom = {{3.0}, {}, {}};  // S_0 == 3 everywhere
    MaxIdentityCheck chk =
        footnote_max_identity_check(space, alpha, ExponentPair(1.5, 2.0), 0, {0});
    CHECK(chk.lhs == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(chk.rhs == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(chk.pass);
}

TEST_CASE("footnote max identity on random instances and sets") {
    std::mt19937_64 rng(67);
    const std::vector<ExponentPair> exps{{1.5, 2.0}, {2.0, 2.0}, {2.0, 3.0}, {3.0, 3.0}};
    for (int rep = 0; rep < 200; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        int level = static_cast<int>(rng() % space.n_levels());
        std::vector<int> atoms;
        for (int a = 0; a < space.n_atoms(level); ++a)
            if (rng() & 1) atoms.push_back(a);
        if (atoms.empty()) atoms.push_back(0);
        for (const auto& ep : exps) {
            MaxIdentityCheck chk = footnote_max_identity_check(space, alpha, ep, level, atoms);
            CHECK(chk.pass);
            CHECK(rel_close(chk.lhs, chk.rhs, 1e-10));
        }
    }
}

TEST_CASE("combined constant equals the max of the split constants") {
    std::mt19937_64 rng(71);
    const std::vector<ExponentPair> exps{{1.5, 2.0}, {2.0, 3.0}, {3.0, 3.0}};
    for (int rep = 0; rep < 100; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        for (const auto& ep : exps) {
            TestingResult res = testing_constant(space, alpha, ep);
            CHECK(rel_close(res.C2, std::max(res.C2_q, res.C2_pprime), 1e-10));
        }
    }
}

TEST_CASE("scaling laws in alpha and in the measure") {
    std::mt19937_64 rng(73);
    for (int rep = 0; rep < 50; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        ExponentPair ep(2.0, 3.0);
        TestingResult base = testing_constant(space, alpha, ep);

        const double c = 3.0;
        CoefficientFamily scaled = alpha;
        for (auto& lvl : scaled.per_atom)
            for (auto& v : lvl) v *= c;
        TestingResult alpha_scaled = testing_constant(space, scaled, ep);
        CHECK(rel_close(alpha_scaled.C2, c * base.C2, 1e-12));

        std::vector<double> weights = space.leaf_weights();
        for (auto& w : weights) w *= c;
        FilteredSpace mu_scaled(std::move(weights), space.partitions());
        TestingResult measure_scaled = testing_constant(mu_scaled, alpha, ep);
        CHECK(rel_close(measure_scaled.C2,
                        std::pow(c, 1.0 / ep.q - 1.0 / ep.p) * base.C2, 1e-10));
    }
}

#include <doctest.h>

#include "mfilt/conditional.hpp"
#include "mfilt/norm_estimator.hpp"
#include "mfilt/sawyer_testing.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace mfilt;
using namespace mfilt::testutil;

namespace {

FilteredSpace trivial_unit_mass() {
    // one level, one atom, total mass 1
    return FilteredSpace({0.25, 0.25, 0.5}, {{0, 0, 0}});
}

}  // namespace

TEST_CASE("power step reaches the constant fixed point immediately") {
    FilteredSpace space = trivial_unit_mass();
    CoefficientFamily alpha;
    alpha.per_atom = {{1.0}};
    LeafFunction f(space.n_leaves(), 1.0);
    auto next = power_step(space, alpha, f, 2.0, 2.0);
    REQUIRE(next);
    CHECK(objective(space, alpha, *next, 2.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    auto again = power_step(space, alpha, *next, 2.0, 2.0);
    REQUIRE(again);
    for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
        CHECK(rel_close((*again)[leaf], (*next)[leaf], 1e-12));
}

TEST_CASE("power step flags a vanishing operator") {
    FilteredSpace space = dyad4();
    CoefficientFamily zero;
    zero.per_atom = {{}, {}, {}};
    CHECK_FALSE(power_step(space, zero, LeafFunction(4, 1.0), 2.0, 2.0));
}

TEST_CASE("objective is nondecreasing along power iterates") {
    std::mt19937_64 rng(103);
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    for (int rep = 0; rep < 5; ++rep) {
        LeafFunction f = random_positive(space.n_leaves(), rng);
        double prev = objective(space, alpha, f, 2.0, 2.0);
        for (int it = 0; it < 50; ++it) {
            auto next = power_step(space, alpha, f, 2.0, 2.0);
            REQUIRE(next);
            f = std::move(*next);
            double obj = objective(space, alpha, f, 2.0, 2.0);
            CHECK(obj >= prev * (1.0 - 1e-12));
            prev = obj;
        }
    }
}

TEST_CASE("norm lower bound on closed-form instances") {
    {
        FilteredSpace space = trivial_unit_mass();
        CoefficientFamily alpha;
        alpha.per_atom = {{1.0}};
        // T f = int f; Hoelder gives norm 1 with equality at constants
        for (auto [p, q] : {std::pair{2.0, 2.0}, {1.5, 2.0}, {2.0, 3.0}}) {
            NormEstimate est = norm_lower_bound(space, alpha, p, q, 4, 200, 1e-12, 1);
            CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    {
        // single finest level: T = c * identity, p = q gives norm c
        FilteredSpace space({1.0, 1.0, 1.0}, {{0, 1, 2}});
        CoefficientFamily alpha;
        alpha.per_atom = {{2.5, 2.5, 2.5}};
        NormEstimate est = norm_lower_bound(space, alpha, 2.0, 2.0, 4, 200, 1e-12, 1);
        CHECK(est.value == doctest::Approx(2.5).epsilon(1e-9));
    }
}

TEST_CASE("estimate invariants: witness consistency and normalization") {
    std::mt19937_64 rng(107);
    for (int rep = 0; rep < 30; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        NormEstimate est = norm_lower_bound(space, alpha, 2.0, 3.0, 4, 200, 1e-12, rng());
        if (est.value == 0.0) continue;
        CHECK(rel_close(objective(space, alpha, est.witness, 2.0, 3.0), est.value, 1e-12));
        CHECK(rel_close(lp_norm(space, est.witness, 2.0), 1.0, 1e-12));
        for (double v : est.witness) CHECK(v >= 0.0);
        // homogeneity of the objective
        LeafFunction scaled = est.witness;
        for (auto& v : scaled) v *= 17.0;
        CHECK(rel_close(objective(space, alpha, scaled, 2.0, 3.0), est.value, 1e-12));
    }
}

TEST_CASE("canonical instance dominates the q-part testing constant") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    NormEstimate est = norm_lower_bound(space, alpha, 2.0, 2.0, 8, 500, 1e-12, 1);
    CHECK(est.value >= std::sqrt(2.5) * (1.0 - 1e-12));
}

TEST_CASE("indicator starts dominate both split testing constants") {
    std::mt19937_64 rng(109);
    const std::vector<ExponentPair> exps{{1.5, 2.0}, {2.0, 2.0}, {2.0, 3.0}};
    for (int rep = 0; rep < 40; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        const auto& ep = exps[rep % exps.size()];
        TestingResult testing = testing_constant(space, alpha, ep);
        double primal = norm_lower_bound(space, alpha, ep.p, ep.q, 2, 100, 1e-12, rng()).value;
        double adjoint =
            norm_lower_bound(space, alpha, ep.qprime(), ep.pprime(), 2, 100, 1e-12, rng()).value;
        double c1 = std::max(primal, adjoint);
        CHECK(c1 >= std::max(testing.C2_q, testing.C2_pprime) - 1e-10 * testing.C2);
    }
}

TEST_CASE("exhaustive oracle on tiny instances") {
    {
        FilteredSpace space({1.0, 1.0}, {{0, 0}});
        CoefficientFamily alpha;
        alpha.per_atom = {{1.0}};
        // T f = (f1 + f2)/2 constant; L2 norm ratio is maximized at constants
        double oracle = exhaustive_norm(space, alpha, 2.0, 2.0, 64);
        CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));
    }
    {
        FilteredSpace space = dyad4();
        CoefficientFamily zero;
        zero.per_atom = {{}, {}, {}};
        CHECK(exhaustive_norm(space, zero, 2.0, 2.0, 8) == 0.0);
    }
    CHECK_THROWS(exhaustive_norm(generate_random_tree(3, 8, WeightMode::Unit, 1),
                                 CoefficientFamily{{{}, {}, {}}}, 2.0, 2.0, 8));
}

TEST_CASE("multistart matches the exhaustive oracle on random 4-leaf instances") {
    std::mt19937_64 rng(113);
    for (int rep = 0; rep < 20; ++rep) {
        FilteredSpace space = generate_random_tree(3, 4, WeightMode::LogUniform, rng());
        CoefficientFamily alpha = random_coefficients(space, rng());
        double multistart = norm_lower_bound(space, alpha, 2.0, 2.0, 8, 500, 1e-13, rng()).value;
        double oracle = exhaustive_norm(space, alpha, 2.0, 2.0, 24);
        CHECK(multistart >= oracle - 1e-6 * std::max(1.0, oracle));
        CHECK(oracle >= multistart - 1e-6 * std::max(1.0, multistart));
    }
}

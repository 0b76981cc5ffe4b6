#include <doctest.h>

#include "mfilt/conditional.hpp"
#include "mfilt/positive_operator.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <filesystem>

using namespace mfilt;
using namespace mfilt::testutil;

TEST_CASE("apply on the canonical instance") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    LeafFunction f{4.0, 2.0, 1.0, 1.0};
    CHECK(apply(space, alpha, f) == LeafFunction{5.0, 5.0, 2.0, 2.0});

    CoefficientFamily zero;
    zero.per_atom = {{}, {}, {}};
    CHECK(apply(space, zero, f) == LeafFunction{0.0, 0.0, 0.0, 0.0});

    // alpha supported on the finest level acts as c * identity there
    CoefficientFamily finest;
    finest.per_atom = {{}, {}, {3.0, 3.0, 3.0, 3.0}};
    CHECK(apply(space, finest, f) == LeafFunction{12.0, 6.0, 3.0, 3.0});
}

TEST_CASE("bilinear on the canonical instance") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    LeafFunction f{4.0, 2.0, 1.0, 1.0};
    LeafFunction one(4, 1.0);
    CHECK(bilinear(space, alpha, f, one) == 14.0);
    CHECK(bilinear(space, alpha, LeafFunction(4, 0.0), one) == 0.0);
}

TEST_CASE("bilinear is symmetric and matches both dual pairings") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 100; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        LeafFunction f = random_positive(space.n_leaves(), rng);
        LeafFunction g = random_positive(space.n_leaves(), rng);
        double b = bilinear(space, alpha, f, g);
        CHECK(rel_close(b, bilinear(space, alpha, g, f), 1e-12));
        CHECK(rel_close(b, inner(space, apply(space, alpha, f), g), 1e-10));
        CHECK(rel_close(b, inner(space, f, apply(space, alpha, g)), 1e-10));
    }
}

TEST_CASE("tail_sum on the canonical instance") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    CHECK(tail_sum(space, alpha, 0) == LeafFunction{2.0, 2.0, 1.0, 1.0});
    CHECK(tail_sum(space, alpha, 1) == LeafFunction{1.0, 1.0, 0.0, 0.0});
    CHECK(tail_sum(space, alpha, 2) == LeafFunction{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("positivity and monotonicity") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 100; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        LeafFunction f = random_nonnegative(space.n_leaves(), rng);
        LeafFunction h = f;
        for (auto& v : h) v += 0.5;
        LeafFunction tf = apply(space, alpha, f);
        LeafFunction th = apply(space, alpha, h);
        for (std::size_t leaf = 0; leaf < tf.size(); ++leaf) {
            CHECK(tf[leaf] >= 0.0);
            CHECK(tf[leaf] <= th[leaf] * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("indicators of level sets are fixed below the stopping level") {
    // E_j 1_E = 1_E for j >= i when E is a union of level-i atoms, so
    // T 1_E >= 1_E * S_i pointwise.
    std::mt19937_64 rng(53);
    for (int rep = 0; rep < 100; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        const int L = static_cast<int>(space.n_levels());
        int i = static_cast<int>(rng() % static_cast<std::uint64_t>(L));
        LeafFunction ind(space.n_leaves(), 0.0);
        for (int a = 0; a < space.n_atoms(i); ++a)
            if (rng() & 1)
                for (int leaf : space.atom_leaves(i, a)) ind[static_cast<std::size_t>(leaf)] = 1.0;
        LeafFunction t = apply(space, alpha, ind);
        LeafFunction s = tail_sum(space, alpha, i);
        for (std::size_t leaf = 0; leaf < t.size(); ++leaf)
            if (ind[leaf] == 1.0) CHECK(t[leaf] >= s[leaf] * (1.0 - 1e-12));
    }
}

TEST_CASE("apply is linear") {
    std::mt19937_64 rng(59);
    for (int rep = 0; rep < 50; ++rep) {
        FilteredSpace space = random_space(rng);
        CoefficientFamily alpha = random_coefficients(space, rng());
        LeafFunction f = random_positive(space.n_leaves(), rng);
        LeafFunction h = random_positive(space.n_leaves(), rng);
        double a = 2.5, b = -0.75;
        LeafFunction combo(f.size());
        for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
            combo[leaf] = a * f[leaf] + b * h[leaf];
        LeafFunction lhs = apply(space, alpha, combo);
        LeafFunction tf = apply(space, alpha, f);
        LeafFunction th = apply(space, alpha, h);
        for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
            CHECK(rel_close(lhs[leaf], a * tf[leaf] + b * th[leaf], 1e-12));
    }
}

TEST_CASE("coefficient files round-trip and reject bad data") {
    FilteredSpace space = dyad4();
    CoefficientFamily alpha = dyad4_alpha();
    auto path = (std::filesystem::temp_directory_path() / "mfilt_alpha_rt.json").string();
    save_coefficients(alpha, path);
    CoefficientFamily loaded = load_coefficients(path, space);
    CHECK(loaded.per_atom == alpha.per_atom);

    CoefficientFamily bad;
    bad.per_atom = {{-1.0}, {}, {}};
    CHECK_FALSE(validate(space, bad).empty());
    std::remove(path.c_str());
}

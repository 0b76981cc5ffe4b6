#pragma once

#include "mfilt/filtered_space.hpp"
#include "mfilt/positive_operator.hpp"
#include "mfilt/sawyer_testing.hpp"

#include <string>
#include <vector>

namespace mfilt {

/// A principal set P: a union of level-kappa1 atoms on which the conditional
/// expectation of the data function lies in (2^{kappa2-1}, 2^{kappa2}],
/// together with its stopping time and child principal sets.
struct PrincipalSet {
    std::vector<int> leaves;  // sorted leaf indices of P
    int kappa1 = 0;
    int kappa2 = 0;
    std::vector<int> tau;  // stopping level per leaf of `leaves`; n_levels = never stops
    std::vector<PrincipalSet> children;

    double measure(const FilteredSpace& space) const { return space.measure(leaves); }
    double children_measure(const FilteredSpace& space) const;
};

/// Stopping-time forest over the support of E_{i0} f. Roots are the dyadic
/// slices of E_{i0} f; generation n+1 sets are children of generation n sets.
struct PrincipalTree {
    int i0 = 0;
    std::vector<PrincipalSet> roots;

    /// All sets, roots first, then generation by generation.
    std::vector<const PrincipalSet*> all_sets() const;
    std::size_t size() const { return all_sets().size(); }
};

/// The unique integer k with 2^{k-1} < v <= 2^k, for v > 0. Exact on powers
/// of two via exponent extraction.
int dyadic_slice_index(double v);

/// First level j in [kappa1, L-1] with E_j f > 2^{kappa2+1}, per leaf of P;
/// L where no level triggers. Leaves outside P get -1.
std::vector<int> stopping_time(const FilteredSpace& space, const LeafFunction& f,
                               const std::vector<int>& p_leaves, int kappa1, int kappa2);

/// Builds the full forest starting at level i0. Requires f >= 0.
PrincipalTree build_principal_tree(const FilteredSpace& space, const LeafFunction& f, int i0);

struct PrincipalReport {
    bool iv_ok = true;       // E_j f <= 2^{kappa2+1} on P for kappa1 <= j < tau
    bool v_ok = true;        // mu(union of children) <= mu(P)/2
    bool weak11_ok = true;   // mu(union of children) <= 2^{-kappa2-1} int_P f dmu
    double iv_worst = 0.0;   // max over nodes of E_j f / 2^{kappa2+1}
    double v_worst = 0.0;    // max over nodes of mu(children) / (mu(P)/2)
    std::vector<std::string> violations;
};

PrincipalReport verify_properties(const FilteredSpace& space, const LeafFunction& f,
                                  const PrincipalTree& tree);

/// sum over P of mu(P) * 2^{p (kappa2(P) - 1)}.
double carleson_sum(const FilteredSpace& space, const PrincipalTree& tree, double p);

struct Decomposition {
    double lhs = 0.0;      // sum_{i >= i0} int alpha_i (E_i f)(E_i g) over supp E_{i0} f
    double rhs = 0.0;      // principal-set re-summation of the same quantity
    double split_F = 0.0;  // portion on F_i = {(E_i g)^{q'} <= (E_i f)^p}
    double split_G = 0.0;  // portion on the complement
    std::vector<double> per_set;  // rhs contribution per principal set (all_sets order)
};

/// Re-sums the bilinear form over the principal forest of f and checks the
/// exact tiling: for each level i, the slabs P intersect {kappa1 <= i < tau}
/// partition the support of E_{i0} f.
Decomposition decompose_bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                                 const LeafFunction& f, const LeafFunction& g, int i0,
                                 const ExponentPair& ep);

/// JSON export of the forest for golden-file tests.
std::string tree_to_json(const PrincipalTree& tree);

}  // namespace mfilt

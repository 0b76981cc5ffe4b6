#pragma once

#include "mfilt/filtered_space.hpp"

namespace mfilt {

/// A per-level sequence of F_i-measurable functions, candidate martingale.
struct MartingaleSequence {
    std::vector<LeafFunction> levels;  // levels[i] constant on level-i atoms
};

/// Conditional expectation with respect to F_i: the mu-weighted average of f
/// over each level-i atom, returned at leaf resolution.
LeafFunction cond_expect(const FilteredSpace& space, const LeafFunction& f, int level);

/// Pointwise max of |E_i f| over levels in [i_lo, i_hi].
LeafFunction doob_maximal(const FilteredSpace& space, const LeafFunction& f, int i_lo, int i_hi);

LeafFunction doob_maximal(const FilteredSpace& space, const LeafFunction& f);

/// True iff seq[i] == E_i seq[j] for all i < j, within rel_tol (absolute
/// floor 1e-12 near zero).
bool verify_martingale(const FilteredSpace& space, const MartingaleSequence& seq,
                       double rel_tol = 1e-9);

/// L^p(mu) norm at leaf resolution.
double lp_norm(const FilteredSpace& space, const LeafFunction& f, double p);

/// Integral of f over the whole space.
double integral(const FilteredSpace& space, const LeafFunction& f);

/// mu-weighted inner product.
double inner(const FilteredSpace& space, const LeafFunction& f, const LeafFunction& g);

}  // namespace mfilt

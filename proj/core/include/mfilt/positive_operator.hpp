#pragma once

#include "mfilt/filtered_space.hpp"

#include <cstdint>
#include <string>

namespace mfilt {

/// Nonnegative bounded F_i-measurable coefficients, one value per atom of
/// each level. An empty per-level vector means the coefficient vanishes on
/// that level (sparse instances).
struct CoefficientFamily {
    std::vector<std::vector<double>> per_atom;  // indexed [level][atom]

    double at(int level, int atom) const {
        const auto& lvl = per_atom[static_cast<std::size_t>(level)];
        return lvl.empty() ? 0.0 : lvl[static_cast<std::size_t>(atom)];
    }
};

std::vector<std::string> validate(const FilteredSpace& space, const CoefficientFamily& alpha);

/// Coefficient of level i expanded to leaf resolution.
LeafFunction alpha_on_leaves(const FilteredSpace& space, const CoefficientFamily& alpha,
                             int level);

/// T f = sum over levels in [i_lo, i_hi] of alpha_i * E_i f, pointwise.
LeafFunction apply(const FilteredSpace& space, const CoefficientFamily& alpha,
                   const LeafFunction& f, int i_lo, int i_hi);

LeafFunction apply(const FilteredSpace& space, const CoefficientFamily& alpha,
                   const LeafFunction& f);

/// Integral of the bilinear form: sum_i int alpha_i (E_i f)(E_i g) dmu over
/// levels in [i_lo, i_hi].
double bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                const LeafFunction& f, const LeafFunction& g, int i_lo, int i_hi);

double bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                const LeafFunction& f, const LeafFunction& g);

/// S_i = sum_{j >= i} alpha_j at leaf resolution.
LeafFunction tail_sum(const FilteredSpace& space, const CoefficientFamily& alpha, int i);

/// Random nonnegative coefficients with some identically-zero levels and
/// some zero atoms; deterministic per seed.
CoefficientFamily random_coefficients(const FilteredSpace& space, std::uint64_t seed);

CoefficientFamily load_coefficients(const std::string& path, const FilteredSpace& space);
void save_coefficients(const CoefficientFamily& alpha, const std::string& path);

}  // namespace mfilt

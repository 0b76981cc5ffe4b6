#pragma once

#include "mfilt/filtered_space.hpp"
#include "mfilt/positive_operator.hpp"

#include <cstdint>
#include <optional>

namespace mfilt {

/// Best found lower bound on the L^p -> L^q operator norm of T.
struct NormEstimate {
    double value = 0.0;
    LeafFunction witness;  // nonnegative, ||witness||_p == 1
    int iterations = 0;    // iterations spent on the best restart
    int restarts = 0;
    bool converged = false;
};

/// ||T f||_q / ||f||_p; 0 when f == 0.
double objective(const FilteredSpace& space, const CoefficientFamily& alpha,
                 const LeafFunction& f, double p, double q);

/// One step of the nonlinear power map
///   f <- normalize_p( (T (Tf)^{q-1})^{1/(p-1)} ),
/// which uses the self-adjointness of T. Returns nullopt when T f == 0.
std::optional<LeafFunction> power_step(const FilteredSpace& space, const CoefficientFamily& alpha,
                                       const LeafFunction& f, double p, double q);

/// Multistart power iteration. The starting set contains `restarts` random
/// nonnegative vectors, every single-atom indicator at every level, and the
/// constant function, so the result always dominates the q-part testing
/// constant. Deterministic per seed.
NormEstimate norm_lower_bound(const FilteredSpace& space, const CoefficientFamily& alpha,
                              double p, double q, int restarts = 8, int iters = 500,
                              double tol = 1e-12, std::uint64_t seed = 1);

/// Grid-search oracle over nonnegative p-normalized directions on a simplex
/// grid, polished with power iteration from the best grid point. A lower
/// bound with a grid-gap caveat; requires n_leaves <= 5.
double exhaustive_norm(const FilteredSpace& space, const CoefficientFamily& alpha, double p,
                       double q, int resolution);

}  // namespace mfilt

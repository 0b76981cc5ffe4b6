#pragma once

#include "mfilt/filtered_space.hpp"
#include "mfilt/positive_operator.hpp"

#include <algorithm>

namespace mfilt {

/// Exponent pair 1 < p <= q < inf with its derived quantities.
struct ExponentPair {
    double p;
    double q;

    ExponentPair(double p_, double q_);

    double pprime() const { return p / (p - 1.0); }
    double qprime() const { return q / (q - 1.0); }
    double r() const { return std::max(q, pprime()); }
    double theta() const { return 1.0 / p + 1.0 / qprime(); }
};

/// Set attaining a testing supremum.
struct TestingWitness {
    int level = -1;
    std::vector<int> atoms;
    double value = 0.0;
};

/// Sawyer testing constants: the combined r-exponent constant and the two
/// split constants it is the maximum of.
struct TestingResult {
    double C2 = 0.0;         // mu(E)^{1/q-1/p-1/r} (int_E S_i^r)^{1/r}
    double C2_q = 0.0;       // (int_E S_i^q)^{1/q} / mu(E)^{1/p}
    double C2_pprime = 0.0;  // (int_E S_i^{p'})^{1/p'} / mu(E)^{1/q'}
    TestingWitness witness;          // for C2
    TestingWitness witness_q;        // for C2_q
    TestingWitness witness_pprime;   // for C2_pprime
};

/// Fast path: the supremum over E restricted to single atoms per level.
///
/// Single atoms suffice: each constant, raised to its outer exponent, has the
/// form (sum_{a in E} w_a) / (sum_{a in E} m_a)^t with t >= 1, where w_a is
/// the integral of the relevant power of S_i over atom a and m_a = mu(a).
/// Some atom a* in E has density w_{a*}/m_{a*} >= W/M (W, M the totals over
/// E), and m_{a*}^{1-t} >= M^{1-t} because m_{a*} <= M and 1-t <= 0, so
/// w_{a*}/m_{a*}^t >= W/M^t. The exponents involved are t = 1 + r(1/p - 1/q),
/// q/p and p'/q', all >= 1 when 1 < p <= q.
TestingResult testing_constant(const FilteredSpace& space, const CoefficientFamily& alpha,
                               const ExponentPair& ep);

/// Oracle: exhaustive supremum over all nonempty unions of level-i atoms.
/// Throws if any level has more than 20 atoms.
TestingResult brute_force_testing(const FilteredSpace& space, const CoefficientFamily& alpha,
                                  const ExponentPair& ep);

struct MaxIdentityCheck {
    double lhs = 0.0;  // max of the normalized q- and p'-power means of S_i
    double rhs = 0.0;  // the normalized r-power mean of S_i
    bool pass = false;
};

/// Checks, on E (a union of level-i atoms with mu(E) > 0), that the max of
/// the two normalized testing forms equals the r-form, and that the power
/// means of S_i are nondecreasing from exponent min(q, p') to r.
MaxIdentityCheck footnote_max_identity_check(const FilteredSpace& space,
                                             const CoefficientFamily& alpha,
                                             const ExponentPair& ep, int level,
                                             const std::vector<int>& atom_ids);

}  // namespace mfilt

#include "mfilt/sawyer_testing.hpp"

#include <cmath>
#include <stdexcept>

namespace mfilt {

ExponentPair::ExponentPair(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 1.0) || !(q >= p) || !std::isfinite(q))
        throw std::invalid_argument("exponents must satisfy 1 < p <= q < inf");
}

namespace {

// Per-atom mass and integrals of S_i to the three testing powers.
struct AtomSums {
    std::vector<double> m;    // mu(atom)
    std::vector<double> wr;   // int_atom S^r
    std::vector<double> wq;   // int_atom S^q
    std::vector<double> wpp;  // int_atom S^{p'}
};

AtomSums atom_sums(const FilteredSpace& space, const LeafFunction& S, int level,
                   const ExponentPair& ep) {
    AtomSums out;
    const int k = space.n_atoms(level);
    out.m.resize(static_cast<std::size_t>(k));
    out.wr.assign(static_cast<std::size_t>(k), 0.0);
    out.wq.assign(static_cast<std::size_t>(k), 0.0);
    out.wpp.assign(static_cast<std::size_t>(k), 0.0);
    for (int a = 0; a < k; ++a) {
        out.m[static_cast<std::size_t>(a)] = space.atom_measure(level, a);
        for (int leaf : space.atom_leaves(level, a)) {
            double s = S[static_cast<std::size_t>(leaf)];
            double w = space.leaf_weight(leaf);
            out.wr[static_cast<std::size_t>(a)] += std::pow(s, ep.r()) * w;
            out.wq[static_cast<std::size_t>(a)] += std::pow(s, ep.q) * w;
            out.wpp[static_cast<std::size_t>(a)] += std::pow(s, ep.pprime()) * w;
        }
    }
    return out;
}

double combined_value(double M, double Wr, const ExponentPair& ep) {
    return std::pow(M, 1.0 / ep.q - 1.0 / ep.p - 1.0 / ep.r()) * std::pow(Wr, 1.0 / ep.r());
}
double q_value(double M, double Wq, const ExponentPair& ep) {
    return std::pow(Wq, 1.0 / ep.q) / std::pow(M, 1.0 / ep.p);
}
double pprime_value(double M, double Wpp, const ExponentPair& ep) {
    return std::pow(Wpp, 1.0 / ep.pprime()) / std::pow(M, 1.0 / ep.qprime());
}

void consider(TestingResult& best, int level, std::vector<int> atoms, double M, double Wr,
              double Wq, double Wpp, const ExponentPair& ep) {
    double v = combined_value(M, Wr, ep);
    if (v > best.C2) {
        best.C2 = v;
        best.witness = {level, atoms, v};
    }
    v = q_value(M, Wq, ep);
    if (v > best.C2_q) {
        best.C2_q = v;
        best.witness_q = {level, atoms, v};
    }
    v = pprime_value(M, Wpp, ep);
    if (v > best.C2_pprime) {
        best.C2_pprime = v;
        best.witness_pprime = {level, std::move(atoms), v};
    }
}

}  // namespace

TestingResult testing_constant(const FilteredSpace& space, const CoefficientFamily& alpha,
                               const ExponentPair& ep) {
    TestingResult best;
    for (int i = 0; i < static_cast<int>(space.n_levels()); ++i) {
        LeafFunction S = tail_sum(space, alpha, i);
        AtomSums sums = atom_sums(space, S, i, ep);
        for (int a = 0; a < space.n_atoms(i); ++a) {
            auto ai = static_cast<std::size_t>(a);
            consider(best, i, {a}, sums.m[ai], sums.wr[ai], sums.wq[ai], sums.wpp[ai], ep);
        }
    }
    return best;
}

TestingResult brute_force_testing(const FilteredSpace& space, const CoefficientFamily& alpha,
                                  const ExponentPair& ep) {
    TestingResult best;
    for (int i = 0; i < static_cast<int>(space.n_levels()); ++i) {
        const int k = space.n_atoms(i);
        if (k > 20)
            throw std::invalid_argument("brute_force_testing: level " + std::to_string(i) +
                                        " has " + std::to_string(k) + " atoms (cap 20)");
        LeafFunction S = tail_sum(space, alpha, i);
        AtomSums sums = atom_sums(space, S, i, ep);
        const std::uint32_t n_subsets = 1u << k;
        for (std::uint32_t mask = 1; mask < n_subsets; ++mask) {
            double M = 0.0, Wr = 0.0, Wq = 0.0, Wpp = 0.0;
            std::vector<int> atoms;
            for (int a = 0; a < k; ++a) {
                if (!(mask & (1u << a))) continue;
                auto ai = static_cast<std::size_t>(a);
                M += sums.m[ai];
                Wr += sums.wr[ai];
                Wq += sums.wq[ai];
                Wpp += sums.wpp[ai];
                atoms.push_back(a);
            }
            consider(best, i, std::move(atoms), M, Wr, Wq, Wpp, ep);
        }
    }
    return best;
}

MaxIdentityCheck footnote_max_identity_check(const FilteredSpace& space,
                                             const CoefficientFamily& alpha,
                                             const ExponentPair& ep, int level,
                                             const std::vector<int>& atom_ids) {
    LeafFunction S = tail_sum(space, alpha, level);
    double M = space.measure_atoms(level, atom_ids);
    if (!(M > 0.0)) throw std::invalid_argument("footnote check needs mu(E) > 0");

    auto mean = [&](double s) {
        double acc = 0.0;
        for (int a : atom_ids)
            for (int leaf : space.atom_leaves(level, a))
                acc += std::pow(S[static_cast<std::size_t>(leaf)], s) * space.leaf_weight(leaf);
        return std::pow(acc / M, 1.0 / s);
    };

    MaxIdentityCheck out;
    double mq = mean(ep.q);
    double mpp = mean(ep.pprime());
    out.lhs = std::max(mq, mpp);
    out.rhs = mean(ep.r());

    double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
    bool equal = std::abs(out.lhs - out.rhs) <= std::max(1e-10 * scale, 1e-14);
    // Power means must be nondecreasing in the exponent from min(q,p') to r.
    double lo = mean(std::min(ep.q, ep.pprime()));
    bool monotone = lo <= out.rhs * (1.0 + 1e-10) + 1e-14;
    out.pass = equal && monotone;
    return out;
}

}  // namespace mfilt

#include "mfilt/norm_estimator.hpp"

#include "mfilt/conditional.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mfilt {

double objective(const FilteredSpace& space, const CoefficientFamily& alpha,
                 const LeafFunction& f, double p, double q) {
    double denom = lp_norm(space, f, p);
    if (denom == 0.0) return 0.0;
    return lp_norm(space, apply(space, alpha, f), q) / denom;
}

namespace {

void normalize_p(const FilteredSpace& space, LeafFunction& f, double p) {
    double n = lp_norm(space, f, p);
    if (n > 0.0)
        for (auto& v : f) v /= n;
}

struct RunResult {
    double value = 0.0;
    LeafFunction witness;
    int iterations = 0;
    bool converged = false;
};

RunResult run_power_iteration(const FilteredSpace& space, const CoefficientFamily& alpha,
                              LeafFunction f, double p, double q, int iters, double tol) {
    RunResult out;
    normalize_p(space, f, p);
    out.value = objective(space, alpha, f, p, q);
    out.witness = f;
    double prev = out.value;
    for (int it = 0; it < iters; ++it) {
        auto next = power_step(space, alpha, f, p, q);
        if (!next) break;
        f = std::move(*next);
        double obj = objective(space, alpha, f, p, q);
        ++out.iterations;
        if (obj > out.value) {
            out.value = obj;
            out.witness = f;
        }
        if (std::abs(obj - prev) <= tol * std::max(1.0, out.value)) {
            out.converged = true;
            break;
        }
        prev = obj;
    }
    return out;
}

}  // namespace

std::optional<LeafFunction> power_step(const FilteredSpace& space, const CoefficientFamily& alpha,
                                       const LeafFunction& f, double p, double q) {
    LeafFunction tf = apply(space, alpha, f);
    bool zero = true;
    for (double v : tf)
        if (v != 0.0) zero = false;
    if (zero) return std::nullopt;

    for (auto& v : tf) v = std::pow(v, q - 1.0);
    LeafFunction next = apply(space, alpha, tf);
    for (auto& v : next) v = std::pow(v, 1.0 / (p - 1.0));
    normalize_p(space, next, p);
    return next;
}

NormEstimate norm_lower_bound(const FilteredSpace& space, const CoefficientFamily& alpha,
                              double p, double q, int restarts, int iters, double tol,
                              std::uint64_t seed) {
    if (restarts < 1) throw std::invalid_argument("norm_lower_bound requires restarts >= 1");

    std::vector<LeafFunction> starts;
    starts.emplace_back(space.n_leaves(), 1.0);  // constant
    for (int i = 0; i < static_cast<int>(space.n_levels()); ++i)
        for (int a = 0; a < space.n_atoms(i); ++a) {
            LeafFunction ind(space.n_leaves(), 0.0);
            for (int leaf : space.atom_leaves(i, a)) ind[static_cast<std::size_t>(leaf)] = 1.0;
            starts.push_back(std::move(ind));
        }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < restarts; ++k) {
        LeafFunction f(space.n_leaves());
        for (auto& v : f) v = unif(rng);
        starts.push_back(std::move(f));
    }

    NormEstimate best;
    best.restarts = static_cast<int>(starts.size());
    best.witness.assign(space.n_leaves(), 0.0);
    bool first = true;
    for (auto& start : starts) {
        RunResult run = run_power_iteration(space, alpha, std::move(start), p, q, iters, tol);
        if (first || run.value > best.value) {
            best.value = run.value;
            best.witness = std::move(run.witness);
            best.iterations = run.iterations;
            best.converged = run.converged;
            first = false;
        }
    }
    // A run that stalled at T f == 0 never iterates; report it as converged
    // when the whole search is trivially zero.
    if (best.value == 0.0) best.converged = true;
    return best;
}

double exhaustive_norm(const FilteredSpace& space, const CoefficientFamily& alpha, double p,
                       double q, int resolution) {
    const std::size_t n = space.n_leaves();
    if (n > 5) throw std::invalid_argument("exhaustive_norm supports at most 5 leaves");
    if (resolution < 1) throw std::invalid_argument("exhaustive_norm requires resolution >= 1");

    double best = 0.0;
    LeafFunction best_f(n, 0.0);
    LeafFunction f(n, 0.0);

    // Enumerate compositions of `resolution` into n nonnegative parts.
    std::vector<int> parts(n, 0);
    auto evaluate = [&]() {
        for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>(parts[i]);
        double obj = objective(space, alpha, f, p, q);
        if (obj > best) {
            best = obj;
            best_f = f;
        }
    };
    // Odometer over the simplex grid.
    std::vector<int> state(n, 0);
    while (true) {
        int total = 0;
        for (int v : state) total += v;
        if (total == resolution) {
            parts = state;
            evaluate();
        }
        std::size_t pos = 0;
        while (pos < n && state[pos] == resolution) {
            state[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
        ++state[pos];
    }

    if (best > 0.0) {
        RunResult polished = run_power_iteration(space, alpha, best_f, p, q, 200, 1e-13);
        best = std::max(best, polished.value);
    }
    return best;
}

}  // namespace mfilt

#include "mfilt/conditional.hpp"

#include <cmath>
#include <stdexcept>

namespace mfilt {

LeafFunction cond_expect(const FilteredSpace& space, const LeafFunction& f, int level) {
    if (level < 0 || static_cast<std::size_t>(level) >= space.n_levels())
        throw std::out_of_range("cond_expect: level " + std::to_string(level));
    if (f.size() != space.n_leaves())
        throw std::invalid_argument("cond_expect: function size mismatch");
    LeafFunction out(space.n_leaves());
    for (int a = 0; a < space.n_atoms(level); ++a) {
        const auto& leaves = space.atom_leaves(level, a);
        double s = 0.0;
        for (int leaf : leaves) s += f[static_cast<std::size_t>(leaf)] * space.leaf_weight(leaf);
        double avg = s / space.atom_measure(level, a);
        for (int leaf : leaves) out[static_cast<std::size_t>(leaf)] = avg;
    }
    return out;
}

LeafFunction doob_maximal(const FilteredSpace& space, const LeafFunction& f, int i_lo, int i_hi) {
    if (i_lo > i_hi) throw std::invalid_argument("doob_maximal: empty window");
    if (i_lo < 0 || static_cast<std::size_t>(i_hi) >= space.n_levels())
        throw std::out_of_range("doob_maximal: window out of range");
    LeafFunction best(space.n_leaves(), 0.0);
    for (int i = i_lo; i <= i_hi; ++i) {
        LeafFunction ei = cond_expect(space, f, i);
        for (std::size_t leaf = 0; leaf < best.size(); ++leaf)
            best[leaf] = std::max(best[leaf], std::abs(ei[leaf]));
    }
    return best;
}

LeafFunction doob_maximal(const FilteredSpace& space, const LeafFunction& f) {
    return doob_maximal(space, f, 0, static_cast<int>(space.n_levels()) - 1);
}

namespace {
bool close(double a, double b, double rel_tol) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= std::max(rel_tol * scale, 1e-12);
}
}  // namespace

bool verify_martingale(const FilteredSpace& space, const MartingaleSequence& seq,
                       double rel_tol) {
    const int L = static_cast<int>(seq.levels.size());
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < j; ++i) {
            LeafFunction proj = cond_expect(space, seq.levels[static_cast<std::size_t>(j)], i);
            const auto& fi = seq.levels[static_cast<std::size_t>(i)];
            for (std::size_t leaf = 0; leaf < proj.size(); ++leaf)
                if (!close(proj[leaf], fi[leaf], rel_tol)) return false;
        }
    return true;
}

double lp_norm(const FilteredSpace& space, const LeafFunction& f, double p) {
    double s = 0.0;
    for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
        s += std::pow(std::abs(f[leaf]), p) * space.leaf_weight(leaf);
    return std::pow(s, 1.0 / p);
}

double integral(const FilteredSpace& space, const LeafFunction& f) {
    double s = 0.0;
    for (std::size_t leaf = 0; leaf < f.size(); ++leaf) s += f[leaf] * space.leaf_weight(leaf);
    return s;
}

double inner(const FilteredSpace& space, const LeafFunction& f, const LeafFunction& g) {
    double s = 0.0;
    for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
        s += f[leaf] * g[leaf] * space.leaf_weight(leaf);
    return s;
}

}  // namespace mfilt

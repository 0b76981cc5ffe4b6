#include "mfilt/positive_operator.hpp"

#include "mfilt/conditional.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mfilt {

using nlohmann::json;

std::vector<std::string> validate(const FilteredSpace& space, const CoefficientFamily& alpha) {
    std::vector<std::string> out;
    if (alpha.per_atom.size() != space.n_levels())
        out.push_back("coefficient family has " + std::to_string(alpha.per_atom.size()) +
                      " levels, space has " + std::to_string(space.n_levels()));
    for (std::size_t i = 0; i < alpha.per_atom.size() && i < space.n_levels(); ++i) {
        const auto& lvl = alpha.per_atom[i];
        if (lvl.empty()) continue;
        if (lvl.size() != static_cast<std::size_t>(space.n_atoms(static_cast<int>(i)))) {
            out.push_back("level " + std::to_string(i) + ": expected " +
                          std::to_string(space.n_atoms(static_cast<int>(i))) + " atom values");
            continue;
        }
        for (std::size_t a = 0; a < lvl.size(); ++a)
            if (!(lvl[a] >= 0.0) || !std::isfinite(lvl[a]))
                out.push_back("level " + std::to_string(i) + ", atom " + std::to_string(a) +
                              ": coefficient must be nonnegative and finite");
    }
    return out;
}

LeafFunction alpha_on_leaves(const FilteredSpace& space, const CoefficientFamily& alpha,
                             int level) {
    LeafFunction out(space.n_leaves(), 0.0);
    const auto& lvl = alpha.per_atom[static_cast<std::size_t>(level)];
    if (lvl.empty()) return out;
    for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
        out[leaf] = lvl[static_cast<std::size_t>(space.atom_of(level, static_cast<int>(leaf)))];
    return out;
}

LeafFunction apply(const FilteredSpace& space, const CoefficientFamily& alpha,
                   const LeafFunction& f, int i_lo, int i_hi) {
    LeafFunction out(space.n_leaves(), 0.0);
    for (int i = i_lo; i <= i_hi; ++i) {
        if (alpha.per_atom[static_cast<std::size_t>(i)].empty()) continue;
        LeafFunction ei = cond_expect(space, f, i);
        for (std::size_t leaf = 0; leaf < out.size(); ++leaf) {
            int a = space.atom_of(i, static_cast<int>(leaf));
            out[leaf] += alpha.at(i, a) * ei[leaf];
        }
    }
    return out;
}

LeafFunction apply(const FilteredSpace& space, const CoefficientFamily& alpha,
                   const LeafFunction& f) {
    return apply(space, alpha, f, 0, static_cast<int>(space.n_levels()) - 1);
}

double bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                const LeafFunction& f, const LeafFunction& g, int i_lo, int i_hi) {
    double total = 0.0;
    for (int i = i_lo; i <= i_hi; ++i) {
        if (alpha.per_atom[static_cast<std::size_t>(i)].empty()) continue;
        LeafFunction ef = cond_expect(space, f, i);
        LeafFunction eg = cond_expect(space, g, i);
        double level_sum = 0.0;
        for (std::size_t leaf = 0; leaf < ef.size(); ++leaf) {
            int a = space.atom_of(i, static_cast<int>(leaf));
            level_sum += alpha.at(i, a) * ef[leaf] * eg[leaf] * space.leaf_weight(leaf);
        }
        total += level_sum;
    }
    return total;
}

double bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                const LeafFunction& f, const LeafFunction& g) {
    return bilinear(space, alpha, f, g, 0, static_cast<int>(space.n_levels()) - 1);
}

LeafFunction tail_sum(const FilteredSpace& space, const CoefficientFamily& alpha, int i) {
    if (i < 0 || static_cast<std::size_t>(i) >= space.n_levels())
        throw std::out_of_range("tail_sum: level " + std::to_string(i));
    LeafFunction out(space.n_leaves(), 0.0);
    for (int j = i; j < static_cast<int>(space.n_levels()); ++j) {
        if (alpha.per_atom[static_cast<std::size_t>(j)].empty()) continue;
        for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
            out[leaf] += alpha.at(j, space.atom_of(j, static_cast<int>(leaf)));
    }
    return out;
}

CoefficientFamily random_coefficients(const FilteredSpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    CoefficientFamily alpha;
    alpha.per_atom.resize(space.n_levels());
    for (std::size_t i = 0; i < space.n_levels(); ++i) {
        if (unif(rng) < 0.2) continue;  // sparse level, alpha_i == 0
        auto& lvl = alpha.per_atom[i];
        lvl.resize(static_cast<std::size_t>(space.n_atoms(static_cast<int>(i))));
        for (auto& v : lvl) {
            double u = unif(rng);
            v = (u < 0.25) ? 0.0 : std::pow(4.0, unif(rng) * 2.0 - 1.0);
        }
    }
    return alpha;
}

CoefficientFamily load_coefficients(const std::string& path, const FilteredSpace& space) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    if (!doc.contains("alpha")) throw std::runtime_error(path + ": missing \"alpha\" key");
    CoefficientFamily alpha;
    alpha.per_atom.resize(space.n_levels());
    for (const auto& entry : doc["alpha"]) {
        int level = entry.at("level").get<int>();
        if (level < 0 || static_cast<std::size_t>(level) >= space.n_levels())
            throw std::runtime_error(path + ": level " + std::to_string(level) + " out of range");
        std::vector<double> vals;
        for (const auto& v : entry.at("per_atom")) vals.push_back(parse_double(v.get<std::string>()));
        alpha.per_atom[static_cast<std::size_t>(level)] = std::move(vals);
    }
    auto violations = validate(space, alpha);
    if (!violations.empty()) throw std::runtime_error(path + ": " + violations.front());
    return alpha;
}

void save_coefficients(const CoefficientFamily& alpha, const std::string& path) {
    json entries = json::array();
    for (std::size_t i = 0; i < alpha.per_atom.size(); ++i) {
        if (alpha.per_atom[i].empty()) continue;
        json vals = json::array();
        for (double v : alpha.per_atom[i]) vals.push_back(format_double(v));
        entries.push_back(json{{"level", i}, {"per_atom", std::move(vals)}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << json{{"alpha", std::move(entries)}}.dump(2) << '\n';
}

}  // namespace mfilt

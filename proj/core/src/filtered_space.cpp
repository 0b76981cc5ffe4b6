#include "mfilt/filtered_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace mfilt {

using nlohmann::json;

FilteredSpace::FilteredSpace(std::vector<double> leaf_weights,
                             std::vector<std::vector<int>> atom_of_leaf)
    : leaf_weights_(std::move(leaf_weights)), atom_of_leaf_(std::move(atom_of_leaf)) {
    auto violations = validate_parts(leaf_weights_, atom_of_leaf_);
    if (!violations.empty())
        throw std::invalid_argument("invalid filtered space: " + violations.front());

    const std::size_t n = leaf_weights_.size();
    const std::size_t levels = atom_of_leaf_.size();
    leaves_of_atom_.resize(levels);
    atom_measure_.resize(levels);
    for (std::size_t i = 0; i < levels; ++i) {
        int k = *std::max_element(atom_of_leaf_[i].begin(), atom_of_leaf_[i].end()) + 1;
        leaves_of_atom_[i].resize(k);
        atom_measure_[i].assign(k, 0.0);
        for (std::size_t leaf = 0; leaf < n; ++leaf) {
            int a = atom_of_leaf_[i][leaf];
            leaves_of_atom_[i][a].push_back(static_cast<int>(leaf));
            atom_measure_[i][a] += leaf_weights_[leaf];
        }
    }
    total_mass_ = std::accumulate(leaf_weights_.begin(), leaf_weights_.end(), 0.0);
}

std::vector<std::string> FilteredSpace::validate_parts(
    const std::vector<double>& leaf_weights,
    const std::vector<std::vector<int>>& atom_of_leaf) {
    std::vector<std::string> out;
    const std::size_t n = leaf_weights.size();
    if (n == 0) out.push_back("space has no leaves");
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        double w = leaf_weights[leaf];
        if (!(w > 0.0) || !std::isfinite(w))
            out.push_back("leaf_weight[" + std::to_string(leaf) + "] must be positive and finite");
    }
    if (atom_of_leaf.empty()) out.push_back("space has no levels");
    for (std::size_t i = 0; i < atom_of_leaf.size(); ++i) {
        const auto& level = atom_of_leaf[i];
        if (level.size() != n) {
            out.push_back("level " + std::to_string(i) + " maps " + std::to_string(level.size()) +
                          " leaves, expected " + std::to_string(n));
            continue;
        }
        int max_id = -1;
        bool in_range = true;
        for (std::size_t leaf = 0; leaf < n; ++leaf) {
            int a = level[leaf];
            if (a < 0 || a >= static_cast<int>(n)) {
                out.push_back("level " + std::to_string(i) + ": atom id " + std::to_string(a) +
                              " at leaf " + std::to_string(leaf) + " out of range");
                in_range = false;
                break;
            }
            max_id = std::max(max_id, a);
        }
        if (!in_range) continue;
        std::vector<char> seen(static_cast<std::size_t>(max_id) + 1, 0);
        for (int a : level) seen[static_cast<std::size_t>(a)] = 1;
        for (int a = 0; a <= max_id; ++a)
            if (!seen[static_cast<std::size_t>(a)])
                out.push_back("level " + std::to_string(i) + ": atom id " + std::to_string(a) +
                              " is empty (ids must be contiguous)");
    }
    // Refinement: leaves sharing an atom at level i+1 must share one at level i.
    for (std::size_t i = 0; i + 1 < atom_of_leaf.size(); ++i) {
        const auto& coarse = atom_of_leaf[i];
        const auto& fine = atom_of_leaf[i + 1];
        if (coarse.size() != n || fine.size() != n) continue;
        std::vector<int> parent(n, -1);  // fine atom id -> coarse atom id
        bool reported = false;
        for (std::size_t leaf = 0; leaf < n && !reported; ++leaf) {
            int fa = fine[leaf], ca = coarse[leaf];
            if (fa < 0 || fa >= static_cast<int>(n) || ca < 0) continue;
            if (parent[fa] == -1) {
                parent[fa] = ca;
            } else if (parent[fa] != ca) {
                out.push_back("refinement violation at level " + std::to_string(i + 1) +
                              ": atom " + std::to_string(fa) + " straddles level-" +
                              std::to_string(i) + " atoms " + std::to_string(parent[fa]) +
                              " and " + std::to_string(ca));
                reported = true;
            }
        }
    }
    return out;
}

std::vector<std::string> validate(const FilteredSpace& space) {
    return FilteredSpace::validate_parts(space.leaf_weights(), space.partitions());
}

double FilteredSpace::measure(std::span<const int> leaves) const {
    double s = 0.0;
    for (int leaf : leaves) {
        if (leaf < 0 || static_cast<std::size_t>(leaf) >= n_leaves())
            throw std::out_of_range("unknown leaf " + std::to_string(leaf));
        s += leaf_weights_[static_cast<std::size_t>(leaf)];
    }
    return s;
}

double FilteredSpace::measure_atoms(int level, std::span<const int> atom_ids) const {
    if (level < 0 || static_cast<std::size_t>(level) >= n_levels())
        throw std::out_of_range("unknown level " + std::to_string(level));
    double s = 0.0;
    for (int a : atom_ids) {
        if (a < 0 || a >= n_atoms(level))
            throw std::out_of_range("unknown atom " + std::to_string(a) + " at level " +
                                    std::to_string(level));
        s += atom_measure_[level][a];
    }
    return s;
}

double measure(const FilteredSpace& space, const AtomSet& set) {
    return space.measure_atoms(set.level, set.atom_ids);
}

namespace {

std::vector<double> draw_weights(std::size_t n, WeightMode mode, std::mt19937_64& rng) {
    std::vector<double> w(n, 1.0);
    if (mode == WeightMode::LogUniform) {
        std::uniform_real_distribution<double> dist(-3.0, 3.0);
        for (auto& v : w) v = std::pow(10.0, dist(rng));
    }
    return w;
}

}  // namespace

FilteredSpace generate_dyadic(int depth, int branching, WeightMode mode, std::uint64_t seed) {
    if (depth < 1 || branching < 2)
        throw std::invalid_argument("generate_dyadic requires depth >= 1 and branching >= 2");
    std::size_t n = 1;
    for (int i = 0; i < depth; ++i) {
        if (n > (1u << 24) / static_cast<std::size_t>(branching))
            throw std::invalid_argument("generate_dyadic: too many leaves");
        n *= static_cast<std::size_t>(branching);
    }
    std::vector<std::vector<int>> levels(static_cast<std::size_t>(depth) + 1,
                                         std::vector<int>(n, 0));
    std::size_t block = n;
    for (int i = 0; i <= depth; ++i) {
        for (std::size_t leaf = 0; leaf < n; ++leaf)
            levels[static_cast<std::size_t>(i)][leaf] = static_cast<int>(leaf / block);
        block /= static_cast<std::size_t>(branching);
        if (block == 0) block = 1;
    }
    std::mt19937_64 rng(seed);
    return FilteredSpace(draw_weights(n, mode, rng), std::move(levels));
}

FilteredSpace generate_random_tree(int n_levels, int n_leaves, WeightMode mode,
                                   std::uint64_t seed) {
    if (n_levels < 1 || n_leaves < n_levels)
        throw std::invalid_argument("generate_random_tree requires n_leaves >= n_levels >= 1");
    std::mt19937_64 rng(seed);
    const std::size_t n = static_cast<std::size_t>(n_leaves);

    std::vector<std::vector<int>> levels;
    levels.reserve(static_cast<std::size_t>(n_levels));

    // Level 0: random partition into at most 3 atoms. Later levels split each
    // atom of the previous level into at most 3 nonempty parts, so no lattice
    // structure is imposed.
    std::uniform_int_distribution<int> coarse(1, std::min(3, n_leaves));
    int k0 = coarse(rng);
    std::vector<int> first(n);
    for (std::size_t leaf = 0; leaf < n; ++leaf)
        first[leaf] = static_cast<int>(leaf % static_cast<std::size_t>(k0));
    std::shuffle(first.begin(), first.end(), rng);
    levels.push_back(std::move(first));

    for (int i = 1; i < n_levels; ++i) {
        const auto& prev = levels.back();
        int k_prev = *std::max_element(prev.begin(), prev.end()) + 1;
        std::vector<std::vector<int>> members(static_cast<std::size_t>(k_prev));
        for (std::size_t leaf = 0; leaf < n; ++leaf)
            members[static_cast<std::size_t>(prev[leaf])].push_back(static_cast<int>(leaf));

        std::vector<int> cur(n, 0);
        int next_id = 0;
        for (auto& atom : members) {
            int parts = 1;
            if (atom.size() > 1) {
                std::uniform_int_distribution<int> split(
                    1, static_cast<int>(std::min<std::size_t>(3, atom.size())));
                parts = split(rng);
            }
            std::shuffle(atom.begin(), atom.end(), rng);
            for (std::size_t j = 0; j < atom.size(); ++j)
                cur[static_cast<std::size_t>(atom[j])] =
                    next_id + static_cast<int>(j % static_cast<std::size_t>(parts));
            next_id += parts;
        }
        levels.push_back(std::move(cur));
    }
    return FilteredSpace(draw_weights(n, mode, rng), std::move(levels));
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("malformed decimal string: \"" + s + "\"");
    return v;
}

FilteredSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    for (const char* key : {"n_leaves", "leaf_weights", "levels"})
        if (!doc.contains(key))
            throw std::runtime_error(path + ": missing \"" + key + "\" key");

    std::size_t n = doc["n_leaves"].get<std::size_t>();
    std::vector<double> weights;
    for (const auto& w : doc["leaf_weights"]) weights.push_back(parse_double(w.get<std::string>()));
    if (weights.size() != n)
        throw std::runtime_error(path + ": n_leaves disagrees with leaf_weights length");

    std::vector<std::vector<int>> levels;
    for (const auto& level : doc["levels"]) {
        if (!level.contains("atom_of_leaf"))
            throw std::runtime_error(path + ": level missing \"atom_of_leaf\" key");
        levels.push_back(level["atom_of_leaf"].get<std::vector<int>>());
    }

    auto violations = FilteredSpace::validate_parts(weights, levels);
    if (!violations.empty()) throw std::runtime_error(path + ": " + violations.front());
    return FilteredSpace(std::move(weights), std::move(levels));
}

void save_space(const FilteredSpace& space, const std::string& path) {
    json doc;
    doc["n_leaves"] = space.n_leaves();
    json weights = json::array();
    for (double w : space.leaf_weights()) weights.push_back(format_double(w));
    doc["leaf_weights"] = std::move(weights);
    json levels = json::array();
    for (const auto& level : space.partitions()) levels.push_back(json{{"atom_of_leaf", level}});
    doc["levels"] = std::move(levels);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

LeafFunction load_leaf_function(const std::string& path, std::size_t expected_size) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    if (!doc.is_array()) throw std::runtime_error(path + ": expected a JSON array");
    LeafFunction f;
    for (const auto& v : doc) f.push_back(parse_double(v.get<std::string>()));
    if (expected_size != 0 && f.size() != expected_size)
        throw std::runtime_error(path + ": expected " + std::to_string(expected_size) +
                                 " values, got " + std::to_string(f.size()));
    return f;
}

void save_leaf_function(const LeafFunction& f, const std::string& path) {
    json doc = json::array();
    for (double v : f) doc.push_back(format_double(v));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace mfilt

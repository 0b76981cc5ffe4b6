#include "mfilt/principal_sets.hpp"

#include "mfilt/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace mfilt {

double PrincipalSet::children_measure(const FilteredSpace& space) const {
    double s = 0.0;
    for (const auto& child : children) s += child.measure(space);
    return s;
}

std::vector<const PrincipalSet*> PrincipalTree::all_sets() const {
    std::vector<const PrincipalSet*> out;
    std::vector<const PrincipalSet*> frontier;
    for (const auto& root : roots) frontier.push_back(&root);
    while (!frontier.empty()) {
        std::vector<const PrincipalSet*> next;
        for (const PrincipalSet* node : frontier) {
            out.push_back(node);
            for (const auto& child : node->children) next.push_back(&child);
        }
        frontier = std::move(next);
    }
    return out;
}

int dyadic_slice_index(double v) {
    if (!(v > 0.0)) throw std::invalid_argument("dyadic_slice_index requires v > 0");
    int exp = 0;
    double mantissa = std::frexp(v, &exp);  // v = mantissa * 2^exp, mantissa in [0.5, 1)
    // mantissa == 0.5 exactly means v = 2^{exp-1}, which belongs to slice exp-1.
    return mantissa == 0.5 ? exp - 1 : exp;
}

namespace {

void require_nonnegative(const LeafFunction& f) {
    for (double v : f)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("data function must be nonnegative and finite");
}

// E_i f for every level, computed once per construction.
std::vector<LeafFunction> all_cond_expects(const FilteredSpace& space, const LeafFunction& f) {
    std::vector<LeafFunction> out;
    out.reserve(space.n_levels());
    for (int i = 0; i < static_cast<int>(space.n_levels()); ++i)
        out.push_back(cond_expect(space, f, i));
    return out;
}

std::vector<int> stopping_time_cached(const FilteredSpace& space,
                                      const std::vector<LeafFunction>& ef,
                                      const std::vector<int>& p_leaves, int kappa1, int kappa2) {
    const int L = static_cast<int>(space.n_levels());
    const double threshold = std::ldexp(1.0, kappa2 + 1);  // 2^{kappa2+1}
    std::vector<int> tau(space.n_leaves(), -1);
    for (int leaf : p_leaves) {
        int first = L;
        for (int j = kappa1; j < L; ++j) {
            if (ef[static_cast<std::size_t>(j)][static_cast<std::size_t>(leaf)] > threshold) {
                first = j;
                break;
            }
        }
        tau[static_cast<std::size_t>(leaf)] = first;
    }
    return tau;
}

void build_children(const FilteredSpace& space, const std::vector<LeafFunction>& ef,
                    PrincipalSet& node) {
    const int L = static_cast<int>(space.n_levels());
    std::vector<int> tau_full = stopping_time_cached(space, ef, node.leaves, node.kappa1,
                                                     node.kappa2);
    node.tau.resize(node.leaves.size());
    for (std::size_t idx = 0; idx < node.leaves.size(); ++idx)
        node.tau[idx] = tau_full[static_cast<std::size_t>(node.leaves[idx])];

    // Q = {2^{l-1} < 1_{tau=j} E_j f <= 2^l}; on {tau=j} the value exceeds
    // 2^{kappa2+1}, so l > kappa2+1 automatically.
    std::map<std::pair<int, int>, std::vector<int>> groups;  // (j, l) -> leaves
    for (std::size_t idx = 0; idx < node.leaves.size(); ++idx) {
        int j = node.tau[idx];
        if (j >= L) continue;
        int leaf = node.leaves[idx];
        double v = ef[static_cast<std::size_t>(j)][static_cast<std::size_t>(leaf)];
        groups[{j, dyadic_slice_index(v)}].push_back(leaf);
    }
    for (auto& [key, leaves] : groups) {
        PrincipalSet child;
        child.leaves = std::move(leaves);
        child.kappa1 = key.first;
        child.kappa2 = key.second;
        build_children(space, ef, child);
        node.children.push_back(std::move(child));
    }
}

}  // namespace

std::vector<int> stopping_time(const FilteredSpace& space, const LeafFunction& f,
                               const std::vector<int>& p_leaves, int kappa1, int kappa2) {
    require_nonnegative(f);
    return stopping_time_cached(space, all_cond_expects(space, f), p_leaves, kappa1, kappa2);
}

PrincipalTree build_principal_tree(const FilteredSpace& space, const LeafFunction& f, int i0) {
    require_nonnegative(f);
    if (i0 < 0 || static_cast<std::size_t>(i0) >= space.n_levels())
        throw std::out_of_range("build_principal_tree: i0 out of range");

    std::vector<LeafFunction> ef = all_cond_expects(space, f);
    PrincipalTree tree;
    tree.i0 = i0;

    std::map<int, std::vector<int>> slices;  // kappa2 -> leaves
    for (std::size_t leaf = 0; leaf < space.n_leaves(); ++leaf) {
        double v = ef[static_cast<std::size_t>(i0)][leaf];
        if (v > 0.0) slices[dyadic_slice_index(v)].push_back(static_cast<int>(leaf));
    }
    for (auto& [k, leaves] : slices) {
        PrincipalSet root;
        root.leaves = std::move(leaves);
        root.kappa1 = i0;
        root.kappa2 = k;
        build_children(space, ef, root);
        tree.roots.push_back(std::move(root));
    }
    return tree;
}

PrincipalReport verify_properties(const FilteredSpace& space, const LeafFunction& f,
                                  const PrincipalTree& tree) {
    PrincipalReport report;
    std::vector<LeafFunction> ef = all_cond_expects(space, f);
    const int L = static_cast<int>(space.n_levels());

    for (const PrincipalSet* node : tree.all_sets()) {
        const double bound = std::ldexp(1.0, node->kappa2 + 1);
        for (std::size_t idx = 0; idx < node->leaves.size(); ++idx) {
            int leaf = node->leaves[idx];
            int stop = std::min(node->tau[idx], L);
            for (int j = node->kappa1; j < stop; ++j) {
                double v = ef[static_cast<std::size_t>(j)][static_cast<std::size_t>(leaf)];
                report.iv_worst = std::max(report.iv_worst, v / bound);
                if (v > bound) {
                    report.iv_ok = false;
                    report.violations.push_back(
                        "(iv) fails at leaf " + std::to_string(leaf) + " level " +
                        std::to_string(j) + ": " + format_double(v) + " > " +
                        format_double(bound));
                }
            }
        }

        double mu_p = node->measure(space);
        double mu_children = node->children_measure(space);
        report.v_worst = std::max(report.v_worst, mu_children / (0.5 * mu_p));
        if (mu_children > 0.5 * mu_p) {
            report.v_ok = false;
            report.violations.push_back("(v) fails at node (kappa1=" +
                                        std::to_string(node->kappa1) + ", kappa2=" +
                                        std::to_string(node->kappa2) + ")");
        }

        double f_mass = 0.0;
        for (int leaf : node->leaves)
            f_mass += f[static_cast<std::size_t>(leaf)] * space.leaf_weight(leaf);
        if (mu_children > std::ldexp(f_mass, -node->kappa2 - 1)) {
            report.weak11_ok = false;
            report.violations.push_back("weak-(1,1) chain fails at node (kappa1=" +
                                        std::to_string(node->kappa1) + ", kappa2=" +
                                        std::to_string(node->kappa2) + ")");
        }
    }
    return report;
}

double carleson_sum(const FilteredSpace& space, const PrincipalTree& tree, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("carleson_sum requires p > 1");
    double s = 0.0;
    for (const PrincipalSet* node : tree.all_sets())
        s += node->measure(space) * std::pow(2.0, p * (node->kappa2 - 1));
    return s;
}

Decomposition decompose_bilinear(const FilteredSpace& space, const CoefficientFamily& alpha,
                                 const LeafFunction& f, const LeafFunction& g, int i0,
                                 const ExponentPair& ep) {
    require_nonnegative(f);
    require_nonnegative(g);
    const int L = static_cast<int>(space.n_levels());
    std::vector<LeafFunction> ef = all_cond_expects(space, f);
    std::vector<LeafFunction> eg = all_cond_expects(space, g);

    Decomposition out;
    const LeafFunction& support = ef[static_cast<std::size_t>(i0)];

    for (int i = i0; i < L; ++i) {
        if (alpha.per_atom[static_cast<std::size_t>(i)].empty()) continue;
        for (std::size_t leaf = 0; leaf < space.n_leaves(); ++leaf) {
            if (!(support[leaf] > 0.0)) continue;
            int a = space.atom_of(i, static_cast<int>(leaf));
            double term = alpha.at(i, a) * ef[static_cast<std::size_t>(i)][leaf] *
                          eg[static_cast<std::size_t>(i)][leaf] *
                          space.leaf_weight(leaf);
            out.lhs += term;
            bool on_F = std::pow(eg[static_cast<std::size_t>(i)][leaf], ep.qprime()) <=
                        std::pow(ef[static_cast<std::size_t>(i)][leaf], ep.p);
            (on_F ? out.split_F : out.split_G) += term;
        }
    }

    PrincipalTree tree = build_principal_tree(space, f, i0);
    for (const PrincipalSet* node : tree.all_sets()) {
        double set_sum = 0.0;
        for (std::size_t idx = 0; idx < node->leaves.size(); ++idx) {
            int leaf = node->leaves[idx];
            int stop = std::min(node->tau[idx], L);
            for (int i = node->kappa1; i < stop; ++i) {
                if (alpha.per_atom[static_cast<std::size_t>(i)].empty()) continue;
                int a = space.atom_of(i, leaf);
                set_sum += alpha.at(i, a) * ef[static_cast<std::size_t>(i)][static_cast<std::size_t>(leaf)] *
                           eg[static_cast<std::size_t>(i)][static_cast<std::size_t>(leaf)] *
                           space.leaf_weight(leaf);
            }
        }
        out.per_set.push_back(set_sum);
        out.rhs += set_sum;
    }
    return out;
}

namespace {

nlohmann::json node_to_json(const PrincipalSet& node) {
    nlohmann::json j;
    j["leaves"] = node.leaves;
    j["kappa1"] = node.kappa1;
    j["kappa2"] = node.kappa2;
    j["tau"] = node.tau;
    nlohmann::json children = nlohmann::json::array();
    for (const auto& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
    return j;
}

}  // namespace

std::string tree_to_json(const PrincipalTree& tree) {
    nlohmann::json j;
    j["i0"] = tree.i0;
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& root : tree.roots) roots.push_back(node_to_json(root));
    j["roots"] = std::move(roots);
    return j.dump(2);
}

}  // namespace mfilt

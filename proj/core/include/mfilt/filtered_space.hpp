#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfilt {

/// A measurable function at finest resolution: one real value per leaf atom.
using LeafFunction = std::vector<double>;

/// A finite filtered measure space: weighted leaf atoms plus a chain of
/// refining partitions. Level i generates the sigma-algebra F_i; level i+1
/// refines level i. Immutable after construction; all operations are pure.
class FilteredSpace {
public:
    FilteredSpace() = default;

    /// Builds the space and its atom index. Throws std::invalid_argument if
    /// the data violates the structural invariants (use validate_parts to
    /// get diagnostics instead of an exception).
    FilteredSpace(std::vector<double> leaf_weights,
                  std::vector<std::vector<int>> atom_of_leaf);

    std::size_t n_leaves() const { return leaf_weights_.size(); }
    std::size_t n_levels() const { return atom_of_leaf_.size(); }

    double leaf_weight(std::size_t leaf) const { return leaf_weights_[leaf]; }
    const std::vector<double>& leaf_weights() const { return leaf_weights_; }

    int atom_of(int level, int leaf) const { return atom_of_leaf_[level][leaf]; }
    const std::vector<std::vector<int>>& partitions() const { return atom_of_leaf_; }

    int n_atoms(int level) const { return static_cast<int>(leaves_of_atom_[level].size()); }
    const std::vector<int>& atom_leaves(int level, int atom) const {
        return leaves_of_atom_[level][atom];
    }

    /// mu of one atom.
    double atom_measure(int level, int atom) const { return atom_measure_[level][atom]; }

    /// mu of a set of leaves.
    double measure(std::span<const int> leaves) const;

    /// mu of a union of atoms at one level. Throws on unknown atom id.
    double measure_atoms(int level, std::span<const int> atom_ids) const;

    double total_mass() const { return total_mass_; }

    bool operator==(const FilteredSpace& o) const {
        return leaf_weights_ == o.leaf_weights_ && atom_of_leaf_ == o.atom_of_leaf_;
    }

    /// Diagnostics for raw components; empty means the invariants hold:
    /// positive weights, contiguous nonempty atom ids per level, and each
    /// level refined by the next.
    static std::vector<std::string> validate_parts(
        const std::vector<double>& leaf_weights,
        const std::vector<std::vector<int>>& atom_of_leaf);

private:
    std::vector<double> leaf_weights_;
    std::vector<std::vector<int>> atom_of_leaf_;
    std::vector<std::vector<std::vector<int>>> leaves_of_atom_;
    std::vector<std::vector<double>> atom_measure_;
    double total_mass_ = 0.0;
};

/// A set of atoms at one level (a generic F_i-measurable set of finite
/// measure; on a finite space that is every F_i set).
struct AtomSet {
    int level = 0;
    std::vector<int> atom_ids;
};

std::vector<std::string> validate(const FilteredSpace& space);

double measure(const FilteredSpace& space, const AtomSet& set);

enum class WeightMode { Unit, LogUniform };

/// Canonical b-adic space: depth+1 levels, branching^depth leaves, level i
/// split into branching^i atoms of equal size.
FilteredSpace generate_dyadic(int depth, int branching, WeightMode mode, std::uint64_t seed);

/// Random refining partition chain without any lattice structure: level 0 is
/// a random coarse partition, each later level randomly splits atoms.
/// Deterministic per seed.
FilteredSpace generate_random_tree(int n_levels, int n_leaves, WeightMode mode,
                                   std::uint64_t seed);

FilteredSpace load_space(const std::string& path);
void save_space(const FilteredSpace& space, const std::string& path);

/// Leaf-function files are JSON arrays of decimal strings in leaf order.
LeafFunction load_leaf_function(const std::string& path, std::size_t expected_size);
void save_leaf_function(const LeafFunction& f, const std::string& path);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace mfilt

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rtower::mumford {

// Branch labels: 0..4 are alpha_1..alpha_5, 5 is infinity.
constexpr int kLabels = 6;
constexpr int kInfinity = 5;

using Mask = std::uint8_t;

/**
 * e_U for an even subset U of the branch set, stored as its canonical
 * representative (|U| in {0, 2}). `branch` tags which branch set the element
 * belongs to; mixing tags is an error.
 */
class TwoTorsion {
public:
    TwoTorsion() = default;
    /// Throws std::invalid_argument for odd subsets or labels out of range.
    explicit TwoTorsion(Mask subset, int branch = 0);
    static TwoTorsion of(std::initializer_list<int> labels, int branch = 0);

    Mask mask() const { return mask_; }
    int branch() const { return branch_; }
    bool is_zero() const { return mask_ == 0; }
    /// Sorted labels of the canonical representative.
    std::vector<int> labels() const;

    friend bool operator==(const TwoTorsion& a, const TwoTorsion& b) {
        return a.mask_ == b.mask_ && a.branch_ == b.branch_;
    }
    friend bool operator<(const TwoTorsion& a, const TwoTorsion& b) { return a.mask_ < b.mask_; }

private:
    Mask mask_ = 0;
    int branch_ = 0;
};

/// e_U + e_V = e_{U delta V}. Throws context_mismatch for different branch sets.
TwoTorsion operator+(const TwoTorsion& a, const TwoTorsion& b);

/// (-1)^{|U cap V|} on canonical representatives.
int pairing(const TwoTorsion& a, const TwoTorsion& b);

/// All 16 elements, zero first.
std::vector<TwoTorsion> all_elements(int branch = 0);

using Subgroup = std::array<TwoTorsion, 4>;  // sorted, zero first

/// Closure of the given elements; throws std::invalid_argument if it is not of order 4.
Subgroup span(const TwoTorsion& a, const TwoTorsion& b);
bool is_isotropic(const Subgroup& s);

/// A partition of the six labels into three pairs, canonically sorted.
using LabelTriple = std::array<std::array<int, 2>, 3>;
LabelTriple canonical(LabelTriple t);
std::vector<LabelTriple> label_classes();

/// {e_0, e_R1, e_R2, e_R3}.
Subgroup subgroup_of(const LabelTriple& t, int branch = 0);
/// Inverse of subgroup_of on maximal isotropic subgroups.
LabelTriple class_of(const Subgroup& s);

/// The 15 maximal isotropic subgroups, ordered like label_classes().
std::vector<Subgroup> maximal_isotropics(int branch = 0);

/// sigma[i] is the image of label i.
using Permutation = std::array<int, kLabels>;
Permutation identity_permutation();
TwoTorsion permute(const Permutation& sigma, const TwoTorsion& x);
LabelTriple permute(const Permutation& sigma, const LabelTriple& t);
Subgroup permute(const Permutation& sigma, const Subgroup& s);

std::string label_name(int label);

}  // namespace rtower::mumford

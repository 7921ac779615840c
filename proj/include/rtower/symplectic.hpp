#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rtower {

using Vec4 = Eigen::Matrix<int, 4, 1>;
using Mat4 = Eigen::Matrix<int, 4, 4>;

/// Gram matrix of <x, y> = x1 y3 - x3 y1 + x2 y4 - x4 y2.
Mat4 symplectic_gram();

inline int modulus(int level) { return 1 << level; }
Vec4 reduce(const Vec4& x, int level);

/// <x, y> mod 2^level, in [0, 2^level).
int symp_form(const Vec4& x, const Vec4& y, int level);

/// A^T Omega A = Omega mod 2^level.
bool is_symplectic(const Mat4& a, int level);

/**
 * Subgroup of (Z/2^n)^4 kept in Howell normal form: rows ordered by pivot
 * column, pivots equal to 2^v, entries above a pivot reduced below it, and
 * the span of rows with pivot >= c equal to the elements vanishing before c.
 * Equal subgroups have identical bases.
 */
class Subgroup {
public:
    /// The zero subgroup at `level`.
    explicit Subgroup(int level = 0) : level_(level) {}
    Subgroup(int level, const std::vector<Vec4>& generators);

    int level() const { return level_; }
    const std::vector<Vec4>& basis() const { return rows_; }
    /// log2 of the order.
    int log2_order() const;
    std::uint64_t order() const { return std::uint64_t{1} << log2_order(); }

    bool contains(const Vec4& x) const;
    bool contains(const Subgroup& other) const;
    bool is_isotropic() const;
    bool is_maximal_isotropic() const { return is_isotropic() && log2_order() == 2 * level_; }
    /// Contains the whole 2-torsion 2^{n-1} (Z/2^n)^4.
    bool contains_two_torsion() const;
    /// Every element is divisible by 2.
    bool is_even() const;

    std::vector<Vec4> elements() const;

    /// Image under x -> 2x in level n + 1.
    Subgroup embedded() const;
    /// Reduction mod 2^{n-1}.
    Subgroup reduced() const;
    /// x -> x / 2 into level n - 1; requires is_even().
    Subgroup halved() const;
    /// Image under A (taken mod 2^n).
    Subgroup transformed(const Mat4& a) const;
    Subgroup joined(const std::vector<Vec4>& extra) const;

    std::string key() const;

    friend bool operator==(const Subgroup& a, const Subgroup& b) {
        return a.level_ == b.level_ && a.rows_ == b.rows_;
    }
    friend bool operator!=(const Subgroup& a, const Subgroup& b) { return !(a == b); }
    friend bool operator<(const Subgroup& a, const Subgroup& b) { return a.key() < b.key(); }

private:
    int level_ = 0;
    std::vector<Vec4> rows_;
    std::vector<int> pivot_col_;
    std::vector<int> pivot_val_;  // 2-adic valuation of the pivot
};

/// Vertex of S: a maximal isotropic subgroup at level m not containing J[2]; m = 0 is v0.
struct SVertex {
    Subgroup n;

    int m() const { return n.level(); }
    bool is_root() const { return n.level() == 0; }
    friend bool operator==(const SVertex& a, const SVertex& b) { return a.n == b.n; }
    friend bool operator!=(const SVertex& a, const SVertex& b) { return !(a == b); }
    friend bool operator<(const SVertex& a, const SVertex& b) { return a.n < b.n; }
};

SVertex root_vertex();

/// Lagrangian N' at some level, brought to its vertex: rescaled until it
/// neither contains J[2] nor is divisible by 2.
SVertex vertex_of(Subgroup lagrangian);

/// The 15 vertices adjacent to v in S, sorted by key.
std::vector<SVertex> neighbors(const SVertex& v);

/// Neighbors minus the vertex we arrived from.
std::vector<SVertex> children(const SVertex& v, const SVertex* came_from);

/// Non-backtracking path v0, v1, ..., vn in S: a vertex of the covering tree T.
struct TPath {
    std::vector<SVertex> vertices;

    int length() const { return static_cast<int>(vertices.size()) - 1; }
    const SVertex& last() const { return vertices.back(); }
    TPath parent() const;
};

/// Paths of length exactly `length`, in lexicographic order of vertex keys.
std::vector<TPath> paths_of_length(int length);
/// All extensions of p by one step.
std::vector<TPath> extensions(const TPath& p);

/// Adjacent in S, non-backtracking, starting at v0.
bool is_valid_path(const TPath& p);

/// N_w at level n = length: <2^k g_j, 2^{n-k} e_i> with k = (n - m)/2.
Subgroup path_subgroup(const TPath& p);

struct PairingCheck {
    bool pass = true;
    std::string counterexample;
    int cosets = 0;
};

using LevelPairing = std::function<int(const Vec4&, const Vec4&)>;

/**
 * For a Lagrangian N at level 1: J' = J/N has J'[2] = {P in J[4] : 2P in N} / N.
 * The pairing induced on it is <p, q> mod 4, which only takes the values
 * {0, 2} there (the squared level-2 pairing). It is checked exhaustively to be
 * well defined, alternating, bilinear and nondegenerate. `pairing` overrides
 * the default for negative controls.
 */
PairingCheck quotient_pairing_check(const Subgroup& lagrangian, const LevelPairing& pairing = {});

/// All 720 symplectic matrices mod 2.
std::vector<Mat4> symplectic_group_level1();

struct ScalarFixResult {
    std::vector<Mat4> fixers;  // sorted
    std::uint64_t group_order = 0;  // symplectic matrices examined (exhaustive) or sampled
    int subgroups = 0;              // distinct N_w checked
    bool exhaustive = true;
};

/// Symplectic matrices at `level` fixing every N_w with |w| <= level.
ScalarFixResult scalar_fix_exhaustive(int level);
/// Level 2, random symplectic matrices; the fixers found plus +-I.
ScalarFixResult scalar_fix_sampled(int level, std::uint64_t samples, std::uint64_t seed);

/// Every distinct N_w with |w| <= depth.
std::vector<Subgroup> tree_subgroups(int depth);

std::string to_string(const Vec4& v);
std::string to_string(const Mat4& a);

}  // namespace rtower

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtower/splitting.hpp"

namespace rtower {

struct SpecializationReport {
    bool pass = false;
    bool squarefree = false;
    int rank = 0;  // F2-rank of the ten square classes of a_ij = alpha_i - alpha_j
    bool sign_independent = false;  // -1 is not in their span
    std::string message;
};

/// Genericity gate for five rational branch values: distinct, the ten
/// differences independent in Q*/Q*^2, and -1 outside their span.
SpecializationReport validate_specialization(const std::vector<Rational>& alphas);

/// The curve y^2 = prod (x - alpha_i) with branch set {alpha_i} + {infinity}.
Curve root_curve(const std::vector<Rational>& alphas);

struct DecoratedVertex {
    int id = 0;
    int parent = -1;  // -1 for the root
    int depth = 0;
    std::optional<SplittingClass> cls;  // Psi(w); absent at the root
    Mat3 matrix;                        // M(Psi(w)), entries in `context`
    Element det_g;                      // det M(Psi(w))
    std::optional<Curve> curve;         // C_w: the Richelot image along Psi(w); absent on unexpanded leaves
    std::optional<SplittingClass> image;  // Ri(Psi(w)), support = branch set of C_w
    TowerContext context;               // where the entries of Psi(w) live
    TowerContext curve_context;         // where C_w and Ri(Psi(w)) live
    std::vector<int> children;
};

struct RadicandRecord {
    Element radicand;
    int source_vertex = 0;
    int field_level = 0;  // first n with the root in K'_n
};

struct DecoratedTree {
    std::vector<Rational> alphas;
    int depth = 0;
    std::vector<DecoratedVertex> vertices;  // breadth first, siblings in class-key order
    std::vector<RadicandRecord> radicands;  // in vertex order

    const DecoratedVertex& root() const { return vertices.front(); }
    /// Number of vertices at depth d.
    int count_at(int d) const;
};

struct BuildOptions {
    int cap = 3;
    int threads = 1;
    // Also compute C_w at the deepest level. Off by default: those curves are
    // only needed to expand one level further, and their towers are the tallest.
    bool leaf_curves = false;
};

/// Throws resource_limit when depth > cap and split_jacobian naming the vertex when det(G) = 0.
DecoratedTree build_tree(const std::vector<Rational>& alphas, int depth, const BuildOptions& opts = {});

struct ClauseReport {
    std::string clause;
    bool pass = true;
    int checked = 0;
    std::string counterexample;
};

struct DecorationReport {
    std::vector<ClauseReport> clauses;  // shape, a, b, c
    bool pass() const;
};

/**
 * Re-checks a tree from scratch: shape (15 children at the root, 14 below),
 * distinct siblings, depth-1 supports equal to the root branch set, and for
 * deeper vertices |Psi(u)| = |Ri(Psi(w))| with Psi(u) != Ri(Psi(w)). Ri is
 * recomputed from the parent's class, not read from the tree.
 */
DecorationReport validate_decoration(const DecoratedTree& tree);

/// Distinct entries of M(Psi(w)) over vertices of depth 1..n.
std::vector<Element> field_generators(const DecoratedTree& tree, int n);

/**
 * K'_n as one reduced tower: the radicands with field_level <= n adjoined in
 * record order, skipping squares. Only n <= 2 is supported, where every such
 * radicand is rational and the merge does not depend on sign choices.
 */
TowerContext merged_tower(const DecoratedTree& tree, int n);

struct CheckResult {
    std::string name;
    bool pass = true;
    int count = 0;
    std::string detail;
};

/// Branch set of Ri([{a1,a2},{a3,a4},{a5,inf}]) against its closed forms,
/// (-a1 a2 + a3 a4 +- sqrt((a1-a3)(a1-a4)(a2-a3)(a2-a4))) / (-a1 - a2 + a3 + a4),
/// a5 +- sqrt((a1-a5)(a2-a5)) and a5 +- sqrt((a3-a5)(a4-a5)), all inside ctx.
CheckResult closed_form_check(const std::vector<Rational>& alphas, const std::vector<ProjPoint>& branch,
                              const TowerContext& ctx);

/// Closed forms, two-way inclusion with Q(sqrt(a_ij a_lm)) over ordered index
/// pairs (which contains sqrt(-1)), and sqrt(a_ij) not in K'_2.
std::vector<CheckResult> verify_k2prime(const DecoratedTree& tree);

/// Depth-1 classes against the maximal isotropic subgroups of the e_U model.
CheckResult mumford_bridge(const DecoratedTree& tree);

}  // namespace rtower

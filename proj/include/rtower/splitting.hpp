#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rtower/qpoly.hpp"

namespace Eigen {

template <>
struct NumTraits<rtower::Element> : GenericNumTraits<rtower::Element> {
    using Real = rtower::Element;
    using NonInteger = rtower::Element;
    using Literal = rtower::Element;
    using Nested = rtower::Element;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 16,
        MulCost = 64,
    };
    // Exact arithmetic: printing uses the canonical text, not a precision.
    static constexpr int digits10() { return 0; }
};

}  // namespace Eigen

namespace rtower {

template <class Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
using Mat3 = Matrix3<Element>;

/// Adjugate by cofactors; defined for singular matrices too.
template <class Derived>
Matrix3<typename Derived::Scalar> adjugate(const Eigen::MatrixBase<Derived>& a) {
    static_assert(Derived::RowsAtCompileTime == 3 && Derived::ColsAtCompileTime == 3);
    Matrix3<typename Derived::Scalar> adj;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int j1 = (j + 1) % 3, j2 = (j + 2) % 3, i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            adj(i, j) = a(j1, i1) * a(j2, i2) - a(j1, i2) * a(j2, i1);
        }
    return adj;
}

template <class Derived>
typename Derived::Scalar det3(const Eigen::MatrixBase<Derived>& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/**
 * A^v = ([[0,0,1],[0,-2,0],[1,0,0]] adj(A))^T, i.e. the cofactor matrix times
 * that permutation. Transposed so that row i holds the coefficients of the
 * i-th bracket polynomial: then H = G^v for the Richelot splitting.
 */
template <class Derived>
Matrix3<typename Derived::Scalar> dual_matrix(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    Matrix3<Scalar> j;
    j << Scalar(0), Scalar(0), Scalar(1), Scalar(0), Scalar(-2), Scalar(0), Scalar(1), Scalar(0), Scalar(0);
    return (j * adjugate(a)).transpose();
}

using Pair = std::array<ProjPoint, 2>;

/// Three pairwise disjoint unordered pairs of points of P^1.
class PairTriple {
public:
    /// Throws degenerate_input unless the six points are distinct.
    explicit PairTriple(std::array<Pair, 3> pairs);

    const Pair& operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
    const std::array<Pair, 3>& pairs() const { return p_; }
    /// |R|: the six points.
    std::vector<ProjPoint> support() const;

    /// Pairs sorted internally and among themselves by serialized normal form.
    PairTriple canonical() const;

    friend bool operator==(const PairTriple& a, const PairTriple& b) { return a.p_ == b.p_; }

private:
    std::array<Pair, 3> p_;
};

/// Permutation-equivalence class, stored as its canonical triple.
class SplittingClass {
public:
    explicit SplittingClass(const PairTriple& t) : t_(t.canonical()) {}

    const PairTriple& triple() const { return t_; }
    std::vector<ProjPoint> support() const { return t_.support(); }
    /// Serialized canonical triple; equal keys within one tower iff equal classes.
    std::string key() const;

    friend bool operator==(const SplittingClass& a, const SplittingClass& b) { return a.t_ == b.t_; }
    friend bool operator!=(const SplittingClass& a, const SplittingClass& b) { return !(a == b); }

private:
    PairTriple t_;
};

/// Points sorted by serialized normal form.
std::vector<ProjPoint> sorted_points(std::vector<ProjPoint> pts);

/// The 15 classes with support B, sorted by key. B: six distinct points.
std::vector<SplittingClass> enumerate_classes(const std::vector<ProjPoint>& branch);

/// Row i = (r r', -(r + r'), 1), or (-r, 1, 0) when the pair holds infinity.
Mat3 matrix_m(const PairTriple& t);

struct TripleInField {
    PairTriple triple;
    TowerContext context;
};

/// N: roots of the row polynomials A_i1 + A_i2 x + A_i3 x^2. Throws degenerate_input outside U.
TripleInField map_n(const Mat3& a, const TowerContext& ctx);

struct ClassInField {
    SplittingClass cls;
    TowerContext context;
};

/// Ri(R) = N(M(R)^v).
ClassInField richelot_class(const SplittingClass& r, const TowerContext& ctx);

/// [G1, G2] = G1 G2' - G2 G1'.
Poly bracket(const Poly& g1, const Poly& g2);

/// f = G1 G2 G3 with G_i(x) = G_i1 + G_i2 x + G_i3 x^2.
class QuadraticSplitting {
public:
    explicit QuadraticSplitting(std::array<Poly, 3> g);
    explicit QuadraticSplitting(const Mat3& rows);
    static QuadraticSplitting from_class(const SplittingClass& r) { return QuadraticSplitting(matrix_m(r.triple())); }

    const Poly& operator[](int i) const { return g_[static_cast<std::size_t>(i)]; }
    const Mat3& matrix() const { return m_; }
    Poly product() const { return g_[0] * g_[1] * g_[2]; }
    Element det() const { return det3(m_); }

    /// Degrees 1 or 2, at most one linear, product squarefree of degree 5 or 6.
    bool is_valid() const;

private:
    std::array<Poly, 3> g_;
    Mat3 m_;
};

/// H_i = [G_{i+1}, G_{i+2}]; the matrix of the result is G^v.
QuadraticSplitting richelot_splitting(const QuadraticSplitting& s);

/// y^2 = D f(x) with branch set B (roots of f, plus infinity when deg f = 5).
struct Curve {
    Element d{1};
    Poly f;
    std::vector<ProjPoint> branch;
};

/// y^2 = f(x) for monic f with the given five or six affine roots.
Curve curve_from_roots(const std::vector<Element>& roots);

/// Checks deg f in {5, 6} and that B is six distinct points: the roots of f (+ infinity).
/// Squarefreeness follows.
bool is_consistent(const Curve& c);

struct CurveInField {
    Curve curve;
    TowerContext context;
    PairTriple image;  // N(H) = Ri(R_G), whose support is the new branch set
};

/**
 * The Richelot-isogenous curve y^2 = det(G)^-1 D' H1 H2 H3, where D' absorbs
 * the ratio of leading coefficients between f and G1 G2 G3. Throws
 * split_jacobian when det(G) = 0 and degenerate_input when G does not split f.
 */
CurveInField richelot_curve(const Curve& c, const QuadraticSplitting& s, const TowerContext& ctx);

struct AffinePoint {
    Element x, y;
};

struct PushforwardResult {
    std::array<AffinePoint, 2> points;
    TowerContext context;
};

/**
 * Images on the Richelot curve of (x0, y0) - (alpha, 0): z1, z2 are the roots
 * of G2(x0) H2(z) + G3(x0) H3(z), and t_i = D' sqrt(-1) G2(x0) H2(z_i) (x0 - z_i) / y0.
 * Each point is checked to lie on the image curve.
 */
PushforwardResult pushforward_point(const Curve& c, const QuadraticSplitting& s, const Element& x0,
                                    const Element& y0, const TowerContext& ctx);

std::string to_string(const PairTriple& t);

}  // namespace rtower

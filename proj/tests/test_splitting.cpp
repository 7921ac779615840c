#include "doctest.h"

#include <random>

#include "rtower/splitting.hpp"

using namespace rtower;

namespace {

const std::vector<long> kAlphas{0, 2, 13, 19, 23};

std::vector<ProjPoint> default_branch() {
    std::vector<ProjPoint> b;
    for (long a : kAlphas) b.emplace_back(a);
    b.push_back(ProjPoint::infinity());
    return b;
}

Curve default_curve() {
    std::vector<Element> roots;
    for (long a : kAlphas) roots.emplace_back(a);
    return curve_from_roots(roots);
}

Mat3 ints(std::initializer_list<long> v) {
    Mat3 m;
    auto it = v.begin();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = Element(*it++);
    return m;
}

bool same_points(std::vector<ProjPoint> a, std::vector<ProjPoint> b) {
    if (a.size() != b.size()) return false;
    for (const ProjPoint& p : a) {
        auto it = std::find(b.begin(), b.end(), p);
        if (it == b.end()) return false;
        b.erase(it);
    }
    return true;
}

PairTriple sample_triple() {
    return PairTriple({Pair{ProjPoint(0), ProjPoint(1)}, Pair{ProjPoint(2), ProjPoint(3)},
                       Pair{ProjPoint(5), ProjPoint::infinity()}});
}

}  // namespace

TEST_CASE("enumerate_classes") {
    std::vector<ProjPoint> b{ProjPoint(0), ProjPoint(1), ProjPoint(2), ProjPoint(3), ProjPoint(5),
                             ProjPoint::infinity()};
    auto classes = enumerate_classes(b);
    CHECK(classes.size() == 15);
    int with01 = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        CHECK(same_points(classes[i].support(), b));
        for (std::size_t j = 0; j < i; ++j) CHECK(classes[i] != classes[j]);
        for (const Pair& p : classes[i].triple().pairs())
            with01 += same_points({p[0], p[1]}, {ProjPoint(0), ProjPoint(1)});
    }
    CHECK(with01 == 3);
    // Order does not depend on the order of the input.
    std::vector<ProjPoint> shuffled(b.rbegin(), b.rend());
    auto again = enumerate_classes(shuffled);
    for (std::size_t i = 0; i < classes.size(); ++i) CHECK(again[i].key() == classes[i].key());

    CHECK_THROWS_AS(enumerate_classes({ProjPoint(0), ProjPoint(1)}), degenerate_input);
    CHECK_THROWS_AS(enumerate_classes({ProjPoint(0), ProjPoint(1), ProjPoint(2), ProjPoint(3), ProjPoint(3),
                                       ProjPoint::infinity()}),
                    degenerate_input);
}

TEST_CASE("permutation-equivalent triples share a class") {
    PairTriple t = sample_triple();
    PairTriple u({Pair{ProjPoint::infinity(), ProjPoint(5)}, Pair{ProjPoint(1), ProjPoint(0)},
                  Pair{ProjPoint(3), ProjPoint(2)}});
    CHECK(SplittingClass(t) == SplittingClass(u));
    CHECK_THROWS_AS(PairTriple({Pair{ProjPoint(0), ProjPoint(0)}, Pair{ProjPoint(2), ProjPoint(3)},
                                Pair{ProjPoint(5), ProjPoint::infinity()}}),
                    degenerate_input);
}

TEST_CASE("matrix_m and map_n") {
    Mat3 m = matrix_m(sample_triple());
    CHECK(m == ints({0, -1, 1, 6, -5, 1, -5, 1, 0}));
    TripleInField n = map_n(m, TowerContext());
    CHECK(SplittingClass(n.triple) == SplittingClass(sample_triple()));
    CHECK(n.context.height() == 0);

    Mat3 a = ints({-2, 0, 1, 6, -5, 1, -5, 1, 0});
    TripleInField r = map_n(a, TowerContext());
    CHECK(r.context.height() == 1);
    const Pair& p = r.triple[0];
    CHECK(p[0].value() * p[0].value() == Element(2));
    CHECK(p[1].value() == -p[0].value());

    CHECK_THROWS_AS(map_n(ints({0, -1, 1, 6, 1, 0, -5, 1, 0}), TowerContext()), degenerate_input);
    CHECK_THROWS_AS(map_n(ints({1, 2, 1, 6, -5, 1, -5, 1, 0}), TowerContext()), degenerate_input);
    CHECK_THROWS_AS(map_n(ints({0, 0, 0, 6, -5, 1, -5, 1, 0}), TowerContext()), degenerate_input);
}

TEST_CASE("N after M is the identity") {
    for (const SplittingClass& c : enumerate_classes(default_branch())) {
        TripleInField n = map_n(matrix_m(c.triple()), TowerContext());
        CHECK(SplittingClass(n.triple) == c);
    }
}

TEST_CASE("dual_matrix") {
    Mat3 j = ints({0, 0, 1, 0, -2, 0, 1, 0, 0});
    CHECK(dual_matrix(Mat3::Identity()) == j);
    // Same template over machine integers: adj(A) A = det(A) I.
    Matrix3<long long> a;
    a << 2, -1, 4, 0, 3, 5, -2, 1, 1;
    CHECK(adjugate(a) * a == det3(a) * Matrix3<long long>::Identity());

    std::mt19937_64 rng(31);
    std::uniform_int_distribution<long> pick(-9, 9);
    for (int trial = 0; trial < 150; ++trial) {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) m(i, k) = Element(pick(rng));
        CHECK(det3(dual_matrix(m)) == Element(2) * det3(m) * det3(m));
    }
    // Singular matrices still have a dual.
    CHECK(dual_matrix(ints({1, 2, 3, 2, 4, 6, 0, 0, 1})) != Mat3::Zero());
}

TEST_CASE("duals of the fifteen splittings lie in U") {
    for (const SplittingClass& c : enumerate_classes(default_branch())) {
        TripleInField n = map_n(dual_matrix(matrix_m(c.triple())), TowerContext());
        CHECK(n.triple.support().size() == 6);
    }
}

TEST_CASE("bracket") {
    CHECK(bracket(Poly::x(), Poly::x() * Poly::x()) == Poly::x() * Poly::x());
}

TEST_CASE("Richelot splitting equals the dual matrix") {
    for (const SplittingClass& c : enumerate_classes(default_branch())) {
        QuadraticSplitting g = QuadraticSplitting::from_class(c);
        CHECK(g.is_valid());
        QuadraticSplitting h = richelot_splitting(g);
        CHECK(h.matrix() == dual_matrix(g.matrix()));
        CHECK(h.det() == Element(2) * g.det() * g.det());
    }
}

TEST_CASE("richelot_class closed forms") {
    const Element a1(0), a2(2), a3(13), a4(19), a5(23);
    PairTriple t({Pair{ProjPoint(a1), ProjPoint(a2)}, Pair{ProjPoint(a3), ProjPoint(a4)},
                  Pair{ProjPoint(a5), ProjPoint::infinity()}});
    ClassInField ri = richelot_class(SplittingClass(t), TowerContext());
    auto root_in = [&](const Element& x) {
        AdjoinResult r = adjoin_sqrt(x, ri.context);
        REQUIRE_FALSE(r.extended);
        return r.root;
    };
    const Element s1 = root_in((a1 - a3) * (a1 - a4) * (a2 - a3) * (a2 - a4));
    const Element s2 = root_in((a1 - a5) * (a2 - a5));
    const Element s3 = root_in((a3 - a5) * (a4 - a5));
    const Element den = -a1 - a2 + a3 + a4;
    const Element c = -a1 * a2 + a3 * a4;
    std::vector<ProjPoint> expected{ProjPoint((c + s1) / den), ProjPoint((c - s1) / den), ProjPoint(a5 + s2),
                                    ProjPoint(a5 - s2), ProjPoint(a5 + s3), ProjPoint(a5 - s3)};
    CHECK(same_points(ri.cls.support(), expected));

    // Well defined on classes.
    PairTriple u({Pair{ProjPoint::infinity(), ProjPoint(a5)}, Pair{ProjPoint(a4), ProjPoint(a3)},
                  Pair{ProjPoint(a2), ProjPoint(a1)}});
    ClassInField ri2 = richelot_class(SplittingClass(u), TowerContext());
    CHECK(ri2.cls.key() == ri.cls.key());
}

TEST_CASE("richelot_curve") {
    Curve c = default_curve();
    REQUIRE(is_consistent(c));
    for (const SplittingClass& r : enumerate_classes(c.branch)) {
        QuadraticSplitting g = QuadraticSplitting::from_class(r);
        CurveInField out = richelot_curve(c, g, TowerContext());
        CHECK(is_consistent(out.curve));
        CHECK(is_squarefree(out.curve.f));
        ClassInField ri = richelot_class(r, TowerContext());
        CHECK(same_points(out.curve.branch, ri.cls.support()));
    }
    // det(G) = 0: rows dependent, product still the curve polynomial up to scaling is irrelevant.
    QuadraticSplitting singular(ints({1, 0, 1, 2, 0, 2, -5, 1, 0}));
    Curve fake;
    fake.f = singular.product();
    fake.branch = {};
    CHECK_THROWS_AS(richelot_curve(fake, singular, TowerContext()), split_jacobian);
}

TEST_CASE("pushforward lands on the Richelot curve") {
    Curve c = default_curve();
    // y0^2 = f(x0) needs a square: adjoin it.
    const Element x0(5);
    AdjoinResult y = adjoin_sqrt(c.f(x0));
    int checked = 0;
    for (const SplittingClass& r : enumerate_classes(c.branch)) {
        QuadraticSplitting g = QuadraticSplitting::from_class(r);
        CurveInField img = richelot_curve(c, g, y.context);
        PushforwardResult p = pushforward_point(c, g, x0, y.root, img.context);
        for (const AffinePoint& q : p.points) {
            CHECK(q.y * q.y == img.curve.d * img.curve.f(q.x));
            ++checked;
        }
    }
    CHECK(checked == 30);
}

TEST_CASE("the unscaled formula lands on the quadratic twist") {
    // t = det(G)^-1 G2(x0) H2(z) (x0 - z) / y0 satisfies -det^2 t^2 = det^-1 H1 H2 H3 (z) on y^2 = f.
    Curve c = default_curve();
    const SplittingClass r = enumerate_classes(c.branch).front();
    QuadraticSplitting g = QuadraticSplitting::from_class(r);
    QuadraticSplitting h = richelot_splitting(g);
    const Element x0(5);
    AdjoinResult y = adjoin_sqrt(c.f(x0));
    const Poly q = scale(h[1], g[1](x0)) + scale(h[2], g[2](x0));
    QuadRoots z = quad_roots(q, y.context);
    const Element det = g.det();
    for (const ProjPoint& zp : {z.first, z.second}) {
        const Element& zi = zp.value();
        const Element t = g[1](x0) * h[1](zi) * (x0 - zi) / (y.root * det);
        const Element rhs = h.product()(zi) / det;
        CHECK(-(det * det) * t * t == rhs);
        CHECK(t * t != rhs);
    }
}

TEST_CASE("pushforward preconditions") {
    Curve c = default_curve();
    QuadraticSplitting g = QuadraticSplitting::from_class(enumerate_classes(c.branch).front());
    CHECK_THROWS_AS(pushforward_point(c, g, Element(0), Element(0), TowerContext()), degenerate_input);
    CHECK_THROWS_AS(pushforward_point(c, g, Element(5), Element(1), TowerContext()), degenerate_input);
}

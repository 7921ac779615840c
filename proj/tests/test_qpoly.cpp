#include "doctest.h"
#include "generators.hpp"

#include "rtower/qpoly.hpp"

using namespace rtower;

namespace {

Poly from_ints(std::initializer_list<long> cs) {
    std::vector<Element> c;
    for (long v : cs) c.emplace_back(v);
    return Poly(std::move(c));
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
    CHECK(derivative(from_ints({0, 3, 1})) == from_ints({3, 2}));
    CHECK(derivative(from_ints({7})).is_zero());
    CHECK(from_ints({-1, 1}) * from_ints({1, 1}) == from_ints({-1, 0, 1}));
    CHECK(scale(from_ints({-1, 0, 1}), Element(0)).is_zero());
    CHECK(Poly().degree() == -1);
    CHECK(from_ints({1, 2, 0, 0}).degree() == 1);
    CHECK(from_ints({1, 2, 3})(Element(2)) == Element(17));
}

TEST_CASE("division with remainder") {
    std::mt19937_64 rng(8);
    TowerContext ctx = rtower::testing::sample_tower();
    for (int i = 0; i < 20; ++i) {
        std::vector<Element> fc, gc;
        for (int k = 0; k < 6; ++k) fc.push_back(rtower::testing::random_element(rng, ctx, 4));
        for (int k = 0; k < 3; ++k) gc.push_back(rtower::testing::random_element(rng, ctx, 4));
        gc.push_back(rtower::testing::random_nonzero(rng, ctx, 4));
        Poly f(fc), g(gc);
        auto [q, r] = divmod(f, g);
        CHECK(q * g + r == f);
        CHECK(r.degree() < g.degree());
    }
    CHECK_THROWS_AS(divmod(from_ints({1}), Poly()), division_by_zero);
}

TEST_CASE("is_squarefree") {
    CHECK(is_squarefree(from_ints({-1, 0, 1})));
    CHECK_FALSE(is_squarefree(from_ints({0, 0, 1})));
    Poly sq = from_ints({-1, 1}) * from_ints({-1, 1}) * from_ints({-2, 1});
    CHECK_FALSE(is_squarefree(sq));
    CHECK(is_squarefree(from_ints({5})));
    CHECK_THROWS_AS(is_squarefree(Poly()), degenerate_input);
}

TEST_CASE("gcd detects repeated roots on products of linear factors") {
    // Oracle: the product of (x - r_i) has a repeated root iff two r_i coincide.
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> pick(-4, 4);
    TowerContext f2 = adjoin_sqrt(Element(2)).context;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Element> roots;
        for (int k = 0; k < 4; ++k) roots.push_back(Element(pick(rng)) + Element(pick(rng) % 2) * f2.generator(1));
        Poly p = Poly::constant(Element(1));
        for (const Element& r : roots) p = p * Poly::linear(r);
        bool distinct = true;
        for (std::size_t i = 0; i < roots.size(); ++i)
            for (std::size_t j = i + 1; j < roots.size(); ++j) distinct = distinct && roots[i] != roots[j];
        CHECK(is_squarefree(p) == distinct);
    }
}

TEST_CASE("quad_roots") {
    SUBCASE("rational roots") {
        QuadRoots r = quad_roots(from_ints({2, -3, 1}));
        CHECK_FALSE(r.extended);
        CHECK(r.context.height() == 0);
        CHECK(r.first == ProjPoint(2));
        CHECK(r.second == ProjPoint(1));
    }
    SUBCASE("x^2 - 2 extends the tower") {
        QuadRoots r = quad_roots(from_ints({-2, 0, 1}));
        CHECK(r.extended);
        CHECK(r.context.height() == 1);
        CHECK(r.first.value() * r.first.value() == Element(2));
        CHECK(r.second.value() == -r.first.value());
    }
    SUBCASE("repeated root") {
        CHECK_THROWS_AS(quad_roots(from_ints({1, 2, 1})), degenerate_input);
        CHECK_THROWS_AS(quad_roots(from_ints({1, 2})), degenerate_input);
    }
    SUBCASE("re-expansion matches the monic normalization") {
        std::mt19937_64 rng(4);
        TowerContext ctx = adjoin_sqrt(Element(2)).context;
        for (int i = 0; i < 25; ++i) {
            Poly f({rtower::testing::random_element(rng, ctx, 6), rtower::testing::random_element(rng, ctx, 6),
                    rtower::testing::random_nonzero(rng, ctx, 6)});
            if (!is_squarefree(f)) continue;
            QuadRoots r = quad_roots(f, ctx);
            Poly back = Poly::linear(r.first.value()) * Poly::linear(r.second.value());
            CHECK(back == monic(f));
        }
    }
}

TEST_CASE("text forms") {
    CHECK(to_string(from_ints({-1, 0, 1})) == "-1/1 + 0/1*x + 1/1*x^2");
    CHECK(to_string(Poly()) == "0/1");
    CHECK(to_string(ProjPoint::infinity()) == "inf");
    TowerContext ctx;
    CHECK(parse_point("inf", ctx).is_infinity());
    CHECK(parse_point("7/3", ctx) == ProjPoint(Element(7, 3)));
}

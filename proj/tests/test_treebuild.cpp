#include <doctest.h>

#include <thread>

#include "rtower/treebuild.hpp"

using namespace rtower;

namespace {

std::vector<Rational> qs(std::initializer_list<long> v) {
    std::vector<Rational> out;
    for (long x : v) out.emplace_back(x);
    return out;
}

const std::vector<Rational> kDefault = qs({0, 2, 19, 33, 39});

const DecoratedTree& depth2() {
    BuildOptions opts;
    opts.leaf_curves = true;
    static const DecoratedTree tree = build_tree(kDefault, 2, opts);
    return tree;
}

const ClauseReport& clause(const DecorationReport& r, const std::string& name) {
    for (const ClauseReport& c : r.clauses)
        if (c.clause == name) return c;
    throw std::runtime_error("no clause " + name);
}

}  // namespace

TEST_CASE("validate_specialization") {
    SpecializationReport ok = validate_specialization(kDefault);
    CHECK(ok.pass);
    CHECK(ok.rank == 10);
    CHECK(ok.sign_independent);

    // Rank 10, but 19 - 23 = -4 puts -1 in the span, and sqrt(-1) lies in K'_2.
    SpecializationReport minus_four = validate_specialization(qs({0, 2, 13, 19, 23}));
    CHECK(minus_four.rank == 10);
    CHECK_FALSE(minus_four.sign_independent);
    CHECK_FALSE(minus_four.pass);

    SpecializationReport consecutive = validate_specialization(qs({0, 1, 2, 3, 4}));
    CHECK_FALSE(consecutive.pass);
    CHECK(consecutive.rank < 10);

    SpecializationReport repeated = validate_specialization(qs({0, 1, 1, 3, 4}));
    CHECK_FALSE(repeated.pass);
    CHECK_FALSE(repeated.squarefree);

    // Rational inputs reduce to the class of p*q.
    std::vector<Rational> scaled;
    for (const Rational& a : kDefault) scaled.push_back(a / 4);
    CHECK(validate_specialization(scaled).rank == 10);
    CHECK_THROWS_AS(validate_specialization(qs({1, 2, 3})), degenerate_input);
}

TEST_CASE("specialization oracle: first passing small vector") {
    // Exhaustive over 0 = a1 < a2 < ... < a5 <= 39: the default is the first in lexicographic order.
    std::vector<long> first;
    for (long b = 1; b <= 39 && first.empty(); ++b)
        for (long c = b + 1; c <= 39 && first.empty(); ++c)
            for (long d = c + 1; d <= 39 && first.empty(); ++d)
                for (long e = d + 1; e <= 39 && first.empty(); ++e)
                    if (validate_specialization(qs({0, b, c, d, e})).pass) first = {0, b, c, d, e};
    CHECK(first == std::vector<long>{0, 2, 19, 33, 39});
}

TEST_CASE("build_tree shape") {
    const DecoratedTree& t = depth2();
    CHECK(t.count_at(0) == 1);
    CHECK(t.count_at(1) == 15);
    CHECK(t.count_at(2) == 210);
    const std::vector<SplittingClass> classes = enumerate_classes(t.root().curve->branch);
    REQUIRE(t.root().children.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) CHECK(*t.vertices[static_cast<std::size_t>(t.root().children[i])].cls == classes[i]);
    for (const DecoratedVertex& v : t.vertices) {
        if (v.depth == 0) continue;
        CHECK(!v.det_g.is_zero());
        REQUIRE(v.curve);
        CHECK(is_consistent(*v.curve));
        // D bookkeeping: D_w = D_parent * lc(f_parent) / lc(prod G) / det(G).
        const DecoratedVertex& w = t.vertices[static_cast<std::size_t>(v.parent)];
        const Element lc = QuadraticSplitting(v.matrix).product().leading();
        CHECK(v.curve->d == w.curve->d * w.curve->f.leading() / lc / v.det_g);
    }
    CHECK_THROWS_AS(build_tree(kDefault, 4), resource_limit);
    const DecoratedTree bare = build_tree(kDefault, 1);
    CHECK_FALSE(bare.vertices[1].curve);
    CHECK(bare.radicands.empty());
}

TEST_CASE("build_tree is deterministic across thread counts") {
    BuildOptions opts;
    opts.threads = 4;
    opts.leaf_curves = true;
    const DecoratedTree par = build_tree(kDefault, 2, opts);
    const DecoratedTree& seq = depth2();
    REQUIRE(par.vertices.size() == seq.vertices.size());
    for (std::size_t i = 0; i < seq.vertices.size(); ++i) {
        if (i == 0) continue;
        CHECK(par.vertices[i].cls->key() == seq.vertices[i].cls->key());
        CHECK(to_string(par.vertices[i].curve->f) == to_string(seq.vertices[i].curve->f));
    }
    REQUIRE(par.radicands.size() == seq.radicands.size());
    for (std::size_t i = 0; i < seq.radicands.size(); ++i)
        CHECK(to_string(par.radicands[i].radicand) == to_string(seq.radicands[i].radicand));
}

TEST_CASE("validate_decoration and negative controls") {
    const DecoratedTree& t = depth2();
    DecorationReport ok = validate_decoration(t);
    CHECK(ok.pass());
    CHECK(clause(ok, "a").checked == 15 * 14 / 2 + 15 * 14 * 13 / 2);
    CHECK(clause(ok, "b").checked == 15);
    CHECK(clause(ok, "c").checked == 210);

    SUBCASE("equal siblings break clause a") {
        DecoratedTree bad = t;
        const DecoratedVertex& w = bad.vertices[1];
        bad.vertices[static_cast<std::size_t>(w.children[1])].cls = bad.vertices[static_cast<std::size_t>(w.children[0])].cls;
        DecorationReport r = validate_decoration(bad);
        CHECK_FALSE(clause(r, "a").pass);
        CHECK(clause(r, "b").pass);
        CHECK(clause(r, "c").pass);
    }
    SUBCASE("a child equal to Ri(parent) breaks clause c") {
        DecoratedTree bad = t;
        const DecoratedVertex& w = bad.vertices[3];
        bad.vertices[static_cast<std::size_t>(w.children[5])].cls = richelot_class(*w.cls, w.context).cls;
        DecorationReport r = validate_decoration(bad);
        CHECK(clause(r, "a").pass);
        CHECK_FALSE(clause(r, "c").pass);
    }
    SUBCASE("wrong depth-1 support breaks clause b") {
        DecoratedTree bad = t;
        const DecoratedVertex& w = bad.vertices[bad.vertices[1].children[0]];
        bad.vertices[1].cls = w.cls;
        CHECK_FALSE(clause(validate_decoration(bad), "b").pass);
    }
    SUBCASE("a missing child breaks the shape") {
        DecoratedTree bad = t;
        bad.vertices[2].children.pop_back();
        CHECK_FALSE(clause(validate_decoration(bad), "shape").pass);
    }
}

TEST_CASE("field_generators") {
    const DecoratedTree& t = depth2();
    CHECK(field_generators(t, 0).empty());
    const std::vector<Element> g1 = field_generators(t, 1);
    for (const Rational& a : kDefault) {
        CHECK(std::find(g1.begin(), g1.end(), Element(-a)) != g1.end());
    }
    for (const Element& g : g1) CHECK(g.is_rational());
    const TowerContext k2 = merged_tower(t, 2);
    for (const Element& g : field_generators(t, 2)) CHECK(embed(g, k2).has_value());
    CHECK_THROWS_AS(field_generators(t, 3), degenerate_input);
    CHECK(merged_tower(t, 1).height() == 0);
}

TEST_CASE("verify_k2prime") {
    const DecoratedTree& t = depth2();
    // Nine classes a_ij a_lm plus -1.
    CHECK(merged_tower(t, 2).height() == 10);
    for (const CheckResult& c : verify_k2prime(t)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
    const TowerContext k2 = merged_tower(t, 2);
    CHECK(is_square(Element((0 - 2) * (19 - 33)), k2));
    CHECK(is_square(Element(-1), k2));
    CHECK_FALSE(is_square(Element(0 - 2), k2));
}

TEST_CASE("mumford bridge") {
    CheckResult r = mumford_bridge(depth2());
    CHECK(r.pass);
    CHECK(r.count == 15);
}

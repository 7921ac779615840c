#include "doctest.h"

#include <algorithm>
#include <bit>
#include <random>

#include "rtower/errors.hpp"
#include "rtower/mumford.hpp"

using namespace rtower::mumford;

TEST_CASE("group law") {
    const TwoTorsion zero;
    const TwoTorsion e12 = TwoTorsion::of({0, 1});
    CHECK(zero + e12 == e12);
    CHECK((e12 + e12).is_zero());
    CHECK(e12 + TwoTorsion::of({2, 3}) == TwoTorsion::of({4, kInfinity}));
    CHECK(TwoTorsion::of({0, 1, 2, 3}) == TwoTorsion::of({4, 5}));
    CHECK(TwoTorsion::of({0, 1, 2, 3, 4, 5}).is_zero());
    CHECK_THROWS_AS(TwoTorsion::of({0, 1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(e12 + TwoTorsion::of({0, 1}, 1), rtower::context_mismatch);
    CHECK_THROWS_AS(pairing(e12, TwoTorsion::of({0, 1}, 1)), rtower::context_mismatch);
    CHECK(all_elements().size() == 16);
}

TEST_CASE("pairing") {
    CHECK(pairing(TwoTorsion::of({0, 1}), TwoTorsion::of({2, 3})) == 1);
    CHECK(pairing(TwoTorsion::of({0, 1}), TwoTorsion::of({0, 2})) == -1);
    const auto all = all_elements();
    for (const auto& x : all) {
        CHECK(pairing(x, x) == 1);
        for (const auto& y : all)
            for (const auto& z : all) CHECK(pairing(x + y, z) == pairing(x, z) * pairing(y, z));
    }
    // Nondegenerate: only e_0 pairs trivially with everything.
    int kernel = 0;
    for (const auto& x : all)
        kernel += std::all_of(all.begin(), all.end(), [&](const TwoTorsion& y) { return pairing(x, y) == 1; });
    CHECK(kernel == 1);
    // Isotropy criterion: distinct nonzero e_U, e_V are orthogonal iff U, V are disjoint.
    for (const auto& x : all)
        for (const auto& y : all) {
            if (x.is_zero() || y.is_zero() || x == y) continue;
            CHECK((pairing(x, y) == 1) == ((x.mask() & y.mask()) == 0));
        }
    // Well defined under complementation of representatives.
    for (const auto& x : all)
        for (const auto& y : all) {
            const int raw = std::popcount(static_cast<unsigned>((0x3F & ~x.mask()) & y.mask())) % 2 ? -1 : 1;
            CHECK(raw == pairing(x, y));
        }
}

TEST_CASE("maximal isotropic subgroups") {
    auto subs = maximal_isotropics();
    CHECK(subs.size() == 15);
    auto classes = label_classes();
    REQUIRE(classes.size() == 15);
    for (std::size_t i = 0; i < subs.size(); ++i) {
        CHECK(is_isotropic(subs[i]));
        CHECK(subs[i] == subgroup_of(classes[i]));
        CHECK(class_of(subs[i]) == classes[i]);
    }
    CHECK_FALSE(is_isotropic(span(TwoTorsion::of({0, 1}), TwoTorsion::of({0, 2}))));
}

TEST_CASE("permutations") {
    const auto id = identity_permutation();
    for (const auto& x : all_elements()) CHECK(permute(id, x) == x);

    std::mt19937_64 rng(12);
    const auto all = all_elements();
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int trial = 0; trial < 1000; ++trial) {
        Permutation s = id;
        std::shuffle(s.begin(), s.end(), rng);
        const auto& x = all[pick(rng)];
        const auto& y = all[pick(rng)];
        CHECK(pairing(permute(s, x), permute(s, y)) == pairing(x, y));
        CHECK(permute(s, x + y) == permute(s, x) + permute(s, y));
    }
    // Equivariance of the class <-> subgroup correspondence, sigma fixing infinity.
    Permutation s = id;
    for (int trial = 0; trial < 50; ++trial) {
        std::shuffle(s.begin(), s.begin() + kInfinity, rng);
        for (const auto& t : label_classes()) CHECK(permute(s, subgroup_of(t)) == subgroup_of(permute(s, t)));
    }
}

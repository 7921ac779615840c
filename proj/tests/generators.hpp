#pragma once

#include <random>
#include <vector>

#include "rtower/qfield.hpp"

namespace rtower::testing {

inline Rational random_rational(std::mt19937_64& rng, int span = 9) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, span);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

// Random element using every level of ctx.
inline Element random_element(std::mt19937_64& rng, const TowerContext& ctx, int span = 9) {
    std::vector<Rational> c(std::size_t{1} << ctx.height());
    for (auto& q : c) q = random_rational(rng, span);
    return Element(ctx, std::move(c));
}

inline Element random_nonzero(std::mt19937_64& rng, const TowerContext& ctx, int span = 9) {
    for (;;) {
        Element x = random_element(rng, ctx, span);
        if (!x.is_zero()) return x;
    }
}

// Q(sqrt 2)(sqrt 3)(sqrt(1 + sqrt 2)): a tower with a non-rational radicand.
inline TowerContext sample_tower() {
    TowerContext ctx;
    ctx = adjoin_sqrt(Element(2), ctx).context;
    ctx = adjoin_sqrt(Element(3), ctx).context;
    Element d = Element(1) + ctx.generator(1);
    ctx = adjoin_sqrt(d, ctx).context;
    return ctx;
}

}  // namespace rtower::testing

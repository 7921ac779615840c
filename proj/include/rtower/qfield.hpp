#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "rtower/errors.hpp"

namespace rtower {

using Rational = mpq_class;

class Element;

/**
 * A tower Q = F_0 < F_1 < ... < F_h where F_k = F_{k-1}(g_k) and g_k^2 = d_k
 * for a non-square d_k in F_{k-1}.
 *
 * Contexts are immutable handles. Extending a context returns a new handle
 * whose lower levels are shared with the original, so elements created in
 * the original stay valid in every extension.
 */
class TowerContext {
public:
    /// The rationals (height 0).
    TowerContext();

    static TowerContext rationals() { return TowerContext(); }

    int height() const;

    /// Radicand d_k of level k, 1 <= k <= height(). Lives in prefix(k - 1).
    const Element& radicand(int level) const;
    /// Canonical text of d_k, cached at extension time.
    const std::string& radicand_text(int level) const;

    /// The adjoined square root g_k.
    Element generator(int level) const;

    /// The subtower made of the first `height` levels.
    TowerContext prefix(int height) const;

    /// Process-unique identifier of this node.
    std::uint64_t id() const;

    /// True if `other` is a prefix of this tower (structurally).
    bool extends(const TowerContext& other) const;

    /// Height of the longest common prefix.
    int common_height(const TowerContext& other) const;

    friend bool operator==(const TowerContext& a, const TowerContext& b) {
        return a.height() == b.height() && a.extends(b);
    }

private:
    struct Node;
    explicit TowerContext(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    // Unchecked one-level extension; adjoin_sqrt is the public entry point.
    TowerContext extended_by(const Element& radicand) const;

    const Node* node_at(int height) const;

    std::shared_ptr<const Node> node_;

    friend class Element;
    friend struct TowerAccess;
};

/**
 * Exact element of a quadratic tower.
 *
 * Stored as 2^L rational coordinates in the monomial basis prod g_k^{e_k},
 * where bit k-1 of the index is e_k and L is the effective level (the highest
 * generator actually used). The upper half of the coordinates is never all
 * zero when L > 0, so structural equality is semantic equality.
 */
class Element {
public:
    Element() : c_(1) {}
    Element(long value) : c_{Rational(value)} {}
    Element(const Rational& value) : c_{value} { c_[0].canonicalize(); }
    Element(long num, long den);

    /// Builds an element from monomial coordinates in `ctx`; trailing zero halves are trimmed.
    Element(TowerContext ctx, std::vector<Rational> coords);

    const TowerContext& context() const { return ctx_; }
    int level() const;
    std::span<const Rational> coords() const { return c_; }

    bool is_zero() const;
    bool is_rational() const { return c_.size() == 1; }
    const Rational& rational() const;

    /// For x = a + b g_L at effective level L > 0: a and b. Level 0 gives (x, 0).
    Element low() const;
    Element high() const;

    /// Same value re-homed in a compatible context.
    Element in(const TowerContext& ctx) const;

    Element operator-() const;
    friend Element operator+(const Element& x, const Element& y);
    friend Element operator-(const Element& x, const Element& y);
    friend Element operator*(const Element& x, const Element& y);
    friend Element operator/(const Element& x, const Element& y);
    Element& operator+=(const Element& y) { return *this = *this + y; }
    Element& operator-=(const Element& y) { return *this = *this - y; }
    Element& operator*=(const Element& y) { return *this = *this * y; }
    Element& operator/=(const Element& y) { return *this = *this / y; }

    friend bool operator==(const Element& x, const Element& y);
    friend bool operator!=(const Element& x, const Element& y) { return !(x == y); }

    friend Element inverse(const Element& x);

private:
    TowerContext ctx_;
    std::vector<Rational> c_;

    friend struct ElementAccess;
};

/// Context holding both operands. Throws context_mismatch if none exists.
TowerContext join(const Element& x, const Element& y);
TowerContext join(const TowerContext& a, const TowerContext& b, int used_a, int used_b);

Element inverse(const Element& x);

/// A square root of x inside ctx, if one exists.
std::optional<Element> sqrt_in(const Element& x, const TowerContext& ctx);
inline std::optional<Element> sqrt_in(const Element& x) { return sqrt_in(x, x.context()); }

bool is_square(const Element& x, const TowerContext& ctx);
inline bool is_square(const Element& x) { return is_square(x, x.context()); }

struct AdjoinResult {
    TowerContext context;
    Element root;
    bool extended = false;
};

/**
 * Square root of x over ctx. If x is already a square in ctx the context is
 * returned unchanged together with the root whose first nonzero coordinate
 * (constant term first) is positive, so sqrt(4) = 2 and sqrt(3+2g) = 1+g;
 * otherwise the tower grows by one level with radicand x. x = 0 gives 0.
 */
AdjoinResult adjoin_sqrt(const Element& x, const TowerContext& ctx);
inline AdjoinResult adjoin_sqrt(const Element& x) { return adjoin_sqrt(x, x.context()); }

/**
 * Maps x into `target` by sending each generator of x's context to a square
 * root of the image of its radicand. Returns nullopt if some radicand has no
 * square root in `target`, i.e. x's field is not contained in it.
 */
std::optional<Element> embed(const Element& x, const TowerContext& target);

/// Canonical nested-radical text, e.g. "(3/2 + (1/1)*sqrt(2/1))".
std::string to_string(const Element& x);
std::string to_string(const Rational& q);
std::ostream& operator<<(std::ostream& os, const Element& x);

/// Parses canonical text. Radicands missing from ctx are adjoined to it.
Element parse_element(std::string_view text, TowerContext& ctx);
Rational parse_rational(std::string_view text);

}  // namespace rtower

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtower/qfield.hpp"

namespace rtower {

/// Dense univariate polynomial over a quadratic tower, coefficients low to high.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Element> coeffs);
    Poly(std::initializer_list<Element> coeffs) : Poly(std::vector<Element>(coeffs)) {}

    static Poly constant(const Element& c) { return Poly({c}); }
    static Poly x() { return Poly({Element(0), Element(1)}); }
    /// x - r
    static Poly linear(const Element& r) { return Poly({-r, Element(1)}); }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<Element>& coeffs() const { return c_; }
    /// Coefficient of x^i; zero past the degree.
    Element coeff(int i) const;
    const Element& leading() const;

    Element operator()(const Element& x) const;

    /// Join of the coefficient contexts.
    TowerContext context() const;

    friend Poly operator+(const Poly& f, const Poly& g);
    friend Poly operator-(const Poly& f, const Poly& g);
    friend Poly operator*(const Poly& f, const Poly& g);
    Poly operator-() const;

    friend bool operator==(const Poly& f, const Poly& g) { return f.c_ == g.c_; }
    friend bool operator!=(const Poly& f, const Poly& g) { return !(f == g); }

private:
    std::vector<Element> c_;
};

Poly scale(const Poly& f, const Element& c);
Poly derivative(const Poly& f);
Poly monic(const Poly& f);

/// Euclidean division: f = q g + r with deg r < deg g.
std::pair<Poly, Poly> divmod(const Poly& f, const Poly& g);
/// Monic gcd; gcd(0, 0) = 0.
Poly gcd(Poly f, Poly g);

/// gcd(f, f') constant. Throws degenerate_input on the zero polynomial.
bool is_squarefree(const Poly& f);

/// A point of the projective line: a tower element or infinity.
class ProjPoint {
public:
    ProjPoint(const Element& x) : v_(x) {}
    ProjPoint(long x) : v_(Element(x)) {}
    static ProjPoint infinity() { return ProjPoint(); }

    bool is_infinity() const { return !v_.has_value(); }
    /// Throws degenerate_input at infinity.
    const Element& value() const;

    friend bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.v_ == b.v_; }
    friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }

private:
    ProjPoint() = default;
    std::optional<Element> v_;
};

struct QuadRoots {
    ProjPoint first;  // (-b + s) / 2a
    ProjPoint second; // (-b - s) / 2a
    TowerContext context;
    bool extended = false;
};

/**
 * Roots of a squarefree quadratic, adjoining the square root s of the
 * discriminant to ctx when it is not already there.
 */
QuadRoots quad_roots(const Poly& f, const TowerContext& ctx);
inline QuadRoots quad_roots(const Poly& f) { return quad_roots(f, f.context()); }

/// "c0 + c1*x + c2*x^2"; the zero polynomial prints as "0/1".
std::string to_string(const Poly& f);
/// Element text or "inf".
std::string to_string(const ProjPoint& p);
ProjPoint parse_point(std::string_view text, TowerContext& ctx);

}  // namespace rtower

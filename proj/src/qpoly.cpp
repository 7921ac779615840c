#include "rtower/qpoly.hpp"

#include <algorithm>

namespace rtower {

namespace {

void strip(std::vector<Element>& c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

}  // namespace

Poly::Poly(std::vector<Element> coeffs) : c_(std::move(coeffs)) { strip(c_); }

Element Poly::coeff(int i) const {
    if (i < 0 || i > degree()) return Element(0);
    return c_[static_cast<std::size_t>(i)];
}

const Element& Poly::leading() const {
    if (c_.empty()) throw degenerate_input("leading coefficient of the zero polynomial");
    return c_.back();
}

Element Poly::operator()(const Element& x) const {
    Element acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

TowerContext Poly::context() const {
    TowerContext ctx;
    int used = 0;
    for (const Element& c : c_) {
        ctx = join(ctx, c.context(), used, c.level());
        used = std::max(used, c.level());
    }
    return ctx;
}

Poly operator+(const Poly& f, const Poly& g) {
    std::vector<Element> c(std::max(f.c_.size(), g.c_.size()));
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.coeff(static_cast<int>(i)) + g.coeff(static_cast<int>(i));
    return Poly(std::move(c));
}

Poly operator-(const Poly& f, const Poly& g) { return f + (-g); }

Poly Poly::operator-() const {
    std::vector<Element> c(c_.size());
    std::transform(c_.begin(), c_.end(), c.begin(), [](const Element& e) { return -e; });
    return Poly(std::move(c));
}

Poly operator*(const Poly& f, const Poly& g) {
    if (f.is_zero() || g.is_zero()) return Poly();
    std::vector<Element> c(f.c_.size() + g.c_.size() - 1, Element(0));
    for (std::size_t i = 0; i < f.c_.size(); ++i) {
        if (f.c_[i].is_zero()) continue;
        for (std::size_t j = 0; j < g.c_.size(); ++j) c[i + j] += f.c_[i] * g.c_[j];
    }
    return Poly(std::move(c));
}

Poly scale(const Poly& f, const Element& s) {
    std::vector<Element> c;
    c.reserve(f.coeffs().size());
    for (const Element& e : f.coeffs()) c.push_back(e * s);
    return Poly(std::move(c));
}

Poly derivative(const Poly& f) {
    std::vector<Element> c;
    for (int i = 1; i <= f.degree(); ++i) c.push_back(f.coeff(i) * Element(i));
    return Poly(std::move(c));
}

Poly monic(const Poly& f) { return f.is_zero() ? f : scale(f, inverse(f.leading())); }

std::pair<Poly, Poly> divmod(const Poly& f, const Poly& g) {
    if (g.is_zero()) throw division_by_zero("polynomial division by zero");
    const Element lead_inv = inverse(g.leading());
    std::vector<Element> q(static_cast<std::size_t>(std::max(f.degree() - g.degree() + 1, 0)), Element(0));
    Poly r = f;
    while (!r.is_zero() && r.degree() >= g.degree()) {
        const int shift = r.degree() - g.degree();
        const Element t = r.leading() * lead_inv;
        q[static_cast<std::size_t>(shift)] = t;
        std::vector<Element> sub(static_cast<std::size_t>(shift), Element(0));
        sub.push_back(t);
        std::vector<Element> rc = (r - Poly(sub) * g).coeffs();
        // The leading term cancels exactly; drop it even if stripping already did.
        if (static_cast<int>(rc.size()) > r.degree()) rc.resize(static_cast<std::size_t>(r.degree()));
        r = Poly(std::move(rc));
    }
    return {Poly(std::move(q)), r};
}

Poly gcd(Poly f, Poly g) {
    while (!g.is_zero()) {
        Poly r = divmod(f, g).second;
        f = std::move(g);
        g = std::move(r);
    }
    return monic(f);
}

bool is_squarefree(const Poly& f) {
    if (f.is_zero()) throw degenerate_input("is_squarefree of the zero polynomial");
    return gcd(f, derivative(f)).degree() == 0;
}

const Element& ProjPoint::value() const {
    if (!v_) throw degenerate_input("the point at infinity has no affine coordinate");
    return *v_;
}

QuadRoots quad_roots(const Poly& f, const TowerContext& ctx) {
    if (f.degree() != 2) throw degenerate_input("quad_roots needs a polynomial of degree exactly 2");
    const Element& a = f.coeff(2);
    const Element b = f.coeff(1), c = f.coeff(0);
    const Element disc = b * b - Element(4) * a * c;
    if (disc.is_zero()) throw degenerate_input("quadratic has a repeated root");
    AdjoinResult s = adjoin_sqrt(disc, ctx);
    const Element den = inverse(Element(2) * a);
    return {ProjPoint((-b + s.root) * den), ProjPoint((-b - s.root) * den), s.context, s.extended};
}

std::string to_string(const Poly& f) {
    if (f.is_zero()) return "0/1";
    std::string out;
    for (int i = 0; i <= f.degree(); ++i) {
        if (i > 0) out += " + ";
        out += to_string(f.coeff(i));
        if (i == 1) out += "*x";
        if (i > 1) out += "*x^" + std::to_string(i);
    }
    return out;
}

std::string to_string(const ProjPoint& p) { return p.is_infinity() ? "inf" : to_string(p.value()); }

ProjPoint parse_point(std::string_view text, TowerContext& ctx) {
    if (text == "inf") return ProjPoint::infinity();
    return ProjPoint(parse_element(text, ctx));
}

}  // namespace rtower

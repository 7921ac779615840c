#include "rtower/splitting.hpp"

#include <algorithm>
#include <set>

namespace rtower {

namespace {

std::string key_of(const Pair& p) { return to_string(p[0]) + "," + to_string(p[1]); }

Pair sorted_pair(const Pair& p) {
    return to_string(p[0]) <= to_string(p[1]) ? p : Pair{p[1], p[0]};
}

void require_distinct(const std::vector<ProjPoint>& pts, const char* what) {
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i] == pts[j]) throw degenerate_input(std::string(what) + ": repeated point " + to_string(pts[i]));
}

Poly row_poly(const Mat3& a, int i) { return Poly({a(i, 0), a(i, 1), a(i, 2)}); }

}  // namespace

PairTriple::PairTriple(std::array<Pair, 3> pairs) : p_(std::move(pairs)) {
    require_distinct(support(), "pair triple");
}

std::vector<ProjPoint> PairTriple::support() const {
    std::vector<ProjPoint> out;
    for (const Pair& p : p_) out.insert(out.end(), p.begin(), p.end());
    return out;
}

PairTriple PairTriple::canonical() const {
    std::array<Pair, 3> q = p_;
    for (Pair& p : q) p = sorted_pair(p);
    std::sort(q.begin(), q.end(), [](const Pair& a, const Pair& b) { return key_of(a) < key_of(b); });
    return PairTriple(q);
}

std::string SplittingClass::key() const { return to_string(t_); }

std::string to_string(const PairTriple& t) {
    std::string out = "[";
    for (int i = 0; i < 3; ++i) out += (i ? ",{" : "{") + key_of(t[i]) + "}";
    return out + "]";
}

std::vector<ProjPoint> sorted_points(std::vector<ProjPoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const ProjPoint& a, const ProjPoint& b) { return to_string(a) < to_string(b); });
    return pts;
}

std::vector<SplittingClass> enumerate_classes(const std::vector<ProjPoint>& branch) {
    if (branch.size() != 6) throw degenerate_input("a branch set has exactly six points");
    require_distinct(branch, "branch set");
    const std::vector<ProjPoint> b = sorted_points(branch);
    std::vector<SplittingClass> out;
    // Partner of b[0], then the partner of the smallest remaining point.
    for (int i = 1; i < 6; ++i) {
        std::vector<int> rest;
        for (int k = 1; k < 6; ++k)
            if (k != i) rest.push_back(k);
        for (int j = 1; j < 4; ++j) {
            std::vector<int> last;
            for (int k = 1; k < 4; ++k)
                if (k != j) last.push_back(rest[static_cast<std::size_t>(k)]);
            const auto at = [&](int k) { return b[static_cast<std::size_t>(k)]; };
            out.emplace_back(PairTriple({Pair{at(0), at(i)}, Pair{at(rest[0]), at(rest[static_cast<std::size_t>(j)])},
                                         Pair{at(last[0]), at(last[1])}}));
        }
    }
    std::sort(out.begin(), out.end(), [](const SplittingClass& a, const SplittingClass& c) { return a.key() < c.key(); });
    return out;
}

Mat3 matrix_m(const PairTriple& t) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        const Pair& p = t[i];
        if (p[0].is_infinity() || p[1].is_infinity()) {
            const Element& r = p[0].is_infinity() ? p[1].value() : p[0].value();
            m.row(i) << -r, Element(1), Element(0);
        } else {
            const Element& r = p[0].value();
            const Element& s = p[1].value();
            m.row(i) << r * s, -(r + s), Element(1);
        }
    }
    return m;
}

TripleInField map_n(const Mat3& a, const TowerContext& ctx) {
    TowerContext cur = ctx;
    std::array<Pair, 3> pairs{Pair{ProjPoint(0), ProjPoint(0)}, Pair{ProjPoint(0), ProjPoint(0)},
                              Pair{ProjPoint(0), ProjPoint(0)}};
    int linear_rows = 0;
    for (int i = 0; i < 3; ++i) {
        const Poly g = row_poly(a, i);
        if (g.degree() < 1) throw degenerate_input("row " + std::to_string(i + 1) + " has no roots");
        if (g.degree() == 1) {
            if (++linear_rows > 1) throw degenerate_input("more than one row has a root at infinity");
            pairs[static_cast<std::size_t>(i)] = {ProjPoint(-g.coeff(0) / g.coeff(1)), ProjPoint::infinity()};
            continue;
        }
        if (!is_squarefree(g)) throw degenerate_input("row " + std::to_string(i + 1) + " has a repeated root");
        QuadRoots r = quad_roots(g, cur);
        cur = r.context;
        pairs[static_cast<std::size_t>(i)] = {r.first, r.second};
    }
    return {PairTriple(pairs), cur};
}

ClassInField richelot_class(const SplittingClass& r, const TowerContext& ctx) {
    try {
        TripleInField n = map_n(dual_matrix(matrix_m(r.triple())), ctx);
        return {SplittingClass(n.triple), n.context};
    } catch (const degenerate_input& e) {
        throw invariant_violation("Richelot image of " + r.key() + " left U: " + e.what());
    }
}

Poly bracket(const Poly& g1, const Poly& g2) { return g1 * derivative(g2) - g2 * derivative(g1); }

QuadraticSplitting::QuadraticSplitting(std::array<Poly, 3> g) : g_(std::move(g)) {
    for (int i = 0; i < 3; ++i) {
        if (g_[static_cast<std::size_t>(i)].degree() > 2)
            throw degenerate_input("splitting factors have degree at most 2");
        for (int j = 0; j < 3; ++j) m_(i, j) = g_[static_cast<std::size_t>(i)].coeff(j);
    }
}

QuadraticSplitting::QuadraticSplitting(const Mat3& rows)
    : QuadraticSplitting(std::array<Poly, 3>{row_poly(rows, 0), row_poly(rows, 1), row_poly(rows, 2)}) {}

bool QuadraticSplitting::is_valid() const {
    int linear = 0;
    for (const Poly& g : g_) {
        if (g.degree() < 1) return false;
        linear += g.degree() == 1;
    }
    if (linear > 1) return false;
    const Poly f = product();
    return (f.degree() == 5 || f.degree() == 6) && is_squarefree(f);
}

QuadraticSplitting richelot_splitting(const QuadraticSplitting& s) {
    return QuadraticSplitting(std::array<Poly, 3>{bracket(s[1], s[2]), bracket(s[2], s[0]), bracket(s[0], s[1])});
}

Curve curve_from_roots(const std::vector<Element>& roots) {
    if (roots.size() != 5 && roots.size() != 6) throw degenerate_input("a genus-2 curve has five or six affine roots");
    Curve c;
    c.f = Poly::constant(Element(1));
    for (const Element& r : roots) {
        c.f = c.f * Poly::linear(r);
        c.branch.emplace_back(r);
    }
    if (roots.size() == 5) c.branch.push_back(ProjPoint::infinity());
    require_distinct(c.branch, "curve branch set");
    return c;
}

bool is_consistent(const Curve& c) {
    if (c.d.is_zero() || (c.f.degree() != 5 && c.f.degree() != 6) || c.branch.size() != 6) return false;
    // deg f distinct roots of f make it squarefree; no gcd needed.
    for (std::size_t i = 0; i < c.branch.size(); ++i)
        for (std::size_t j = i + 1; j < c.branch.size(); ++j)
            if (c.branch[i] == c.branch[j]) return false;
    int finite = 0;
    for (const ProjPoint& p : c.branch) {
        if (p.is_infinity()) continue;
        if (!c.f(p.value()).is_zero()) return false;
        ++finite;
    }
    return finite == c.f.degree();
}

namespace {

// D' with y^2 = D f = D' G1 G2 G3.
Element rescaled_d(const Curve& c, const QuadraticSplitting& s) {
    const Poly prod = s.product();
    if (prod.is_zero() || prod.degree() != c.f.degree())
        throw degenerate_input("the splitting does not factor the curve polynomial");
    const Element ratio = c.f.leading() / prod.leading();
    if (scale(prod, ratio) != c.f) throw degenerate_input("the splitting does not factor the curve polynomial");
    return c.d * ratio;
}

}  // namespace

CurveInField richelot_curve(const Curve& c, const QuadraticSplitting& s, const TowerContext& ctx) {
    const Element d = rescaled_d(c, s);
    const Element det = s.det();
    if (det.is_zero()) throw split_jacobian("det(G) = 0: the Jacobian splits");
    const QuadraticSplitting h = richelot_splitting(s);
    if (h.matrix() != dual_matrix(s.matrix())) throw invariant_violation("H differs from the dual of G");
    Curve out;
    out.d = d / det;
    out.f = h.product();
    TripleInField roots = map_n(h.matrix(), ctx);
    out.branch = roots.triple.support();
    if (!is_consistent(out)) throw invariant_violation("Richelot curve is not a genus-2 curve");
    return {out, roots.context, roots.triple};
}

PushforwardResult pushforward_point(const Curve& c, const QuadraticSplitting& s, const Element& x0,
                                    const Element& y0, const TowerContext& ctx) {
    const Element d = rescaled_d(c, s);
    if (y0.is_zero()) throw degenerate_input("(x0, 0) is a Weierstrass point");
    if (y0 * y0 != c.d * c.f(x0)) throw degenerate_input("(x0, y0) is not on the curve");
    const Element det = s.det();
    if (det.is_zero()) throw split_jacobian("det(G) = 0: the Jacobian splits");
    const QuadraticSplitting h = richelot_splitting(s);
    const Element g2 = s[1](x0), g3 = s[2](x0);
    const Poly q = scale(h[1], g2) + scale(h[2], g3);
    if (q.degree() != 2 || !is_squarefree(q)) throw degenerate_input("the z-quadratic is degenerate at x0");
    QuadRoots z = quad_roots(q, ctx);
    AdjoinResult i = adjoin_sqrt(Element(-1), z.context);
    const Element kappa = d * i.root / y0;
    const Poly image = scale(h.product(), d / det);
    PushforwardResult out{{}, i.context};
    const std::array<ProjPoint, 2> zs{z.first, z.second};
    for (std::size_t k = 0; k < 2; ++k) {
        const Element& zk = zs[k].value();
        Element t = kappa * g2 * h[1](zk) * (x0 - zk);
        if (k == 1) t = -t;
        if (t * t != image(zk)) throw invariant_violation("pushed-forward point is off the Richelot curve");
        out.points[k] = {zk, t};
    }
    return out;
}

}  // namespace rtower

#include "rtower/qfield.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <ostream>

namespace rtower {

struct TowerContext::Node {
    std::shared_ptr<const Node> parent;
    int height = 0;
    std::optional<Element> radicand;
    std::string radicand_text;
    std::uint64_t id = 0;
};

namespace {

std::atomic<std::uint64_t> next_context_id{1};

using Coeffs = std::vector<Rational>;
using CSpan = std::span<const Rational>;

// d[k] = coordinates of the level-k radicand.
struct Rads {
    std::vector<CSpan> d;
};

int level_of_size(std::size_t n) { return std::bit_width(n) - 1; }

bool all_zero(CSpan a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& q) { return sgn(q) == 0; });
}

std::size_t effective_size(CSpan a) {
    std::size_t n = a.size();
    while (n > 1 && all_zero(a.subspan(n / 2, n / 2))) n /= 2;
    return n;
}

void trim(Coeffs& a) {
    a.resize(effective_size(a));
}

Coeffs add(CSpan a, CSpan b) {
    if (a.size() < b.size()) std::swap(a, b);
    Coeffs out(a.begin(), a.end());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Coeffs sub(CSpan a, CSpan b) {
    Coeffs out(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    return out;
}

Coeffs scaled(CSpan a, const Rational& s) {
    Coeffs out(a.begin(), a.end());
    for (auto& q : out) q *= s;
    return out;
}

void place(Coeffs& out, std::size_t offset, const Coeffs& part) {
    std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
}

// Product of two coordinate vectors (power-of-two sizes). Result has size max(|a|, |b|).
Coeffs mul(CSpan a, CSpan b, const Rads& r) {
    if (a.size() < b.size()) std::swap(a, b);
    const std::size_t n = a.size();
    if (n == 1) return {a[0] * b[0]};
    const std::size_t h = n / 2;
    const int level = level_of_size(n);
    CSpan a0 = a.first(h), a1 = a.subspan(h);
    const bool a1z = all_zero(a1);
    Coeffs out(n);

    if (b.size() < n) {
        place(out, 0, mul(a0, b, r));
        if (!a1z) place(out, h, mul(a1, b, r));
        return out;
    }

    CSpan b0 = b.first(h), b1 = b.subspan(h);
    const bool b1z = all_zero(b1);
    if (a1z && b1z) {
        place(out, 0, mul(a0, b0, r));
    } else if (a1z) {
        place(out, 0, mul(a0, b0, r));
        place(out, h, mul(a0, b1, r));
    } else if (b1z) {
        place(out, 0, mul(a0, b0, r));
        place(out, h, mul(a1, b0, r));
    } else {
        Coeffs ac = mul(a0, b0, r);
        Coeffs bd = mul(a1, b1, r);
        Coeffs cross = mul(add(a0, a1), add(b0, b1), r);
        for (std::size_t i = 0; i < h; ++i) cross[i] -= ac[i] + bd[i];
        Coeffs lo = add(ac, mul(bd, r.d[level], r));
        place(out, 0, lo);
        place(out, h, cross);
    }
    return out;
}

Coeffs inv(CSpan a, const Rads& r) {
    a = a.first(effective_size(a));
    if (a.size() == 1) {
        if (sgn(a[0]) == 0) throw division_by_zero("inverse of zero");
        return {1 / a[0]};
    }
    const std::size_t h = a.size() / 2;
    const int level = level_of_size(a.size());
    CSpan a0 = a.first(h), a1 = a.subspan(h);
    Coeffs norm = sub(mul(a0, a0, r), mul(mul(a1, a1, r), r.d[level], r));
    Coeffs ni = inv(norm, r);
    Coeffs out(a.size());
    place(out, 0, mul(a0, ni, r));
    Coeffs hi = mul(a1, ni, r);
    for (auto& q : hi) q = -q;
    place(out, h, hi);
    return out;
}

std::optional<Rational> rational_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return std::nullopt;
    Rational root(sqrt(num), sqrt(den));
    root.canonicalize();
    return root;
}

// Square root of x in the height-k subtower. For x = u + v g with v != 0 a root
// exists iff the norm u^2 - v^2 d is a square w^2 one level down and one of
// (u +- w)/2 is a square there; with v = 0 the root is either in the subfield
// or a subfield element times g.
std::optional<Coeffs> sqrt_rec(CSpan x, int k, const Rads& r) {
    x = x.first(effective_size(x));
    if (x.size() == 1 && sgn(x[0]) == 0) return Coeffs{Rational(0)};
    if (k == 0) {
        auto q = rational_sqrt(x[0]);
        if (!q) return std::nullopt;
        return Coeffs{*q};
    }
    const std::size_t h = std::size_t{1} << (k - 1);
    if (x.size() <= h) {
        if (auto root = sqrt_rec(x, k - 1, r)) return root;
        Coeffs ud = mul(x, r.d[k], r);
        if (auto w = sqrt_rec(ud, k - 1, r)) {
            Coeffs coeff = mul(*w, inv(r.d[k], r), r);
            Coeffs out(2 * h);
            place(out, h, coeff);
            return out;
        }
        return std::nullopt;
    }
    CSpan u = x.first(h), v = x.subspan(h);
    Coeffs norm = sub(mul(u, u, r), mul(mul(v, v, r), r.d[k], r));
    auto w = sqrt_rec(norm, k - 1, r);
    if (!w) return std::nullopt;
    const Rational half(1, 2);
    for (int sign : {1, -1}) {
        Coeffs t = sign > 0 ? add(u, *w) : sub(u, *w);
        for (auto& q : t) q *= half;
        if (all_zero(t)) continue;
        auto x0 = sqrt_rec(t, k - 1, r);
        if (!x0) continue;
        Coeffs y0 = mul(v, inv(scaled(*x0, Rational(2)), r), r);
        Coeffs out(2 * h);
        place(out, 0, *x0);
        place(out, h, y0);
        return out;
    }
    return std::nullopt;
}

}  // namespace

struct ElementAccess {
    static const Coeffs& coeffs(const Element& x) { return x.c_; }
};

struct TowerAccess {
    static const TowerContext::Node* node_at(const TowerContext& ctx, int h) { return ctx.node_at(h); }
    static TowerContext extend(const TowerContext& ctx, const Element& d) { return ctx.extended_by(d); }

    static Rads rads(const TowerContext& ctx, int up_to) {
        Rads r;
        r.d.resize(static_cast<std::size_t>(up_to) + 1);
        for (const auto* node = ctx.node_at(up_to); node->height > 0; node = node->parent.get())
            r.d[static_cast<std::size_t>(node->height)] = ElementAccess::coeffs(*node->radicand);
        return r;
    }

    static const std::shared_ptr<const TowerContext::Node>& root_node() {
        static const std::shared_ptr<const TowerContext::Node> root = std::make_shared<TowerContext::Node>();
        return root;
    }
};

// ---------------------------------------------------------------- TowerContext

TowerContext::TowerContext() : node_(TowerAccess::root_node()) {}

int TowerContext::height() const { return node_->height; }

const TowerContext::Node* TowerContext::node_at(int h) const {
    if (h < 0 || h > height()) throw std::out_of_range("tower level out of range");
    const Node* node = node_.get();
    while (node->height > h) node = node->parent.get();
    return node;
}

const Element& TowerContext::radicand(int level) const {
    if (level < 1) throw std::out_of_range("radicand level must be >= 1");
    return *node_at(level)->radicand;
}

const std::string& TowerContext::radicand_text(int level) const {
    if (level < 1) throw std::out_of_range("radicand level must be >= 1");
    return node_at(level)->radicand_text;
}

Element TowerContext::generator(int level) const {
    if (level < 1 || level > height()) throw std::out_of_range("generator level out of range");
    Coeffs c(std::size_t{1} << level);
    c[std::size_t{1} << (level - 1)] = 1;
    return Element(prefix(level), std::move(c));
}

TowerContext TowerContext::prefix(int h) const {
    const Node* target = node_at(h);
    std::shared_ptr<const Node> node = node_;
    while (node.get() != target) node = node->parent;
    return TowerContext(std::move(node));
}

std::uint64_t TowerContext::id() const { return node_->id; }

bool TowerContext::extends(const TowerContext& other) const {
    if (other.height() > height()) return false;
    return common_height(other) == other.height();
}

int TowerContext::common_height(const TowerContext& other) const {
    const int h = std::min(height(), other.height());
    const Node* a = node_at(h);
    const Node* b = other.node_at(h);
    int best = h;
    while (a != b) {
        if (ElementAccess::coeffs(*a->radicand) != ElementAccess::coeffs(*b->radicand)) best = a->height - 1;
        a = a->parent.get();
        b = b->parent.get();
    }
    return best;
}

TowerContext TowerContext::extended_by(const Element& d) const {
    auto node = std::make_shared<Node>();
    node->parent = node_;
    node->height = height() + 1;
    node->radicand = d.in(*this);
    node->radicand_text = to_string(*node->radicand);
    node->id = next_context_id.fetch_add(1);
    return TowerContext(std::move(node));
}

// ---------------------------------------------------------------- Element

Element::Element(long num, long den) : c_{Rational(num, den)} {
    if (den == 0) throw division_by_zero("zero denominator");
    c_[0].canonicalize();
}

Element::Element(TowerContext ctx, std::vector<Rational> coords) : ctx_(std::move(ctx)), c_(std::move(coords)) {
    if (c_.empty()) c_.resize(1);
    c_.resize(std::bit_ceil(c_.size()));
    for (auto& q : c_) q.canonicalize();
    trim(c_);
    if (level() > ctx_.height()) throw invariant_violation("element level exceeds its tower height");
}

int Element::level() const { return level_of_size(c_.size()); }

bool Element::is_zero() const { return c_.size() == 1 && sgn(c_[0]) == 0; }

const Rational& Element::rational() const {
    if (!is_rational()) throw degenerate_input("element is not rational: " + to_string(*this));
    return c_[0];
}

Element Element::low() const {
    if (c_.size() == 1) return *this;
    return Element(ctx_, Coeffs(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(c_.size() / 2)));
}

Element Element::high() const {
    if (c_.size() == 1) return Element(ctx_, Coeffs{Rational(0)});
    return Element(ctx_, Coeffs(c_.begin() + static_cast<std::ptrdiff_t>(c_.size() / 2), c_.end()));
}

Element Element::in(const TowerContext& ctx) const {
    if (ctx.common_height(ctx_) < level())
        throw context_mismatch("element uses a generator absent from the target tower");
    Element out = *this;
    out.ctx_ = ctx;
    return out;
}

TowerContext join(const TowerContext& a, const TowerContext& b, int used_a, int used_b) {
    if (a.height() >= b.height()) {
        if (a.extends(b)) return a;
    } else if (b.extends(a)) {
        return b;
    }
    const int common = a.common_height(b);
    // Siblings are fine as long as both values live in the shared subtower.
    if (used_a <= common && used_b <= common) return a.prefix(common);
    throw context_mismatch("elements belong to incompatible towers");
}

TowerContext join(const Element& x, const Element& y) {
    if (x.context().id() == y.context().id()) return x.context();
    return join(x.context(), y.context(), x.level(), y.level());
}

Element Element::operator-() const {
    Element out = *this;
    for (auto& q : out.c_) q = -q;
    return out;
}

Element operator+(const Element& x, const Element& y) {
    return Element(join(x, y), add(x.c_, y.c_));
}

Element operator-(const Element& x, const Element& y) {
    return Element(join(x, y), sub(x.c_, y.c_));
}

Element operator*(const Element& x, const Element& y) {
    TowerContext ctx = join(x, y);
    if (x.is_rational()) return Element(ctx, scaled(y.c_, x.c_[0]));
    if (y.is_rational()) return Element(ctx, scaled(x.c_, y.c_[0]));
    const int level = std::max(x.level(), y.level());
    return Element(ctx, mul(x.c_, y.c_, TowerAccess::rads(ctx, level)));
}

Element inverse(const Element& x) {
    if (x.is_zero()) throw division_by_zero("inverse of zero");
    return Element(x.ctx_, inv(x.c_, TowerAccess::rads(x.ctx_, x.level())));
}

Element operator/(const Element& x, const Element& y) {
    if (y.is_zero()) throw division_by_zero("division by zero");
    if (y.is_rational()) return Element(x.ctx_, scaled(x.c_, 1 / y.c_[0]));
    return x * inverse(y);
}

bool operator==(const Element& x, const Element& y) {
    if (x.c_.size() == 1 && y.c_.size() == 1) return x.c_[0] == y.c_[0];
    join(x, y);
    return x.c_ == y.c_;
}

// ---------------------------------------------------------------- squares

std::optional<Element> sqrt_in(const Element& x, const TowerContext& ctx) {
    const Element xi = x.in(ctx);
    const int k = ctx.height();
    auto root = sqrt_rec(ElementAccess::coeffs(xi), k, TowerAccess::rads(ctx, k));
    if (!root) return std::nullopt;
    return Element(ctx, std::move(*root));
}

bool is_square(const Element& x, const TowerContext& ctx) { return sqrt_in(x, ctx).has_value(); }

AdjoinResult adjoin_sqrt(const Element& x, const TowerContext& ctx) {
    if (x.is_zero()) return {ctx, Element(ctx, {Rational(0)}), false};
    if (auto root = sqrt_in(x, ctx)) {
        // Sign normalization: the first nonzero coordinate is positive.
        for (const Rational& c : ElementAccess::coeffs(*root))
            if (sgn(c) != 0) return {ctx, sgn(c) > 0 ? *root : -*root, false};
        return {ctx, *root, false};
    }
    TowerContext grown = TowerAccess::extend(ctx, x);
    return {grown, grown.generator(grown.height()).in(grown), true};
}

std::optional<Element> embed(const Element& x, const TowerContext& target) {
    const int level = x.level();
    std::vector<Element> images(static_cast<std::size_t>(level) + 1);
    const TowerContext& src = x.context();
    for (int k = 1; k <= level; ++k) {
        // Radicand d_k lives in levels < k, whose generator images are already known.
        const Coeffs& d = ElementAccess::coeffs(src.radicand(k));
        Element image(target, {Rational(0)});
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (sgn(d[i]) == 0) continue;
            Element term(target, {d[i]});
            for (int bit = 0; bit < k - 1; ++bit)
                if (i >> bit & 1U) term = term * images[static_cast<std::size_t>(bit) + 1];
            image = image + term;
        }
        auto root = sqrt_in(image, target);
        if (!root) return std::nullopt;
        images[static_cast<std::size_t>(k)] = *root;
    }
    const Coeffs& c = ElementAccess::coeffs(x);
    Element out(target, {Rational(0)});
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (sgn(c[i]) == 0) continue;
        Element term(target, {c[i]});
        for (int bit = 0; bit < level; ++bit)
            if (i >> bit & 1U) term = term * images[static_cast<std::size_t>(bit) + 1];
        out = out + term;
    }
    return out;
}

// ---------------------------------------------------------------- text

std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

namespace {

std::string serialize(CSpan c, const TowerContext& ctx) {
    c = c.first(effective_size(c));
    if (c.size() == 1) return to_string(c[0]);
    const std::size_t h = c.size() / 2;
    const int level = level_of_size(c.size());
    return "(" + serialize(c.first(h), ctx) + " + (" + serialize(c.subspan(h), ctx) + ")*sqrt(" +
           ctx.radicand_text(level) + "))";
}

class Parser {
public:
    Parser(std::string_view text, TowerContext& ctx) : text_(text), ctx_(ctx) {}

    Element parse_all() {
        Element x = element();
        if (pos_ != text_.size()) fail("trailing characters");
        return x;
    }

private:
    Element element() {
        if (peek() != '(') return Element(rational());
        expect("(");
        Element a = element();
        expect(" + (");
        Element b = element();
        expect(")*sqrt(");
        Element d = element();
        expect("))");
        return a + b * generator_for(d);
    }

    Element generator_for(const Element& d) {
        const std::string text = to_string(d);
        for (int k = 1; k <= ctx_.height(); ++k)
            if (ctx_.radicand_text(k) == text) return ctx_.generator(k).in(ctx_);
        AdjoinResult res = adjoin_sqrt(d, ctx_);
        ctx_ = res.context;
        return res.root;
    }

    Rational rational() {
        const std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
            ++pos_;
        if (pos_ == start) fail("expected a rational");
        return parse_rational(text_.substr(start, pos_ - start));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void expect(std::string_view token) {
        if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("cannot parse element at offset " + std::to_string(pos_) + ": " + what);
    }

    std::string_view text_;
    TowerContext& ctx_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Element& x) { return serialize(ElementAccess::coeffs(x), x.context()); }

std::ostream& operator<<(std::ostream& os, const Element& x) { return os << to_string(x); }

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw std::invalid_argument("empty rational");
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational '" + s + "'");
    if (sgn(q.get_den()) == 0) throw division_by_zero("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

Element parse_element(std::string_view text, TowerContext& ctx) {
    Element x = Parser(text, ctx).parse_all();
    return x.in(ctx);
}

}  // namespace rtower

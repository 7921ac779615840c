#include "rtower/symplectic.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <random>
#include <set>

#include "rtower/errors.hpp"

namespace rtower {

namespace {

int mod(long long x, int level) {
    const long long q = modulus(level);
    return static_cast<int>(((x % q) + q) % q);
}

// Inverse of an odd unit mod 2^level (Newton iteration doubles correct bits).
int odd_inverse(int u, int level) {
    long long inv = u;
    for (int i = 0; i < 5; ++i) inv = mod(inv * (2 - static_cast<long long>(u) * inv), level);
    return static_cast<int>(inv);
}

Vec4 unit(int i) {
    Vec4 e = Vec4::Zero();
    e(i) = 1;
    return e;
}

}  // namespace

Mat4 symplectic_gram() {
    Mat4 g = Mat4::Zero();
    g(0, 2) = 1;
    g(2, 0) = -1;
    g(1, 3) = 1;
    g(3, 1) = -1;
    return g;
}

Vec4 reduce(const Vec4& x, int level) {
    Vec4 r;
    for (int i = 0; i < 4; ++i) r(i) = mod(x(i), level);
    return r;
}

int symp_form(const Vec4& x, const Vec4& y, int level) {
    const long long v = static_cast<long long>(x(0)) * y(2) - static_cast<long long>(x(2)) * y(0) +
                        static_cast<long long>(x(1)) * y(3) - static_cast<long long>(x(3)) * y(1);
    return mod(v, level);
}

bool is_symplectic(const Mat4& a, int level) {
    const Mat4 g = symplectic_gram();
    const Mat4 lhs = a.transpose() * g * a - g;
    return lhs.unaryExpr([level](int v) { return mod(v, level); }).isZero();
}

Subgroup::Subgroup(int level, const std::vector<Vec4>& generators) : level_(level) {
    if (level < 0) throw std::invalid_argument("negative level");
    if (level == 0) return;
    const int q = modulus(level);
    std::vector<Vec4> work;
    for (const Vec4& g : generators) {
        Vec4 r = reduce(g, level);
        if (!r.isZero()) work.push_back(r);
    }
    for (int c = 0; c < 4; ++c) {
        int best = -1, best_v = level;
        for (std::size_t i = 0; i < work.size(); ++i) {
            if (work[i](c) == 0) continue;
            const int v = std::countr_zero(static_cast<unsigned>(work[i](c)));
            if (v < best_v) best = static_cast<int>(i), best_v = v;
        }
        if (best < 0) continue;
        Vec4 p = work[static_cast<std::size_t>(best)];
        work.erase(work.begin() + best);
        const int inv = odd_inverse(p(c) >> best_v, level);
        p = reduce(p * inv, level);
        for (Vec4& r : work)
            if (r(c) != 0) r = reduce(r - (r(c) >> best_v) * p, level);
        // Howell saturation: 2^{n-v} p vanishes at c but may not be in the span of later rows.
        const Vec4 s = reduce(p * (q >> best_v), level);
        if (!s.isZero()) work.push_back(s);
        work.erase(std::remove_if(work.begin(), work.end(), [](const Vec4& r) { return r.isZero(); }), work.end());
        rows_.push_back(p);
        pivot_col_.push_back(c);
        pivot_val_.push_back(best_v);
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const int c = pivot_col_[i], v = pivot_val_[i];
        for (std::size_t j = 0; j < i; ++j) {
            const int t = rows_[j](c) >> v;
            if (t) rows_[j] = reduce(rows_[j] - t * rows_[i], level);
        }
    }
}

int Subgroup::log2_order() const {
    int total = 0;
    for (int v : pivot_val_) total += level_ - v;
    return total;
}

bool Subgroup::contains(const Vec4& x0) const {
    if (level_ == 0) return true;
    Vec4 x = reduce(x0, level_);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const int c = pivot_col_[i], v = pivot_val_[i];
        if (x(c) & ((1 << v) - 1)) return false;
        if (x(c)) x = reduce(x - (x(c) >> v) * rows_[i], level_);
    }
    return x.isZero();
}

bool Subgroup::contains(const Subgroup& other) const {
    if (other.level_ != level_) throw std::invalid_argument("subgroups at different levels");
    return std::all_of(other.rows_.begin(), other.rows_.end(), [this](const Vec4& r) { return contains(r); });
}

bool Subgroup::is_isotropic() const {
    for (const Vec4& x : rows_)
        for (const Vec4& y : rows_)
            if (symp_form(x, y, level_) != 0) return false;
    return true;
}

bool Subgroup::contains_two_torsion() const {
    if (level_ == 0) return true;
    for (int i = 0; i < 4; ++i)
        if (!contains(unit(i) * (1 << (level_ - 1)))) return false;
    return true;
}

bool Subgroup::is_even() const {
    return std::all_of(rows_.begin(), rows_.end(),
                       [](const Vec4& r) { return ((r.array() / 2) * 2 == r.array()).all(); });
}

std::vector<Vec4> Subgroup::elements() const {
    std::vector<Vec4> out{Vec4::Zero()};
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const int count = 1 << (level_ - pivot_val_[i]);
        std::vector<Vec4> next;
        next.reserve(out.size() * static_cast<std::size_t>(count));
        for (const Vec4& x : out)
            for (int a = 0; a < count; ++a) next.push_back(reduce(x + a * rows_[i], level_));
        out = std::move(next);
    }
    return out;
}

Subgroup Subgroup::embedded() const {
    std::vector<Vec4> g;
    for (const Vec4& r : rows_) g.push_back(2 * r);
    return Subgroup(level_ + 1, g);
}

Subgroup Subgroup::reduced() const {
    if (level_ == 0) throw std::invalid_argument("cannot reduce below level 0");
    return Subgroup(level_ - 1, rows_);
}

Subgroup Subgroup::halved() const {
    if (level_ == 0 || !is_even()) throw std::invalid_argument("subgroup is not divisible by 2");
    std::vector<Vec4> g;
    for (const Vec4& r : rows_) g.push_back(r / 2);
    return Subgroup(level_ - 1, g);
}

Subgroup Subgroup::transformed(const Mat4& a) const {
    std::vector<Vec4> g;
    for (const Vec4& r : rows_) g.push_back(a * r);
    return Subgroup(level_, g);
}

Subgroup Subgroup::joined(const std::vector<Vec4>& extra) const {
    std::vector<Vec4> g = rows_;
    g.insert(g.end(), extra.begin(), extra.end());
    return Subgroup(level_, g);
}

std::string Subgroup::key() const {
    std::string out = std::to_string(level_) + ":";
    for (const Vec4& r : rows_) out += to_string(r);
    return out;
}

SVertex root_vertex() { return SVertex{Subgroup(0)}; }

SVertex vertex_of(Subgroup n) {
    for (;;) {
        if (n.level() == 0) break;
        if (n.contains_two_torsion()) {
            n = n.reduced();
        } else if (n.is_even()) {
            n = n.halved();
        } else {
            break;
        }
    }
    return SVertex{n};
}

namespace {

std::vector<SVertex> compute_neighbors(const SVertex& v) {
    const int m = v.m(), level = m + 1;
    const Subgroup n = v.n.embedded();
    // {x : 2x in N}: lifts of N_v plus the 2-torsion.
    std::vector<Vec4> gens = v.n.basis();
    for (int i = 0; i < 4; ++i) gens.push_back(unit(i) * (1 << m));
    const Subgroup half(level, gens);
    std::vector<Vec4> reps;
    for (const Vec4& x : half.elements()) {
        const bool seen = std::any_of(reps.begin(), reps.end(), [&](const Vec4& r) { return n.contains(x - r); });
        if (!seen) reps.push_back(x);
    }
    if (reps.size() != 16) throw invariant_violation("2-torsion of J/N_v does not have 16 elements");
    std::map<std::string, SVertex> found;
    for (std::size_t i = 1; i < reps.size(); ++i)
        for (std::size_t j = i + 1; j < reps.size(); ++j) {
            Subgroup cand = n.joined({reps[i], reps[j]});
            if (cand.log2_order() != 2 * level || !cand.is_isotropic()) continue;
            SVertex w = vertex_of(cand);
            found.emplace(w.n.key(), w);
        }
    if (found.size() != 15)
        throw invariant_violation("vertex " + v.n.key() + " has " + std::to_string(found.size()) + " neighbors");
    std::vector<SVertex> out;
    for (auto& [key, w] : found) out.push_back(w);
    return out;
}

}  // namespace

std::vector<SVertex> neighbors(const SVertex& v) {
    static std::mutex lock;
    static std::map<std::string, std::vector<SVertex>> cache;
    const std::string key = v.n.key();
    {
        std::lock_guard<std::mutex> guard(lock);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::vector<SVertex> out = compute_neighbors(v);
    std::lock_guard<std::mutex> guard(lock);
    return cache.emplace(key, std::move(out)).first->second;
}

std::vector<SVertex> children(const SVertex& v, const SVertex* came_from) {
    std::vector<SVertex> out = neighbors(v);
    if (came_from) out.erase(std::remove(out.begin(), out.end(), *came_from), out.end());
    return out;
}

TPath TPath::parent() const {
    if (vertices.size() < 2) throw std::invalid_argument("the root path has no parent");
    return TPath{std::vector<SVertex>(vertices.begin(), vertices.end() - 1)};
}

std::vector<TPath> extensions(const TPath& p) {
    const SVertex* from = p.length() >= 1 ? &p.vertices[p.vertices.size() - 2] : nullptr;
    std::vector<TPath> out;
    for (const SVertex& c : children(p.last(), from)) {
        TPath q = p;
        q.vertices.push_back(c);
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<TPath> paths_of_length(int length) {
    std::vector<TPath> layer{TPath{{root_vertex()}}};
    for (int d = 0; d < length; ++d) {
        std::vector<TPath> next;
        for (const TPath& p : layer) {
            std::vector<TPath> ext = extensions(p);
            next.insert(next.end(), ext.begin(), ext.end());
        }
        layer = std::move(next);
    }
    return layer;
}

bool is_valid_path(const TPath& p) {
    if (p.vertices.empty() || !p.vertices.front().is_root()) return false;
    for (std::size_t i = 1; i < p.vertices.size(); ++i) {
        const auto adj = neighbors(p.vertices[i - 1]);
        if (std::find(adj.begin(), adj.end(), p.vertices[i]) == adj.end()) return false;
        if (i >= 2 && p.vertices[i] == p.vertices[i - 2]) return false;
    }
    return true;
}

Subgroup path_subgroup(const TPath& p) {
    if (!is_valid_path(p)) throw std::invalid_argument("not a non-backtracking path from v0");
    const int n = p.length(), m = p.last().m();
    if (n < m || (n - m) % 2 != 0) throw invariant_violation("path length and vertex level differ by an odd amount");
    const int k = (n - m) / 2;
    std::vector<Vec4> gens;
    for (const Vec4& g : p.last().n.basis()) gens.push_back(g * (1 << k));
    for (int i = 0; i < 4; ++i) gens.push_back(unit(i) * (1 << (n - k)));
    return Subgroup(n, gens);
}

PairingCheck quotient_pairing_check(const Subgroup& lagrangian, const LevelPairing& pairing) {
    if (lagrangian.level() != 1 || !lagrangian.is_maximal_isotropic())
        throw std::invalid_argument("quotient pairing check needs a Lagrangian at level 1");
    const LevelPairing pair =
        pairing ? pairing : LevelPairing([](const Vec4& p, const Vec4& q) { return symp_form(p, q, 2); });
    std::vector<Vec4> gens = lagrangian.basis();
    for (int i = 0; i < 4; ++i) gens.push_back(2 * unit(i));
    const Subgroup pre(2, gens);
    const Subgroup kernel = lagrangian.embedded();
    const std::vector<Vec4> elems = pre.elements();
    const std::vector<Vec4> kern = kernel.elements();
    std::vector<Vec4> reps;
    for (const Vec4& x : elems)
        if (std::none_of(reps.begin(), reps.end(), [&](const Vec4& r) { return kernel.contains(x - r); }))
            reps.push_back(x);

    PairingCheck out;
    out.cosets = static_cast<int>(reps.size());
    auto fail = [&](const std::string& what) {
        out.pass = false;
        out.counterexample = what;
        return out;
    };
    if (reps.size() != 16) return fail("quotient has " + std::to_string(reps.size()) + " elements, expected 16");
    for (const Vec4& p : elems)
        for (const Vec4& q : elems) {
            const int v = pair(p, q);
            if (v != 0 && v != 2) return fail("value " + std::to_string(v) + " at " + to_string(p) + "," + to_string(q));
            for (const Vec4& k : kern)
                if (pair(reduce(p + k, 2), q) != v)
                    return fail("not well defined: " + to_string(p) + " vs " + to_string(reduce(p + k, 2)) +
                                " against " + to_string(q));
        }
    for (const Vec4& p : reps)
        if (pair(p, p) != 0) return fail("not alternating at " + to_string(p));
    for (const Vec4& p : reps)
        for (const Vec4& p2 : reps)
            for (const Vec4& q : reps)
                if (pair(reduce(p + p2, 2), q) != (pair(p, q) + pair(p2, q)) % 4)
                    return fail("not bilinear at " + to_string(p) + "+" + to_string(p2) + " against " + to_string(q));
    for (const Vec4& p : reps) {
        if (kernel.contains(p)) continue;
        if (std::all_of(reps.begin(), reps.end(), [&](const Vec4& q) { return pair(p, q) == 0; }))
            return fail("degenerate: " + to_string(p) + " pairs trivially with everything");
    }
    return out;
}

std::vector<Mat4> symplectic_group_level1() {
    std::vector<Mat4> out;
    for (unsigned bits = 0; bits < (1U << 16); ++bits) {
        Mat4 a;
        for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = static_cast<int>(bits >> i & 1U);
        if (is_symplectic(a, 1)) out.push_back(a);
    }
    return out;
}

std::vector<Subgroup> tree_subgroups(int depth) {
    std::map<std::string, Subgroup> found;
    for (int d = 0; d <= depth; ++d)
        for (const TPath& p : paths_of_length(d)) {
            Subgroup s = path_subgroup(p);
            found.emplace(s.key(), s);
        }
    std::vector<Subgroup> out;
    for (auto& [key, s] : found) out.push_back(s);
    return out;
}

namespace {

bool fixes_all(const Mat4& a, const std::vector<Subgroup>& subs) {
    for (const Subgroup& s : subs) {
        if (s.level() == 0) continue;
        const Mat4 ak = a.unaryExpr([&](int v) { return mod(v, s.level()); });
        for (const Vec4& r : s.basis())
            if (!s.contains(Vec4(ak * r))) return false;
    }
    return true;
}

std::string mat_key(const Mat4& a) { return to_string(a); }

void sort_unique(std::vector<Mat4>& v) {
    std::sort(v.begin(), v.end(), [](const Mat4& a, const Mat4& b) { return mat_key(a) < mat_key(b); });
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Bit (4 i + j) of a 16-bit mask is entry (i, j) of a 4x4 matrix over F2.
std::uint16_t to_bits(const Mat4& a) {
    std::uint16_t b = 0;
    for (int i = 0; i < 16; ++i)
        if (a(i / 4, i % 4) & 1) b = static_cast<std::uint16_t>(b | (1U << i));
    return b;
}

Mat4 from_bits(std::uint16_t b) {
    Mat4 a;
    for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = b >> i & 1U;
    return a;
}

// Level-2 symplectic lifts of a level-1 symplectic a0: a0 + 2E with
// Y + Y^T = (Omega - a0^T Omega a0)/2 mod 2 where Y = a0^T Omega E.
template <class Visit>
void for_each_lift(const Mat4& a0, Visit&& visit) {
    const Mat4 g = symplectic_gram();
    const Mat4 delta_full = g - a0.transpose() * g * a0;
    const std::uint16_t delta = to_bits(delta_full.unaryExpr([](int v) { return mod(v, 2) / 2; }));
    const Mat4 t = (a0.transpose() * g).unaryExpr([](int v) { return mod(v, 1); });
    std::array<std::uint16_t, 16> y_of_unit{};
    for (int k = 0; k < 16; ++k) {
        Mat4 e = Mat4::Zero();
        e(k / 4, k % 4) = 1;
        y_of_unit[static_cast<std::size_t>(k)] = to_bits(t * e);
    }
    static const std::vector<std::uint16_t> transposed = [] {
        std::vector<std::uint16_t> tab(1U << 16);
        for (unsigned y = 0; y < tab.size(); ++y)
            for (int i = 0; i < 16; ++i)
                if (y >> i & 1U) tab[y] = static_cast<std::uint16_t>(tab[y] | (1U << ((i % 4) * 4 + i / 4)));
        return tab;
    }();
    auto sym = [](std::uint16_t y) { return static_cast<std::uint16_t>(y ^ transposed[y]); };
    // Gray-code walk over E keeps Y incrementally.
    std::uint16_t y = 0, e = 0;
    for (unsigned step = 0; step < (1U << 16); ++step) {
        if (step) {
            const int bit = std::countr_zero(step);
            e = static_cast<std::uint16_t>(e ^ (1U << bit));
            y = static_cast<std::uint16_t>(y ^ y_of_unit[static_cast<std::size_t>(bit)]);
        }
        if (sym(y) == delta) visit(Mat4((a0 + 2 * from_bits(e)).unaryExpr([](int v) { return mod(v, 2); })));
    }
}

}  // namespace

ScalarFixResult scalar_fix_exhaustive(int level) {
    if (level < 1 || level > 2) throw resource_limit("exhaustive scalar fixing is capped at level 2");
    const std::vector<Subgroup> subs = tree_subgroups(level);
    ScalarFixResult out;
    out.subgroups = static_cast<int>(subs.size());
    const std::vector<Mat4> base = symplectic_group_level1();
    if (level == 1) {
        out.group_order = base.size();
        for (const Mat4& a : base)
            if (fixes_all(a, subs)) out.fixers.push_back(a);
    } else {
        for (const Mat4& a0 : base)
            for_each_lift(a0, [&](const Mat4& a) {
                if (!is_symplectic(a, 2)) throw invariant_violation("lift is not symplectic mod 4");
                ++out.group_order;
                if (fixes_all(a, subs)) out.fixers.push_back(a);
            });
    }
    sort_unique(out.fixers);
    return out;
}

ScalarFixResult scalar_fix_sampled(int level, std::uint64_t samples, std::uint64_t seed) {
    if (level != 2) throw std::invalid_argument("sampled scalar fixing is implemented at level 2");
    const std::vector<Subgroup> subs = tree_subgroups(level);
    const std::vector<Mat4> base = symplectic_group_level1();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, base.size() - 1);
    std::uniform_int_distribution<unsigned> bits(0, (1U << 16) - 1);
    ScalarFixResult out;
    out.exhaustive = false;
    out.subgroups = static_cast<int>(subs.size());
    while (out.group_order < samples) {
        const Mat4 a = (base[pick(rng)] + 2 * from_bits(static_cast<std::uint16_t>(bits(rng))))
                           .unaryExpr([](int v) { return mod(v, 2); });
        if (!is_symplectic(a, 2)) continue;
        ++out.group_order;
        if (fixes_all(a, subs)) out.fixers.push_back(a);
    }
    for (int s : {1, 3})
        if (fixes_all(Mat4(Mat4::Identity() * s), subs)) out.fixers.push_back(Mat4::Identity() * s);
    sort_unique(out.fixers);
    return out;
}

std::string to_string(const Vec4& v) {
    return "[" + std::to_string(v(0)) + "," + std::to_string(v(1)) + "," + std::to_string(v(2)) + "," +
           std::to_string(v(3)) + "]";
}

std::string to_string(const Mat4& a) {
    std::string out = "[";
    for (int i = 0; i < 4; ++i) out += (i ? "," : "") + to_string(Vec4(a.row(i).transpose()));
    return out + "]";
}

}  // namespace rtower

#include "rtower/treebuild.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "rtower/mumford.hpp"

namespace rtower {

namespace {

// Sign and odd-exponent primes of a nonzero integer.
std::vector<std::string> square_class_of(mpz_class n) {
    std::vector<std::string> out;
    if (n < 0) {
        out.push_back("-1");
        n = -n;
    }
    for (unsigned long p = 2; p <= 1000000 && mpz_class(p) * p <= n; ++p) {
        int e = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            ++e;
        }
        if (e % 2) out.push_back(std::to_string(p));
    }
    if (n > 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0)
            throw resource_limit("cannot factor " + n.get_str() + " by trial division");
        out.push_back(n.get_str());
    }
    return out;
}

int f2_rank(std::vector<std::vector<std::uint8_t>> rows) {
    int rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t c = 0; c < cols; ++c) {
        auto pivot = std::find_if(rows.begin() + rank, rows.end(), [&](const auto& r) { return r[c] != 0; });
        if (pivot == rows.end()) continue;
        std::swap(*pivot, rows[static_cast<std::size_t>(rank)]);
        for (auto& r : rows)
            if (&r != &rows[static_cast<std::size_t>(rank)] && r[c])
                for (std::size_t k = 0; k < cols; ++k) r[k] ^= rows[static_cast<std::size_t>(rank)][k];
        ++rank;
    }
    return rank;
}

// Points from towers with no common extension compare unequal.
bool same_points(const std::vector<ProjPoint>& a, const std::vector<ProjPoint>& b) {
    if (a.size() != b.size()) return false;
    try {
        for (const ProjPoint& p : a)
            if (std::find(b.begin(), b.end(), p) == b.end()) return false;
    } catch (const context_mismatch&) {
        return false;
    }
    return true;
}

// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the first failure by index.
template <class F>
void parallel_for(std::size_t n, int threads, F body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

void compute_curve(DecoratedVertex& u, const DecoratedVertex& w) {
    try {
        CurveInField c = richelot_curve(*w.curve, QuadraticSplitting(u.matrix), u.context);
        u.curve = c.curve;
        u.image = SplittingClass(c.image);
        u.curve_context = c.context;
    } catch (const split_jacobian& e) {
        throw split_jacobian("vertex " + std::to_string(u.id) + " " + u.cls->key() + ": " + e.what());
    } catch (const invariant_violation& e) {
        throw invariant_violation("vertex " + std::to_string(u.id) + ": " + e.what());
    }
}

std::vector<Element> alpha_elements(const std::vector<Rational>& alphas) {
    return std::vector<Element>(alphas.begin(), alphas.end());
}

Element a_ij(const std::vector<Rational>& alphas, int i, int j) {
    return Element(alphas[static_cast<std::size_t>(i)] - alphas[static_cast<std::size_t>(j)]);
}

}  // namespace

SpecializationReport validate_specialization(const std::vector<Rational>& alphas) {
    if (alphas.size() != 5) throw degenerate_input("a specialization has exactly five values");
    SpecializationReport rep;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j)
            if (alphas[i] == alphas[j]) {
                rep.message = "repeated value " + to_string(alphas[i]);
                return rep;
            }
    rep.squarefree = is_squarefree(root_curve(alphas).f);

    std::vector<std::vector<std::string>> classes;
    std::map<std::string, std::size_t> column;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            Rational a = alphas[static_cast<std::size_t>(i)] - alphas[static_cast<std::size_t>(j)];
            // p/q and p*q share a square class.
            classes.push_back(square_class_of(a.get_num() * a.get_den()));
            for (const std::string& p : classes.back()) column.emplace(p, column.size());
        }
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& c : classes) {
        std::vector<std::uint8_t> r(column.size(), 0);
        for (const std::string& p : c) r[column.at(p)] = 1;
        rows.push_back(std::move(r));
    }
    rep.rank = f2_rank(rows);
    // a_ij a_ji = -a_ij^2, so sqrt(-1) lies in K'_2: -1 must stay outside the span as well.
    std::vector<std::uint8_t> minus_one(column.size() + 1, 0);
    minus_one.back() = 1;
    for (auto& r : rows) r.push_back(0);
    if (column.count("-1")) {
        minus_one.back() = 0;
        minus_one[column.at("-1")] = 1;
    }
    rows.push_back(std::move(minus_one));
    rep.sign_independent = f2_rank(std::move(rows)) == rep.rank + 1;
    rep.pass = rep.squarefree && rep.rank == 10 && rep.sign_independent;
    if (rep.pass)
        rep.message = "ok";
    else if (rep.rank < 10)
        rep.message = "square classes of the differences have rank " + std::to_string(rep.rank);
    else
        rep.message = "-1 lies in the span of the square classes of the differences";
    return rep;
}

Curve root_curve(const std::vector<Rational>& alphas) {
    if (alphas.size() != 5) throw degenerate_input("a specialization has exactly five values");
    return curve_from_roots(alpha_elements(alphas));
}

int DecoratedTree::count_at(int d) const {
    return static_cast<int>(std::count_if(vertices.begin(), vertices.end(),
                                          [d](const DecoratedVertex& v) { return v.depth == d; }));
}

DecoratedTree build_tree(const std::vector<Rational>& alphas, int depth, const BuildOptions& opts) {
    if (depth < 0) throw degenerate_input("depth must be nonnegative");
    if (depth > opts.cap)
        throw resource_limit("depth " + std::to_string(depth) + " exceeds the cap " + std::to_string(opts.cap));
    DecoratedTree tree;
    tree.alphas = alphas;
    tree.depth = depth;
    DecoratedVertex root;
    root.curve = root_curve(alphas);
    tree.vertices.push_back(std::move(root));

    std::vector<int> layer{0};
    for (int d = 1; d <= depth; ++d) {
        std::vector<int> next;
        for (int wid : layer) {
            const DecoratedVertex& w = tree.vertices[static_cast<std::size_t>(wid)];
            std::vector<SplittingClass> classes = enumerate_classes(w.curve->branch);
            const TowerContext ctx = w.curve_context;
            std::vector<DecoratedVertex> kids;
            for (SplittingClass& c : classes) {
                if (w.image && c == *w.image) continue;
                DecoratedVertex u;
                u.id = static_cast<int>(tree.vertices.size() + kids.size());
                u.parent = wid;
                u.depth = d;
                u.matrix = matrix_m(c.triple());
                u.det_g = det3(u.matrix);
                u.cls = std::move(c);
                u.context = ctx;
                u.curve_context = ctx;
                kids.push_back(std::move(u));
            }
            for (DecoratedVertex& u : kids) {
                tree.vertices[static_cast<std::size_t>(wid)].children.push_back(u.id);
                next.push_back(u.id);
                tree.vertices.push_back(std::move(u));
            }
        }
        if (d < depth || opts.leaf_curves) {
            parallel_for(next.size(), opts.threads, [&](std::size_t i) {
                DecoratedVertex& u = tree.vertices[static_cast<std::size_t>(next[i])];
                compute_curve(u, tree.vertices[static_cast<std::size_t>(u.parent)]);
            });
            for (int id : next) {
                const DecoratedVertex& u = tree.vertices[static_cast<std::size_t>(id)];
                for (int k = u.context.height() + 1; k <= u.curve_context.height(); ++k)
                    tree.radicands.push_back({u.curve_context.radicand(k), id, d + 1});
            }
        }
        layer = std::move(next);
    }
    return tree;
}

bool DecorationReport::pass() const {
    return std::all_of(clauses.begin(), clauses.end(), [](const ClauseReport& c) { return c.pass; });
}

DecorationReport validate_decoration(const DecoratedTree& tree) {
    ClauseReport shape{"shape", true, 0, {}}, a{"a", true, 0, {}}, b{"b", true, 0, {}}, c{"c", true, 0, {}};
    auto fail = [](ClauseReport& r, const std::string& why) {
        if (r.pass) r.counterexample = why;
        r.pass = false;
    };
    const auto& vs = tree.vertices;
    const auto vertex = [&](int id) -> const DecoratedVertex& { return vs[static_cast<std::size_t>(id)]; };
    if (vs.empty() || vs.front().parent != -1 || vs.front().cls) fail(shape, "missing or malformed root");

    const Curve root = root_curve(tree.alphas);
    std::map<int, std::optional<SplittingClass>> ri_cache;
    for (const DecoratedVertex& w : vs) {
        ++shape.checked;
        const std::size_t want = w.depth >= tree.depth ? 0 : (w.depth == 0 ? 15 : 14);
        if (w.children.size() != want)
            fail(shape, "vertex " + std::to_string(w.id) + " has " + std::to_string(w.children.size()) + " children");
        for (int k : w.children)
            if (k <= 0 || k >= static_cast<int>(vs.size()) || vertex(k).parent != w.id ||
                vertex(k).depth != w.depth + 1 || !vertex(k).cls)
                fail(shape, "vertex " + std::to_string(w.id) + " has a malformed child " + std::to_string(k));
        if (!shape.pass) continue;

        for (std::size_t i = 0; i < w.children.size(); ++i)
            for (std::size_t j = i + 1; j < w.children.size(); ++j) {
                ++a.checked;
                const DecoratedVertex &u = vertex(w.children[i]), &v = vertex(w.children[j]);
                if (*u.cls == *v.cls)
                    fail(a, "siblings " + std::to_string(u.id) + " and " + std::to_string(v.id) + " share " +
                                u.cls->key());
            }
        for (int k : w.children) {
            const DecoratedVertex& u = vertex(k);
            if (w.depth == 0) {
                ++b.checked;
                if (!same_points(u.cls->support(), root.branch))
                    fail(b, "vertex " + std::to_string(u.id) + " has support " + u.cls->key());
                continue;
            }
            ++c.checked;
            auto it = ri_cache.find(w.id);
            if (it == ri_cache.end()) {
                std::optional<SplittingClass> ri;
                try {
                    ri = richelot_class(*w.cls, w.context).cls;
                } catch (const std::exception& e) {
                    fail(c, "Ri of vertex " + std::to_string(w.id) + " cannot be formed: " + e.what());
                }
                it = ri_cache.emplace(w.id, ri).first;
            }
            if (!it->second) continue;
            const SplittingClass& ri = *it->second;
            if (!same_points(u.cls->support(), ri.support()))
                fail(c, "vertex " + std::to_string(u.id) + " support differs from |Ri| of vertex " +
                            std::to_string(w.id));
            else if (*u.cls == ri)
                fail(c, "vertex " + std::to_string(u.id) + " equals Ri of vertex " + std::to_string(w.id));
        }
    }
    return {{shape, a, b, c}};
}

std::vector<Element> field_generators(const DecoratedTree& tree, int n) {
    if (n < 0 || n > tree.depth) throw degenerate_input("generator depth exceeds the tree depth");
    std::vector<Element> out;
    std::set<std::string> seen;
    for (const DecoratedVertex& v : tree.vertices) {
        if (v.depth == 0 || v.depth > n) continue;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (seen.insert(to_string(v.matrix(i, j))).second) out.push_back(v.matrix(i, j));
    }
    return out;
}

TowerContext merged_tower(const DecoratedTree& tree, int n) {
    if (n > 2) throw resource_limit("merged towers are only built for n <= 2");
    TowerContext ctx;
    for (const RadicandRecord& r : tree.radicands) {
        if (r.field_level > n) continue;
        if (!r.radicand.is_rational())
            throw invariant_violation("non-rational radicand below level 2 at vertex " + std::to_string(r.source_vertex));
        ctx = adjoin_sqrt(Element(r.radicand.rational()), ctx).context;
    }
    return ctx;
}

CheckResult closed_form_check(const std::vector<Rational>& alphas, const std::vector<ProjPoint>& branch,
                              const TowerContext& ctx) {
    const std::vector<Element> al = alpha_elements(alphas);
    bool inside = true;
    auto root_in = [&](const Element& x) {
        AdjoinResult r = adjoin_sqrt(x, ctx);
        inside = inside && !r.extended;
        return r.root;
    };
    const Element s1 = root_in((al[0] - al[2]) * (al[0] - al[3]) * (al[1] - al[2]) * (al[1] - al[3]));
    const Element s2 = root_in((al[0] - al[4]) * (al[1] - al[4]));
    const Element s3 = root_in((al[2] - al[4]) * (al[3] - al[4]));
    const Element den = -al[0] - al[1] + al[2] + al[3];
    const Element num = -al[0] * al[1] + al[2] * al[3];
    const std::vector<ProjPoint> expected{ProjPoint((num + s1) / den), ProjPoint((num - s1) / den),
                                          ProjPoint(al[4] + s2),      ProjPoint(al[4] - s2),
                                          ProjPoint(al[4] + s3),      ProjPoint(al[4] - s3)};
    CheckResult out{"closed_forms", inside && same_points(branch, expected), 6, {}};
    out.detail = inside ? "six closed forms" : "a closed-form radical is missing from the tower";
    return out;
}

std::vector<CheckResult> verify_k2prime(const DecoratedTree& tree) {
    if (tree.depth < 2) throw degenerate_input("the K'_2 checks need a tree of depth at least 2");
    const std::vector<Element> al = alpha_elements(tree.alphas);
    std::vector<CheckResult> out;

    // (i) Closed forms at the depth-1 vertex [{a1,a2},{a3,a4},{a5,inf}].
    CheckResult closed{"k2prime.closed_forms", true, 0, {}};
    const SplittingClass target(PairTriple({Pair{ProjPoint(al[0]), ProjPoint(al[1])},
                                            Pair{ProjPoint(al[2]), ProjPoint(al[3])},
                                            Pair{ProjPoint(al[4]), ProjPoint::infinity()}}));
    auto it = std::find_if(tree.vertices.begin(), tree.vertices.end(),
                           [&](const DecoratedVertex& v) { return v.depth == 1 && *v.cls == target; });
    if (it == tree.vertices.end() || !it->curve) {
        closed.pass = false;
        closed.detail = "vertex " + target.key() + " not found";
    } else {
        closed = closed_form_check(tree.alphas, it->curve->branch, it->curve_context);
        closed.name = "k2prime.closed_forms";
        closed.detail += "; vertex " + std::to_string(it->id);
    }
    out.push_back(closed);

    // (ii) K'_2 = Q(sqrt(a_ij a_lm)) both ways.
    const TowerContext k2 = merged_tower(tree, 2);
    std::vector<Element> a;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) a.push_back(a_ij(tree.alphas, i, j));
    // Ordered pairs: a_12 a_34 / a_21 a_34 = -1.
    TowerContext pairs = adjoin_sqrt(Element(-1), TowerContext()).context;
    std::vector<Element> pair_radicands{Element(-1)};
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            pair_radicands.push_back(a[i] * a[j]);
            pairs = adjoin_sqrt(pair_radicands.back(), pairs).context;
        }
    CheckResult incl{"k2prime.inclusion", true, 0, {}};
    std::string bad;
    for (int k = 1; k <= k2.height(); ++k)
        if (!is_square(k2.radicand(k), pairs)) bad = "radicand " + k2.radicand_text(k) + " not a square in Q(sqrt(a a'))";
    for (const Element& r : pair_radicands)
        if (!is_square(r, k2)) bad = to_string(r) + " not a square in K'_2";
    const std::vector<Element> gens = field_generators(tree, 2);
    for (const Element& g : gens)
        if (!embed(g, k2) || !embed(g, pairs)) bad = "generator " + to_string(g) + " does not embed";
    incl.pass = bad.empty() && k2.height() == pairs.height();
    incl.count = static_cast<int>(gens.size());
    incl.detail = bad.empty() ? "height " + std::to_string(k2.height()) + " = " + std::to_string(pairs.height()) : bad;
    out.push_back(incl);

    // (iii) sqrt(a_ij) is not in K'_2.
    CheckResult nonsq{"k2prime.sqrt_a_excluded", true, 0, {}};
    for (const Element& x : a) {
        ++nonsq.count;
        if (is_square(x, k2)) {
            nonsq.pass = false;
            nonsq.detail = to_string(x) + " is a square in K'_2";
        }
    }
    out.push_back(nonsq);
    return out;
}

CheckResult mumford_bridge(const DecoratedTree& tree) {
    CheckResult out{"mumford.bridge", true, 0, {}};
    const std::vector<Element> al = alpha_elements(tree.alphas);
    auto label = [&](const ProjPoint& p) {
        if (p.is_infinity()) return mumford::kInfinity;
        for (int i = 0; i < 5; ++i)
            if (p.value() == al[static_cast<std::size_t>(i)]) return i;
        throw invariant_violation("depth-1 point " + to_string(p) + " is not a branch value");
    };
    std::set<mumford::Subgroup> seen;
    for (const DecoratedVertex& v : tree.vertices) {
        if (v.depth != 1) continue;
        mumford::LabelTriple t;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 2; ++k)
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = label(v.cls->triple()[i][static_cast<std::size_t>(k)]);
        const mumford::Subgroup s = mumford::subgroup_of(mumford::canonical(t));
        if (!mumford::is_isotropic(s)) {
            out.pass = false;
            out.detail = "class " + v.cls->key() + " gives a non-isotropic subgroup";
        }
        seen.insert(s);
        ++out.count;
    }
    const std::vector<mumford::Subgroup> all = mumford::maximal_isotropics();
    if (seen != std::set<mumford::Subgroup>(all.begin(), all.end())) {
        out.pass = false;
        out.detail = "classes do not exhaust the maximal isotropic subgroups";
    }
    return out;
}

}  // namespace rtower

#include "rtower/suites.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "rtower/mumford.hpp"
#include "rtower/symplectic.hpp"

namespace rtower {

namespace {

CheckResult check(std::string name) { return {std::move(name), true, 0, {}}; }

void fail(CheckResult& c, const std::string& why) {
    if (c.pass) c.detail = why;
    c.pass = false;
}

std::string str(std::uint64_t n) { return std::to_string(n); }

bool same_support(const std::vector<ProjPoint>& a, const std::vector<ProjPoint>& b) {
    return a.size() == b.size() && std::all_of(a.begin(), a.end(), [&](const ProjPoint& p) {
               return std::find(b.begin(), b.end(), p) != b.end();
           });
}

// Runs body, stamping its wall time and turning unexpected exceptions into failures.
template <class F>
void timed(std::vector<CheckResult>& out, const std::function<void(const std::string&, double)>& on_timing,
           const std::string& name, F body) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t before = out.size();
    try {
        body();
    } catch (const resource_limit&) {
        throw;
    } catch (const std::exception& e) {
        CheckResult c = check(name);
        fail(c, std::string("exception: ") + e.what());
        out.push_back(c);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_timing && out.size() > before) on_timing(name, secs);
}

SplittingClass closed_form_class(const std::vector<Rational>& alphas) {
    const std::vector<Element> al(alphas.begin(), alphas.end());
    return SplittingClass(PairTriple({Pair{ProjPoint(al[0]), ProjPoint(al[1])},
                                      Pair{ProjPoint(al[2]), ProjPoint(al[3])},
                                      Pair{ProjPoint(al[4]), ProjPoint::infinity()}}));
}

}  // namespace

const std::vector<std::string>& SuiteRunner::suite_names() {
    static const std::vector<std::string> names{"classes", "richelot", "mumford", "symplectic", "decoration", "k2prime"};
    return names;
}

bool SuiteRunner::needs_alphas(const std::string& suite) { return suite != "symplectic"; }

std::vector<CheckResult> SuiteRunner::run(const std::string& suite) {
    if (suite == "all") {
        std::vector<CheckResult> out;
        for (const std::string& s : suite_names()) {
            std::vector<CheckResult> part = run(s);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    if (suite == "classes") return classes();
    if (suite == "richelot") return richelot();
    if (suite == "mumford") return mumford();
    if (suite == "symplectic") return symplectic();
    if (suite == "decoration") return decoration();
    if (suite == "k2prime") return k2prime();
    throw degenerate_input("unknown suite " + suite);
}

const DecoratedTree& SuiteRunner::tree() {
    if (!tree_) {
        BuildOptions b;
        b.cap = opts_.cap;
        b.threads = opts_.threads;
        const auto t0 = std::chrono::steady_clock::now();
        tree_ = build_tree(opts_.alphas, std::max(opts_.depth, 2), b);
        if (on_timing)
            on_timing("build_tree", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        int height = 0;
        for (const DecoratedVertex& v : tree_->vertices) height = std::max(height, v.curve_context.height());
        if (height > opts_.max_tower_height)
            throw resource_limit("tower height " + std::to_string(height) + " exceeds the cap " +
                                 std::to_string(opts_.max_tower_height));
    }
    return *tree_;
}

std::vector<CheckResult> SuiteRunner::classes() {
    std::vector<CheckResult> out;
    timed(out, on_timing, "classes.specialization", [&] {
        CheckResult c = check("classes.specialization");
        const SpecializationReport r = validate_specialization(opts_.alphas);
        c.pass = r.pass;
        c.count = r.rank;
        c.detail = r.message;
        out.push_back(c);
    });
    const Curve root = root_curve(opts_.alphas);
    timed(out, on_timing, "classes.count", [&] {
        CheckResult c = check("classes.count");
        const std::vector<SplittingClass> cls = enumerate_classes(root.branch);
        std::set<std::string> keys;
        for (const SplittingClass& r : cls) {
            keys.insert(r.key());
            if (!same_support(r.support(), root.branch)) fail(c, "class " + r.key() + " has the wrong support");
        }
        c.count = static_cast<int>(keys.size());
        if (cls.size() != 15 || keys.size() != 15) fail(c, "expected 15 distinct classes");
        out.push_back(c);
    });
    timed(out, on_timing, "classes.round_trip", [&] {
        CheckResult c = check("classes.round_trip");
        for (const SplittingClass& r : enumerate_classes(root.branch)) {
            const TripleInField n = map_n(matrix_m(r.triple()), TowerContext());
            if (SplittingClass(n.triple) != r) fail(c, "N(M(R)) differs from R for " + r.key());
            if (n.context.height() != 0) fail(c, "N(M(R)) left Q for " + r.key());
            ++c.count;
        }
        out.push_back(c);
    });
    return out;
}

std::vector<CheckResult> SuiteRunner::richelot() {
    std::vector<CheckResult> out;
    const Curve root = root_curve(opts_.alphas);
    const std::vector<SplittingClass> cls = enumerate_classes(root.branch);
    timed(out, on_timing, "richelot.dual_identity", [&] {
        CheckResult c = check("richelot.dual_identity");
        for (const SplittingClass& r : cls) {
            const QuadraticSplitting g = QuadraticSplitting::from_class(r);
            const QuadraticSplitting h = richelot_splitting(g);
            if (h.matrix() != dual_matrix(g.matrix())) fail(c, "H differs from the dual for " + r.key());
            if (h.det() != Element(2) * g.det() * g.det()) fail(c, "det(H) != 2 det(G)^2 for " + r.key());
            ++c.count;
        }
        out.push_back(c);
    });
    timed(out, on_timing, "richelot.squarefree", [&] {
        CheckResult c = check("richelot.squarefree");
        for (const SplittingClass& r : cls) {
            const Poly f = richelot_splitting(QuadraticSplitting::from_class(r)).product();
            if ((f.degree() != 5 && f.degree() != 6) || !is_squarefree(f))
                fail(c, "H1 H2 H3 is not a squarefree quintic or sextic for " + r.key());
            ++c.count;
        }
        out.push_back(c);
    });
    timed(out, on_timing, "richelot.closed_forms", [&] {
        const ClassInField ri = richelot_class(closed_form_class(opts_.alphas), TowerContext());
        CheckResult c = closed_form_check(opts_.alphas, ri.cls.support(), ri.context);
        c.name = "richelot.closed_forms";
        out.push_back(c);
    });
    timed(out, on_timing, "richelot.pushforward", [&] {
        CheckResult c = pushforward_check(root, opts_.push_points, opts_.seed);
        c.name = "richelot.pushforward";
        out.push_back(c);
    });
    return out;
}

std::vector<CheckResult> SuiteRunner::mumford() {
    using namespace rtower::mumford;
    std::vector<CheckResult> out;
    const std::vector<TwoTorsion> all = all_elements();
    timed(out, on_timing, "mumford.pairing", [&] {
        CheckResult c = check("mumford.pairing");
        c.count = static_cast<int>(all.size());
        if (all.size() != 16) fail(c, "expected 16 elements");
        for (const TwoTorsion& x : all) {
            if (pairing(x, x) != 1) fail(c, "not alternating");
            bool kernel = true;
            for (const TwoTorsion& y : all) {
                kernel = kernel && pairing(x, y) == 1;
                for (const TwoTorsion& z : all)
                    if (pairing(x + y, z) != pairing(x, z) * pairing(y, z)) fail(c, "not bilinear");
            }
            if (kernel && !x.is_zero()) fail(c, "degenerate");
        }
        out.push_back(c);
    });
    timed(out, on_timing, "mumford.isotropy", [&] {
        CheckResult c = check("mumford.isotropy");
        for (const TwoTorsion& x : all)
            for (const TwoTorsion& y : all) {
                if (x.is_zero() || y.is_zero() || x == y) continue;
                ++c.count;
                if ((pairing(x, y) == 1) != ((x.mask() & y.mask()) == 0))
                    fail(c, "isotropy differs from disjointness");
            }
        out.push_back(c);
    });
    timed(out, on_timing, "mumford.maximal_isotropic", [&] {
        CheckResult c = check("mumford.maximal_isotropic");
        std::set<mumford::Subgroup> found;
        for (const TwoTorsion& x : all)
            for (const TwoTorsion& y : all) {
                if (x.is_zero() || y.is_zero() || x == y) continue;
                const mumford::Subgroup s = span(x, y);
                if (is_isotropic(s)) found.insert(s);
            }
        std::set<mumford::Subgroup> from_classes;
        for (const LabelTriple& t : label_classes()) from_classes.insert(subgroup_of(t));
        c.count = static_cast<int>(found.size());
        if (found.size() != 15) fail(c, "expected 15 maximal isotropic subgroups");
        if (found != from_classes) fail(c, "subgroups do not match the 15 label classes");
        out.push_back(c);
    });
    timed(out, on_timing, "mumford.bridge", [&] { out.push_back(mumford_bridge(build_tree(opts_.alphas, 1))); });
    return out;
}

std::vector<CheckResult> SuiteRunner::symplectic() {
    std::vector<CheckResult> out;
    timed(out, on_timing, "symplectic.ball", [&] { out.push_back(symplectic_ball_check(2)); });
    timed(out, on_timing, "symplectic.paths", [&] { out.push_back(symplectic_path_check(3)); });
    timed(out, on_timing, "symplectic.quotient_pairing", [&] { out.push_back(symplectic_quotient_check()); });
    for (int level : {1, 2})
        timed(out, on_timing, "symplectic.scalars_level" + std::to_string(level), [&] {
            for (CheckResult& c : symplectic_scalar_checks(level, opts_.samples, opts_.seed, opts_.max_enum))
                out.push_back(c);
        });
    return out;
}

std::vector<CheckResult> SuiteRunner::decoration() {
    std::vector<CheckResult> out;
    const DecoratedTree& t = tree();
    timed(out, on_timing, "decoration.counts", [&] {
        CheckResult c = check("decoration.counts");
        int expected = 15;
        for (int d = 1; d <= t.depth; ++d, expected *= 14) {
            const int n = t.count_at(d);
            c.count += n;
            c.detail += (d > 1 ? "," : "") + std::to_string(n);
            if (n != expected) fail(c, "depth " + std::to_string(d) + " has " + std::to_string(n) + " vertices");
        }
        out.push_back(c);
    });
    timed(out, on_timing, "decoration.clauses", [&] {
        for (const ClauseReport& r : validate_decoration(t).clauses)
            out.push_back({"decoration.clause_" + r.clause, r.pass, r.checked, r.counterexample});
    });
    // Negative controls: each corruption must fail its own clause and leave the others passing.
    auto control = [&](const std::string& name, const std::string& clause, auto corrupt) {
        timed(out, on_timing, name, [&] {
            CheckResult c = check(name);
            DecoratedTree bad = t;
            corrupt(bad);
            for (const ClauseReport& r : validate_decoration(bad).clauses) {
                if (r.clause == clause && r.pass) fail(c, "clause " + clause + " did not fail");
                if (r.clause != clause && !r.pass) fail(c, "clause " + r.clause + " failed as well");
                if (r.clause == clause) c.detail = r.counterexample;
            }
            c.count = 1;
            out.push_back(c);
        });
    };
    // Corrupt leaves, so that no descendant inherits the damage.
    const auto last_at = [&](const DecoratedTree& tr, int depth) {
        for (auto it = tr.vertices.rbegin(); it != tr.vertices.rend(); ++it)
            if (it->depth == depth) return it->id;
        throw degenerate_input("no vertex at depth " + std::to_string(depth));
    };
    control("decoration.control_equal_siblings", "a", [&](DecoratedTree& bad) {
        DecoratedVertex& w = bad.vertices[static_cast<std::size_t>(last_at(bad, bad.depth - 1))];
        bad.vertices[static_cast<std::size_t>(w.children[1])].cls = bad.vertices[static_cast<std::size_t>(w.children[0])].cls;
    });
    control("decoration.control_backtrack", "c", [&](DecoratedTree& bad) {
        const DecoratedVertex& w = bad.vertices[static_cast<std::size_t>(last_at(bad, bad.depth - 1))];
        bad.vertices[static_cast<std::size_t>(w.children[0])].cls = richelot_class(*w.cls, w.context).cls;
    });
    return out;
}

std::vector<CheckResult> SuiteRunner::k2prime() {
    std::vector<CheckResult> out;
    timed(out, on_timing, "k2prime", [&] {
        const DecoratedTree& t = tree();
        for (CheckResult& c : verify_k2prime(t)) out.push_back(c);
    });
    return out;
}

CheckResult symplectic_ball_check(int radius) {
    CheckResult c = check("symplectic.ball");
    std::map<std::string, SVertex> ball;
    std::vector<SVertex> frontier{root_vertex()};
    ball.emplace(root_vertex().n.key(), root_vertex());
    for (int r = 0; r < radius; ++r) {
        std::vector<SVertex> next;
        for (const SVertex& w : frontier)
            for (const SVertex& u : neighbors(w))
                if (ball.emplace(u.n.key(), u).second) next.push_back(u);
        frontier = std::move(next);
    }
    // Connectivity of the induced subgraph, by its own search.
    std::set<std::string> reached{root_vertex().n.key()};
    std::queue<SVertex> todo;
    todo.push(root_vertex());
    while (!todo.empty()) {
        const SVertex w = todo.front();
        todo.pop();
        for (const SVertex& u : neighbors(w))
            if (ball.count(u.n.key()) && reached.insert(u.n.key()).second) todo.push(u);
    }
    for (const auto& [key, w] : ball) {
        const std::vector<SVertex> adj = neighbors(w);
        if (adj.size() != 15) fail(c, "vertex " + key + " has degree " + std::to_string(adj.size()));
        for (const SVertex& u : adj) {
            if (!u.n.is_maximal_isotropic() || (u.m() > 0 && u.n.contains_two_torsion()))
                fail(c, "neighbor " + u.n.key() + " is not a vertex");
            const std::vector<SVertex> back = neighbors(u);
            if (std::find(back.begin(), back.end(), w) == back.end()) fail(c, "adjacency is not symmetric at " + key);
        }
    }
    if (reached.size() != ball.size()) fail(c, "the ball is not connected");
    c.count = static_cast<int>(ball.size());
    if (c.pass) c.detail = "radius " + std::to_string(radius) + ", all degrees 15";
    return c;
}

CheckResult symplectic_path_check(int max_length) {
    CheckResult c = check("symplectic.paths");
    std::vector<TPath> layer{TPath{{root_vertex()}}};
    std::string counts;
    std::uint64_t expected = 15;
    for (int len = 1; len <= max_length; ++len, expected *= 14) {
        std::vector<TPath> next;
        for (const TPath& p : layer)
            for (TPath& q : extensions(p)) next.push_back(std::move(q));
        if (next.size() != expected) fail(c, "length " + std::to_string(len) + " has " + str(next.size()) + " paths");
        counts += (len > 1 ? "," : "") + str(next.size());
        for (const TPath& p : next) {
            ++c.count;
            const int gap = p.length() - p.last().m();
            if (gap < 0 || gap % 2) fail(c, "parity fails at level " + std::to_string(p.last().m()));
            const Subgroup nw = path_subgroup(p);
            if (nw.level() != len || !nw.is_maximal_isotropic()) fail(c, "N_w is not maximal isotropic");
            const Subgroup up = path_subgroup(p.parent()).embedded();
            if (!nw.contains(up) || nw.order() != 4 * up.order()) fail(c, "N_parent is not of index 4 in N_w");
            for (const Vec4& x : nw.basis())
                if (!up.contains(Vec4(2 * x))) fail(c, "N_w / N_parent is not of exponent 2");
        }
        layer = std::move(next);
    }
    if (c.pass) c.detail = "paths per length " + counts;
    return c;
}

CheckResult symplectic_quotient_check() {
    CheckResult c = check("symplectic.quotient_pairing");
    for (const SVertex& w : neighbors(root_vertex())) {
        const PairingCheck r = quotient_pairing_check(w.n);
        if (!r.pass || r.cosets != 16) fail(c, "Lagrangian " + w.n.key() + ": " + r.counterexample);
        ++c.count;
    }
    // Control: the pairing doubled once more is identically zero and must be rejected.
    const PairingCheck doubled = quotient_pairing_check(
        neighbors(root_vertex()).front().n, [](const Vec4& p, const Vec4& q) { return 2 * symp_form(p, q, 2) % 4; });
    if (doubled.pass) fail(c, "the degenerate control pairing was accepted");
    return c;
}

std::vector<CheckResult> symplectic_scalar_checks(int level, std::uint64_t samples, std::uint64_t seed,
                                                  std::uint64_t max_enum) {
    std::vector<CheckResult> out;
    if (level < 1 || level > 2) throw degenerate_input("scalar checks exist for levels 1 and 2");
    auto describe = [](const std::vector<Mat4>& fixers) {
        std::string s;
        for (const Mat4& a : fixers) s += (s.empty() ? "" : ";") + to_string(a);
        return s;
    };
    const Mat4 id = Mat4::Identity();
    if (level == 1) {
        CheckResult c = check("symplectic.scalars_level1");
        const ScalarFixResult r = scalar_fix_exhaustive(1);
        c.count = static_cast<int>(r.group_order);
        if (r.group_order != 720) fail(c, "expected 720 symplectic matrices mod 2");
        if (r.fixers != std::vector<Mat4>{id}) fail(c, "fixers: " + describe(r.fixers));
        if (c.pass) c.detail = "only the identity fixes all " + std::to_string(r.subgroups) + " subgroups";
        out.push_back(c);
        return out;
    }
    const std::vector<Mat4> scalars{id, Mat4(id * 3)};
    CheckResult ex = check("symplectic.scalars_level2_exhaustive");
    if (max_enum < 737280) throw resource_limit("level-2 enumeration exceeds max_enum");
    const ScalarFixResult r = scalar_fix_exhaustive(2);
    ex.count = static_cast<int>(r.group_order);
    if (r.fixers != scalars) fail(ex, "fixers: " + describe(r.fixers));
    if (ex.pass) ex.detail = "+-I fix all " + std::to_string(r.subgroups) + " subgroups; nothing else does";
    out.push_back(ex);

    CheckResult sm = check("symplectic.scalars_level2_sampled");
    if (samples > max_enum) throw resource_limit("sample count exceeds max_enum");
    const ScalarFixResult s = scalar_fix_sampled(2, samples, seed);
    sm.count = static_cast<int>(s.group_order);
    if (s.fixers != scalars) fail(sm, "fixers: " + describe(s.fixers));
    if (sm.pass) sm.detail = "seed " + str(seed) + ": no sampled non-scalar fixes all subgroups";
    out.push_back(sm);
    return out;
}

CheckResult pushforward_check(const Curve& c, int points, std::uint64_t seed) {
    CheckResult out = check("pushforward");
    const std::vector<SplittingClass> cls = enumerate_classes(c.branch);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(-60, 60), den(1, 7);
    std::set<int> used;
    int attempts = 0;
    for (int k = 0; k < points; ++attempts) {
        if (attempts > 20 * points) {
            fail(out, "too many degenerate samples");
            break;
        }
        const Element x0(Rational(num(rng), den(rng)));
        const Element rhs = c.d * c.f(x0);
        if (rhs.is_zero()) continue;
        const int which = k % static_cast<int>(cls.size());
        const QuadraticSplitting g = QuadraticSplitting::from_class(cls[static_cast<std::size_t>(which)]);
        const AdjoinResult y0 = adjoin_sqrt(rhs);
        try {
            const CurveInField img = richelot_curve(c, g, y0.context);
            const PushforwardResult p = pushforward_point(c, g, x0, y0.root, img.context);
            for (const AffinePoint& q : p.points)
                if (q.y * q.y != img.curve.d * img.curve.f(q.x))
                    fail(out, "image of x0 = " + to_string(x0) + " is off the curve");
        } catch (const degenerate_input&) {
            continue;  // z-quadratic degenerate at this x0; draw again
        }
        used.insert(which);
        ++k;
        ++out.count;
    }
    if (used.size() < 3) fail(out, "fewer than three splittings exercised");
    if (out.pass)
        out.detail = std::to_string(out.count) + " points, " + std::to_string(used.size()) + " splittings, seed " +
                     str(seed);
    return out;
}

}  // namespace rtower

#include "rtower/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtower/suites.hpp"
#include "rtower/symplectic.hpp"

namespace rtower::cli {

namespace {

using json = nlohmann::ordered_json;

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, sep);) out.push_back(trim(item));
    return out;
}

template <class T>
T number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    if (!(in >> v) || !in.eof()) throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
    return v;
}

json to_json(const std::vector<Rational>& qs) {
    json a = json::array();
    for (const Rational& q : qs) a.push_back(to_string(q));
    return a;
}

json to_json(const PairTriple& t) {
    json a = json::array();
    for (const Pair& p : t.pairs()) a.push_back(json::array({to_string(p[0]), to_string(p[1])}));
    return a;
}

json to_json(const Mat3& m) {
    json a = json::array();
    for (int i = 0; i < 3; ++i) a.push_back(json::array({to_string(m(i, 0)), to_string(m(i, 1)), to_string(m(i, 2))}));
    return a;
}

json to_json(const Curve& c) {
    json f = json::array(), b = json::array();
    for (const Element& e : c.f.coeffs()) f.push_back(to_string(e));
    for (const ProjPoint& p : c.branch) b.push_back(to_string(p));
    return json{{"D", to_string(c.d)}, {"f", f}, {"branch", b}};
}

json to_json(const CheckResult& c) {
    return json{{"name", c.name}, {"pass", c.pass}, {"count", c.count}, {"detail", c.detail}};
}

int emit(const json& j, const RunConfig& cfg, std::ostream& out) {
    const std::string text = j.dump(cfg.json_indent) + "\n";
    if (cfg.out.empty()) {
        out << text;
    } else {
        std::ofstream f(cfg.out);
        if (!f) throw usage_error("cannot write " + cfg.out);
        f << text;
    }
    return 0;
}

int report(const std::string& command, const std::vector<CheckResult>& checks, json header, const RunConfig& cfg,
           std::ostream& out) {
    json list = json::array();
    int passed = 0;
    for (const CheckResult& c : checks) {
        list.push_back(to_json(c));
        passed += c.pass;
    }
    const bool ok = passed == static_cast<int>(checks.size());
    json j{{"command", command}};
    for (auto& [k, v] : header.items()) j[k] = v;
    j["checks"] = list;
    j["passed"] = passed;
    j["failed"] = static_cast<int>(checks.size()) - passed;
    j["pass"] = ok;
    emit(j, cfg, out);
    return ok ? 0 : 1;
}

const std::vector<Rational>& require_alphas(const RunConfig& cfg) {
    if (!cfg.alphas) throw usage_error("--alphas is required (or an `alphas` line in --config)");
    if (cfg.alphas->size() != 5) throw usage_error("--alphas takes exactly five rationals");
    return *cfg.alphas;
}

void require_valid(const std::vector<Rational>& alphas) {
    const SpecializationReport r = validate_specialization(alphas);
    if (!r.pass) throw usage_error("specialization rejected: " + r.message);
}

std::uint64_t tree_size(int depth) {
    std::uint64_t total = 1, layer = 1;
    for (int d = 1; d <= depth; ++d) total += layer *= (d == 1 ? 15 : 14);
    return total;
}

SuiteOptions suite_options(const RunConfig& cfg) {
    SuiteOptions o;
    if (cfg.alphas) o.alphas = *cfg.alphas;
    o.depth = cfg.depth;
    o.cap = cfg.cap;
    o.threads = cfg.threads;
    o.seed = cfg.seed;
    o.samples = cfg.samples;
    o.push_points = cfg.push_points;
    o.max_tower_height = cfg.max_tower_height;
    o.max_enum = cfg.max_enum;
    return o;
}

void check_caps(const RunConfig& cfg) {
    if (cfg.cap <= 0 || cfg.max_tower_height <= 0 || cfg.max_vertices <= 0 || cfg.max_enum == 0 || cfg.threads <= 0)
        throw usage_error("caps and thread counts must be positive");
    if (cfg.depth < 1) throw usage_error("depth must be at least 1");
    if (cfg.depth > cfg.cap) throw usage_error("depth " + std::to_string(cfg.depth) + " exceeds the cap");
    if (tree_size(cfg.depth) > static_cast<std::uint64_t>(cfg.max_vertices))
        throw usage_error("a depth-" + std::to_string(cfg.depth) + " tree exceeds max_vertices");
}

json verify_header(const RunConfig& cfg) {
    json h{{"suite", cfg.suite}, {"seed", cfg.seed}};
    if (cfg.alphas) h["alphas"] = to_json(*cfg.alphas);
    h["depth"] = std::max(cfg.depth, 2);
    h["samples"] = cfg.samples;
    return h;
}

int cmd_verify(const RunConfig& cfg, bool timings, std::ostream& out, std::ostream& err) {
    const auto& names = SuiteRunner::suite_names();
    if (cfg.suite != "all" && std::find(names.begin(), names.end(), cfg.suite) == names.end())
        throw usage_error("unknown suite '" + cfg.suite + "'");
    const bool alphas_needed = cfg.suite == "all" || SuiteRunner::needs_alphas(cfg.suite);
    if (alphas_needed) require_alphas(cfg);
    check_caps(cfg);
    if (cfg.suite == "all" || cfg.suite == "decoration" || cfg.suite == "k2prime") require_valid(*cfg.alphas);
    SuiteRunner runner(suite_options(cfg));
    if (timings) runner.on_timing = [&err](const std::string& name, double s) { err << "timing " << name << " " << s << "s\n"; };
    return report("verify", runner.run(cfg.suite), verify_header(cfg), cfg, out);
}

int cmd_tree(const RunConfig& cfg, std::ostream& out) {
    const auto& alphas = require_alphas(cfg);
    check_caps(cfg);
    require_valid(alphas);
    BuildOptions b;
    b.cap = cfg.cap;
    b.threads = cfg.threads;
    const DecoratedTree t = build_tree(alphas, cfg.depth, b);
    json vs = json::array();
    for (const DecoratedVertex& v : t.vertices) {
        json j{{"id", v.id}};
        j["parent"] = v.parent < 0 ? json(nullptr) : json(v.parent);
        j["depth"] = v.depth;
        j["class"] = v.cls ? to_json(v.cls->triple()) : json(nullptr);
        j["matrix"] = v.cls ? to_json(v.matrix) : json(nullptr);
        j["curve"] = v.curve ? to_json(*v.curve) : json(nullptr);
        j["detG"] = v.cls ? json(to_string(v.det_g)) : json(nullptr);
        vs.push_back(std::move(j));
    }
    json tower = json::array();
    for (const RadicandRecord& r : t.radicands)
        tower.push_back({{"radicand", to_string(r.radicand)}, {"source_vertex", r.source_vertex}, {"field_level", r.field_level}});
    return emit(json{{"alphas", to_json(alphas)}, {"depth", t.depth}, {"vertices", vs}, {"tower", tower}}, cfg, out);
}

std::vector<ProjPoint> parse_points(const std::string& text, TowerContext& ctx) {
    std::vector<ProjPoint> pts;
    for (const std::string& s : split(text, ',')) pts.push_back(parse_point(s, ctx));
    return pts;
}

int cmd_classes(const RunConfig& cfg, const std::string& branch, std::ostream& out) {
    if (branch.empty()) throw usage_error("--branch b1,...,b6 is required");
    TowerContext ctx;
    const std::vector<ProjPoint> pts = parse_points(branch, ctx);
    if (pts.size() != 6) throw usage_error("--branch takes six points");
    const std::vector<SplittingClass> cls = enumerate_classes(pts);
    json list = json::array();
    for (const SplittingClass& c : cls) list.push_back(to_json(c.triple()));
    emit(json{{"command", "classes"}, {"count", cls.size()}, {"classes", list}}, cfg, out);
    return cls.size() == 15 ? 0 : 1;
}

int cmd_push(const RunConfig& cfg, const std::string& file, const std::string& point, std::ostream& out) {
    if (file.empty() || point.empty()) throw usage_error("push needs --splitting FILE and --point x,y");
    std::ifstream in(file);
    if (!in) throw usage_error("cannot read " + file);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw usage_error(std::string("bad splitting file: ") + e.what());
    }
    if (!doc.contains("roots") || !doc.contains("class")) throw usage_error("splitting file needs `roots` and `class`");
    TowerContext ctx;
    std::vector<Element> roots;
    for (const auto& r : doc["roots"]) roots.push_back(parse_element(r.get<std::string>(), ctx));
    Curve c = curve_from_roots(roots);
    if (doc.contains("D")) c.d = parse_element(doc["D"].get<std::string>(), ctx);
    std::array<Pair, 3> pairs{Pair{ProjPoint(0), ProjPoint(0)}, Pair{ProjPoint(0), ProjPoint(0)},
                              Pair{ProjPoint(0), ProjPoint(0)}};
    if (doc["class"].size() != 3) throw usage_error("`class` holds three pairs");
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& p = doc["class"][i];
        if (p.size() != 2) throw usage_error("`class` holds three pairs");
        pairs[i] = {parse_point(p[0].get<std::string>(), ctx), parse_point(p[1].get<std::string>(), ctx)};
    }
    const SplittingClass r{PairTriple(pairs)};
    for (const ProjPoint& p : r.support())
        if (std::find(c.branch.begin(), c.branch.end(), p) == c.branch.end())
            throw usage_error("class support differs from the branch set");
    const std::vector<std::string> xy = split(point, ',');
    if (xy.size() != 2) throw usage_error("--point takes x,y");
    const Element x0 = parse_element(xy[0], ctx);
    const Element y0 = parse_element(xy[1], ctx);
    const QuadraticSplitting g = QuadraticSplitting::from_class(r);
    const CurveInField img = richelot_curve(c, g, ctx);
    const PushforwardResult p = pushforward_point(c, g, x0, y0, img.context);
    json pts = json::array();
    bool on_curve = true;
    for (const AffinePoint& q : p.points) {
        on_curve = on_curve && q.y * q.y == img.curve.d * img.curve.f(q.x);
        pts.push_back({{"x", to_string(q.x)}, {"y", to_string(q.y)}});
    }
    emit(json{{"command", "push"}, {"class", to_json(r.triple())}, {"image", to_json(img.curve)}, {"points", pts},
              {"on_curve", on_curve}},
         cfg, out);
    return on_curve ? 0 : 1;
}

int cmd_symp(const RunConfig& cfg, int level, const std::string& what, std::ostream& out) {
    std::vector<CheckResult> checks;
    if (what == "regular") {
        if (level < 1 || level > 3) throw usage_error("regular checks take --level 1..3");
        checks.push_back(symplectic_ball_check(std::min(level, 2)));
        checks.push_back(symplectic_path_check(level));
    } else if (what == "scalars") {
        if (level < 1 || level > 2) throw usage_error("scalar checks take --level 1 or 2");
        checks = symplectic_scalar_checks(level, cfg.samples, cfg.seed, cfg.max_enum);
    } else if (what == "quotient") {
        if (level != 1) throw usage_error("quotient checks take --level 1");
        checks.push_back(symplectic_quotient_check());
    } else {
        throw usage_error("--check is one of regular, scalars, quotient");
    }
    return report("symp", checks, json{{"level", level}, {"check", what}, {"seed", cfg.seed}}, cfg, out);
}

}  // namespace

std::vector<Rational> parse_rationals(const std::string& text) {
    std::vector<Rational> out;
    for (const std::string& s : split(text, ',')) out.push_back(parse_rational(s));
    return out;
}

RunConfig load_config(const std::string& path, RunConfig cfg) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config " + path);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(n) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key == "alphas") cfg.alphas = parse_rationals(value);
        else if (key == "depth") cfg.depth = number<int>(key, value);
        else if (key == "suite") cfg.suite = value;
        else if (key == "out") cfg.out = value;
        else if (key == "cap") cfg.cap = number<int>(key, value);
        else if (key == "max_tower_height") cfg.max_tower_height = number<int>(key, value);
        else if (key == "max_vertices") cfg.max_vertices = number<int>(key, value);
        else if (key == "max_enum") cfg.max_enum = number<std::uint64_t>(key, value);
        else if (key == "samples") cfg.samples = number<std::uint64_t>(key, value);
        else if (key == "push_points") cfg.push_points = number<int>(key, value);
        else if (key == "seed") cfg.seed = number<std::uint64_t>(key, value);
        else if (key == "threads") cfg.threads = number<int>(key, value);
        else if (key == "json_indent") cfg.json_indent = number<int>(key, value);
        else throw std::invalid_argument(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    }
    return cfg;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Richelot isogeny trees over exact quadratic towers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, alphas_text, suite, out_path, branch, splitting_file, point, check;
    int depth = 0, threads = 0, json_indent = 0, level = 1;
    std::uint64_t seed = 0, samples = 0;
    bool timings = false;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--alphas", alphas_text, "five rationals a1,...,a5");
    app.add_option("--seed", seed, "seed for sampled checks");
    app.add_option("--threads", threads, "worker threads for tree building");
    app.add_option("--json-indent", json_indent, "JSON indentation (-1 for one line)");
    app.add_option("--samples", samples, "sampled level-2 symplectic matrices");
    app.add_option("--out", out_path, "write JSON here instead of standard output");
    app.add_flag("--timings", timings, "print per-check wall times to standard error");

    CLI::App* tree = app.add_subcommand("tree", "build the decorated tree and print it as JSON");
    tree->add_option("--depth", depth, "tree depth");
    CLI::App* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", suite, "classes|richelot|mumford|symplectic|decoration|k2prime|all");
    verify->add_option("--depth", depth, "tree depth for the decoration suite");
    CLI::App* classes = app.add_subcommand("classes", "the 15 splitting classes of a branch set");
    classes->add_option("--branch", branch, "six points b1,...,b6 (use inf for infinity)");
    CLI::App* push = app.add_subcommand("push", "push a point along a Richelot isogeny");
    push->add_option("--splitting", splitting_file, "JSON file with `roots` and `class`");
    push->add_option("--point", point, "x,y on the curve");
    CLI::App* symp = app.add_subcommand("symp", "checks on the symplectic graph");
    symp->add_option("--level", level, "level n");
    symp->add_option("--check", check, "regular|scalars|quotient");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path, cfg);
        if (app.count("--alphas")) cfg.alphas = parse_rationals(alphas_text);
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--threads")) cfg.threads = threads;
        if (app.count("--json-indent")) cfg.json_indent = json_indent;
        if (app.count("--samples")) cfg.samples = samples;
        if (app.count("--out")) cfg.out = out_path;
        if (tree->count("--depth") || verify->count("--depth")) cfg.depth = depth;
        if (verify->count("--suite")) cfg.suite = suite;

        if (*tree) return cmd_tree(cfg, out);
        if (*verify) return cmd_verify(cfg, timings, out, err);
        if (*classes) return cmd_classes(cfg, branch, out);
        if (*push) return cmd_push(cfg, splitting_file, point, out);
        return cmd_symp(cfg, level, check, out);
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const degenerate_input& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const resource_limit& e) {
        err << "error: resource limit: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace rtower::cli

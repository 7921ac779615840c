#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtower/treebuild.hpp"

namespace rtower {

struct SuiteOptions {
    std::vector<Rational> alphas;
    int depth = 3;                       // tree depth for the decoration checks
    int cap = 3;
    int threads = 1;
    std::uint64_t seed = 1;
    std::uint64_t samples = 100000;      // sampled level-2 symplectic matrices
    int push_points = 24;                // seeded pushforward samples
    int max_tower_height = 12;
    std::uint64_t max_enum = 1000000;    // largest exhaustive enumeration allowed
};

/// Runs named suites over one lazily built tree. Check order is fixed, so
/// reports are reproducible for a given configuration.
class SuiteRunner {
public:
    explicit SuiteRunner(SuiteOptions opts) : opts_(std::move(opts)) {}

    static const std::vector<std::string>& suite_names();
    /// Whether the suite reads the specialization.
    static bool needs_alphas(const std::string& suite);

    std::vector<CheckResult> run(const std::string& suite);

    std::vector<CheckResult> classes();
    std::vector<CheckResult> richelot();
    std::vector<CheckResult> mumford();
    std::vector<CheckResult> symplectic();
    std::vector<CheckResult> decoration();
    std::vector<CheckResult> k2prime();

    const DecoratedTree& tree();
    /// Called with each check name and its wall time in seconds.
    std::function<void(const std::string&, double)> on_timing;

private:
    SuiteOptions opts_;
    std::optional<DecoratedTree> tree_;
};

/// Regular-graph check of the radius-`radius` ball around v0 in S.
CheckResult symplectic_ball_check(int radius);
/// Parity, maximal isotropy and (Z/2)^2 quotient laws for all paths of length <= max_length.
CheckResult symplectic_path_check(int max_length);
/// Pairing on J'[2] for the 15 level-1 Lagrangians, plus a degenerate control.
CheckResult symplectic_quotient_check();
/// Only scalars fix the tree subgroups up to `level`; level 2 adds a seeded sample.
std::vector<CheckResult> symplectic_scalar_checks(int level, std::uint64_t samples, std::uint64_t seed,
                                                  std::uint64_t max_enum);

/// Seeded points (rational x0, adjoined y0) pushed along splittings of `c`, checked on the image curve.
CheckResult pushforward_check(const Curve& c, int points, std::uint64_t seed);

}  // namespace rtower

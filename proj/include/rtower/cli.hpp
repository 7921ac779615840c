#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rtower/qfield.hpp"

namespace rtower::cli {

struct RunConfig {
    std::optional<std::vector<Rational>> alphas;
    int depth = 3;
    std::string suite = "all";
    std::string out;  // empty: standard output
    int cap = 3;
    int max_tower_height = 12;
    int max_vertices = 4000;
    std::uint64_t max_enum = 1000000;
    std::uint64_t samples = 100000;
    int push_points = 24;
    std::uint64_t seed = 1;
    int threads = 1;
    int json_indent = 2;
};

/// Comma-separated rationals, e.g. "0,2,1/3".
std::vector<Rational> parse_rationals(const std::string& text);

/**
 * Reads `key = value` lines ('#' starts a comment) over `base`. Keys are the
 * RunConfig field names. Throws std::invalid_argument on unknown keys or bad values.
 */
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Exit code: 0 all checks pass, 1 a check or invariant failed, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rtower::cli

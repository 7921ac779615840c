#include "rtower/mumford.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "rtower/errors.hpp"

namespace rtower::mumford {

namespace {

constexpr Mask kAll = (1U << kLabels) - 1;

Mask canonical_mask(Mask m) {
    if (std::popcount(m) > 2) m = static_cast<Mask>(kAll & ~m);
    return m;
}

Mask mask_of(std::initializer_list<int> labels) {
    Mask m = 0;
    for (int l : labels) {
        if (l < 0 || l >= kLabels) throw std::invalid_argument("branch label out of range");
        m = static_cast<Mask>(m ^ (1U << l));
    }
    return m;
}

}  // namespace

TwoTorsion::TwoTorsion(Mask subset, int branch) : branch_(branch) {
    if (subset > kAll) throw std::invalid_argument("branch label out of range");
    if (std::popcount(subset) % 2 != 0) throw std::invalid_argument("e_U needs an even subset U");
    mask_ = canonical_mask(subset);
}

TwoTorsion TwoTorsion::of(std::initializer_list<int> labels, int branch) {
    return TwoTorsion(mask_of(labels), branch);
}

std::vector<int> TwoTorsion::labels() const {
    std::vector<int> out;
    for (int l = 0; l < kLabels; ++l)
        if (mask_ >> l & 1U) out.push_back(l);
    return out;
}

TwoTorsion operator+(const TwoTorsion& a, const TwoTorsion& b) {
    if (a.branch() != b.branch()) throw context_mismatch("2-torsion elements over different branch sets");
    return TwoTorsion(static_cast<Mask>(a.mask() ^ b.mask()), a.branch());
}

int pairing(const TwoTorsion& a, const TwoTorsion& b) {
    if (a.branch() != b.branch()) throw context_mismatch("2-torsion elements over different branch sets");
    return std::popcount(static_cast<unsigned>(a.mask() & b.mask())) % 2 ? -1 : 1;
}

std::vector<TwoTorsion> all_elements(int branch) {
    std::vector<TwoTorsion> out;
    for (unsigned m = 0; m <= kAll; ++m)
        if (std::popcount(m) == 0 || std::popcount(m) == 2) out.emplace_back(static_cast<Mask>(m), branch);
    return out;
}

Subgroup span(const TwoTorsion& a, const TwoTorsion& b) {
    Subgroup s{TwoTorsion(0, a.branch()), a, b, a + b};
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == s[i - 1]) throw std::invalid_argument("generators span fewer than four elements");
    return s;
}

bool is_isotropic(const Subgroup& s) {
    for (const auto& x : s)
        for (const auto& y : s)
            if (pairing(x, y) != 1) return false;
    return true;
}

LabelTriple canonical(LabelTriple t) {
    for (auto& p : t)
        if (p[0] > p[1]) std::swap(p[0], p[1]);
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<LabelTriple> label_classes() {
    std::vector<LabelTriple> out;
    for (int i = 1; i < kLabels; ++i) {
        std::vector<int> rest;
        for (int k = 1; k < kLabels; ++k)
            if (k != i) rest.push_back(k);
        for (int j = 1; j < 4; ++j) {
            std::vector<int> last;
            for (int k = 1; k < 4; ++k)
                if (k != j) last.push_back(rest[static_cast<std::size_t>(k)]);
            out.push_back(canonical({{{0, i}, {rest[0], rest[static_cast<std::size_t>(j)]}, {last[0], last[1]}}}));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Subgroup subgroup_of(const LabelTriple& t, int branch) {
    Subgroup s{TwoTorsion(0, branch), TwoTorsion::of({t[0][0], t[0][1]}, branch),
               TwoTorsion::of({t[1][0], t[1][1]}, branch), TwoTorsion::of({t[2][0], t[2][1]}, branch)};
    std::sort(s.begin(), s.end());
    return s;
}

LabelTriple class_of(const Subgroup& s) {
    LabelTriple t{};
    std::size_t k = 0;
    Mask seen = 0;
    for (const auto& x : s) {
        if (x.is_zero()) continue;
        const std::vector<int> l = x.labels();
        if (l.size() != 2 || k == 3 || (seen & x.mask())) throw std::invalid_argument("not a maximal isotropic subgroup");
        seen = static_cast<Mask>(seen | x.mask());
        t[k++] = {l[0], l[1]};
    }
    if (k != 3) throw std::invalid_argument("not a maximal isotropic subgroup");
    return canonical(t);
}

std::vector<Subgroup> maximal_isotropics(int branch) {
    // Exhaustive: every order-4 subgroup, kept if isotropic.
    const std::vector<TwoTorsion> all = all_elements(branch);
    std::vector<Subgroup> found;
    for (std::size_t i = 1; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            Subgroup s = span(all[i], all[j]);
            if (is_isotropic(s) && std::find(found.begin(), found.end(), s) == found.end()) found.push_back(s);
        }
    std::sort(found.begin(), found.end(),
              [](const Subgroup& a, const Subgroup& b) { return class_of(a) < class_of(b); });
    return found;
}

Permutation identity_permutation() {
    Permutation p{};
    std::iota(p.begin(), p.end(), 0);
    return p;
}

TwoTorsion permute(const Permutation& sigma, const TwoTorsion& x) {
    Mask m = 0;
    for (int l : x.labels()) m = static_cast<Mask>(m | (1U << sigma[static_cast<std::size_t>(l)]));
    return TwoTorsion(m, x.branch());
}

LabelTriple permute(const Permutation& sigma, const LabelTriple& t) {
    LabelTriple out{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j) out[i][j] = sigma[static_cast<std::size_t>(t[i][j])];
    return canonical(out);
}

Subgroup permute(const Permutation& sigma, const Subgroup& s) {
    Subgroup out;
    std::transform(s.begin(), s.end(), out.begin(), [&](const TwoTorsion& x) { return permute(sigma, x); });
    std::sort(out.begin(), out.end());
    return out;
}

std::string label_name(int label) { return label == kInfinity ? "inf" : "a" + std::to_string(label + 1); }

}  // namespace rtower::mumford

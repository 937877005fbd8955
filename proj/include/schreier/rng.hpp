#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "schreier/core.hpp"

namespace schreier {

// Channel-id namespaces, one block per module. Randomized operations never
// share a channel across modules; the registry below is asserted disjoint by
// the test suite.
namespace channels {

struct Range {
    const char* module_name;
    std::uint32_t lo, hi; // [lo, hi)
};

inline constexpr std::uint32_t hierarchy_lo = 0, hierarchy_hi = 1024;
inline constexpr std::uint32_t decorators_lo = 1024, decorators_hi = 2048;
inline constexpr std::uint32_t derived_lo = 2048, derived_hi = 3072;
inline constexpr std::uint32_t verify_lo = 3072, verify_hi = 4096;

// hierarchy
inline constexpr std::uint32_t site_colour = 0;
inline constexpr std::uint32_t face_coin = 1;
inline constexpr std::uint32_t coarsen_round(int r) { return 8 + static_cast<std::uint32_t>(r); } // r < 1000

// decorators
inline constexpr std::uint32_t square_anchor = 1024;
inline constexpr std::uint32_t square_anchor_c4 = 1025;
inline constexpr std::uint32_t interface_bit = 1026;
inline constexpr std::uint32_t orient_pick = 1027;
inline constexpr std::uint32_t orient_dir = 1028;
inline constexpr std::uint32_t tri_direction = 1029;
inline constexpr std::uint32_t tri_anchor = 1030;
inline constexpr std::uint32_t tri_interface = 1031;
inline constexpr std::uint32_t kagome_pattern = 1032;
inline constexpr std::uint32_t t3464_orient = 1033;
inline constexpr std::uint32_t gridd_interface = 1034;
inline constexpr std::uint32_t gridd_inner = 1035;
inline constexpr std::uint32_t gridd_anchor = 1036;
inline constexpr std::uint32_t planar_pattern = 1037;
inline constexpr std::uint32_t planar_euler = 1038;
inline constexpr std::uint32_t product_side = 1039;
inline constexpr std::uint32_t product_layer = 1040;
inline constexpr std::uint32_t residual_seed = 1041;
inline constexpr std::uint32_t kagome_boundary = 1042;
inline constexpr std::uint32_t toast_round(int scale, int r) {
    return 1100 + static_cast<std::uint32_t>(scale) * 256 + static_cast<std::uint32_t>(r); // scale < 3, r < 256
}

// derived
inline constexpr std::uint32_t light_dark = 2048;
inline constexpr std::uint32_t line_match = 2049;

// verify
inline constexpr std::uint32_t probe_resample = 3072;

inline std::vector<Range> registry() {
    return {
        {"hierarchy", hierarchy_lo, hierarchy_hi},
        {"decorators", decorators_lo, decorators_hi},
        {"derived", derived_lo, derived_hi},
        {"verify", verify_lo, verify_hi},
    };
}

} // namespace channels

// Deterministic per-(vertex, channel) uniform labels. Counter-based: any label
// is a pure function of (master_seed, graph id, salt, vertex, channel), so
// evaluation is random-access and trivially parallel. `salt` separates retry
// trials and test resampling; `override_fn` lets tests force specific labels.
struct LabelField {
    std::uint64_t master_seed = 0;
    std::uint64_t graph_id = 0;
    std::uint64_t salt = 0;
    std::function<std::optional<std::uint64_t>(VertexId, std::uint32_t)> override_fn;

    LabelField() = default;
    LabelField(std::uint64_t seed, std::uint64_t graph)
        : master_seed(seed), graph_id(graph) {}

    std::uint64_t base() const { return mix64(mix64(mix64(master_seed) ^ graph_id) ^ salt); }

    std::uint64_t raw(VertexId v, std::uint32_t channel) const {
        if (override_fn) {
            if (auto forced = override_fn(v, channel)) return *forced;
        }
        std::uint64_t h = mix64(base() ^ (0x9e3779b97f4a7c15ULL * (std::uint64_t(v) + 1)));
        return mix64(h ^ (0xc2b2ae3d27d4eb4fULL * (std::uint64_t(channel) + 1)));
    }

    double label(VertexId v, std::uint32_t channel) const {
        return double(raw(v, channel) >> 11) * 0x1.0p-53;
    }

    // Permutation-invariant composition: depends only on the set, not on the
    // order of presentation. Labels are folded in sorted order, ties broken by
    // vertex id.
    std::uint64_t raw_joint(std::span<const VertexId> set, std::uint32_t channel) const {
        require(!set.empty(), Errc::empty_set, "joint label of empty set");
        std::vector<std::pair<std::uint64_t, VertexId>> labels;
        labels.reserve(set.size());
        for (VertexId v : set) labels.emplace_back(raw(v, channel), v);
        std::sort(labels.begin(), labels.end());
        std::uint64_t h = 0x6a09e667f3bcc909ULL;
        for (const auto& [r, v] : labels) h = mix64(h ^ r);
        return h;
    }

    double joint_label(std::span<const VertexId> set, std::uint32_t channel) const {
        return double(raw_joint(set, channel) >> 11) * 0x1.0p-53;
    }

    std::uint32_t choose(std::span<const VertexId> set, std::uint32_t channel,
                         std::uint32_t alternatives) const {
        require(alternatives >= 1, Errc::zero_alternatives, "choose needs at least one alternative");
        std::uint64_t r = raw_joint(set, channel);
        return std::uint32_t((static_cast<unsigned __int128>(r) * alternatives) >> 64);
    }

    LabelField with_salt(std::uint64_t extra) const {
        LabelField f = *this;
        f.salt = mix64(salt ^ extra);
        return f;
    }
};

} // namespace schreier

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace schreier {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using FaceId = std::uint32_t;

inline constexpr VertexId kNoVertex = ~VertexId(0);
inline constexpr EdgeId kNoEdge = ~EdgeId(0);
inline constexpr FaceId kNoFace = ~FaceId(0);

enum class Errc {
    unsupported_dims,
    non_regular_input,
    wrong_kind,
    missing_face_choice,
    empty_set,
    zero_alternatives,
    wrapping_cluster,
    ambiguous_parent,
    insufficient_coarsening,
    insufficient_spacing,
    face_data_missing,
    window_too_small,
    no_independent_set,
    residual_decomposition_failed,
    odd_cycle,
    incomplete_colouring,
    invalid_source_decoration,
    odd_d,
    non_cycle_component,
    wrapping_monochrome_cycle,
    too_large,
    not_balanced,
    retries_exhausted,
    bad_input,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::unsupported_dims: return "UnsupportedDims";
        case Errc::non_regular_input: return "NonRegularInput";
        case Errc::wrong_kind: return "WrongKind";
        case Errc::missing_face_choice: return "MissingFaceChoice";
        case Errc::empty_set: return "EmptySet";
        case Errc::zero_alternatives: return "ZeroAlternatives";
        case Errc::wrapping_cluster: return "WrappingCluster";
        case Errc::ambiguous_parent: return "AmbiguousParent";
        case Errc::insufficient_coarsening: return "InsufficientCoarsening";
        case Errc::insufficient_spacing: return "InsufficientSpacing";
        case Errc::face_data_missing: return "FaceDataMissing";
        case Errc::window_too_small: return "WindowTooSmall";
        case Errc::no_independent_set: return "NoIndependentSet";
        case Errc::residual_decomposition_failed: return "ResidualDecompositionFailed";
        case Errc::odd_cycle: return "OddCycle";
        case Errc::incomplete_colouring: return "IncompleteColouring";
        case Errc::invalid_source_decoration: return "InvalidSourceDecoration";
        case Errc::odd_d: return "OddD";
        case Errc::non_cycle_component: return "NonCycleComponent";
        case Errc::wrapping_monochrome_cycle: return "WrappingMonochromeCycle";
        case Errc::too_large: return "TooLarge";
        case Errc::not_balanced: return "NotBalanced";
        case Errc::retries_exhausted: return "RetriesExhausted";
        case Errc::bad_input: return "BadInput";
    }
    return "?";
}

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace schreier

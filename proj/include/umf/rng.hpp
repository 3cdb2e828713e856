#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace umf {

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key; the 128-bit counter is split into a 64-bit
/// stream id (high words) and a 64-bit position (low words). Two generators
/// with the same (seed, stream) produce the same sequence regardless of the
/// thread or order in which they are created.
///
/// Stream ids used by the samplers:
///   0  circulant-embedding normals
///   1  Karhunen-Loeve coefficients
///   2  Poisson point count and positions
///   3  lattice weights (position = lattice index, see sample_field)
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t position = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Raw block for an explicit counter, no internal state touched.
    static std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream, std::uint64_t position);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t position_;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Philox4x32& gen);

/// Standard normal via Box-Muller; consumes two draws per call.
double standard_normal(Philox4x32& gen);

}  // namespace umf

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sphcusum {

// Philox4x64-10 counter-based block cipher. A (key, counter) pair maps to
// four pseudo-random 64-bit words; streams keyed by (seed, stream) are
// independent and random-accessible, so parallel consumers never share state.
struct Philox4x64 {
    using Block = std::array<std::uint64_t, 4>;

    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73Bull;

    static Block encrypt(Block c, std::uint64_t k0, std::uint64_t k1) {
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 p0 = static_cast<unsigned __int128>(M0) * c[0];
            const unsigned __int128 p1 = static_cast<unsigned __int128>(M1) * c[2];
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += W0;
            k1 += W1;
        }
        return c;
    }
};

// Derives an independent child seed for nested task structures (experiment
// replicate -> panel, etc). Bijective in index for a fixed (seed, domain).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                 std::uint64_t domain = 0) {
    return Philox4x64::encrypt({index, 0, 0, domain}, seed, 0x5bd1e995u)[0];
}

// Sequential view of one (seed, stream) Philox stream: uniforms on (0,1] and
// exact standard normals via the Marsaglia polar method.
class SubstreamRng {
  public:
    SubstreamRng(std::uint64_t seed, std::uint64_t stream)
        : key0_(seed), key1_(stream) {}

    std::uint64_t next_u64() {
        if (pos_ == 4) {
            buf_ = Philox4x64::encrypt({block_++, 0, 0, 0}, key0_, key1_);
            pos_ = 0;
        }
        return buf_[pos_++];
    }

    // (0,1]: never returns 0, so log() below is always finite.
    double next_uniform() {
        return ((next_u64() >> 11) + 1) * 0x1p-53;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_uniform() - 1.0;
            v = 2.0 * next_uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    std::uint64_t key0_, key1_;
    Philox4x64::Block buf_{};
    std::uint64_t block_ = 0;
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace sphcusum

#pragma once

#include <cmath>
#include <cstdint>

namespace s3lda {

// Counter-based generator (Philox 4x32-10). A generator instance is pinned
// to (seed, stream, substream); draws advance a 64-bit block counter only.
// Distinct streams never share counter blocks, so replications and purposes
// (generation, masking, subsampling) are independent and order-insensitive,
// which is what makes thread-count-invariant experiments possible.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint32_t stream = 0, std::uint32_t substream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_(stream),
          substream_(substream) {}

    using result_type = std::uint32_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }

    result_type operator()() { return next_u32(); }

    std::uint32_t next_u32() {
        if (pos_ == 4) {
            fill_block();
            pos_ = 0;
        }
        return block_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform on (0,1): 53-bit mantissa, zero mapped to the smallest step.
    double uniform01() {
        const std::uint64_t r = next_u64() >> 11;
        if (r == 0) return 0x1.0p-53;
        return static_cast<double>(r) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Student-t with integer df >= 1, as normal / sqrt(chi^2_df / df).
    double student_t(int df) {
        const double z = normal();
        double chi2 = 0.0;
        for (int i = 0; i < df; ++i) {
            const double g = normal();
            chi2 += g * g;
        }
        return z / std::sqrt(chi2 / static_cast<double>(df));
    }

private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void fill_block() {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
        std::uint32_t c2 = substream_;
        std::uint32_t c3 = stream_;
        std::uint32_t k0 = key0_;
        std::uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        block_[0] = c0;
        block_[1] = c1;
        block_[2] = c2;
        block_[3] = c3;
        ++counter_;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_, substream_;
    std::uint64_t counter_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Fixed substream ids, one per purpose that consumes randomness.
namespace rng_purpose {
inline constexpr std::uint32_t kGeneration = 0;
inline constexpr std::uint32_t kMaskTrain = 1;
inline constexpr std::uint32_t kMaskTune = 2;
// Eta pair subsampling gets one substream per grid cell.
inline constexpr std::uint32_t kEtaBase = 1u << 16;
}  // namespace rng_purpose

}  // namespace s3lda

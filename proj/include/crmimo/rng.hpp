#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace crmimo {

// Counter-based splittable generator.
//
// Output i of a stream is mix64(key + (i+1)*GAMMA) -- the SplitMix64 finalizer
// over a keyed counter, so a stream is addressed by (key, counter) alone.
// split() derives a child key from the parent key and a tag without touching
// the parent state; parallel Monte Carlo derives one child per task index (or
// per label), which makes results independent of worker count and scheduling.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : key_(mix64(seed ^ 0x7c3dbd3ac8b5f7d1ULL)) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, the pair partner is cached).
    double normal() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cache_ = r * std::sin(a);
        have_cache_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex normal with E|Z|^2 = variance.
    std::complex<double> cnormal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        return {s * normal(), s * normal()};
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is always tiny vs 2^64.
        return next_u64() % n;
    }

    SplitRng split(std::uint64_t tag) const {
        return SplitRng(from_key(mix64(key_ ^ mix64(tag + 0x9e3779b97f4a7c15ULL))));
    }

    SplitRng split(std::string_view label) const { return split(fnv1a(label)); }

private:
    struct FromKey {};
    SplitRng(std::uint64_t key, FromKey) : key_(key) {}
    static SplitRng from_key(std::uint64_t key) { return SplitRng(key, FromKey{}); }

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double cache_ = 0.0;
    bool have_cache_ = false;
};

}  // namespace crmimo

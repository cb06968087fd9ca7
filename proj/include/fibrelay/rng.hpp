#ifndef FIBRELAY_RNG_HPP
#define FIBRELAY_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fibrelay {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so ensembles can be partitioned across threads
// in any way without changing a single bit of the output.

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
    std::uint64_t h = detail::splitmix64(seed ^ 0x6a09e667f3bcc908ULL);
    h = detail::splitmix64(h ^ stream);
    h = detail::splitmix64(h ^ counter);
    return h;
}

// Uniform in (0,1); never returns 0 or 1.
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t counter) {
    const std::uint64_t bits = counter_hash(seed, stream, counter);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

// Standard normal via Box-Muller on two counter draws.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t counter) {
    const double u1 = counter_uniform(seed, stream, 2 * counter);
    const double u2 = counter_uniform(seed, stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Small sequential convenience wrapper around the counter scheme.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream), counter_(0) {}

    double uniform() { return counter_uniform(seed_, stream_, counter_++); }
    double normal() { return counter_normal(seed_, stream_, counter_++); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    std::uint64_t bits() { return counter_hash(seed_, stream_, counter_++); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_;
};

} // namespace fibrelay

#endif

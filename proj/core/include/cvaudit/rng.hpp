#ifndef CVAUDIT_RNG_HPP
#define CVAUDIT_RNG_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cvaudit {

// Counter-based generator (splitmix64). Used everywhere instead of
// std:: distributions so that streams are reproducible across platforms
// and standard library versions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Unbiased via rejection.
    uint64_t next_below(uint64_t n);

    // Index into a cumulative-probability table built from `weights`
    // (weights need not be normalised; all must be >= 0).
    size_t next_discrete(std::span<const double> weights);

    // +1 or -1 with equal probability.
    int next_sign() { return (next_u64() >> 63) ? 1 : -1; }

    // Standard normal via Box-Muller on our own uniforms.
    double next_gaussian();

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from a master seed and a path string,
// e.g. derive_seed(master, "trial/v0007/Turkish/female"). Stable across
// runs and platforms; used to make every draw addressable so execution
// order can never change an assignment.
uint64_t derive_seed(uint64_t master, std::string_view path);

}  // namespace cvaudit

#endif

#include "cvaudit/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "cvaudit/hash.hpp"

namespace cvaudit {

uint64_t Rng::next_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

size_t Rng::next_discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;  // floating-point tail
}

double Rng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1, u2;
    do {
        u1 = next_double();
    } while (u1 <= 0.0);
    u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

uint64_t derive_seed(uint64_t master, std::string_view path) {
    uint64_t h = fnv1a64(path);
    // mix master and path hash through one splitmix round each
    Rng mix(master ^ (h * 0x9E3779B97F4A7C15ull));
    mix.next_u64();
    return mix.next_u64() ^ h;
}

}  // namespace cvaudit

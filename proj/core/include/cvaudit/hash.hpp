#ifndef CVAUDIT_HASH_HPP
#define CVAUDIT_HASH_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cvaudit {

// FNV-1a, 64-bit. Content fingerprinting only (corpus/plan/prompt digests),
// no adversarial resistance required.
constexpr uint64_t fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ull) {
    uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex(uint64_t v);

// Hex digest of a single string.
std::string digest_string(std::string_view data);

// Order-independent digest of a set of records: per-record hashes are
// sorted before chaining, so permuting the input files does not change
// the corpus fingerprint.
std::string digest_unordered(const std::vector<std::string>& records);

}  // namespace cvaudit

#endif
